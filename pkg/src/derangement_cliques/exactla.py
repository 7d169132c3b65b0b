"""Exact rank and nullspace over GF(p) and exact rank over the rationals.

No floating point is used anywhere here. GF(2) rank works on rows packed into
Python integers and eliminated with XOR; other primes use int64 numpy rows.
Rational rank uses fraction-free (Bareiss) elimination on Python integers.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import CompositeModulus, ParseError


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def _require_prime(p: int) -> None:
    if not is_prime(p):
        raise CompositeModulus(f"{p} is not prime")


@dataclass(frozen=True, eq=False)
class PrimeFieldMatrix:
    """Matrix with entries reduced into {0, ..., p-1}."""

    p: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        _require_prime(self.p)
        arr = np.array(self.entries, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ValueError(f"expected a non-empty 2-d matrix, got shape {arr.shape}")
        arr = np.mod(arr, self.p)
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def transpose(self) -> PrimeFieldMatrix:
        return PrimeFieldMatrix(self.p, self.entries.T)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PrimeFieldMatrix):
            return NotImplemented
        return self.p == other.p and np.array_equal(self.entries, other.entries)


@dataclass(frozen=True, eq=False)
class RationalMatrix:
    """Integer-entried matrix whose rank is taken over Q."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=object)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-d matrix, got shape {arr.shape}")
        arr = np.vectorize(int, otypes=[object])(arr) if arr.size else arr
        object.__setattr__(self, "entries", arr)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]


def pack_rows_gf2(entries: np.ndarray) -> list[int]:
    """Pack each 0/1 row into an int, column 0 as the most significant bit."""
    bits = np.packbits(np.asarray(entries, dtype=np.uint8) & 1, axis=1)
    cols = entries.shape[1]
    shift = bits.shape[1] * 8 - cols
    return [int.from_bytes(row.tobytes(), "big") >> shift for row in bits]


def rank_gf2_packed(rows: Sequence[int]) -> int:
    """Rank of bit-packed rows over GF(2), keyed on each row's lowest set bit."""
    pivots: dict[int, int] = {}
    for row in rows:
        while row:
            low = row & -row
            pivot = pivots.get(low)
            if pivot is None:
                pivots[low] = row
                break
            row ^= pivot
    return len(pivots)


def _rref_gf(arr: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    a = np.array(arr, dtype=np.int64) % p
    rows, cols = a.shape
    pivot_cols: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = (a[r] * inv) % p
        factors = a[:, c].copy()
        factors[r] = 0
        nzr = np.flatnonzero(factors)
        if nzr.size:
            a[nzr] = (a[nzr] - np.outer(factors[nzr], a[r])) % p
        pivot_cols.append(c)
        r += 1
    return a, pivot_cols


def rank_gf(m: PrimeFieldMatrix) -> int:
    """Row rank over GF(p)."""
    if m.p == 2:
        return rank_gf2_packed(pack_rows_gf2(m.entries))
    _, pivots = _rref_gf(m.entries, m.p)
    return len(pivots)


def nullspace_gf(m: PrimeFieldMatrix) -> list[np.ndarray]:
    """Basis of {v : m v = 0 mod p}; exactly cols - rank vectors."""
    reduced, pivots = _rref_gf(m.entries, m.p)
    p = m.p
    free = [c for c in range(m.cols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = np.zeros(m.cols, dtype=np.int64)
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-reduced[i, f]) % p
        basis.append(v)
    for v in basis:
        if np.any((m.entries @ v) % p):
            raise AssertionError("nullspace vector does not annihilate the matrix")
    return basis


def in_span_gf(vectors: Sequence[np.ndarray], v: np.ndarray, p: int) -> bool:
    if not len(vectors):
        return not np.any(np.asarray(v) % p)
    base = np.array(vectors, dtype=np.int64)
    r0 = len(_rref_gf(base, p)[1])
    r1 = len(_rref_gf(np.vstack([base, np.asarray(v)[None, :]]), p)[1])
    return r0 == r1


def rank_rational(m: RationalMatrix) -> int:
    """Exact rank over Q by fraction-free Bareiss elimination.

    After each pivot step every remaining entry is a minor of the input, so the
    division by the previous pivot is exact.
    """
    if m.rows == 0 or m.cols == 0:
        return 0
    a = m.entries.copy()
    a = a[[i for i in range(a.shape[0]) if any(a[i])]]
    prev = 1
    rank = 0
    for c in range(m.cols):
        if rank == a.shape[0]:
            break
        col = a[rank:, c]
        nz = [i for i, x in enumerate(col) if x != 0]
        if not nz:
            continue
        k = rank + nz[0]
        if k != rank:
            a[[rank, k]] = a[[k, rank]]
        pivot = a[rank, c]
        below = a[rank + 1 :]
        if below.shape[0]:
            updated = (pivot * below[:, c + 1 :] - np.outer(below[:, c], a[rank, c + 1 :])) // prev
            below[:, c + 1 :] = updated
            below[:, c] = 0
            keep = [i for i in range(below.shape[0]) if any(below[i, c + 1 :])]
            a = np.vstack([a[: rank + 1], below[keep]]) if keep else a[: rank + 1]
        prev = pivot
        rank += 1
    return rank


def dump_matrix(m: PrimeFieldMatrix) -> str:
    """Header ``p rows cols`` then row-major entries; GF(2) adds a hex section."""
    lines = [f"{m.p} {m.rows} {m.cols}"]
    lines += [" ".join(str(int(x)) for x in row) for row in m.entries]
    if m.p == 2:
        width = (m.cols + 3) // 4
        lines.append("# hex")
        shift = width * 4 - m.cols
        lines += [format(r << shift, f"0{width}x") for r in pack_rows_gf2(m.entries)]
    return "\n".join(lines) + "\n"


def load_matrix(text: str) -> PrimeFieldMatrix:
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty matrix dump")
    try:
        p, rows, cols = (int(t) for t in lines[0].split())
    except ValueError:
        raise ParseError("header must be 'p rows cols'", line=1) from None
    body = []
    for i in range(rows):
        lineno = i + 2
        if lineno - 1 >= len(lines):
            raise ParseError(f"expected {rows} rows", line=lineno)
        toks = lines[lineno - 1].split()
        if len(toks) != cols:
            raise ParseError(f"expected {cols} entries, got {len(toks)}", line=lineno)
        row = []
        for j, t in enumerate(toks, start=1):
            try:
                row.append(int(t))
            except ValueError:
                raise ParseError(f"not an integer: {t!r}", line=lineno, column=j) from None
        body.append(row)
    return PrimeFieldMatrix(p, np.array(body, dtype=np.int64))
