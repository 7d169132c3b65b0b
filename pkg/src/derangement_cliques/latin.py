"""Latin squares, orthogonality, rectangle completion and the correspondence
between orthogonal square pairs and disconnected ordered clique pairs.

Rows, columns and symbols are 1-based in every public interface.
"""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import (
    BrokenPair,
    DegreeMismatch,
    InvalidRectangle,
    NotLatin,
    NotOrthogonal,
    ParseError,
)
from .perm import Permutation, is_derangement, n_fixed

Grid = Sequence[Sequence[int]]


def _is_latin_grid(grid: Grid) -> bool:
    n = len(grid)
    if n == 0 or any(len(row) != n for row in grid):
        return False
    symbols = set(range(1, n + 1))
    if any(set(row) != symbols for row in grid):
        return False
    return all({grid[i][j] for i in range(n)} == symbols for j in range(n))


@dataclass(frozen=True)
class LatinSquare:
    grid: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        grid = tuple(tuple(int(x) for x in row) for row in self.grid)
        object.__setattr__(self, "grid", grid)
        if not _is_latin_grid(grid):
            raise NotLatin(f"not a Latin square: {grid}")

    @property
    def n(self) -> int:
        return len(self.grid)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        """Entry in row i, column j (1-based)."""
        i, j = ij
        return self.grid[i - 1][j - 1]

    def transpose(self) -> LatinSquare:
        return LatinSquare(tuple(zip(*self.grid)))

    def __str__(self) -> str:
        return format_square(self)


def is_latin(square: LatinSquare | Grid) -> bool:
    if isinstance(square, LatinSquare):
        return True
    return _is_latin_grid(square)


def are_orthogonal(a: LatinSquare, b: LatinSquare) -> bool:
    """True iff overlaying a and b produces all n^2 ordered symbol pairs."""
    if a.n != b.n:
        raise DegreeMismatch(f"orders differ: {a.n} vs {b.n}")
    pairs = {(x, y) for ra, rb in zip(a.grid, b.grid) for x, y in zip(ra, rb)}
    return len(pairs) == a.n * a.n


@dataclass(frozen=True)
class LatinRectangle:
    """m <= n rows, each a permutation, no two rows agreeing in any column."""

    rows: tuple[Permutation, ...]

    def __post_init__(self) -> None:
        rows = tuple(self.rows)
        object.__setattr__(self, "rows", rows)
        if not rows:
            raise InvalidRectangle("a rectangle needs at least one row")
        n = rows[0].n
        if any(r.n != n for r in rows) or len(rows) > n:
            raise InvalidRectangle("rows must share one degree n and number at most n")
        for i in range(len(rows)):
            for j in range(i + 1, len(rows)):
                if n_fixed(rows[i], rows[j]):
                    raise InvalidRectangle(f"rows {i + 1} and {j + 1} agree in some column")

    @property
    def n(self) -> int:
        return self.rows[0].n


@dataclass(frozen=True)
class OrderedCliquePair:
    """Two ordered lists of permutations; see :meth:`violations` for the invariants."""

    row_cliques: tuple[Permutation, ...]
    col_cliques: tuple[Permutation, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "row_cliques", tuple(self.row_cliques))
        object.__setattr__(self, "col_cliques", tuple(self.col_cliques))

    @property
    def n(self) -> int:
        return self.row_cliques[0].n

    def violations(self) -> list[str]:
        out = []
        n = self.n
        for name, clique in (("row", self.row_cliques), ("column", self.col_cliques)):
            if len(clique) != n:
                out.append(f"{name} clique has {len(clique)} members, expected {n}")
            for i in range(len(clique)):
                for j in range(i + 1, len(clique)):
                    if not is_derangement(clique[i] * clique[j].inverse()):
                        out.append(f"{name} members {i + 1},{j + 1} are not adjacent")
        for i, s in enumerate(self.row_cliques, start=1):
            for j, w in enumerate(self.col_cliques, start=1):
                if n_fixed(s, w) != 1:
                    out.append(f"sigma_{i} omega_{j}^-1 has {n_fixed(s, w)} fixed points")
        return out

    def is_valid(self) -> bool:
        return not self.violations()

    def canonical(self) -> OrderedCliquePair:
        """Both cliques sorted lexicographically, for set-level comparison."""
        return OrderedCliquePair(tuple(sorted(self.row_cliques)), tuple(sorted(self.col_cliques)))


def gamma(a: LatinSquare, b: LatinSquare) -> OrderedCliquePair:
    """Map an orthogonal pair to its ordered clique pair.

    sigma_j sends A[j,k] to B[j,k] along row j; omega_j sends A[k,j] to B[k,j]
    down column j.
    """
    if not are_orthogonal(a, b):
        raise NotOrthogonal("gamma needs an orthogonal pair")
    n = a.n
    sigmas = []
    omegas = []
    for j in range(n):
        row = [0] * n
        col = [0] * n
        for k in range(n):
            row[a.grid[j][k] - 1] = b.grid[j][k]
            col[a.grid[k][j] - 1] = b.grid[k][j]
        sigmas.append(Permutation(tuple(row)))
        omegas.append(Permutation(tuple(col)))
    pair = OrderedCliquePair(tuple(sigmas), tuple(omegas))
    problems = pair.violations()
    if problems:
        raise AssertionError(f"gamma produced an invalid pair: {problems[:3]}")
    return pair


def omega(pair: OrderedCliquePair) -> tuple[LatinSquare, LatinSquare]:
    """Inverse of :func:`gamma`: A[i,j] is the unique point where sigma_i and omega_j agree."""
    n = pair.n
    if len(pair.row_cliques) != n or len(pair.col_cliques) != n:
        raise BrokenPair("both cliques must have n members")
    a = [[0] * n for _ in range(n)]
    b = [[0] * n for _ in range(n)]
    for i, s in enumerate(pair.row_cliques):
        for j, w in enumerate(pair.col_cliques):
            agree = [x for x in range(1, n + 1) if s(x) == w(x)]
            if len(agree) != 1:
                raise BrokenPair(
                    f"sigma_{i + 1} omega_{j + 1}^-1 has {len(agree)} fixed points, expected 1"
                )
            a[i][j] = agree[0]
            b[i][j] = s(agree[0])
    try:
        sa, sb = LatinSquare(a), LatinSquare(b)
    except NotLatin as exc:
        raise BrokenPair(f"cliques do not yield Latin squares: {exc}") from None
    if not are_orthogonal(sa, sb):
        raise BrokenPair("recovered squares are not orthogonal")
    return sa, sb


def _perfect_matching(allowed: list[list[int]], n: int) -> list[int] | None:
    """Kuhn's augmenting paths: column k -> symbol in allowed[k], all symbols distinct."""
    owner = [-1] * n  # symbol -> column

    def augment(k: int, seen: list[bool]) -> bool:
        for x in allowed[k]:
            if seen[x]:
                continue
            seen[x] = True
            if owner[x] == -1 or augment(owner[x], seen):
                owner[x] = k
                return True
        return False

    for k in range(n):
        if not augment(k, [False] * n):
            return None
    match = [0] * n
    for x, k in enumerate(owner):
        match[k] = x
    return match


def complete_rectangle(rect: LatinRectangle) -> LatinSquare:
    """Extend a Latin rectangle to a Latin square, one matched row at a time.

    Column k may take any symbol not yet used in it; Hall's condition always
    holds for these sets, so a missing matching means a bug.
    """
    n = rect.n
    rows = [list(r.zero_based) for r in rect.rows]
    while len(rows) < n:
        used = [{r[k] for r in rows} for k in range(n)]
        allowed = [[x for x in range(n) if x not in used[k]] for k in range(n)]
        match = _perfect_matching(allowed, n)
        if match is None:
            raise AssertionError("no perfect matching on a valid Latin rectangle")
        rows.append(match)
    return LatinSquare(tuple(tuple(x + 1 for x in r) for r in rows))


def enumerate_latin_squares(n: int) -> Iterator[LatinSquare]:
    """Every Latin square of order n, by cell-by-cell backtracking in row-major order."""
    full = (1 << n) - 1
    row_used = [0] * n
    col_used = [0] * n
    grid = [[0] * n for _ in range(n)]

    def fill(cell: int) -> Iterator[LatinSquare]:
        if cell == n * n:
            yield LatinSquare(tuple(tuple(r) for r in grid))
            return
        i, j = divmod(cell, n)
        free = full & ~(row_used[i] | col_used[j])
        while free:
            bit = free & -free
            free ^= bit
            row_used[i] |= bit
            col_used[j] |= bit
            grid[i][j] = bit.bit_length()
            yield from fill(cell + 1)
            row_used[i] ^= bit
            col_used[j] ^= bit

    yield from fill(0)


def count_latin_squares(n: int) -> int:
    """Count Latin squares of order n by the same backtracking, without materializing them."""
    full = (1 << n) - 1
    row_used = [0] * n
    col_used = [0] * n
    last = n * n

    def fill(cell: int) -> int:
        if cell == last:
            return 1
        i, j = divmod(cell, n)
        free = full & ~(row_used[i] | col_used[j])
        total = 0
        while free:
            bit = free & -free
            free ^= bit
            row_used[i] |= bit
            col_used[j] |= bit
            total += fill(cell + 1)
            row_used[i] ^= bit
            col_used[j] ^= bit
        return total

    return fill(0)


def orthogonal_pairs(n: int) -> list[tuple[LatinSquare, LatinSquare]]:
    """All ordered orthogonal pairs of order n (brute force over the square catalog)."""
    squares = list(enumerate_latin_squares(n))
    flat = np.array([[x - 1 for row in s.grid for x in row] for s in squares], dtype=np.int64)
    out = []
    for i, s in enumerate(squares):
        codes = flat[i][None, :] * n + flat
        codes.sort(axis=1)
        distinct = (np.diff(codes, axis=1) != 0).all(axis=1)
        for j in np.flatnonzero(distinct):
            out.append((s, squares[int(j)]))
    return out


def cyclic_square(n: int, k: int = 1) -> LatinSquare:
    """A_k(i, j) = 1 + ((i - 1) + k (j - 1) mod n); Latin when gcd(k, n) = 1."""
    return LatinSquare(
        tuple(tuple(1 + ((i - 1) + k * (j - 1)) % n for j in range(1, n + 1)) for i in range(1, n + 1))
    )


def parse_square(text: str, first_line: int = 1) -> LatinSquare:
    """Parse n lines of n space-separated symbols."""
    rows: list[list[int]] = []
    numbered = [
        (first_line + off, line) for off, line in enumerate(text.splitlines()) if line.strip()
    ]
    if not numbered:
        raise ParseError("empty square", line=first_line)
    n = len(numbered)
    for lineno, line in numbered:
        toks = line.split()
        if len(toks) != n:
            raise ParseError(f"expected {n} entries, got {len(toks)}", line=lineno)
        row = []
        for col, tok in enumerate(toks, start=1):
            try:
                val = int(tok)
            except ValueError:
                raise ParseError(f"not an integer: {tok!r}", line=lineno, column=col) from None
            if not 1 <= val <= n:
                raise ParseError(f"symbol {val} outside 1..{n}", line=lineno, column=col)
            row.append(val)
        rows.append(row)
    for (lineno, _), row in zip(numbered, rows):
        if len(set(row)) != n:
            raise ParseError("row repeats a symbol", line=lineno)
    for j in range(n):
        if len({rows[i][j] for i in range(n)}) != n:
            raise ParseError("column repeats a symbol", line=numbered[0][0], column=j + 1)
    return LatinSquare(rows)


def format_square(square: LatinSquare) -> str:
    return "\n".join(" ".join(map(str, row)) for row in square.grid) + "\n"


def parse_pair(text: str) -> tuple[LatinSquare, LatinSquare]:
    """Two squares separated by one or more blank lines."""
    lines = text.splitlines()
    blocks: list[tuple[int, list[str]]] = []
    current: list[str] = []
    start = 1
    for lineno, line in enumerate(lines, start=1):
        if line.strip():
            if not current:
                start = lineno
            current.append(line)
        elif current:
            blocks.append((start, current))
            current = []
    if current:
        blocks.append((start, current))
    if len(blocks) != 2:
        raise ParseError(f"expected 2 squares separated by a blank line, found {len(blocks)}")
    a = parse_square("\n".join(blocks[0][1]), first_line=blocks[0][0])
    b = parse_square("\n".join(blocks[1][1]), first_line=blocks[1][0])
    if a.n != b.n:
        raise ParseError(f"squares have different orders {a.n} and {b.n}", line=blocks[1][0])
    return a, b


def format_pair(a: LatinSquare, b: LatinSquare) -> str:
    return format_square(a) + "\n" + format_square(b)
