"""Fixed-point matrices, projection ranks, modular dependencies and the
Laplacian eigenvalues of the derangement graph.

The projection onto the natural representation is handled entirely through
fixed-point counts: row sigma of the fixed-point matrix is the function
tau -> n(sigma; tau), which is P_nat applied to the indicator of sigma.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .cache import Cache
from .clique import DisconnectedFamily, MaximalClique
from .errors import CharacteristicMismatch, DegreeOutOfRange, NonIntegralTrace
from .exactla import (
    PrimeFieldMatrix,
    RationalMatrix,
    _require_prime,
    in_span_gf,
    nullspace_gf,
    rank_gf,
    rank_rational,
)
from .perm import (
    MAX_TABLE_DEGREE,
    CycleType,
    Permutation,
    count_derangements,
    partitions,
    symmetric_group,
)

Field = Union[str, int]  # "Q" or a prime


@dataclass(frozen=True, eq=False)
class FixedPointMatrix:
    """entries[i, j] = n(sigma_i; sigma_j) with S_n in lexicographic order."""

    n: int
    entries: np.ndarray

    @property
    def order(self) -> list[Permutation]:
        return symmetric_group(self.n).elements()

    def row(self, sigma: Permutation) -> np.ndarray:
        return self.entries[symmetric_group(self.n).index(sigma)]

    def rows_for(self, members: Sequence[Permutation]) -> np.ndarray:
        group = symmetric_group(self.n)
        return self.entries[[group.index(m) for m in members]]


def fixed_point_matrix(n: int, cache: Cache | None = None) -> FixedPointMatrix:
    if not 1 <= n <= MAX_TABLE_DEGREE:
        raise DegreeOutOfRange(f"fixed-point matrix needs n <= {MAX_TABLE_DEGREE}, got {n}")
    group = symmetric_group(n)
    if cache is None:
        entries = group.agreement
    else:
        entries = cache.array(f"fixed-point-matrix-n{n}", lambda: group.agreement)
    entries = np.array(entries, dtype=np.int8)
    entries.setflags(write=False)
    return FixedPointMatrix(n, entries)


def adjacency_bits(n: int, cache: Cache | None = None) -> np.ndarray:
    """Packed bit matrix of X_n (one bit per pair, row-major, numpy.packbits layout)."""
    compute = lambda: np.packbits(fixed_point_matrix(n).entries == 0, axis=1)
    if cache is None:
        return compute()
    return cache.array(f"adjacency-bits-n{n}", compute)


def _field_label(field: Field) -> str:
    return "Q" if field == "Q" else f"GF({field})"


def predicted_image_dim(n: int, field: Field) -> int | None:
    """Predicted rank of the fixed-point matrix: (n-1)^2+1 over Q, (n-1)^2-2n+4 when p | n.

    Returns None for GF(p) with p not dividing n, where nothing is asserted.
    The prediction holds for odd p; in characteristic 2 the all-ones function
    already lies in the span of the row and column indicators, and the true
    rank is (n-2)^2, one less.
    """
    if field == "Q":
        return (n - 1) ** 2 + 1
    if n % int(field) == 0:
        return (n - 1) ** 2 - 2 * n + 4
    return None


def projection_image_dim(n: int, field: Field, cache: Cache | None = None) -> int:
    """Dimension of the image of P_nat, i.e. the rank of the fixed-point matrix."""
    m = fixed_point_matrix(n, cache).entries
    if field == "Q":
        return rank_rational(RationalMatrix(m))
    return rank_gf(PrimeFieldMatrix(int(field), m))


def obstruction_bound(n: int, r: int) -> int:
    """floor((n^2 - 4n + r + 5) / 2)."""
    return (n * n - 4 * n + r + 5) // 2


def _check_char(n: int, p: int) -> None:
    _require_prime(p)
    if n % p:
        raise CharacteristicMismatch(f"{p} does not divide {n}")


def family_span_dim(family: DisconnectedFamily, p: int) -> int:
    """Rank over GF(p) of the fixed-point rows of every member of the family."""
    _check_char(family.n, p)
    sub = fixed_point_matrix(family.n).rows_for(family.members())
    return rank_gf(PrimeFieldMatrix(p, sub))


@dataclass
class DependencyBasis:
    """GF(p) relations sum_sigma f(sigma) n(sigma; tau) = 0 among the family's members.

    Vectors are indexed like ``members``. ``clique_vectors`` are the clique
    indicators; ``non_clique_vectors`` extend them to a basis of all relations.
    """

    family: DisconnectedFamily
    p: int
    members: list[Permutation]
    clique_vectors: list[np.ndarray]
    non_clique_vectors: list[np.ndarray]

    @property
    def nullity(self) -> int:
        return len(self.clique_vectors) + len(self.non_clique_vectors)

    def as_subset(self, v: np.ndarray) -> list[Permutation]:
        return [m for m, x in zip(self.members, v) if x % self.p]


def min_non_clique_dependencies(n: int) -> int | None:
    """Lower bound on the non-clique dependencies of a disconnected pair at degree n."""
    return {3: 2, 4: 3, 5: 2, 6: 1}.get(n)


def dependency_basis(family: DisconnectedFamily, p: int) -> DependencyBasis:
    _check_char(family.n, p)
    members = family.members()
    sub = fixed_point_matrix(family.n).rows_for(members).astype(np.int64)
    kernel = nullspace_gf(PrimeFieldMatrix(p, sub.T))
    size = family.n
    cliques = []
    for k in range(family.r):
        v = np.zeros(len(members), dtype=np.int64)
        v[k * size : (k + 1) * size] = 1
        cliques.append(v)
    chosen: list[np.ndarray] = []
    for v in kernel:
        if not in_span_gf(cliques + chosen, v, p):
            chosen.append(v)
    for v in cliques + chosen:
        if np.any((v @ sub) % p):
            raise AssertionError("dependency does not vanish on every tau")
    for v in chosen:
        blocks = v.reshape(family.r, size)
        if all(len(set(b.tolist())) == 1 for b in blocks):
            raise AssertionError("non-clique dependency is constant on every clique")
    return DependencyBasis(family, p, members, cliques, chosen)


@dataclass(frozen=True)
class EigenvalueRecord:
    label: str
    dimension: int
    value: Fraction


Character = Union[Mapping[tuple[int, ...], int], Callable[[CycleType], int]]


def _char_value(character: Character, ct: CycleType) -> int:
    if callable(character):
        value = character(ct)
    else:
        if ct.parts not in character:
            raise NonIntegralTrace(f"character has no value for cycle type {ct}")
        value = character[ct.parts]
    if int(value) != value:
        raise NonIntegralTrace(f"non-integral character value {value} at {ct}")
    return int(value)


def laplacian_eigenvalue(character: Character, d: int, n: int, label: str = "") -> EigenvalueRecord:
    """lambda = |Delta_n| - (1/d) sum over derangements of the character, exactly."""
    identity_type = CycleType((1,) * n)
    if _char_value(character, identity_type) != d:
        raise NonIntegralTrace(f"character value at e is not the dimension {d}")
    total = 0
    for parts in partitions(n):
        ct = CycleType(parts)
        if ct.is_derangement_type():
            total += ct.class_size() * _char_value(character, ct)
    value = Fraction(count_derangements(n)) - Fraction(total, d)
    return EigenvalueRecord(label, d, value)


def builtin_characters(n: int) -> list[tuple[str, int, Callable[[CycleType], int]]]:
    """(label, dimension, character) for the trivial, sign, natural and standard characters."""

    def fixed(ct: CycleType) -> int:
        return ct.parts.count(1)

    def sign(ct: CycleType) -> int:
        return -1 if sum(p - 1 for p in ct.parts) % 2 else 1

    chars = [
        ("trivial", 1, lambda ct: 1),
        ("sign", 1, sign),
        ("natural", n, fixed),
    ]
    if n >= 2:
        chars.append(("standard", n - 1, lambda ct: fixed(ct) - 1))
    return chars


def spectrum(n: int) -> list[EigenvalueRecord]:
    return [laplacian_eigenvalue(ch, d, n, label) for label, d, ch in builtin_characters(n)]


def lambda_std(n: int) -> Fraction:
    """D_n (1 + 1/(n-1)), the largest Laplacian eigenvalue."""
    return count_derangements(n) * Fraction(n, n - 1)


def laplacian_apply(n: int, g: np.ndarray) -> np.ndarray:
    """(L g)(tau) = |Delta_n| g(tau) - sum over derangements sigma of g(sigma tau)."""
    group = symmetric_group(n)
    g = np.asarray(g, dtype=object)
    der = group.derangements
    neighbour_sum = g[group.mul[der, :]].sum(axis=0)
    return len(der) * g - neighbour_sum


@dataclass
class EigenfunctionCheck:
    n: int
    eigenvalue: Fraction
    entries_checked: int
    failures: list[tuple[int, int]]

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_eigenfunction(n: int, rep: str = "natural") -> EigenfunctionCheck:
    """Check every natural-representation matrix entry against the Laplacian.

    g_jk(tau) = [tau(k) = j]. Its standard component, scaled by n! to stay
    integral, is n! g - sum(g); L must multiply it by lambda_std exactly, and
    L g itself must equal lambda_std times that component divided by n!.
    """
    if rep != "natural":
        raise ValueError("only the natural representation is supported")
    if not 2 <= n <= 5:
        raise DegreeOutOfRange(f"dense eigenfunction check needs 2 <= n <= 5, got {n}")
    group = symmetric_group(n)
    lam = lambda_std(n)
    order = group.order
    failures = []
    for j in range(n):
        for k in range(n):
            g = (group.perms[:, k] == j).astype(np.int64).astype(object)
            comp = order * g - int(sum(g))
            lhs = laplacian_apply(n, comp)
            ok = all(x * lam.denominator == lam.numerator * y for x, y in zip(lhs, comp))
            lg = laplacian_apply(n, g)
            ok = ok and all(
                x * order * lam.denominator == lam.numerator * y for x, y in zip(lg, comp)
            )
            if not ok:
                failures.append((j + 1, k + 1))
    return EigenfunctionCheck(n, lam, n * n, failures)


def constant_is_harmonic(n: int) -> bool:
    group = symmetric_group(n)
    ones = np.ones(group.order, dtype=np.int64).astype(object)
    return not any(laplacian_apply(n, ones))


def clique_row_sums(clique: MaximalClique) -> np.ndarray:
    """tau -> sum over the clique of n(sigma; tau)."""
    return fixed_point_matrix(clique.n).rows_for(clique.members).astype(np.int64).sum(axis=0)


def gram_residues(family: DisconnectedFamily, p: int) -> np.ndarray:
    """GF(p) inner products sum_tau n(s; tau) n(s'; tau) between the family's members."""
    sub = fixed_point_matrix(family.n).rows_for(family.members()).astype(np.int64)
    return (sub @ sub.T) % p


def trace_form_residues(family: DisconnectedFamily, p: int) -> np.ndarray:
    """Trace-form pairing n(s; s') mod p between the family's members.

    This is the pairing that separates cliques: 0 inside a clique (members
    differ by a derangement) and 1 across disconnected cliques (near-derangement
    cross products). The plain L2 sums from ``gram_residues`` vanish identically
    when p divides n, so they cannot play that role.
    """
    members = family.members()
    group = symmetric_group(family.n)
    idx = [group.index(s) for s in members]
    return group.agreement[np.ix_(idx, idx)].astype(np.int64) % p


@dataclass(frozen=True)
class USpaceDims:
    dim_u: int
    dim_u_c: int
    dim_u_ctilde: int
    generator_rank: int


def u_space_dims(family: DisconnectedFamily, p: int = 5) -> USpaceDims:
    """Ranks of U = span{n(.; tau)} on C u C~ and of its restrictions to each clique.

    ``generator_rank`` is the rank on C of n(.; omega_1), n(.; (a1 a2)) and
    n(.; (a1 a2 a3)) where C is generated by the cycle (a1 ... a5).
    """
    if family.r != 2:
        raise ValueError("u_space_dims needs a pair of cliques")
    c, ct = family.cliques
    fpm = fixed_point_matrix(family.n)
    u = fpm.rows_for(c.members + ct.members).astype(np.int64)
    size = family.n
    rank = lambda a: rank_gf(PrimeFieldMatrix(p, a))
    e = Permutation.identity(family.n)
    gen_rank = -1
    if e in c:
        sigma = next(s for s in c.members if s != e)
        a = [1]
        for _ in range(2):
            a.append(sigma(a[-1]))
        taus = [
            ct.members[0],
            Permutation.from_cycles(family.n, (a[0], a[1])),
            Permutation.from_cycles(family.n, (a[0], a[1], a[2])),
        ]
        group = symmetric_group(family.n)
        cols = [group.index(t) for t in taus]
        gen_rank = rank(u[:size, cols].T)
    return USpaceDims(rank(u), rank(u[:size]), rank(u[size:]), gen_rank)
