"""Permutations of {1, ..., n} and tables for the symmetric group S_n.

Composition is right-to-left function application: ``compose(s, t)(x) == s(t(x))``.
Permutations are written externally in 1-based one-line notation, so ``2 3 1``
is the map 1->2, 2->3, 3->1.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from functools import cache, cached_property

import numpy as np

from .errors import DegreeMismatch, DegreeOutOfRange, InvalidPermutation, ParseError

MAX_DEGREE = 12
# Dense group tables (multiplication, fixed-point matrix) are only built up to here.
MAX_TABLE_DEGREE = 6


@dataclass(frozen=True, order=True)
class Permutation:
    """A permutation given by its 1-based image sequence."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        images = tuple(int(v) for v in self.images)
        object.__setattr__(self, "images", images)
        n = len(images)
        if not 1 <= n <= MAX_DEGREE:
            raise InvalidPermutation(f"degree must be in 1..{MAX_DEGREE}, got {n}")
        if sorted(images) != list(range(1, n + 1)):
            raise InvalidPermutation(f"{list(images)} is not a bijection of 1..{n}")

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_cycles(cls, n: int, *cycles: Sequence[int]) -> Permutation:
        """Build from disjoint cycles, e.g. ``from_cycles(4, (1, 2), (3, 4))``."""
        images = list(range(1, n + 1))
        seen: set[int] = set()
        for cycle in cycles:
            for x in cycle:
                if not 1 <= x <= n or x in seen:
                    raise InvalidPermutation(f"bad cycle {tuple(cycle)} for degree {n}")
                seen.add(x)
            for a, b in zip(cycle, tuple(cycle[1:]) + tuple(cycle[:1])):
                images[a - 1] = b
        return cls(tuple(images))

    @classmethod
    def from_zero_based(cls, images: Iterable[int]) -> Permutation:
        return cls(tuple(int(v) + 1 for v in images))

    @property
    def n(self) -> int:
        return len(self.images)

    @cached_property
    def zero_based(self) -> tuple[int, ...]:
        return tuple(v - 1 for v in self.images)

    def __call__(self, x: int) -> int:
        return self.images[x - 1]

    def __mul__(self, other: Permutation) -> Permutation:
        return compose(self, other)

    def inverse(self) -> Permutation:
        inv = [0] * self.n
        for i, v in enumerate(self.images, start=1):
            inv[v - 1] = i
        return Permutation(tuple(inv))

    def __pow__(self, k: int) -> Permutation:
        result = Permutation.identity(self.n)
        base = self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            result = compose(base, result)
        return result

    def fixed_points(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.images, start=1) if i == v)

    def num_fixed(self) -> int:
        return sum(1 for i, v in enumerate(self.images, start=1) if i == v)

    def cycles(self) -> list[tuple[int, ...]]:
        """Disjoint cycles (including fixed points), each starting at its smallest element."""
        seen = [False] * (self.n + 1)
        out = []
        for start in range(1, self.n + 1):
            if seen[start]:
                continue
            cycle = []
            x = start
            while not seen[x]:
                seen[x] = True
                cycle.append(x)
                x = self.images[x - 1]
            out.append(tuple(cycle))
        return out

    def sign(self) -> int:
        return -1 if sum(len(c) - 1 for c in self.cycles()) % 2 else 1

    def cycle_notation(self) -> str:
        nontrivial = [c for c in self.cycles() if len(c) > 1]
        if not nontrivial:
            return "e"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in nontrivial)

    def __str__(self) -> str:
        return " ".join(map(str, self.images))

    def __repr__(self) -> str:
        return f"Permutation({self.cycle_notation()}, n={self.n})"


@dataclass(frozen=True)
class CycleType:
    """Non-increasing integer partition of n; fixed points are parts of size 1."""

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts) or list(parts) != sorted(parts, reverse=True):
            raise ValueError(f"not a partition in non-increasing order: {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def n(self) -> int:
        return sum(self.parts)

    def is_derangement_type(self) -> bool:
        return 1 not in self.parts

    def class_size(self) -> int:
        """Number of permutations of S_n with this cycle type."""
        denom = 1
        for length in set(self.parts):
            m = self.parts.count(length)
            denom *= math.factorial(m) * length**m
        return math.factorial(self.n) // denom

    def __str__(self) -> str:
        return ",".join(map(str, self.parts))


def _check_degrees(*perms: Permutation) -> None:
    degrees = {p.n for p in perms}
    if len(degrees) > 1:
        raise DegreeMismatch(f"permutations of different degrees: {sorted(degrees)}")


def compose(sigma: Permutation, tau: Permutation) -> Permutation:
    """Return sigma o tau, i.e. x -> sigma(tau(x))."""
    _check_degrees(sigma, tau)
    s = sigma.images
    return Permutation(tuple(s[t - 1] for t in tau.images))


def inverse(sigma: Permutation) -> Permutation:
    return sigma.inverse()


def n_fixed(sigma: Permutation, tau: Permutation) -> int:
    """Number of fixed points of sigma tau^-1.

    Equivalently the number of points on which sigma and tau agree.
    """
    _check_degrees(sigma, tau)
    return sum(1 for a, b in zip(sigma.images, tau.images) if a == b)


def is_derangement(sigma: Permutation) -> bool:
    return sigma.num_fixed() == 0


def is_near_derangement(sigma: Permutation) -> bool:
    return sigma.num_fixed() == 1


def cycle_type(sigma: Permutation) -> CycleType:
    return CycleType(tuple(sorted((len(c) for c in sigma.cycles()), reverse=True)))


def _check_degree_range(n: int, upper: int = MAX_DEGREE) -> None:
    if not 1 <= n <= upper:
        raise DegreeOutOfRange(f"degree {n} outside supported range 1..{upper}")


def enumerate_group(n: int) -> Iterator[Permutation]:
    """All n! permutations of degree n in lexicographic order of one-line notation."""
    _check_degree_range(n)
    for images in itertools.permutations(range(1, n + 1)):
        yield Permutation(images)


@cache
def count_derangements(n: int) -> int:
    """Number of fixed-point-free permutations of n points, D_n = (n-1)(D_{n-1} + D_{n-2})."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return 0
    if n == 2:
        return 1
    return (n - 1) * (count_derangements(n - 1) + count_derangements(n - 2))


def partitions(n: int, max_part: int | None = None) -> Iterator[tuple[int, ...]]:
    """Integer partitions of n in non-increasing form, largest parts first."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def parse_permutation(text: str, n: int | None = None) -> Permutation:
    """Parse space-separated 1-based images such as ``"2 3 1"``."""
    tokens = text.split()
    if not tokens:
        raise ParseError("empty permutation")
    values = []
    for col, tok in enumerate(tokens, start=1):
        try:
            values.append(int(tok))
        except ValueError:
            raise ParseError(f"not an integer: {tok!r}", column=col) from None
    if n is not None and len(values) != n:
        raise ParseError(f"expected {n} images, got {len(values)}")
    try:
        return Permutation(tuple(values))
    except InvalidPermutation as exc:
        raise ParseError(str(exc)) from None


class SymmetricGroup:
    """Dense index tables for S_n (n <= 6), elements ordered lexicographically.

    Index 0 is always the identity. ``perms`` holds 0-based images.
    """

    def __init__(self, n: int):
        _check_degree_range(n, MAX_TABLE_DEGREE)
        self.n = n
        self.perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
        self.order = len(self.perms)
        self._weights = n ** np.arange(n - 1, -1, -1, dtype=np.int64)
        self._codes = self.perms @ self._weights
        self.index_of = {tuple(p): i for i, p in enumerate(self.perms.tolist())}
        inv = np.empty_like(self.perms)
        rows = np.arange(self.order)[:, None]
        inv[rows, self.perms] = np.arange(n)[None, :]
        self.inverse = self._lookup(inv)
        self.num_fixed = (self.perms == np.arange(n)).sum(axis=1)
        self.derangements = np.flatnonzero(self.num_fixed == 0)
        self.near_derangements = np.flatnonzero(self.num_fixed == 1)

    def _lookup(self, arr: np.ndarray) -> np.ndarray:
        """Indices of the permutations whose 0-based images are the last axis of ``arr``."""
        return np.searchsorted(self._codes, arr @ self._weights)

    @cached_property
    def mul(self) -> np.ndarray:
        """``mul[i, j]`` is the index of perms[i] o perms[j]."""
        idx = np.arange(self.order)
        composed = self.perms[idx[:, None, None], self.perms[None, :, :]]
        return self._lookup(composed).astype(np.int32)

    @cached_property
    def agreement(self) -> np.ndarray:
        """``agreement[i, j]`` = n(sigma_i; sigma_j), the fixed points of sigma_i sigma_j^-1."""
        return (self.perms[:, None, :] == self.perms[None, :, :]).sum(axis=2).astype(np.int8)

    def index(self, sigma: Permutation) -> int:
        if sigma.n != self.n:
            raise DegreeMismatch(f"expected degree {self.n}, got {sigma.n}")
        return self.index_of[sigma.zero_based]

    def element(self, i: int) -> Permutation:
        return Permutation.from_zero_based(self.perms[i])

    def elements(self) -> list[Permutation]:
        return [Permutation.from_zero_based(p) for p in self.perms.tolist()]

    def cycle_type_of(self, i: int) -> CycleType:
        return cycle_type(self.element(i))


@cache
def symmetric_group(n: int) -> SymmetricGroup:
    return SymmetricGroup(n)
