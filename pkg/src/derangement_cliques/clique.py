"""Maximal cliques of the derangement graph X_n and families of pairwise
disconnected maximal cliques.

sigma ~ tau in X_n exactly when sigma tau^-1 is a derangement, i.e. when the two
permutations disagree at every point. A maximal clique always has n members,
which is the same thing as the row set of a Latin square. Internally a
permutation's cells {(k, sigma(k))} are packed into one int, so adjacency is a
disjointness test between two masks.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable, Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cache import Cache
from .errors import DegreeMismatch, NotAClique, ParseError, ResourceLimit
from .latin import LatinSquare
from .perm import (
    Permutation,
    compose,
    cycle_type,
    is_derangement,
    n_fixed,
    parse_permutation,
    symmetric_group,
)

log = logging.getLogger(__name__)

ALL_DEGREES = range(2, 7)


@dataclass(frozen=True)
class MaximalClique:
    """n pairwise adjacent permutations, kept in lexicographic order."""

    members: tuple[Permutation, ...]

    def __post_init__(self) -> None:
        members = tuple(sorted(self.members))
        object.__setattr__(self, "members", members)
        if not members:
            raise NotAClique("empty clique")
        n = members[0].n
        if any(m.n != n for m in members):
            raise DegreeMismatch("clique members have different degrees")
        if len(members) != n:
            raise NotAClique(f"a maximal clique in X_{n} has {n} members, got {len(members)}")
        for a, b in itertools.combinations(members, 2):
            if n_fixed(a, b):
                raise NotAClique(f"{a} and {b} are not adjacent")

    @property
    def n(self) -> int:
        return self.members[0].n

    def __contains__(self, sigma: object) -> bool:
        return sigma in self.members

    def __iter__(self) -> Iterator[Permutation]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def contains_identity(self) -> bool:
        return self.members[0] == Permutation.identity(self.n)

    def indices(self) -> tuple[int, ...]:
        group = symmetric_group(self.n)
        return tuple(group.index(m) for m in self.members)

    def __str__(self) -> str:
        return format_clique(self)


@dataclass(frozen=True)
class DisconnectedFamily:
    """Pairwise disconnected maximal cliques, normalized so cliques[0] contains e when possible."""

    cliques: tuple[MaximalClique, ...]

    def __post_init__(self) -> None:
        cliques = tuple(self.cliques)
        object.__setattr__(self, "cliques", cliques)
        if len({c.n for c in cliques}) > 1:
            raise DegreeMismatch("family cliques have different degrees")
        for i, j in itertools.combinations(range(len(cliques)), 2):
            if not are_disconnected(cliques[i], cliques[j]):
                raise NotAClique(f"cliques {i + 1} and {j + 1} are connected")

    @property
    def n(self) -> int:
        return self.cliques[0].n

    @property
    def r(self) -> int:
        return len(self.cliques)

    def members(self) -> list[Permutation]:
        """Union of the cliques, clique by clique."""
        return [m for c in self.cliques for m in c.members]


def _cell_masks(n: int) -> list[int]:
    group = symmetric_group(n)
    return [sum(1 << (k * n + int(v)) for k, v in enumerate(p)) for p in group.perms]


def _cliques_within(n: int, candidates: Iterable[int], first: int | None = None) -> Iterator[tuple[int, ...]]:
    """All n-cliques inside ``candidates`` as sorted index tuples, in canonical order.

    Members of a maximal clique have distinct images of 1, so level v picks the
    member with sigma(1) = v + 1.
    """
    group = symmetric_group(n)
    masks = _cell_masks(n)
    by_first: list[list[int]] = [[] for _ in range(n)]
    for i in sorted(set(int(c) for c in candidates)):
        by_first[int(group.perms[i, 0])].append(i)
    if first is not None:
        level0 = [first] if first in by_first[int(group.perms[first, 0])] else []
        if int(group.perms[first, 0]) != 0:
            return
    else:
        level0 = by_first[0]
    chosen: list[int] = []

    def extend(level: int, used: int) -> Iterator[tuple[int, ...]]:
        if level == n:
            yield tuple(chosen)
            return
        for i in by_first[level]:
            m = masks[i]
            if m & used:
                continue
            chosen.append(i)
            yield from extend(level + 1, used | m)
            chosen.pop()

    for i in level0:
        chosen.append(i)
        yield from extend(1, masks[i])
        chosen.pop()


def _check_n(n: int, allow_long: bool, what: str) -> None:
    if n not in ALL_DEGREES:
        raise ValueError(f"{what} supports 2 <= n <= 6, got {n}")
    if n == 6 and not allow_long:
        raise ResourceLimit(f"{what} at n=6 is long-running")


def _clique_from_indices(n: int, idx: Sequence[int]) -> MaximalClique:
    group = symmetric_group(n)
    return MaximalClique(tuple(group.element(i) for i in idx))


def _branch_worker(args: tuple[int, int]) -> list[tuple[int, ...]]:
    n, first = args
    return list(_cliques_within(n, range(symmetric_group(n).order), first=first))


def clique_index_tuples(
    n: int, containing_identity: bool = False, threads: int = 1
) -> Iterator[tuple[int, ...]]:
    """Index tuples of every maximal clique in canonical order (no size guardrail)."""
    group = symmetric_group(n)
    if containing_identity:
        yield from _cliques_within(n, range(group.order), first=0)
        return
    firsts = [int(i) for i in np.flatnonzero(group.perms[:, 0] == 0)]
    if threads <= 1:
        yield from _cliques_within(n, range(group.order))
        return
    with ProcessPoolExecutor(max_workers=threads) as pool:
        for branch in pool.map(_branch_worker, [(n, f) for f in firsts]):
            yield from branch


def enumerate_maximal_cliques(
    n: int, containing_identity: bool = False, allow_long: bool = False, threads: int = 1
) -> Iterator[MaximalClique]:
    """Each maximal clique of X_n exactly once, in canonical (lexicographic) order."""
    _check_n(n, allow_long, "maximal clique enumeration")
    for idx in clique_index_tuples(n, containing_identity, threads):
        yield _clique_from_indices(n, idx)


def count_maximal_cliques(n: int, containing_identity: bool = False, allow_long: bool = False) -> int:
    _check_n(n, allow_long, "maximal clique enumeration")
    return sum(1 for _ in clique_index_tuples(n, containing_identity))


def are_disconnected(c1: MaximalClique, c2: MaximalClique) -> bool:
    """True iff no sigma in c1 and omega in c2 have sigma omega^-1 a derangement."""
    if c1.n != c2.n:
        raise DegreeMismatch(f"degrees differ: {c1.n} vs {c2.n}")
    return all(n_fixed(s, w) >= 1 for s in c1.members for w in c2.members)


def translate(c: MaximalClique, tau: Permutation) -> MaximalClique:
    """The clique {sigma tau^-1 : sigma in c}."""
    if tau.n != c.n:
        raise DegreeMismatch(f"degrees differ: {c.n} vs {tau.n}")
    t_inv = tau.inverse()
    return MaximalClique(tuple(compose(s, t_inv) for s in c.members))


def random_maximal_clique(n: int, rng: np.random.Generator) -> MaximalClique:
    """Grow a clique from a random start by adding random adjacent vertices until stuck."""
    group = symmetric_group(n)
    adjacent = group.agreement == 0
    start = int(rng.integers(group.order))
    members = [start]
    pool = adjacent[start].copy()
    while pool.any():
        nxt = int(rng.choice(np.flatnonzero(pool)))
        members.append(nxt)
        pool &= adjacent[nxt]
    return MaximalClique(tuple(group.element(i) for i in members))


def _partner_candidates(n: int, clique_idx: Sequence[int]) -> np.ndarray:
    """Vertices with no edge to any member of the clique."""
    agree = symmetric_group(n).agreement
    return np.flatnonzero((agree[list(clique_idx)] >= 1).all(axis=0))


def partner_index_tuples(n: int, clique_idx: Sequence[int]) -> list[tuple[int, ...]]:
    """All maximal cliques disconnected from the given one."""
    return list(_cliques_within(n, _partner_candidates(n, clique_idx)))


def _mutually_disconnected(n: int, a: Sequence[int], b: Sequence[int]) -> bool:
    agree = symmetric_group(n).agreement
    return bool((agree[np.ix_(list(a), list(b))] >= 1).all())


def _families_for(n: int, r: int, base: tuple[int, ...], first_only: bool) -> list[tuple[tuple[int, ...], ...]]:
    partners = partner_index_tuples(n, base)
    out: list[tuple[tuple[int, ...], ...]] = []

    def grow(chosen: list[tuple[int, ...]], start: int) -> bool:
        if len(chosen) == r - 1:
            out.append((base, *chosen))
            return first_only
        for k in range(start, len(partners)):
            cand = partners[k]
            if all(_mutually_disconnected(n, cand, prev) for prev in chosen):
                chosen.append(cand)
                if grow(chosen, k + 1):
                    return True
                chosen.pop()
        return False

    grow([], 0)
    return out


def _families_worker(args: tuple[int, int, list[tuple[int, ...]], bool]) -> list[tuple[tuple[int, ...], ...]]:
    n, r, bases, first_only = args
    out = []
    for base in bases:
        found = _families_for(n, r, base, first_only)
        out.extend(found)
        if first_only and found:
            break
    return out


def find_disconnected_families(
    n: int,
    r: int = 2,
    scope: str = "exhaustive",
    allow_long: bool = False,
    threads: int = 1,
) -> list[DisconnectedFamily]:
    """Families of r pairwise disconnected maximal cliques, the first containing e.

    Other cliques follow in canonical order, so each family up to translation
    is reported once per identity-containing clique it contains.
    """
    if not 3 <= n <= 6:
        raise ValueError(f"family search supports 3 <= n <= 6, got {n}")
    if r < 2:
        raise ValueError("r must be at least 2")
    if scope not in ("exhaustive", "first"):
        raise ValueError(f"scope must be 'exhaustive' or 'first', got {scope!r}")
    if n == 6 and not allow_long:
        raise ResourceLimit("disconnected family search at n=6 is long-running")
    first_only = scope == "first"
    bases = list(clique_index_tuples(n, containing_identity=True))
    found: list[tuple[tuple[int, ...], ...]] = []
    if threads <= 1:
        found = _families_worker((n, r, bases, first_only))
    else:
        chunks = [bases[i : i + 64] for i in range(0, len(bases), 64)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for part in pool.map(_families_worker, [(n, r, ch, first_only) for ch in chunks]):
                found.extend(part)
    if first_only:
        found = found[:1]
    return [
        DisconnectedFamily(tuple(_clique_from_indices(n, c) for c in fam)) for fam in found
    ]


def disconnected_pairs(n: int) -> list[DisconnectedFamily]:
    """Every unordered disconnected pair of maximal cliques, without normalization."""
    if not 3 <= n <= 5:
        raise ValueError(f"unnormalized pair enumeration supports 3 <= n <= 5, got {n}")
    out = []
    for a in clique_index_tuples(n):
        for b in partner_index_tuples(n, a):
            if a < b:
                out.append(DisconnectedFamily((_clique_from_indices(n, a), _clique_from_indices(n, b))))
    return out


def clique_from_latin_square(square: LatinSquare) -> MaximalClique:
    """The clique whose members are the symbol positions of a Latin square.

    For symbol s, sigma_s maps row i to the column holding s in row i. Two
    squares give disconnected cliques exactly when they are orthogonal.
    """
    n = square.n
    members = []
    for s in range(1, n + 1):
        members.append(Permutation(tuple(square.grid[i].index(s) + 1 for i in range(n))))
    return MaximalClique(tuple(members))


def family_from_mols(squares: Sequence[LatinSquare]) -> DisconnectedFamily:
    cliques = [clique_from_latin_square(s) for s in squares]
    e = Permutation.identity(squares[0].n)
    # move an identity-containing clique to the front if there is one
    cliques.sort(key=lambda c: (e not in c, c.members))
    return DisconnectedFamily(tuple(cliques))


@dataclass
class X4Report:
    identity_cliques: int
    participating: list[MaximalClique]
    klein_is_unique: bool
    partners_are_translates: bool
    partner_count: int
    max_family_size: int


def klein_clique() -> MaximalClique:
    return MaximalClique(
        (
            Permutation.identity(4),
            Permutation.from_cycles(4, (1, 2), (3, 4)),
            Permutation.from_cycles(4, (1, 3), (2, 4)),
            Permutation.from_cycles(4, (1, 4), (2, 3)),
        )
    )


def x4_structure_report() -> X4Report:
    n = 4
    group = symmetric_group(n)
    bases = list(clique_index_tuples(n, containing_identity=True))
    participating = [b for b in bases if partner_index_tuples(n, b)]
    klein = klein_clique()
    unique = len(participating) == 1 and _clique_from_indices(n, participating[0]) == klein
    partners = [_clique_from_indices(n, p) for b in participating for p in partner_index_tuples(n, b)]
    translates = {translate(klein, t) for t in group.elements()}
    max_size = 1
    for r in range(2, n + 2):
        if find_disconnected_families(n, r, scope="first"):
            max_size = r
        else:
            break
    return X4Report(
        identity_cliques=len(bases),
        participating=[_clique_from_indices(n, b) for b in participating],
        klein_is_unique=unique,
        partners_are_translates=all(p in translates for p in partners),
        partner_count=len(partners),
        max_family_size=max_size,
    )


@dataclass
class X5Report:
    identity_cliques: int
    participating: list[MaximalClique]
    odd_derangements: int
    cyclic: int
    cycle_type_profiles: dict[str, int] = field(default_factory=dict)

    @property
    def all_cyclic(self) -> bool:
        return self.cyclic == len(self.participating)


def is_cyclic_clique(c: MaximalClique) -> bool:
    """True iff c = {e, s, s^2, ..., s^(n-1)} for some (equivalently every) non-identity member s."""
    e = Permutation.identity(c.n)
    if e not in c:
        return False
    members = set(c.members)
    return all({s**k for k in range(c.n)} == members for s in c.members if s != e)


def x5_structure_report() -> X5Report:
    n = 5
    bases = list(clique_index_tuples(n, containing_identity=True))
    participating = [_clique_from_indices(n, b) for b in bases if partner_index_tuples(n, b)]
    odd = sum(1 for c in participating for s in c.members if is_derangement(s) and s.sign() == -1)
    profiles: dict[str, int] = {}
    for c in participating:
        key = " ".join(f"[{t}]" for t in sorted(str(cycle_type(s)) for s in c.members))
        profiles[key] = profiles.get(key, 0) + 1
    return X5Report(
        identity_cliques=len(bases),
        participating=participating,
        odd_derangements=odd,
        cyclic=sum(1 for c in participating if is_cyclic_clique(c)),
        cycle_type_profiles=profiles,
    )


@dataclass
class PartnerSearchReport:
    """Outcome of looking for a disconnected partner of every identity-containing clique."""

    n: int
    cliques_examined: int = 0
    candidate_vertices: int = 0
    cliques_with_candidates: int = 0
    partners: list[tuple[tuple[int, ...], tuple[int, ...]]] = field(default_factory=list)
    resumed_from: int = 0

    @property
    def verdict(self) -> str:
        return "FOUND" if self.partners else "NONE"

    def to_json(self) -> dict:
        group = symmetric_group(self.n)
        return {
            "n": self.n,
            "cliques_examined": self.cliques_examined,
            "candidate_vertices": self.candidate_vertices,
            "cliques_with_candidates": self.cliques_with_candidates,
            "partner_pairs": [
                [[str(group.element(i)) for i in c] for c in pair] for pair in self.partners
            ],
            "verdict": self.verdict,
        }


def _partner_chunk(args: tuple[int, list[tuple[int, ...]]]) -> tuple[int, int, list]:
    n, bases = args
    total = with_cand = 0
    found = []
    for base in bases:
        cand = _partner_candidates(n, base)
        total += len(cand)
        with_cand += bool(len(cand))
        for p in _cliques_within(n, cand):
            found.append((base, p))
    return total, with_cand, found


def partner_search(
    n: int = 6,
    allow_long: bool = False,
    threads: int = 1,
    cache: Cache | None = None,
    chunk: int = 512,
) -> PartnerSearchReport:
    """Clique-level search for any disconnected pair, checkpointing per chunk."""
    _check_n(n, allow_long, "exhaustive partner search")
    bases = list(clique_index_tuples(n, containing_identity=True))
    report = PartnerSearchReport(n=n)
    key = f"partner-search-n{n}"
    if cache is not None:
        state = cache.load_json(key)
        if state and state.get("total") == len(bases):
            report.cliques_examined = state["done"]
            report.candidate_vertices = state["candidate_vertices"]
            report.cliques_with_candidates = state["cliques_with_candidates"]
            report.partners = [tuple(tuple(c) for c in pair) for pair in state["partners"]]
            report.resumed_from = state["done"]
    chunks = [
        bases[i : i + chunk] for i in range(report.cliques_examined, len(bases), chunk)
    ]

    def absorb(size: int, part: tuple[int, int, list]) -> None:
        total, with_cand, found = part
        report.cliques_examined += size
        report.candidate_vertices += total
        report.cliques_with_candidates += with_cand
        report.partners.extend(found)
        if cache is not None:
            cache.store_json(
                key,
                {
                    "total": len(bases),
                    "done": report.cliques_examined,
                    "candidate_vertices": report.candidate_vertices,
                    "cliques_with_candidates": report.cliques_with_candidates,
                    "partners": [list(map(list, pair)) for pair in report.partners],
                },
            )

    if threads <= 1:
        for ch in chunks:
            absorb(len(ch), _partner_chunk((n, ch)))
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for ch, part in zip(chunks, pool.map(_partner_chunk, [(n, ch) for ch in chunks])):
                absorb(len(ch), part)
    return report


def format_clique(c: MaximalClique) -> str:
    return "|".join(str(m) for m in c.members)


def parse_clique(line: str, lineno: int | None = None) -> MaximalClique:
    parts = line.strip().split("|")
    perms = []
    for part in parts:
        try:
            perms.append(parse_permutation(part))
        except ParseError as exc:
            raise ParseError(str(exc), line=lineno) from None
    try:
        return MaximalClique(tuple(perms))
    except (NotAClique, DegreeMismatch) as exc:
        raise ParseError(str(exc), line=lineno) from None


def write_cliques(cliques: Iterable[MaximalClique]) -> str:
    return "".join(format_clique(c) + "\n" for c in cliques)


def read_cliques(text: str) -> list[MaximalClique]:
    return [
        parse_clique(line, lineno)
        for lineno, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]


def write_families(families: Iterable[DisconnectedFamily]) -> str:
    out = []
    for k, fam in enumerate(families, start=1):
        out.append(f"# family {k}\n")
        out.extend(format_clique(c) + "\n" for c in fam.cliques)
    return "".join(out)


def read_families(text: str) -> list[DisconnectedFamily]:
    groups: list[list[MaximalClique]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            if stripped.split()[:2] != ["#", "family"]:
                raise ParseError(f"unexpected header {stripped!r}", line=lineno)
            groups.append([])
            continue
        if not groups:
            raise ParseError("clique line before any '# family k' header", line=lineno)
        groups[-1].append(parse_clique(stripped, lineno))
    return [DisconnectedFamily(tuple(g)) for g in groups]
