"""R-sets {e, delta, eta_1, eta_2} and the staged search for them in S_6.

An R-set has delta a derangement, eta_1 and eta_2 near-derangements, each
eta_j delta^-1 a near-derangement, eta_1 eta_2^-1 a derangement, and
sum over sigma in R of n(sigma; tau) even for every tau. If two disconnected
maximal cliques existed in X_6, an R-set would exist; the search enumerates
every candidate and records per-stage tallies so the outcome can be audited.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cache
from typing import Any

import numpy as np

from .clique import DisconnectedFamily
from .errors import NoUsableDependency, StructuralReject
from .exactla import pack_rows_gf2
from .perm import (
    CycleType,
    Permutation,
    compose,
    cycle_type,
    is_derangement,
    is_near_derangement,
    partitions,
    symmetric_group,
)
from .spectral import DependencyBasis


@dataclass(frozen=True)
class RSet:
    """A structurally valid candidate with its fixed-point data (all 1-based).

    a_j is the fixed point of eta_j, c_j that of eta_j delta^-1, and
    b_j = delta^-1(c_j), so delta(b_j) = c_j = eta_j(b_j).
    """

    delta: Permutation
    eta1: Permutation
    eta2: Permutation
    a1: int
    a2: int
    b1: int
    b2: int
    c1: int
    c2: int

    @property
    def n(self) -> int:
        return self.delta.n

    def members(self) -> tuple[Permutation, ...]:
        return (Permutation.identity(self.n), self.delta, self.eta1, self.eta2)

    def translates(self) -> tuple[RSet, RSet, RSet]:
        """R delta^-1, R eta_1^-1 and R eta_2^-1, each renormalized to contain e."""
        d, h1, h2 = self.delta, self.eta1, self.eta2
        di = d.inverse()
        r_delta = derive_fixed_data(di, compose(h1, di), compose(h2, di))
        h1i, h2i = h1.inverse(), h2.inverse()
        r_eta1 = derive_fixed_data(compose(h2, h1i), h1i, compose(d, h1i))
        r_eta2 = derive_fixed_data(compose(h1, h2i), compose(d, h2i), h2i)
        return r_delta, r_eta1, r_eta2

    def to_json(self) -> dict[str, Any]:
        return {
            "delta": str(self.delta),
            "eta1": str(self.eta1),
            "eta2": str(self.eta2),
            "cycle_type": str(cycle_type(self.delta)),
            "a": [self.a1, self.a2],
            "b": [self.b1, self.b2],
            "c": [self.c1, self.c2],
        }


def derive_fixed_data(delta: Permutation, eta1: Permutation, eta2: Permutation) -> RSet:
    """Validate the structural conditions and compute a_j, b_j, c_j.

    Raises StructuralReject listing every violated condition.
    """
    problems = []
    if not is_derangement(delta):
        problems.append("delta is not a derangement")
    for name, eta in (("eta1", eta1), ("eta2", eta2)):
        if not is_near_derangement(eta):
            problems.append(f"{name} is not a near-derangement ({eta.num_fixed()} fixed points)")
    di = delta.inverse()
    quotients = (compose(eta1, di), compose(eta2, di))
    for name, q in zip(("eta1 delta^-1", "eta2 delta^-1"), quotients):
        if not is_near_derangement(q):
            problems.append(f"{name} is not a near-derangement ({q.num_fixed()} fixed points)")
    if not is_derangement(compose(eta1, eta2.inverse())):
        problems.append("eta1 eta2^-1 is not a derangement")
    if problems:
        raise StructuralReject(problems)
    a1, a2 = eta1.fixed_points()[0], eta2.fixed_points()[0]
    c1, c2 = quotients[0].fixed_points()[0], quotients[1].fixed_points()[0]
    return RSet(delta, eta1, eta2, a1, a2, di(c1), di(c2), c1, c2)


@cache
def _parity_tables(n: int) -> tuple[list[int], list[int], list[int]]:
    """Per-element parity rows: full (over all tau) and over transpositions only."""
    group = symmetric_group(n)
    agree = group.agreement
    full = pack_rows_gf2(agree & 1)
    transpositions = [
        group.index(Permutation.from_cycles(n, (i, j)))
        for i, j in itertools.combinations(range(1, n + 1), 2)
    ]
    trans = pack_rows_gf2(agree[:, transpositions] & 1)
    return full, trans, transpositions


def parity_check(r: RSet, mode: str = "full") -> bool:
    """Whether sum over R of n(sigma; tau) is even for every tau.

    ``sampled`` tests the transpositions first and only then escalates to all tau.
    """
    if mode not in ("full", "sampled"):
        raise ValueError(f"mode must be 'full' or 'sampled', got {mode!r}")
    group = symmetric_group(r.n)
    full, trans, _ = _parity_tables(r.n)
    idx = [group.index(m) for m in r.members()]
    if mode == "sampled":
        t = 0
        for i in idx:
            t ^= trans[i]
        if t:
            return False
    f = 0
    for i in idx:
        f ^= full[i]
    return f == 0


def parity_sum(r: RSet, tau: Permutation) -> int:
    return sum(sum(1 for a, b in zip(s.images, tau.images) if a == b) for s in r.members())


@dataclass(frozen=True)
class SixSetReport:
    D: frozenset[int]
    E: frozenset[int]
    F: frozenset[int]
    G: frozenset[int]
    H: frozenset[int]

    @property
    def sizes(self) -> dict[str, int]:
        return {name: len(getattr(self, name)) for name in "DEFGH"}

    def all_six(self) -> bool:
        return all(v == 6 for v in self.sizes.values())


def six_sets(r: RSet) -> SixSetReport:
    d, h1, h2 = r.delta, r.eta1, r.eta2
    di, h1i, h2i = d.inverse(), h1.inverse(), h2.inverse()
    a1, a2, b1, b2, c1, c2 = r.a1, r.a2, r.b1, r.b2, r.c1, r.c2
    return SixSetReport(
        D=frozenset({a1, a2, b1, b2, c1, c2}),
        E=frozenset({d(a1), di(a1), h2(a1), h2i(a1), a1, a2}),
        F=frozenset({d(a2), di(a2), h1(a2), h1i(a2), a1, a2}),
        G=frozenset({c1, c2, b2, d(c2), h1(b2), d(h1i(c2))}),
        H=frozenset({c1, c2, b1, d(c1), h2(b1), d(h2i(c1))}),
    )


def placement_lemma_holds(r: RSet) -> bool:
    """b_1, c_1 placed by a_2 and b_2, c_2 placed by a_1 (under delta or the matching eta)."""
    d, h1, h2 = r.delta, r.eta1, r.eta2
    di, h1i, h2i = d.inverse(), h1.inverse(), h2.inverse()
    return (
        r.b1 in (d(r.a2), h1(r.a2))
        and r.c1 in (di(r.a2), h1i(r.a2))
        and r.b2 in (d(r.a1), h2(r.a1))
        and r.c2 in (di(r.a1), h2i(r.a1))
    )


def delta_action_lemma_holds(r: RSet) -> bool:
    d = r.delta
    return (d(r.a1) == r.b2 or d(r.c2) == r.a1) and (d(r.a2) == r.b1 or d(r.c1) == r.a2)


def derangement_buckets(n: int) -> list[CycleType]:
    """Derangement cycle types, most parts first (for n = 6: 2,2,2 / 4,2 / 3,3 / 6)."""
    types = [CycleType(p) for p in partitions(n) if 1 not in p]
    return sorted(types, key=lambda t: -len(t.parts))


STAGES = (
    "deltas",
    "eta1_considered",
    "eta1_rejected_eta_delta_not_near",
    "pairs_considered",
    "pairs_rejected_eta1_eta2_not_derangement",
    "structural_valid",
    "rejected_remark_normalization",
    "rejected_six_sets",
    "rejected_transposition_parity",
    "rejected_full_parity",
    "survivors",
)


@dataclass
class SearchOptions:
    conjugation_reduced: bool = False
    remark_normalization: bool = False
    audit: bool = True
    check_translates: bool = True

    @property
    def certified(self) -> bool:
        return not self.conjugation_reduced


@dataclass
class Certificate:
    n: int
    options: SearchOptions
    buckets: dict[str, dict[str, int]]
    survivors: list[RSet]
    audit: dict[str, int] = field(default_factory=dict)
    lemma_checks: dict[str, int] = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "NONE" if not self.survivors else "FOUND"

    def totals(self) -> dict[str, int]:
        out: Counter[str] = Counter()
        for tallies in self.buckets.values():
            out.update(tallies)
        return {k: out.get(k, 0) for k in STAGES}

    def survivors_by_bucket(self) -> dict[str, int]:
        return {name: t["survivors"] for name, t in self.buckets.items()}

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "mode": "certified" if self.options.certified else "conjugation-reduced (non-certified)",
            "options": {
                "conjugation_reduced": self.options.conjugation_reduced,
                "remark_normalization": self.options.remark_normalization,
                "audit": self.options.audit,
                "check_translates": self.options.check_translates,
            },
            "stages": list(STAGES),
            "buckets": self.buckets,
            "totals": self.totals(),
            "audit": self.audit,
            "lemma_checks": self.lemma_checks,
            "survivor_count": len(self.survivors),
            "survivors": [s.to_json() for s in self.survivors],
            "verdict": self.verdict,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def _search_deltas(args: tuple[int, list[int], SearchOptions]) -> tuple[dict[str, int], list[tuple[int, int, int]], dict[str, int]]:
    """Run every stage for a list of delta indices; returns tallies, survivors, audit counts."""
    n, deltas, opts = args
    group = symmetric_group(n)
    mul, inv, nfix = group.mul, group.inverse, group.num_fixed
    perms = [tuple(p) for p in group.perms.tolist()]
    full, trans, _ = _parity_tables(n)
    near = [int(i) for i in group.near_derangements]
    fixed_point = {i: next(x for x in range(n) if perms[i][x] == x) for i in near}

    def structural(d: int, h1: int, h2: int) -> bool:
        di = inv[d]
        return (
            nfix[d] == 0
            and nfix[h1] == 1
            and nfix[h2] == 1
            and nfix[mul[h1, di]] == 1
            and nfix[mul[h2, di]] == 1
            and nfix[mul[h1, inv[h2]]] == 0
        )
    t = Counter({k: 0 for k in STAGES})
    audit = Counter({"pruned_passing_full_parity": 0, "translate_structure_failures": 0})
    survivors = []
    for d in deltas:
        t["deltas"] += 1
        di = int(inv[d])
        dp, dip = perms[d], perms[di]
        pool = []
        for h in near:
            t["eta1_considered"] += 1
            q = int(mul[h, di])
            if nfix[q] != 1:
                t["eta1_rejected_eta_delta_not_near"] += 1
                continue
            pool.append((h, q))
        for h1, q1 in pool:
            h1i = int(inv[h1])
            for h2, q2 in pool:
                if h2 == h1:
                    continue
                t["pairs_considered"] += 1
                if nfix[mul[h1, inv[h2]]] != 0:
                    t["pairs_rejected_eta1_eta2_not_derangement"] += 1
                    continue
                t["structural_valid"] += 1
                h2i = int(inv[h2])
                if opts.check_translates:
                    # R delta^-1, R eta1^-1 and R eta2^-1 must be structurally valid again
                    translated = (
                        (di, q1, q2),
                        (int(mul[h2, h1i]), h1i, int(mul[d, h1i])),
                        (int(mul[h1, h2i]), int(mul[d, h2i]), h2i),
                    )
                    if not all(structural(*tr) for tr in translated):
                        audit["translate_structure_failures"] += 1
                p1, p2 = perms[h1], perms[h2]
                a1, a2 = fixed_point[h1], fixed_point[h2]
                c1, c2 = fixed_point[q1], fixed_point[q2]
                b1, b2 = dip[c1], dip[c2]
                full_ok = (full[0] ^ full[d] ^ full[h1] ^ full[h2]) == 0
                if opts.remark_normalization and dp[a1] != b2:
                    t["rejected_remark_normalization"] += 1
                    audit["pruned_passing_full_parity"] += full_ok and opts.audit
                    continue
                p1i, p2i = perms[h1i], perms[h2i]
                # the six-element sets only make sense on six points
                sizes_ok = n != 6 or (
                    len({a1, a2, b1, b2, c1, c2}) == 6
                    and len({dp[a1], dip[a1], p2[a1], p2i[a1], a1, a2}) == 6
                    and len({dp[a2], dip[a2], p1[a2], p1i[a2], a1, a2}) == 6
                    and len({c1, c2, b2, dp[c2], p1[b2], dp[p1i[c2]]}) == 6
                    and len({c1, c2, b1, dp[c1], p2[b1], dp[p2i[c1]]}) == 6
                )
                if not sizes_ok:
                    t["rejected_six_sets"] += 1
                    audit["pruned_passing_full_parity"] += full_ok and opts.audit
                    continue
                if trans[0] ^ trans[d] ^ trans[h1] ^ trans[h2]:
                    t["rejected_transposition_parity"] += 1
                    audit["pruned_passing_full_parity"] += full_ok and opts.audit
                    continue
                if not full_ok:
                    t["rejected_full_parity"] += 1
                    continue
                t["survivors"] += 1
                survivors.append((d, h1, h2))
    return dict(t), survivors, dict(audit)


def search_rsets(n: int = 6, options: SearchOptions | None = None, threads: int = 1) -> Certificate:
    """Enumerate R-sets in S_n by delta cycle type, returning an auditable certificate.

    With ``conjugation_reduced`` only the first delta of each cycle type is
    searched; that run is not certified.
    """
    opts = options or SearchOptions()
    group = symmetric_group(n)
    by_type: dict[str, list[int]] = {str(t): [] for t in derangement_buckets(n)}
    for d in group.derangements:
        by_type[str(group.cycle_type_of(int(d)))].append(int(d))
    if opts.conjugation_reduced:
        by_type = {k: v[:1] for k, v in by_type.items()}
    jobs = []
    for name, deltas in by_type.items():
        per = max(1, len(deltas) // max(1, threads))
        for i in range(0, len(deltas), per):
            jobs.append((name, deltas[i : i + per]))
    if threads <= 1:
        results = [_search_deltas((n, ds, opts)) for _, ds in jobs]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_search_deltas, [(n, ds, opts) for _, ds in jobs]))
    buckets = {name: {k: 0 for k in STAGES} for name in by_type}
    audit: Counter[str] = Counter()
    found = []
    for (name, _), (tallies, survivors, aud) in zip(jobs, results):
        for k, v in tallies.items():
            buckets[name][k] += v
        audit.update(aud)
        found.extend(survivors)
    rsets = [derive_fixed_data(group.element(d), group.element(a), group.element(b)) for d, a, b in found]
    lemma = Counter({"placements": 0, "delta_action": 0, "six_sets_all_six": 0,
                     "translates_pass_parity": 0, "transposition_fast_path_agrees": 0})
    for r in rsets:
        lemma["placements"] += placement_lemma_holds(r)
        lemma["delta_action"] += delta_action_lemma_holds(r)
        lemma["six_sets_all_six"] += six_sets(r).all_six()
        lemma["translates_pass_parity"] += all(parity_check(t) for t in r.translates())
        lemma["transposition_fast_path_agrees"] += parity_check(r, "sampled")
    return Certificate(n, opts, buckets, rsets, dict(audit), dict(lemma))


def exclusion_suite(certificate: Certificate | None = None) -> dict[str, int]:
    """Surviving candidates per cycle type of delta (each must be 0 for nonexistence)."""
    cert = certificate or search_rsets(6)
    return cert.survivors_by_bucket()


def _span_vectors(vectors: list[np.ndarray]) -> list[np.ndarray]:
    out = []
    for coeffs in itertools.product((0, 1), repeat=len(vectors)):
        v = np.zeros_like(vectors[0])
        for c, u in zip(coeffs, vectors):
            if c:
                v = v ^ (u & 1)
        out.append(v)
    return out


def extract_rsets(family: DisconnectedFamily, basis: DependencyBasis) -> list[RSet]:
    """Every normalized 2+2 R-set obtainable from a GF(2) dependency of a pair.

    A 0/1 dependency R may be complemented inside either clique (adding that
    clique's indicator) until both sides have two elements, then translated by
    an element of R n C so that e lies in R n C.
    """
    if basis.p != 2 or family.r != 2 or family.n % 2:
        raise ValueError("extract_rsets needs a GF(2) basis for a pair at even n")
    n = family.n
    c_side, ct_side = family.cliques
    vectors = basis.clique_vectors + basis.non_clique_vectors
    clique_span = {tuple(v) for v in _span_vectors(basis.clique_vectors)}
    found: dict[tuple, RSet] = {}
    for v in _span_vectors(vectors):
        if tuple(v) in clique_span:
            continue
        left, right = v[:n].copy(), v[n:].copy()
        if left.sum() > n // 2:
            left ^= 1
        if right.sum() > n // 2:
            right ^= 1
        if left.sum() != 2 or right.sum() != 2:
            continue
        in_c = [m for m, x in zip(c_side.members, left) if x]
        in_ct = [m for m, x in zip(ct_side.members, right) if x]
        for k, rho in enumerate(in_c):
            ri = rho.inverse()
            delta = compose(in_c[1 - k], ri)
            etas = sorted(compose(m, ri) for m in in_ct)
            try:
                r = derive_fixed_data(delta, etas[0], etas[1])
            except StructuralReject:
                continue
            found[(r.delta, r.eta1, r.eta2)] = r
    if not found:
        raise NoUsableDependency("no dependency reduces to a 2+2 R-set")
    return [found[k] for k in sorted(found)]


def extract_rset(family: DisconnectedFamily, basis: DependencyBasis) -> RSet:
    return extract_rsets(family, basis)[0]


def subset_dependencies(basis: DependencyBasis) -> list[list[Permutation]]:
    """Non-clique GF(2) dependencies of a pair read as subsets of C u C~."""
    if basis.p != 2:
        raise ValueError("subset dependencies are defined over GF(2)")
    clique_span = {tuple(v) for v in _span_vectors(basis.clique_vectors)}
    out = []
    for v in _span_vectors(basis.clique_vectors + basis.non_clique_vectors):
        if tuple(v) not in clique_span:
            out.append(basis.as_subset(v))
    return out
