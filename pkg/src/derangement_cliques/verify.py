"""Per-degree verification suites behind the ``verify`` command.

Each suite returns a list of :class:`Check` rows; a row records what was
measured next to what was expected, so a failing row is self-explanatory.
"""

from __future__ import annotations

import math
import time
from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cache import Cache
from .clique import (
    are_disconnected,
    count_maximal_cliques,
    disconnected_pairs,
    enumerate_maximal_cliques,
    family_from_mols,
    find_disconnected_families,
    partner_search,
    random_maximal_clique,
    translate,
    x4_structure_report,
    x5_structure_report,
)
from .latin import count_latin_squares, cyclic_square, gamma, omega, orthogonal_pairs
from .obstruction import (
    extract_rsets,
    parity_check,
    search_rsets,
    subset_dependencies,
)
from .perm import (
    count_derangements,
    cycle_type,
    is_near_derangement,
    n_fixed,
    symmetric_group,
)
from .spectral import (
    clique_row_sums,
    constant_is_harmonic,
    dependency_basis,
    family_span_dim,
    fixed_point_matrix,
    lambda_std,
    min_non_clique_dependencies,
    obstruction_bound,
    predicted_image_dim,
    projection_image_dim,
    spectrum,
    trace_form_residues,
    u_space_dims,
    verify_eigenfunction,
)

SUPPORTED = (3, 4, 5, 6)
MIN_N5_PAIRS = 20


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def _timed(name: str, fn: Callable[[], tuple[bool, str]]) -> Check:
    start = time.perf_counter()
    passed, detail = fn()
    return Check(name, bool(passed), detail, time.perf_counter() - start)


def _primes_dividing(n: int) -> list[int]:
    return [p for p in (2, 3, 5) if n % p == 0]


def rank_checks(n: int, cache: Cache | None = None) -> list[Check]:
    """Exact ranks of the fixed-point matrix over Q and over every GF(p) with p | n."""
    out = []
    for field in ["Q", *_primes_dividing(n)]:
        def run(field=field) -> tuple[bool, str]:
            got = projection_image_dim(n, field, cache)
            want = predicted_image_dim(n, field)
            return got == want, f"rank={got} predicted={want}"

        label = "Q" if field == "Q" else f"GF({field})"
        out.append(_timed(f"rank over {label}", run))
    return out


def _bijection(n: int) -> tuple[bool, str]:
    pairs = orthogonal_pairs(n)
    failures = 0
    for a, b in pairs:
        pair = gamma(a, b)
        if omega(pair) != (a, b) or gamma(*omega(pair)) != pair:
            failures += 1
    return failures == 0 and bool(pairs), f"{len(pairs)} ordered orthogonal pairs, {failures} round-trip failures"


def _clique_count(n: int) -> tuple[bool, str]:
    expected = {3: 2, 4: 24, 5: 1344}[n]
    sizes = {len(c) for c in enumerate_maximal_cliques(n)}
    got = count_maximal_cliques(n)
    latin = count_latin_squares(n)
    ok = got == expected and sizes == {n} and got * math.factorial(n) == latin
    return ok, f"cliques={got} expected={expected} sizes={sorted(sizes)} latin_squares={latin}"


def _family_checks(n: int, families: list, p: int) -> list[Check]:
    bound = obstruction_bound(n, 2)
    need = min_non_clique_dependencies(n)

    def near() -> tuple[bool, str]:
        bad = sum(
            1
            for f in families
            for s in f.cliques[0]
            for w in f.cliques[1]
            if not is_near_derangement(s * w.inverse())
        )
        return bad == 0, f"{len(families)} pairs, {bad} cross products without a unique fixed point"

    def span() -> tuple[bool, str]:
        dims = [family_span_dim(f, p) for f in families]
        return max(dims) <= bound, f"max span dim {max(dims)} <= {bound} over GF({p})"

    def deps() -> tuple[bool, str]:
        counts = [len(dependency_basis(f, p).non_clique_vectors) for f in families]
        return min(counts) >= need, f"min non-clique dependencies {min(counts)} >= {need}"

    def trace_form() -> tuple[bool, str]:
        bad = 0
        for f in families:
            t = trace_form_residues(f, p)
            want = np.ones_like(t)
            want[:n, :n] = 0
            want[n:, n:] = 0
            bad += int(np.any(t != want))
        return bad == 0, f"{bad} pairs with a trace-form pairing other than 0 within / 1 across"

    return [
        _timed("near-derangement cross products", near),
        _timed("modular span bound", span),
        _timed("non-clique dependency count", deps),
        _timed("trace-form pairing", trace_form),
    ]


def _clique_sum_constancy(n: int, cliques) -> tuple[bool, str]:
    bad = sum(1 for c in cliques if np.any(clique_row_sums(c) != n))
    return bad == 0, f"{len(cliques)} cliques, {bad} with a non-constant fixed-point sum"


def _eigen(n: int) -> tuple[bool, str]:
    check = verify_eigenfunction(n)
    want = Fraction(count_derangements(n) * n, n - 1)
    trivial = spectrum(n)[0]
    ok = check.passed and check.eigenvalue == want and trivial.value == 0 and constant_is_harmonic(n)
    return ok, (
        f"{check.entries_checked} entry functions, {len(check.failures)} failures, "
        f"lambda_std={check.eigenvalue} expected={want}, trivial={trivial.value}"
    )


def _translation_invariance(n: int, seed: int, trials: int = 100) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    group = symmetric_group(n)
    bad = 0
    for _ in range(trials):
        c1 = random_maximal_clique(n, rng)
        c2 = random_maximal_clique(n, rng)
        tau = group.element(int(rng.integers(group.order)))
        if are_disconnected(c1, c2) != are_disconnected(translate(c1, tau), translate(c2, tau)):
            bad += 1
    return bad == 0, f"{trials} seeded triples, {bad} disagreements"


def _suite_3(seed: int, cache: Cache | None) -> list[Check]:
    n = 3
    families = find_disconnected_families(n, 2)
    cliques = list(enumerate_maximal_cliques(n))
    return [
        _timed("clique count and size law", lambda: _clique_count(n)),
        _timed("bijection round-trip", lambda: _bijection(n)),
        *rank_checks(n, cache),
        *_family_checks(n, families, 3),
        _timed("clique dependency constancy", lambda: _clique_sum_constancy(n, cliques)),
        _timed("eigenfunctions", lambda: _eigen(n)),
        _timed("translation invariance", lambda: _translation_invariance(n, seed)),
    ]


def _x4() -> tuple[bool, str]:
    rep = x4_structure_report()
    ok = (
        len(rep.participating) == 1
        and rep.klein_is_unique
        and rep.partners_are_translates
        and rep.max_family_size == 3
    )
    return ok, (
        f"identity cliques with a partner={len(rep.participating)} "
        f"klein={rep.klein_is_unique} partners translates={rep.partners_are_translates} "
        f"max family={rep.max_family_size}"
    )


def _rset_analogs_4(families) -> tuple[bool, str]:
    types = set()
    share_all = 0
    parity_bad = 0
    for f in families:
        basis = dependency_basis(f, 2)
        subsets = subset_dependencies(basis)
        group = symmetric_group(4)
        for s in subsets:
            sums = group.agreement[[group.index(x) for x in s]].sum(axis=0)
            parity_bad += int(np.any(sums % 2))
        rsets = extract_rsets(f, basis)
        types |= {str(cycle_type(r.delta)) for r in rsets}
        parity_bad += sum(1 for r in rsets if not parity_check(r))
        share_all += len({r.delta for r in rsets}) == 1
    ok = types == {"2,2"} and parity_bad == 0 and share_all == 0
    return ok, f"delta cycle types {sorted(types)}, parity failures {parity_bad}, pairs with a single delta {share_all}"


def _suite_4(seed: int, cache: Cache | None) -> list[Check]:
    n = 4
    families = find_disconnected_families(n, 2)
    cliques = list(enumerate_maximal_cliques(n))
    return [
        _timed("clique count and size law", lambda: _clique_count(n)),
        _timed("bijection round-trip", lambda: _bijection(n)),
        *rank_checks(n, cache),
        *_family_checks(n, families, 2),
        _timed("clique dependency constancy", lambda: _clique_sum_constancy(n, cliques)),
        _timed("Klein uniqueness and family size", _x4),
        _timed("2+2 dependency sets", lambda: _rset_analogs_4(families)),
        _timed("eigenfunctions", lambda: _eigen(n)),
        _timed("translation invariance", lambda: _translation_invariance(n, seed)),
    ]


def _x5() -> tuple[bool, str]:
    rep = x5_structure_report()
    ok = rep.odd_derangements == 0 and rep.all_cyclic and rep.identity_cliques == 56 and rep.participating
    return ok, (
        f"{len(rep.participating)} participating of {rep.identity_cliques} identity cliques, "
        f"odd derangements={rep.odd_derangements}, cyclic={rep.cyclic}"
    )


def _u_space(pairs, normalized) -> tuple[bool, str]:
    bad = 0
    for f in pairs:
        d = u_space_dims(f, 5)
        bad += not (d.dim_u <= 6 and d.dim_u_c == 3 and d.dim_u_ctilde == 3)
    gen_bad = sum(1 for f in normalized if u_space_dims(f, 5).generator_rank != 3)
    return bad == 0 and gen_bad == 0, (
        f"{len(pairs)} pairs, {bad} outside dim U <= 6, U|C = U|C~ = 3; "
        f"{gen_bad} of {len(normalized)} identity pairs where the three generators fail to span"
    )


def _mols_5() -> tuple[bool, str]:
    squares = [cyclic_square(5, k) for k in range(1, 5)]
    family = family_from_mols(squares)
    return family.r == 4, f"family of {family.r} pairwise disconnected cliques from A_1..A_4"


def _suite_5(seed: int, cache: Cache | None) -> list[Check]:
    n = 5
    families = find_disconnected_families(n, 2)
    pairs = disconnected_pairs(n)
    rng = np.random.default_rng(seed)
    cliques = list(enumerate_maximal_cliques(n))
    sample = [cliques[i] for i in sorted(rng.choice(len(cliques), 100, replace=False))]
    checks = [
        _timed("clique count and size law", lambda: _clique_count(n)),
        _timed(
            "pair supply",
            lambda: (len(pairs) >= MIN_N5_PAIRS, f"{len(pairs)} pairs >= {MIN_N5_PAIRS}"),
        ),
        *rank_checks(n, cache),
        *_family_checks(n, pairs, 5),
        _timed("clique dependency constancy (sampled)", lambda: _clique_sum_constancy(n, sample)),
        _timed("cyclic clique law", _x5),
        _timed("U-space dimensions", lambda: _u_space(pairs, families)),
        _timed("finite-field MOLS family", _mols_5),
        _timed("eigenfunctions", lambda: _eigen(n)),
    ]
    return checks


def _fpm_symmetry_sampled(n: int, seed: int, samples: int = 2000) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    m = fixed_point_matrix(n).entries
    group = symmetric_group(n)
    bad = 0
    for _ in range(samples):
        i, j = (int(x) for x in rng.integers(group.order, size=2))
        want = n_fixed(group.element(i), group.element(j))
        bad += m[i, j] != want or m[j, i] != want
    bad += int(np.any(np.diag(m) != n))
    return bad == 0, f"{samples} sampled entries and the diagonal, {bad} mismatches"


def _greedy_6(seed: int, trials: int = 1000) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    sizes = {len(random_maximal_clique(6, rng)) for _ in range(trials)}
    return sizes == {6}, f"{trials} randomized greedy extensions, sizes {sorted(sizes)}"


def _lambda_6() -> tuple[bool, str]:
    got = lambda_std(6)
    return got == 318, f"lambda_std={got} expected=318"


def _obstruction_6() -> tuple[bool, str]:
    cert = search_rsets(6)
    return cert.verdict == "NONE", f"verdict={cert.verdict} survivors={cert.survivors_by_bucket()}"


def _exhaustive_6(cache: Cache | None, threads: int) -> tuple[bool, str]:
    rep = partner_search(6, allow_long=True, threads=threads, cache=cache)
    return rep.verdict == "NONE", (
        f"verdict={rep.verdict} over {rep.cliques_examined} identity cliques, "
        f"{rep.candidate_vertices} candidate vertices"
    )


def _suite_6(seed: int, cache: Cache | None, allow_long: bool = False, threads: int = 1) -> list[Check]:
    n = 6
    checks = [
        _timed("fixed-point matrix symmetry (sampled)", lambda: _fpm_symmetry_sampled(n, seed)),
        _timed("greedy clique size law", lambda: _greedy_6(seed)),
        *rank_checks(n, cache),
        _timed("lambda_std", _lambda_6),
        _timed("R-set search", _obstruction_6),
    ]
    if allow_long:
        checks.append(_timed("exhaustive partner search", lambda: _exhaustive_6(cache, threads)))
    return checks


def verify_all(
    n: int,
    seed: int = 0,
    cache: Cache | None = None,
    allow_long: bool = False,
    threads: int = 1,
) -> list[Check]:
    """Run every suite that applies to degree n."""
    if n not in SUPPORTED:
        raise ValueError(f"verify supports n in {SUPPORTED}, got {n}")
    if n == 3:
        return _suite_3(seed, cache)
    if n == 4:
        return _suite_4(seed, cache)
    if n == 5:
        return _suite_5(seed, cache)
    return _suite_6(seed, cache, allow_long, threads)
