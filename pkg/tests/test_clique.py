from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from derangement_cliques.cache import Cache
from derangement_cliques.clique import (
    DisconnectedFamily,
    MaximalClique,
    are_disconnected,
    clique_from_latin_square,
    count_maximal_cliques,
    disconnected_pairs,
    enumerate_maximal_cliques,
    family_from_mols,
    find_disconnected_families,
    format_clique,
    is_cyclic_clique,
    klein_clique,
    parse_clique,
    partner_search,
    random_maximal_clique,
    read_cliques,
    read_families,
    translate,
    write_cliques,
    write_families,
    x4_structure_report,
    x5_structure_report,
)
from derangement_cliques.errors import NotAClique, ParseError, ResourceLimit
from derangement_cliques.latin import count_latin_squares, cyclic_square
from derangement_cliques.perm import (
    Permutation,
    enumerate_group,
    is_derangement,
    is_near_derangement,
)

cyc = Permutation.from_cycles


def brute_cliques(n):
    """Maximal cliques by checking every n-subset of S_n (tiny n only)."""
    group = list(enumerate_group(n))
    out = []
    for sub in itertools.combinations(group, n):
        if all(is_derangement(a * b.inverse()) for a, b in itertools.combinations(sub, 2)):
            out.append(set(sub))
    return out


def plain_disconnected(c1, c2):
    return all(
        any(s.images[i] == w.images[i] for i in range(s.n)) for s in c1.members for w in c2.members
    )


def test_n3_cliques_match_brute_force():
    found = [set(c.members) for c in enumerate_maximal_cliques(3)]
    e = Permutation.identity(3)
    assert found == [
        {e, cyc(3, (1, 2, 3)), cyc(3, (1, 3, 2))},
        {cyc(3, (1, 2)), cyc(3, (1, 3)), cyc(3, (2, 3))},
    ]
    assert sorted(map(sorted, found)) == sorted(map(sorted, brute_cliques(3)))


def test_n4_cliques_match_brute_force():
    found = sorted(sorted(c.members) for c in enumerate_maximal_cliques(4))
    assert found == sorted(sorted(c) for c in brute_cliques(4))


@pytest.mark.parametrize("n,count", [(3, 2), (4, 24), (5, 1344)])
def test_clique_counts_against_latin_oracle(n, count):
    cliques = list(enumerate_maximal_cliques(n))
    assert len(cliques) == count == count_maximal_cliques(n)
    assert count * math.factorial(n) == count_latin_squares(n)
    assert all(len(c) == n for c in cliques)
    assert cliques == sorted(cliques, key=lambda c: c.members)


def test_identity_clique_counts():
    assert [count_maximal_cliques(n, containing_identity=True) for n in (3, 4, 5)] == [1, 4, 56]


def test_threaded_enumeration_is_identical():
    assert list(enumerate_maximal_cliques(5, threads=3)) == list(enumerate_maximal_cliques(5))


def test_n6_requires_allow_long():
    with pytest.raises(ResourceLimit) as err:
        list(enumerate_maximal_cliques(6))
    assert "--allow-long" in str(err.value)
    with pytest.raises(ResourceLimit):
        find_disconnected_families(6, 2)


def test_greedy_n6_always_reaches_six():
    rng = np.random.default_rng(2024)
    assert {len(random_maximal_clique(6, rng)) for _ in range(1000)} == {6}


def test_maximal_clique_validation():
    with pytest.raises(NotAClique):
        MaximalClique((Permutation.identity(3), cyc(3, (1, 2)), cyc(3, (1, 2, 3))))
    with pytest.raises(NotAClique):
        MaximalClique((Permutation.identity(3), cyc(3, (1, 2, 3))))


def test_are_disconnected_examples():
    a, b = enumerate_maximal_cliques(3)
    assert are_disconnected(a, b)
    assert not are_disconnected(a, a)
    k = klein_clique()
    # frozen from the plain cross-product oracle: two cross products are derangements
    assert are_disconnected(k, translate(k, cyc(4, (1, 2)))) is False
    assert plain_disconnected(k, translate(k, cyc(4, (1, 2)))) is False


def test_disconnection_matches_plain_oracle_n4():
    cliques = list(enumerate_maximal_cliques(4))
    for a, b in itertools.product(cliques, repeat=2):
        assert are_disconnected(a, b) == plain_disconnected(a, b)


def test_translate():
    k = klein_clique()
    assert translate(k, Permutation.identity(4)) == k
    c = list(enumerate_maximal_cliques(4))[7]
    for s in c.members:
        assert translate(c, s).contains_identity()


def test_translation_preserves_disconnection_n4():
    rng = np.random.default_rng(1)
    group = list(enumerate_group(4))
    for _ in range(100):
        c1, c2 = random_maximal_clique(4, rng), random_maximal_clique(4, rng)
        t = group[int(rng.integers(24))]
        assert are_disconnected(c1, c2) == are_disconnected(translate(c1, t), translate(c2, t))


@pytest.mark.parametrize("n", [3, 4, 5])
def test_cross_products_are_near_derangements(n):
    for fam in disconnected_pairs(n):
        c, ct = fam.cliques
        assert all(is_near_derangement(s * w.inverse()) for s in c for w in ct)


def test_family_search_n4():
    assert find_disconnected_families(4, 3)
    assert find_disconnected_families(4, 4) == []
    assert len(find_disconnected_families(4, 3, scope="first")) == 1
    for fam in find_disconnected_families(4, 2):
        assert fam.cliques[0].contains_identity()


def test_family_search_n5_cyclic():
    fams = find_disconnected_families(5, 2)
    assert fams
    for fam in fams:
        assert is_cyclic_clique(fam.cliques[0])


@pytest.mark.parametrize("n", [3, 4, 5])
def test_pair_enumeration_against_plain_oracle(n):
    cliques = list(enumerate_maximal_cliques(n))
    brute = sum(plain_disconnected(a, b) for a, b in itertools.combinations(cliques, 2))
    assert len(disconnected_pairs(n)) == brute
    # frozen oracle values
    assert brute == {3: 1, 4: 6, 5: 216}[n]


def test_disconnected_family_validation():
    a = list(enumerate_maximal_cliques(3))[0]
    with pytest.raises(NotAClique):
        DisconnectedFamily((a, a))


def test_x4_report():
    rep = x4_structure_report()
    assert rep.identity_cliques == 4
    assert rep.participating == [klein_clique()]
    assert rep.klein_is_unique and rep.partners_are_translates
    assert rep.max_family_size == 3


def test_x5_report():
    rep = x5_structure_report()
    assert rep.identity_cliques == 56
    assert rep.odd_derangements == 0 and rep.all_cyclic
    assert rep.cycle_type_profiles == {"[1,1,1,1,1] [5] [5] [5] [5]": len(rep.participating)}
    for c in rep.participating:
        for s in c.members:
            if s != Permutation.identity(5):
                assert {s**k for k in range(5)} == set(c.members)


def test_mols_family_n5():
    fam = family_from_mols([cyclic_square(5, k) for k in range(1, 5)])
    assert fam.r == 4
    for a, b in itertools.combinations(fam.cliques, 2):
        assert plain_disconnected(a, b)


def test_clique_from_square_is_clique():
    c = clique_from_latin_square(cyclic_square(4, 1))
    assert len(c) == 4


def test_clique_file_format():
    cliques = list(enumerate_maximal_cliques(3))
    assert format_clique(cliques[0]) == "1 2 3|2 3 1|3 1 2"
    assert read_cliques(write_cliques(cliques)) == cliques
    assert parse_clique("1 2 3|2 3 1|3 1 2") == cliques[0]
    with pytest.raises(ParseError):
        parse_clique("1 2 3|2 3 1", lineno=4)


def test_family_file_format():
    fams = find_disconnected_families(4, 3)
    text = write_families(fams)
    assert text.startswith("# family 1\n")
    assert read_families(text) == fams


def test_partner_search_small_and_resume(tmp_path):
    cache = Cache(tmp_path)
    rep = partner_search(4, cache=cache, chunk=1)
    assert rep.verdict == "FOUND" and rep.cliques_examined == 4
    again = partner_search(4, cache=cache, chunk=1)
    assert again.resumed_from == 4 and again.partners == rep.partners
    with pytest.raises(ResourceLimit):
        partner_search(6)
