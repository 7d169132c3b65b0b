from __future__ import annotations

import itertools

import pytest

from derangement_cliques.errors import (
    BrokenPair,
    DegreeMismatch,
    InvalidRectangle,
    NotLatin,
    NotOrthogonal,
    ParseError,
)
from derangement_cliques.latin import (
    LatinRectangle,
    LatinSquare,
    OrderedCliquePair,
    are_orthogonal,
    complete_rectangle,
    count_latin_squares,
    cyclic_square,
    enumerate_latin_squares,
    format_pair,
    format_square,
    gamma,
    is_latin,
    omega,
    orthogonal_pairs,
    parse_pair,
    parse_square,
)
from derangement_cliques.perm import Permutation, enumerate_group

cyc = Permutation.from_cycles

A3 = LatinSquare([[1 + (i + j - 2) % 3 for j in range(1, 4)] for i in range(1, 4)])
B3 = LatinSquare([[1 + (i + 2 * j - 3) % 3 for j in range(1, 4)] for i in range(1, 4)])


def brute_latin_squares(n):
    rows = list(itertools.permutations(range(1, n + 1)))
    out = []
    for grid in itertools.product(rows, repeat=n):
        if all(len({r[j] for r in grid}) == n for j in range(n)):
            out.append(grid)
    return out


def test_is_latin():
    assert is_latin([[1, 2], [2, 1]])
    assert not is_latin([[1, 2], [1, 2]])
    assert not is_latin([[1, 2, 3], [2, 3, 1]])
    with pytest.raises(NotLatin):
        LatinSquare([[1, 1], [2, 2]])


def test_square_indexing():
    assert A3[1, 1] == 1 and A3[2, 3] == 1 and A3.transpose() == A3


def test_orthogonal_examples():
    assert not are_orthogonal(A3, A3)
    assert are_orthogonal(A3, B3) and are_orthogonal(B3, A3)
    squares2 = [LatinSquare(g) for g in brute_latin_squares(2)]
    assert not any(are_orthogonal(a, b) for a in squares2 for b in squares2)
    with pytest.raises(DegreeMismatch):
        are_orthogonal(A3, cyclic_square(4))


def test_gamma_cyclic_pair():
    # Row 1 of A is 1 2 3 and of B is 1 3 2, so sigma_1 = (2 3); column 1 of
    # both squares is 1 2 3, so omega_1 = e.
    pair = gamma(A3, B3)
    e = Permutation.identity(3)
    assert set(pair.row_cliques) == {cyc(3, (2, 3)), cyc(3, (1, 3)), cyc(3, (1, 2))}
    assert set(pair.col_cliques) == {e, cyc(3, (1, 2, 3)), cyc(3, (1, 3, 2))}
    assert pair.is_valid()


def test_gamma_definition_by_hand():
    pair = gamma(A3, B3)
    for j in range(1, 4):
        for k in range(1, 4):
            assert pair.row_cliques[j - 1](A3[j, k]) == B3[j, k]
            assert pair.col_cliques[j - 1](A3[k, j]) == B3[k, j]


def test_gamma_rejects_non_orthogonal():
    with pytest.raises(NotOrthogonal):
        gamma(A3, A3)


def test_omega_round_trip_cyclic():
    assert omega(gamma(A3, B3)) == (A3, B3)


def test_omega_broken_pair():
    c = tuple(enumerate_group(3))[:1] + (cyc(3, (1, 2, 3)), cyc(3, (1, 3, 2)))
    with pytest.raises(BrokenPair):
        omega(OrderedCliquePair(c, c))


@pytest.mark.parametrize("n", [3, 4])
def test_bijection_exhaustive(n):
    pairs = orthogonal_pairs(n)
    assert pairs
    for a, b in pairs:
        pair = gamma(a, b)
        assert pair.is_valid()
        assert omega(pair) == (a, b)
        assert gamma(*omega(pair)) == pair


def test_orthogonal_pair_counts_against_brute_force():
    squares = [LatinSquare(g) for g in brute_latin_squares(3)]
    brute = sum(are_orthogonal(a, b) for a in squares for b in squares)
    assert len(orthogonal_pairs(3)) == brute


@pytest.mark.parametrize("n,count", [(1, 1), (2, 2), (3, 12), (4, 576)])
def test_count_latin_squares(n, count):
    assert count_latin_squares(n) == count
    assert len(list(enumerate_latin_squares(n))) == count
    if n <= 4:
        assert count == len(brute_latin_squares(n))


def test_count_latin_squares_order5():
    assert count_latin_squares(5) == 161280


def test_complete_rectangle_examples():
    sq = cyclic_square(4)
    full = LatinRectangle(tuple(Permutation(r) for r in sq.grid))
    assert complete_rectangle(full) == sq
    one = complete_rectangle(LatinRectangle((Permutation((1, 2, 3, 4)),)))
    assert one.grid[0] == (1, 2, 3, 4)
    two = complete_rectangle(LatinRectangle((Permutation((1, 2, 3, 4)), Permutation((2, 1, 4, 3)))))
    assert two.grid[:2] == ((1, 2, 3, 4), (2, 1, 4, 3))


def test_rectangle_validation():
    with pytest.raises(InvalidRectangle):
        LatinRectangle((Permutation((1, 2, 3)), Permutation((1, 3, 2))))
    with pytest.raises(InvalidRectangle):
        LatinRectangle(())


@pytest.mark.parametrize("n", [3, 4, 5])
def test_every_rectangle_prefix_completes(n):
    # prefixes of every clique-ordered square exercise many rectangle shapes
    squares = itertools.islice(enumerate_latin_squares(n), 0, None, 97 if n == 5 else 1)
    for sq in squares:
        rows = [Permutation(r) for r in sq.grid]
        for m in range(1, n + 1):
            done = complete_rectangle(LatinRectangle(tuple(rows[:m])))
            assert done.grid[:m] == sq.grid[:m]


def test_cyclic_squares_mutually_orthogonal():
    squares = [cyclic_square(5, k) for k in range(1, 5)]
    for a, b in itertools.combinations(squares, 2):
        assert are_orthogonal(a, b)


def test_parse_and_format():
    assert parse_square(format_square(B3)) == B3
    assert parse_pair(format_pair(A3, B3)) == (A3, B3)


def test_parse_errors_report_location():
    with pytest.raises(ParseError) as err:
        parse_square("1 2\n2 x\n")
    assert (err.value.line, err.value.column) == (2, 2)
    with pytest.raises(ParseError) as err:
        parse_square("1 2\n1 2\n")
    assert err.value.column == 1
    with pytest.raises(ParseError) as err:
        parse_square("1 2 3\n2 3\n3 1 2\n")
    assert err.value.line == 2
    with pytest.raises(ParseError):
        parse_pair("1 2\n2 1\n")
    with pytest.raises(ParseError) as err:
        parse_pair("1 2\n2 1\n\n1 2 3\n2 3 1\n3 1 2\n")
    assert err.value.line == 4
