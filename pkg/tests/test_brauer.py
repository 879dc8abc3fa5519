from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from obstrukt.brauer import (INF, BrauerError, FieldLabel, QuatSymbol, brauer_class, class_over_Q,
                             hilbert_symbol, hilbert_symbol_by_search, legendre, squarefree_part,
                             sum_trivial_given_squares, support, symbol, symbol_trivial_given_squares,
                             witt_obstruction)

nonzero = st.integers(-200, 200).filter(bool)
small = st.integers(-40, 40).filter(bool)
places = st.sampled_from([2, 3, 5, 7, 11, 13, INF])


def test_squarefree_part():
    assert squarefree_part(12) == 3
    assert squarefree_part(-8) == -2
    assert squarefree_part(Fraction(3, 4)) == 3
    assert squarefree_part(Fraction(-5, 18)) == -10
    with pytest.raises(BrauerError):
        squarefree_part(0)


def test_legendre_matches_squares():
    for p in (3, 5, 7, 11, 13, 97):
        squares = {x * x % p for x in range(1, p)}
        for a in range(1, p):
            assert legendre(a, p) == (1 if a in squares else -1)
    with pytest.raises(BrauerError):
        legendre(3, 9)


@pytest.mark.parametrize("a,b,v,expected", [
    (-1, -1, 2, -1), (-1, -1, INF, -1), (-1, -1, 3, 1),
    (-1, -7, 7, -1), (2, 7, 7, 1), (3, 5, 5, -1), (2, 3, 3, -1), (5, 5, 5, 1),
])
def test_known_symbols(a, b, v, expected):
    assert hilbert_symbol(a, b, v) == expected


@settings(max_examples=300, deadline=None)
@given(small, small, st.sampled_from([2, 3, 5, 7, 11, 13, INF]))
def test_closed_form_matches_search(a, b, v):
    assert hilbert_symbol(a, b, v) == hilbert_symbol_by_search(a, b, v)


@settings(max_examples=500, deadline=None)
@given(nonzero, nonzero, nonzero, places)
def test_symbol_identities(a, b, c, v):
    h = hilbert_symbol
    assert h(a, b, v) == h(b, a, v)
    assert h(a, b * c, v) == h(a, b, v) * h(a, c, v)
    assert h(a, -a, v) == 1
    if a != 1:
        assert h(a, 1 - a, v) == 1


@settings(max_examples=500, deadline=None)
@given(nonzero, nonzero)
def test_product_formula(a, b):
    prod = 1
    for v in support(a, b):
        prod *= hilbert_symbol(a, b, v)
    assert prod == 1


def test_witt_obstruction_examples():
    target = class_over_Q([(-1, -1)])
    assert not target.is_zero
    assert target.ramified_places() == [2, INF]
    assert witt_obstruction(-1, 3) == target
    for b in (2, 3, 5, 7, -2, 11):
        assert witt_obstruction(-1, b) == target
    assert witt_obstruction(1, 1).is_zero
    # Q(sqrt 2, sqrt 3) does lift to a quaternion extension
    assert witt_obstruction(2, 3).is_zero


def test_class_arithmetic():
    x = class_over_Q([(-1, -1)])
    assert (x + x).is_zero
    assert class_over_Q([(2, 3)]) + class_over_Q([(2, 5)]) == class_over_Q([(2, 15)])
    local = brauer_class([symbol(-1, -1, FieldLabel.Qp(2))], FieldLabel.Qp(2))
    assert local.ramified_places() == [2]
    with pytest.raises(BrauerError):
        _ = local == x


def test_symbol_validation():
    with pytest.raises(BrauerError):
        QuatSymbol(4, 3)
    with pytest.raises(BrauerError):
        FieldLabel.quadratic(4)
    with pytest.raises(BrauerError):
        hilbert_symbol(0, 3, 2)
    with pytest.raises(BrauerError):
        hilbert_symbol(1, 3, 4)
    assert str(symbol(8, 27)) == "(2,3)"


def test_quadratic_field_declared_squares():
    K = FieldLabel.quadratic(5)
    assert symbol_trivial_given_squares(symbol(5, 7, K))
    assert not symbol_trivial_given_squares(symbol(-1, 7, K))
    assert sum_trivial_given_squares([symbol(-1, 3, K), symbol(-5, 3, K)])  # (5, 3)
    assert not sum_trivial_given_squares([symbol(-1, 3, K)])
    with pytest.raises(BrauerError):
        brauer_class([symbol(-1, 3, K)], K)
