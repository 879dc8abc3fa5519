import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from obstrukt.groups import alternating, sl2
from obstrukt.nielsen import (Q0, NielsenError, all_conjugates, apply_braid, braid_generator,
                              canonical, class_record, enumerate_classes, is_nielsen, orbits,
                              product_order_census, solve_conjugation)


def test_census_counts(G, census):
    assert len(census) == 18
    assert product_order_census(G, census) == {1: 2, 6: 6, 10: 10}
    for t in census:
        assert is_nielsen(G, t)
        assert canonical(G, t) == t
        assert all(G.class_of(g).label == "3A" for g in t)


def test_census_parallel_matches_serial(G, census):
    assert enumerate_classes(G, ["3A"] * 4, jobs=2) == census


def test_census_against_naive_enumeration():
    # small group: compare with a completely naive search over all tuples
    A = alternating(4)
    cv = ["3A", "3B", "3A", "3B"]
    fast = enumerate_classes(A, cv)
    naive = set()
    members = [A.class_by_label(c).members for c in cv]
    for t in itertools.product(*members):
        if is_nielsen(A, t):
            naive.add(canonical(A, t))
    assert fast == sorted(naive)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 17), st.integers(0, 119))
def test_canonical_invariant_under_conjugation(G, census, k, x):
    t = census[k]
    assert canonical(G, tuple(G.conj(x, g) for g in t)) == t


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 17), st.integers(1, 3), st.sampled_from([1, -1]))
def test_braid_generator_inverse(G, census, k, i, e):
    t = census[k]
    assert braid_generator(G, braid_generator(G, t, i, e), i, -e) == t
    u = braid_generator(G, t, i, e)
    assert G.mul(*u) == G.identity


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 17))
def test_braid_relation(G, census, k):
    t = census[k]
    lhs = apply_braid(G, [(1, 1), (2, 1), (1, 1)], t)
    rhs = apply_braid(G, [(2, 1), (1, 1), (2, 1)], t)
    assert lhs == rhs
    assert apply_braid(G, [(1, 1), (3, 1)], t) == apply_braid(G, [(3, 1), (1, 1)], t)


def test_q0_orbits(G, census):
    orbs = orbits(G, Q0, census)
    lengths = sorted(len(o) for o in orbs)
    assert lengths == [1, 1, 3, 3, 5, 5]
    for o in orbs:
        labels = {G.class_of(G.mul(t[0], t[1])).label for t in o}
        assert len(labels) == 1
    tens = sorted(G.class_of(G.mul(o[0][0], o[0][1])).label for o in orbs if len(o) == 5)
    assert tens == ["10A", "10B"]


def test_solve_conjugation_size_is_centralizer(G, census):
    rng = random.Random(3)
    for t in census:
        x = rng.randrange(G.order)
        u = tuple(G.conj(x, g) for g in t)
        sols = solve_conjugation(G, t, u)
        # t generates G, so the solutions form a coset of the center
        assert len(sols) == 2 and x in sols


def test_all_conjugates_rows(G, census):
    t = census[0]
    rows = all_conjugates(G, t)
    for x in (0, 17, 119):
        assert tuple(int(v) for v in rows[x]) == tuple(G.conj(x, g) for g in t)


@pytest.mark.parametrize("ell", [5, 11, 13])
def test_sl2_rigidity(ell):
    assert len(enumerate_classes(sl2(ell), ["4A", f"{ell}A", f"{ell}B"])) == 1


def test_errors(G, census):
    with pytest.raises(NielsenError):
        braid_generator(G, census[0], 4)
    with pytest.raises(NielsenError):
        enumerate_classes(G, ["3A"])
    with pytest.raises(NielsenError):
        orbits(G, Q0, census[:1])  # the image leaves the set


def test_class_record(G, ext, census):
    rec = class_record(G, census[0], ["3A"] * 4, orbit_id=2, fmt=ext.format_lift)
    assert rec["group"] == "Ã5" and len(rec["canonical_entries"]) == 4 and rec["orbit_id"] == 2
    assert rec["ord_g5"] in (1, 6, 10)
