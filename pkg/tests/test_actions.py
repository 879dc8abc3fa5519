import itertools

import pytest
from sympy import primerange

from obstrukt import brauer
from obstrukt.actions import (ActionError, RealActionConfig, ResidueDatum, case1_action_on_a0,
                              case1_residue_class, case_of, constant_field, inertia_image,
                              kappa, kappa_transport_image, moduli_profile, normalizer_chain,
                              real_conjugation_image, real_moduli_and_definition,
                              residue_cocycle_value, residue_vanishes_by_order, specialization_obstruction,
                              specialize_residue)
from obstrukt.groups import sl2, subgroup_generated
from obstrukt.nielsen import apply_braid, solve_conjugation


@pytest.fixture(scope="module")
def case1(ext):
    G = ext.total
    g1, g3 = ext.lift_of_order("(1 2 3)", 3), ext.lift_of_order("(3 4 5)", 3)
    return (g1, G.inv(g1), g3, G.inv(g3))


@pytest.fixture(scope="module")
def case2(ext):
    G = ext.total
    g1, g2 = ext.lift_of_order("(1 2 3)", 3), ext.lift_of_order("(1 4 5)", 3)
    return (g1, g2, G.inv(g2), G.inv(g1))


def test_case1_conjugators(ext, case1):
    G = ext.total
    sols = solve_conjugation(G, case1, inertia_image(G, case1))
    assert len(sols) == 2
    assert {G.element_order(a) for a in sols} == {4}
    assert {ext.quotient.format(ext.project(a)) for a in sols} == {"(1 2)(4 5)"}


def test_case1_profile(ext, case1):
    prof = moduli_profile(ext.total, case1)
    assert prof.k_min == 1
    assert not residue_vanishes_by_order(prof.witnesses_k, ext)
    assert constant_field(prof) == 1


def test_case1_action_table(ext, case1):
    act = case1_action_on_a0(ext, case1)
    assert ext.total.element_order(act["a0"]) == 4
    assert act["table"] == {(eps, chi): eps for eps in (1, -1) for chi in (1, 5, 7, 11)}


def test_residue_cocycle_truth_table(ext, case1):
    G = ext.total
    a0 = case1_action_on_a0(ext, case1)["a0"]
    minus = next(c for c in ext.center if c != G.identity)
    for e, chi in itertools.product((1, -1), (1, 3)):
        c = residue_cocycle_value(ResidueDatum(a0, e, chi), ext)
        eta = 1 if chi == 1 else -1
        assert (c == minus) == (e * eta == -1)


def test_residue_cocycle_is_a_homomorphism(ext, case1):
    # on (eps, chi mod 4) with the group law (eps1 eps2, chi1 chi2) the values multiply
    G = ext.total
    a0 = case1_action_on_a0(ext, case1)["a0"]
    val = {(e, x): residue_cocycle_value(ResidueDatum(a0, e, x), ext)
           for e in (1, -1) for x in (1, 3)}
    for (e1, x1), (e2, x2) in itertools.product(val, repeat=2):
        assert val[(e1 * e2, x1 * x2 % 4)] == G.mul(val[(e1, x1)], val[(e2, x2)])


def test_residue_datum_errors(ext, case1):
    a0 = case1_action_on_a0(ext, case1)["a0"]
    with pytest.raises(ActionError):
        residue_cocycle_value(ResidueDatum(a0, 2, 1), ext)
    with pytest.raises(ActionError):
        residue_cocycle_value(ResidueDatum(a0, 1, 2), ext)
    with pytest.raises(ActionError):
        residue_vanishes_by_order((), ext)


def test_case1_residue_class():
    assert case1_residue_class(-1).is_trivial
    for d in (1, 2, 3, -2, -3, 5, -5, 6, -7):
        assert not case1_residue_class(d).is_trivial
    assert case1_residue_class(3).value == -3
    with pytest.raises(ActionError):
        case1_residue_class(4)


def test_cases_2_and_3(ext, census):
    G = ext.total
    seen = set()
    for t in census:
        case = case_of(G, t)
        seen.add(case)
        prof = moduli_profile(G, t)
        if case == 1:
            continue
        assert prof.k_min == {2: 5, 3: 3}[case]
        g5 = G.mul(t[0], t[1])
        allowed = subgroup_generated(G, [g5, *ext.center])
        for a in prof.witnesses_k:
            assert a in allowed
            assert ext.quotient.element_order(ext.project(a)) % 2 == 1
        assert residue_vanishes_by_order(prof.witnesses_k, ext)
        if case == 3:
            assert {chi % 6 for chi, _ in prof.chi_constraints} == {1}
            assert constant_field(prof) == -3
        else:
            assert constant_field(prof) == 5
    assert seen == {1, 2, 3}


def test_case2_reference_tuple(ext, case2):
    G = ext.total
    assert case_of(G, case2) == 2
    assert moduli_profile(G, case2).k_min == 5


def test_kappa():
    assert kappa(1, ((0, 1), (2, 3))) == {0: 0, 1: 1, 2: 2, 3: 3}
    assert kappa(-1, ((0, 1), (2, 3))) == {0: 2, 1: 3, 2: 0, 3: 1}
    with pytest.raises(ActionError):
        kappa(-1, ((0,), (1, 2)))


def test_real_normalized(ext, case2):
    G = ext.total
    dec = real_moduli_and_definition(G, case2, RealActionConfig(2))
    assert dec.moduli and dec.definition and dec.shape_test


def test_real_transported(ext, case2):
    G = ext.total
    dec = real_moduli_and_definition(G, case2, RealActionConfig(2), target=kappa_transport_image(G, case2))
    assert dec.moduli and not dec.definition
    assert len(dec.witnesses) == 2
    assert all(G.element_order(b) == 4 for b in dec.witnesses)


def test_real_shape_agrees_on_census(ext, census):
    G = ext.total
    letters = [(i, e) for i in (1, 2, 3) for e in (1, -1)]
    for t in census:
        for w in itertools.chain([()], ((x,) for x in letters)):
            u = apply_braid(G, w, t)
            for s in (0, 1, 2):
                dec = real_moduli_and_definition(G, u, RealActionConfig(s))
                assert dec.shape_test == dec.definition
                assert not dec.definition or dec.moduli


def test_real_conjugation_image_is_nielsen(ext, census):
    G = ext.total
    for t in census:
        for s in (0, 1, 2):
            u = real_conjugation_image(G, t, RealActionConfig(s))
            assert G.mul(*u) == G.identity
    with pytest.raises(ActionError):
        real_conjugation_image(G, census[0], RealActionConfig(3))


@pytest.mark.parametrize("ell", [11, 13])
def test_normalizer_chain(ell):
    ch = normalizer_chain(sl2(ell))
    assert ch.n == 3
    assert ch.nbar_type == "dihedral(6)"
    assert ch.n_over_h_type == "quaternion8"
    assert ch.obstruction == brauer.class_over_Q([(-1, -1)])


def test_specialization_table_d1():
    for p in primerange(7, 100):
        res = specialization_obstruction(1, p)
        assert res.nontrivial == (p % 4 == 3)
        assert res.nontrivial == (res.residue == -1)
        row = res.csv_row()
        assert set(row) == {"d", "p", "residue", "obstruction", "agrees_with_standard_convention",
                            "opposite_convention_branch"}
        assert row["agrees_with_standard_convention"]
        assert row["opposite_convention_branch"] == -row["obstruction"]


@pytest.mark.parametrize("d", [1, 2, 3, -2, 5, 6, 7, -1])
def test_specialization_matches_legendre(d):
    for p in primerange(7, 60):
        if d % p == 0:
            continue
        res = specialization_obstruction(d, p)
        assert res.nontrivial == (brauer.legendre(-d, p) == -1)


def test_specialization_errors():
    with pytest.raises(ActionError):
        specialization_obstruction(1, 5)
    with pytest.raises(ActionError):
        specialization_obstruction(7, 7)
    with pytest.raises(ActionError):
        specialize_residue(case1_residue_class(1), 1, 9)
