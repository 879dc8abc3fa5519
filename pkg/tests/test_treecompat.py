import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from obstrukt.nielsen import Q0
from obstrukt.treecompat import (FreeGroup, OrderedTree, SubgroupGraph, TreeEndo, TreeError,
                                 braid_endo, centralizer_generator, conjugator, cyclic_reduce,
                                 gamma_v, inner_endo, inverse, is_compatible, load_tree_check,
                                 membership, membership_by_enumeration, mul, power, reduce_word,
                                 reversal_endo, star_tree, two_block_tree, validate_order,
                                 verify_compatibility)

letters = st.sampled_from([1, -1, 2, -2, 3, -3])
words = st.lists(letters, max_size=10).map(reduce_word)


def test_reduction_and_parsing():
    F = FreeGroup(5)
    assert reduce_word([1, 2, -2, -1, 3]) == (3,)
    assert F.parse("g1 g2 g1^-1") == (1, 2, -1)
    assert F.gen(5) == (-4, -3, -2, -1)
    assert mul(F.gen(1), F.gen(2), F.gen(3), F.gen(4), F.gen(5)) == ()
    assert F.parse("g5^-1") == (1, 2, 3, 4)
    assert F.format((1, 1, -2)) == "g1^2 g2^-1"
    assert F.format(()) == "1"
    with pytest.raises(TreeError):
        F.parse("h1")
    with pytest.raises(TreeError):
        F.gen(6)


@given(words, words)
def test_group_laws(u, w):
    assert mul(u, inverse(u)) == ()
    assert inverse(mul(u, w)) == mul(inverse(w), inverse(u))
    p, c = cyclic_reduce(u)
    assert mul(p, c, inverse(p)) == u
    assert not c or c[0] != -c[-1] or len(c) == 1


@settings(max_examples=200)
@given(words, words)
def test_conjugator_solves(u, x):
    w = mul(x, u, inverse(x))
    y = conjugator(w, u)
    assert y is not None and mul(y, u, inverse(y)) == w
    z = centralizer_generator(u)
    assert mul(z, u) == mul(u, z)


def test_conjugator_negative():
    assert conjugator((1,), (2,)) is None
    assert conjugator((1, 2), (2, 1)) is not None
    assert conjugator((1, 1), (1,)) is None


def test_gamma_v():
    F = FreeGroup(4)
    T = two_block_tree()
    assert gamma_v(F, T, 0) == ()
    assert gamma_v(F, T, 5) == (1, 2)
    assert gamma_v(F, T, 6) == inverse((1, 2))  # g3 g4 = (g1 g2)^-1
    S = star_tree(4)
    for i in range(1, 5):
        assert gamma_v(F, S, i) == F.gen(i)


def _random_tree(rng, r):
    """Random ordered tree with leaves numbered left to right."""
    counter = [r]
    nodes = list(range(1, r + 1))
    children = {}
    while len(nodes) > 1:
        k = rng.randint(2, min(3, len(nodes)))
        start = rng.randrange(len(nodes) - k + 1)
        counter[0] += 1
        v = counter[0]
        children[v] = tuple(nodes[start:start + k])
        nodes[start:start + k] = [v]
    root = nodes[0]
    if root <= r:  # single leaf: add a root above it
        children[0] = (root,)
        root = 0
    return OrderedTree(root, children, {i: i for i in range(1, r + 1)})


@pytest.mark.parametrize("seed", range(20))
def test_gamma_v_is_product_over_children(seed):
    rng = random.Random(seed)
    r = rng.randint(2, 8)
    T = _random_tree(rng, r)
    F = FreeGroup(r)
    assert validate_order(T)
    for v in T.vertices:
        kids = T.successors(v)
        if kids:
            assert gamma_v(F, T, v) == mul(*(gamma_v(F, T, c) for c in kids))
    assert gamma_v(F, T, T.root) == ()


def test_validate_order():
    assert validate_order(two_block_tree())
    bad = OrderedTree(0, {0: (5, 6), 5: (1, 3), 6: (2, 4)}, {i: i for i in range(1, 5)})
    assert not validate_order(bad)
    single = OrderedTree(0, {0: (1,)}, {1: 1})
    assert validate_order(single)
    with pytest.raises(TreeError):
        OrderedTree(0, {0: (1, 2)}, {1: 1}).check()


def test_membership_examples():
    F = FreeGroup(5)
    g1, g2, g3 = F.gen(1), F.gen(2), F.gen(3)
    assert membership(mul(g1, g2), [g1, g2])
    assert not membership(g3, [g1, g2])
    w = mul(g1, g2, inverse(g1))
    assert not membership(w, [mul(g1, g2)])
    assert membership(w, [g1, g2])
    assert membership((), [])
    assert not membership((1,), [])


@settings(max_examples=150, deadline=None)
@given(st.lists(st.lists(letters, min_size=1, max_size=3).map(reduce_word), min_size=1, max_size=3),
       st.lists(letters, max_size=6).map(reduce_word))
def test_membership_vs_enumeration(gens, w):
    graph = SubgroupGraph(gens)
    assert graph.is_folded()
    # the bounded search can only confirm membership
    if membership_by_enumeration(w, gens):
        assert graph.contains(w)
    # products of generators are always members
    prod = mul(*gens, *(inverse(g) for g in gens[:1]))
    assert graph.contains(prod)


def test_membership_agrees_on_seeded_instances():
    from obstrukt.reproduce import random_membership_instances
    inst = random_membership_instances(100, seed=7)
    assert all(membership(w, g) == membership_by_enumeration(w, g) for w, g in inst)


def test_identity_compatible_everywhere():
    for r in (2, 3, 5):
        F = FreeGroup(r)
        res = is_compatible(star_tree(r), TreeEndo.identity(F))
        assert res.compatible and res.chi == 1
        assert res.kappa == {i: i for i in range(1, r + 1)}
        assert all(w == () for w in res.alpha.values())
    F = FreeGroup(4)
    res = is_compatible(two_block_tree(), TreeEndo.identity(F))
    assert res.compatible and all(w == () for w in res.alpha.values())


def test_q0_endo_on_two_block_tree():
    F = FreeGroup(4)
    tau = braid_endo(F, Q0)
    expected = {1: "g1 g2 g1^-1", 2: "g1", 3: "g3 g4 g3^-1", 4: "g3"}
    assert tau.images == {i: F.parse(w) for i, w in expected.items()}
    T = two_block_tree()
    res = is_compatible(T, tau)
    assert res.compatible
    assert res.kappa == {1: 2, 2: 1, 3: 4, 4: 3} and res.chi == 1
    assert res.alpha[2] == (1,)
    assert verify_compatibility(T, tau, res)


@pytest.mark.parametrize("seed", range(15))
def test_star_branch_cycle_endos(seed):
    rng = random.Random(seed)
    r = rng.randint(3, 5)
    F = FreeGroup(r)
    word = [(rng.randint(1, r - 1), rng.choice([1, -1])) for _ in range(rng.randint(0, 4))]
    x = reduce_word(rng.choice([1, -1, 2, -2]) for _ in range(rng.randint(0, 3)))
    tau = inner_endo(F, x).compose(braid_endo(F, word))
    if rng.random() < 0.5:
        tau = reversal_endo(F).compose(tau)
    S = star_tree(r)
    res = is_compatible(S, tau)
    assert res.compatible, res.reason
    assert verify_compatibility(S, tau, res)


@pytest.mark.parametrize("seed", range(10))
def test_composition_closure(seed):
    rng = random.Random(100 + seed)
    F = FreeGroup(4)
    T = two_block_tree()
    # Q1, Q3, the block swap Q2 Q1 Q3 Q2, conjugation by gamma_5 or gamma_6, reversal
    gens = [braid_endo(F, [(1, 1)]), braid_endo(F, [(3, 1)]),
            braid_endo(F, [(2, 1), (1, 1), (3, 1), (2, 1)]),
            inner_endo(F, (1, 2)), inner_endo(F, gamma_v(F, T, 6)), reversal_endo(F)]
    t1, t2 = rng.choice(gens), rng.choice(gens)
    r1, r2 = is_compatible(T, t1), is_compatible(T, t2)
    assert r1.compatible and r2.compatible
    comp = t1.compose(t2)
    r = is_compatible(T, comp)
    assert r.compatible and verify_compatibility(T, comp, r)
    assert r.chi == r1.chi * r2.chi
    assert r.kappa == {i: r1.kappa[r2.kappa[i]] for i in r2.kappa}


def test_incompatible_and_undecided():
    F = FreeGroup(4)
    T = two_block_tree()
    res = is_compatible(T, braid_endo(F, [(2, 1)]))
    assert res.status == "incompatible"
    # conjugating by g1 would need beta_5 = g1 gamma_5^j inside <gamma_5>; never accepted
    assert is_compatible(T, inner_endo(F, (1,))).status == "undecided"
    # a window of zero cannot find a nontrivial witness, which is reported, not denied
    tau = braid_endo(F, Q0)
    assert is_compatible(T, tau, window=0).status in ("compatible", "undecided")


def test_endo_validation():
    F = FreeGroup(3)
    with pytest.raises(TreeError):
        TreeEndo(F, {1: (1,), 2: (1,), 3: (2,)})
    with pytest.raises(TreeError):
        TreeEndo(F, {1: (1,), 2: (2,)})


def test_json_loader(tmp_path):
    data = {"children": {"0": ["5", "6"], "5": ["1", "2"], "6": ["3", "4"]},
            "leaves": {"1": "1", "2": "2", "3": "3", "4": "4"},
            "images": {"1": "g1 g2 g1^-1", "2": "g1", "3": "g3 g4 g3^-1", "4": "g3"}}
    tree, endo = load_tree_check(json.dumps(data))
    assert tree.root == "0" and tree.r == 4
    res = is_compatible(tree, endo)
    assert res.compatible and res.kappa == {1: 2, 2: 1, 3: 4, 4: 3}
    assert res.alpha["2"] == (1,)
