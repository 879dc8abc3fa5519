"""Ordered trees, free-group words and compatibility of endomorphisms with a tree.

The group ``<g1..gr | g1...gr = 1>`` is modelled by the free group on
``g1..g(r-1)``; ``gr`` is rewritten as ``(g1...g(r-1))^-1`` on input.  A word
is a tuple of nonzero ints, ``i`` for ``g_i`` and ``-i`` for its inverse,
always freely reduced.
"""

from __future__ import annotations

import itertools
import json
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

Word = tuple[int, ...]


class TreeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# words


def reduce_word(letters: Iterable[int]) -> Word:
    out: list[int] = []
    for x in letters:
        if x == 0:
            raise TreeError("letter 0 is not allowed")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def inverse(w: Word) -> Word:
    return tuple(-x for x in reversed(w))


def mul(*ws: Word) -> Word:
    return reduce_word(itertools.chain.from_iterable(ws))


def power(w: Word, k: int) -> Word:
    if k < 0:
        w, k = inverse(w), -k
    return reduce_word(w * k)


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """(p, c) with w = p c p^-1 and c cyclically reduced."""
    w = reduce_word(w)
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return w[:i], w[i:j + 1]


def primitive_root(c: Word) -> Word:
    """Shortest u with c = u^k, for c cyclically reduced."""
    n = len(c)
    for d in range(1, n + 1):
        if n % d == 0 and c[:d] * (n // d) == c:
            return c[:d]
    return c


def conjugator(u: Word, w: Word) -> Word | None:
    """Some x with u = x w x^-1, or None when u and w are not conjugate."""
    p, c = cyclic_reduce(u)
    q, d = cyclic_reduce(w)
    if len(c) != len(d):
        return None
    if not c:
        return ()
    for k in range(len(d)):
        if d[k:] + d[:k] == c:
            # c = d1^-1 d d1 with d1 = d[:k]
            return mul(p, inverse(d[:k]), inverse(q))
    return None


def centralizer_generator(w: Word) -> Word:
    q, d = cyclic_reduce(w)
    return mul(q, primitive_root(d), inverse(q))


class FreeGroup:
    """Bookkeeping for the rank r-1 free group with named generators g1..gr."""

    def __init__(self, r: int):
        if r < 1:
            raise TreeError("need at least one generator")
        self.r = r

    def gen(self, i: int) -> Word:
        if not 1 <= i <= self.r:
            raise TreeError(f"generator g{i} out of range 1..{self.r}")
        if i == self.r:
            return inverse(tuple(range(1, self.r)))
        return (i,)

    def letter(self, x: int) -> Word:
        return self.gen(x) if x > 0 else inverse(self.gen(-x))

    def word(self, letters: Iterable[int]) -> Word:
        """Normalize letters that may mention g_r."""
        return mul(*(self.letter(x) for x in letters))

    def parse(self, text: str) -> Word:
        letters = []
        for tok in text.replace("*", " ").split():
            m = re.fullmatch(r"g(\d+)(?:\^(-?\d+))?", tok)
            if not m:
                raise TreeError(f"bad word token {tok!r}")
            i, e = int(m.group(1)), int(m.group(2) or 1)
            letters.append(power(self.gen(i), e))
        return mul(*letters)

    def format(self, w: Word) -> str:
        if not w:
            return "1"
        parts = []
        for x, grp in itertools.groupby(w):
            k = len(list(grp))
            e = k if x > 0 else -k
            parts.append(f"g{abs(x)}" + ("" if e == 1 else f"^{e}"))
        return " ".join(parts)


# ---------------------------------------------------------------------------
# Stallings graphs


class SubgroupGraph:
    """Folded core graph of the subgroup generated by ``generators``; vertex 0 is the base."""

    def __init__(self, generators: Iterable[Word]):
        self._parent: list[int] = [0]
        self.out: list[dict[int, int]] = [{}]
        pending: list[tuple[int, int, int]] = []
        for g in generators:
            g = reduce_word(g)
            if not g:
                continue
            prev = 0
            for k, x in enumerate(g):
                if k == len(g) - 1:
                    nxt = 0
                else:
                    nxt = self._new_vertex()
                pending.append((prev, x, nxt))
                prev = nxt
        self._fold(pending)

    def _new_vertex(self) -> int:
        self._parent.append(len(self._parent))
        self.out.append({})
        return len(self._parent) - 1

    def _find(self, v: int) -> int:
        while self._parent[v] != v:
            self._parent[v] = self._parent[self._parent[v]]
            v = self._parent[v]
        return v

    def _fold(self, pending):
        stack = []
        for u, x, v in pending:
            stack.append((u, x, v))
            stack.append((v, -x, u))
        while stack:
            u, x, v = stack.pop()
            u, v = self._find(u), self._find(v)
            w = self.out[u].get(x)
            if w is None:
                self.out[u][x] = v
                continue
            w = self._find(w)
            if w == v:
                continue
            keep, gone = min(v, w), max(v, w)
            self._parent[gone] = keep
            stack.extend((keep, y, z) for y, z in self.out[gone].items())
            self.out[gone] = {}

    def contains(self, w: Word) -> bool:
        v = self._find(0)
        for x in reduce_word(w):
            nxt = self.out[v].get(x)
            if nxt is None:
                return False
            v = self._find(nxt)
        return v == self._find(0)

    def is_folded(self) -> bool:
        for v in range(len(self.out)):
            if self._find(v) != v:
                continue
            targets = {}
            for x, w in self.out[v].items():
                w = self._find(w)
                if targets.setdefault(x, w) != w:
                    return False
        return True


def membership(w: Word, generators: Sequence[Word]) -> bool:
    return SubgroupGraph(generators).contains(w)


def membership_by_enumeration(w: Word, generators: Sequence[Word], max_length: int = 8) -> bool:
    """Search the subgroup elements of reduced length <= max_length.

    Elements are reached by multiplying by generators and inverses without
    ever leaving the ball; a one-sided check (True is always right).
    """
    w = reduce_word(w)
    letters = {reduce_word(g) for g in generators} | {inverse(reduce_word(g)) for g in generators}
    letters.discard(())
    seen = {()}
    frontier = [()]
    while frontier and w not in seen:
        nxt = []
        for x in frontier:
            for g in letters:
                y = mul(x, g)
                if len(y) <= max_length and y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return w in seen


# ---------------------------------------------------------------------------
# ordered trees


@dataclass(frozen=True)
class OrderedTree:
    root: Hashable
    children: Mapping[Hashable, tuple]
    leaves: Mapping[int, Hashable]  # leaf numbering i -> vertex

    @property
    def r(self) -> int:
        return len(self.leaves)

    @property
    def vertices(self) -> list:
        out, queue = [], deque([self.root])
        while queue:
            v = queue.popleft()
            out.append(v)
            queue.extend(self.children.get(v, ()))
        return out

    def parent(self, v):
        for u, kids in self.children.items():
            if v in kids:
                return u
        return None

    def path(self, v) -> list:
        """Vertices from the root to v (root excluded)."""
        out = []
        while v != self.root:
            out.append(v)
            v = self.parent(v)
            if v is None:
                raise TreeError("vertex not connected to the root")
        return out[::-1]

    def depth(self, v) -> int:
        return len(self.path(v))

    def leaf_indices(self, v) -> frozenset:
        index = {leaf: i for i, leaf in self.leaves.items()}
        out, stack = set(), [v]
        while stack:
            x = stack.pop()
            if x in index:
                out.add(index[x])
            stack.extend(self.children.get(x, ()))
        return frozenset(out)

    def successors(self, v) -> list:
        """A_v, ordered by the leaf numbering."""
        return sorted(self.children.get(v, ()), key=lambda c: min(self.leaf_indices(c), default=0))

    def check(self):
        seen = self.vertices
        if len(seen) != len(set(seen)):
            raise TreeError("not a tree: vertex reached twice")
        named = set(self.children) | {c for kids in self.children.values() for c in kids}
        if named - set(seen):
            raise TreeError("disconnected vertices")
        leaves = {v for v in seen if not self.children.get(v) and v != self.root}
        if set(self.leaves.values()) != leaves or sorted(self.leaves) != list(range(1, self.r + 1)):
            raise TreeError("leaf numbering must be a bijection {1..r} -> leaves")

    @classmethod
    def from_json(cls, data: dict) -> "OrderedTree":
        children = {str(k): tuple(str(c) for c in v) for k, v in data["children"].items()}
        kids = {c for v in children.values() for c in v}
        roots = [v for v in children if v not in kids]
        root = str(data["root"]) if "root" in data else (roots[0] if len(roots) == 1 else None)
        if root is None:
            raise TreeError("cannot determine the root")
        leaves = {int(i): str(v) for i, v in data["leaves"].items()}
        tree = cls(root, children, leaves)
        tree.check()
        return tree


def star_tree(r: int) -> OrderedTree:
    return OrderedTree(0, {0: tuple(range(1, r + 1))}, {i: i for i in range(1, r + 1)})


def two_block_tree() -> OrderedTree:
    """Root 0 with children 5 (leaves 1, 2) and 6 (leaves 3, 4)."""
    return OrderedTree(0, {0: (5, 6), 5: (1, 2), 6: (3, 4)}, {i: i for i in range(1, 5)})


def validate_order(tree: OrderedTree) -> bool:
    """Every I_v is an interval of consecutive indices."""
    tree.check()
    for v in tree.vertices:
        idx = tree.leaf_indices(v)
        if idx and max(idx) - min(idx) + 1 != len(idx):
            return False
    return True


def gamma_v(F: FreeGroup, tree: OrderedTree, v) -> Word:
    return mul(*(F.gen(i) for i in sorted(tree.leaf_indices(v))))


def pi_v_generators(F: FreeGroup, tree: OrderedTree, v) -> list[Word]:
    return [gamma_v(F, tree, c) for c in tree.successors(v)]


# ---------------------------------------------------------------------------
# endomorphisms and compatibility


@dataclass(frozen=True)
class TreeEndo:
    """Images of g1..gr; optional claimed leaf permutation and exponent."""

    F: FreeGroup
    images: Mapping[int, Word]
    kappa: Mapping[int, int] | None = None
    chi: int | None = None

    def __post_init__(self):
        if sorted(self.images) != list(range(1, self.F.r + 1)):
            raise TreeError("images must be given for g1..gr")
        if mul(*(self.images[i] for i in range(1, self.F.r + 1))):
            raise TreeError("images violate the product-one relation")
        if self.chi == 0:
            raise TreeError("chi must be nonzero")

    def apply(self, w: Word) -> Word:
        return mul(*(self.images[x] if x > 0 else inverse(self.images[-x]) for x in w))

    def compose(self, other: "TreeEndo") -> "TreeEndo":
        """self o other."""
        return TreeEndo(self.F, {i: self.apply(other.images[i]) for i in self.images})

    @classmethod
    def identity(cls, F: FreeGroup) -> "TreeEndo":
        return cls(F, {i: F.gen(i) for i in range(1, F.r + 1)})

    @classmethod
    def from_strings(cls, F: FreeGroup, images: Mapping) -> "TreeEndo":
        return cls(F, {int(i): F.parse(s) for i, s in images.items()})


def braid_endo(F: FreeGroup, word: Sequence[tuple[int, int]]) -> TreeEndo:
    """Q_i: (.., g_i, g_i+1, ..) -> (.., g_i g_i+1 g_i^-1, g_i, ..), letters applied left to right."""
    images = {i: F.gen(i) for i in range(1, F.r + 1)}
    for i, e in word:
        a, b = images[i], images[i + 1]
        if e == 1:
            images[i], images[i + 1] = mul(a, b, inverse(a)), a
        elif e == -1:
            images[i], images[i + 1] = b, mul(inverse(b), a, b)
        else:
            raise TreeError("braid exponents must be +-1")
    return TreeEndo(F, images)


def inner_endo(F: FreeGroup, x: Word) -> TreeEndo:
    return TreeEndo(F, {i: mul(x, F.gen(i), inverse(x)) for i in range(1, F.r + 1)})


def reversal_endo(F: FreeGroup) -> TreeEndo:
    """g_i -> g_(r+1-i)^-1, the shape of complex conjugation."""
    return TreeEndo(F, {i: inverse(F.gen(F.r + 1 - i)) for i in range(1, F.r + 1)})


@dataclass
class Compatibility:
    status: str  # 'compatible', 'incompatible', 'undecided'
    kappa: dict = field(default_factory=dict)  # leaf index -> leaf index
    chi: int | None = None
    alpha: dict = field(default_factory=dict)
    beta: dict = field(default_factory=dict)
    reason: str = ""

    @property
    def compatible(self) -> bool:
        return self.status == "compatible"


def _leaf_candidates(F: FreeGroup, tau: TreeEndo, i: int) -> set[tuple[int, int]]:
    _, c = cyclic_reduce(tau.images[i])
    out = set()
    for j in range(1, F.r + 1):
        _, d = cyclic_reduce(F.gen(j))
        if not d or len(c) % len(d):
            continue
        k = len(c) // len(d)
        for chi in (k, -k):
            if chi and conjugator(tau.images[i], power(F.gen(j), chi)) is not None:
                out.add((j, chi))
    return out


def _vertex_map(tree: OrderedTree, perm: Mapping[int, int]) -> dict | None:
    """Extend a leaf permutation to a root-fixing tree automorphism, if possible."""
    by_key = {}
    for v in tree.vertices:
        by_key.setdefault((tree.leaf_indices(v), tree.depth(v)), []).append(v)
    vmap = {}
    for v in tree.vertices:
        img = frozenset(perm[i] for i in tree.leaf_indices(v))
        targets = by_key.get((img, tree.depth(v)), [])
        if len(targets) != 1:
            return None
        vmap[v] = targets[0]
    for v in tree.vertices:
        if v != tree.root and vmap[tree.parent(v)] != tree.parent(vmap[v]):
            return None
    return vmap


def _windows(bound: int):
    yield 0
    for j in range(1, bound + 1):
        yield j
        yield -j


def is_compatible(tree: OrderedTree, tau: TreeEndo, window: int | None = None) -> Compatibility:
    """Search for kappa, chi and witnesses alpha_v in Pi_pre(v) with
    tau(gamma_v) = beta_k(v) gamma_k(v)^chi beta_k(v)^-1.
    """
    F = tau.F
    if tree.r != F.r:
        raise TreeError("tree and endomorphism have different numbers of leaves")
    if not validate_order(tree):
        raise TreeError("leaf numbering is not an order on the tree")
    if window is None:
        window = max(len(w) for w in tau.images.values()) + 2

    cands = {i: _leaf_candidates(F, tau, i) for i in range(1, F.r + 1)}
    chis = set.intersection(*({chi for _, chi in c} for c in cands.values()))
    if tau.chi is not None:
        chis &= {tau.chi}
    if not chis:
        return Compatibility("incompatible", reason="no common exponent chi on the leaves")

    undecided = False
    graphs: dict = {}
    for chi in sorted(chis, key=lambda c: (abs(c), -c)):
        options = [sorted(j for j, c in cands[i] if c == chi) for i in range(1, F.r + 1)]
        for images in itertools.product(*options):
            if len(set(images)) != F.r:
                continue
            perm = dict(zip(range(1, F.r + 1), images))
            if tau.kappa is not None and dict(tau.kappa) != perm:
                continue
            vmap = _vertex_map(tree, perm)
            if vmap is None:
                continue
            res = _solve_witnesses(F, tree, tau, vmap, chi, window, graphs)
            if res is None:
                continue  # some conjugacy fails: definitive for this kappa
            if res is False:
                undecided = True
                continue
            alpha, beta = res
            return Compatibility("compatible", perm, chi, alpha, beta)
    if undecided:
        return Compatibility("undecided", reason=f"no witnesses within window {window}")
    return Compatibility("incompatible", reason="no tree automorphism satisfies the conjugacy conditions")


def _solve_witnesses(F, tree, tau, vmap, chi, window, graphs):
    """None if a conjugacy condition fails, False if the window is exhausted, else (alpha, beta)."""
    inv_map = {w: v for v, w in vmap.items()}
    order = [w for w in tree.vertices if w != tree.root]
    base = {}
    for w in order:
        u = tau.apply(gamma_v(F, tree, inv_map[w]))
        target = power(gamma_v(F, tree, w), chi)
        x0 = conjugator(u, target)
        if x0 is None:
            return None
        base[w] = (x0, centralizer_generator(target))

    def graph(v):
        if v not in graphs:
            graphs[v] = SubgroupGraph(pi_v_generators(F, tree, v))
        return graphs[v]

    alpha, beta = {}, {tree.root: ()}

    def search(k):
        if k == len(order):
            return True
        w = order[k]
        pre = tree.parent(w)
        x0, z = base[w]
        for j in _windows(window):
            x = mul(x0, power(z, j))
            a = mul(inverse(beta[pre]), x)
            if graph(pre).contains(a):
                alpha[w], beta[w] = a, x
                if search(k + 1):
                    return True
        return False

    if not search(0):
        return False
    del beta[tree.root]
    return alpha, beta


def verify_compatibility(tree: OrderedTree, tau: TreeEndo, res: Compatibility) -> bool:
    """Plug witnesses back in: rebuild beta from alpha along paths and compare words."""
    F = tau.F
    if not res.compatible:
        return False
    vmap = _vertex_map(tree, res.kappa)
    if vmap is None:
        return False
    for v in tree.vertices:
        if v == tree.root:
            continue
        w = vmap[v]
        b = mul(*(res.alpha[x] for x in tree.path(w)))
        lhs = tau.apply(gamma_v(F, tree, v))
        rhs = mul(b, power(gamma_v(F, tree, w), res.chi), inverse(b))
        if lhs != rhs:
            return False
        if not membership(res.alpha[w], pi_v_generators(F, tree, tree.parent(w))):
            return False
    return True


# ---------------------------------------------------------------------------
# JSON


def load_tree_check(data: dict | str) -> tuple[OrderedTree, TreeEndo]:
    """{children: {v: [..]}, leaves: {i: v}, images: {i: "g1 g2 g1^-1"}}"""
    if isinstance(data, str):
        data = json.loads(data)
    tree = OrderedTree.from_json(data)
    F = FreeGroup(tree.r)
    tau = TreeEndo.from_strings(F, data["images"])
    if "kappa" in data or "chi" in data:
        tau = TreeEndo(F, tau.images,
                       {int(k): int(v) for k, v in data["kappa"].items()} if "kappa" in data else None,
                       data.get("chi"))
    return tree, tau


def compatibility_json(F: FreeGroup, res: Compatibility) -> dict:
    return {
        "status": res.status,
        "compatible": res.compatible,
        "kappa": {str(k): v for k, v in sorted(res.kappa.items())},
        "chi": res.chi,
        "alpha": {str(k): F.format(w) for k, w in res.alpha.items()},
        "reason": res.reason,
    }
