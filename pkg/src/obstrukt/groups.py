"""Exact finite groups given by full multiplication tables.

Every group here is small enough (at most a few thousand elements) that we
simply store the Cayley table.  Elements are plain integers indexing the
group's element list; that list is sorted by the canonical integer encoding
of the payload (permutation images, row-major matrix entries or table index),
so comparing indices *is* the serialization order used for canonical forms.
"""

from __future__ import annotations

import itertools
import math
import string
from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

MAX_ORDER = 5000


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class ConjugacyClass:
    label: str
    representative: int
    members: frozenset
    order: int

    def __len__(self):
        return len(self.members)

    def __contains__(self, g):
        return g in self.members


class Group:
    """A finite group with elements ``0..N-1`` and a Cayley table.

    ``kind`` is one of ``symmetric``, ``alternating``, ``sl2`` or ``table``;
    ``payloads[i]`` is the concrete object behind element ``i``.
    """

    def __init__(self, name: str, kind: str, payloads: Sequence, table: np.ndarray,
                 param: int | None = None, names: Sequence[str] | None = None):
        n = len(payloads)
        if n > MAX_ORDER:
            raise GroupError(f"group {name} has {n} > {MAX_ORDER} elements")
        if table.shape != (n, n):
            raise GroupError("table shape does not match element count")
        self.name = name
        self.kind = kind
        self.param = param
        self.payloads = tuple(payloads)
        self.table = np.ascontiguousarray(table, dtype=np.int32)
        self.table.flags.writeable = False
        self._names = tuple(names) if names is not None else None
        self._index = {p: i for i, p in enumerate(self.payloads)}

    def __repr__(self):
        return f"Group({self.name!r}, order={self.order})"

    def __len__(self):
        return len(self.payloads)

    # ---- arithmetic -----------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.payloads)

    @cached_property
    def identity(self) -> int:
        diag = np.nonzero((self.table == np.arange(self.order)[None, :]).all(axis=1))[0]
        if len(diag) != 1:
            raise GroupError("no unique identity in table")
        return int(diag[0])

    @cached_property
    def inverses(self) -> np.ndarray:
        inv = np.argmax(self.table == self.identity, axis=1).astype(np.int32)
        inv.flags.writeable = False
        return inv

    def mul(self, *elts: int) -> int:
        out = self.identity
        for g in elts:
            out = int(self.table[out, g])
        return out

    def inv(self, g: int) -> int:
        return int(self.inverses[g])

    def power(self, g: int, k: int) -> int:
        if k < 0:
            g, k = self.inv(g), -k
        out, base = self.identity, g
        while k:
            if k & 1:
                out = int(self.table[out, base])
            base = int(self.table[base, base])
            k >>= 1
        return out

    def conj(self, x: int, g: int) -> int:
        """x g x^-1"""
        return int(self.table[self.table[x, g], self.inverses[x]])

    def conjugates_of(self, g: int) -> np.ndarray:
        """Array whose entry x is x g x^-1."""
        return self.table[self.table[:, g], self.inverses]

    @cached_property
    def element_orders(self) -> np.ndarray:
        orders = np.zeros(self.order, dtype=np.int64)
        e = self.identity
        for g in range(self.order):
            k, x = 1, g
            while x != e:
                x = int(self.table[x, g])
                k += 1
            orders[g] = k
        orders.flags.writeable = False
        return orders

    def element_order(self, g: int) -> int:
        return int(self.element_orders[g])

    # ---- elements ---------------------------------------------------------

    def element(self, payload) -> int:
        if isinstance(payload, str):
            payload = self.parse(payload)
        try:
            return self._index[payload]
        except KeyError:
            raise GroupError(f"{payload!r} is not an element of {self.name}") from None

    def payload(self, g: int):
        return self.payloads[g]

    def format(self, g: int) -> str:
        p = self.payloads[g]
        if self.kind in ("symmetric", "alternating"):
            return cycle_notation(p)
        if self.kind == "sl2":
            a, b, c, d = p
            return f"[[{a},{b}],[{c},{d}]] mod {self.param}"
        if self._names is not None:
            return self._names[g]
        return f"e{g}"

    def parse(self, text: str):
        if self.kind in ("symmetric", "alternating"):
            return parse_cycles(text, self.param)
        raise GroupError(f"cannot parse elements of {self.kind} groups")

    # ---- conjugacy classes ------------------------------------------------

    @cached_property
    def conjugacy_classes(self) -> tuple[ConjugacyClass, ...]:
        seen = np.zeros(self.order, dtype=bool)
        raw = []
        for g in range(self.order):
            if seen[g]:
                continue
            members = np.unique(self.conjugates_of(g))
            seen[members] = True
            raw.append((int(members[0]), frozenset(int(m) for m in members)))
        return tuple(self._label_classes(raw))

    def _label_classes(self, raw):
        by_order: dict[int, list] = {}
        for rep, members in raw:
            by_order.setdefault(self.element_order(rep), []).append((rep, members))
        preferred = self._preferred_class_reps()
        out = []
        for order in sorted(by_order):
            group = sorted(by_order[order])
            if order in preferred:
                pref = preferred[order]
                group.sort(key=lambda rm: (pref not in rm[1], rm[0]))
            for letter, (rep, members) in zip(_letters(), group):
                out.append(ConjugacyClass(f"{order}{letter}", rep, members, order))
        return out

    def _preferred_class_reps(self) -> dict[int, int]:
        # sl2: lA contains [[1,1],[0,1]], (2l)A contains its negative
        if self.kind != "sl2":
            return {}
        ell = self.param
        u = self.element((1, 1, 0, 1))
        minus_u = self.element((ell - 1, ell - 1, 0, ell - 1))
        return {ell: u, 2 * ell: minus_u}

    def class_of(self, g: int) -> ConjugacyClass:
        for cls in self.conjugacy_classes:
            if g in cls.members:
                return cls
        raise GroupError(f"{g} not in {self.name}")

    def class_by_label(self, label: str) -> ConjugacyClass:
        if self.kind == "sl2" and label == "4A" and self.param % 8 in (1, 7):
            raise GroupError(
                f"4A is not a well-defined label in SL2({self.param}): "
                f"{self.param} = ±1 mod 8")
        for cls in self.conjugacy_classes:
            if cls.label == label:
                return cls
        known = ", ".join(c.label for c in self.conjugacy_classes)
        raise GroupError(f"unknown class {label!r} in {self.name}; known: {known}")


def _letters():
    for n in itertools.count(1):
        for combo in itertools.product(string.ascii_uppercase, repeat=n):
            yield "".join(combo)


# ---------------------------------------------------------------------------
# construction


def _table_from_codes(codes: np.ndarray, product_rows: Callable[[int], np.ndarray]) -> np.ndarray:
    """codes: sorted int64 encodings; product_rows(i) -> codes of e_i * e_j for all j."""
    n = len(codes)
    table = np.empty((n, n), dtype=np.int32)
    for i in range(n):
        row = product_rows(i)
        idx = np.searchsorted(codes, row)
        if np.any(idx >= n) or np.any(codes[np.minimum(idx, n - 1)] != row):
            raise GroupError("set of elements is not closed under multiplication")
        table[i] = idx
    return table


def _perm_group(name, kind, n, perms):
    perms = sorted(perms)
    arr = np.array(perms, dtype=np.int64) - 1  # 0-based images
    weights = n ** np.arange(n - 1, -1, -1, dtype=np.int64)
    codes = arr @ weights

    def rows(i):
        # (p*q)(x) = p(q(x))
        return arr[i][arr] @ weights

    return Group(name, kind, perms, _table_from_codes(codes, rows), param=n)


def symmetric(n: int) -> Group:
    if math.factorial(n) > MAX_ORDER:
        raise GroupError(f"S{n} exceeds the size guard")
    perms = list(itertools.permutations(range(1, n + 1)))
    return _perm_group(f"S{n}", "symmetric", n, perms)


def alternating(n: int) -> Group:
    if math.factorial(n) // 2 > MAX_ORDER:
        raise GroupError(f"A{n} exceeds the size guard")
    perms = [p for p in itertools.permutations(range(1, n + 1)) if perm_sign(p) == 1]
    return _perm_group(f"A{n}", "alternating", n, perms)


def sl2(ell: int) -> Group:
    """SL2 over the prime field of odd order ``ell`` (ell <= 17)."""
    if ell == 2 or ell < 2 or not _is_prime(ell):
        raise GroupError(f"SL2 needs an odd prime, got {ell}")
    if ell > 17:
        raise GroupError(f"ell = {ell} exceeds the desk-scale bound 17")
    mats = [(a, b, c, d) for a, b, c, d in itertools.product(range(ell), repeat=4)
            if (a * d - b * c) % ell == 1]
    arr = np.array(mats, dtype=np.int64)
    weights = ell ** np.arange(3, -1, -1, dtype=np.int64)
    codes = arr @ weights
    A, B, C, D = arr.T

    def rows(i):
        a, b, c, d = arr[i]
        prod = np.stack([(a * A + b * C), (a * B + b * D), (c * A + d * C), (c * B + d * D)],
                        axis=1) % ell
        return prod @ weights

    return Group(f"SL2({ell})", "sl2", mats, _table_from_codes(codes, rows), param=ell)


def table_group(name: str, table, names: Sequence[str] | None = None) -> Group:
    table = np.asarray(table, dtype=np.int32)
    return Group(name, "table", list(range(len(table))), table, names=names)


def cyclic(n: int) -> Group:
    idx = np.arange(n)
    return table_group(f"C{n}", (idx[:, None] + idx[None, :]) % n)


def dihedral(n: int) -> Group:
    """Dihedral group of order 2n; element k + n*e is r^k s^e."""
    tab = np.empty((2 * n, 2 * n), dtype=np.int32)
    for x in range(2 * n):
        a, e = x % n, x // n
        for y in range(2 * n):
            b, f = y % n, y // n
            tab[x, y] = (a + (-1) ** e * b) % n + n * ((e + f) % 2)
    names = [("r^%d" % k if k else "1") if e == 0 else ("r^%d s" % k if k else "s")
             for e in (0, 1) for k in range(n)]
    return table_group(f"D{2 * n}", tab, names)


_QUAT = {  # unit products: (x, y) -> (sign, unit)
    ("1", u): (1, u) for u in "1ijk"
}
_QUAT.update({(u, "1"): (1, u) for u in "1ijk"})
_QUAT.update({
    ("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
    ("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
    ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j"),
})


def quaternion8() -> Group:
    elems = [(s, u) for s in (1, -1) for u in "1ijk"]
    pos = {e: i for i, e in enumerate(elems)}
    tab = np.empty((8, 8), dtype=np.int32)
    for (s1, u1), (s2, u2) in itertools.product(elems, repeat=2):
        s, u = _QUAT[(u1, u2)]
        tab[pos[(s1, u1)], pos[(s2, u2)]] = pos[(s * s1 * s2, u)]
    names = [("" if s == 1 else "-") + u for s, u in elems]
    return table_group("Q8", tab, names)


# ---------------------------------------------------------------------------
# permutations


def perm_sign(p: Sequence[int]) -> int:
    seen, sign = set(), 1
    for start in range(1, len(p) + 1):
        if start in seen:
            continue
        length, x = 0, start
        while x not in seen:
            seen.add(x)
            x = p[x - 1]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def perm_cycles(p: Sequence[int]) -> list[tuple[int, ...]]:
    seen, cycles = set(), []
    for start in range(1, len(p) + 1):
        if start in seen:
            continue
        cyc, x = [], start
        while x not in seen:
            seen.add(x)
            cyc.append(x)
            x = p[x - 1]
        if len(cyc) > 1:
            cycles.append(tuple(cyc))
    return cycles


def cycle_type(p: Sequence[int]) -> tuple[int, ...]:
    return tuple(sorted((len(c) for c in perm_cycles(p)), reverse=True))


def cycle_notation(p: Sequence[int]) -> str:
    cycles = perm_cycles(p)
    if not cycles:
        return "()"
    return "".join("(" + " ".join(map(str, c)) + ")" for c in cycles)


def parse_cycles(text: str, n: int) -> tuple[int, ...]:
    """'(1 2 3)(4 5)' -> image tuple on 1..n.  Cycles compose right to left."""
    text = text.strip()
    img = list(range(1, n + 1))
    if text in ("", "()", "1", "id"):
        return tuple(img)
    cycles = []
    for chunk in text.replace(")", ")|").split("|"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if not (chunk.startswith("(") and chunk.endswith(")")):
            raise GroupError(f"bad cycle syntax: {text!r}")
        pts = [int(x) for x in chunk[1:-1].replace(",", " ").split()]
        if any(not 1 <= x <= n for x in pts) or len(set(pts)) != len(pts):
            raise GroupError(f"bad cycle {chunk!r} on {n} points")
        cycles.append(pts)
    for pts in reversed(cycles):
        step = {pts[i]: pts[(i + 1) % len(pts)] for i in range(len(pts))}
        img = [step.get(x, x) for x in img]
    return tuple(img)


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % q for q in range(2, math.isqrt(n) + 1))


# ---------------------------------------------------------------------------
# subgroups


def _guard(G: Group):
    if G.order > MAX_ORDER:
        raise GroupError(f"{G.name} exceeds the exhaustive-search size guard")


def subgroup_generated(G: Group, gens: Iterable[int]) -> frozenset:
    _guard(G)
    gens = list(dict.fromkeys(int(g) for g in gens))
    seen = {G.identity}
    queue = deque([G.identity])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = int(G.table[x, g])
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return frozenset(seen)


def generates(G: Group, gens: Iterable[int]) -> bool:
    return len(subgroup_generated(G, gens)) == G.order


def centralizer(G: Group, g: int) -> frozenset:
    _guard(G)
    return frozenset(np.nonzero(G.table[:, g] == G.table[g, :])[0].tolist())


def centralizer_of_set(G: Group, elts: Iterable[int]) -> frozenset:
    mask = np.ones(G.order, dtype=bool)
    for g in elts:
        mask &= G.table[:, g] == G.table[g, :]
    return frozenset(np.nonzero(mask)[0].tolist())


def center(G: Group) -> frozenset:
    return centralizer_of_set(G, range(G.order))


def normalizer(G: Group, H: Iterable[int]) -> frozenset:
    _guard(G)
    H = frozenset(H)
    hs = np.fromiter(H, dtype=np.int64)
    out = []
    for x in range(G.order):
        img = G.table[G.table[x, hs], G.inverses[x]]
        if all(int(y) in H for y in img):
            out.append(x)
    return frozenset(out)


def is_normal(G: Group, H: Iterable[int], within: Iterable[int] | None = None) -> bool:
    H = frozenset(H)
    xs = range(G.order) if within is None else within
    return all(G.conj(x, h) in H for x in xs for h in H)


def subgroup_as_group(G: Group, H: Iterable[int], name: str | None = None) -> tuple[Group, list[int]]:
    """Restrict the table to a subgroup.  Returns (group, embedding list)."""
    elts = sorted(H)
    pos = {g: i for i, g in enumerate(elts)}
    tab = np.array([[pos[int(G.table[a, b])] for b in elts] for a in elts], dtype=np.int32)
    names = [G.format(g) for g in elts]
    return table_group(name or f"sub({G.name})", tab, names), elts


def quotient(G: Group, K: Iterable[int], within: Iterable[int] | None = None,
             name: str | None = None) -> tuple[Group, dict[int, int]]:
    """H/K as a table group (H = ``within`` or all of G), cosets ordered by minimal element.

    Returns the quotient and the projection as a dict element -> coset index.
    """
    K = frozenset(K)
    H = sorted(range(G.order) if within is None else within)
    Hset = set(H)
    if not K <= Hset:
        raise GroupError("kernel is not contained in the ambient subgroup")
    if not is_normal(G, K, H):
        raise GroupError("kernel is not normal")
    proj: dict[int, int] = {}
    reps = []
    for h in H:
        if h in proj:
            continue
        coset = {int(G.table[h, k]) for k in K}
        for x in coset:
            proj[x] = len(reps)
        reps.append(min(coset))
    tab = np.array([[proj[int(G.table[a, b])] for b in reps] for a in reps], dtype=np.int32)
    names = [G.format(r) + "·K" for r in reps]
    return table_group(name or f"{G.name}/K", tab, names), proj


# ---------------------------------------------------------------------------
# recognition


def recognize(G: Group) -> str:
    """'cyclic(n)', 'quaternion8', 'dihedral(n)' (order 2n) or 'other'."""
    if G.order > 64:
        raise GroupError("recognize() is limited to groups of order <= 64")
    n = G.order
    orders = G.element_orders
    if int(orders.max()) == n:
        return f"cyclic({n})"
    abelian = bool(np.array_equal(G.table, G.table.T))
    involutions = int(np.count_nonzero(orders == 2))
    if n == 8 and not abelian and involutions == 1:
        return "quaternion8"
    if n % 2 == 0:
        half = n // 2
        for r in np.nonzero(orders == half)[0]:
            r = int(r)
            R = subgroup_generated(G, [r])
            r_inv = G.inv(r)
            for s in range(n):
                if s not in R and orders[s] == 2 and G.conj(s, r) == r_inv:
                    return f"dihedral({half})"
    return "other"


# ---------------------------------------------------------------------------
# central extensions


@dataclass(frozen=True, eq=False)
class CentralExtension:
    total: Group
    center: frozenset
    quotient: Group
    projection: tuple[int, ...]  # element of total -> element of quotient

    def project(self, g: int) -> int:
        return self.projection[g]

    def lifts(self, gbar: int) -> tuple[int, ...]:
        return tuple(g for g, q in enumerate(self.projection) if q == gbar)

    def lift_of_order(self, gbar: int | str, order: int) -> int:
        if isinstance(gbar, str):
            gbar = self.quotient.element(gbar)
        found = [g for g in self.lifts(gbar) if self.total.element_order(g) == order]
        if len(found) != 1:
            raise GroupError(
                f"{self.quotient.format(gbar)} has {len(found)} lifts of order {order}")
        return found[0]

    def format_lift(self, g: int) -> str:
        """Signed image: '+' marks the odd-order lift, else the first lift in serialization order."""
        gbar = self.project(g)
        lifts = sorted(self.lifts(gbar))
        odd = [x for x in lifts if self.total.element_order(x) % 2 == 1]
        plus = odd[0] if odd else lifts[0]
        return ("+" if g == plus else "-") + self.quotient.format(gbar)


def build_tilde_a5() -> CentralExtension:
    """The nonsplit double cover of A5, realized as SL2(F_5).

    The map to A5 is the conjugation action of PSL2(5) on its five Sylow
    2-subgroups, numbered by their minimal non-identity element.
    """
    G = sl2(5)
    C = center(G)
    P, to_psl = quotient(G, C, name="PSL2(5)")
    invols = [x for x in range(P.order) if P.element_order(x) == 2]
    sylows = set()
    for a, b in itertools.combinations(invols, 2):
        if P.mul(a, b) == P.mul(b, a):
            sylows.add(frozenset({P.identity, a, b, P.mul(a, b)}))
    sylows = sorted(sylows, key=lambda S: min(S - {P.identity}))
    assert len(sylows) == 5, "PSL2(5) must have five Sylow 2-subgroups"
    where = {S: i + 1 for i, S in enumerate(sylows)}
    A5 = alternating(5)
    proj = []
    for x in range(G.order):
        xb = to_psl[x]
        img = tuple(where[frozenset(P.conj(xb, s) for s in S)] for S in sylows)
        proj.append(A5.element(img))
    kernel = {x for x, q in enumerate(proj) if q == A5.identity}
    assert kernel == set(C), "Sylow-2 action must have kernel exactly the center"
    assert len(set(proj)) == 60
    G.name = "Ã5"
    return CentralExtension(G, C, A5, tuple(proj))


def serre_lift_census(ext: CentralExtension) -> dict[tuple[int, ...], tuple[int, ...]]:
    """Cycle type of a class of A_n -> sorted orders of the lifts of one of its elements.

    Raises if two elements of the same cycle type have different lift orders.
    """
    out: dict[tuple[int, ...], tuple[int, ...]] = {}
    Q = ext.quotient
    for gbar in range(Q.order):
        key = cycle_type(Q.payload(gbar))
        orders = tuple(sorted(ext.total.element_order(g) for g in ext.lifts(gbar)))
        if out.setdefault(key, orders) != orders:
            raise GroupError(f"lift orders not constant on cycle type {key}")
    return dict(sorted(out.items()))


def order_census(G: Group) -> Counter:
    return Counter(int(o) for o in G.element_orders)
