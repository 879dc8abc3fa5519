"""Arithmetic actions on Nielsen tuples and the field-of-moduli/definition deciders.

Covers complex conjugation (normalized and transported presentations), the
inertia action of the four-point degeneration into two blocks, residues of
the obstruction class via the cocycle ``c = a0 (s.a0)^(-1/chi)`` and
specialization of the residue to p-adic fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from sympy import isprime, jacobi_symbol

from . import brauer
from .groups import (CentralExtension, Group, center, is_normal, normalizer, quotient, recognize,
                     subgroup_generated)
from .nielsen import Q0, Tuple, apply_braid, canonical, enumerate_classes, solve_conjugation


class ActionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# the real place


@dataclass(frozen=True)
class RealActionConfig:
    """``s`` pairs of complex-conjugate branch points, the rest real."""

    s: int

    def check(self, r: int):
        if self.s < 0 or 2 * self.s > r:
            raise ActionError(f"s = {self.s} invalid for {r} branch points")


def real_conjugation_image(G: Group, t: Tuple, cfg: RealActionConfig) -> Tuple:
    """Target tuple t* with b t b^-1 = t* for a real structure b."""
    r, s = len(t), cfg.s
    cfg.check(r)
    out = [G.inv(t[2 * s - i - 1]) for i in range(2 * s)]
    h = G.identity
    for j in range(r - 2 * s):
        c = t[2 * s + j]
        out.append(G.conj(h, G.inv(c)))
        h = G.mul(h, c)
    out = tuple(out)
    assert G.mul(*out) == G.identity
    return out


def all_involutions_central(G: Group) -> bool:
    return all(G.table[g].tolist() == G.table[:, g].tolist()
               for g in range(G.order) if G.element_order(g) == 2)


def realthm_shape(G: Group, t: Tuple, s: int) -> bool:
    """t = (g1..gs, gs^-1..g1^-1, c1..cm) with every c_j^2 = 1 and c1...cm = 1."""
    if any(t[i] != G.inv(t[2 * s - 1 - i]) for i in range(s)):
        return False
    cs = t[2 * s:]
    return all(G.mul(c, c) == G.identity for c in cs) and G.mul(*cs) == G.identity


@dataclass
class RealDecision:
    moduli: bool
    definition: bool
    witnesses: tuple[int, ...]
    shape_test: bool | None = None


def real_moduli_and_definition(G: Group, t: Tuple, cfg: RealActionConfig,
                               target: Tuple | None = None) -> RealDecision:
    """Is R a field of moduli / of definition?

    ``target`` overrides the image of t under complex conjugation (default:
    the normalized presentation).  When every involution of G is central the
    decision is cross-checked against the shape criterion.
    """
    normalized = target is None
    if normalized:
        target = real_conjugation_image(G, t, cfg)
    wit = solve_conjugation(G, t, target)
    definition = any(G.mul(b, b) == G.identity for b in wit)
    dec = RealDecision(bool(wit), definition, wit)
    if normalized and all_involutions_central(G):
        dec.shape_test = realthm_shape(G, t, cfg.s)
    return dec


def kappa_transport_image(G: Group, t: Tuple) -> Tuple:
    """Complex conjugation on the transported (non-normalized) presentation of four points."""
    if len(t) != 4:
        raise ActionError("transported conjugation is defined for four branch points")
    g1, g2, g3, g4 = t
    return (G.inv(g1), G.conj(G.inv(g3), G.inv(g2)), G.inv(g3), G.conj(G.inv(g1), G.inv(g4)))


# ---------------------------------------------------------------------------
# degeneration into two blocks


@dataclass(frozen=True)
class DegenerationDatum:
    blocks: tuple[tuple[int, ...], ...] = ((0, 1), (2, 3))
    eps: int = 1
    chi: int = 1
    modulus: int = 1

    def __post_init__(self):
        if self.eps not in (1, -1):
            raise ActionError("eps must be +-1")
        if math.gcd(self.chi, self.modulus) != 1:
            raise ActionError(f"chi = {self.chi} is not a unit mod {self.modulus}")


def inertia_image(G: Group, t: Tuple) -> Tuple:
    if len(t) != 4:
        raise ActionError("the inertia action is implemented for four branch points")
    return apply_braid(G, Q0, t)


def block_elements(G: Group, t: Tuple, blocks) -> list[int]:
    return [G.mul(*(t[i] for i in B)) for B in blocks]


def kappa(eps: int, blocks) -> dict[int, int]:
    """Index permutation: eps = 1 fixes the blocks, eps = -1 swaps the two blocks."""
    if eps == 1:
        return {i: i for B in blocks for i in B}
    if len(blocks) != 2 or len(blocks[0]) != len(blocks[1]):
        raise ActionError("block swap needs two blocks of equal size")
    B1, B2 = blocks
    return {**dict(zip(B1, B2)), **dict(zip(B2, B1))}


@dataclass
class ModuliProfile:
    k_min: int
    witnesses_k: tuple[int, ...]
    modulus: int
    chi_constraints: frozenset
    chi_witnesses: dict = field(repr=False)


def moduli_profile(G: Group, t: Tuple, blocks=((0, 1), (2, 3)), max_k: int = 10_000) -> ModuliProfile:
    """Inertia orbit length of [t] and the admissible (chi mod m, eps) for Galois elements.

    A pair (chi, eps) is admitted when some b in G maps each block subgroup
    onto the block subgroup it is sent to, sends each block product g_B to
    g_{kappa(B)}^chi, and sends every entry g_i into the target-block
    conjugacy class of g_{kappa(i)}^chi.
    """
    can = canonical(G, t)
    x = t
    for k in range(1, max_k + 1):
        x = inertia_image(G, x)
        if canonical(G, x) == can:
            break
    else:
        raise ActionError(f"no return within {max_k} inertia steps")
    witnesses = solve_conjugation(G, t, x)

    prods = block_elements(G, t, blocks)
    m = math.lcm(*(G.element_order(g) for g in (*t, *prods)))
    subgroups = [subgroup_generated(G, [t[i] for i in B]) for B in blocks]
    block_of = {i: n for n, B in enumerate(blocks) for i in B}
    allowed: dict[tuple[int, int], tuple[int, ...]] = {}
    for eps in (1, -1):
        kap = kappa(eps, blocks)
        bkap = [block_of[kap[B[0]]] for B in blocks]
        for chi in (c for c in range(1, m + 1) if math.gcd(c, m) == 1):
            good = []
            for b in range(G.order):
                if not all(frozenset(G.conj(b, h) for h in subgroups[n]) == subgroups[bkap[n]]
                           for n in range(len(blocks))):
                    continue
                if any(G.conj(b, prods[n]) != G.power(prods[bkap[n]], chi) for n in range(len(blocks))):
                    continue
                ok = True
                for i in range(len(t)):
                    target = G.power(t[kap[i]], chi)
                    H = subgroups[block_of[kap[i]]]
                    if all(G.conj(y, target) != G.conj(b, t[i]) for y in H):
                        ok = False
                        break
                if ok:
                    good.append(b)
            if good:
                allowed[(chi, eps)] = tuple(good)
    return ModuliProfile(k, witnesses, m, frozenset(allowed), allowed)


def case_of(G: Group, t: Tuple) -> int:
    """1, 2 or 3 according to ord(g1 g2) = 1, 10, 6 in the 3A^4 census of the double cover of A5."""
    order = G.element_order(G.mul(t[0], t[1]))
    try:
        return {1: 1, 10: 2, 6: 3}[order]
    except KeyError:
        raise ActionError(f"ord(g1 g2) = {order} is none of the three cases") from None


# ---------------------------------------------------------------------------
# residues


def residue_vanishes_by_order(witnesses: Sequence[int], ext: CentralExtension) -> bool:
    """Sufficient test: some conjugator has order prime to |C|."""
    if not witnesses:
        raise ActionError("empty witness set: field of moduli not established")
    c = len(ext.center)
    return any(math.gcd(ext.total.element_order(a), c) == 1 for a in witnesses)


@dataclass(frozen=True)
class ResidueDatum:
    a0: int
    e: int
    chibar: int


def residue_cocycle_value(rd: ResidueDatum, ext: CentralExtension) -> int:
    """c = a0^(1 - e/chi) mod ord(a0); must be central."""
    G = ext.total
    n = G.element_order(rd.a0)
    if rd.e not in (1, -1):
        raise ActionError("e must be +-1")
    if math.gcd(rd.chibar, n) != 1:
        raise ActionError(f"chi = {rd.chibar} not a unit mod {n}")
    exp = (1 - rd.e * pow(rd.chibar, -1, n)) % n
    c = G.power(rd.a0, exp)
    if c not in ext.center:
        raise ActionError("cocycle value is not central: inconsistent residue datum")
    return c


@dataclass(frozen=True)
class SquareClass:
    value: int

    def __post_init__(self):
        if self.value == 0 or brauer.squarefree_part(self.value) != self.value:
            raise ActionError(f"{self.value} is not a nonzero squarefree integer")

    @property
    def is_trivial(self) -> bool:
        return self.value == 1


def case1_residue_class(d: int) -> SquareClass:
    """Residue of the obstruction for the g1 g2 = 1 covers: the class of -d."""
    if d == 0 or brauer.squarefree_part(d) != d:
        raise ActionError(f"d = {d} must be squarefree and nonzero")
    return SquareClass(brauer.squarefree_part(-d))


def case1_action_on_a0(ext: CentralExtension, t: Tuple) -> dict:
    """For t = (g1, g1^-1, g3, g3^-1): a0 and the exponent e with s.a0 = a0^e.

    For each (eps, chi) with chi in a set of units mod 12 the conjugators
    b_s with t^s = b_s t b_s^-1 are solved for and e is read off from
    b_s a0 b_s^-1.  Returns {"a0": a0, "table": {(eps, chi): e}}.
    """
    G = ext.total
    g1, g3 = t[0], t[2]
    if t[1] != G.inv(g1) or t[3] != G.inv(g3):
        raise ActionError("not a g1 g2 = 1 tuple")
    a0s = solve_conjugation(G, t, inertia_image(G, t))
    if not a0s:
        raise ActionError("inertia does not fix the class")
    a0 = a0s[0]
    table = {}
    for eps in (1, -1):
        for chi in (1, 5, 7, 11):
            x, y = (g1, g3) if eps == 1 else (g3, g1)
            target = (G.power(x, chi), G.power(x, -chi), G.power(y, chi), G.power(y, -chi))
            bs = solve_conjugation(G, t, target)
            es = set()
            for b in bs:
                img = G.conj(b, a0)
                es.add(1 if img == a0 else -1 if img == G.inv(a0) else 0)
            if len(es) != 1 or 0 in es:
                raise ActionError(f"conjugators do not normalize <a0> for eps={eps}, chi={chi}")
            table[(eps, chi)] = es.pop()
    return {"a0": a0, "table": table}


# ---------------------------------------------------------------------------
# specialization to Q_p


def _check_p(p: int):
    if not isprime(p):
        raise ActionError(f"{p} is not prime")
    if p <= 5:
        raise ActionError(f"p = {p} must exceed 5 (p must not divide |G| = 120)")


def specialize_residue(s: SquareClass, va: int, p: int) -> int:
    """Residue of the specialized obstruction in F_p*/F_p*^2 as a Legendre sign."""
    _check_p(p)
    if va <= 0:
        raise ActionError("v(a) must be positive")
    if (2 * s.value) % p == 0:
        raise ActionError(f"p = {p} divides 2*{s.value}: residue class is ramified at p")
    return brauer.legendre(s.value, p) ** va


@dataclass
class SpecializationResult:
    d: int
    p: int
    brauer_class: brauer.BrauerClass2
    nontrivial: bool
    residue: int
    opposite_display: int  # the same symbol read with the opposite sign convention, +-1

    def csv_row(self) -> dict:
        return {
            "d": self.d,
            "p": self.p,
            "residue": self.residue,
            "obstruction": -1 if self.nontrivial else 1,
            "agrees_with_standard_convention": self.nontrivial == (self.residue == -1),
            "opposite_convention_branch": self.opposite_display,
        }


def specialization_obstruction(d: int, p: int) -> SpecializationResult:
    """The obstruction (-d, -p)_p of the cover specialized at t = p."""
    _check_p(p)
    if d == 0 or brauer.squarefree_part(d) != d:
        raise ActionError(f"d = {d} must be squarefree and nonzero")
    if d % p == 0:
        raise ActionError(f"p = {p} divides d = {d}")
    cls = brauer.brauer_class([brauer.symbol(-d, -p, brauer.FieldLabel.Qp(p))],
                              brauer.FieldLabel.Qp(p))
    nontrivial = not cls.is_zero
    residue = specialize_residue(case1_residue_class(d), 1, p)
    assert nontrivial == (residue == -1), "Brauer side disagrees with residue side"
    display = -1 if brauer.legendre(-d, p) == 1 else 1
    return SpecializationResult(d, p, cls, nontrivial, residue, display)



# ---------------------------------------------------------------------------
# the rigid triple (4A, lA, lB) in SL2(l)


@dataclass
class NormalizerChain:
    ell: int
    tuple_: Tuple
    n: int
    normalizer_order: int
    nbar_type: str  # recognize() of N/C
    n_over_h_type: str  # recognize() of N/H
    obstruction: brauer.BrauerClass2


def normalizer_chain(G: Group, jobs: int = 1) -> NormalizerChain:
    """Normalizer of <g1> for the unique class in (4A, lA, lB), and its quotients.

    H is the unique cyclic normal subgroup of N of order n = |N/C| / 4; the
    lifting problem for N/H then gives the obstruction (-1,a)+(-1,b)+(a,b)
    with a = -1.
    """
    if G.kind != "sl2":
        raise ActionError("normalizer chain is defined for SL2(l)")
    ell = G.param
    classes = enumerate_classes(G, ("4A", f"{ell}A", f"{ell}B"), jobs=jobs)
    if len(classes) != 1:
        raise ActionError(f"(4A, {ell}A, {ell}B) is not rigid: {len(classes)} classes")
    t = classes[0]
    N = normalizer(G, subgroup_generated(G, [t[0]]))
    C = center(G)
    nbar, _ = quotient(G, C, within=N, name="N/C")
    n = nbar.order // 4
    cands = {subgroup_generated(G, [h]) for h in N if G.element_order(h) == n}
    cands = [H for H in cands if is_normal(G, H, N)]
    if len(cands) != 1:
        raise ActionError(f"expected one cyclic normal subgroup of order {n}, found {len(cands)}")
    n_over_h, _ = quotient(G, cands[0], within=N, name="N/H")
    # with a = -1 the Witt class no longer depends on b
    omega = brauer.class_over_Q([(-1, -1)])
    assert all(brauer.witt_obstruction(-1, b) == omega for b in (-3, -2, -1, 2, 3, 5, ell))
    return NormalizerChain(ell, t, n, len(N), recognize(nbar), recognize(n_over_h), omega)


def constant_field(profile: ModuliProfile) -> int:
    """Squarefree D with Q(sqrt D) cut out by the admissible chi (1 for Q).

    The admissible chi mod m form a subgroup of the units; a quadratic
    character of conductor dividing m that is trivial on it names the field.
    """
    m = profile.modulus
    units = {c for c in range(1, m + 1) if math.gcd(c, m) == 1}
    allowed = {chi % m or m for chi, _ in profile.chi_constraints}
    if allowed == units:
        return 1
    found = []
    for q in (q for q in range(2, m + 1) if m % q == 0 and brauer.squarefree_part(q) == q):
        for D in (q, -q):
            disc = D if D % 4 == 1 else 4 * D
            if m % disc:
                continue
            if all(jacobi_symbol(disc, c if c % 2 else c + m) == 1 for c in allowed):
                found.append(D)
    if len(found) != 1:
        raise ActionError(f"admissible chi do not cut out one quadratic field: {sorted(found)}")
    return found[0]
