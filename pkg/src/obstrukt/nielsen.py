"""Nielsen tuples, inner Nielsen classes and the Artin braid action.

A tuple is a plain ``tuple[int, ...]`` of element indices of a :class:`Group`;
its inner class is represented by the lexicographically least simultaneous
conjugate (see :func:`canonical`).

Galois and braid actions act on tuples from the right.  The braid generator
``Q_i`` sends ``(.., g_i, g_{i+1}, ..)`` to ``(.., g_i g_{i+1} g_i^-1, g_i, ..)``;
a braid word is applied letter by letter from the left.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .groups import Group, generates

Tuple = tuple[int, ...]
BraidWord = Sequence[tuple[int, int]]

MAX_CANDIDATES = 10**7

Q0 = ((1, 1), (3, 1))  # inertia generator of the two-block degeneration


class NielsenError(ValueError):
    pass


def product(G: Group, t: Iterable[int]) -> int:
    return G.mul(*t)


def is_nielsen(G: Group, t: Tuple) -> bool:
    return (product(G, t) == G.identity and G.identity not in t
            and generates(G, t))


def conjugate_tuple(G: Group, b: int, t: Tuple) -> Tuple:
    return tuple(G.conj(b, g) for g in t)


def all_conjugates(G: Group, t: Tuple) -> np.ndarray:
    """Row x is x t x^-1."""
    t = np.asarray(t, dtype=np.int64)
    return G.table[G.table[:, t], G.inverses[:, None]]


def canonical(G: Group, t: Tuple) -> Tuple:
    conj = all_conjugates(G, t)
    # lexsort keys run last-to-first
    best = np.lexsort(conj.T[::-1])[0]
    return tuple(int(x) for x in conj[best])


def solve_conjugation(G: Group, t1: Tuple, t2: Tuple) -> tuple[int, ...]:
    """All b with b t1 b^-1 = t2, in serialization order."""
    if len(t1) != len(t2):
        raise NielsenError("tuples of different length")
    conj = all_conjugates(G, t1)
    hits = np.nonzero((conj == np.asarray(t2)[None, :]).all(axis=1))[0]
    return tuple(int(b) for b in hits)


# ---------------------------------------------------------------------------
# enumeration


@dataclass
class _Enum:
    G: Group
    classes: list
    tail: frozenset

    def scan(self, g1: int, middle: Iterable[tuple[int, ...]]) -> set[Tuple]:
        G = self.G
        found: set[Tuple] = set()
        gen_cache: dict[Tuple, bool] = {}
        for mid in middle:
            partial = G.mul(g1, *mid)
            last = G.inv(partial)
            if last not in self.tail:
                continue
            t = (g1, *mid, last)
            can = canonical(G, t)
            if can in found:
                continue
            ok = gen_cache.get(can)
            if ok is None:
                ok = gen_cache[can] = generates(G, t)
            if ok:
                found.add(can)
        return found


def _scan_chunk(args):
    job, g1, firsts, rest = args
    return job.scan(g1, ((a, *r) for a in firsts for r in itertools.product(*rest)))


def enumerate_classes(G: Group, class_vector: Sequence[str], jobs: int = 1) -> list[Tuple]:
    """Inner Nielsen classes with entries in the given classes, as sorted canonical tuples.

    ``g_1`` is pinned to its class representative; the middle entries run
    over their classes and the last one is solved from the product relation.
    """
    r = len(class_vector)
    if not 2 <= r <= 6:
        raise NielsenError(f"class vectors of length {r} are not supported")
    classes = [G.class_by_label(lbl) for lbl in class_vector]
    if any(c.order == 1 for c in classes):
        return []
    middle = [sorted(c.members) for c in classes[1:-1]]
    n_cand = math.prod(len(m) for m in middle)
    if n_cand > MAX_CANDIDATES:
        raise NielsenError(f"{n_cand} candidates exceed the enumeration guard {MAX_CANDIDATES}")
    job = _Enum(G, classes, classes[-1].members)
    g1 = classes[0].representative
    if jobs <= 1 or not middle:
        found = job.scan(g1, itertools.product(*middle))
    else:
        firsts, rest = middle[0], middle[1:]
        chunks = [firsts[i::jobs] for i in range(jobs)]
        with ProcessPoolExecutor(jobs) as pool:
            parts = pool.map(_scan_chunk, [(job, g1, c, rest) for c in chunks if c])
            found = set().union(*parts)
    return sorted(found)


def product_order_census(G: Group, classes: Iterable[Tuple]) -> dict[int, int]:
    """Counts of ord(g1 g2) over a set of length-4 classes."""
    counts = Counter()
    for t in classes:
        if len(t) != 4:
            raise NielsenError("product-order census needs tuples of length 4")
        counts[G.element_order(G.mul(t[0], t[1]))] += 1
    return dict(sorted(counts.items()))


# ---------------------------------------------------------------------------
# braids


def braid_generator(G: Group, t: Tuple, i: int, e: int = 1) -> Tuple:
    """Q_i^e with 1-based i."""
    if not 1 <= i < len(t):
        raise NielsenError(f"braid index {i} out of range for length {len(t)}")
    out = list(t)
    a, b = t[i - 1], t[i]
    if e == 1:
        out[i - 1], out[i] = G.conj(a, b), a
    elif e == -1:
        out[i - 1], out[i] = b, G.conj(G.inv(b), a)
    else:
        raise NielsenError("braid exponents must be +-1")
    return tuple(out)


def apply_braid(G: Group, word: BraidWord, t: Tuple) -> Tuple:
    for i, e in word:
        t = braid_generator(G, t, i, e)
    return t


def orbits(G: Group, word: BraidWord, classes: Iterable[Tuple]) -> list[list[Tuple]]:
    """Orbits of the braid word on a set of canonical classes.

    Each orbit starts at its least member and follows the action; orbits are
    sorted by their first member.
    """
    classes = set(classes)
    image = {}
    for c in classes:
        img = canonical(G, apply_braid(G, word, c))
        if img not in classes:
            raise NielsenError("braid action leaves the class set (class vector mismatch?)")
        image[c] = img
    seen: set[Tuple] = set()
    out = []
    for c in sorted(classes):
        if c in seen:
            continue
        orbit, x = [], c
        while x not in seen:
            seen.add(x)
            orbit.append(x)
            x = image[x]
        out.append(orbit)
    return out


# ---------------------------------------------------------------------------
# serialization


def class_record(G: Group, t: Tuple, class_vector: Sequence[str], orbit_id: int | None = None,
                 fmt=None) -> dict:
    fmt = fmt or G.format
    rec = {
        "group": G.name,
        "class_vector": list(class_vector),
        "canonical_entries": [fmt(g) for g in t],
    }
    if len(t) == 4:
        rec["ord_g5"] = G.element_order(G.mul(t[0], t[1]))
    rec["orbit_id"] = orbit_id
    return rec
