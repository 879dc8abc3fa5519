"""Count Nielsen classes of (4A, lA, lB) in SL2(l) for every admissible l <= 17, with timings."""

import time

from obstrukt.actions import normalizer_chain
from obstrukt.groups import sl2
from obstrukt.nielsen import enumerate_classes

for ell in (3, 5, 11, 13):
    G = sl2(ell)
    t0 = time.perf_counter()
    n = len(enumerate_classes(G, ["4A", f"{ell}A", f"{ell}B"]))
    dt = time.perf_counter() - t0
    line = f"l={ell:2d} |G|={G.order:5d} classes={n} ({dt:.2f}s)"
    if n == 1:
        ch = normalizer_chain(G)
        line += f"  N/C={ch.nbar_type}  N/H={ch.n_over_h_type}"
    print(line)
