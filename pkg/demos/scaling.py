"""
How the reachable-set search scales
===================================

The number of orderings grows as d!, and so does the number of optimal
states kept per ordering. Up to d = 6 the search runs in about a second.
"""

import time

import numpy as np

from thermomaj import ThermalContext, reachable_set

rng = np.random.default_rng(1)
for d in range(2, 7):
    g = rng.random(d) + 0.05
    ctx = ThermalContext(g / g.sum())
    p = rng.dirichlet(np.ones(d))
    t0 = time.perf_counter()
    rs = reachable_set(p, ctx)
    elapsed = time.perf_counter() - t0
    states = sum(len(rs[o]) for o in rs.orderings())
    longest = max(len(h) for o in rs.orderings() for _, h in rs[o])
    print(f"d={d}: {len(rs):4d} orderings, {states:6d} optimal states, "
          f"longest history {longest:2d}, {elapsed:.3f}s")
