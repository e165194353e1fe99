"""
A two-level transition that no Markovian thermal process can make
=================================================================

With Gibbs state gamma = (0.6, 0.4), start from p = (0.1, 0.9). The target
q = (14/15, 1/15) is thermomajorized by p, so some thermal operation reaches
it. A memoryless process cannot, though: it would have to go through gamma
and out the other side.
"""

import numpy as np

from thermomaj import (
    MonotoneSpec,
    ThermalContext,
    Trajectory,
    audit_trajectory,
    check_continuous,
    lorenz_curve,
    thermomajorizes,
)

ctx = ThermalContext([0.6, 0.4])
p = np.array([0.1, 0.9])
q = np.array([14 / 15, 1 / 15])

# the two curves touch at x = 0.6, so the static check passes at the boundary
print("curve of p:", lorenz_curve(p, ctx).elbows)
print("curve of q:", lorenz_curve(q, ctx).elbows)
print("p thermomajorizes q:", thermomajorizes(p, q, ctx))

decision = check_continuous(p, q, ctx)
print("reachable by a Markovian thermal process:", decision.reachable)
print("decided after an exact rational recheck:", decision.exact_recheck)

# Follow the straight line from p to q and watch the Renyi monotones.
# Each one must never decrease along allowed dynamics; here they all do.
lams = np.linspace(0, 1, 401)
line = Trajectory(lams, np.array([(1 - l) * p + l * q for l in lams]))
for alpha in (0.5, 1.0, 2.0):
    report = audit_trajectory(line, ctx, [MonotoneSpec.renyi(alpha)])
    first = report.violations[0]
    print(f"alpha={alpha}: starts decreasing near lambda={first.t_start:.3f}")

# anything strictly between p and gamma is fine, though
print("p -> (0.4, 0.6):", check_continuous(p, [0.4, 0.6], ctx).reachable)
