"""
Reachable states for three degenerate levels
============================================

With a uniform Gibbs state, thermomajorization is plain majorization and a
full thermalization of two levels simply averages them. Starting from
p = (0.1, 0.3, 0.6), the states reachable in the ordering (1, 2, 3) are
bounded by two extreme points.
"""

from fractions import Fraction

from thermomaj import (
    ThermalContext,
    apply_protocol,
    canonical_sequences,
    check_continuous,
    gamma_ordering,
    reachable_set,
    theorem4_direct,
)

# exact rationals keep the extreme points exact
ctx = ThermalContext(["1/3", "1/3", "1/3"], arithmetic_mode="exact")
p = [Fraction(1, 10), Fraction(3, 10), Fraction(3, 5)]
print("ordering of p:", gamma_ordering(p, ctx))

for seq in canonical_sequences((3, 2, 1), (1, 2, 3)):
    print(" -> ".join("".join(map(str, o)) for o in seq))

rs = reachable_set(p, ctx)
print(f"{len(rs)} orderings reachable")
for state, history in rs[(1, 2, 3)]:
    print("  optimal state", [str(x) for x in state], "via", [(s.i, s.j) for s in history])

q = [Fraction(7, 20), Fraction(7, 20), Fraction(3, 10)]
for decide in (check_continuous, theorem4_direct):
    d = decide(p, q, ctx)
    print(f"{decide.__name__}: reachable={d.reachable}, {d.crossings} full + {d.partial} partial steps")
    for s in d.witness:
        print(f"    T({s.i},{s.j}) lambda={s.lam}")
    assert list(apply_protocol(p, d.witness, ctx)) == q

# the reverse direction is out of reach
print("q -> p:", check_continuous(q, p, ctx).reachable)
