"""Acceptance criteria, one test per criterion.

Each test records a ``PASS``/``FAIL`` line; pytest prints them in the terminal
summary, and ``python tests/test_acceptance.py`` runs them all as a script.
"""

import functools
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from thermomaj import (  # noqa: E402
    ElementaryStep,
    GeneratorSchedule,
    MonotoneSpec,
    Protocol,
    Segment,
    ThermalContext,
    Trajectory,
    apply_protocol,
    audit_trajectory,
    canonical_sequences,
    check_continuous,
    compose_lambda,
    default_monotones,
    elementary_step,
    gamma_ordering,
    has_ordering,
    integrate_populations,
    reachable_set,
    schedule_from_protocol,
    step_complete_check,
    theorem4_direct,
    thermomajorizes,
)
from conftest import sinkhorn_gibbs_stochastic  # noqa: E402

RESULTS = []


def record(n, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} [{n:2d}] {title}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def _random_gamma(rng, d, floor=0.05):
    g = rng.random(d) + floor
    return ThermalContext(g / g.sum())


def _random_protocol(rng, d, n):
    steps = []
    for _ in range(n):
        i, j = rng.choice(d, 2, replace=False) + 1
        lam = 1.0 if rng.random() < 0.3 else float(rng.random())
        steps.append(ElementaryStep(int(i), int(j), lam))
    return Protocol(tuple(steps))


# -- instance generators shared with the witness-bound criterion -----------------


@functools.lru_cache(maxsize=None)
def three_level_run():
    t0 = time.perf_counter()
    seqs = list(canonical_sequences((3, 2, 1), (1, 2, 3)))
    ctx = ThermalContext(["1/3", "1/3", "1/3"], arithmetic_mode="exact")
    p = [Fraction(1, 10), Fraction(3, 10), Fraction(3, 5)]
    fs = []
    for seq in seqs:
        steps = []
        for a, b in zip(seq, seq[1:]):
            k = next(k for k in range(3) if a[k] != b[k])
            steps.append(ElementaryStep(a[k], a[k + 1], 1))
        fs.append(tuple(apply_protocol(p, Protocol(tuple(steps)), ctx)))
    witnesses = []
    for q in fs + [(Fraction(7, 20), Fraction(7, 20), Fraction(3, 10))]:
        for decide in (check_continuous, theorem4_direct):
            dec = decide(p, list(q), ctx)
            witnesses.append((3, dec))
    return seqs, fs, witnesses, time.perf_counter() - t0


@functools.lru_cache(maxsize=None)
def cross_run():
    rng = np.random.default_rng(3)
    counts, disagreements, witnesses, reach = {}, [], [], {}
    t0 = time.perf_counter()
    for d in (3, 4):
        counts[d] = reach[d] = 0
        for n in range(600):
            ctx = _random_gamma(rng, d)
            p = rng.dirichlet(np.ones(d) * 0.8)
            kind = n % 3
            if kind == 0:
                q = apply_protocol(p, _random_protocol(rng, d, int(rng.integers(1, 7))), ctx)
            elif kind == 1:
                q = sinkhorn_gibbs_stochastic(rng, ctx.gamma) @ p
            else:
                q = rng.dirichlet(np.ones(d))
            q = q / q.sum()
            a = check_continuous(p, q, ctx)
            b = theorem4_direct(p, q, ctx)
            counts[d] += 1
            reach[d] += a.reachable
            if a.reachable != b.reachable:
                disagreements.append((d, p, q, ctx.gamma))
            witnesses += [(d, a), (d, b)]
    return counts, reach, disagreements, witnesses, time.perf_counter() - t0


@functools.lru_cache(maxsize=None)
def d2_run():
    rng = np.random.default_rng(4)
    bad, n, witnesses = 0, 0, []
    t0 = time.perf_counter()
    while n < 1000:
        g1 = rng.uniform(0.02, 0.98)
        p1, q1 = rng.random(), rng.random()
        if min(abs(q1 - p1), abs(q1 - g1)) <= 1e-6:
            continue
        n += 1
        ctx = ThermalContext([g1, 1 - g1])
        dec = check_continuous([p1, 1 - p1], [q1, 1 - q1], ctx)
        expected = min(p1, g1) <= q1 <= max(p1, g1)
        bad += dec.reachable != expected
        witnesses.append((2, dec))
    return n, bad, witnesses, time.perf_counter() - t0


@functools.lru_cache(maxsize=None)
def same_ordering_run():
    rng = np.random.default_rng(5)
    n, failures, witnesses = 0, 0, []
    t0 = time.perf_counter()
    while n < 500:
        d = int(rng.integers(2, 6))
        ctx = _random_gamma(rng, d)
        p = rng.dirichlet(np.ones(d))
        w = rng.uniform(0.05, 1.0) ** 2
        M = (1 - w) * np.eye(d) + w * sinkhorn_gibbs_stochastic(rng, ctx.gamma)
        q = M @ p
        q = q / q.sum()
        if not has_ordering(q, gamma_ordering(p, ctx), ctx):
            continue
        if not thermomajorizes(p, q, ctx):
            continue
        n += 1
        dec = check_continuous(p, q, ctx)
        failures += not dec.reachable
        witnesses.append((d, dec))
    return n, failures, witnesses, time.perf_counter() - t0


# -- criteria ------------------------------------------------------------------


def test_criterion_01_touching_curves():
    ctx = ThermalContext([0.6, 0.4], cmp_tol=1e-9)
    p = [0.1, 0.9]
    g2_over_g1 = 0.4 / 0.6
    q = [(1 - g2_over_g1) * p[0] + p[1], g2_over_g1 * p[0]]
    t0 = time.perf_counter()
    static = thermomajorizes(p, q, ctx)
    dec = check_continuous(p, q, ctx)
    dt = time.perf_counter() - t0
    ok = np.allclose(q, [14 / 15, 1 / 15], atol=1e-15) and static and not dec.reachable and dt < 1
    assert record(1, "touching curves, two levels", ok,
                  f"static={static} reachable={dec.reachable} time={dt:.3f}s")


def test_criterion_02_three_level_extremes():
    seqs, fs, _, dt = three_level_run()
    expected = {(Fraction(29, 80), Fraction(29, 80), Fraction(11, 40)),
                (Fraction(2, 5), Fraction(3, 10), Fraction(3, 10))}
    ok = len(seqs) == 2 and set(fs) == expected and dt < 1
    assert record(2, "three-level extreme points", ok,
                  f"sequences={len(seqs)} f={[tuple(map(str, f)) for f in fs]} time={dt:.3f}s")


def test_criterion_03_cross_implementation():
    counts, reach, dis, _, dt = cross_run()
    ok = not dis and all(counts[d] >= 500 for d in (3, 4)) and dt < 120
    assert record(3, "theorem4_direct vs check_continuous", ok,
                  f"pairs={counts} reachable={reach} disagreements={len(dis)} time={dt:.1f}s")


def test_criterion_04_d2_oracle():
    n, bad, _, dt = d2_run()
    ok = n == 1000 and bad == 0 and dt < 10
    assert record(4, "d=2 segment oracle", ok, f"instances={n} disagreements={bad} time={dt:.2f}s")


def test_criterion_05_same_ordering():
    n, failures, _, dt = same_ordering_run()
    ok = n == 500 and failures == 0 and dt < 60
    assert record(5, "same-ordering thermomajorization is reachable", ok,
                  f"pairs={n} unreachable={failures} time={dt:.2f}s")


def test_criterion_06_monotone_audit():
    rng = np.random.default_rng(6)
    t0 = time.perf_counter()
    audited, violations = 0, 0
    while audited < 200:
        d = int(rng.integers(2, 6))
        ctx = _random_gamma(rng, d)
        p = rng.dirichlet(np.ones(d))
        q = apply_protocol(p, _random_protocol(rng, d, int(rng.integers(1, 6))), ctx)
        dec = check_continuous(p, q, ctx)
        if not dec.reachable or len(dec.witness) == 0:
            continue
        traj = integrate_populations(p, schedule_from_protocol(dec.witness), ctx, samples_per_segment=10)
        report = audit_trajectory(traj, ctx, default_monotones())
        violations += len(report.violations)
        audited += 1
    # the straight line from p to the two-level target passes through gamma
    ctx = ThermalContext([0.6, 0.4])
    p, q = np.array([0.1, 0.9]), np.array([14 / 15, 1 / 15])
    lams = np.linspace(0, 1, 1001)
    line = Trajectory(lams, np.array([(1 - l) * p + l * q for l in lams]))
    decreasing = {}
    for a in (0.5, 1.0, 2.0):
        report = audit_trajectory(line, ctx, [MonotoneSpec.renyi(a)])
        decreasing[a] = any(0 < v.t_start and v.t_end < 1 and v.decrease > 0 for v in report.violations)
    dt = time.perf_counter() - t0
    ok = violations == 0 and all(decreasing.values()) and dt < 120
    assert record(6, "monotone audit", ok,
                  f"witnesses={audited} violations={violations} straight-line decrease={decreasing} time={dt:.1f}s")


def test_criterion_07_slope_equalization():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        d = int(rng.integers(2, 7))
        ctx = _random_gamma(rng, d)
        p = rng.dirichlet(np.ones(d) * 0.5)
        i, j = (int(x) for x in rng.choice(d, 2, replace=False) + 1)
        r = elementary_step(p, ElementaryStep(i, j, 1.0), ctx)
        # the segment of level k has slope p_k / gamma_k
        worst = max(worst, abs(r[i - 1] / ctx.gamma[i - 1] - r[j - 1] / ctx.gamma[j - 1]))
    assert record(7, "full thermalization equalizes slopes", worst <= 1e-12, f"max slope gap={worst:.2e}")


def test_criterion_08_semigroup():
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(1000):
        d = int(rng.integers(2, 7))
        ctx = _random_gamma(rng, d)
        p = rng.dirichlet(np.ones(d))
        i, j = (int(x) for x in rng.choice(d, 2, replace=False) + 1)
        l1, l2 = rng.random(2)
        two = apply_protocol(p, Protocol.from_triples([(i, j, l1), (i, j, l2)]), ctx)
        one = elementary_step(p, ElementaryStep(i, j, compose_lambda(l1, l2)), ctx)
        worst = max(worst, float(np.max(np.abs(two - one))))
    assert record(8, "semigroup identity", worst <= 1e-12, f"max deviation={worst:.2e}")


def test_criterion_09_dynamics():
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(25):
        d = int(rng.integers(2, 6))
        ctx = _random_gamma(rng, d)
        p = rng.dirichlet(np.ones(d))
        sched = schedule_from_protocol(_random_protocol(rng, d, int(rng.integers(1, 4))))
        a = integrate_populations(p, sched, ctx, method="analytic")
        b = integrate_populations(p, sched, ctx, method="rk4", dt=1e-3)
        worst = max(worst, float(np.max(np.abs(a.states - b.states))))
    drift = 0.0
    for _ in range(5):
        d = int(rng.integers(2, 6))
        ctx = _random_gamma(rng, d)
        cuts = np.sort(rng.random(6)) * 10
        durations = np.diff(np.concatenate([[0], cuts, [10]]))
        pairs = [tuple(int(x) for x in sorted(rng.choice(d, 2, replace=False) + 1)) for _ in durations]
        sched = GeneratorSchedule(tuple(Segment(pr, float(t)) for pr, t in zip(pairs, durations) if t > 0))
        traj = integrate_populations(ctx.gamma, sched, ctx, method="rk4", dt=1e-3)
        drift = max(drift, float(np.max(np.abs(traj.states - ctx.gamma))))
    ok = worst <= 1e-8 and drift < 1e-10
    assert record(9, "dynamics realization", ok, f"rk4 vs analytic={worst:.2e} gamma drift={drift:.2e}")


def test_criterion_10_witness_bounds():
    witnesses = three_level_run()[2] + cross_run()[3] + d2_run()[2] + same_ordering_run()[2]
    checked, bad = 0, 0
    for d, dec in witnesses:
        if not dec.reachable:
            continue
        checked += 1
        crossing = dec.crossings
        partial = len(dec.witness) - crossing
        bad += not (crossing <= math.factorial(d) - 1 and partial <= d - 1)
    assert record(10, "witness bounds N <= d!-1, M <= d-1", bad == 0 and checked > 0,
                  f"protocols={checked} out of bounds={bad}")


def test_criterion_11_completeness_equivalence():
    rng = np.random.default_rng(11)
    bad, positives = 0, 0
    for n in range(1000):
        d = int(rng.integers(2, 6))
        ctx = _random_gamma(rng, d)
        p = rng.dirichlet(np.ones(d) * 0.7)
        q = sinkhorn_gibbs_stochastic(rng, ctx.gamma) @ p if n % 2 else rng.dirichlet(np.ones(d))
        q = q / q.sum()
        a, b = step_complete_check(p, q, ctx), thermomajorizes(p, q, ctx)
        positives += b
        bad += a != b
    assert record(11, "step-function completeness", bad == 0,
                  f"pairs=1000 thermomajorizing={positives} disagreements={bad}")


def test_criterion_12_performance():
    rng = np.random.default_rng(12)
    times = {}
    for d in (5, 6):
        ctx = _random_gamma(rng, d, floor=0.0)
        p = rng.dirichlet(np.ones(d))
        t0 = time.perf_counter()
        rs = reachable_set(p, ctx)
        times[d] = (time.perf_counter() - t0, len(rs), sum(len(rs[o]) for o in rs.orderings()))
    ok = times[5][0] < 10 and times[6][0] < 600
    detail = ", ".join(f"d={d}: {t:.2f}s ({nb} buckets, {ns} states)" for d, (t, nb, ns) in times.items())
    assert record(12, "reachable_set performance", ok, detail)


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
