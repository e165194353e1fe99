"""Realizing protocols as piecewise-constant reset master equations on populations.

Each elementary step ``(i, j, lam)`` becomes a segment of duration
``-log(1 - lam)`` (relaxation time 1) during which only the pair ``(i, j)``
is coupled to the bath::

    dp_i/dt = gamma_i (p_i + p_j) / (gamma_i + gamma_j) - p_i,   dp_j/dt = -dp_i/dt

A full thermalization (``lam = 1``) needs infinite time; it is realized with
duration ``-log(EPS_FULL)`` and therefore lands within ``EPS_FULL`` of the
exact map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ThermalContext, as_dist
from .thermalization import Protocol, _thermalize

__all__ = [
    "EPS_FULL",
    "Segment",
    "GeneratorSchedule",
    "Trajectory",
    "schedule_from_protocol",
    "generator_matrix",
    "integrate_populations",
]

EPS_FULL = 1e-12


@dataclass(frozen=True)
class Segment:
    pair: tuple[int, int]
    duration: float

    def __post_init__(self):
        i, j = self.pair
        if i == j or min(i, j) < 1:
            raise ValueError(f"invalid level pair {self.pair}")
        if not self.duration > 0 or not math.isfinite(self.duration):
            raise ValueError("segment durations must be positive and finite")
        object.__setattr__(self, "pair", (min(i, j), max(i, j)))


@dataclass(frozen=True)
class GeneratorSchedule:
    segments: tuple[Segment, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def total_time(self) -> float:
        return float(sum(s.duration for s in self.segments))

    def __len__(self):
        return len(self.segments)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time-stamped population vectors; ``states[k]`` is the distribution at ``times[k]``."""

    times: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        s = np.asarray(self.states, dtype=float)
        if s.ndim != 2 or s.shape[0] != t.size:
            raise ValueError("times and states do not line up")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", s)

    @property
    def samples(self) -> list[tuple[float, np.ndarray]]:
        return list(zip(self.times.tolist(), self.states))

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def __len__(self):
        return self.times.size


def schedule_from_protocol(proto: Protocol) -> GeneratorSchedule:
    """Segment durations ``-log(1 - lam)``; ``lam = 0`` steps are dropped."""
    segments = []
    for s in proto:
        lam = float(s.lam)
        if lam == 0:
            continue
        duration = -math.log(EPS_FULL) if lam >= 1 else -math.log1p(-lam)
        segments.append(Segment((s.i, s.j), duration))
    return GeneratorSchedule(tuple(segments))


def generator_matrix(pair: tuple[int, int], ctx: ThermalContext) -> np.ndarray:
    """Rate matrix ``G`` with ``dp/dt = G p`` for a reset on ``pair`` (1-based).

    On the pair, ``G = T - I`` with ``T`` the idempotent full-thermalization
    block; all other rows and columns are zero.
    """
    d = ctx.d
    a, b = pair[0] - 1, pair[1] - 1
    if not (0 <= a < d and 0 <= b < d) or a == b:
        raise ValueError(f"invalid level pair {pair} for d={d}")
    g = np.asarray(ctx.gamma, dtype=float)
    s = g[a] + g[b]
    G = np.zeros((d, d))
    for r in (a, b):
        for c in (a, b):
            G[r, c] = g[r] / s - (r == c)
    return G


def _rk4_pair(pa, pb, ga, gb, h, dt):
    n = max(1, math.ceil(h / dt - 1e-9))
    step = h / n
    w = ga / (ga + gb)

    def rate(x, total):
        return w * total - x

    total = pa + pb
    x = pa
    for _ in range(n):
        k1 = rate(x, total)
        k2 = rate(x + 0.5 * step * k1, total)
        k3 = rate(x + 0.5 * step * k2, total)
        k4 = rate(x + step * k3, total)
        x = x + step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return x, total - x


def integrate_populations(p0, sched: GeneratorSchedule, ctx: ThermalContext,
                          method: str = "analytic", dt: float = 1e-3,
                          samples_per_segment: int = 10) -> Trajectory:
    """Integrate the reset master equation along ``sched``.

    Parameters
    ----------
    method : {"analytic", "rk4"}
        ``analytic`` uses the closed-form exponential relaxation; ``rk4``
        integrates numerically with step at most ``dt``.
    samples_per_segment : int
        Evenly spaced samples per segment, the segment end included. The
        initial state is always the first sample.
    """
    if method not in ("analytic", "rk4"):
        raise ValueError(f"invalid method {method!r}")
    if not dt > 0:
        raise ValueError("dt must be positive")
    if samples_per_segment < 1:
        raise ValueError("samples_per_segment must be at least 1")
    fctx = ctx.to_float()
    p = np.asarray(as_dist(p0, ctx), dtype=float)
    g = fctx.gamma
    for seg in sched.segments:
        if seg.pair[1] > ctx.d:
            raise ValueError(f"level pair {seg.pair} out of range for d={ctx.d}")

    times = [0.0]
    states = [p.copy()]
    t0 = 0.0
    for seg in sched.segments:
        a, b = seg.pair[0] - 1, seg.pair[1] - 1
        start = p
        prev_tau = 0.0
        for k in range(1, samples_per_segment + 1):
            tau = seg.duration * k / samples_per_segment
            if method == "analytic":
                lam = -math.expm1(-tau)
                cur = _thermalize(start, a, b, lam, g)
            else:
                cur = p.copy()
                cur[a], cur[b] = _rk4_pair(p[a], p[b], g[a], g[b], tau - prev_tau, dt)
            p = cur
            prev_tau = tau
            times.append(t0 + tau)
            states.append(p.copy())
        t0 += seg.duration
    return Trajectory(np.array(times), np.array(states))
