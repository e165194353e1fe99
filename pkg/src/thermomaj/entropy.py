"""Generalized entropy production: functionals that never decrease along a Markovian thermal process.

All logarithms are natural. Every functional here is oriented so that it
*increases* along allowed dynamics, e.g. the Renyi family is reported as
``-S_alpha(p || gamma)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import ThermalContext, as_dist
from .dynamics import Trajectory

__all__ = [
    "MonotoneSpec",
    "Violation",
    "AuditReport",
    "relative_entropy_alpha",
    "h_divergence",
    "sigma_a",
    "step_complete_check",
    "audit_trajectory",
    "default_monotones",
]

H_IDS = ("kl", "chi2", "tsallis", "total_variation_shift")


def _float_dist(p, ctx):
    return np.asarray(as_dist(p, ctx), dtype=float), np.asarray(ctx.gamma, dtype=float)


def relative_entropy_alpha(p, ctx: ThermalContext, alpha: float) -> float:
    """Renyi relative entropy ``sgn(a)/(a-1) * log(sum p_i^a gamma_i^(1-a))``.

    ``alpha = 1`` is the Kullback-Leibler limit ``sum p_i log(p_i/gamma_i)``
    and ``alpha = 0`` the limit from above, ``-log(sum of gamma over supp p)``.
    Negative orders give ``inf`` when ``p`` has a zero entry.
    """
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise ValueError("alpha must be finite")
    p, g = _float_dist(p, ctx)
    if alpha == 1.0:
        mask = p > 0
        return float(np.sum(p[mask] * np.log(p[mask] / g[mask])))
    if alpha == 0.0:
        return float(-np.log(g[p > 0].sum()))
    if alpha < 0 and np.any(p == 0):
        return math.inf
    with np.errstate(divide="ignore"):
        terms = np.where(p > 0, p ** alpha * g ** (1 - alpha), 0.0)
    return float(np.sign(alpha) / (alpha - 1) * np.log(terms.sum()))


def _h(h_id, param):
    if h_id == "kl":
        return lambda x: np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0)
    if h_id == "chi2":
        return lambda x: (x - 1.0) ** 2
    if h_id == "tsallis":
        if param is None or param <= 0 or param == 1:
            raise ValueError("tsallis needs an order alpha > 0, alpha != 1")
        return lambda x: (x ** param - 1.0) / (param - 1.0)
    if h_id == "total_variation_shift":
        if param is None or param < 0:
            raise ValueError("total_variation_shift needs a shift a >= 0")
        return lambda x: np.abs(x - param)
    raise ValueError(f"unsupported h_id {h_id!r}")


def h_divergence(p, ctx: ThermalContext, h_id, param: float | None = None) -> float:
    """``Sigma_h = -sum_i gamma_i h(p_i / gamma_i)`` for a convex ``h``.

    ``h_id`` is one of ``"kl"`` (x log x), ``"chi2"`` ((x-1)^2),
    ``"tsallis"`` ((x^a - 1)/(a - 1), order in ``param``) or
    ``"total_variation_shift"`` (|x - a|, shift in ``param``). A tuple
    ``(h_id, param)`` is also accepted.
    """
    if isinstance(h_id, tuple):
        h_id, param = h_id
    h = _h(h_id, param)
    p, g = _float_dist(p, ctx)
    return float(-np.sum(g * h(p / g)))


def sigma_a(p, ctx: ThermalContext, a: float) -> float:
    """``-sum_i |p_i - a gamma_i / gamma_min|``."""
    p, g = _float_dist(p, ctx)
    return float(-np.sum(np.abs(p - a * g / g.min())))


def _l1_shift(p, g, a):
    return sum(abs(pi - a * gi) for pi, gi in zip(p, g))


def step_complete_check(p, q, ctx: ThermalContext) -> bool:
    """Whether ``sum|p_i - a gamma_i| >= sum|q_i - a gamma_i|`` for every ``a >= 0``.

    Both sides are convex and piecewise linear in ``a`` with kinks at the
    ratios ``p_i/gamma_i`` and ``q_i/gamma_i``, and coincide once ``a`` exceeds
    them all, so comparing at the kinks (and at 0) decides it. Runs in exact
    arithmetic for an exact context.
    """
    p = as_dist(p, ctx)
    q = as_dist(q, ctx)
    g = ctx.gamma
    tol = ctx.tol
    kinks = {0} | {p[i] / g[i] for i in range(ctx.d)} | {q[i] / g[i] for i in range(ctx.d)}
    return all(_l1_shift(p, g, a) >= _l1_shift(q, g, a) - tol for a in kinks)


@dataclass(frozen=True)
class MonotoneSpec:
    """Which functional to audit.

    ``kind`` is ``"renyi"`` (``param`` = alpha), ``"h_divergence"``
    (``h_id`` plus optional ``param``) or ``"sigma_a"`` (``param`` = a in [0, 1]).
    """

    kind: str
    param: float | None = None
    h_id: str | None = None

    def __post_init__(self):
        if self.kind == "renyi":
            if self.param is None or not math.isfinite(self.param):
                raise ValueError("renyi needs a finite alpha")
        elif self.kind == "sigma_a":
            if self.param is None or not 0 <= self.param <= 1:
                raise ValueError("sigma_a needs a in [0, 1]")
        elif self.kind == "h_divergence":
            if self.h_id not in H_IDS:
                raise ValueError(f"unsupported h_id {self.h_id!r}")
            _h(self.h_id, self.param)
        else:
            raise ValueError(f"unknown monotone kind {self.kind!r}")

    @classmethod
    def renyi(cls, alpha):
        return cls("renyi", float(alpha))

    @classmethod
    def h(cls, h_id, param=None):
        return cls("h_divergence", None if param is None else float(param), h_id)

    @classmethod
    def sigma(cls, a):
        return cls("sigma_a", float(a))

    @property
    def label(self) -> str:
        if self.kind == "renyi":
            return f"renyi({self.param:g})"
        if self.kind == "sigma_a":
            return f"sigma_a({self.param:g})"
        if self.param is None:
            return self.h_id
        return f"{self.h_id}({self.param:g})"

    def __call__(self, p, ctx: ThermalContext) -> float:
        if self.kind == "renyi":
            return -relative_entropy_alpha(p, ctx, self.param)
        if self.kind == "sigma_a":
            return sigma_a(p, ctx, self.param)
        return h_divergence(p, ctx, self.h_id, self.param)


def default_monotones() -> list[MonotoneSpec]:
    """KL, Renyi orders 2 and 1/2, and ``sigma_a`` on a = 0.1, ..., 1.0."""
    specs = [MonotoneSpec.renyi(1.0), MonotoneSpec.renyi(2.0), MonotoneSpec.renyi(0.5)]
    specs += [MonotoneSpec.sigma(k / 10) for k in range(1, 11)]
    return specs


@dataclass(frozen=True)
class Violation:
    monotone: str
    t_start: float
    t_end: float
    decrease: float


@dataclass(frozen=True)
class AuditReport:
    violations: tuple[Violation, ...] = ()
    values: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def by_monotone(self) -> dict[str, list[Violation]]:
        out: dict[str, list[Violation]] = {}
        for v in self.violations:
            out.setdefault(v.monotone, []).append(v)
        return out


def audit_trajectory(traj: Trajectory, ctx: ThermalContext,
                     monotones: list[MonotoneSpec] | None = None) -> AuditReport:
    """Flag every consecutive sample pair where a monotone drops by more than ``ctx.cmp_tol``.

    ``values`` on the report maps each monotone label to its sampled values.
    """
    if monotones is None:
        monotones = default_monotones()
    t = np.asarray(traj.times, dtype=float)
    if np.any(np.diff(t) < 0):
        raise ValueError("trajectory timestamps are not ordered")
    fctx = ctx.to_float()
    tol = ctx.cmp_tol
    violations = []
    values = {}
    for spec in monotones:
        v = np.array([spec(p, fctx) for p in traj.states])
        values[spec.label] = v
        drops = v[:-1] - v[1:]
        for k in np.flatnonzero(drops > tol):
            violations.append(Violation(spec.label, float(t[k]), float(t[k + 1]), float(drops[k])))
    return AuditReport(tuple(violations), values)
