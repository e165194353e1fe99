"""Thermal context, gamma-orderings, Lorenz curves and static thermomajorization.

Distributions are one-dimensional numpy arrays. In ``"float"`` mode they hold
float64 values; in ``"exact"`` mode they are object arrays of
:class:`fractions.Fraction`, so every comparison below is exact.

Level labels exposed to callers (orderings, elementary steps) are 1-based.
"""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

__all__ = [
    "ThermalContext",
    "LorenzCurve",
    "gibbs_distribution",
    "as_dist",
    "gamma_ordering",
    "all_gamma_orderings",
    "has_ordering",
    "lorenz_curve",
    "curve_height",
    "thermomajorizes",
]

FLOAT = "float"
EXACT = "exact"

_SUM_TOL = 1e-12


def to_fraction(x) -> Fraction:
    """Convert a number or ``"a/b"`` string to a Fraction.

    Floats go through their shortest decimal repr, so ``0.6`` becomes ``3/5``
    rather than the binary expansion of the double.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(repr(float(x)))
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def _to_array(values, exact: bool) -> np.ndarray:
    if exact:
        return np.array([to_fraction(v) for v in values], dtype=object)
    if any(isinstance(v, str) for v in values):
        values = [float(to_fraction(v)) if isinstance(v, str) else v for v in values]
    return np.asarray(values, dtype=float).copy()


@dataclass(frozen=True, eq=False)
class ThermalContext:
    """Fixed point ``gamma`` plus the tolerance used by every order predicate.

    Parameters
    ----------
    gamma : sequence of numbers
        Gibbs distribution, strictly positive, summing to one.
    cmp_tol : float
        Slack allowed in float comparisons. Ignored in exact mode.
    arithmetic_mode : {"float", "exact"}
    """

    gamma: np.ndarray
    cmp_tol: float = 1e-9
    arithmetic_mode: str = FLOAT

    def __post_init__(self):
        if self.arithmetic_mode not in (FLOAT, EXACT):
            raise ValueError(f"unknown arithmetic mode {self.arithmetic_mode!r}")
        if self.cmp_tol < 0:
            raise ValueError("cmp_tol must be non-negative")
        g = _to_array(list(np.ravel(np.asarray(self.gamma, dtype=object))), self.exact)
        if g.ndim != 1 or g.size < 2:
            raise ValueError("gamma must be a vector with at least two levels")
        if not all(x > 0 for x in g):
            raise ValueError("every Gibbs weight must be strictly positive")
        total = g.sum()
        if self.exact:
            if total != 1:
                raise ValueError(f"gamma sums to {total}, not exactly 1")
        elif abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"gamma sums to {total!r}, not 1")
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)

    @classmethod
    def from_energies(cls, beta, energies, **kwargs) -> "ThermalContext":
        return cls(gibbs_distribution(beta, energies), **kwargs)

    @property
    def d(self) -> int:
        return self.gamma.size

    @property
    def exact(self) -> bool:
        return self.arithmetic_mode == EXACT

    @property
    def tol(self):
        """Comparison slack actually applied (zero in exact mode)."""
        return 0 if self.exact else self.cmp_tol

    def to_exact(self) -> "ThermalContext":
        if self.exact:
            return self
        return ThermalContext(self.gamma.tolist(), self.cmp_tol, EXACT)

    def to_float(self) -> "ThermalContext":
        if not self.exact:
            return self
        return ThermalContext([float(x) for x in self.gamma], self.cmp_tol, FLOAT)

    def __repr__(self):
        g = ", ".join(str(x) for x in self.gamma)
        return f"ThermalContext(gamma=[{g}], cmp_tol={self.cmp_tol}, mode={self.arithmetic_mode!r})"


def gibbs_distribution(beta, energies) -> np.ndarray:
    """Normalized Boltzmann weights ``exp(-beta * E_i) / Z``.

    The minimum energy is subtracted before exponentiating, so large positive
    ``beta`` only underflows the excited levels; an underflow to zero is
    reported because the resulting context would be invalid.
    """
    e = np.asarray(energies, dtype=float)
    beta = float(beta)
    if not math.isfinite(beta) or not np.all(np.isfinite(e)):
        raise ValueError("beta and energies must be finite")
    if e.ndim != 1 or e.size == 0:
        raise ValueError("energies must be a non-empty vector")
    shifted = -beta * (e - (e.min() if beta >= 0 else e.max()))
    with np.errstate(over="raise", under="ignore"):
        try:
            w = np.exp(shifted)
        except FloatingPointError:
            raise ValueError("temperature out of numeric range") from None
    z = w.sum()
    out = w / z
    if not np.all(out > 0) or not math.isfinite(z):
        raise ValueError("temperature out of numeric range")
    return out


def as_dist(p, ctx: ThermalContext) -> np.ndarray:
    """Validate ``p`` as a distribution over ``ctx.d`` levels and convert it."""
    if isinstance(p, np.ndarray) and p.dtype == (object if ctx.exact else float) and p.ndim == 1:
        arr = p
    else:
        arr = _to_array(list(p), ctx.exact)
    if arr.ndim != 1 or arr.size != ctx.d:
        raise ValueError(f"dimension mismatch: expected {ctx.d} levels, got {arr.size}")
    if ctx.exact:
        if any(x < 0 for x in arr) or arr.sum() != 1:
            raise ValueError("not a probability distribution (exact)")
        return arr
    if not np.all(np.isfinite(arr)):
        raise ValueError("distribution has non-finite entries")
    if arr.min() < -_SUM_TOL or abs(arr.sum() - 1.0) > _SUM_TOL:
        raise ValueError("not a probability distribution")
    if arr.min() < 0:
        arr = np.clip(arr, 0.0, None)
    return arr


def _ratios(p, ctx: ThermalContext):
    return [p[i] / ctx.gamma[i] for i in range(ctx.d)]


def _tie_groups(p, ctx: ThermalContext) -> list[list[int]]:
    """Levels (0-based) grouped by equal ratio, groups in descending ratio."""
    r = _ratios(p, ctx)
    order = sorted(range(ctx.d), key=lambda i: -r[i])
    tol = ctx.tol
    groups = [[order[0]]]
    for prev, cur in zip(order, order[1:]):
        if r[prev] - r[cur] <= tol:
            groups[-1].append(cur)
        else:
            groups.append([cur])
    return [sorted(g) for g in groups]


def gamma_ordering(p, ctx: ThermalContext) -> tuple[int, ...]:
    """Representative gamma-ordering of ``p`` as 1-based level labels.

    Levels are sorted by non-increasing ``p_i / gamma_i``; ratios equal
    within ``ctx.cmp_tol`` keep ascending level order.

    >>> ctx = ThermalContext([0.6, 0.4])
    >>> gamma_ordering([0.1, 0.9], ctx)
    (2, 1)
    """
    p = as_dist(p, ctx)
    return tuple(i + 1 for g in _tie_groups(p, ctx) for i in g)


def all_gamma_orderings(p, ctx: ThermalContext) -> set[tuple[int, ...]]:
    """Every ordering consistent with non-increasing ratios (ties permuted)."""
    p = as_dist(p, ctx)
    groups = _tie_groups(p, ctx)
    out = set()
    for parts in itertools.product(*(itertools.permutations(g) for g in groups)):
        out.add(tuple(i + 1 for part in parts for i in part))
    return out


def has_ordering(p, ordering: Sequence[int], ctx: ThermalContext) -> bool:
    """Whether ``ordering`` (1-based) is a valid gamma-ordering of ``p``."""
    r = _ratios(p, ctx)
    tol = ctx.tol
    seq = [r[i - 1] for i in ordering]
    return all(a >= b - tol for a, b in zip(seq, seq[1:]))


@dataclass(frozen=True, eq=False)
class LorenzCurve:
    """Concave piecewise-linear curve given by its ``d + 1`` elbow points."""

    x: np.ndarray
    y: np.ndarray

    @property
    def elbows(self) -> list[tuple]:
        return list(zip(self.x.tolist(), self.y.tolist()))

    def slopes(self) -> np.ndarray:
        return np.diff(self.y) / np.diff(self.x)

    def __len__(self):
        return self.x.size


def _cumulate(values, ordering, exact: bool) -> np.ndarray:
    dtype = object if exact else float
    out = np.empty(len(ordering) + 1, dtype=dtype)
    out[0] = Fraction(0) if exact else 0.0
    acc = out[0]
    for k, i in enumerate(ordering, start=1):
        acc = acc + values[i - 1]
        out[k] = acc
    return out


def lorenz_curve(p, ctx: ThermalContext, ordering: Sequence[int] | None = None) -> LorenzCurve:
    """Thermomajorization curve of ``p`` relative to ``ctx.gamma``.

    ``ordering`` may be any valid gamma-ordering of ``p``; the curve as a point
    set does not depend on the choice. Defaults to the representative one.
    """
    p = as_dist(p, ctx)
    if ordering is None:
        ordering = gamma_ordering(p, ctx)
    x = _cumulate(ctx.gamma, ordering, ctx.exact)
    y = _cumulate(p, ordering, ctx.exact)
    # pin the end point; float cumsums can land at 1 - 1e-16
    x[-1] = y[-1] = Fraction(1) if ctx.exact else 1.0
    return LorenzCurve(x, y)


def curve_height(curve: LorenzCurve, x):
    """Height of the curve at ``x`` in [0, 1] by linear interpolation."""
    if x < 0 or x > 1:
        raise ValueError(f"x={x} outside [0, 1]")
    xs = curve.x
    k = bisect.bisect_left(list(xs), x)
    if k < len(xs) and xs[k] == x:
        return curve.y[k]
    if k == 0:
        return curve.y[0]
    if k >= len(xs):
        return curve.y[-1]
    x0, x1 = xs[k - 1], xs[k]
    y0, y1 = curve.y[k - 1], curve.y[k]
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


def thermomajorizes(p, q, ctx: ThermalContext) -> bool:
    """Static thermomajorization ``p >_gamma q``.

    True iff the curve of ``p`` is nowhere below that of ``q`` (up to
    ``ctx.cmp_tol``). By concavity of the curve of ``p`` it is enough to test
    the elbows of ``q``.
    """
    cp = lorenz_curve(p, ctx)
    cq = lorenz_curve(q, ctx)
    tol = ctx.tol
    if ctx.exact:
        return all(curve_height(cp, x) >= y - tol for x, y in zip(cq.x[1:-1], cq.y[1:-1]))
    heights = np.interp(cq.x[1:-1], cp.x, cp.y)
    return bool(np.all(heights >= cq.y[1:-1] - tol))

