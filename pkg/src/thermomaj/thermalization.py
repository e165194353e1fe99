"""Elementary two-level thermalizations and protocols built from them."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

from .core import ThermalContext, as_dist, to_fraction

__all__ = [
    "ElementaryStep",
    "Protocol",
    "elementary_step",
    "apply_protocol",
    "compose_lambda",
    "step_matrix",
]


@dataclass(frozen=True, order=True)
class ElementaryStep:
    """Partial thermalization of levels ``i`` and ``j`` (1-based) with weight ``lam``.

    The pair is unordered and stored with ``i < j``.
    """

    i: int
    j: int
    lam: float | Fraction

    def __post_init__(self):
        i, j = int(self.i), int(self.j)
        if i == j:
            raise ValueError("an elementary step needs two distinct levels")
        if i < 1 or j < 1:
            raise ValueError("level labels are 1-based")
        if not 0 <= self.lam <= 1:
            raise ValueError(f"lambda={self.lam} outside [0, 1]")
        if i > j:
            i, j = j, i
        object.__setattr__(self, "i", i)
        object.__setattr__(self, "j", j)

    @property
    def pair(self) -> tuple[int, int]:
        return (self.i, self.j)

    def to_dict(self) -> dict:
        return {"i": self.i, "j": self.j, "lambda": self.lam}


@dataclass(frozen=True)
class Protocol:
    """Ordered sequence of elementary steps, applied left to right."""

    steps: tuple[ElementaryStep, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    @classmethod
    def from_triples(cls, triples: Iterable) -> "Protocol":
        return cls(tuple(ElementaryStep(i, j, lam) for i, j, lam in triples))

    def __len__(self):
        return len(self.steps)

    def __iter__(self) -> Iterator[ElementaryStep]:
        return iter(self.steps)

    def __getitem__(self, k):
        if isinstance(k, slice):
            return Protocol(self.steps[k])
        return self.steps[k]

    def __add__(self, other: "Protocol") -> "Protocol":
        return Protocol(self.steps + tuple(other))

    def triples(self) -> list[tuple]:
        return [(s.i, s.j, s.lam) for s in self.steps]


def _check_indices(step: ElementaryStep, d: int):
    if step.j > d:
        raise ValueError(f"level index {step.j} out of range for d={d}")


def _thermalize(p: np.ndarray, a: int, b: int, lam, gamma: np.ndarray) -> np.ndarray:
    """Unchecked step on 0-based levels ``a``, ``b``; returns a new array."""
    out = p.copy()
    if lam == 0:
        return out
    ga, gb = gamma[a], gamma[b]
    total = p[a] + p[b]
    keep = 1 - lam
    new_a = keep * p[a] + lam * total * ga / (ga + gb)
    out[a] = new_a
    # conserve the pair total exactly rather than recomputing the partner
    out[b] = total - new_a
    return out


def elementary_step(p, step: ElementaryStep, ctx: ThermalContext) -> np.ndarray:
    """Apply ``T^{i,j}(lam)`` to ``p``.

    Entries ``i`` and ``j`` relax towards ``(p_i + p_j) * gamma_k / (gamma_i + gamma_j)``
    with mixing weight ``lam``; all other entries are untouched.

    >>> ctx = ThermalContext([1/3, 1/3, 1/3])
    >>> elementary_step([0.1, 0.3, 0.6], ElementaryStep(2, 3, 1.0), ctx).round(12).tolist()
    [0.1, 0.45, 0.45]
    """
    p = as_dist(p, ctx)
    _check_indices(step, ctx.d)
    lam = to_fraction(step.lam) if ctx.exact else float(step.lam)
    return _thermalize(p, step.i - 1, step.j - 1, lam, ctx.gamma)


def apply_protocol(p, proto: Protocol | Iterable[ElementaryStep], ctx: ThermalContext) -> np.ndarray:
    """Sequentially apply every step of ``proto``; the empty protocol is the identity."""
    p = as_dist(p, ctx)
    steps = list(proto)
    for s in steps:
        _check_indices(s, ctx.d)
    for s in steps:
        lam = to_fraction(s.lam) if ctx.exact else float(s.lam)
        p = _thermalize(p, s.i - 1, s.j - 1, lam, ctx.gamma)
    return p


def compose_lambda(lam1, lam2):
    """Weight of the single step equal to ``T(lam2) @ T(lam1)`` on the same pair."""
    if not (0 <= lam1 <= 1 and 0 <= lam2 <= 1):
        raise ValueError("both weights must lie in [0, 1]")
    return 1 - (1 - lam1) * (1 - lam2)


def step_matrix(step: ElementaryStep, ctx: ThermalContext) -> np.ndarray:
    """Full ``d x d`` column-stochastic matrix of an elementary step."""
    d = ctx.d
    _check_indices(step, d)
    a, b = step.i - 1, step.j - 1
    g = ctx.gamma
    if ctx.exact:
        lam = to_fraction(step.lam)
        m = np.array([[Fraction(int(r == c)) for c in range(d)] for r in range(d)], dtype=object)
    else:
        lam = float(step.lam)
        m = np.eye(d)
    s = g[a] + g[b]
    for r in (a, b):
        for c in (a, b):
            m[r, c] = (1 - lam) * (r == c) + lam * g[r] / s
    return m
