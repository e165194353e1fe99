"""Witness synthesis: the within-ordering stage and complete protocols."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .core import ThermalContext, _tie_groups, as_dist, has_ordering, thermomajorizes
from .thermalization import ElementaryStep, Protocol, apply_protocol

__all__ = [
    "NotSynthesizableError",
    "common_ordering",
    "within_ordering_protocol",
    "full_protocol",
    "ENDPOINT_TOL",
]

ENDPOINT_TOL = 1e-9
_ZERO = 1e-14


class NotSynthesizableError(ValueError):
    """Raised when no within-ordering protocol can map ``f`` to ``q``."""


def common_ordering(f, q, ctx: ThermalContext) -> tuple[int, ...] | None:
    """A gamma-ordering valid for both ``f`` and ``q``, or None.

    Groups of levels tied in ``q`` are sorted by the ratios of ``f``; if any
    shared ordering exists, this one is shared.
    """
    f = as_dist(f, ctx)
    q = as_dist(q, ctx)
    rf = [f[i] / ctx.gamma[i] for i in range(ctx.d)]
    ordering = []
    for group in _tie_groups(q, ctx):
        ordering.extend(sorted(group, key=lambda i: (-rf[i], i)))
    ordering = tuple(i + 1 for i in ordering)
    return ordering if has_ordering(f, ordering, ctx) else None


def within_ordering_protocol(f, q, ctx: ThermalContext,
                             ordering: Sequence[int] | None = None) -> Protocol:
    """At most ``d - 1`` partial thermalizations taking ``f`` to ``q`` inside one ordering.

    Works in the positions of the shared ordering. Let ``u = f - q`` there.
    Each step takes the last position ``j`` with surplus and the first later
    position ``k`` with deficit, and moves ``min(u_j, -u_k)`` from ``j`` to
    ``k`` with a partial thermalization of that pair. This zeroes one more
    entry of ``u`` per step and never breaks the ordering, so ``d - 1`` steps
    suffice.

    Raises
    ------
    NotSynthesizableError
        If the two distributions share no ordering, ``f`` does not
        thermomajorize ``q``, or the result fails its endpoint check.
    """
    f = as_dist(f, ctx)
    q = as_dist(q, ctx)
    if ordering is None:
        ordering = common_ordering(f, q, ctx)
        if ordering is None:
            raise NotSynthesizableError("not synthesizable within ordering: no shared gamma-ordering")
    elif not (has_ordering(f, ordering, ctx) and has_ordering(q, ordering, ctx)):
        raise NotSynthesizableError(f"not synthesizable within ordering: {ordering} is not shared")
    if not thermomajorizes(f, q, ctx):
        raise NotSynthesizableError("not synthesizable within ordering: f does not thermomajorize q")

    d = ctx.d
    idx = [i - 1 for i in ordering]
    g = [ctx.gamma[i] for i in idx]
    cur = [f[i] for i in idx]
    tgt = [q[i] for i in idx]
    eps = 0 if ctx.exact else _ZERO

    steps = []
    for _ in range(d - 1):
        u = [c - t for c, t in zip(cur, tgt)]
        surplus = [m for m in range(d) if u[m] > eps]
        if not surplus:
            break
        j = surplus[-1]
        deficit = [m for m in range(j + 1, d) if u[m] < -eps]
        if not deficit:
            break
        k = deficit[0]
        delta = min(u[j], -u[k])
        # transfer that equalizes the two ratios, i.e. lambda = 1
        full = (cur[j] * g[k] - cur[k] * g[j]) / (g[j] + g[k])
        if full <= 0:
            break
        lam = delta / full
        if not ctx.exact:
            lam = min(max(float(lam), 0.0), 1.0)
        steps.append(ElementaryStep(idx[j] + 1, idx[k] + 1, lam))
        if u[j] <= -u[k]:
            cur[j] = tgt[j]
            cur[k] = cur[k] + delta
        else:
            cur[k] = tgt[k]
            cur[j] = cur[j] - delta

    proto = Protocol(tuple(steps))
    _verify(f, q, proto, ordering, ctx)
    return proto


def _verify(f, q, proto: Protocol, ordering, ctx: ThermalContext):
    r = f
    for s in proto:
        r = apply_protocol(r, (s,), ctx)
        if not has_ordering(r, ordering, ctx):
            raise NotSynthesizableError(f"intermediate state left ordering {ordering}")
    if ctx.exact:
        ok = all(a == b for a, b in zip(r, q))
    else:
        ok = float(np.max(np.abs(r - q))) <= ENDPOINT_TOL
    if not ok or len(proto) > ctx.d - 1:
        raise NotSynthesizableError("within-ordering protocol failed its endpoint check")


def full_protocol(p, q, ctx: ThermalContext) -> Protocol | None:
    """Complete witness ``p -> q`` (crossing prefix then within-ordering suffix), or None."""
    from .verifier import check_continuous

    decision = check_continuous(p, q, ctx)
    return decision.witness if decision.reachable else None
