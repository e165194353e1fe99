"""Deciding continuous thermomajorization.

Two independent routes are provided:

* :func:`theorem4_direct` walks every canonical sequence of gamma-orderings
  (simple paths in the adjacent-transposition graph on permutations), applies
  the full thermalizations along it and tests the endpoint against ``q``.
* :func:`check_continuous` and :func:`reachable_set` run a breadth-first
  frontier over full thermalizations of adjacent levels, keeping for every
  ordering an antichain of non-dominated ("optimal") states together with the
  steps that produced them.

Both return witness protocols that end exactly at ``q``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterator, Mapping, Sequence

import numpy as np

from .core import (
    ThermalContext,
    all_gamma_orderings,
    as_dist,
    has_ordering,
    lorenz_curve,
    thermomajorizes,
)
from .protocol import ENDPOINT_TOL, NotSynthesizableError, within_ordering_protocol
from .thermalization import ElementaryStep, Protocol, _thermalize, apply_protocol

__all__ = [
    "Decision",
    "ReachableSet",
    "canonical_sequences",
    "theorem4_direct",
    "check_continuous",
    "reachable_set",
    "query_reachable",
]

Ordering = tuple[int, ...]

_CHUNK = 256


@dataclass(frozen=True)
class Decision:
    """Outcome of a reachability query.

    ``crossings`` is the number of full thermalizations in the witness prefix;
    the remaining ``len(witness) - crossings`` steps stay inside one ordering.
    """

    reachable: bool
    witness: Protocol | None = None
    crossings: int = 0
    exact_recheck: bool = False

    def __post_init__(self):
        if self.reachable != (self.witness is not None):
            raise ValueError("a witness must be present exactly when reachable")

    @property
    def partial(self) -> int:
        return 0 if self.witness is None else len(self.witness) - self.crossings

    def __bool__(self):
        return self.reachable


@dataclass(frozen=True, eq=False)
class ReachableSet:
    """Optimal states per gamma-ordering, each with the protocol producing it from ``p``."""

    p: np.ndarray
    ctx: ThermalContext
    buckets: Mapping[Ordering, tuple[tuple[np.ndarray, Protocol], ...]] = field(repr=False)

    def orderings(self) -> list[Ordering]:
        return sorted(self.buckets)

    def states(self, ordering: Sequence[int]) -> list[np.ndarray]:
        return [s for s, _ in self.buckets[tuple(ordering)]]

    def __len__(self):
        return len(self.buckets)

    def __getitem__(self, ordering):
        return self.buckets[tuple(ordering)]


# -- canonical sequences -----------------------------------------------------


def _neighbours(node: Ordering) -> list[tuple[Ordering, int]]:
    """Adjacent transpositions of ``node`` with their position, lexicographically sorted."""
    out = []
    for k in range(len(node) - 1):
        nb = list(node)
        nb[k], nb[k + 1] = nb[k + 1], nb[k]
        out.append((tuple(nb), k))
    out.sort()
    return out


def _check_perm(perm: Sequence[int], d: int):
    if sorted(perm) != list(range(1, d + 1)):
        raise ValueError(f"{tuple(perm)} is not a permutation of 1..{d}")


def canonical_sequences(start: Sequence[int], end: Sequence[int]) -> Iterator[tuple[Ordering, ...]]:
    """Every canonical sequence of orderings from ``start`` to ``end``.

    Consecutive orderings differ by one adjacent transposition and none repeats.
    Sequences are produced by depth-first search visiting neighbours in
    lexicographic order.

    >>> len(list(canonical_sequences((3, 2, 1), (1, 2, 3))))
    2
    """
    start, end = tuple(start), tuple(end)
    if len(start) != len(end):
        raise ValueError("orderings of different dimension")
    _check_perm(start, len(start))
    _check_perm(end, len(end))
    path = [start]
    seen = {start}

    def walk(node):
        if node == end:
            yield tuple(path)
            return
        for nb, _ in _neighbours(node):
            if nb in seen:
                continue
            seen.add(nb)
            path.append(nb)
            yield from walk(nb)
            path.pop()
            seen.discard(nb)

    yield from walk(start)


# -- helpers shared by both routes -------------------------------------------


def _min_slack(s, q, ctx: ThermalContext):
    """``min_x (L_s(x) - L_q(x))`` over the interior elbows of ``q``."""
    cs = lorenz_curve(s, ctx)
    cq = lorenz_curve(q, ctx)
    xs, ys = cq.x[1:-1], cq.y[1:-1]
    if len(xs) == 0:
        return 0
    if ctx.exact:
        from .core import curve_height
        return min(curve_height(cs, x) - y for x, y in zip(xs, ys))
    return float(np.min(np.interp(xs, cs.x, cs.y) - ys))


class _Borderline:
    """Records whether any comparison against the target landed within tolerance."""

    def __init__(self, ctx: ThermalContext):
        self.tol = ctx.tol
        self.flag = False

    def check(self, slack) -> bool:
        if not self.tol == 0 and abs(slack) <= self.tol:
            self.flag = True
        return slack >= -self.tol


def _finish(prefix: list[ElementaryStep], f, q, ordering, ctx) -> Decision:
    suffix = within_ordering_protocol(f, q, ctx, ordering=ordering)
    return Decision(True, Protocol(tuple(prefix)) + suffix, crossings=len(prefix))


def _rationalize(values) -> list[Fraction] | None:
    out = []
    for v in values:
        fr = Fraction(float(v)).limit_denominator(10**9)
        if abs(float(fr) - float(v)) > 1e-15:
            return None
        out.append(fr)
    return out


def _with_exact_recheck(search, p, q, ctx: ThermalContext) -> Decision:
    decision, borderline = search(p, q, ctx)
    if ctx.exact or not borderline:
        return decision
    gamma = _rationalize(ctx.gamma)
    pe, qe = _rationalize(p), _rationalize(q)
    if gamma is None or pe is None or qe is None:
        return decision
    if sum(gamma) != 1 or sum(pe) != 1 or sum(qe) != 1:
        return decision
    ectx = ThermalContext(gamma, ctx.cmp_tol, "exact")
    exact_decision, _ = search(np.array(pe, dtype=object), np.array(qe, dtype=object), ectx)
    if not exact_decision.reachable:
        return Decision(False, exact_recheck=True)
    witness = Protocol(tuple(ElementaryStep(s.i, s.j, float(s.lam)) for s in exact_decision.witness))
    end = apply_protocol(p, witness, ctx)
    if float(np.max(np.abs(end - q))) > ENDPOINT_TOL:
        raise RuntimeError("exact witness does not reproduce the target in float arithmetic")
    return Decision(True, witness, exact_decision.crossings, exact_recheck=True)


# -- direct enumeration --------------------------------------------------------


def _theorem4_search(p, q, ctx: ThermalContext, prune: bool = True, stats: dict | None = None):
    p = as_dist(p, ctx)
    q = as_dist(q, ctx)
    border = _Borderline(ctx)
    counter = stats if stats is not None else {}
    counter["sequences"] = 0
    if prune and not border.check(_min_slack(p, q, ctx)):
        return Decision(False), border.flag

    starts = sorted(all_gamma_orderings(p, ctx))
    ends = all_gamma_orderings(q, ctx)
    g = ctx.gamma
    one = Fraction(1) if ctx.exact else 1.0

    def walk(node, f, seen, prefix):
        if node in ends:
            counter["sequences"] += 1
            if border.check(_min_slack(f, q, ctx)):
                try:
                    return _finish(prefix, f, q, node, ctx)
                except NotSynthesizableError:
                    pass
            if len(ends) == 1:
                return None
        for nb, k in _neighbours(node):
            if nb in seen:
                continue
            a, b = node[k], node[k + 1]
            child = _thermalize(f, a - 1, b - 1, one, g)
            if prune and not border.check(_min_slack(child, q, ctx)):
                continue
            seen.add(nb)
            prefix.append(ElementaryStep(a, b, one))
            found = walk(nb, child, seen, prefix)
            prefix.pop()
            seen.discard(nb)
            if found is not None:
                return found
        return None

    for start in starts:
        found = walk(start, p, {start}, [])
        if found is not None:
            return found, border.flag
    return Decision(False), border.flag


def theorem4_direct(p, q, ctx: ThermalContext, prune: bool = True) -> Decision:
    """Decide ``p >>_gamma q`` by enumerating canonical sequences.

    For each canonical sequence from an ordering of ``p`` to an ordering of
    ``q``, the full thermalizations of the transposed levels are applied to
    ``p`` and the result ``f`` is compared with ``q``. The first success is
    completed into a witness with :func:`within_ordering_protocol`.

    With ``prune`` a prefix is abandoned as soon as its state stops
    thermomajorizing ``q``; every later state along it is thermomajorized by
    the current one, so no success is lost.
    """
    return _with_exact_recheck(lambda a, b, c: _theorem4_search(a, b, c, prune), p, q, ctx)


# -- frontier search -----------------------------------------------------------


class _Node:
    __slots__ = ("p", "order", "parent", "step", "mask", "depth")

    def __init__(self, p, order, parent, step, mask, depth):
        self.p = p
        self.order = order
        self.parent = parent
        self.step = step
        self.mask = mask
        self.depth = depth

    def history(self) -> list[ElementaryStep]:
        out = []
        node = self
        while node.parent is not None:
            out.append(node.step)
            node = node.parent
        out.reverse()
        return out


class _Bucket:
    __slots__ = ("idx", "nodes", "Y")

    def __init__(self, ordering: Ordering, d: int, exact: bool):
        self.idx = np.array([i - 1 for i in ordering])
        self.nodes: list[_Node] = []
        self.Y = np.empty((0, d - 1), dtype=object if exact else float)

    def cumulative(self, P: np.ndarray) -> np.ndarray:
        return np.cumsum(P[:, self.idx], axis=1)[:, :-1]


def _dominated(A: np.ndarray, B: np.ndarray, tol) -> np.ndarray:
    """``out[x, y]`` is True when row ``B[y]`` dominates row ``A[x]`` componentwise."""
    n, m = A.shape[0], B.shape[0]
    out = np.zeros((n, m), dtype=bool)
    if n == 0 or m == 0:
        return out
    for s in range(0, n, _CHUNK):
        block = A[s:s + _CHUNK]
        cmp = B[None, :, :] >= (block[:, None, :] - tol)
        out[s:s + _CHUNK] = np.asarray(cmp, dtype=bool).all(axis=-1)
    return out


def _heights(P, orders, xs, gamma, exact):
    """Curve heights of every row of ``P`` (valid in ``orders``) at points ``xs``."""
    rows = np.arange(P.shape[0])[:, None]
    ps = P[rows, orders]
    gs = gamma[orders]
    zero = np.zeros((P.shape[0], 1), dtype=P.dtype)
    if exact:
        zero[:] = Fraction(0)
    X = np.concatenate([zero, np.cumsum(gs, axis=1)], axis=1)[:, :-1]
    Y = np.concatenate([zero, np.cumsum(ps, axis=1)], axis=1)[:, :-1]
    S = ps / gs
    xs = np.asarray(xs, dtype=P.dtype)
    lines = Y[:, None, :] + S[:, None, :] * (xs[None, :, None] - X[:, None, :])
    return lines.min(axis=-1)


def _frontier_search(p, ctx: ThermalContext, target=None):
    """Run the frontier algorithm; returns buckets, or the first hit when ``target`` is set."""
    d = ctx.d
    tol = ctx.tol
    exact = ctx.exact
    gamma = ctx.gamma
    one = Fraction(1) if exact else 1.0
    bits: dict[Ordering, int] = {}
    buckets: dict[Ordering, _Bucket] = {}
    border = _Borderline(ctx)

    def bit(o):
        b = bits.get(o)
        if b is None:
            b = bits[o] = 1 << len(bits)
        return b

    if target is not None:
        cq = lorenz_curve(target, ctx)
        qx, qy = cq.x[1:-1], cq.y[1:-1]
        if not border.check(_min_slack(p, target, ctx)):
            return None, border.flag

    def hits(nodes):
        for node in nodes:
            if has_ordering(target, node.order, ctx):
                return node
        return None

    seeds = []
    for o in sorted(all_gamma_orderings(p, ctx)):
        node = _Node(p, o, None, None, bit(o), 0)
        b = buckets[o] = _Bucket(o, d, exact)
        b.nodes.append(node)
        b.Y = b.cumulative(p[None, :])
        seeds.append(node)
    if target is not None:
        hit = hits(seeds)
        if hit is not None:
            return hit, border.flag

    current = seeds
    while current:
        P = np.array([n.p for n in current], dtype=object if exact else float)
        orders = np.array([[i - 1 for i in n.order] for n in current])
        rows = np.arange(len(current))
        children: dict[Ordering, list[tuple[_Node, np.ndarray]]] = {}
        for k in range(d - 1):
            a = orders[:, k]
            b = orders[:, k + 1]
            pa, pb = P[rows, a], P[rows, b]
            ga, gb = gamma[a], gamma[b]
            total = pa + pb
            new_a = total * ga / (ga + gb)
            new_b = total - new_a
            C = P.copy()
            C[rows, a] = new_a
            C[rows, b] = new_b
            keep = np.ones(len(current), dtype=bool)
            if target is not None:
                cord = orders.copy()
                cord[:, [k, k + 1]] = cord[:, [k + 1, k]]
                H = _heights(C, cord, qx, gamma, exact)
                slack = (H - qy[None, :]).min(axis=1) if len(qx) else np.zeros(len(current))
                keep = np.array([border.check(s) for s in slack], dtype=bool)
            for r in np.flatnonzero(keep):
                parent = current[r]
                o = list(parent.order)
                o[k], o[k + 1] = o[k + 1], o[k]
                o = tuple(o)
                ob = bit(o)
                if parent.mask & ob:
                    continue
                step = ElementaryStep(parent.order[k], parent.order[k + 1], one)
                node = _Node(C[r], o, parent, step, parent.mask | ob, parent.depth + 1)
                children.setdefault(o, []).append((node, C[r]))

        current = []
        for o in sorted(children):
            group = children[o]
            group.sort(key=lambda item: tuple(item[1].tolist()))
            bucket = buckets.get(o)
            if bucket is None:
                bucket = buckets[o] = _Bucket(o, d, exact)
            nodes = [n for n, _ in group]
            Yc = bucket.cumulative(np.array([row for _, row in group], dtype=P.dtype))
            keep = ~_dominated(Yc, bucket.Y, tol).any(axis=1)
            nodes = [n for n, kp in zip(nodes, keep) if kp]
            Yc = Yc[keep]
            D = _dominated(Yc, Yc, tol)
            np.fill_diagonal(D, False)
            idx = np.arange(len(nodes))
            # ties (mutual domination) go to the earlier, lexicographically smaller state
            removes = D & (~D.T | (idx[None, :] < idx[:, None]))
            keep = ~removes.any(axis=1)
            nodes = [n for n, kp in zip(nodes, keep) if kp]
            Yc = Yc[keep]
            if not nodes:
                continue
            stale = _dominated(bucket.Y, Yc, tol).any(axis=1)
            bucket.nodes = [n for n, s in zip(bucket.nodes, stale) if not s] + nodes
            bucket.Y = np.concatenate([bucket.Y[~stale], Yc], axis=0)
            current.extend(nodes)
        if target is not None:
            hit = hits(current)
            if hit is not None:
                return hit, border.flag

    if target is not None:
        return None, border.flag
    return buckets, border.flag


def _check_search(p, q, ctx: ThermalContext):
    p = as_dist(p, ctx)
    q = as_dist(q, ctx)
    hit, flag = _frontier_search(p, ctx, target=q)
    if hit is None:
        return Decision(False), flag
    try:
        return _finish(hit.history(), hit.p, q, hit.order, ctx), flag
    except NotSynthesizableError:
        pass
    # the first hit could not be completed; fall back to the full reachable set
    rs = _build_reachable(p, ctx)
    return query_reachable(rs, q, ctx), flag


def check_continuous(p, q, ctx: ThermalContext) -> Decision:
    """Decide ``p >>_gamma q`` with the frontier algorithm (target-pruned variant).

    Frontier states that stop thermomajorizing ``q`` are discarded. The search
    stops at the first optimal state sharing an ordering with ``q``; its
    history plus a within-ordering suffix is returned as the witness, and the
    witness is checked to reproduce ``q`` within ``1e-9``.
    """
    decision = _with_exact_recheck(_check_search, p, q, ctx)
    if decision.reachable:
        p_ = as_dist(p, ctx)
        end = apply_protocol(p_, decision.witness, ctx)
        q_ = as_dist(q, ctx)
        if ctx.exact:
            ok = all(a == b for a, b in zip(end, q_))
        else:
            ok = float(np.max(np.abs(end - q_))) <= ENDPOINT_TOL
        if not ok:
            raise RuntimeError("witness failed to reproduce the target")
    return decision


def _build_reachable(p, ctx: ThermalContext) -> ReachableSet:
    buckets, _ = _frontier_search(p, ctx)
    frozen = {}
    for o in sorted(buckets):
        items = []
        for node in buckets[o].nodes:
            state = node.p.copy()
            state.setflags(write=False)
            items.append((state, Protocol(tuple(node.history()))))
        frozen[o] = tuple(items)
    pp = p.copy()
    pp.setflags(write=False)
    return ReachableSet(pp, ctx, MappingProxyType(frozen))


def reachable_set(p, ctx: ThermalContext) -> ReachableSet:
    """All optimal states reachable from ``p``, bucketed by gamma-ordering.

    A distribution ``q`` is reachable iff some state in a bucket whose
    ordering is valid for ``q`` thermomajorizes it.
    """
    return _build_reachable(as_dist(p, ctx), ctx)


def query_reachable(rs: ReachableSet, q, ctx: ThermalContext) -> Decision:
    """Answer ``p >>_gamma q`` from a precomputed :class:`ReachableSet`."""
    if rs.ctx.d != ctx.d:
        raise ValueError("dimension mismatch between reachable set and context")
    q = as_dist(q, ctx)
    for o in rs.orderings():
        if not has_ordering(q, o, ctx):
            continue
        for state, history in rs.buckets[o]:
            if thermomajorizes(state, q, ctx):
                try:
                    suffix = within_ordering_protocol(state, q, ctx, ordering=o)
                except NotSynthesizableError:
                    continue
                return Decision(True, history + suffix, crossings=len(history))
    return Decision(False)
