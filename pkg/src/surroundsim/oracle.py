"""Closed-form predictors and graph-level checkers for surrounding runs.

This module collects everything that predicts or certifies behavior without
integrating: the constructive feasibility builder (a family of positions
realizing the surrounding relation exactly), initial-condition certificates
for staying away from the target, limit formulas for the point-target
special case, the zero-eigenvalue test of the fixed-graph Laplacian, the
conserved-mean distance bound for balls at the origin, and a brute-force
cycle inventory that serves as the independent oracle for the consistency
classifier.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import numerics
from .dynamics import build_laplacian
from .errors import (
    ConnectivityError,
    ConsistencyError,
    DegenerateKernelError,
    PreconditionError,
    ScaleLimitError,
)
from .geometry import Ball, ConvexBody, distance, project, sup_modulus, support_point
from .topology import (
    ConfigurationGraph,
    Consistency,
    GaugePotentials,
    classify_consistency,
    is_strongly_connected,
)

__all__ = [
    "CycleInventory",
    "CycleRecord",
    "PointLimit",
    "TheoremVerdict",
    "alpha_weights",
    "brute_force_cycles",
    "lemma3_singularity",
    "point_target_limit",
    "remark6_bound",
    "theorem1_construct",
    "theorem3_condition",
    "theorem4_condition",
]


@dataclass(frozen=True)
class TheoremVerdict:
    theorem: str
    hypothesis_satisfied: bool
    value: float
    threshold: float
    detail: str
    predicted: Optional[object] = None


def theorem1_construct(
    g: ConfigurationGraph,
    body: ConvexBody,
    seed_node: int,
    seed_point: complex,
    tol: float = 1e-9,
) -> np.ndarray:
    """Build positions satisfying the surrounding relation on every arc.

    Starting from a seed agent placed strictly outside the body, the desired
    projection residual of each newly reached agent is the oriented weight
    times its parent's residual; the agent is then placed at the extreme
    point of the body in that direction, plus the residual. The supporting
    hyperplane there guarantees the projection lands back on the extreme
    point, so the arc relation holds exactly. Weak consistency makes the
    result independent of the spanning tree and valid on non-tree arcs too.
    """
    if not (0 <= seed_node < g.n):
        raise PreconditionError(f"seed node {seed_node} out of range 0..{g.n - 1}")
    seed_point = complex(seed_point)
    if distance(body, seed_point) <= 0.0:
        raise PreconditionError("seed point must lie strictly outside the body")
    if classify_consistency(g, tol) is not Consistency.WEAKLY_CONSISTENT:
        raise ConsistencyError("feasibility construction needs a weakly consistent graph")
    resid = [None] * g.n
    z = [None] * g.n
    z[seed_node] = seed_point
    resid[seed_node] = seed_point - project(body, seed_point)
    queue = deque([seed_node])
    while queue:
        u = queue.popleft()
        for v, idx, forward in g._adj[u]:
            if resid[v] is not None:
                continue
            a = g.arcs[idx]
            # arc (u, v): resid[u] = w * resid[v]; arc (v, u): resid[v] = w * resid[u]
            e = resid[u] / a.w if forward else a.w * resid[u]
            z[v] = support_point(body, e / abs(e)) + e
            resid[v] = e
            queue.append(v)
    if any(val is None for val in z):
        raise ConnectivityError("seed node does not reach every agent in the underlying graph")
    out = np.array(z, dtype=np.complex128)
    actual = np.array([complex(p) - project(body, complex(p)) for p in out])
    for a in g.arcs:
        defect = abs(actual[a.i] - a.w * actual[a.j])
        if defect > tol:
            raise ConsistencyError(
                f"constructed positions violate arc ({a.i}, {a.j}) by {defect:.3e}"
            )
    return out


def _weighted_gauged_mean(gauge: GaugePotentials, weights, x0) -> complex:
    x0 = np.asarray(x0, dtype=np.complex128)
    if weights is None:
        weights = np.full(x0.shape[0], 1.0 / x0.shape[0])
    return complex(np.sum(weights * gauge.p * x0))


def theorem3_condition(gauge: GaugePotentials, x0, body: ConvexBody) -> TheoremVerdict:
    """Initial-condition certificate for the undirected switching case.

    When the modulus of the gauged mean of the initial state exceeds the
    supremum modulus of the body, the agents cannot all converge onto the
    body (the gauged mean is invariant along the flow). The condition is
    sufficient, never necessary.
    """
    value = abs(_weighted_gauged_mean(gauge, None, x0))
    threshold = sup_modulus(body)
    return TheoremVerdict(
        theorem="theorem3",
        hypothesis_satisfied=value > threshold,
        value=value,
        threshold=threshold,
        detail=f"|gauged mean of x0| = {value:.6g}, sup modulus of body = {threshold:.6g}",
    )


def alpha_weights(g: ConfigurationGraph, tol: float = 1e-9) -> np.ndarray:
    """Positive left-null weights of the ungauged (real) Laplacian.

    Defined for strongly connected graphs; entries are strictly positive and
    sum to one. Sign violations are reported as degeneracy rather than
    silently flipped, since for a strongly connected graph they can only
    mean the caller handed over a different matrix.
    """
    if not is_strongly_connected(g.arc_keys(), g.n):
        raise ConnectivityError("left-null weights need a strongly connected graph")
    L = np.zeros((g.n, g.n))
    for a in g.arcs:
        L[a.i, a.i] += 1.0
        L[a.i, a.j] = -1.0
    v = numerics.left_null_vector(L, tol)
    if np.abs(v.imag).max() > 1e-10:
        raise DegenerateKernelError("left-null weights came out non-real")
    if np.any(v.real <= 0.0):
        raise DegenerateKernelError("left-null weights came out non-positive")
    return v.real


def theorem4_condition(
    gauge: GaugePotentials, alpha, x0, body: ConvexBody
) -> TheoremVerdict:
    """Initial-condition certificate for the fixed strongly connected case."""
    alpha = np.asarray(alpha, dtype=float)
    x0 = np.asarray(x0, dtype=np.complex128)
    if alpha.shape != x0.shape:
        raise PreconditionError("alpha length does not match x0")
    if np.any(alpha <= 0.0) or abs(alpha.sum() - 1.0) > 1e-9:
        raise PreconditionError("alpha must be strictly positive and sum to one")
    value = abs(_weighted_gauged_mean(gauge, alpha, x0))
    threshold = sup_modulus(body)
    return TheoremVerdict(
        theorem="theorem4",
        hypothesis_satisfied=value > threshold,
        value=value,
        threshold=threshold,
        detail=f"|alpha-weighted gauged x0| = {value:.6g}, sup modulus of body = {threshold:.6g}",
    )


def lemma3_singularity(g: ConfigurationGraph, tol: float = numerics.SINGULAR_TOL) -> bool:
    """True when the full-graph Laplacian has a zero eigenvalue.

    For a fixed strongly connected graph this happens exactly when all
    directed cycles are consistent; rank deficiency is read off the LU pivot
    sequence relative to the largest pivot encountered.
    """
    if not is_strongly_connected(g.arc_keys(), g.n):
        raise PreconditionError("singularity test applies to strongly connected graphs")
    L = build_laplacian(g, g.arc_keys())
    return numerics.rank_deficient(L, tol)


@dataclass(frozen=True, eq=False)
class PointLimit:
    values: np.ndarray
    consistent: bool


def point_target_limit(
    gauge: Optional[GaugePotentials], x0, weights=None
) -> PointLimit:
    """Closed-form limit of the point-target dynamics (target = origin).

    Component ``i`` tends to the weighted gauged mean divided by ``p_i``,
    with uniform weights for undirected switching runs and the left-null
    weights for fixed strongly connected runs. ``gauge=None`` encodes an
    inconsistent graph, whose limit is the zero vector for every initial
    condition; the flag distinguishes the two cases.
    """
    x0 = np.asarray(x0, dtype=np.complex128)
    if gauge is None:
        return PointLimit(values=np.zeros_like(x0), consistent=False)
    mean = _weighted_gauged_mean(gauge, weights, x0)
    return PointLimit(values=mean / gauge.p, consistent=True)


def remark6_bound(gauge: GaugePotentials, x0, ball: Ball) -> float:
    """Lower bound on the limiting distance for a ball at the origin.

    Equals ``|gauged mean of x0| - radius``; applicable only when that mean
    lies strictly outside the ball.
    """
    if not isinstance(ball, Ball):
        raise PreconditionError("distance bound is stated for ball targets")
    if abs(ball.center) > 1e-12 * max(1.0, ball.radius):
        raise PreconditionError("distance bound needs the ball centered at the origin")
    mean = abs(_weighted_gauged_mean(gauge, None, x0))
    if not mean > ball.radius:
        raise PreconditionError(
            f"bound not applicable: |gauged mean| = {mean:.6g} <= radius {ball.radius:.6g}"
        )
    return mean - ball.radius


@dataclass(frozen=True)
class CycleRecord:
    nodes: tuple
    arcs: tuple
    holonomy: complex


@dataclass(frozen=True)
class CycleInventory:
    weak: tuple
    directed: tuple


def brute_force_cycles(g: ConfigurationGraph, max_n: int = 8) -> CycleInventory:
    """Exhaustive inventory of elementary weak and directed cycles.

    Plain anchored depth-first enumeration, deliberately naive so it can
    stand as an independent oracle for the classifier: every elementary
    cycle is anchored at its smallest node, weak cycles are deduplicated by
    their arc set (a reversed traversal uses the same arcs), and two-node
    weak cycles come from mutually inverse arc pairs.
    """
    if g.n > max_n:
        raise ScaleLimitError(f"brute-force cycle enumeration capped at {max_n} nodes")
    arcs = g.arcs
    n = g.n

    directed: list[CycleRecord] = []
    out_adj = [[] for _ in range(n)]
    for idx, a in enumerate(arcs):
        out_adj[a.i].append((a.j, idx))

    def dfs_directed(base, u, nodes, used, hol):
        for v, idx in out_adj[u]:
            if v == base and len(nodes) >= 2:
                directed.append(CycleRecord(tuple(nodes), tuple(used + [idx]), hol * arcs[idx].w))
            elif v > base and v not in nodes:
                nodes.append(v)
                used.append(idx)
                dfs_directed(base, v, nodes, used, hol * arcs[idx].w)
                nodes.pop()
                used.pop()

    for b in range(n):
        dfs_directed(b, b, [b], [], 1.0 + 0.0j)

    weak: dict[frozenset, CycleRecord] = {}
    for idx, a in enumerate(arcs):
        if a.i < a.j and g.has_arc(a.j, a.i):
            ridx = next(k for k, other in enumerate(arcs) if other.key == (a.j, a.i))
            key = frozenset((idx, ridx))
            weak[key] = CycleRecord((a.i, a.j), (idx, ridx), a.w * arcs[ridx].w)

    both_adj = [[] for _ in range(n)]
    for idx, a in enumerate(arcs):
        both_adj[a.i].append((a.j, idx, True))
        both_adj[a.j].append((a.i, idx, False))

    def dfs_weak(base, u, nodes, used, hol):
        for v, idx, forward in both_adj[u]:
            contrib = arcs[idx].w if forward else 1.0 / arcs[idx].w
            if v == base and len(nodes) >= 3:
                key = frozenset(used + [idx])
                if key not in weak:
                    weak[key] = CycleRecord(tuple(nodes), tuple(used + [idx]), hol * contrib)
            elif v > base and v not in nodes:
                nodes.append(v)
                used.append(idx)
                dfs_weak(base, v, nodes, used, hol * contrib)
                nodes.pop()
                used.pop()

    for b in range(n):
        dfs_weak(b, b, [b], [], 1.0 + 0.0j)

    weak_records = tuple(weak[k] for k in sorted(weak, key=lambda s: tuple(sorted(s))))
    return CycleInventory(weak=weak_records, directed=tuple(directed))
