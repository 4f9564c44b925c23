"""Configuration graphs, switching schedules, cycle consistency, gauges.

A configuration graph is a digraph on nodes ``0..n-1`` whose arcs carry
nonzero complex weights. An arc ``(i, j)`` means agent ``i`` listens to
agent ``j``; in the default mode every weight has unit modulus, while the
scaled mode admits arbitrary positive moduli (encoding desired distance
ratios on top of angles).

The holonomy of a weak cycle is the product of arc weights, inverted for
arcs traversed against their direction. A graph is weakly consistent when
every weak cycle has holonomy one; because holonomy is multiplicative over
the cycle space, it suffices to propagate node potentials over a spanning
forest and check closure on every arc. Directed consistency is decided by
enumerating elementary directed circuits (Johnson's algorithm) at desk
scale.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ConnectivityError,
    ConsistencyError,
    GraphError,
    MalformedCycleError,
    PreconditionError,
    ScaleLimitError,
    ScheduleError,
)

CONSISTENCY_TOL = 1e-9
UNIT_WEIGHT_TOL = 1e-9
MAX_CIRCUIT_NODES = 12
MAX_CIRCUITS = 10_000

ArcKey = tuple  # (i, j)

__all__ = [
    "Arc",
    "ConfigurationGraph",
    "Consistency",
    "GaugePotentials",
    "Segment",
    "SwitchingSchedule",
    "classify_consistency",
    "cycle_holonomy",
    "elementary_circuits",
    "gauge_potentials",
    "is_strongly_connected",
    "strongly_connected_components",
    "union_graph",
    "verify_ujsc",
]


@dataclass(frozen=True)
class Arc:
    i: int
    j: int
    w: complex

    def __post_init__(self):
        object.__setattr__(self, "w", complex(self.w))

    @property
    def key(self) -> ArcKey:
        return (self.i, self.j)


@dataclass(frozen=True)
class ConfigurationGraph:
    n: int
    arcs: tuple
    unit_weights: bool = True
    _by_key: dict = field(init=False, repr=False, compare=False)
    _adj: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 1):
            raise GraphError(f"node count must be a positive integer, got {self.n!r}")
        arcs = tuple(a if isinstance(a, Arc) else Arc(*a) for a in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        by_key = {}
        for a in arcs:
            if not (0 <= a.i < self.n and 0 <= a.j < self.n):
                raise GraphError(f"arc ({a.i}, {a.j}) references a node outside 0..{self.n - 1}")
            if a.i == a.j:
                raise GraphError(f"self-loop ({a.i}, {a.i}) is not allowed")
            if a.key in by_key:
                raise GraphError(f"duplicate arc ({a.i}, {a.j})")
            mod = abs(a.w)
            if not (mod > 0.0 and np.isfinite(mod)):
                raise GraphError(f"arc ({a.i}, {a.j}) weight must be nonzero and finite")
            if self.unit_weights and abs(mod - 1.0) > UNIT_WEIGHT_TOL:
                raise GraphError(
                    f"arc ({a.i}, {a.j}) has |w|={mod!r}; unit modulus required "
                    "unless the graph is built with unit_weights=False"
                )
            by_key[a.key] = a
        adj = [[] for _ in range(self.n)]
        for idx, a in enumerate(arcs):
            adj[a.i].append((a.j, idx, True))
            adj[a.j].append((a.i, idx, False))
        object.__setattr__(self, "_by_key", by_key)
        object.__setattr__(self, "_adj", tuple(tuple(row) for row in adj))

    def weight(self, i: int, j: int) -> complex:
        try:
            return self._by_key[(i, j)].w
        except KeyError:
            raise GraphError(f"no arc ({i}, {j}) in the configuration graph") from None

    def has_arc(self, i: int, j: int) -> bool:
        return (i, j) in self._by_key

    def arc_keys(self) -> tuple:
        return tuple(a.key for a in self.arcs)

    def underlying_connected(self) -> bool:
        if self.n == 1:
            return True
        seen = [False] * self.n
        seen[0] = True
        queue = deque([0])
        count = 1
        while queue:
            u = queue.popleft()
            for v, _, _ in self._adj[u]:
                if not seen[v]:
                    seen[v] = True
                    count += 1
                    queue.append(v)
        return count == self.n


@dataclass(frozen=True)
class Segment:
    duration: float
    active: frozenset

    def __post_init__(self):
        if not (self.duration > 0.0 and np.isfinite(self.duration)):
            raise ScheduleError(f"segment duration must be positive, got {self.duration!r}")
        object.__setattr__(
            self, "active", frozenset((int(i), int(j)) for i, j in self.active)
        )


@dataclass(frozen=True)
class SwitchingSchedule:
    """Piecewise-constant activation of configuration arcs.

    Segments apply in order; with ``repeat`` the sequence extends
    periodically. The active set is right-continuous: at a switching instant
    the new segment's arcs apply. Every duration must respect the dwell
    floor.
    """

    segments: tuple
    repeat: bool
    dwell_floor: float
    _starts: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        segs = tuple(
            s if isinstance(s, Segment) else Segment(s[0], frozenset(s[1]))
            for s in self.segments
        )
        if not segs:
            raise ScheduleError("schedule needs at least one segment")
        object.__setattr__(self, "segments", segs)
        if not (self.dwell_floor > 0.0 and np.isfinite(self.dwell_floor)):
            raise ScheduleError(f"dwell floor must be positive, got {self.dwell_floor!r}")
        starts = [0.0]
        for s in segs:
            if s.duration < self.dwell_floor - 1e-12 * self.dwell_floor:
                raise ScheduleError(
                    f"segment duration {s.duration!r} is below the dwell floor {self.dwell_floor!r}"
                )
            starts.append(starts[-1] + s.duration)
        object.__setattr__(self, "_starts", tuple(starts))

    @property
    def total_duration(self) -> float:
        return self._starts[-1]

    def boundaries(self) -> tuple:
        """Segment start times within one pass (period when repeating)."""
        return self._starts[:-1]

    def validate_arcs(self, graph: ConfigurationGraph) -> None:
        for k, seg in enumerate(self.segments):
            for key in seg.active:
                if not graph.has_arc(*key):
                    raise ScheduleError(
                        f"segment {k} activates arc {key} which is not in the configuration graph"
                    )

    def segment_index_at(self, t: float) -> int:
        if t < 0.0:
            raise ScheduleError(f"time must be nonnegative, got {t!r}")
        total = self.total_duration
        if self.repeat:
            t = t % total
        elif t >= total:
            raise ScheduleError(f"time {t!r} is past the end of a non-repeating schedule")
        for k in range(len(self.segments)):
            if t < self._starts[k + 1]:
                return k
        return len(self.segments) - 1

    def active_at(self, t: float) -> frozenset:
        return self.segments[self.segment_index_at(t)].active


def union_graph(sched: SwitchingSchedule, t0: float, t1: float) -> frozenset:
    """Union of active arc sets over every segment intersecting ``[t0, t1)``."""
    if not (0.0 <= t0 < t1):
        raise PreconditionError(f"need 0 <= t0 < t1, got t0={t0!r}, t1={t1!r}")
    total = sched.total_duration
    everything = frozenset().union(*(s.active for s in sched.segments))
    if sched.repeat:
        if t1 - t0 >= total:
            return everything
        span = t1 - t0
        t0 = t0 % total
        t1 = t0 + span
        passes = 2
    else:
        passes = 1
    out = set()
    for p in range(passes):
        base = p * total
        for k, seg in enumerate(sched.segments):
            s0 = base + sched._starts[k]
            s1 = s0 + seg.duration
            if s1 > t0 and s0 < t1:
                out |= seg.active
    return frozenset(out)


def verify_ujsc(sched: SwitchingSchedule, window: float, n: int) -> bool:
    """Check uniform joint strong connectivity over windows of the given length.

    Because the active set is piecewise constant, the union over
    ``[t, t + window)`` can only shrink as ``t`` approaches a segment boundary
    from below, so checking every boundary position suffices. Periodic
    schedules are checked over one period; finite ones at every boundary
    whose window fits the horizon.
    """
    if not (window > 0.0):
        raise PreconditionError(f"window must be positive, got {window!r}")
    if sched.repeat:
        candidates = sched.boundaries()
    else:
        candidates = [b for b in sched.boundaries() if b + window <= sched.total_duration + 1e-12]
        if not candidates:
            candidates = [0.0]
    return all(
        is_strongly_connected(union_graph(sched, t, t + window), n) for t in candidates
    )


def strongly_connected_components(n: int, adjacency: Sequence[Sequence[int]]):
    """Tarjan's algorithm, iterative; returns components as lists of nodes."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, iter(adjacency[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(adjacency[w])))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if not advanced:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp.append(w)
                        if w == v:
                            break
                    out.append(comp)
    return out


def is_strongly_connected(arc_keys: Iterable[ArcKey], n: int) -> bool:
    """True when every ordered node pair is joined by a directed path."""
    if n <= 1:
        return True
    adj = [[] for _ in range(n)]
    for i, j in arc_keys:
        adj[i].append(j)
    return len(strongly_connected_components(n, adj)) == 1


def cycle_holonomy(g: ConfigurationGraph, steps) -> complex:
    """Oriented weight product along a weak cycle.

    ``steps`` is a sequence of ``(i, j, forward)`` triples: each names an arc
    ``(i, j)`` of the graph, traversed ``i -> j`` when ``forward`` (weight
    ``w_ij``) and ``j -> i`` otherwise (weight ``1/w_ij``). Steps must chain
    and close.
    """
    steps = list(steps)
    if not steps:
        raise MalformedCycleError("empty step sequence")
    cur = None
    start = None
    h = 1.0 + 0.0j
    for i, j, forward in steps:
        try:
            w = g.weight(i, j)
        except GraphError as exc:
            raise MalformedCycleError(str(exc)) from None
        frm, to = (i, j) if forward else (j, i)
        contrib = w if forward else 1.0 / w
        if cur is None:
            start = frm
        elif cur != frm:
            raise MalformedCycleError(
                f"step ({i}, {j}, forward={forward}) starts at node {frm}, expected {cur}"
            )
        cur = to
        h *= contrib
    if cur != start:
        raise MalformedCycleError(f"sequence ends at node {cur}, does not close at {start}")
    return h


class Consistency(Enum):
    WEAKLY_CONSISTENT = "weakly_consistent"
    DIRECTED_CONSISTENT_ONLY = "directed_consistent_only"
    DIRECTED_INCONSISTENT = "directed_inconsistent"


def _propagate_potentials(g: ConfigurationGraph):
    """BFS node potentials over the underlying undirected graph.

    Tree arcs satisfy ``pot[i] * w_ij == pot[j]`` exactly; for every other
    arc the ratio ``pot[i] * w_ij / pot[j]`` equals the holonomy of its
    fundamental cycle. Returns ``(potentials, tree_arc_keys)``.
    """
    pot = [None] * g.n
    tree = []
    for root in range(g.n):
        if pot[root] is not None:
            continue
        pot[root] = 1.0 + 0.0j
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v, idx, forward in g._adj[u]:
                if pot[v] is None:
                    a = g.arcs[idx]
                    pot[v] = pot[u] * a.w if forward else pot[u] / a.w
                    tree.append(a.key)
                    queue.append(v)
    return pot, tuple(tree)


def classify_consistency(g: ConfigurationGraph, tol: float = CONSISTENCY_TOL) -> Consistency:
    """Classify cycle consistency of the configuration graph.

    Weak consistency is decided through spanning-forest potentials (holonomy
    is multiplicative over the cycle space, so closure on every non-tree arc
    is equivalent to every weak cycle having holonomy one). When weak cycles
    are inconsistent, elementary directed circuits are enumerated to decide
    whether some directed cycle is inconsistent too.
    """
    pot, _ = _propagate_potentials(g)
    weak_ok = all(abs(pot[a.i] * a.w / pot[a.j] - 1.0) <= tol for a in g.arcs)
    if weak_ok:
        return Consistency.WEAKLY_CONSISTENT
    for nodes in elementary_circuits(g.n, g.arc_keys()):
        h = 1.0 + 0.0j
        for k in range(len(nodes)):
            h *= g.weight(nodes[k], nodes[(k + 1) % len(nodes)])
        if abs(h - 1.0) > tol:
            return Consistency.DIRECTED_INCONSISTENT
    return Consistency.DIRECTED_CONSISTENT_ONLY


@dataclass(frozen=True, eq=False)
class GaugePotentials:
    """Diagonal gauge turning the weighted Laplacian into the real one.

    ``p[0] == 1`` anchors the global phase; along every arc of a weakly
    consistent graph ``p[i] * w_ij == p[j]`` holds up to roundoff.
    """

    p: np.ndarray
    tree_arcs: tuple


def gauge_potentials(g: ConfigurationGraph, tol: float = CONSISTENCY_TOL) -> GaugePotentials:
    """Propagate gauge potentials over a BFS spanning tree from node 0.

    Requires a connected underlying graph and weak consistency; the closure
    relation is re-verified on every arc.
    """
    if not g.underlying_connected():
        raise ConnectivityError("gauge potentials need a connected underlying graph")
    pot, tree = _propagate_potentials(g)
    worst = 0.0
    for a in g.arcs:
        worst = max(worst, abs(pot[a.i] * a.w / pot[a.j] - 1.0))
    if worst > tol:
        raise ConsistencyError(
            f"graph is not weakly consistent: worst closure defect {worst:.3e} > tol {tol:g}"
        )
    return GaugePotentials(p=np.array(pot, dtype=np.complex128), tree_arcs=tree)


def elementary_circuits(
    n: int,
    arc_keys: Iterable[ArcKey],
    max_nodes: int = MAX_CIRCUIT_NODES,
    max_circuits: int = MAX_CIRCUITS,
):
    """Johnson's elementary-circuit enumeration.

    Returns circuits as node tuples (each circuit listed once, anchored at
    its smallest node). Refuses graphs beyond the desk-scale caps instead of
    subsampling.
    """
    if n > max_nodes:
        raise ScaleLimitError(f"circuit enumeration capped at {max_nodes} nodes, got {n}")
    adj_full = [[] for _ in range(n)]
    for i, j in arc_keys:
        adj_full[i].append(j)
    for row in adj_full:
        row.sort()

    circuits: list[tuple] = []

    def circuit_search(s: int, adj) -> None:
        blocked = [False] * n
        blist = [set() for _ in range(n)]
        path = [s]
        blocked[s] = True

        def unblock(u: int) -> None:
            blocked[u] = False
            while blist[u]:
                w = blist[u].pop()
                if blocked[w]:
                    unblock(w)

        def extend(v: int) -> bool:
            found = False
            for w in adj[v]:
                if w == s:
                    circuits.append(tuple(path))
                    if len(circuits) > max_circuits:
                        raise ScaleLimitError(
                            f"more than {max_circuits} elementary circuits; refusing to continue"
                        )
                    found = True
                elif not blocked[w]:
                    path.append(w)
                    blocked[w] = True
                    if extend(w):
                        found = True
                    path.pop()
            if found:
                unblock(v)
            else:
                for w in adj[v]:
                    blist[w].add(v)
            return found

        extend(s)

    s = 0
    while s < n:
        sub = [[w for w in adj_full[v] if w >= s] if v >= s else [] for v in range(n)]
        comps = strongly_connected_components(n, sub)
        candidates = [c for c in comps if len(c) >= 2 and min(c) >= s]
        if not candidates:
            break
        least = min(min(c) for c in candidates)
        comp = next(c for c in candidates if min(c) == least)
        comp_set = set(comp)
        adj = [
            [w for w in sub[v] if w in comp_set] if v in comp_set else []
            for v in range(n)
        ]
        circuit_search(least, adj)
        s = least + 1
    return circuits
