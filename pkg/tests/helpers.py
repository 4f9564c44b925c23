"""Shared generators and independent oracles for the test suite."""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np

import surroundsim as ss
from surroundsim.scenario import Scenario, scenario_from_dict

TWELFTH = Fraction(1, 12)


def twelfth_arg(k: int) -> float:
    """Exact-as-possible argument k*pi/12 expressed as a multiple of pi."""
    return k / 12


def weight_from_args(ki: int, kj: int) -> complex:
    return cmath.exp(1j * math.pi * (kj - ki) / 12)


def convex_hull(points):
    """Andrew monotone chain; returns counter-clockwise hull vertices."""
    pts = sorted(set((p.real, p.imag) for p in points))
    if len(pts) <= 2:
        return [complex(*p) for p in pts]

    def turn(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and turn(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and turn(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return [complex(*p) for p in lower[:-1] + upper[:-1]]


def random_convex_polygon(rng, spread=3.0) -> ss.Polygon:
    while True:
        m = rng.randint(5, 9)
        pts = [complex(rng.uniform(-spread, spread), rng.uniform(-spread, spread)) for _ in range(m)]
        hull = convex_hull(pts)
        if len(hull) >= 3:
            return ss.Polygon(tuple(hull))


def random_body(rng) -> ss.ConvexBody:
    kind = rng.choice(["ball", "polygon", "singleton"])
    if kind == "ball":
        return ss.Ball(complex(rng.uniform(-2, 2), rng.uniform(-2, 2)), rng.uniform(0.3, 2.0))
    if kind == "polygon":
        return random_convex_polygon(rng)
    return ss.Singleton(complex(rng.uniform(-2, 2), rng.uniform(-2, 2)))


def point_outside(rng, body) -> complex:
    reach = ss.sup_modulus(body) + rng.uniform(0.5, 2.0)
    theta = rng.uniform(0.0, 2.0 * math.pi)
    return reach * cmath.exp(1j * theta)


def sample_in_body(rng, body) -> complex:
    if isinstance(body, ss.Singleton):
        return body.point
    if isinstance(body, ss.Ball):
        r = body.radius * math.sqrt(rng.random())
        theta = rng.uniform(0.0, 2.0 * math.pi)
        return body.center + r * cmath.exp(1j * theta)
    weights = [rng.random() for _ in body.vertices]
    total = sum(weights)
    return sum(w * v for w, v in zip(weights, body.vertices)) / total


def _connected_tree_arcs(rng, n):
    """Random spanning tree arcs with random orientations."""
    arcs = []
    for v in range(1, n):
        u = rng.randrange(v)
        arcs.append((u, v) if rng.random() < 0.5 else (v, u))
    return arcs


def random_weakly_consistent_graph(rng, n, extra=2, scaled=False) -> ss.ConfigurationGraph:
    """Weights derived from node potentials, so every cycle closes exactly."""
    ks = [0] + [rng.randrange(-11, 12) for _ in range(n - 1)]
    mods = [1.0] * n
    if scaled:
        mods = [1.0] + [rng.choice([0.5, 2.0, 1.5, 0.75]) for _ in range(n - 1)]
    pot = [mods[i] * cmath.exp(1j * math.pi * ks[i] / 12) for i in range(n)]
    keys = _connected_tree_arcs(rng, n)
    existing = set(keys)
    attempts = 0
    while len(keys) < n - 1 + extra and attempts < 50:
        attempts += 1
        i, j = rng.randrange(n), rng.randrange(n)
        if i != j and (i, j) not in existing:
            keys.append((i, j))
            existing.add((i, j))
    arcs = [(i, j, pot[j] / pot[i]) for i, j in keys]
    return ss.ConfigurationGraph(n, arcs, unit_weights=not scaled)


def random_strongly_connected_graph(rng, n, consistent: bool) -> ss.ConfigurationGraph:
    """Directed ring over a random node order plus a few chords."""
    perm = list(range(n))
    rng.shuffle(perm)
    keys = [(perm[k], perm[(k + 1) % n]) for k in range(n)]
    existing = set(keys)
    for _ in range(rng.randint(0, 3)):
        i, j = rng.randrange(n), rng.randrange(n)
        if i != j and (i, j) not in existing:
            keys.append((i, j))
            existing.add((i, j))
    if consistent:
        ks = [rng.randrange(-11, 12) for _ in range(n)]
        arcs = [(i, j, weight_from_args(ks[i], ks[j])) for i, j in keys]
    else:
        arcs = [
            (i, j, cmath.exp(1j * math.pi * rng.randrange(-11, 12) / 12)) for i, j in keys
        ]
    return ss.ConfigurationGraph(n, arcs)


def reachable_from(arc_keys, n, src):
    adj = [[] for _ in range(n)]
    for i, j in arc_keys:
        adj[i].append(j)
    seen = {src}
    stack = [src]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def strongly_connected_oracle(arc_keys, n) -> bool:
    """All-pairs reachability by repeated BFS; independent of Tarjan."""
    return all(len(reachable_from(arc_keys, n, s)) == n for s in range(n))


def classify_by_inventory(g, tol=1e-9):
    """Classification read directly off the brute-force cycle inventory."""
    inv = ss.brute_force_cycles(g)
    if all(abs(c.holonomy - 1.0) <= tol for c in inv.weak):
        return ss.Consistency.WEAKLY_CONSISTENT
    if any(abs(c.holonomy - 1.0) > tol for c in inv.directed):
        return ss.Consistency.DIRECTED_INCONSISTENT
    return ss.Consistency.DIRECTED_CONSISTENT_ONLY


def directed_consistent_only_example() -> ss.ConfigurationGraph:
    """No directed cycles at all, one inconsistent weak cycle."""
    return ss.ConfigurationGraph(3, [(0, 1, 1j), (0, 2, 1.0), (2, 1, 1.0)])


def random_point_scenario(rng, kind: str, horizon=200.0, step=0.05) -> Scenario:
    """Singleton-origin scenario with a weakly consistent graph.

    ``kind`` is ``"fixed"`` (single always-on segment over a strongly
    connected digraph) or ``"switching"`` (undirected arc pairs activated
    group by group). Initial states are resampled until the conserved mean
    is well away from the collapse threshold so the closed-form limit is
    meaningfully nonzero.
    """
    n = rng.randint(3, 6)
    ks = [0] + [rng.randrange(-11, 12) for _ in range(n - 1)]

    weights = []
    mean_weights = None  # None means uniform
    if kind == "fixed":
        perm = list(range(n))
        rng.shuffle(perm)
        keys = [(perm[k], perm[(k + 1) % n]) for k in range(n)]
        existing = set(keys)
        for _ in range(rng.randint(0, 2)):
            i, j = rng.randrange(n), rng.randrange(n)
            if i != j and (i, j) not in existing:
                keys.append((i, j))
                existing.add((i, j))
        for i, j in keys:
            weights.append({"i": i + 1, "j": j + 1, "arg_over_pi": (ks[j] - ks[i]) / 12})
        segments = [{"duration": 10.0, "arcs": list(range(len(weights)))}]
        dwell = 10.0
        probe = ss.ConfigurationGraph(
            n, [(i, j, weight_from_args(ks[i], ks[j])) for i, j in keys]
        )
        mean_weights = ss.alpha_weights(probe)
    else:
        edges = []
        for v in range(1, n):
            edges.append((rng.randrange(v), v))
        existing = set(edges) | {(b, a) for a, b in edges}
        for _ in range(rng.randint(1, 3)):
            i, j = rng.randrange(n), rng.randrange(n)
            if i != j and (i, j) not in existing:
                edges.append((i, j))
                existing.add((i, j))
                existing.add((j, i))
        pair_indices = []
        for i, j in edges:
            weights.append({"i": i + 1, "j": j + 1, "arg_over_pi": (ks[j] - ks[i]) / 12})
            weights.append({"i": j + 1, "j": i + 1, "arg_over_pi": (ks[i] - ks[j]) / 12})
            pair_indices.append((len(weights) - 2, len(weights) - 1))
        groups = 2 if len(pair_indices) < 6 else rng.choice([2, 3])
        buckets = [[] for _ in range(groups)]
        for k, pair in enumerate(pair_indices):
            buckets[k % groups].extend(pair)
        segments = [
            {"duration": rng.choice([1.5, 2.0]), "arcs": sorted(b)} for b in buckets if b
        ]
        dwell = 1.5

    pot = np.array([cmath.exp(1j * math.pi * k / 12) for k in ks])
    wvec = np.full(n, 1.0 / n) if mean_weights is None else mean_weights
    while True:
        x0 = [
            complex(rng.randrange(-16, 17) / 4, rng.randrange(-16, 17) / 4) for _ in range(n)
        ]
        if abs(np.sum(wvec * pot * np.array(x0))) >= 0.5:
            break

    return scenario_from_dict(
        {
            "n": n,
            "weights": weights,
            "body": {"type": "singleton", "point": [0.0, 0.0]},
            "schedule": {"segments": segments, "repeat": True, "dwell_floor": dwell},
            "x0": [[z.real, z.imag] for z in x0],
            "horizon": horizon,
            "step": step,
        }
    )


def random_ball_scenario_fixed(rng, horizon=200.0, step=0.01) -> Scenario:
    """Fixed strongly connected, consistent weights, unit ball at the origin,
    initial states pulled far enough out that the stay-away certificate holds."""
    n = rng.randint(3, 5)
    ks = [0] + [rng.randrange(-11, 12) for _ in range(n - 1)]
    perm = list(range(n))
    rng.shuffle(perm)
    keys = [(perm[k], perm[(k + 1) % n]) for k in range(n)]
    weights = [
        {"i": i + 1, "j": j + 1, "arg_over_pi": (ks[j] - ks[i]) / 12} for i, j in keys
    ]
    pot = [cmath.exp(1j * math.pi * k / 12) for k in ks]
    anchor = complex(rng.uniform(4.0, 7.0), rng.uniform(-2.0, 2.0))
    x0 = [
        anchor / pot[i] + complex(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3))
        for i in range(n)
    ]
    return scenario_from_dict(
        {
            "n": n,
            "weights": weights,
            "body": {"type": "ball", "center": [0.0, 0.0], "radius": 1.0},
            "schedule": {
                "segments": [{"duration": 10.0, "arcs": list(range(len(weights)))}],
                "repeat": True,
                "dwell_floor": 10.0,
            },
            "x0": [[z.real, z.imag] for z in x0],
            "horizon": horizon,
            "step": step,
        }
    )
