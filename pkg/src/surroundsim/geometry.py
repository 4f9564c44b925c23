"""Planar closed bounded convex target sets with exact projection queries.

A point lives in the complex plane. The inner product used throughout is the
real planar one, ``<a, b> = Re(a) Re(b) + Im(a) Im(b)``. Three body variants
are supported: a single point, a closed disk, and a convex polygon given by
counter-clockwise vertices. Projections are computed in closed form (per
edge for polygons), so every query is exact up to roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidBodyError, PreconditionError

UNIT_DIRECTION_TOL = 1e-9

__all__ = [
    "Ball",
    "ConvexBody",
    "Polygon",
    "Singleton",
    "cross",
    "distance",
    "inner",
    "project",
    "project_many",
    "sup_modulus",
    "support_point",
]


def inner(a: complex, b: complex) -> float:
    return a.real * b.real + a.imag * b.imag


def cross(a: complex, b: complex) -> float:
    return a.real * b.imag - a.imag * b.real


@dataclass(frozen=True)
class Singleton:
    point: complex

    def __post_init__(self):
        object.__setattr__(self, "point", complex(self.point))


@dataclass(frozen=True)
class Ball:
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not (self.radius > 0.0 and np.isfinite(self.radius)):
            raise InvalidBodyError(f"ball radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class Polygon:
    """Convex polygon, vertices in strict counter-clockwise order.

    Construction drops repeated and collinear vertices; clockwise or
    degenerate (all collinear) input is rejected. Vertex storage order is
    preserved, which pins down the tie-breaking of ``support_point``.
    """

    vertices: tuple

    def __post_init__(self):
        raw = [complex(v) for v in self.vertices]
        if len(raw) < 3:
            raise InvalidBodyError("polygon needs at least 3 vertices")
        scale = max(max(abs(v.real), abs(v.imag)) for v in raw)
        scale = max(scale, 1.0)
        pts = []
        for v in raw:
            if not pts or abs(v - pts[-1]) > 1e-12 * scale:
                pts.append(v)
        if len(pts) >= 2 and abs(pts[0] - pts[-1]) <= 1e-12 * scale:
            pts.pop()
        if len(pts) < 3:
            raise InvalidBodyError("polygon collapses to fewer than 3 distinct vertices")
        eps = 1e-12 * scale * scale
        m = len(pts)
        crosses = [
            cross(pts[(k + 1) % m] - pts[k], pts[(k + 2) % m] - pts[(k + 1) % m])
            for k in range(m)
        ]
        if any(c < -eps for c in crosses):
            raise InvalidBodyError("vertices must be convex in counter-clockwise order")
        if all(abs(c) <= eps for c in crosses):
            raise InvalidBodyError("polygon is degenerate (all vertices collinear)")
        kept = [
            pts[(k + 1) % m]
            for k in range(m)
            if crosses[k] > eps  # cross at vertex pts[k+1]
        ]
        # restore original starting vertex if it survived
        if pts[0] in kept:
            r = kept.index(pts[0])
            kept = kept[r:] + kept[:r]
        if len(kept) < 3:
            raise InvalidBodyError("polygon collapses to fewer than 3 distinct vertices")
        object.__setattr__(self, "vertices", tuple(kept))

    def contains(self, z: complex) -> bool:
        verts = self.vertices
        scale = max(1.0, max(abs(v) for v in verts), abs(z))
        eps = 1e-12 * scale * scale
        m = len(verts)
        return all(
            cross(verts[(k + 1) % m] - verts[k], z - verts[k]) >= -eps for k in range(m)
        )


ConvexBody = Union[Singleton, Ball, Polygon]


def _project_segment(a: complex, b: complex, z: complex) -> complex:
    ab = b - a
    denom = inner(ab, ab)
    if denom == 0.0:
        return a
    t = inner(z - a, ab) / denom
    t = min(1.0, max(0.0, t))
    return a + t * ab


def project(body: ConvexBody, z: complex) -> complex:
    """Nearest point of the body; the identity on points already inside."""
    z = complex(z)
    if isinstance(body, Singleton):
        return body.point
    if isinstance(body, Ball):
        d = z - body.center
        r = abs(d)
        if r <= body.radius:
            return z
        return body.center + d * (body.radius / r)
    if body.contains(z):
        return z
    verts = body.vertices
    m = len(verts)
    best = None
    best_d = np.inf
    for k in range(m):
        cand = _project_segment(verts[k], verts[(k + 1) % m], z)
        d = abs(z - cand)
        if d < best_d:
            best_d = d
            best = cand
    return best


def project_many(body: ConvexBody, xs: np.ndarray) -> np.ndarray:
    """Vectorized ``project`` over a 1-D array of points."""
    xs = np.asarray(xs, dtype=np.complex128)
    if isinstance(body, Singleton):
        return np.full_like(xs, body.point)
    if isinstance(body, Ball):
        d = xs - body.center
        m = np.abs(d)
        safe = np.where(m == 0.0, 1.0, m)
        factor = np.where(m > body.radius, body.radius / safe, 1.0)
        return body.center + d * factor
    verts = np.array(body.vertices, dtype=np.complex128)
    nxt = np.roll(verts, -1)
    ab = (nxt - verts)[:, None]
    az = xs[None, :] - verts[:, None]
    denom = (ab.conjugate() * ab).real
    t = np.clip((ab.conjugate() * az).real / denom, 0.0, 1.0)
    cand = verts[:, None] + t * ab
    d2 = np.abs(xs[None, :] - cand) ** 2
    nearest = cand[np.argmin(d2, axis=0), np.arange(xs.shape[0])]
    scale = max(1.0, float(np.abs(verts).max()))
    eps = 1e-12 * scale * scale
    inside = np.all((ab.conjugate() * az).imag >= -eps, axis=0)
    return np.where(inside, xs, nearest)


def distance(body: ConvexBody, z: complex) -> float:
    """Euclidean distance to the body; zero exactly when the point is inside."""
    return abs(complex(z) - project(body, z))


def support_point(body: ConvexBody, direction: complex) -> complex:
    """Extreme point of the body in a unit direction.

    Maximizes ``<y, direction>`` over the body. For a polygon face
    perpendicular to the direction, the first maximizing vertex in storage
    order wins, which makes the result deterministic. The returned point ``y``
    satisfies ``project(body, y + t*direction) == y`` for every ``t > 0``.
    """
    direction = complex(direction)
    if abs(abs(direction) - 1.0) > UNIT_DIRECTION_TOL:
        raise PreconditionError(f"direction must be unit modulus, got |d|={abs(direction)!r}")
    if isinstance(body, Singleton):
        return body.point
    if isinstance(body, Ball):
        return body.center + body.radius * direction
    best = body.vertices[0]
    best_score = inner(best, direction)
    for v in body.vertices[1:]:
        s = inner(v, direction)
        if s > best_score:
            best_score = s
            best = v
    return best


def sup_modulus(body: ConvexBody) -> float:
    """Supremum of ``|z|`` over the body."""
    if isinstance(body, Singleton):
        return abs(body.point)
    if isinstance(body, Ball):
        return abs(body.center) + body.radius
    return max(abs(v) for v in body.vertices)
