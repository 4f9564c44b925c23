"""Scenario files: schema, validation, and construction of runtime objects.

A scenario is a JSON document describing one run:

* ``n``: agent count; agents are numbered 1..n in files (0..n-1 in code).
* ``weights``: arcs of the configuration graph, each
  ``{"i": 1, "j": 2, "arg_over_pi": 0.5, "modulus": 1.0}``. The weight is
  ``modulus * exp(i * pi * arg_over_pi)``; storing the argument as a
  multiple of pi keeps exact angles exact across round trips. ``modulus``
  defaults to 1; any other value switches the graph into scaled mode.
* ``body``: ``{"type": "singleton", "point": [re, im]}``,
  ``{"type": "ball", "center": [re, im], "radius": r}`` or
  ``{"type": "polygon", "vertices": [[re, im], ...]}`` (counter-clockwise).
* ``schedule``: ``{"segments": [{"duration": 5.0, "arcs": [0, 2, 4]}, ...],
  "repeat": true, "dwell_floor": 5.0}`` where ``arcs`` lists 0-based indices
  into ``weights``.
* ``x0``: list of ``[re, im]`` initial positions, length n.
* ``horizon``, ``step``: simulation span and RK4 step; the step must divide
  every segment duration and the horizon.
* ``tolerances`` (optional): ``consistency``, ``convergence``, ``singular``.
* ``expect`` (optional): ``"surrounded" | "collapsed" | "undecided"``,
  checked against the run classification for the exit code.

Validation failures raise ``ScenarioError`` naming the offending field.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ScenarioError, SurroundsimError
from .geometry import Ball, ConvexBody, Polygon, Singleton
from .topology import ConfigurationGraph, Segment, SwitchingSchedule

EXPECT_VALUES = ("surrounded", "collapsed", "undecided")

__all__ = [
    "Scenario",
    "Tolerances",
    "WeightSpec",
    "SegmentSpec",
    "load_scenario",
    "save_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
    "undirected_variant",
]


@dataclass(frozen=True)
class WeightSpec:
    """One configuration arc in file coordinates (1-based nodes)."""

    i: int
    j: int
    arg_over_pi: float
    modulus: float = 1.0

    def value(self) -> complex:
        return self.modulus * cmath.exp(1j * math.pi * self.arg_over_pi)


@dataclass(frozen=True)
class SegmentSpec:
    duration: float
    arcs: tuple  # 0-based indices into the weight list


@dataclass(frozen=True)
class Tolerances:
    consistency: float = 1e-9
    convergence: float = 1e-3
    singular: float = 1e-9


@dataclass(frozen=True)
class Scenario:
    n: int
    weights: tuple
    body: ConvexBody
    segments: tuple
    repeat: bool
    dwell_floor: float
    x0: tuple
    horizon: float
    step: float
    tolerances: Tolerances = field(default_factory=Tolerances)
    expect: Optional[str] = None

    def graph(self) -> ConfigurationGraph:
        unit = all(abs(w.modulus - 1.0) <= 1e-9 for w in self.weights)
        arcs = tuple((w.i - 1, w.j - 1, w.value()) for w in self.weights)
        return ConfigurationGraph(self.n, arcs, unit_weights=unit)

    def schedule(self) -> SwitchingSchedule:
        segs = []
        for spec in self.segments:
            active = frozenset(
                (self.weights[k].i - 1, self.weights[k].j - 1) for k in spec.arcs
            )
            segs.append(Segment(spec.duration, active))
        return SwitchingSchedule(tuple(segs), repeat=self.repeat, dwell_floor=self.dwell_floor)

    def x0_array(self) -> np.ndarray:
        return np.array(self.x0, dtype=np.complex128)


def _fail(path: str, msg: str):
    raise ScenarioError(f"{path}: {msg}")


def _need(d: dict, key: str, path: str):
    if key not in d:
        _fail(path, f"missing required field '{key}'")
    return d[key]


def _as_number(v, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(path, f"expected a number, got {v!r}")
    if not math.isfinite(v):
        _fail(path, f"must be finite, got {v!r}")
    return float(v)


def _as_int(v, path: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        _fail(path, f"expected an integer, got {v!r}")
    return v


def _as_point(v, path: str) -> complex:
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        _fail(path, f"expected [re, im], got {v!r}")
    return complex(_as_number(v[0], path + "[0]"), _as_number(v[1], path + "[1]"))


def _parse_body(d, path: str) -> ConvexBody:
    if not isinstance(d, dict):
        _fail(path, "expected an object")
    kind = _need(d, "type", path)
    try:
        if kind == "singleton":
            return Singleton(_as_point(_need(d, "point", path), path + ".point"))
        if kind == "ball":
            center = _as_point(_need(d, "center", path), path + ".center")
            radius = _as_number(_need(d, "radius", path), path + ".radius")
            return Ball(center, radius)
        if kind == "polygon":
            verts = _need(d, "vertices", path)
            if not isinstance(verts, list):
                _fail(path + ".vertices", "expected a list")
            pts = [_as_point(v, f"{path}.vertices[{k}]") for k, v in enumerate(verts)]
            return Polygon(tuple(pts))
    except SurroundsimError as exc:
        if isinstance(exc, ScenarioError):
            raise
        _fail(path, str(exc))
    _fail(path + ".type", f"unknown body type {kind!r}")


def scenario_from_dict(d: dict) -> Scenario:
    if not isinstance(d, dict):
        raise ScenarioError("scenario: expected a JSON object at top level")
    n = _as_int(_need(d, "n", "n"), "n")
    if n < 1:
        _fail("n", f"must be >= 1, got {n}")

    raw_weights = _need(d, "weights", "weights")
    if not isinstance(raw_weights, list):
        _fail("weights", "expected a list")
    weights = []
    seen = set()
    for k, w in enumerate(raw_weights):
        path = f"weights[{k}]"
        if not isinstance(w, dict):
            _fail(path, "expected an object")
        i = _as_int(_need(w, "i", path), path + ".i")
        j = _as_int(_need(w, "j", path), path + ".j")
        if not (1 <= i <= n):
            _fail(path + ".i", f"node id {i} out of range 1..{n}")
        if not (1 <= j <= n):
            _fail(path + ".j", f"node id {j} out of range 1..{n}")
        if i == j:
            _fail(path, "self-loops are not allowed")
        if (i, j) in seen:
            _fail(path, f"duplicate arc ({i}, {j})")
        seen.add((i, j))
        arg = _as_number(_need(w, "arg_over_pi", path), path + ".arg_over_pi")
        modulus = _as_number(w.get("modulus", 1.0), path + ".modulus")
        if modulus <= 0.0:
            _fail(path + ".modulus", f"must be > 0, got {modulus}")
        weights.append(WeightSpec(i, j, arg, modulus))

    body = _parse_body(_need(d, "body", "body"), "body")

    raw_sched = _need(d, "schedule", "schedule")
    if not isinstance(raw_sched, dict):
        _fail("schedule", "expected an object")
    raw_segments = _need(raw_sched, "segments", "schedule.segments")
    if not (isinstance(raw_segments, list) and raw_segments):
        _fail("schedule.segments", "expected a non-empty list")
    repeat = raw_sched.get("repeat", True)
    if not isinstance(repeat, bool):
        _fail("schedule.repeat", f"expected a boolean, got {repeat!r}")
    dwell = _as_number(_need(raw_sched, "dwell_floor", "schedule"), "schedule.dwell_floor")
    if dwell <= 0.0:
        _fail("schedule.dwell_floor", f"must be > 0, got {dwell}")
    segments = []
    for k, seg in enumerate(raw_segments):
        path = f"schedule.segments[{k}]"
        if not isinstance(seg, dict):
            _fail(path, "expected an object")
        duration = _as_number(_need(seg, "duration", path), path + ".duration")
        if duration <= 0.0:
            _fail(path + ".duration", f"must be > 0, got {duration}")
        if duration < dwell - 1e-12 * dwell:
            _fail(path + ".duration", f"{duration} is below the dwell floor {dwell}")
        raw_arcs = _need(seg, "arcs", path)
        if not isinstance(raw_arcs, list):
            _fail(path + ".arcs", "expected a list of weight indices")
        idxs = []
        for m, a in enumerate(raw_arcs):
            ai = _as_int(a, f"{path}.arcs[{m}]")
            if not (0 <= ai < len(weights)):
                _fail(f"{path}.arcs[{m}]", f"weight index {ai} out of range 0..{len(weights) - 1}")
            if ai in idxs:
                _fail(f"{path}.arcs[{m}]", f"duplicate weight index {ai}")
            idxs.append(ai)
        segments.append(SegmentSpec(duration, tuple(idxs)))

    raw_x0 = _need(d, "x0", "x0")
    if not (isinstance(raw_x0, list) and len(raw_x0) == n):
        _fail("x0", f"expected a list of {n} points")
    x0 = tuple(_as_point(p, f"x0[{k}]") for k, p in enumerate(raw_x0))

    horizon = _as_number(_need(d, "horizon", "horizon"), "horizon")
    if horizon <= 0.0:
        _fail("horizon", f"must be > 0, got {horizon}")
    step = _as_number(_need(d, "step", "step"), "step")
    if step <= 0.0:
        _fail("step", f"must be > 0, got {step}")

    tol_raw = d.get("tolerances", {})
    if not isinstance(tol_raw, dict):
        _fail("tolerances", "expected an object")
    tol_kwargs = {}
    for name in ("consistency", "convergence", "singular"):
        if name in tol_raw:
            val = _as_number(tol_raw[name], f"tolerances.{name}")
            if val <= 0.0:
                _fail(f"tolerances.{name}", f"must be > 0, got {val}")
            tol_kwargs[name] = val
    unknown_tol = set(tol_raw) - {"consistency", "convergence", "singular"}
    if unknown_tol:
        _fail("tolerances", f"unknown keys {sorted(unknown_tol)}")

    expect = d.get("expect")
    if expect is not None and expect not in EXPECT_VALUES:
        _fail("expect", f"must be one of {EXPECT_VALUES}, got {expect!r}")

    s = Scenario(
        n=n,
        weights=tuple(weights),
        body=body,
        segments=tuple(segments),
        repeat=repeat,
        dwell_floor=dwell,
        x0=x0,
        horizon=horizon,
        step=step,
        tolerances=Tolerances(**tol_kwargs),
        expect=expect,
    )
    _validate_runtime(s)
    return s


def _check_divides(span: float, step: float, path: str):
    ratio = span / step
    if abs(ratio - round(ratio)) > 1e-9 * max(1.0, abs(ratio)) or round(ratio) < 1:
        _fail(path, f"step {step} does not divide {span} into a whole number of steps")


def _validate_runtime(s: Scenario):
    """Surface construction-time invariants with scenario field paths."""
    try:
        s.graph()
    except SurroundsimError as exc:
        _fail("weights", str(exc))
    try:
        sched = s.schedule()
    except SurroundsimError as exc:
        _fail("schedule", str(exc))
    for k, spec in enumerate(s.segments):
        _check_divides(spec.duration, s.step, f"schedule.segments[{k}].duration")
    _check_divides(s.horizon, s.step, "horizon")
    if not s.repeat and s.horizon > sched.total_duration + 1e-9 * s.horizon:
        _fail("horizon", "non-repeating schedule is shorter than the horizon")


def load_scenario(path) -> Scenario:
    """Load and fully validate a scenario file."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {p}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"parse error in {p}: {exc}") from None
    return scenario_from_dict(data)


def _point_pair(z: complex):
    return [z.real, z.imag]


def scenario_to_dict(s: Scenario) -> dict:
    """Inverse of ``scenario_from_dict``; weights round-trip exactly."""
    if isinstance(s.body, Singleton):
        body = {"type": "singleton", "point": _point_pair(s.body.point)}
    elif isinstance(s.body, Ball):
        body = {"type": "ball", "center": _point_pair(s.body.center), "radius": s.body.radius}
    else:
        body = {"type": "polygon", "vertices": [_point_pair(v) for v in s.body.vertices]}
    out = {
        "n": s.n,
        "weights": [
            {"i": w.i, "j": w.j, "arg_over_pi": w.arg_over_pi, "modulus": w.modulus}
            for w in s.weights
        ],
        "body": body,
        "schedule": {
            "segments": [
                {"duration": seg.duration, "arcs": list(seg.arcs)} for seg in s.segments
            ],
            "repeat": s.repeat,
            "dwell_floor": s.dwell_floor,
        },
        "x0": [_point_pair(z) for z in s.x0],
        "horizon": s.horizon,
        "step": s.step,
        "tolerances": {
            "consistency": s.tolerances.consistency,
            "convergence": s.tolerances.convergence,
            "singular": s.tolerances.singular,
        },
    }
    if s.expect is not None:
        out["expect"] = s.expect
    return out


def save_scenario(s: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(s), indent=2) + "\n")


def undirected_variant(s: Scenario) -> Scenario:
    """Mirror every arc so communication becomes undirected.

    Each arc ``(i, j)`` lacking its reverse gains ``(j, i)`` with the inverse
    weight (negated argument, reciprocal modulus), and every schedule segment
    activates the mirrored arcs alongside the originals. Existing reverse
    arcs are left untouched. The expectation field is dropped since the
    variant is a different run.
    """
    weights = list(s.weights)
    index = {(w.i, w.j): k for k, w in enumerate(s.weights)}
    mirror = {}
    for k, w in enumerate(s.weights):
        if (w.j, w.i) in index:
            mirror[k] = index[(w.j, w.i)]
        else:
            weights.append(WeightSpec(w.j, w.i, -w.arg_over_pi, 1.0 / w.modulus))
            mirror[k] = len(weights) - 1
    segments = tuple(
        SegmentSpec(seg.duration, tuple(sorted(set(seg.arcs) | {mirror[k] for k in seg.arcs})))
        for seg in s.segments
    )
    return replace(s, weights=tuple(weights), segments=segments, expect=None)
