"""First-order surrounding dynamics and their online monitors.

Each agent ``i`` moves by summing, over its active out-neighbors ``j``, the
terms ``w_ij * (x_j - P(x_j)) - (x_i - P(x_i))`` where ``P`` projects onto
the target body. Stacked, that is ``dx/dt = -L x^p`` with ``L`` the
generalized (complex-weighted) Laplacian of the currently active arc set
and ``x^p`` the vector of projection residuals.

Integration is classical fixed-step RK4. The step must divide every segment
duration so that no step straddles a switching instant; the active arc set
is right-continuous in time. Monitors track the max half squared distance
(which the exact flow never increases while weights are unit modulus), a
caller-supplied conserved linear functional, and the surrounding error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DivergenceError, GraphError, PreconditionError, ScheduleError
from .geometry import ConvexBody, project, project_many
from .topology import ConfigurationGraph, GaugePotentials, SwitchingSchedule

LYAPUNOV_TOL = 1e-9
CONVERGENCE_TOL = 1e-3
DEFAULT_STRIDE = 100

__all__ = [
    "CONVERGENCE_TOL",
    "MonitorReport",
    "Outcome",
    "Trajectory",
    "TrajectorySample",
    "build_laplacian",
    "classify_outcome",
    "conserved_quantity",
    "control_input",
    "integrate",
    "lyapunov_d",
    "summarize",
    "surrounding_error",
]


class Outcome(Enum):
    SURROUNDED = "surrounded"
    COLLAPSED = "collapsed"
    UNDECIDED = "undecided"


@dataclass(frozen=True, eq=False)
class TrajectorySample:
    t: float
    x: np.ndarray
    dist: np.ndarray
    d: float
    conserved: complex


@dataclass(eq=False)
class Trajectory:
    samples: list
    step: float
    stride: int
    lyapunov_violations: int
    lyapunov_worst_increase: float

    @property
    def final(self) -> TrajectorySample:
        return self.samples[-1]


@dataclass(frozen=True)
class MonitorReport:
    d_star_estimate: float
    max_surrounding_error_final: float
    lyapunov_violations: int
    lyapunov_worst_increase: float
    conserved_drift: float
    classification: Outcome


def build_laplacian(g: ConfigurationGraph, active) -> np.ndarray:
    """Generalized Laplacian of an active arc subset.

    Row ``i`` carries the active out-degree on the diagonal and ``-w_ij`` at
    each active arc ``(i, j)``.
    """
    active = frozenset((int(i), int(j)) for i, j in active)
    for key in active:
        if not g.has_arc(*key):
            raise GraphError(f"active arc {key} is not in the configuration graph")
    L = np.zeros((g.n, g.n), dtype=np.complex128)
    for a in g.arcs:
        if a.key in active:
            L[a.i, a.i] += 1.0
            L[a.i, a.j] = -a.w
    return L


def control_input(g: ConfigurationGraph, active, body: ConvexBody, x, i: int) -> complex:
    """Per-agent control term, evaluated directly from the arc sums."""
    if not (0 <= i < g.n):
        raise PreconditionError(f"agent index {i} out of range 0..{g.n - 1}")
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (g.n,):
        raise PreconditionError(f"state length {x.shape} does not match n={g.n}")
    active = frozenset((int(a), int(b)) for a, b in active)
    u = 0.0 + 0.0j
    xi_p = complex(x[i]) - project(body, complex(x[i]))
    for a in g.arcs:
        if a.i == i and a.key in active:
            xj = complex(x[a.j])
            u += a.w * (xj - project(body, xj)) - xi_p
    return u


def _residual_map(body: ConvexBody):
    """Vectorized map from agent states to projection residuals x - P(x)."""

    def resid(x: np.ndarray) -> np.ndarray:
        return x - project_many(body, x)

    return resid


def lyapunov_d(body: ConvexBody, x) -> float:
    """Max over agents of half the squared distance to the body."""
    x = np.asarray(x, dtype=np.complex128)
    dist = np.abs(x - project_many(body, x))
    return 0.5 * float(np.max(dist * dist))


def conserved_quantity(gauge: GaugePotentials, weights, x) -> complex:
    """Weighted gauged sum ``sum_i weight_i p_i x_i``.

    ``weights=None`` means the uniform weights ``1/n`` (the gauged mean, the
    invariant of undirected switching scenarios); a positive left-null
    weight vector gives the invariant of fixed strongly connected runs.
    """
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[0]
    if weights is None:
        weights = np.full(n, 1.0 / n)
    else:
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (n,):
            raise PreconditionError(
                f"weight vector length {weights.shape} does not match state length {n}"
            )
    if gauge.p.shape != (n,):
        raise PreconditionError("gauge length does not match state length")
    return complex(np.sum(weights * gauge.p * x))


def surrounding_error(g: ConfigurationGraph, body: ConvexBody, x) -> float:
    """Worst defect of the surrounding relation over ALL configuration arcs."""
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (g.n,):
        raise PreconditionError(f"state length {x.shape} does not match n={g.n}")
    if not g.arcs:
        return 0.0
    xp = x - project_many(body, x)
    return max(abs(a.w * xp[a.j] - xp[a.i]) for a in g.arcs)


def _exact_steps(span: float, step: float, what: str) -> int:
    ratio = span / step
    k = round(ratio)
    if k < 1 or abs(ratio - k) > 1e-9 * max(1.0, abs(ratio)):
        raise ScheduleError(
            f"step {step!r} does not divide {what} {span!r} into a whole number of steps"
        )
    return int(k)


def integrate(
    g: ConfigurationGraph,
    sched: SwitchingSchedule,
    body: ConvexBody,
    x0,
    horizon: float,
    step: float,
    *,
    stride: int = DEFAULT_STRIDE,
    conserved_coeffs=None,
    lyapunov_tol: float = LYAPUNOV_TOL,
) -> Trajectory:
    """Fixed-step RK4 integration of the switching surrounding dynamics.

    Steps never straddle a switching instant: segment durations and the
    horizon must be whole multiples of the step. Samples are taken every
    ``stride`` steps plus the final state. ``conserved_coeffs`` is the
    coefficient vector ``c`` of the monitored linear functional ``c . x``
    (defaults to the plain mean).
    """
    if not (step > 0.0 and np.isfinite(step)):
        raise PreconditionError(f"step must be positive, got {step!r}")
    if not (horizon > 0.0 and np.isfinite(horizon)):
        raise PreconditionError(f"horizon must be positive, got {horizon!r}")
    if stride < 1:
        raise PreconditionError(f"stride must be >= 1, got {stride}")
    x = np.array(x0, dtype=np.complex128)
    if x.shape != (g.n,):
        raise PreconditionError(f"x0 length {x.shape} does not match n={g.n}")
    if not np.all(np.isfinite(x.view(float))):
        raise PreconditionError("x0 must be finite")
    sched.validate_arcs(g)
    n_steps = _exact_steps(horizon, step, "horizon")
    seg_steps = [
        _exact_steps(seg.duration, step, f"segment {k} duration")
        for k, seg in enumerate(sched.segments)
    ]
    if not sched.repeat and horizon > sched.total_duration + 1e-9 * max(1.0, horizon):
        raise ScheduleError(
            f"non-repeating schedule of total duration {sched.total_duration!r} "
            f"does not cover horizon {horizon!r}"
        )
    if conserved_coeffs is None:
        coeffs = np.full(g.n, 1.0 / g.n, dtype=np.complex128)
    else:
        coeffs = np.asarray(conserved_coeffs, dtype=np.complex128)
        if coeffs.shape != (g.n,):
            raise PreconditionError("conserved_coeffs length does not match n")
    resid = _residual_map(body)
    laplacians = [build_laplacian(g, seg.active) for seg in sched.segments]

    samples = []
    violations = 0
    worst = 0.0
    xp = resid(x)
    dist = np.abs(xp)
    d_prev = 0.5 * float(np.max(dist * dist))
    budget = lyapunov_tol * max(1.0, d_prev)
    samples.append(TrajectorySample(0.0, x.copy(), dist.copy(), d_prev, complex(coeffs @ x)))

    seg_idx = 0
    into = 0
    half = 0.5 * step
    sixth = step / 6.0
    for k in range(1, n_steps + 1):
        L = laplacians[seg_idx]
        k1 = -(L @ xp)
        k2 = -(L @ resid(x + half * k1))
        k3 = -(L @ resid(x + half * k2))
        k4 = -(L @ resid(x + step * k3))
        x = x + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        into += 1
        if into == seg_steps[seg_idx]:
            into = 0
            seg_idx += 1
            if seg_idx == len(sched.segments):
                seg_idx = 0  # non-repeat runs out exactly at the horizon
        with np.errstate(over="ignore", invalid="ignore"):
            xp = resid(x)
            dist = np.abs(xp)
            d_now = 0.5 * float(np.max(dist * dist))
        if not math.isfinite(d_now):
            raise DivergenceError(f"state diverged at t={k * step!r}")
        if d_now - d_prev > budget:
            violations += 1
            worst = max(worst, d_now - d_prev)
        d_prev = d_now
        if k % stride == 0 or k == n_steps:
            samples.append(
                TrajectorySample(k * step, x.copy(), dist.copy(), d_now, complex(coeffs @ x))
            )
    return Trajectory(
        samples=samples,
        step=step,
        stride=stride,
        lyapunov_violations=violations,
        lyapunov_worst_increase=worst,
    )


def classify_outcome(
    g: ConfigurationGraph, body: ConvexBody, x, tol: float = CONVERGENCE_TOL
) -> Outcome:
    """Classify the final state of a run.

    Collapsed when every agent is within ``tol`` of the body; surrounded when
    the surrounding error is below ``tol`` and every agent stays clear of the
    body by a factor-10 margin; undecided otherwise. A graph with no arcs
    poses no surrounding task, so it is always undecided.
    """
    if not g.arcs:
        return Outcome.UNDECIDED
    x = np.asarray(x, dtype=np.complex128)
    dist = np.abs(x - project_many(body, x))
    if float(dist.max()) < tol:
        return Outcome.COLLAPSED
    if surrounding_error(g, body, x) < tol and float(dist.min()) > 10.0 * tol:
        return Outcome.SURROUNDED
    return Outcome.UNDECIDED


def summarize(
    g: ConfigurationGraph,
    body: ConvexBody,
    traj: Trajectory,
    tol: float = CONVERGENCE_TOL,
) -> MonitorReport:
    """Condense a trajectory into the run report."""
    final = traj.final
    c0 = traj.samples[0].conserved
    drift_abs = max(abs(s.conserved - c0) for s in traj.samples)
    drift = drift_abs / abs(c0) if abs(c0) > 1e-12 else drift_abs
    return MonitorReport(
        d_star_estimate=final.d,
        max_surrounding_error_final=surrounding_error(g, body, final.x),
        lyapunov_violations=traj.lyapunov_violations,
        lyapunov_worst_increase=traj.lyapunov_worst_increase,
        conserved_drift=drift,
        classification=classify_outcome(g, body, final.x, tol),
    )
