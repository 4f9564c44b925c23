"""Command-line front end: simulate, analyze, construct, verify.

Outputs are deterministic: the same scenario always produces byte-identical
``trajectory.csv`` and ``report.json`` (no timestamps). Exit codes: 0 on
success (and on a classification matching the scenario's ``expect`` field),
1 when an ``expect`` field or a UJSC check is not met, 2 on input errors.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from . import dynamics, oracle, topology
from .dynamics import MonitorReport, Trajectory
from .errors import ConnectivityError, SurroundsimError
from .geometry import Ball, Singleton
from .scenario import Scenario, load_scenario
from .topology import Consistency

__all__ = [
    "RunResult",
    "analyze_scenario",
    "emit_outputs",
    "main",
    "run_scenario",
    "write_trajectory_csv",
    "write_report_json",
]


@dataclass
class RunResult:
    trajectory: Optional[Trajectory]
    report: Optional[MonitorReport]
    analysis: dict
    exit_code: int


def _pair(z: complex):
    return [z.real, z.imag]


def _is_undirected_paired(s: Scenario, g) -> bool:
    if not all(g.has_arc(a.j, a.i) for a in g.arcs):
        return False
    sched = s.schedule()
    return all(
        all((j, i) in seg.active for i, j in seg.active) for seg in sched.segments
    )


def _is_fixed_full(s: Scenario, g) -> bool:
    full = frozenset(g.arc_keys())
    return all(seg.active == full for seg in s.schedule().segments)


def analyze_scenario(s: Scenario, window: Optional[float] = None) -> dict:
    """Static analysis: classification, gauges, certificates. No integration."""
    g = s.graph()
    sched = s.schedule()
    body = s.body
    x0 = s.x0_array()
    tol = s.tolerances

    consistency = topology.classify_consistency(g, tol.consistency)
    strongly = topology.is_strongly_connected(g.arc_keys(), g.n)
    if window is None:
        window = sched.total_duration
    ujsc = topology.verify_ujsc(sched, window, g.n)

    gauge = None
    if consistency is Consistency.WEAKLY_CONSISTENT:
        try:
            gauge = topology.gauge_potentials(g, tol.consistency)
        except ConnectivityError:
            gauge = None

    undirected = _is_undirected_paired(s, g)
    fixed_full = _is_fixed_full(s, g)

    alpha = None
    if gauge is not None and fixed_full and strongly:
        alpha = oracle.alpha_weights(g, tol.consistency)

    if gauge is None:
        basis = "ungauged_mean"
        coeffs = np.full(g.n, 1.0 / g.n, dtype=np.complex128)
    elif alpha is not None and not undirected:
        basis = "alpha_gauged"
        coeffs = alpha * gauge.p
    else:
        basis = "uniform_gauged"
        coeffs = gauge.p / g.n

    theorem3 = oracle.theorem3_condition(gauge, x0, body) if gauge is not None else None
    theorem4 = (
        oracle.theorem4_condition(gauge, alpha, x0, body)
        if gauge is not None and alpha is not None
        else None
    )
    t3_applicable = gauge is not None and undirected and ujsc
    t4_applicable = gauge is not None and alpha is not None

    lemma3 = None
    if strongly:
        lemma3 = oracle.lemma3_singularity(g, tol.singular)

    remark6 = None
    if (
        t3_applicable
        and isinstance(body, Ball)
        and abs(body.center) <= 1e-12 * max(1.0, body.radius)
        and theorem3 is not None
        and theorem3.hypothesis_satisfied
    ):
        remark6 = oracle.remark6_bound(gauge, x0, body)

    point_limit = None
    if isinstance(body, Singleton) and abs(body.point) <= 1e-12:
        if consistency is Consistency.WEAKLY_CONSISTENT and gauge is not None:
            pl = oracle.point_target_limit(gauge, x0, alpha if basis == "alpha_gauged" else None)
        else:
            pl = oracle.point_target_limit(None, x0)
        point_limit = {
            "consistent": pl.consistent,
            "values": [_pair(complex(v)) for v in pl.values],
        }

    def verdict_dict(v, applicable):
        if v is None:
            return None
        return {
            "hypothesis_satisfied": v.hypothesis_satisfied,
            "applicable": applicable,
            "value": v.value,
            "threshold": v.threshold,
            "detail": v.detail,
        }

    analysis = {
        "tool": {"name": "surroundsim", "version": __version__},
        "n": g.n,
        "mode": "unit" if g.unit_weights else "scaled",
        "consistency": consistency.value,
        "strongly_connected": strongly,
        "ujsc": {"window": window, "verified": ujsc},
        "gauge": None
        if gauge is None
        else {
            "p": [_pair(complex(v)) for v in gauge.p],
            "tree_arcs": [[i + 1, j + 1] for i, j in gauge.tree_arcs],
        },
        "alpha": None if alpha is None else [float(a) for a in alpha],
        "conserved_basis": basis,
        "theorems": {
            "theorem3": verdict_dict(theorem3, t3_applicable),
            "theorem4": verdict_dict(theorem4, t4_applicable),
            "lemma3_zero_eigenvalue": lemma3,
            "remark6_lower_bound": remark6,
            "point_limit": point_limit,
        },
        "expect": s.expect,
    }
    analysis["_conserved_coeffs"] = coeffs  # internal, stripped before emission
    return analysis


def run_scenario(s: Scenario) -> RunResult:
    """Full run: analysis, integration, classification, expectation check."""
    analysis = analyze_scenario(s)
    coeffs = analysis.pop("_conserved_coeffs")
    g = s.graph()
    traj = dynamics.integrate(
        g,
        s.schedule(),
        s.body,
        s.x0_array(),
        s.horizon,
        s.step,
        conserved_coeffs=coeffs,
    )
    report = dynamics.summarize(g, s.body, traj, s.tolerances.convergence)
    final = traj.final
    analysis["report"] = {
        "classification": report.classification.value,
        "d_star_estimate": report.d_star_estimate,
        "max_surrounding_error_final": report.max_surrounding_error_final,
        "lyapunov_violations": report.lyapunov_violations,
        "lyapunov_worst_increase": report.lyapunov_worst_increase,
        "conserved_drift": report.conserved_drift,
        "final_distances": [float(v) for v in final.dist],
        "samples": len(traj.samples),
        "horizon": s.horizon,
        "step": s.step,
    }
    if s.expect is None:
        matched = None
        code = 0
    else:
        matched = report.classification.value == s.expect
        code = 0 if matched else 1
    analysis["expect_matched"] = matched
    return RunResult(trajectory=traj, report=report, analysis=analysis, exit_code=code)


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Trajectory table: 12 significant digits, LF line endings."""
    n = traj.samples[0].x.shape[0]
    cols = ["t"]
    for k in range(1, n + 1):
        cols += [f"re_{k}", f"im_{k}", f"dist_{k}"]
    cols += ["d", "conserved_re", "conserved_im"]

    def fmt(v: float) -> str:
        return f"{v:.12g}"

    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(cols) + "\n")
        for s in traj.samples:
            row = [fmt(s.t)]
            for k in range(n):
                z = s.x[k]
                row += [fmt(z.real), fmt(z.imag), fmt(s.dist[k])]
            row += [fmt(s.d), fmt(s.conserved.real), fmt(s.conserved.imag)]
            fh.write(",".join(row) + "\n")


def write_report_json(analysis: dict, path) -> None:
    clean = {k: v for k, v in analysis.items() if not k.startswith("_")}
    with open(path, "w", newline="\n") as fh:
        json.dump(clean, fh, indent=2, sort_keys=True)
        fh.write("\n")


def emit_outputs(traj: Trajectory, analysis: dict, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(traj, out / "trajectory.csv")
    write_report_json(analysis, out / "report.json")


def _apply_overrides(s: Scenario, args) -> Scenario:
    changes = {}
    if getattr(args, "step", None) is not None:
        changes["step"] = args.step
    if getattr(args, "horizon", None) is not None:
        changes["horizon"] = args.horizon
    if getattr(args, "tol", None) is not None:
        changes["tolerances"] = replace(s.tolerances, convergence=args.tol)
    if getattr(args, "expect", None) is not None:
        changes["expect"] = args.expect
    return replace(s, **changes) if changes else s


def _simulate_one(job) -> int:
    path, args_dict = job
    s = _apply_overrides(load_scenario(path), argparse.Namespace(**args_dict))
    result = run_scenario(s)
    out_dir = Path(args_dict["out"]) / Path(path).stem if args_dict["multi"] else Path(args_dict["out"])
    emit_outputs(result.trajectory, result.analysis, out_dir)
    cls = result.analysis["report"]["classification"]
    print(f"{path}: {cls} (exit {result.exit_code}), outputs in {out_dir}")
    return result.exit_code


def _cmd_simulate(args) -> int:
    jobs = [
        (path, {
            "step": args.step,
            "horizon": args.horizon,
            "tol": args.tol,
            "expect": args.expect,
            "out": args.out,
            "multi": len(args.scenario) > 1,
        })
        for path in args.scenario
    ]
    if args.jobs > 1 and len(jobs) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            codes = list(pool.map(_simulate_one, jobs))
    else:
        codes = [_simulate_one(job) for job in jobs]
    return max(codes)


def _cmd_analyze(args) -> int:
    s = _apply_overrides(load_scenario(args.scenario), args)
    analysis = analyze_scenario(s)
    analysis.pop("_conserved_coeffs", None)
    text = json.dumps(analysis, indent=2, sort_keys=True)
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(text + "\n")
    print(text)
    return 0


def _cmd_construct(args) -> int:
    s = load_scenario(args.scenario)
    try:
        re, im = (float(v) for v in args.seed_point.split(","))
    except ValueError:
        raise SurroundsimError(
            f"--seed-point must be 're,im', got {args.seed_point!r}"
        ) from None
    z = oracle.theorem1_construct(
        s.graph(), s.body, args.seed_node - 1, complex(re, im), s.tolerances.consistency
    )
    print(json.dumps({"z": [_pair(complex(v)) for v in z]}, indent=2))
    return 0


def _cmd_verify(args) -> int:
    s = load_scenario(args.scenario)
    sched = s.schedule()
    window = args.window if args.window is not None else sched.total_duration
    ok = topology.verify_ujsc(sched, window, s.n)
    print(json.dumps({"ujsc": ok, "window": window}))
    return 0 if ok else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="surroundsim",
        description="Simulate and analyze distributed surrounding of planar convex targets.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="integrate a scenario and emit CSV/JSON outputs")
    sim.add_argument("scenario", nargs="+", help="scenario JSON file(s)")
    sim.add_argument("--step", type=float, default=None, help="override the RK4 step")
    sim.add_argument("--horizon", type=float, default=None, help="override the horizon")
    sim.add_argument("--tol", type=float, default=None, help="override the convergence tolerance")
    sim.add_argument("--out", default="out", help="output directory (default: out)")
    sim.add_argument("--jobs", type=int, default=1, help="run multiple scenarios in parallel")
    sim.add_argument(
        "--expect",
        choices=["surrounded", "collapsed", "undecided"],
        default=None,
        help="override the scenario's expected classification",
    )
    sim.set_defaults(func=_cmd_simulate)

    ana = sub.add_parser("analyze", help="classification, gauges and certificates only")
    ana.add_argument("scenario")
    ana.add_argument("--tol", type=float, default=None, help="override the convergence tolerance")
    ana.add_argument("--out", default=None, help="also write report.json to this directory")
    ana.set_defaults(func=_cmd_analyze)

    con = sub.add_parser("construct", help="build an exact surrounding configuration")
    con.add_argument("scenario")
    con.add_argument("--seed-node", type=int, required=True, help="1-based agent to anchor")
    con.add_argument("--seed-point", required=True, help="seed position 're,im' outside the body")
    con.set_defaults(func=_cmd_construct)

    ver = sub.add_parser("verify", help="check uniform joint strong connectivity")
    ver.add_argument("scenario")
    ver.add_argument("--window", type=float, default=None, help="window length (default: one period)")
    ver.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SurroundsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
