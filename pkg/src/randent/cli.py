"""Command-line front end emitting machine-readable CSV or JSON results.

Reals are printed with repr, the shortest decimal form that parses back to
the identical double, so every numeric value in an output file round-trips
exactly.  Output contains no timestamps or environment data: identical
invocations produce byte-identical files, regardless of the worker count.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .brachistochrone import sweep_lambda, sweep_phi
from .entanglement import Measure
from .haar_baseline import haar_global_baseline
from .protocol import (
    ConvergenceReport,
    Geometry,
    ProtocolConfig,
    Trajectory,
    convergence_report,
    run_ensemble,
)
from .qstate import canonical_gate, entangler_gate

__all__ = ["main", "parse_args", "execute", "UsageError"]

SCHEMA = 1

_DEFAULT_LAMBDA = (math.pi / 4, 0.0, 0.0)
_DEFAULT_PHI_GRID = "{0}:{1}:{0}".format(math.pi / 12, 11 * math.pi / 12)
_DEFAULT_LAMBDA_GRID = "0:{}:{}".format(math.pi / 4, math.pi / 16)

_EXIT_USAGE = 1
_EXIT_IO = 2
_EXIT_NOT_CONVERGED = 3


class UsageError(Exception):
    """Bad or contradictory command-line input."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 1
        raise UsageError(message)


def _parse_lambda(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated values, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _parse_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"need stop >= start and step > 0, got {text!r}")
    values = []
    k = 0
    tol = 1e-9 * max(1.0, abs(stop))
    while True:
        v = start + k * step
        if v > stop + tol:
            break
        values.append(min(v, stop))
        k += 1
    return values


def _add_common(parser: argparse.ArgumentParser, qubits_default: int) -> None:
    parser.add_argument("--qubits", type=int, default=qubits_default)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--output", type=Path, default=None)
    parser.add_argument("--format", choices=["csv", "json"], default="csv")


def _add_protocol(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--geometry",
        choices=[g.value for g in Geometry],
        default=Geometry.NONLOCAL.value,
    )
    parser.add_argument("--realizations", type=int, default=1000)
    parser.add_argument("--max-gates", type=int, default=400)
    parser.add_argument("--eval-stride", type=int, default=1)
    parser.add_argument("--threshold", type=float, default=0.01)
    parser.add_argument("--confirm-window", type=int, default=10)
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--require-convergence", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="randent", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p_run = sub.add_parser("run", help="ensemble run with a fixed two-qubit gate")
    _add_common(p_run, qubits_default=6)
    _add_protocol(p_run)
    p_run.add_argument("--lambda", dest="lam", type=_parse_lambda, default=None,
                       help="canonical gate coefficients x,y,z in radians")
    p_run.add_argument("--phi", type=float, default=None,
                       help="entangler gate angle in radians")
    p_run.add_argument("--measure", choices=["linear", "vonneumann", "both"], default="both")

    p_sweep = sub.add_parser("sweep-phi", help="gate count and physical time over a phi grid")
    _add_common(p_sweep, qubits_default=6)
    _add_protocol(p_sweep)
    p_sweep.add_argument("--phi-grid", type=_parse_grid, default=None,
                         help="start:stop:step in radians (default pi/12:11pi/12:pi/12)")
    p_sweep.add_argument("--omega", type=float, default=1.0)

    p_lam = sub.add_parser("sweep-lambda", help="gate count over a canonical-gate grid")
    _add_common(p_lam, qubits_default=6)
    _add_protocol(p_lam)
    p_lam.add_argument("--lambda-grid", type=_parse_grid, default=None,
                       help="start:stop:step for lambda_x (lambda_y = lambda_z = 0)")

    p_base = sub.add_parser("baseline", help="Haar-average entanglement table")
    _add_common(p_base, qubits_default=6)
    p_base.add_argument("--measure", choices=["linear", "vonneumann"], default="linear")
    return parser


def parse_args(argv) -> argparse.Namespace:
    """Parse and validate; raises UsageError naming the offending flag."""
    args = build_parser().parse_args(argv)
    if not 2 <= args.qubits <= 24:
        raise UsageError(f"--qubits must be in [2, 24], got {args.qubits}")
    if args.seed < 0:
        raise UsageError(f"--seed must be >= 0, got {args.seed}")
    if hasattr(args, "realizations"):
        if args.realizations < 1:
            raise UsageError(f"--realizations must be >= 1, got {args.realizations}")
        if args.max_gates < 0:
            raise UsageError(f"--max-gates must be >= 0, got {args.max_gates}")
        if args.eval_stride < 1:
            raise UsageError(f"--eval-stride must be >= 1, got {args.eval_stride}")
        if not 0.0 < args.threshold < 1.0:
            raise UsageError(f"--threshold must be in (0, 1), got {args.threshold}")
        if args.confirm_window < 0:
            raise UsageError(f"--confirm-window must be >= 0, got {args.confirm_window}")
        if args.workers is not None and args.workers < 1:
            raise UsageError(f"--workers must be >= 1, got {args.workers}")
    if args.subcommand == "run":
        if args.lam is not None and args.phi is not None:
            raise UsageError("--lambda and --phi are mutually exclusive")
        if args.phi is not None and not 0.0 <= args.phi <= math.pi:
            raise UsageError(f"--phi must be in [0, pi], got {args.phi}")
    if args.subcommand == "sweep-phi":
        if args.phi_grid is None:
            args.phi_grid = _parse_grid(_DEFAULT_PHI_GRID)
        if any(not 0.0 <= v <= math.pi for v in args.phi_grid):
            raise UsageError("--phi-grid values must be in [0, pi]")
        if not args.omega > 0.0:
            raise UsageError(f"--omega must be positive, got {args.omega}")
    if args.subcommand == "sweep-lambda" and args.lambda_grid is None:
        args.lambda_grid = _parse_grid(_DEFAULT_LAMBDA_GRID)
    if args.output is None:
        args.output = Path(f"{args.subcommand.replace('-', '_')}.{args.format}")
    return args


def _measures(name: str) -> tuple[Measure, ...]:
    if name == "both":
        return (Measure.LINEAR, Measure.VON_NEUMANN)
    return (Measure(name),)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_lines(path: Path, lines: list[str]) -> None:
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {path}")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {path}")


def _level_names(num_levels: int) -> list[str]:
    return [str(m) for m in range(1, num_levels + 1)] + ["global"]


def _trajectory_rows(traj: Trajectory):
    for measure in traj.measures:
        for name in _level_names(traj.num_levels):
            level = None if name == "global" else int(name)
            mean = traj.mean_series(measure, level)
            delta = traj.delta_series(measure, level)
            for k, g in enumerate(traj.gate_indices):
                yield int(g), measure.value, name, float(mean[k]), float(delta[k])


def _report_rows(report: ConvergenceReport):
    for e in report.entries:
        name = "global" if e.level is None else str(e.level)
        yield e.measure.value, name, e.n_gates, e.decay_rate, e.fit_hi, e.fit_lo


def _execute_run(args) -> int:
    if args.phi is not None:
        gate = entangler_gate(args.phi)
        gate_desc = {"kind": "entangler", "phi": args.phi}
    else:
        lam = args.lam if args.lam is not None else _DEFAULT_LAMBDA
        gate = canonical_gate(lam)
        gate_desc = {"kind": "canonical", "lambda": list(lam)}
    config = ProtocolConfig(
        num_qubits=args.qubits,
        fixed_gate=gate,
        geometry=Geometry(args.geometry),
        realizations=args.realizations,
        max_gates=args.max_gates,
        eval_stride=args.eval_stride,
        seed=args.seed,
        measures=_measures(args.measure),
        threshold=args.threshold,
        confirm_window=args.confirm_window,
    )
    traj = run_ensemble(config, workers=args.workers)
    report = convergence_report(traj, config.threshold, config.confirm_window)
    if args.format == "csv":
        lines = [f"#schema={SCHEMA}", "gate_index,measure,level,mean_E,delta_E"]
        lines += [",".join(_fmt(v) for v in row) for row in _trajectory_rows(traj)]
        _write_lines(args.output, lines)
        report_path = args.output.with_name(args.output.stem + "_report" + args.output.suffix)
        rlines = [f"#schema={SCHEMA}", "measure,level,n_gates,decay_rate,fit_hi,fit_lo"]
        rlines += [",".join(_fmt(v) for v in row) for row in _report_rows(report)]
        _write_lines(report_path, rlines)
    else:
        payload = {
            "schema": SCHEMA,
            "command": "run",
            "config": {
                "qubits": args.qubits,
                "geometry": args.geometry,
                "gate": gate_desc,
                "realizations": args.realizations,
                "max_gates": args.max_gates,
                "eval_stride": args.eval_stride,
                "seed": args.seed,
                "measures": [m.value for m in config.measures],
                "threshold": args.threshold,
                "confirm_window": args.confirm_window,
            },
            "gate_index": [int(g) for g in traj.gate_indices],
            "series": [
                {
                    "measure": measure.value,
                    "level": name,
                    "mean_E": [float(v) for v in traj.mean_series(measure, None if name == "global" else int(name))],
                    "delta_E": [float(v) for v in traj.delta_series(measure, None if name == "global" else int(name))],
                }
                for measure in traj.measures
                for name in _level_names(traj.num_levels)
            ],
            "report": [
                {
                    "measure": m,
                    "level": name,
                    "n_gates": n,
                    "decay_rate": rate,
                    "fit_hi": hi,
                    "fit_lo": lo,
                }
                for m, name, n, rate, hi, lo in _report_rows(report)
            ],
        }
        _write_json(args.output, payload)
    failed = []
    for measure in config.measures:
        e = report.entry(measure, None)
        status = f"n_gates={e.n_gates}" if e.n_gates is not None else "not converged"
        rate = f" decay_rate={_fmt(e.decay_rate)}" if e.decay_rate is not None else ""
        print(f"{measure.value} global: {status}{rate}")
        if e.n_gates is None:
            failed.append(measure.value)
    if args.require_convergence and failed:
        print(f"convergence required but not reached for: {', '.join(failed)}", file=sys.stderr)
        return _EXIT_NOT_CONVERGED
    return 0


def _base_config(args) -> ProtocolConfig:
    return ProtocolConfig(
        num_qubits=args.qubits,
        fixed_gate=np.eye(4, dtype=complex),
        geometry=Geometry(args.geometry),
        realizations=args.realizations,
        max_gates=args.max_gates,
        eval_stride=args.eval_stride,
        seed=args.seed,
        measures=(Measure.LINEAR,),
        threshold=args.threshold,
        confirm_window=args.confirm_window,
    )


def _execute_sweep_phi(args) -> int:
    table = sweep_phi(_base_config(args), args.phi_grid, omega=args.omega, workers=args.workers)
    if args.format == "csv":
        lines = [
            f"#schema={SCHEMA}",
            f"#argmin_gates={_fmt(table.argmin_gates)}",
            f"#argmin_time={_fmt(table.argmin_time)}",
            "phi,n_gates,t_phi,t_phys",
        ]
        lines += [
            ",".join(_fmt(v) for v in (r.phi, r.n_gates, r.t_phi, r.t_phys))
            for r in table.rows
        ]
        _write_lines(args.output, lines)
    else:
        _write_json(
            args.output,
            {
                "schema": SCHEMA,
                "command": "sweep-phi",
                "omega": args.omega,
                "argmin_gates": table.argmin_gates,
                "argmin_time": table.argmin_time,
                "rows": [
                    {"phi": r.phi, "n_gates": r.n_gates, "t_phi": r.t_phi, "t_phys": r.t_phys}
                    for r in table.rows
                ],
            },
        )
    print(f"argmin_gates={_fmt(table.argmin_gates)} argmin_time={_fmt(table.argmin_time)}")
    if args.require_convergence and any(r.n_gates is None for r in table.rows):
        bad = [r.phi for r in table.rows if r.n_gates is None]
        print(f"convergence required but not reached at phi: {bad}", file=sys.stderr)
        return _EXIT_NOT_CONVERGED
    return 0


def _execute_sweep_lambda(args) -> int:
    rows = sweep_lambda(_base_config(args), args.lambda_grid, workers=args.workers)
    if args.format == "csv":
        lines = [f"#schema={SCHEMA}", "lambda_x,lambda_y,lambda_z,n_gates"]
        lines += [
            ",".join(_fmt(v) for v in (*r.lam, r.n_gates))
            for r in rows
        ]
        _write_lines(args.output, lines)
    else:
        _write_json(
            args.output,
            {
                "schema": SCHEMA,
                "command": "sweep-lambda",
                "rows": [{"lambda": list(r.lam), "n_gates": r.n_gates} for r in rows],
            },
        )
    if args.require_convergence and any(r.n_gates is None for r in rows):
        bad = [r.lam[0] for r in rows if r.n_gates is None]
        print(f"convergence required but not reached at lambda_x: {bad}", file=sys.stderr)
        return _EXIT_NOT_CONVERGED
    return 0


def _execute_baseline(args) -> int:
    table = haar_global_baseline(args.qubits, Measure(args.measure))
    if args.format == "csv":
        lines = [f"#schema={SCHEMA}", "m,value"]
        lines += [f"{m + 1},{_fmt(v)}" for m, v in enumerate(table.per_level)]
        lines.append(f"global,{_fmt(table.global_value)}")
        _write_lines(args.output, lines)
    else:
        _write_json(
            args.output,
            {
                "schema": SCHEMA,
                "command": "baseline",
                "qubits": args.qubits,
                "measure": args.measure,
                "per_level": list(table.per_level),
                "global": table.global_value,
            },
        )
    return 0


def execute(args) -> int:
    if args.subcommand == "run":
        return _execute_run(args)
    if args.subcommand == "sweep-phi":
        return _execute_sweep_phi(args)
    if args.subcommand == "sweep-lambda":
        return _execute_sweep_lambda(args)
    return _execute_baseline(args)


def main(argv=None) -> int:
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    try:
        return execute(args)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return _EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
