"""Command-line front end: run scenarios, compare controllers, validate files.

Commands
--------
``aphisim run --scenario <path-or-preset> [--controller none|clamp|filter]
[--seed N] [--reps N] [--out DIR] [--duration S]``
    Simulate and write one CSV and one metrics summary per repetition.
    Repetition ``k`` uses seed ``seed + k``.

``aphisim compare --scenario <path-or-preset> [--seed N] [--out DIR]``
    Run all three controller variants on the same scenario and write a
    side-by-side metrics table.

``aphisim validate <path>``
    Parse and validate a scenario file; exit 0 if it is well formed.

The output directory defaults to ``$APHISIM_OUT_DIR`` or ``./aphisim_out``.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .controller import ControllerVariant
from .scenario_io import ParseError, ValidationError, load_scenario
from .sim_engine import QP_STATUS_NAMES, Engine, MetricsReport, Scenario, SimLog, metrics

OUT_DIR_ENV = "APHISIM_OUT_DIR"

CSV_COLUMNS = (
    ["t"]
    + [f"q{i}" for i in range(1, 7)]
    + [f"qd{i}" for i in range(1, 7)]
    + [f"qt{i}" for i in range(1, 7)]
    + [f"T{i}" for i in range(1, 7)]
    + [f"dhat{i}" for i in range(1, 7)]
    + [f"h{i}" for i in range(1, 7)]
    + ["qp_status", "fc_x", "fc_y", "fc_z", "cart_x", "cart_v"]
)

_VARIANT_FLAGS = {
    "none": ControllerVariant.NO_FILTER,
    "clamp": ControllerVariant.DIRECT_CLAMP,
    "filter": ControllerVariant.SAFETY_FILTER,
}


@dataclass
class RunRequest:
    """One `run` invocation after flag parsing."""

    scenario_path: str
    controller: Optional[str] = None
    duration: Optional[float] = None
    seed: Optional[int] = None
    out_dir: Optional[str] = None
    repetitions: int = 1

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")


def _fmt(value: float) -> str:
    return f"{value:.10g}"


def write_csv(log: SimLog, path: Path) -> None:
    """Write the per-step log with the stable column layout."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for i in range(log.n_rows):
            row = [_fmt(log.t[i])]
            row += [_fmt(v) for v in log.q[i]]
            row += [_fmt(v) for v in log.q_d[i]]
            row += [_fmt(v) for v in log.q_t[i]]
            row += [_fmt(v) for v in log.T[i]]
            row += [_fmt(v) for v in log.d_hat[i]]
            row += [_fmt(v) for v in log.h[i]]
            row.append(QP_STATUS_NAMES[int(log.qp_status[i])])
            row += [_fmt(v) for v in log.f_contact[i]]
            row += [_fmt(log.cart_x[i]), _fmt(log.cart_v[i])]
            fh.write(",".join(row) + "\n")


def write_metrics(report: MetricsReport, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in report.as_dict().items():
            fh.write(f"{key} = {_fmt(value)}\n")


def _resolve_out_dir(explicit: Optional[str]) -> Path:
    out = explicit or os.environ.get(OUT_DIR_ENV) or "aphisim_out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _apply_overrides(scenario: Scenario, req: RunRequest) -> Scenario:
    changes = {}
    if req.controller is not None:
        changes["controller"] = _VARIANT_FLAGS[req.controller]
    if req.duration is not None:
        changes["duration"] = req.duration
    if req.seed is not None:
        changes["seed"] = req.seed
    return dataclasses.replace(scenario, **changes) if changes else scenario


def run_command(req: RunRequest) -> int:
    """Execute a run request; returns the process exit code."""
    try:
        scenario = load_scenario(req.scenario_path)
    except (ParseError, ValidationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    scenario = _apply_overrides(scenario, req)
    out_dir = _resolve_out_dir(req.out_dir)

    failed = False
    for rep in range(req.repetitions):
        seed = scenario.seed + rep
        log = Engine(scenario).run(seed=seed)
        stem = f"{scenario.name}_{scenario.controller.value}"
        if req.repetitions > 1:
            stem += f"_rep{rep}"
        write_csv(log, out_dir / f"{stem}.csv")
        write_metrics(metrics(log), out_dir / f"{stem}_metrics.txt")
        if log.aborted:
            failed = True
            print(
                f"run {stem} aborted at t={log.t[-1]:.3f}s: {log.abort_reason}",
                file=sys.stderr,
            )
        else:
            print(f"run {stem}: {log.n_rows} rows -> {out_dir / (stem + '.csv')}")
    return 1 if failed else 0


def compare_command(
    scenario_path: str, seed: Optional[int], out_dir: Optional[str]
) -> int:
    """Run every controller variant on one scenario and tabulate metrics."""
    try:
        scenario = load_scenario(scenario_path)
    except (ParseError, ValidationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = _resolve_out_dir(out_dir)

    reports: dict[str, MetricsReport] = {}
    for variant in (
        ControllerVariant.NO_FILTER,
        ControllerVariant.DIRECT_CLAMP,
        ControllerVariant.SAFETY_FILTER,
    ):
        sc = dataclasses.replace(scenario, controller=variant)
        if seed is not None:
            sc = dataclasses.replace(sc, seed=seed)
        log = Engine(sc).run()
        stem = f"{sc.name}_{variant.value}"
        write_csv(log, out / f"{stem}.csv")
        report = metrics(log)
        reports[variant.value] = report
        write_metrics(report, out / f"{stem}_metrics.txt")
        status = "aborted" if log.aborted else "ok"
        print(f"{variant.value}: {status} ({log.n_rows} rows)")

    table_path = out / f"{scenario.name}_comparison.txt"
    _write_comparison(reports, table_path)
    print(f"comparison table -> {table_path}")
    return 0


def _write_comparison(reports: dict[str, MetricsReport], path: Path) -> None:
    variants = list(reports)
    keys = list(next(iter(reports.values())).as_dict())
    width = max(len(k) for k in keys) + 2
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("metric".ljust(width))
        for v in variants:
            fh.write(v.rjust(16))
        fh.write("\n")
        for key in keys:
            fh.write(key.ljust(width))
            for v in variants:
                fh.write(_fmt(reports[v].as_dict()[key]).rjust(16))
            fh.write("\n")


def validate_command(path: str) -> int:
    try:
        scenario = load_scenario(path)
    except (ParseError, ValidationError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(
        f"ok: scenario '{scenario.name}' "
        f"({scenario.controller.value}, {scenario.duration:g}s at dt={scenario.dt:g})"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aphisim",
        description="Aerial physical-interaction simulator with a thrust-limit safety filter.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate a scenario and write CSV logs")
    p_run.add_argument("--scenario", required=True, help="TOML file or preset name")
    p_run.add_argument("--controller", choices=sorted(_VARIANT_FLAGS))
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--reps", type=int, default=1)
    p_run.add_argument("--out", help=f"output directory (default ${OUT_DIR_ENV})")
    p_run.add_argument("--duration", type=float, help="override duration (s)")

    p_cmp = sub.add_parser("compare", help="run all controller variants side by side")
    p_cmp.add_argument("--scenario", required=True)
    p_cmp.add_argument("--seed", type=int)
    p_cmp.add_argument("--out")

    p_val = sub.add_parser("validate", help="check a scenario file")
    p_val.add_argument("path")

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        try:
            req = RunRequest(
                scenario_path=args.scenario,
                controller=args.controller,
                duration=args.duration,
                seed=args.seed,
                out_dir=args.out,
                repetitions=args.reps,
            )
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        return run_command(req)
    if args.command == "compare":
        return compare_command(args.scenario, args.seed, args.out)
    if args.command == "validate":
        return validate_command(args.path)
    return 2


if __name__ == "__main__":
    sys.exit(main())
