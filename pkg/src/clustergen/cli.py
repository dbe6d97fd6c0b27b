"""Command-line entry point.

Verbs: ``run <config>``, ``sweep <config> --grid <spec>``,
``scenarios list``, ``scenarios run <name>``, ``validate <config>``.

Exit codes: 0 success, 2 config error, 3 numerical non-convergence,
4 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace
from importlib import resources

from .config import ConfigError, ScenarioConfig, load_config
from .evolve import ConvergenceError
from .runner import CapExceededError, run_scenario, run_sweep, write_record

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_CAP = 4


def _scenario_dir():
    return resources.files("clustergen") / "scenarios"


def builtin_scenarios() -> dict[str, str]:
    """Name -> path of packaged scenario configs."""
    out = {}
    for entry in sorted(_scenario_dir().iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".yaml"):
            out[entry.name[: -len(".yaml")]] = str(entry)
    return out


def _apply_units(cfg: ScenarioConfig, time_units: str) -> ScenarioConfig:
    """In ``seconds`` mode config energies are plain frequencies in Hz.

    They are converted to angular frequencies (x 2 pi) so that the time
    grid — and all times in the output CSV — are in seconds.  In ``invJ``
    mode energies are used as-is and times are in units of 1/J.
    """
    if time_units == "invJ":
        return cfg
    p = cfg.params
    scaled = p.replaced(J=2 * math.pi * p.J, U=2 * math.pi * p.U, Omega=2 * math.pi * p.Omega)
    return replace(cfg, params=scaled)


def _apply_flags(cfg: ScenarioConfig, args) -> ScenarioConfig:
    cfg = _apply_units(cfg, args.time_units)
    if args.max_dim is not None:
        cfg = replace(cfg, max_dim=args.max_dim)
    return cfg


def _load(path: str) -> ScenarioConfig:
    return load_config(path)


def cmd_run(args) -> int:
    cfg = _apply_flags(_load(args.config), args)
    record = run_scenario(cfg)
    path = write_record(record, args.output_dir)
    print(f"{record.name}: {len(record.series)} series -> {path} "
          f"({record.wall_seconds:.1f} s, residual {record.norm_residual:.1e})")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _apply_flags(_load(args.config), args)
    records = run_sweep(cfg, args.grid, workers=args.threads)
    failures = 0
    for record in records:
        write_record(record, args.output_dir)
        status = f"FAILED ({record.error})" if record.error else "ok"
        failures += bool(record.error)
        print(f"{record.name}: {status}")
    print(f"sweep: {len(records) - failures}/{len(records)} points succeeded")
    return EXIT_OK if failures == 0 else EXIT_CONVERGENCE
    # per-point failures are already recorded in the metadata files


def cmd_scenarios(args) -> int:
    table = builtin_scenarios()
    if args.action == "list":
        for name, path in table.items():
            cfg = load_config(path)
            print(f"{name:12s} {cfg.model:22s} {cfg.geometry.extents}  {cfg.note}")
        return EXIT_OK
    if args.name not in table:
        print(f"unknown scenario {args.name!r}; available: {', '.join(table)}", file=sys.stderr)
        return EXIT_CONFIG
    cfg = _apply_flags(load_config(table[args.name]), args)
    record = run_scenario(cfg)
    path = write_record(record, args.output_dir)
    print(f"{record.name}: {len(record.series)} series -> {path} "
          f"({record.wall_seconds:.1f} s)")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _apply_flags(_load(args.config), args)
    from .runner import check_caps, estimate_hilbert

    check_caps(cfg)
    dim, nnz = estimate_hilbert(cfg)
    print(f"{cfg.name}: valid (model {cfg.model}, dimension {dim}, ~{nnz} nonzeros)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clustergen",
        description="Exact-diagonalization scenarios for drive-assisted cluster state generation",
    )
    parser.add_argument("--output-dir", default="results", help="directory for CSV/metadata output")
    parser.add_argument("--threads", type=int, default=1, help="worker processes for sweeps")
    parser.add_argument(
        "--time-units",
        choices=("invJ", "seconds"),
        default="invJ",
        help="invJ: energies as given, times in 1/J; seconds: energies in Hz (x 2 pi), times in s",
    )
    parser.add_argument("--max-dim", type=int, default=None, help="override Hilbert dimension cap")
    sub = parser.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="run one scenario config")
    p_run.add_argument("config")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a parameter grid over a base config")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--grid", required=True, help="e.g. 'params.U=50,100;params.Omega=60,120'")
    p_sweep.set_defaults(func=cmd_sweep)

    p_scen = sub.add_parser("scenarios", help="list or run canned scenarios")
    p_scen.add_argument("action", choices=("list", "run"))
    p_scen.add_argument("name", nargs="?", default=None)
    p_scen.set_defaults(func=cmd_scenarios)

    p_val = sub.add_parser("validate", help="validate a config without running it")
    p_val.add_argument("config")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.verb == "scenarios" and args.action == "run" and not args.name:
        print("scenarios run requires a name", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapExceededError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ConvergenceError as exc:
        print(f"numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
