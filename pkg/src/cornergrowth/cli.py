"""Command-line front end.

Every experiment and dump is a subcommand; outputs are plot-ready CSV (or
JSON), a JSON report with the run configuration embedded, and a PNG
rendering, all under --out.  Exit code 0 on pass, 1 on an acceptance
failure, 2 on usage errors.  CGL_THREADS caps worker parallelism.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import competition, plots, stats
from .errors import SimulationError
from .lpp import build_grid
from .weights import WeightField

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


@dataclass
class RunConfig:
    """Fully serializable run description, embedded verbatim in reports."""

    command: str
    seed: int = 0
    n: int = 1000
    T: float = 100.0
    window: int = 300
    reps: int = 200
    reps_direct: int = 100
    r_ladder: list = field(default_factory=lambda: [500, 1000, 2000])
    n_ladder: list = field(default_factory=lambda: [250, 500, 1000])
    alpha: float = 45.0
    rect: int = 20
    mode: str = "target"
    t_level: float | None = None
    out: str = "out"
    format: str = "csv"

    def to_dict(self) -> dict:
        return asdict(self)


# Per-command defaults applied before config-file and flag overrides.
_COMMAND_DEFAULTS = {
    "grow": {"n": 200},
    "interface": {"n": 1000},
    "x2t-law": {"T": 500.0, "window": 1200},
    "coalescence-scan": {"n": 2000},
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cornergrowth",
        description="Corner-growth and exclusion-process experiments, "
                    "deterministic from a seed.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None,
                       help="base seed; replication k uses seed+k")
        p.add_argument("--out", type=str, default=None,
                       help="output directory (default: out)")
        p.add_argument("--format", choices=["csv", "json"], default=None,
                       help="sample dump format")
        p.add_argument("--config", type=str, default=None,
                       help="JSON config file; flags override its values")

    p = sub.add_parser("grow", help="dump one passage grid and its clusters")
    common(p)
    p.add_argument("--n", type=int, default=None, help="grid side")
    p.add_argument("--t-level", type=float, default=None,
                   help="interface level to overlay")

    p = sub.add_parser("interface", help="dump one competition interface trace")
    common(p)
    p.add_argument("--n", type=int, default=None, help="number of steps")

    p = sub.add_parser("angle-law", help="interface angle law experiment")
    common(p)
    p.add_argument("--n", type=int, default=None, help="final checkpoint")
    p.add_argument("--n-ladder", type=str, default=None,
                   help="comma-separated checkpoints, e.g. 250,500,1000")
    p.add_argument("--reps", type=int, default=None)

    p = sub.add_parser("x2t-law", help="second-class velocity law, both routes")
    common(p)
    p.add_argument("--n", type=int, default=None, help="coupled-route checkpoint")
    p.add_argument("--reps", type=int, default=None, help="coupled replications")
    p.add_argument("--reps-direct", type=int, default=None)
    p.add_argument("--T", type=float, default=None, help="direct-route horizon")
    p.add_argument("--window", type=int, default=None, help="half width")

    p = sub.add_parser("couple-verify", help="pathwise coupling verification")
    common(p)
    p.add_argument("--seeds", type=int, default=None, help="seeds to verify")
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--window", type=int, default=None, help="half width")
    p.add_argument("--rect", type=int, default=None,
                   help="weight rectangle side; enables Exp(1) pooling")
    p.add_argument("--pool-wprime", action="store_true",
                   help="pool extracted weights and KS-test them")

    p = sub.add_parser("geodesic-stats", help="deviation/fluctuation scan")
    common(p)
    p.add_argument("--n-ladder", type=str, default=None,
                   help="comma-separated sizes, e.g. 500,1000,2000")
    p.add_argument("--reps", type=int, default=None)

    p = sub.add_parser("shape-check", help="diagonal shape constant check")
    common(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--reps", type=int, default=None)

    p = sub.add_parser("coalescence-scan", help="geodesic coalescence scans")
    common(p)
    p.add_argument("--mode", choices=["target", "stabilize"], default=None)
    p.add_argument("--reps", type=int, default=None, help="seeds")
    p.add_argument("--n", type=int, default=None, help="target size (target mode)")
    p.add_argument("--alpha", type=float, default=None,
                   help="direction in degrees (stabilize mode)")
    p.add_argument("--r-ladder", type=str, default=None,
                   help="comma-separated radii, e.g. 500,1000,2000")
    return parser


def _parse_ladder(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _merge_config(args) -> RunConfig:
    cfg = RunConfig(command=args.command)
    for key, value in _COMMAND_DEFAULTS.get(args.command, {}).items():
        setattr(cfg, key, value)
    if getattr(args, "config", None):
        with open(args.config) as fh:
            file_values = json.load(fh)
        for key, value in file_values.items():
            if key == "command":
                continue
            if not hasattr(cfg, key):
                raise SystemExit(f"unknown config key {key!r}")
            setattr(cfg, key, value)
    overrides = {
        "seed": getattr(args, "seed", None),
        "out": getattr(args, "out", None),
        "format": getattr(args, "format", None),
        "n": getattr(args, "n", None),
        "T": getattr(args, "T", None),
        "window": getattr(args, "window", None),
        "reps": getattr(args, "reps", None) or getattr(args, "seeds", None),
        "reps_direct": getattr(args, "reps_direct", None),
        "alpha": getattr(args, "alpha", None),
        "rect": getattr(args, "rect", None),
        "mode": getattr(args, "mode", None),
        "t_level": getattr(args, "t_level", None),
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    if getattr(args, "r_ladder", None):
        cfg.r_ladder = _parse_ladder(args.r_ladder)
    if getattr(args, "n_ladder", None):
        cfg.n_ladder = _parse_ladder(args.n_ladder)
    return cfg


def _emit(report: stats.ExperimentReport, cfg: RunConfig, figure_fn=None):
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = out / report.name
    payload = report.to_dict()
    payload["config"] = cfg.to_dict()
    with open(f"{stem}_report.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if cfg.format == "json":
        report.write_samples_json(f"{stem}_samples.json")
    else:
        report.write_samples_csv(f"{stem}_samples.csv")
    if figure_fn is not None:
        figure_fn(f"{stem}.png")
    status = {True: "PASS", False: "FAIL", None: "DONE"}[report.passed]
    print(f"{status} {report.name}: {json.dumps(report.statistics, default=str)[:400]}"
          f" [{report.wall_clock:.1f}s]", file=sys.stderr)
    return EXIT_PASS if report.passed in (True, None) else EXIT_FAIL


def _cmd_grow(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    n = cfg.n
    fld = WeightField(seed=cfg.seed)
    grid = build_grid(fld, n, n)
    grid.to_csv(out / "grid.csv")
    labels = competition.label_clusters(grid)
    trace = competition.competition_interface(grid, n - 1)
    plots.cluster_figure(labels, trace, out / "grow.png", t=cfg.t_level)
    print(f"DONE grow: {n}x{n} grid, cluster sizes {labels.counts()}",
          file=sys.stderr)
    return EXIT_PASS


def _cmd_interface(cfg: RunConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    fld = WeightField(seed=cfg.seed)
    trace = competition.interface_trace_hashed(fld.dseed, cfg.n)
    trace.to_jsonl(out / "interface.jsonl")
    plots.interface_figure(trace, out / "interface.png")
    theta = competition.angle_estimate(trace, cfg.n)
    print(f"DONE interface: {cfg.n} steps, angle {math.degrees(theta):.2f} deg",
          file=sys.stderr)
    return EXIT_PASS


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0,) else 0
    try:
        cfg = _merge_config(args)
        if args.command == "grow":
            return _cmd_grow(cfg)
        if args.command == "interface":
            return _cmd_interface(cfg)
        if args.command == "angle-law":
            ladder = cfg.n_ladder
            if cfg.n not in ladder:
                ladder = sorted(set(ladder + [cfg.n]))
            report = stats.run_angle_law(seed_base=cfg.seed, reps=cfg.reps,
                                         ladder=ladder)
            n_max = max(ladder)
            final = [v for v, n in zip(report.samples["theta"],
                                       report.samples["n"]) if n == n_max]
            return _emit(report, cfg,
                         lambda p: plots.cdf_figure(final, "theta",
                                                    f"angle law at n={n_max}",
                                                    p, xlabel="theta"))
        if args.command == "x2t-law":
            report = stats.run_x2t_law(seed_base=cfg.seed,
                                       reps_coupled=cfg.reps, n=cfg.n,
                                       reps_direct=cfg.reps_direct,
                                       T=cfg.T, half_width=cfg.window)
            vals = [v for v, r in zip(report.samples["value"],
                                      report.samples["route"])
                    if r == "direct"]
            return _emit(report, cfg,
                         lambda p: plots.cdf_figure(vals, "uniform_pm1",
                                                    "velocity law (direct route)",
                                                    p, xlabel="X(T)/T"))
        if args.command == "couple-verify":
            pool = bool(getattr(args, "pool_wprime", False))
            report = stats.run_couple_verify(
                seed_base=cfg.seed, seeds=cfg.reps, T=cfg.T,
                half_width=cfg.window,
                rect=(cfg.rect, cfg.rect) if pool else None,
                pool_wprime=pool)
            return _emit(report, cfg,
                         lambda p: plots.coupling_figure(report, p))
        if args.command == "geodesic-stats":
            report = stats.run_deviation_scan(seed_base=cfg.seed,
                                              reps=cfg.reps,
                                              ladder=cfg.n_ladder)
            return _emit(report, cfg,
                         lambda p: plots.deviation_figure(report, p))
        if args.command == "shape-check":
            report = stats.run_shape_check(seed_base=cfg.seed, reps=cfg.reps,
                                           n=cfg.n)
            return _emit(report, cfg,
                         lambda p: plots.shape_figure(report, p))
        if args.command == "coalescence-scan":
            report = stats.run_coalescence_scan(
                seed_base=cfg.seed, seeds=cfg.reps, mode=cfg.mode,
                n=cfg.n, alpha_deg=cfg.alpha, r_ladder=cfg.r_ladder)
            return _emit(report, cfg,
                         lambda p: plots.stabilization_figure(report, p))
        raise SystemExit(EXIT_USAGE)
    except SimulationError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (OSError, ValueError) as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
