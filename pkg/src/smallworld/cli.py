"""Command-line entry point.

    smallworld run --config random40.cfg --out out/
    smallworld sweep-k --scenario Random-40 --k-max 9
    smallworld sweep-ratio --scenario Random-60 --set k=9 --ratios 2,5,10
    smallworld gen --scenario Grid-35
    smallworld dump-topology --config random40.cfg --seed 3

Exit status: 0 on success, 2 on config or usage errors, 3 when output
cannot be written, 1 on anything unexpected.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import experiments as ex
from .geometry import generate_nodes
from .topology import write_nodes_csv, write_topology_csv

log = logging.getLogger("smallworld")

SEED_ENV = "SMALLWORLD_SEED"


class _Exit(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--config", type=Path, help="key=value scenario file")
    src.add_argument("--scenario", choices=sorted(ex.SCENARIOS), help="built-in scenario")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: out)")
    common.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
        help="override a config key; repeatable",
    )
    common.add_argument("--threads", type=int, default=None, help="worker processes (default: all cores)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="smallworld", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("gen", parents=[common], help="write node layouts (one CSV per seed)")
    sub.add_parser("run", parents=[common], help="metrics for every seed plus a mean row")
    sk = sub.add_parser("sweep-k", parents=[common], help="metric ratios for k = 0..k-max")
    sk.add_argument("--k-max", type=int, default=9)
    sr = sub.add_parser("sweep-ratio", parents=[common], help="metric ratios over RadiiRatio values")
    sr.add_argument("--ratios", default=None, help="comma list (default: 2,3,5,10,15,20,max)")
    dt = sub.add_parser("dump-topology", parents=[common], help="edge and node CSVs of one topology")
    dt.add_argument("--seed", type=int, default=None, help="seed to dump (default: first config seed)")
    return parser


def _load(args) -> ex.ScenarioConfig:
    try:
        if args.config is not None:
            try:
                cfg = ex.load_config(args.config)
            except OSError as exc:
                raise _Exit(2, f"cannot read config {args.config}: {exc.strerror or exc}") from None
        elif args.scenario is not None:
            cfg = ex.SCENARIOS[args.scenario]
        else:
            raise _Exit(2, "missing config: pass --config FILE or --scenario NAME")
        cfg = ex.apply_overrides(cfg, args.overrides)
        env = os.environ.get(SEED_ENV)
        if env:
            try:
                cfg = cfg.with_(seeds=ex.parse_seeds(env))
            except ValueError:
                raise _Exit(2, f"{SEED_ENV}: invalid seed list {env!r}") from None
    except ex.ConfigError as exc:
        raise _Exit(2, f"invalid config key {exc.key!r}: {exc}") from None
    return cfg


def _outdir(path: Path) -> Path:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise _Exit(3, f"cannot create output directory {path}: {exc.strerror or exc}") from None
    return path


def _write(fn, path: Path) -> None:
    try:
        fn(path)
    except OSError as exc:
        raise _Exit(3, f"cannot write {path}: {exc.strerror or exc}") from None
    log.info("wrote %s", path)


def _ratios(text: str | None, cfg: ex.ScenarioConfig) -> list[float]:
    if text is None:
        return ex.default_ratio_grid(cfg.r0, cfg.area_side)
    try:
        ratios = [float(r) for r in text.split(",") if r.strip()]
    except ValueError:
        raise _Exit(2, f"--ratios: invalid list {text!r}") from None
    if not ratios or any(r <= 1 for r in ratios):
        raise _Exit(2, "--ratios: values must all exceed 1")
    return ratios


def _dispatch(args) -> None:
    cfg = _load(args)
    workers = args.threads if args.threads is not None else ex.default_workers()
    if workers < 1:
        raise _Exit(2, "--threads must be at least 1")
    out = _outdir(args.out)

    if args.command == "gen":
        for seed in cfg.seeds:
            nodes = generate_nodes(cfg.distribution, cfg.n, cfg.area_side, seed)
            _write(lambda p: write_nodes_csv(nodes, p), out / f"nodes_seed{seed}.csv")
    elif args.command == "run":
        reports = ex.run_seeds(cfg, workers)
        _write(lambda p: ex.write_metrics_csv(p, cfg, reports), out / "metrics.csv")
    elif args.command == "sweep-k":
        if args.k_max < 0:
            raise _Exit(2, "--k-max must be non-negative")
        series = ex.sweep_channels(cfg, args.k_max, workers=workers)
        _write(lambda p: ex.write_sweep_csv(p, series), out / "sweep_k.csv")
        _write(lambda p: ex.write_sweep_dat(p, series), out / "sweep_k.dat")
    elif args.command == "sweep-ratio":
        series = ex.sweep_radii_ratio(cfg, _ratios(args.ratios, cfg), workers=workers)
        _write(lambda p: ex.write_sweep_csv(p, series), out / "sweep_ratio.csv")
        _write(lambda p: ex.write_sweep_dat(p, series), out / "sweep_ratio.dat")
    elif args.command == "dump-topology":
        seed = cfg.seeds[0] if args.seed is None else args.seed
        topo = ex.build_topology(cfg, seed)
        nodes_path = out / f"nodes_seed{seed}.csv"
        _write(lambda p: write_topology_csv(topo, p, nodes_path), out / f"edges_seed{seed}.csv")


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    try:
        _dispatch(args)
    except _Exit as exc:
        print(f"smallworld: {exc}", file=sys.stderr)
        return exc.status
    except Exception as exc:  # one-line diagnostic instead of a traceback
        print(f"smallworld: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
