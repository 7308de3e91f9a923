"""Scenario configs, multi-seed runs and the two parameter sweeps."""

from __future__ import annotations

import csv
import math
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .geometry import DISTRIBUTIONS, generate_nodes
from .metrics import METRIC_FIELDS, PATH_ORDERS, MetricsReport, characteristic_metrics
from .shortcut import ShortcutParams, build_compound
from .topology import CompoundTopology, build_normal_channel, check_alpha

SERIES = ("C", "H", "M", "L", "m", "sc_ratio")
DEFAULT_SEEDS = tuple(range(20))
_NAME_RE = re.compile(r"^(random|normal|skewed|grid)-(\d+(?:\.\d+)?)$", re.IGNORECASE)


class ConfigError(ValueError):
    """Bad config key or value. ``key`` names the offending key."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    distribution: str
    r0: float
    n: int = 1000
    area_side: float = 1000.0
    alpha: float = 1.0
    k: int = 0
    radii_ratio: float = 5.0
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    path_order: str = "length"

    def __post_init__(self):
        if self.distribution not in DISTRIBUTIONS:
            raise ConfigError("distribution", f"unknown distribution {self.distribution!r}")
        if self.n < 1:
            raise ConfigError("n", "must be at least 1")
        if not self.area_side > 0:
            raise ConfigError("area_side_m", "must be positive")
        if not self.r0 > 0:
            raise ConfigError("r0_m", "must be positive")
        try:
            check_alpha(self.alpha)
        except ValueError as exc:
            raise ConfigError("alpha", str(exc)) from None
        if self.k < 0:
            raise ConfigError("k", "must be non-negative")
        if not self.radii_ratio > 1:
            raise ConfigError("radii_ratio", "must exceed 1")
        if not self.seeds:
            raise ConfigError("seeds", "at least one seed is required")
        if any(s < 0 for s in self.seeds):
            raise ConfigError("seeds", "seeds must be non-negative")
        if self.path_order not in PATH_ORDERS:
            raise ConfigError("path_order", f"expected one of {PATH_ORDERS}")
        m = _NAME_RE.match(self.name)
        if m and float(m.group(2)) != self.r0:
            raise ConfigError("name", f"suffix {m.group(2)} does not match r0_m={self.r0:g}")

    def with_(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)


def _scenario(name: str, distribution: str, r0: float) -> ScenarioConfig:
    return ScenarioConfig(name=name, distribution=distribution, r0=r0)


SCENARIOS: dict[str, ScenarioConfig] = {
    cfg.name: cfg
    for cfg in (
        _scenario("Random-40", "random", 40),
        _scenario("Random-50", "random", 50),
        _scenario("Random-60", "random", 60),
        _scenario("Normal-60", "normal", 60),
        _scenario("Skewed-50", "skewed", 50),
        _scenario("Grid-35", "grid", 35),
        _scenario("Grid-60", "grid", 60),
    )
}


def parse_seeds(text: str) -> tuple[int, ...]:
    seeds = tuple(int(s) for s in text.replace(" ", "").split(",") if s)
    if not seeds:
        raise ValueError("empty seed list")
    return seeds


# Config-file key -> (field name, parser).
CONFIG_KEYS: dict[str, tuple[str, Callable[[str], object]]] = {
    "name": ("name", str),
    "distribution": ("distribution", str.lower),
    "n": ("n", int),
    "area_side_m": ("area_side", float),
    "r0_m": ("r0", float),
    "alpha": ("alpha", float),
    "k": ("k", int),
    "radii_ratio": ("radii_ratio", float),
    "seeds": ("seeds", parse_seeds),
    "path_order": ("path_order", str.lower),
}


def _parse_value(key: str, raw: str):
    if key not in CONFIG_KEYS:
        raise ConfigError(key, "unknown key")
    attr, parse = CONFIG_KEYS[key]
    try:
        return attr, parse(raw.strip())
    except ValueError as exc:
        raise ConfigError(key, f"invalid value {raw.strip()!r} ({exc})") from None


def parse_config(text: str) -> ScenarioConfig:
    """Parse ``key = value`` lines (``:`` also accepted, ``#`` starts a comment)."""
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        if not sep:
            key, sep, raw = line.partition(":")
        if not sep:
            raise ConfigError(line, f"line {lineno} is not key=value")
        attr, value = _parse_value(key.strip(), raw)
        values[attr] = value
    for required, key in (("distribution", "distribution"), ("r0", "r0_m")):
        if required not in values:
            raise ConfigError(key, "missing required key")
    values.setdefault("name", f"{str(values['distribution']).capitalize()}-{values['r0']:g}")
    return ScenarioConfig(**values)


def load_config(path: Path | str) -> ScenarioConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def apply_overrides(cfg: ScenarioConfig, overrides: Iterable[str]) -> ScenarioConfig:
    changes = {}
    for item in overrides:
        key, sep, raw = item.partition("=")
        if not sep:
            raise ConfigError(item, "override must be key=value")
        attr, value = _parse_value(key.strip(), raw)
        changes[attr] = value
    return replace(cfg, **changes) if changes else cfg


def format_config(cfg: ScenarioConfig) -> str:
    inverse = {attr: key for key, (attr, _) in CONFIG_KEYS.items()}
    lines = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if f.name == "seeds":
            value = ",".join(str(s) for s in value)
        elif isinstance(value, float):
            value = f"{value:g}"
        lines.append(f"{inverse[f.name]} = {value}")
    return "\n".join(lines) + "\n"


# -- single runs -----------------------------------------------------------


def build_topology(cfg: ScenarioConfig, seed: int, k: int | None = None) -> CompoundTopology:
    nodes = generate_nodes(cfg.distribution, cfg.n, cfg.area_side, seed)
    params = ShortcutParams(cfg.radii_ratio, cfg.k if k is None else k, seed)
    return build_compound(nodes, cfg.r0, cfg.alpha, params)


def run_scenario(cfg: ScenarioConfig, seed: int) -> MetricsReport:
    return characteristic_metrics(build_topology(cfg, seed), cfg.path_order)


def _parallel_map(fn, items: Sequence, workers: int | None) -> list:
    workers = workers or 1
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


def default_workers() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def run_seeds(cfg: ScenarioConfig, workers: int | None = 1) -> list[MetricsReport]:
    return _parallel_map(_RunTask(cfg), list(cfg.seeds), workers)


@dataclass(frozen=True)
class _RunTask:
    cfg: ScenarioConfig

    def __call__(self, seed: int) -> MetricsReport:
        return run_scenario(self.cfg, seed)


# -- aggregation -----------------------------------------------------------


@dataclass(frozen=True)
class Aggregate:
    """Per-series mean, sample stddev and sample count.

    Metric series are per-seed ratios ``report / baseline``; ``sc_ratio`` is
    averaged as is. Undefined values (no connected pairs, zero baseline) are
    dropped seed-wise and show up as a lower count.
    """

    mean: dict[str, float | None]
    std: dict[str, float | None]
    count: dict[str, int]

    @property
    def single_sample(self) -> bool:
        return any(c == 1 for c in self.count.values())


def _ratio(value, base) -> float | None:
    if value is None or base is None or base == 0:
        return None
    return value / base


def aggregate_seeds(reports: Sequence[MetricsReport], baselines: Sequence[MetricsReport]) -> Aggregate:
    if len(reports) != len(baselines):
        raise ValueError(f"{len(reports)} reports but {len(baselines)} baselines")
    samples: dict[str, list[float]] = {name: [] for name in SERIES}
    for rep, base in zip(reports, baselines):
        for name in METRIC_FIELDS:
            r = _ratio(rep.value(name), base.value(name))
            if r is not None:
                samples[name].append(r)
        samples["sc_ratio"].append(rep.cumulative_sc_ratio)
    mean, std, count = {}, {}, {}
    for name, vals in samples.items():
        count[name] = len(vals)
        if not vals:
            mean[name] = std[name] = None
            continue
        arr = np.asarray(vals, dtype=float)
        mean[name] = float(arr.sum() / len(arr))
        std[name] = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
    return Aggregate(mean, std, count)


# -- sweeps ----------------------------------------------------------------


@dataclass(frozen=True)
class SweepPoint:
    axis_value: float
    stats: Aggregate

    def mean(self, name: str) -> float | None:
        return self.stats.mean[name]

    def std(self, name: str) -> float | None:
        return self.stats.std[name]


@dataclass
class SweepSeries:
    """One point per axis value; ``reports[s][p]`` is seed ``s`` at point ``p``."""

    axis: str
    scenario: str
    seeds: tuple[int, ...]
    points: list[SweepPoint]
    baselines: list[MetricsReport]
    reports: list[list[MetricsReport]]
    topologies: list | None = field(default=None, repr=False)

    @property
    def axis_values(self) -> list[float]:
        return [p.axis_value for p in self.points]

    def curve(self, name: str) -> list[float | None]:
        return [p.mean(name) for p in self.points]


@dataclass(frozen=True)
class _ChannelTask:
    cfg: ScenarioConfig
    k_max: int
    keep: bool

    def __call__(self, seed: int):
        full = build_topology(self.cfg, seed, k=self.k_max)
        reports = [characteristic_metrics(full.prefix(k), self.cfg.path_order) for k in range(self.k_max + 1)]
        return reports, (full if self.keep else None)


def sweep_channels(
    cfg: ScenarioConfig, k_max: int, *, workers: int | None = 1, keep_topologies: bool = False
) -> SweepSeries:
    """Metrics for k = 0..k_max, each seed reusing one incremental build."""
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    seeds = tuple(cfg.seeds)
    results = _parallel_map(_ChannelTask(cfg, k_max, keep_topologies), list(seeds), workers)
    reports = [r for r, _ in results]
    baselines = [r[0] for r in reports]
    points = [
        SweepPoint(float(k), aggregate_seeds([r[k] for r in reports], baselines))
        for k in range(k_max + 1)
    ]
    topologies = [t for _, t in results] if keep_topologies else None
    return SweepSeries("k", cfg.name, seeds, points, baselines, reports, topologies)


def default_ratio_grid(r0: float, area_side: float = 1000.0) -> list[float]:
    """``{2, 3, 5, 10, 15, 20}`` plus the largest useful ratio for the area."""
    top = math.floor(area_side * math.sqrt(2) / r0)
    grid = {2.0, 3.0, 5.0, 10.0, 15.0, 20.0, float(top)}
    return sorted(r for r in grid if 1 < r <= max(top, 2))


@dataclass(frozen=True)
class _RatioTask:
    cfg: ScenarioConfig
    ratios: tuple[float, ...]
    keep: bool

    def __call__(self, seed: int):
        cfg = self.cfg
        nodes = generate_nodes(cfg.distribution, cfg.n, cfg.area_side, seed)
        normal = build_normal_channel(nodes, cfg.r0, cfg.alpha)
        baseline = characteristic_metrics(
            CompoundTopology(nodes, float(cfg.r0), float(cfg.alpha), (normal,)), cfg.path_order
        )
        reports, topologies = [], []
        for ratio in self.ratios:
            topo = build_compound(nodes, cfg.r0, cfg.alpha, ShortcutParams(ratio, cfg.k, seed), normal=normal)
            reports.append(characteristic_metrics(topo, cfg.path_order))
            if self.keep:
                topologies.append(topo)
        return baseline, reports, (topologies if self.keep else None)


def sweep_radii_ratio(
    cfg: ScenarioConfig,
    ratios: Sequence[float] | None = None,
    *,
    workers: int | None = 1,
    keep_topologies: bool = False,
) -> SweepSeries:
    """Metrics at ``cfg.k`` channels for each short-cut length bound.

    Every ratio reuses the seed's node set and normal channel; the k = 0
    report of that seed is the baseline for all ratios.
    """
    if ratios is None:
        ratios = default_ratio_grid(cfg.r0, cfg.area_side)
    ratios = tuple(float(r) for r in ratios)
    if not ratios or any(r <= 1 for r in ratios):
        raise ValueError("ratios must be non-empty and all exceed 1")
    seeds = tuple(cfg.seeds)
    results = _parallel_map(_RatioTask(cfg, ratios, keep_topologies), list(seeds), workers)
    baselines = [b for b, _, _ in results]
    reports = [r for _, r, _ in results]
    points = [
        SweepPoint(ratio, aggregate_seeds([r[p] for r in reports], baselines))
        for p, ratio in enumerate(ratios)
    ]
    topologies = [t for _, _, t in results] if keep_topologies else None
    return SweepSeries("radii_ratio", cfg.name, seeds, points, baselines, reports, topologies)


# -- CSV output ------------------------------------------------------------


def _fmt(value, digits: int) -> str:
    if value is None:
        return "NA"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{value:.{digits}f}"


def metrics_header(k: int) -> list[str]:
    return (
        ["scenario", "seed", "k", "radii_ratio", "alpha", "C", "H", "M", "L", "m", "connected_pairs"]
        + [f"E{i}" for i in range(k + 1)]
        + ["sc_ratio"]
    )


def metrics_row(cfg: ScenarioConfig, seed, rep: MetricsReport) -> list[str]:
    return (
        [cfg.name, str(seed), str(rep.k), f"{cfg.radii_ratio:g}", f"{cfg.alpha:g}"]
        + [_fmt(rep.value(name), 3) for name in METRIC_FIELDS]
        + [str(rep.connected_pairs)]
        + [str(c) for c in rep.per_channel_edges]
        + [_fmt(rep.cumulative_sc_ratio, 6)]
    )


def _mean_or_na(values: list) -> float | None:
    vals = [v for v in values if v is not None]
    return math.fsum(vals) / len(vals) if vals else None


def write_metrics_csv(path: Path | str, cfg: ScenarioConfig, reports: Sequence[MetricsReport]) -> None:
    """One row per seed followed by a ``mean`` row."""
    k = reports[0].k
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(metrics_header(k))
        for seed, rep in zip(cfg.seeds, reports):
            out.writerow(metrics_row(cfg, seed, rep))
        row = [cfg.name, "mean", str(k), f"{cfg.radii_ratio:g}", f"{cfg.alpha:g}"]
        row += [_fmt(_mean_or_na([r.value(name) for r in reports]), 3) for name in METRIC_FIELDS]
        row += [_fmt(_mean_or_na([r.connected_pairs for r in reports]), 3)]
        row += [_fmt(_mean_or_na([r.per_channel_edges[i] for r in reports]), 3) for i in range(k + 1)]
        row += [_fmt(_mean_or_na([r.cumulative_sc_ratio for r in reports]), 6)]
        out.writerow(row)


def write_sweep_csv(path: Path | str, series: SweepSeries) -> None:
    """Long format: ``axis_value, metric_name, mean, stddev, n_seeds``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["axis_value", "metric_name", "mean", "stddev", "n_seeds"])
        for point in series.points:
            for name in SERIES:
                out.writerow(
                    [
                        f"{point.axis_value:g}",
                        name,
                        _fmt(point.mean(name), 6),
                        _fmt(point.std(name), 6),
                        point.stats.count[name],
                    ]
                )


def write_sweep_dat(path: Path | str, series: SweepSeries) -> None:
    """Whitespace-separated wide table (one row per axis value) for gnuplot."""
    with open(path, "w", encoding="utf-8") as fh:
        cols = [series.axis] + [f"{n}_{s}" for n in SERIES for s in ("mean", "std")]
        fh.write("# " + " ".join(cols) + "\n")
        for point in series.points:
            vals = [f"{point.axis_value:g}"]
            for name in SERIES:
                vals += [_fmt(point.mean(name), 6), _fmt(point.std(name), 6)]
            fh.write(" ".join(v if v != "NA" else "NaN" for v in vals) + "\n")
