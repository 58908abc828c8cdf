"""Experiment runner: config loading, sweeps and artifact writing."""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, TypeVar

import numpy as np
import yaml
from pydantic import BaseModel, ValidationError
from scipy import stats

from aumai_depthsep.errors import BudgetExceededError, ConfigError
from aumai_depthsep.harness import (
    RandomFeatureModel,
    Sampler,
    mc_l2_error,
    random_feature_baseline,
    sinc4_cdf,
    spawn_seeds,
)
from aumai_depthsep.models import ExperimentConfig, ExperimentReport, SamplerConfig
from aumai_depthsep.netir import Activation, oscillatory_net
from aumai_depthsep.reporter import CSVReporter, JSONReporter
from aumai_depthsep.shallowify import compile_oscillatory, oscillatory_budget
from aumai_depthsep.spectral import (
    Window,
    heavy_tail_bound,
    heavy_tail_target,
    heavy_tail_threshold,
    kappa_sweep,
)
from aumai_depthsep.sphere import coefficient_table

__all__ = [
    "MAX_CONFIG_SIZE",
    "load_model",
    "config_hash",
    "ExperimentRunner",
    "run_experiment",
    "sample_report",
]

logger = logging.getLogger(__name__)

# Largest config file accepted by load_model (10 MB).
MAX_CONFIG_SIZE: int = 10 * 1024 * 1024

Row = list[float | int | str]
Table = tuple[list[str], list[Row], list[str]]
M = TypeVar("M", bound=BaseModel)


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------


def load_model(path: str | Path, model: type[M], max_size: int = MAX_CONFIG_SIZE) -> M:
    """Parse a YAML (or JSON) file into *model*.

    Raises:
        FileNotFoundError: If *path* does not exist.
        ConfigError: If the file is too large, not a mapping, or fails
            validation; ``path`` names the offending field.
    """
    file = Path(path)
    if not file.exists():
        raise FileNotFoundError(f"Config file not found: {file}")
    size = file.stat().st_size
    if size > max_size:
        raise ConfigError(f"config file exceeds {max_size:,} byte limit ({size:,} bytes): {file}")
    with file.open(encoding="utf-8") as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {file}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"expected a mapping in {file}, got {type(raw).__name__}")
    try:
        return model.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise ConfigError(f"invalid config {file}: {first['msg']}", path=where) from exc


def config_hash(config: BaseModel) -> str:
    """sha256 of the canonical JSON form of *config*."""
    canonical = json.dumps(config.model_dump(mode="json"), sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


def _oscillatory_task(config: ExperimentConfig, d: int, N: int, seed: int) -> Row:
    half = config.gamma / (2.0 * d)
    v, w = [half] * d, [half] * d
    try:
        net, cert = compile_oscillatory(config.r, v, w, Activation.relu(), N)
    except BudgetExceededError:
        return [d, N, seed, math.nan, math.nan, math.nan]
    sampler = Sampler(SamplerConfig(kind=config.sampler, d=d, seed=seed))
    mc = mc_l2_error(oscillatory_net(config.r, v, w), net, sampler, config.samples)
    predicted = cert.predicted_error if cert.predicted_error is not None else math.nan
    return [d, N, seed, mc.estimate, mc.std_error, predicted]


def _depth_sep_task(config: ExperimentConfig, d: int, N: int, seed: int) -> Row:
    """Random-feature shallow fit and compiled deep net on ``exp(2πi·r·Σ_j (x_j)₊)``."""
    if N < 1:
        return [d, N, seed, math.nan, math.nan, math.nan]
    v, w = [0.0] * d, [1.0] * d
    target = oscillatory_net(config.r, v, w)
    sampler = Sampler(SamplerConfig(kind=config.sampler, d=d, seed=seed))
    baseline = random_feature_baseline(
        target, sampler, N, n_train=config.train_points, bandwidth=2.0 * math.pi * config.r
    )
    shallow = mc_l2_error(target, baseline, sampler, config.samples)
    try:
        net, cert = compile_oscillatory(config.r, v, w, Activation.relu(), N)
    except BudgetExceededError:
        return [d, N, seed, shallow.estimate, math.nan, math.nan]
    deep = mc_l2_error(target, net, sampler, config.samples)
    predicted = cert.predicted_error if cert.predicted_error is not None else math.nan
    return [d, N, seed, shallow.estimate, deep.estimate, predicted]


def _grid_tasks(config: ExperimentConfig) -> list[tuple[int, int, int]]:
    """``(d, N, seed)`` per grid point and root seed; task seeds split from the root."""
    grid = list(itertools.product(config.sweep.d, config.sweep.N))
    return [
        (d, N, seed)
        for root in config.seeds
        for (d, N), seed in zip(grid, spawn_seeds(root, len(grid)), strict=True)
    ]


def _map_tasks(
    task: Callable[[ExperimentConfig, int, int, int], Row],
    config: ExperimentConfig,
    workers: int,
) -> list[Row]:
    def run_one(item: tuple[int, int, int]) -> Row:
        return task(config, *item)

    tasks = _grid_tasks(config)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run_one, tasks))
    return [run_one(item) for item in tasks]


class ExperimentRunner:
    """Run an :class:`ExperimentConfig` and write its artifacts.

    Typical usage::

        runner = ExperimentRunner()
        report = runner.run(runner.load("bench.yaml"))
        runner.write(report, "results/")
    """

    def load(self, path: str | Path, max_size: int = MAX_CONFIG_SIZE) -> ExperimentConfig:
        return load_model(path, ExperimentConfig, max_size)

    def run(self, config: ExperimentConfig, *, threads: int | None = None) -> ExperimentReport:
        """Execute the sweep; rows come out in grid order whatever the thread count."""
        handlers: dict[str, Callable[[ExperimentConfig, int], Table]] = {
            "oscillatory": self._run_oscillatory,
            "kappa": self._run_kappa,
            "sigma_table": self._run_sigma_table,
            "separation": self._run_separation,
            "depth_sep": self._run_depth_sep,
        }
        workers = threads or config.threads
        logger.info("experiment %s (%s) with %d thread(s)", config.name, config.experiment, workers)
        columns, rows, notes = handlers[config.experiment](config, workers)
        return ExperimentReport(
            name=config.name,
            experiment=config.experiment,
            config_hash=config_hash(config),
            seeds=config.seeds,
            columns=columns,
            rows=rows,
            notes=notes,
        )

    def write(self, report: ExperimentReport, output_dir: str | Path) -> tuple[Path, Path]:
        """Write ``<name>.csv`` and ``<name>.json``; returns both paths."""
        directory = Path(output_dir)
        directory.mkdir(parents=True, exist_ok=True)
        csv_path = directory / f"{report.name}.csv"
        json_path = directory / f"{report.name}.json"
        with csv_path.open("w", encoding="utf-8", newline="") as fh:
            CSVReporter().report(report, fh)
        with json_path.open("w", encoding="utf-8") as fh:
            JSONReporter().report(report, fh)
        return csv_path, json_path

    # ------------------------------------------------------------------
    # Experiments
    # ------------------------------------------------------------------

    def _run_oscillatory(self, config: ExperimentConfig, workers: int) -> Table:
        rows = _map_tasks(_oscillatory_task, config, workers)
        skipped = sum(1 for row in rows if isinstance(row[3], float) and math.isnan(row[3]))
        notes = [f"{skipped} task(s) skipped: N <= r·γ"] if skipped else []
        return ["d", "N", "seed", "l2_error", "std_error", "predicted"], rows, notes

    def _run_depth_sep(self, config: ExperimentConfig, workers: int) -> Table:
        rows = _map_tasks(_depth_sep_task, config, workers)
        notes = [f"shallow_error: {RandomFeatureModel.label} (ridge on N random cosine features)"]
        skipped = sum(1 for row in rows if isinstance(row[4], float) and math.isnan(row[4]))
        if skipped:
            notes.append(f"{skipped} deep compile(s) skipped: N <= r·d")
        columns = ["d", "N", "seed", "shallow_error", "deep_error", "deep_predicted"]
        return columns, rows, notes

    def _run_kappa(self, config: ExperimentConfig, workers: int) -> Table:
        sweep = kappa_sweep(Window.sinc2(), config.sweep.d, config.sweep.N)
        rows: list[Row] = [list(row) for row in sweep]
        return ["d", "N", "lower_bound", "regime"], rows, []

    def _run_sigma_table(self, config: ExperimentConfig, workers: int) -> Table:
        rows: list[Row] = []
        for d in config.sweep.d:
            table = coefficient_table(d, config.sweep.k_max)
            rows.extend([d, r.k, r.N, r.sigma, r.lam] for r in table)
        return ["d", "k", "N_k", "sigma_k", "lambda_k"], rows, []

    def _run_separation(self, config: ExperimentConfig, workers: int) -> Table:
        rows: list[Row] = []
        for d in config.sweep.d:
            target = heavy_tail_target(d)
            upper = oscillatory_budget(target.r, target.v, target.w, config.eps).log2_N
            threshold = heavy_tail_threshold(d)
            for N in config.sweep.N:
                rows.append([d, N, heavy_tail_bound(d, N), threshold, upper])
        return ["d", "N", "shallow_lower_bound", "threshold_N", "deep_log2_N"], rows, []


def run_experiment(path: str | Path, output_dir: str | Path | None = None) -> ExperimentReport:
    """Load, run and write in one call."""
    runner = ExperimentRunner()
    config = runner.load(path)
    report = runner.run(config)
    runner.write(report, output_dir if output_dir is not None else config.output_dir)
    return report


# ---------------------------------------------------------------------------
# Sampler sanity check
# ---------------------------------------------------------------------------


def _marginal_cdf(config: SamplerConfig) -> Callable[[Any], Any] | None:
    if config.kind == "product_sinc4":
        return sinc4_cdf
    if config.kind == "gaussian":
        return stats.norm(scale=config.effective_sigma).cdf
    if config.kind == "box":
        return stats.uniform(loc=-config.radius, scale=2.0 * config.radius).cdf
    return None


def sample_report(config: SamplerConfig, n: int) -> ExperimentReport:
    """Per-coordinate moments and a Kolmogorov–Smirnov test of each marginal.

    Sphere and ball marginals are not tested (NaN statistics).
    """
    x = Sampler(config).sample(n)
    cdf = _marginal_cdf(config)
    rows: list[Row] = []
    for j in range(config.d):
        column = x[:, j]
        if cdf is None:
            stat, pvalue = math.nan, math.nan
        else:
            result = stats.kstest(column, cdf)
            stat, pvalue = float(result.statistic), float(result.pvalue)
        rows.append([j, float(np.mean(column)), float(np.std(column)), stat, pvalue])
    return ExperimentReport(
        name=f"sample-{config.kind}",
        experiment="sample",
        config_hash=config_hash(config),
        seeds=[config.seed],
        columns=["coordinate", "mean", "std", "ks_statistic", "ks_pvalue"],
        rows=rows,
    )
