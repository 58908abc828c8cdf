"""Shared pytest fixtures for the aumai-depthsep test suite."""

from __future__ import annotations

import textwrap
from pathlib import Path

import numpy as np
import pytest

from aumai_depthsep.fixtures import normalised_deep_net, toy_abs_net, toy_two_layer_net
from aumai_depthsep.models import CompileConfig, ExperimentReport
from aumai_depthsep.netir import LayeredNet, dump_net

# ---------------------------------------------------------------------------
# Networks
# ---------------------------------------------------------------------------


@pytest.fixture()
def toy_net() -> LayeredNet:
    """``sigmoid(½·Σ cos(x_j/2))`` in two dimensions."""
    return toy_two_layer_net(2)


@pytest.fixture()
def deep_net() -> LayeredNet:
    """A three-hidden-layer net meeting the multi-layer normalisation."""
    return normalised_deep_net(d=2, width=2, L=3, seed=1)


@pytest.fixture()
def abs_net() -> LayeredNet:
    """Bias-free abs network in three dimensions."""
    return toy_abs_net(d=3, units=4, seed=2)


@pytest.fixture()
def rng() -> np.random.Generator:
    """Seeded generator for test inputs."""
    return np.random.default_rng(1234)


# ---------------------------------------------------------------------------
# Configs
# ---------------------------------------------------------------------------


@pytest.fixture()
def fast_config() -> CompileConfig:
    """Compile config with a light verification probe."""
    return CompileConfig(verify_points=1024, refine_points=20, seed=0)


@pytest.fixture()
def small_report() -> ExperimentReport:
    """A two-row experiment report."""
    return ExperimentReport(
        name="demo",
        experiment="kappa",
        config_hash="0" * 64,
        seeds=[0],
        columns=["d", "N", "lower_bound", "regime"],
        rows=[[60, 1, 0.86, "ok"], [3, 10, 0.0, "vacuous regime"]],
        notes=["two rows"],
    )


# ---------------------------------------------------------------------------
# Files
# ---------------------------------------------------------------------------


@pytest.fixture()
def toy_net_file(tmp_path: Path, toy_net: LayeredNet) -> Path:
    """The toy net written as a network JSON document."""
    path = tmp_path / "toy.json"
    path.write_text(dump_net(toy_net), encoding="utf-8")
    return path


@pytest.fixture()
def sigma_table_yaml(tmp_path: Path) -> Path:
    """A cheap experiment config (coefficient table, no sampling)."""
    path = tmp_path / "table.yaml"
    path.write_text(
        textwrap.dedent(f"""\
            name: table
            experiment: sigma_table
            sweep:
              d: [3, 4]
              k_max: 6
            seeds: [0]
            output_dir: {tmp_path / "results"}
        """),
        encoding="utf-8",
    )
    return path
