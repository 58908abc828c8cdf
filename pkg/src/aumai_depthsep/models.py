"""Pydantic v2 models for aumai-depthsep: certificates, configs and reports."""

from __future__ import annotations

import os
from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

__all__ = [
    "SEED_ENV_VAR",
    "default_seed",
    "Certificate",
    "LowerBoundCertificate",
    "CompileConfig",
    "SamplerConfig",
    "SweepSpec",
    "ExperimentConfig",
    "ExperimentReport",
    "CliConfig",
]

SEED_ENV_VAR = "AUMAI_DEPTHSEP_SEED"


def default_seed() -> int:
    """Seed from ``AUMAI_DEPTHSEP_SEED``, or 0 when unset or malformed."""
    raw = os.environ.get(SEED_ENV_VAR, "")
    try:
        return max(int(raw), 0)
    except ValueError:
        return 0


class Certificate(BaseModel):
    """Budget record emitted by every compiler.

    ``n``/``m``/``log2_N``/``V``/``B`` are the closed-form budgets; the
    ``*_used`` fields and ``atoms`` describe what was actually materialised.
    ``predicted_error`` is a certified upper bound on the sup (or L²) error of
    the materialised artifact, ``measured_error`` what verification observed.
    """

    model_config = ConfigDict(extra="forbid")

    pipeline: str = "two_layer"
    eps: float = Field(ge=0.0)
    n: int = Field(default=0, ge=0)
    m: int = Field(default=0, ge=0)
    p: int = Field(default=0, ge=0)
    log2_N: float = Field(default=0.0, ge=0.0)
    V: float = Field(default=0.0, ge=0.0)
    B: float = Field(default=0.0, ge=0.0)
    log2_B: float = 0.0
    constants: dict[str, float] = Field(default_factory=dict)
    n_used: int = Field(default=0, ge=0)
    m_used: int = Field(default=0, ge=0)
    atoms: int = Field(default=0, ge=0)
    units: int = Field(default=0, ge=0)
    measured_error: float | None = None
    predicted_error: float | None = None
    schedule: str = "adaptive"
    regime: str = "ok"
    notes: list[str] = Field(default_factory=list)

    @property
    def predicted_atoms(self) -> int:
        """``(2·n·p + 1)**m`` as an exact integer."""
        return (2 * self.n * self.p + 1) ** self.m


class LowerBoundCertificate(BaseModel):
    """Separation certificate from the Fourier-domain lower bound."""

    model_config = ConfigDict(extra="forbid")

    d: int = Field(gt=0)
    N: int = Field(ge=0)
    kappa_sq: float = Field(ge=0.0)
    alpha: float = Field(ge=0.0)
    lower_bound: float = Field(ge=0.0, le=1.0)
    regime: Literal["ok", "vacuous regime"] = "ok"
    constants: dict[str, float] = Field(default_factory=dict)
    notes: list[str] = Field(default_factory=list)


class CompileConfig(BaseModel):
    """Knobs shared by the deep-to-shallow compilers."""

    model_config = ConfigDict(extra="forbid")

    eps_split: float = Field(default=0.5, gt=0.0, lt=1.0)
    schedule: Literal["adaptive", "closed_form"] = "adaptive"
    atom_cap: int = Field(default=1_000_000, gt=0)
    prune_fraction: float = Field(default=0.1, ge=0.0, lt=1.0)
    min_inner_degree: int = Field(default=8, ge=2)
    max_inner_degree: int = Field(default=4096, ge=2)
    max_outer_degree: int = Field(default=64, ge=0)
    verify_points: int = Field(default=4096, gt=0)
    refine_points: int = Field(default=100, ge=0)
    shards: int = Field(default=1, ge=1)
    norm: Literal["l2", "linf"] = "l2"
    seed: int = Field(default_factory=default_seed, ge=0)
    first_layer_constant: float = Field(default=1.0, gt=0.0)
    gaussian_K: float = Field(default=1.0, gt=0.0)
    gaussian_s: float = Field(default=1.0, gt=0.0)
    fixed_dimension_beta: float = Field(default=1.0, gt=0.0)

    @model_validator(mode="after")
    def check_degree_range(self) -> CompileConfig:
        if self.max_inner_degree < self.min_inner_degree:
            raise ValueError("max_inner_degree must be >= min_inner_degree")
        return self


class SamplerConfig(BaseModel):
    """Measure to draw samples from."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["product_sinc4", "gaussian", "uniform_sphere", "uniform_ball", "box"]
    d: int = Field(gt=0)
    sigma: float | None = Field(default=None, gt=0.0)
    radius: float = Field(default=1.0, gt=0.0)
    seed: int = Field(default_factory=default_seed, ge=0)
    table_points: int = Field(default=2**16, ge=1024)
    table_radius: float = Field(default=64.0, gt=1.0)

    @property
    def effective_sigma(self) -> float:
        """Gaussian scale, defaulting to ``d**-0.5``."""
        return self.sigma if self.sigma is not None else self.d**-0.5


class SweepSpec(BaseModel):
    """Sweep axes of an experiment; an empty axis means an empty sweep."""

    model_config = ConfigDict(extra="forbid")

    d: list[Annotated[int, Field(gt=0)]] = Field(default_factory=list)
    N: list[Annotated[int, Field(ge=0)]] = Field(default_factory=list)
    k_max: int = Field(default=10, ge=0)


class ExperimentConfig(BaseModel):
    """An experiment file (YAML or JSON)."""

    model_config = ConfigDict(extra="forbid")

    name: str = Field(min_length=1)
    experiment: Literal["oscillatory", "kappa", "sigma_table", "separation", "depth_sep"]
    sweep: SweepSpec = Field(default_factory=SweepSpec)
    seeds: list[Annotated[int, Field(ge=0)]] = Field(default_factory=lambda: [default_seed()])
    samples: int = Field(default=4096, ge=2)
    train_points: int = Field(default=4096, ge=1)
    r: float = Field(default=4.0, ge=0.0)
    gamma: float = Field(default=1.0, gt=0.0)
    eps: float = Field(default=0.5, gt=0.0, lt=1.0)
    window: Literal["sinc2"] = "sinc2"
    sampler: Literal["product_sinc4", "gaussian", "uniform_sphere", "uniform_ball", "box"] = (
        "product_sinc4"
    )
    output_dir: str = "results"
    threads: int = Field(default=1, ge=1)

    @field_validator("seeds")
    @classmethod
    def validate_seeds(cls, value: list[int]) -> list[int]:
        """At least one seed is required."""
        if not value:
            raise ValueError("seeds must not be empty")
        return value


class ExperimentReport(BaseModel):
    """Tabular outcome of an experiment run."""

    name: str
    experiment: str
    schema_version: int = 1
    config_hash: str
    seeds: list[int]
    columns: list[str]
    rows: list[list[float | int | str]] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)


class CliConfig(BaseModel):
    """Validated numeric flags shared by the CLI subcommands."""

    model_config = ConfigDict(extra="forbid")

    subcommand: str
    inputs: list[str] = Field(default_factory=list)
    eps: float | None = Field(default=None, gt=0.0)
    d: int | None = Field(default=None, gt=0)
    N: int | None = Field(default=None, ge=0)
    seed: int = Field(default_factory=default_seed, ge=0)
    atom_cap: int = Field(default=1_000_000, gt=0)
    output_dir: str = "."
    threads: int = Field(default=1, ge=1)
