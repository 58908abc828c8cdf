"""Samplers and error estimators shared by the compilers and experiments.

Measures:

* ``product_sinc4``: density ``Π (3/2)·sinc⁴(πx_j)``, drawn per coordinate
  from a tabulated inverse CDF with a Pareto-proposal rejection tail;
* ``gaussian``: ``N(0, σ²I)`` with ``σ = d**-0.5`` unless configured;
* ``uniform_sphere`` / ``uniform_ball`` / ``box``.

Every draw is a pure function of ``(seed, stream)``.
"""

from __future__ import annotations

import functools
import logging
import math
from collections.abc import Callable
from typing import Any, Literal, NamedTuple

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field
from scipy import linalg
from scipy.integrate import cumulative_trapezoid
from scipy.stats import norm, qmc

from aumai_depthsep.errors import DomainError, ShapeError
from aumai_depthsep.models import SamplerConfig

__all__ = [
    "Sampler",
    "ProbeDomain",
    "MCEstimate",
    "SupProbe",
    "TailCheck",
    "RandomFeatureModel",
    "spawn_seeds",
    "sinc4_cdf",
    "mc_l2_error",
    "grid_sup_error",
    "gaussian_tail_bound",
    "gaussian_tail_check",
    "random_feature_baseline",
]

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
BatchFunction = Callable[[FloatArray], Any]

_EVAL_BATCH = 8192
_REFINE_ROUNDS = 4


def spawn_seeds(seed: int, count: int) -> list[int]:
    """Split *seed* into *count* independent 63-bit child seeds."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(child.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1)) for child in children]


# ---------------------------------------------------------------------------
# product sinc⁴ table
# ---------------------------------------------------------------------------


class _Sinc4Table(NamedTuple):
    grid: FloatArray
    cdf: FloatArray
    radius: float
    tail_mass: float


def _sinc4_density(x: FloatArray) -> FloatArray:
    return 1.5 * np.sinc(x) ** 4


@functools.lru_cache(maxsize=8)
def _sinc4_table(points: int, radius: float) -> _Sinc4Table:
    grid = np.linspace(-radius, radius, points + 1)
    cumulative = cumulative_trapezoid(_sinc4_density(grid), grid, initial=0.0)
    # Beyond the table sin⁴ averages 3/8 against the 1/(π⁴x⁴) envelope.
    tail = 0.1875 / (math.pi**4 * radius**3)
    cdf = tail + (1.0 - 2.0 * tail) * cumulative / cumulative[-1]
    grid.setflags(write=False)
    cdf.setflags(write=False)
    return _Sinc4Table(grid, cdf, radius, tail)


def sinc4_cdf(
    x: npt.ArrayLike, *, table_points: int = 2**16, table_radius: float = 64.0
) -> FloatArray:
    """CDF of the one-dimensional density ``(3/2)·sinc⁴(πx)``."""
    table = _sinc4_table(table_points, table_radius)
    arr = np.asarray(x, dtype=float)
    inside = np.interp(arr, table.grid, table.cdf)
    with np.errstate(divide="ignore"):
        left = table.tail_mass * (table.radius / np.abs(arr)) ** 3
    out = np.where(arr < -table.radius, left, inside)
    return np.asarray(np.where(arr > table.radius, 1.0 - left, out), dtype=float)


def _sinc4_tail(rng: np.random.Generator, n: int, radius: float) -> FloatArray:
    """|X| conditioned on |X| > radius: Pareto(3) proposal, accept w.p. sin⁴(πx)."""
    out = np.empty(0)
    while out.size < n:
        proposal = radius * rng.random(2 * (n - out.size) + 8) ** (-1.0 / 3.0)
        accept = rng.random(proposal.size) < np.sin(np.pi * proposal) ** 4
        out = np.concatenate([out, proposal[accept]])
    return out[:n]


# ---------------------------------------------------------------------------
# Sampler
# ---------------------------------------------------------------------------


class Sampler:
    """Draws ``(n, d)`` batches from the configured measure.

    Args:
        config: Measure description; see :class:`SamplerConfig`.
    """

    def __init__(self, config: SamplerConfig) -> None:
        self._config = config

    @classmethod
    def of(cls, kind: str, d: int, **kwargs: Any) -> Sampler:
        """Shorthand for ``Sampler(SamplerConfig(kind=kind, d=d, ...))``."""
        return cls(SamplerConfig(kind=kind, d=d, **kwargs))  # type: ignore[arg-type]

    @property
    def config(self) -> SamplerConfig:
        return self._config

    @property
    def d(self) -> int:
        return self._config.d

    def rng(self, stream: int = 0) -> np.random.Generator:
        return np.random.default_rng([self._config.seed, stream])

    def sample(self, n: int, *, stream: int = 0) -> FloatArray:
        """Draw *n* points; the same ``(seed, stream)`` always gives the same batch."""
        if n < 0:
            raise DomainError(f"sample count must be >= 0, got {n}")
        cfg = self._config
        rng = self.rng(stream)
        shape = (n, cfg.d)
        if cfg.kind == "gaussian":
            return rng.normal(0.0, cfg.effective_sigma, size=shape)
        if cfg.kind == "box":
            return rng.uniform(-cfg.radius, cfg.radius, size=shape)
        if cfg.kind in ("uniform_sphere", "uniform_ball"):
            directions = _normalise(rng.standard_normal(shape))
            if cfg.kind == "uniform_sphere":
                return cfg.radius * directions
            radii = cfg.radius * rng.random(n) ** (1.0 / cfg.d)
            return directions * radii[:, None]
        return self._sample_sinc4(rng, shape)

    def _sample_sinc4(self, rng: np.random.Generator, shape: tuple[int, int]) -> FloatArray:
        cfg = self._config
        table = _sinc4_table(cfg.table_points, cfg.table_radius)
        u = rng.random(shape)
        out = np.interp(u, table.cdf, table.grid)
        low = u < table.tail_mass
        high = u > 1.0 - table.tail_mass
        hits = int(low.sum() + high.sum())
        if hits:
            logger.debug("product_sinc4: %d tail draws beyond |x| > %g", hits, table.radius)
            tail = _sinc4_tail(rng, hits, table.radius)
            signs = np.where(low[low | high], -1.0, 1.0)
            out[low | high] = signs * tail
        return out


def _normalise(z: FloatArray) -> FloatArray:
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return z / norms


def _evaluate(f: BatchFunction, x: FloatArray) -> npt.NDArray[Any]:
    out = np.empty(x.shape[0], dtype=complex)
    for start in range(0, x.shape[0], _EVAL_BATCH):
        block = x[start : start + _EVAL_BATCH]
        out[start : start + _EVAL_BATCH] = np.broadcast_to(
            np.asarray(f(block)), (block.shape[0],)
        )
    return out


# ---------------------------------------------------------------------------
# Monte-Carlo L² error
# ---------------------------------------------------------------------------


class MCEstimate(NamedTuple):
    """``‖f − g‖_{μ,2}`` estimate with its jackknife standard error."""

    estimate: float
    std_error: float
    samples: int
    nonfinite: int


def mc_l2_error(
    f: BatchFunction,
    g: BatchFunction,
    sampler: Sampler,
    n: int,
    *,
    stream: int = 0,
) -> MCEstimate:
    """Monte-Carlo estimate of the L² distance under the sampler's measure.

    The mean of ``|f − g|²`` is unbiased; the reported value is its square
    root, with a leave-one-out jackknife standard error.  Non-finite
    evaluations are dropped and counted.

    Raises:
        DomainError: If ``n < 2``.
    """
    if n < 2:
        raise DomainError(f"need at least two samples, got {n}")
    x = sampler.sample(n, stream=stream)
    sq = np.abs(_evaluate(f, x) - _evaluate(g, x)) ** 2
    finite = np.isfinite(sq)
    nonfinite = int((~finite).sum())
    if nonfinite:
        logger.warning("mc_l2_error: dropped %d non-finite evaluations", nonfinite)
    sq = sq[finite]
    m = sq.size
    if m < 2:
        return MCEstimate(math.nan, math.nan, m, nonfinite)
    total = float(sq.sum())
    estimate = math.sqrt(max(total / m, 0.0))
    loo = np.sqrt(np.maximum((total - sq) / (m - 1), 0.0))
    std_error = math.sqrt((m - 1) / m * float(np.sum((loo - loo.mean()) ** 2)))
    return MCEstimate(estimate, std_error, m, nonfinite)


# ---------------------------------------------------------------------------
# Sup-norm probe
# ---------------------------------------------------------------------------


class ProbeDomain(BaseModel):
    """A compact set to probe: ``[−R, R]^d``, the radius-R ball or sphere."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["box", "ball", "sphere"] = "ball"
    d: int = Field(gt=0)
    radius: float = Field(default=1.0, gt=0.0)

    def embed(self, u: FloatArray) -> FloatArray:
        """Map points of the unit cube of dimension :attr:`qmc_dimension` into the domain."""
        if self.kind == "box":
            return self.radius * (2.0 * u - 1.0)
        clipped = np.clip(u, 1e-12, 1.0 - 1e-12)
        directions = _normalise(norm.ppf(clipped[:, : self.d]))
        if self.kind == "sphere":
            return self.radius * directions
        return directions * (self.radius * clipped[:, self.d] ** (1.0 / self.d))[:, None]

    @property
    def qmc_dimension(self) -> int:
        return self.d + 1 if self.kind == "ball" else self.d

    def project(self, x: FloatArray) -> FloatArray:
        if self.kind == "box":
            return np.clip(x, -self.radius, self.radius)
        norms = np.linalg.norm(x, axis=1, keepdims=True)
        if self.kind == "sphere":
            return self.radius * _normalise(x)
        return np.where(norms > self.radius, x * self.radius / np.maximum(norms, 1e-300), x)


class SupProbe(NamedTuple):
    """Largest observed ``|f − g|`` and where it occurred."""

    value: float
    point: FloatArray


def grid_sup_error(
    f: BatchFunction,
    g: BatchFunction,
    domain: ProbeDomain,
    n_points: int = 10_000,
    *,
    refine_points: int = 100,
    seed: int = 0,
) -> SupProbe:
    """Max of ``|f − g|`` over a scrambled Sobol set plus local refinement.

    The value is a maximum over probes, so it never exceeds the true sup.
    With fixed *seed* and ``refine_points=0`` it is non-decreasing in
    *n_points* (Sobol prefixes are nested).
    """
    if n_points < 1:
        raise DomainError(f"n_points must be >= 1, got {n_points}")
    engine = qmc.Sobol(domain.qmc_dimension, scramble=True, seed=seed)
    u = engine.random_base2(max(0, math.ceil(math.log2(n_points))))[:n_points]
    x = domain.embed(u)
    gap = np.abs(_evaluate(f, x) - _evaluate(g, x))
    if not np.all(np.isfinite(gap)):
        raise ShapeError("grid_sup_error: functions returned non-finite values")
    best = int(np.argmax(gap))
    value, point = float(gap[best]), x[best].copy()
    if refine_points > 0:
        rng = np.random.default_rng([seed, 1])
        per_round = max(1, math.ceil(refine_points / _REFINE_ROUNDS))
        scale = 0.05 * domain.radius
        for _ in range(_REFINE_ROUNDS):
            cand = domain.project(point + scale * rng.standard_normal((per_round, domain.d)))
            cand_gap = np.abs(_evaluate(f, cand) - _evaluate(g, cand))
            top = int(np.argmax(cand_gap))
            if cand_gap[top] > value:
                value, point = float(cand_gap[top]), cand[top].copy()
            scale *= 0.25
    return SupProbe(value, point)


# ---------------------------------------------------------------------------
# Gaussian tail
# ---------------------------------------------------------------------------


def gaussian_tail_bound(d: int, sigma: float, t: float) -> float:
    """``P{‖X‖ ≥ σ√d + t} ≤ exp(−t²/2σ²)`` for ``X ~ N(0, σ²I_d)``."""
    if d < 1 or sigma <= 0.0 or t < 0.0:
        raise DomainError(f"need d >= 1, sigma > 0, t >= 0; got d={d}, sigma={sigma}, t={t}")
    return math.exp(-t * t / (2.0 * sigma * sigma))


class TailCheck(NamedTuple):
    frequency: float
    bound: float
    samples: int

    @property
    def holds(self) -> bool:
        return self.frequency <= self.bound


def gaussian_tail_check(d: int, sigma: float, t: float, n: int, seed: int = 0) -> TailCheck:
    """Empirical ``P{‖X‖ ≥ σ√d + t}`` next to its closed-form bound."""
    bound = gaussian_tail_bound(d, sigma, t)
    sampler = Sampler.of("gaussian", d, sigma=sigma, seed=seed)
    norms = np.linalg.norm(sampler.sample(n), axis=1)
    frequency = float(np.mean(norms >= sigma * math.sqrt(d) + t)) if n else 0.0
    return TailCheck(frequency, bound, n)


# ---------------------------------------------------------------------------
# Random-feature baseline
# ---------------------------------------------------------------------------


class RandomFeatureModel:
    """``x -> Σ_k c_k cos(ω_k·x + b_k)``, a ridge fit on random cosine features.

    A heuristic stand-in for the best N-unit shallow approximant; reports
    label it as such.
    """

    label = "heuristic random-feature baseline"

    def __init__(self, omegas: FloatArray, phases: FloatArray, coeffs: npt.NDArray[Any]) -> None:
        self.omegas = omegas
        self.phases = phases
        self.coeffs = coeffs

    @property
    def n_features(self) -> int:
        return int(self.omegas.shape[0])

    def features(self, x: npt.ArrayLike) -> FloatArray:
        arr = np.atleast_2d(np.asarray(x, dtype=float))
        return np.cos(arr @ self.omegas.T + self.phases)

    def __call__(self, x: npt.ArrayLike) -> npt.NDArray[Any]:
        return self.features(x) @ self.coeffs


def random_feature_baseline(
    target: BatchFunction,
    sampler: Sampler,
    n_features: int,
    *,
    n_train: int = 4096,
    bandwidth: float = 1.0,
    ridge: float = 1e-6,
    stream: int = 0,
) -> RandomFeatureModel:
    """Fit *n_features* random cosine units to *target* by ridge regression.

    Frequencies are ``N(0, bandwidth²I)``, phases uniform on ``[0, 2π)``;
    training points come from *sampler* on stream ``stream + 1`` so that an
    evaluation on stream *stream* is out of sample.
    """
    if n_features < 1 or n_train < 1:
        raise DomainError("need at least one feature and one training point")
    rng = sampler.rng(stream + 2)
    omegas = bandwidth * rng.standard_normal((n_features, sampler.d))
    phases = rng.uniform(0.0, 2.0 * math.pi, n_features)
    x = sampler.sample(n_train, stream=stream + 1)
    model = RandomFeatureModel(omegas, phases, np.zeros(n_features))
    phi = model.features(x)
    y = _evaluate(target, x)
    gram = phi.T @ phi + ridge * n_train * np.eye(n_features)
    coeffs = linalg.solve(gram, phi.T @ y, assume_a="pos")
    if not np.iscomplexobj(y) or not np.any(y.imag):
        coeffs = coeffs.real
    model.coeffs = coeffs
    return model
