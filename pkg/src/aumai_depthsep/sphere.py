"""Zonal harmonic analysis on the unit sphere ``S^{d−1}``.

Normalised Gegenbauer polynomials ``P_k^d`` (``P_k^d(1) = 1``), the
projected measure ``μ_d`` on ``[−1, 1]``, Funk–Hecke coefficients, the
eigenvalues of the ``|xᵀy|`` kernel, γ₁ upper bounds, spreadness ratios,
low-coherence sign frames and inapproximability certificates against
one-hidden-layer networks.
"""

from __future__ import annotations

import functools
import itertools
import json
import logging
import math
from collections.abc import Callable, Iterable, Mapping, Sequence
from typing import Any, Literal, NamedTuple

import numpy as np
import numpy.typing as npt
from scipy.integrate import quad
from scipy.special import gammaln, gammasgn, roots_gegenbauer, roots_jacobi

from aumai_depthsep.errors import (
    CapabilityError,
    DegenerateInputError,
    DomainError,
    NumericError,
    PreconditionError,
    ShapeError,
)
from aumai_depthsep.harness import Sampler
from aumai_depthsep.netir import Activation, Layer, LayeredNet

__all__ = [
    "harmonic_dim",
    "sphere_dimension_log",
    "gegenbauer",
    "gegenbauer_explicit",
    "gegenbauer_bound",
    "MuMeasure",
    "mu_quadrature",
    "funk_hecke",
    "blaschke_levy_sigma",
    "ZonalTerm",
    "ComponentNorms",
    "ZonalSeries",
    "RidgeMeasure",
    "gamma1_upper",
    "ell_ratio",
    "spread_frame",
    "frame_coherence",
    "export_frame",
    "SparseSpread",
    "sparse_spread",
    "sign_invariant_spread_check",
    "inapprox_certificate",
    "atom_sample_approx",
    "CoefficientRow",
    "coefficient_table",
    "sigma_inverse_constant",
]

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]

MAX_FRAME_DIMENSION = 20
_UNIT_TOL = 1e-9
_GRAM_DECIMALS = 12


# ---------------------------------------------------------------------------
# Dimensions and Gegenbauer polynomials
# ---------------------------------------------------------------------------


def _check_dk(d: int, k: int) -> None:
    if d < 2 or k < 0:
        raise DomainError(f"need d >= 2 and k >= 0, got d={d}, k={k}")


def harmonic_dim(d: int, k: int) -> int:
    """``N_k^d = (2k+d−2)(k+d−3)!/(k!(d−2)!)``, exact.

    Computed as ``C(k+d−1, d−1) − C(k+d−3, d−1)``; Python integers do not
    overflow, use :func:`sphere_dimension_log` where a float is needed.
    """
    _check_dk(d, k)
    lower = math.comb(k + d - 3, d - 1) if k >= 2 else 0
    return math.comb(k + d - 1, d - 1) - lower


def sphere_dimension_log(d: int, k: int) -> float:
    """``log N_k^d`` via log-Γ."""
    _check_dk(d, k)
    if k == 0:
        return 0.0
    return float(
        math.log(2 * k + d - 2) + gammaln(k + d - 2) - gammaln(k + 1) - gammaln(d - 1)
    )


def gegenbauer(d: int, k: int, t: npt.ArrayLike) -> Any:
    """``P_k^d(t)`` by the three-term recurrence.

    ``P_k = ((2k+d−4)·t·P_{k−1} − (k−1)·P_{k−2}) / (k+d−3)``.

    Raises:
        DomainError: If ``|t| > 1``.
    """
    _check_dk(d, k)
    arr = np.asarray(t, dtype=float)
    if np.any(np.abs(arr) > 1.0 + 1e-12):
        raise DomainError("Gegenbauer polynomials are evaluated on [-1, 1]")
    x = np.clip(arr, -1.0, 1.0)
    prev, curr = np.ones_like(x), x.copy()
    if k == 0:
        curr = prev
    for j in range(2, k + 1):
        prev, curr = curr, ((2 * j + d - 4) * x * curr - (j - 1) * prev) / (j + d - 3)
    return float(curr) if curr.ndim == 0 else curr


def gegenbauer_explicit(d: int, k: int, t: float) -> float:
    """Closed-form sum for ``P_k^d(t)``; cancellative beyond small k."""
    _check_dk(d, k)
    half = (d - 1) / 2.0
    total = 0.0
    for j in range(k // 2 + 1):
        total += (
            (-1) ** j
            * (1.0 - t * t) ** j
            * t ** (k - 2 * j)
            / (4**j * math.factorial(j) * math.factorial(k - 2 * j) * math.gamma(j + half))
        )
    return math.factorial(k) * math.gamma(half) * total


def gegenbauer_bound(d: int, k: int, t: float) -> float:
    """``(d/(k(1 − t²)))^{(d−2)/2}`` bound on ``|P_k^d(t)|``."""
    _check_dk(d, k)
    if k == 0 or abs(t) >= 1.0:
        return math.inf
    return float((d / (k * (1.0 - t * t))) ** ((d - 2) / 2.0))


def _gegenbauer_roots(d: int, k: int) -> FloatArray:
    if k == 0:
        return np.zeros(0)
    if d == 2:
        j = np.arange(1, k + 1)
        return np.sort(np.cos((2 * j - 1) * np.pi / (2 * k)))
    roots, _ = roots_gegenbauer(k, (d - 2) / 2.0)
    return np.sort(np.asarray(roots, dtype=float))


# ---------------------------------------------------------------------------
# The projected measure μ_d
# ---------------------------------------------------------------------------


def _alpha_d(d: int) -> float:
    """``ω_{d−1}/ω_d``, the normaliser of ``(1 − t²)^{(d−3)/2}``."""
    return float(np.exp(gammaln(d / 2.0) - gammaln((d - 1) / 2.0)) / math.sqrt(math.pi))


class MuMeasure(NamedTuple):
    """Gauss–Jacobi rule for ``dμ_d(t) = α_d(1 − t²)^{(d−3)/2} dt``."""

    d: int
    nodes: FloatArray
    weights: FloatArray
    alpha_d: float

    def integrate(self, f: Callable[[FloatArray], Any]) -> float:
        return float(np.dot(self.weights, np.asarray(f(self.nodes), dtype=float)))


@functools.lru_cache(maxsize=64)
def mu_quadrature(d: int, n: int = 128) -> MuMeasure:
    """Cached n-point rule, exact for polynomials of degree ``< 2n``."""
    if d < 2 or n < 1:
        raise DomainError(f"need d >= 2 and n >= 1, got d={d}, n={n}")
    a = (d - 3) / 2.0
    nodes, weights = roots_jacobi(n, a, a)
    weights = weights / weights.sum()
    for arr in (nodes, weights):
        arr.setflags(write=False)
    return MuMeasure(d, nodes, weights, _alpha_d(d))


def _mu_integral(
    f: Callable[[float], float],
    d: int,
    breakpoints: Iterable[float] = (),
    *,
    tol: float = 1e-9,
) -> float:
    """``∫ f dμ_d`` by adaptive quadrature, split at *breakpoints*.

    The end pieces carry the algebraic endpoint weight exactly.
    """
    a = (d - 3) / 2.0
    edges = [-1.0, *sorted(float(b) for b in breakpoints if -1.0 < b < 1.0), 1.0]
    last = len(edges) - 2
    total = err = 0.0
    for i, (lo, hi) in enumerate(itertools.pairwise(edges)):
        if last == 0:
            value, e = quad(
                f, lo, hi, weight="alg", wvar=(a, a), epsabs=1e-13, epsrel=1e-12, limit=200
            )
        elif i == 0:
            value, e = quad(lambda t: f(t) * (1.0 - t) ** a, lo, hi,
                            weight="alg", wvar=(a, 0.0), epsabs=1e-13, epsrel=1e-12, limit=200)
        elif i == last:
            value, e = quad(lambda t: f(t) * (1.0 + t) ** a, lo, hi,
                            weight="alg", wvar=(0.0, a), epsabs=1e-13, epsrel=1e-12, limit=200)
        else:
            value, e = quad(lambda t: f(t) * (1.0 - t * t) ** a, lo, hi,
                            epsabs=1e-13, epsrel=1e-12, limit=200)
        total += value
        err += e
    alpha = _alpha_d(d)
    if alpha * err > tol:
        raise NumericError(f"μ_{d} quadrature did not converge", achieved=alpha * err)
    return alpha * total


def funk_hecke(
    sigma: Callable[[Any], Any],
    d: int,
    k: int,
    *,
    breakpoints: Sequence[float] = (0.0,),
    tol: float = 1e-9,
) -> float:
    """``λ_k = ⟨σ, P_k^d⟩_{μ_d}``.

    Pass the kinks of σ as *breakpoints* (0 by default, which covers the
    usual ridge activations).

    Raises:
        NumericError: If the quadrature error estimate exceeds *tol*.
    """
    _check_dk(d, k)

    def integrand(t: float) -> float:
        return float(np.asarray(sigma(t), dtype=float)) * gegenbauer(d, k, t)

    return _mu_integral(integrand, d, breakpoints, tol=tol)


def blaschke_levy_sigma(d: int, k: int) -> float:
    """Eigenvalue of ``f -> ∫|xᵀy| f(y) dτ(y)`` on degree-k harmonics.

    ``σ_k = (−1)^{1+k/2}/(2π) · Γ((k−1)/2)Γ(d/2)/Γ((k+d+1)/2)``; equals
    ``funk_hecke(abs, d, k)``.

    Raises:
        DomainError: For odd k (the operator acts on even functions).
    """
    _check_dk(d, k)
    if k % 2:
        raise DomainError(f"σ_k is defined for even k only, got k={k}")
    log_mag = gammaln((k - 1) / 2.0) + gammaln(d / 2.0) - gammaln((k + d + 1) / 2.0)
    sign = (-1.0) ** (1 + k // 2) * float(gammasgn((k - 1) / 2.0))
    return float(sign * np.exp(log_mag) / (2.0 * math.pi))


@functools.lru_cache(maxsize=256)
def _zonal_l1(d: int, k: int) -> float:
    """``‖P_k^d‖_{μ_d,1}``."""
    return _mu_integral(
        lambda t: abs(gegenbauer(d, k, t)), d, _gegenbauer_roots(d, k).tolist()
    )


# ---------------------------------------------------------------------------
# Zonal series and ridge measures
# ---------------------------------------------------------------------------


class ZonalTerm(NamedTuple):
    """``coeff·P_k^d(axisᵀx)``."""

    k: int
    axis: FloatArray
    coeff: float


class ComponentNorms(NamedTuple):
    """Norms of one degree component; ``exact`` is False for sampled ``l1``."""

    l2: float
    l1: float
    linf: float
    exact: bool


def _unit_rows(axes: npt.ArrayLike, d: int) -> FloatArray:
    arr = np.atleast_2d(np.asarray(axes, dtype=float))
    if arr.shape[1] != d:
        raise ShapeError(f"axes must have {d} columns, got shape {arr.shape}")
    norms = np.linalg.norm(arr, axis=1)
    if np.any(np.abs(norms - 1.0) > _UNIT_TOL):
        raise DomainError("axes must be unit vectors")
    return arr


def _sphere_points(d: int, n: int, seed: int) -> FloatArray:
    return Sampler.of("uniform_sphere", d, seed=seed).sample(n)


class ZonalSeries:
    """``f = Σ_i c_i P_{k_i}^d(w_iᵀx)`` on ``S^{d−1}``.

    Args:
        d: Ambient dimension.
        terms: ``(k, axis, coeff)`` triples.
        measure: Optional representing measure ``f = ∫|wᵀx| dπ(w)``.
        sup_bounds: Certified ``‖f_k‖_∞`` bounds known from construction.
    """

    __slots__ = ("_d", "_terms", "_measure", "_sup_bounds")

    def __init__(
        self,
        d: int,
        terms: Iterable[ZonalTerm | tuple[int, npt.ArrayLike, float]],
        *,
        measure: RidgeMeasure | None = None,
        sup_bounds: Mapping[int, float] | None = None,
    ) -> None:
        if d < 2:
            raise DomainError(f"d must be >= 2, got {d}")
        parsed: list[ZonalTerm] = []
        for k, axis, coeff in terms:
            if k < 0:
                raise DomainError(f"degree must be >= 0, got {k}")
            parsed.append(ZonalTerm(int(k), _unit_rows(axis, d)[0], float(coeff)))
        if measure is not None and measure.d != d:
            raise ShapeError(f"measure lives in dimension {measure.d}, series in {d}")
        self._d = d
        self._terms = tuple(parsed)
        self._measure = measure
        self._sup_bounds = dict(sup_bounds or {})

    @classmethod
    def zonal(
        cls, d: int, k: int, axis: npt.ArrayLike | None = None, coeff: float = 1.0
    ) -> ZonalSeries:
        """Single term ``coeff·P_k^d(axisᵀx)``, axis ``e₁`` by default."""
        w = np.eye(d)[0] if axis is None else np.asarray(axis, dtype=float)
        return cls(d, [(k, w, coeff)])

    @property
    def d(self) -> int:
        return self._d

    @property
    def terms(self) -> tuple[ZonalTerm, ...]:
        return self._terms

    @property
    def measure(self) -> RidgeMeasure | None:
        return self._measure

    @property
    def degrees(self) -> list[int]:
        return sorted({t.k for t in self._terms})

    def component(self, k: int) -> ZonalSeries:
        bound = {k: self._sup_bounds[k]} if k in self._sup_bounds else None
        return ZonalSeries(self._d, [t for t in self._terms if t.k == k], sup_bounds=bound)

    def single_axis(self, k: int | None = None) -> tuple[FloatArray, dict[int, float]] | None:
        """Common axis and per-degree coefficients, if the terms share one axis."""
        terms = [t for t in self._terms if k is None or t.k == k]
        if not terms:
            return None
        w0 = terms[0].axis
        coeffs: dict[int, float] = {}
        for t in terms:
            if np.allclose(t.axis, w0, atol=_UNIT_TOL):
                c = t.coeff
            elif np.allclose(t.axis, -w0, atol=_UNIT_TOL):
                c = t.coeff * (-1.0) ** t.k
            else:
                return None
            coeffs[t.k] = coeffs.get(t.k, 0.0) + c
        return w0, coeffs

    def profile(self, coeffs: Mapping[int, float], t: npt.ArrayLike) -> Any:
        return sum(c * np.asarray(gegenbauer(self._d, k, t)) for k, c in coeffs.items())

    def __call__(self, x: npt.ArrayLike) -> FloatArray:
        arr = np.atleast_2d(np.asarray(x, dtype=float))
        if arr.shape[1] != self._d:
            raise ShapeError(f"expected points of dimension {self._d}, got {arr.shape}")
        out = np.zeros(arr.shape[0])
        for t in self._terms:
            out += t.coeff * gegenbauer(self._d, t.k, np.clip(arr @ t.axis, -1.0, 1.0))
        return out

    def energy(self, k: int) -> float:
        """``‖f_k‖₂²`` from the reproducing identity
        ``⟨P_k(vᵀ·), P_k(wᵀ·)⟩ = P_k(vᵀw)/N_k^d``, exact."""
        terms = [t for t in self._terms if t.k == k]
        if not terms:
            return 0.0
        axes = np.vstack([t.axis for t in terms])
        c = np.array([t.coeff for t in terms])
        gram = np.round(np.clip(axes @ axes.T, -1.0, 1.0), _GRAM_DECIMALS)
        values, inverse = np.unique(gram, return_inverse=True)
        weights = np.bincount(
            inverse.ravel(), weights=np.outer(c, c).ravel(), minlength=values.size
        )
        total = float(np.dot(weights, gegenbauer(self._d, k, values)))
        return max(total, 0.0) / float(harmonic_dim(self._d, k))

    @property
    def l2_norm(self) -> float:
        return math.sqrt(sum(self.energy(k) for k in self.degrees))

    def norms(self, k: int, *, samples: int = 20_000, seed: int = 0) -> ComponentNorms:
        """``(‖f_k‖₂, ‖f_k‖₁, ‖f_k‖_∞)``.

        ``linf`` is always an upper bound: a certified construction bound,
        the exact value for a single axis, or ``Σ|c_i|``.  ``l1`` is exact for
        a single axis and a Monte-Carlo estimate otherwise.
        """
        l2 = math.sqrt(self.energy(k))
        shared = self.single_axis(k)
        if shared is not None:
            c = abs(shared[1].get(k, 0.0))
            linf = min(self._sup_bounds.get(k, math.inf), c)
            return ComponentNorms(l2, c * _zonal_l1(self._d, k), linf, True)
        part = self.component(k)
        l1 = float(np.abs(part(_sphere_points(self._d, samples, seed))).mean())
        linf = min(
            self._sup_bounds.get(k, math.inf),
            sum(abs(t.coeff) for t in self._terms if t.k == k),
        )
        return ComponentNorms(l2, l1, linf, False)

    def __repr__(self) -> str:
        return f"ZonalSeries(d={self._d}, terms={len(self._terms)}, degrees={self.degrees})"


class RidgeMeasure:
    """Atomic representing measure: ``f(x) = Σ_i π_i |w_iᵀx|``."""

    __slots__ = ("_axes", "_weights")

    def __init__(self, axes: npt.ArrayLike, weights: npt.ArrayLike) -> None:
        w = np.atleast_1d(np.asarray(weights, dtype=float))
        a = np.atleast_2d(np.asarray(axes, dtype=float))
        if a.shape[0] != w.shape[0]:
            raise ShapeError(f"{a.shape[0]} axes for {w.shape[0]} weights")
        self._axes = _unit_rows(a, a.shape[1])
        self._weights = w

    @classmethod
    def from_net(cls, net: LayeredNet) -> RidgeMeasure:
        """Measure of a bias-free one-hidden-layer abs network."""
        if len(net.layers) != 1 or any(a.kind != "abs" for a in net.layers[0].activations()):
            raise CapabilityError("expected a one-hidden-layer abs network")
        [(A, b)] = net.matrices
        if np.any(b != 0.0):
            raise CapabilityError("biased abs units have no measure on the sphere")
        norms = np.linalg.norm(A, axis=1)
        keep = norms > 0.0
        scales = np.array([a.scale for a in net.layers[0].activations()])
        weights = (net.output_weights.real * norms * scales)[keep]
        return cls(A[keep] / norms[keep, None], weights)

    @property
    def d(self) -> int:
        return int(self._axes.shape[1])

    @property
    def axes(self) -> FloatArray:
        return self._axes

    @property
    def weights(self) -> FloatArray:
        return self._weights

    @property
    def mass(self) -> float:
        """``‖π‖₁``, an upper bound on γ₁ of the represented function."""
        return float(np.abs(self._weights).sum())

    def __call__(self, x: npt.ArrayLike) -> FloatArray:
        arr = np.atleast_2d(np.asarray(x, dtype=float))
        return np.asarray(np.abs(arr @ self._axes.T) @ self._weights, dtype=float)


def gamma1_upper(target: ZonalSeries | RidgeMeasure) -> float:
    """Upper bound on γ₁ through ``Σ_{even k} ‖f_k‖₁/|σ_k|``.

    A known representing measure short-circuits to its mass (for
    ``|wᵀx|`` that is exactly 1).  The linear part ``k = 1`` is not
    counted.

    Raises:
        DomainError: For odd-degree terms beyond the linear part.
    """
    if isinstance(target, RidgeMeasure):
        return target.mass
    if target.measure is not None:
        return target.measure.mass
    total = 0.0
    for k in target.degrees:
        if k == 1:
            logger.debug("gamma1_upper: linear part left out")
            continue
        if k % 2:
            raise DomainError(f"odd degree {k} has no γ₁ representation")
        total += target.norms(k).l1 / abs(blaschke_levy_sigma(target.d, k))
    return total


def _lq_norm(values: FloatArray, weights: FloatArray | None, q: float) -> float:
    mags = np.abs(values)
    if math.isinf(q):
        return float(mags.max(initial=0.0))
    if weights is None:
        return float(np.mean(mags**q) ** (1.0 / q))
    return float(np.dot(weights, mags**q) ** (1.0 / q))


def ell_ratio(
    f: ZonalSeries | Callable[[FloatArray], Any],
    q: float,
    p: float,
    *,
    d: int | None = None,
    samples: int = 100_000,
    seed: int = 0,
) -> float:
    """``ℓ_{q,p}(f) = ‖f‖_q/‖f‖_p`` under the uniform sphere measure.

    Series sharing one axis are integrated through their 1-D profile under
    ``μ_d``; anything else is sampled on the sphere.

    Raises:
        DegenerateInputError: If ``‖f‖_p`` is zero.
    """
    if q < 1.0 or p < 1.0:
        raise DomainError(f"need q, p >= 1, got q={q}, p={p}")
    shared = f.single_axis() if isinstance(f, ZonalSeries) else None
    if isinstance(f, ZonalSeries) and shared is not None:
        _, coeffs = shared
        top = max(coeffs)
        rule = mu_quadrature(f.d, max(128, top + 1))
        values = np.asarray(f.profile(coeffs, rule.nodes), dtype=float)
        grid = np.linspace(-1.0, 1.0, 20_001)
        dense = np.asarray(f.profile(coeffs, grid), dtype=float)

        def norm(r: float) -> float:
            return _lq_norm(dense, None, r) if math.isinf(r) else _lq_norm(values, rule.weights, r)

        num, den = norm(q), norm(p)
    else:
        dim = f.d if isinstance(f, ZonalSeries) else d
        if dim is None:
            raise ShapeError("pass d for a plain callable")
        values = np.asarray(f(_sphere_points(dim, samples, seed)), dtype=float)
        num, den = _lq_norm(values, None, q), _lq_norm(values, None, p)
    if den == 0.0:
        raise DegenerateInputError("‖f‖_p vanishes")
    return num / den


# ---------------------------------------------------------------------------
# Sign frames and spread polynomials
# ---------------------------------------------------------------------------


def spread_frame(d: int) -> FloatArray:
    """``{ε ∈ {±1/√d}^d : ε₁ > 0}``: ``2^{d−1}`` vectors with coherence ``1 − 2/d``.

    Raises:
        CapabilityError: For ``d > 20``.
    """
    if d < 2:
        raise DomainError(f"d must be >= 2, got {d}")
    if d > MAX_FRAME_DIMENSION:
        raise CapabilityError(f"2^{d - 1} frame vectors is too many (d <= {MAX_FRAME_DIMENSION})")
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=d - 1)), dtype=float)
    frame = np.hstack([np.ones((signs.shape[0], 1)), signs.reshape(signs.shape[0], d - 1)])
    return frame / math.sqrt(d)


def frame_coherence(frame: npt.ArrayLike) -> float:
    """Largest ``|w_iᵀw_j|`` over ``i ≠ j``."""
    arr = np.atleast_2d(np.asarray(frame, dtype=float))
    if arr.shape[0] < 2:
        return 0.0
    gram = np.abs(arr @ arr.T)
    np.fill_diagonal(gram, -np.inf)
    return float(gram.max())


def export_frame(frame: npt.ArrayLike) -> str:
    """JSON document of a frame with its coherence."""
    arr = np.atleast_2d(np.asarray(frame, dtype=float))
    doc = {
        "d": int(arr.shape[1]),
        "count": int(arr.shape[0]),
        "coherence": frame_coherence(arr),
        "vectors": arr.tolist(),
    }
    return json.dumps(doc, sort_keys=True)


class SparseSpread(NamedTuple):
    series: ZonalSeries
    beta: float
    energy: float
    sampled_sup: float
    sup_bound: float


def _check_high_degree(d: int, k: int) -> None:
    if k < 16 * d * d:
        raise PreconditionError(f"need k >= 16d² = {16 * d * d}, got k={k}")


def sparse_spread(d: int, k: int, *, samples: int = 1000, seed: int = 0) -> SparseSpread:
    """``P̂ = β_d Σ_i √N_k P_k(w_iᵀ·)`` over :func:`spread_frame`.

    ``β_d = 2(2^d + 2)^{−1/2}``; ``‖P̂‖₂²`` comes from the Gram identity and
    lies in ``[1, 3]``, and ``sup|P̂| <= 2·2^{−d/2}√N_k·‖P̂‖₂``, which is
    checked on the frame plus *samples* random points.

    Raises:
        PreconditionError: Unless k is even and ``k >= 16d²``.
        NumericError: If either check fails.
    """
    if k % 2:
        raise PreconditionError(f"k must be even, got {k}")
    _check_high_degree(d, k)
    frame = spread_frame(d)
    beta = 2.0 / math.sqrt(2.0**d + 2.0)
    n_k = float(harmonic_dim(d, k))
    coeff = beta * math.sqrt(n_k)
    series = ZonalSeries(d, [(k, w, coeff) for w in frame])
    energy = series.energy(k)
    if not 1.0 <= energy <= 3.0:
        raise NumericError(f"‖P̂‖₂² = {energy:.6g} outside [1, 3]", achieved=energy)
    bound = 2.0 * 2.0 ** (-d / 2.0) * math.sqrt(n_k) * math.sqrt(energy)
    probes = frame if samples <= 0 else np.vstack([frame, _sphere_points(d, samples, seed)])
    sampled = float(np.abs(series(probes)).max())
    if sampled > bound * (1.0 + 1e-9):
        raise NumericError(
            f"sampled sup {sampled:.6g} above the bound {bound:.6g}", achieved=sampled
        )
    logger.info(
        "sparse_spread d=%d k=%d: energy %.6g, sup %.4g <= %.4g", d, k, energy, sampled, bound
    )
    series = ZonalSeries(d, series.terms, sup_bounds={k: bound})
    return SparseSpread(series, beta, energy, sampled, bound)


def sign_invariant_spread_check(
    f_k: ZonalSeries,
    d: int,
    k: int,
    *,
    samples: int = 200,
    seed: int = 0,
    tol: float = 1e-9,
) -> bool:
    """Check ``‖f_k‖_∞ <= 2·2^{−d/2}√N_k·‖f_k‖₂`` for a sign-invariant ``f_k``.

    The sup is the larger of the maximum over sign vectors and a sampled
    maximum; a sampled value above the sign-vector maximum is logged, since
    the inequality is only guaranteed when the sup sits on a sign vector.

    Raises:
        PreconditionError: If ``k < 16d²`` or a sampled sign flip changes the value.
    """
    _check_high_degree(d, k)
    if f_k.d != d:
        raise ShapeError(f"series lives in dimension {f_k.d}, not {d}")
    rng = np.random.default_rng(seed)
    x = _sphere_points(d, samples, seed)
    flips = rng.choice((-1.0, 1.0), size=x.shape)
    base, flipped = f_k(x), f_k(flips * x)
    if np.any(np.abs(base - flipped) > tol * np.maximum(1.0, np.abs(base))):
        raise PreconditionError("f_k is not sign-invariant")
    on_signs = float(np.abs(f_k(spread_frame(d))).max())
    sampled = float(np.abs(base).max())
    if sampled > on_signs * (1.0 + 1e-9):
        logger.info("sampled sup %.6g exceeds the sign-vector maximum %.6g", sampled, on_signs)
    bound = 2.0 * 2.0 ** (-d / 2.0) * math.sqrt(float(harmonic_dim(d, k)) * f_k.energy(k))
    return max(on_signs, sampled) <= bound * (1.0 + tol)


def inapprox_certificate(
    series: ZonalSeries,
    degrees: Iterable[int],
    M: float,
    candidate: tuple[int, float],
) -> float:
    """Lower bound on the squared L² error of any one-hidden-layer net.

    ``‖𝒫_I f‖₂² − 4·d^M·(Σ_{k∈I} c_{d,k}²)^{1/2}·m_∞²·N`` clipped at 0, with
    ``c_{d,k} = ‖f_k‖_∞/(√N_k‖f‖₂)`` and candidate size ``(N, m_∞)``.

    Raises:
        DomainError: If the degree set is empty.
    """
    chosen = sorted(set(degrees))
    if not chosen:
        raise DomainError("the degree set must not be empty")
    N, m_inf = candidate
    if N < 0 or m_inf < 0.0:
        raise DomainError(f"need N >= 0 and m_inf >= 0, got {candidate}")
    total = series.l2_norm
    if total == 0.0:
        raise DegenerateInputError("the series vanishes")
    d = series.d
    projected = sum(series.energy(k) for k in chosen)
    spread = math.sqrt(
        sum(
            (series.norms(k).linf / (math.sqrt(float(harmonic_dim(d, k))) * total)) ** 2
            for k in chosen
        )
    )
    return max(projected - 4.0 * d**M * spread * m_inf**2 * N, 0.0)


def atom_sample_approx(
    target: ZonalSeries | RidgeMeasure,
    N: int,
    *,
    seed: int = 0,
    scheme: Literal["iid", "systematic"] = "iid",
) -> LayeredNet:
    """One-hidden-layer abs network from N atoms drawn ∝ ``|π|``.

    Each atom keeps the sign of its weight and gets magnitude ``‖π‖₁/N``, so
    γ₁ of the result never exceeds ``‖π‖₁``.  ``systematic`` draws one
    stratified uniform and reproduces equal-weight frames exactly when N is
    their size; ``iid`` gives the ``N^{−1/2}`` L² rate.

    Raises:
        CapabilityError: If no representing measure is known.
    """
    measure = target if isinstance(target, RidgeMeasure) else target.measure
    if measure is None:
        raise CapabilityError("atom sampling needs a known representing measure")
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    mass = measure.mass
    if mass == 0.0:
        raise DegenerateInputError("the representing measure has zero mass")
    probs = np.abs(measure.weights) / mass
    rng = np.random.default_rng(seed)
    if scheme == "iid":
        idx = rng.choice(probs.size, size=N, p=probs)
    else:
        u = (rng.random() + np.arange(N)) / N
        idx = np.minimum(np.searchsorted(np.cumsum(probs), u, side="right"), probs.size - 1)
    out = np.sign(measure.weights[idx]) * mass / N
    return LayeredNet(
        d=measure.d,
        layers=[Layer(A=measure.axes[idx].tolist(), b=[0.0] * N, act=Activation.absolute())],
        out_re=out.tolist(),
    )


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------


class CoefficientRow(NamedTuple):
    """``(k, N_k^d, σ_k, λ_k(|t|))``; σ_k is NaN for odd k."""

    k: int
    N: int
    sigma: float
    lam: float


def coefficient_table(d: int, k_max: int) -> list[CoefficientRow]:
    rows = []
    for k in range(k_max + 1):
        sigma = blaschke_levy_sigma(d, k) if k % 2 == 0 else math.nan
        lam = funk_hecke(np.abs, d, k) if k % 2 == 0 else 0.0
        rows.append(CoefficientRow(k, harmonic_dim(d, k), sigma, lam))
    return rows


def sigma_inverse_constant(dims: Iterable[int], degrees: Iterable[int]) -> float:
    """Smallest C with ``|σ_k|⁻¹ <= C·d^{3/4}k²√N_k^d`` over the grid (even ``k >= 2``)."""
    best = 0.0
    ks = [k for k in degrees if k >= 2 and k % 2 == 0]
    for d in dims:
        for k in ks:
            scale = d**0.75 * k * k * math.exp(0.5 * sphere_dimension_log(d, k))
            best = max(best, 1.0 / (abs(blaschke_levy_sigma(d, k)) * scale))
    return best
