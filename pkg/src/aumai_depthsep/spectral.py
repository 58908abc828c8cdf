"""Fourier-domain lower bounds for the windowed oscillatory target.

The target ``f(x) = exp(2πi·r·(vᵀx + wᵀx₊))`` is measured in ``L²(φ²)``
where ``φ(x) = Π ψ(x_j)`` and the window ψ has a Fourier transform
supported in ``[−K, K]``.  On the orthant selected by ``S ⊆ [d]`` the target
is a plane wave of frequency ``ξ_S = r(v + w_S)``, so the windowed transform
is a sum of ``2^d`` separable terms.  Every such sum here factorises
coordinate-wise; the explicit subset enumeration is kept as an oracle.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math
from collections.abc import Callable, Iterable, Sequence
from typing import Any, Literal, NamedTuple

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.integrate import quad
from scipy.special import roots_legendre

from aumai_depthsep.errors import (
    CapabilityError,
    DomainError,
    NormalizationError,
    NumericError,
    ShapeError,
)
from aumai_depthsep.models import LowerBoundCertificate

__all__ = [
    "Window",
    "OscillatoryTarget",
    "Admissibility",
    "QuadratureResult",
    "admissibility",
    "coord_factor",
    "coord_factor_direct",
    "coord_factor_bound",
    "envelope_D",
    "envelope_cap",
    "numeric_F",
    "count_large",
    "hamming_count",
    "tube_volume_bound",
    "tube_volume_mc",
    "kappa_constants",
    "kappa_certificate",
    "kappa_sweep",
    "heavy_tail_target",
    "heavy_tail_bound",
    "heavy_tail_threshold",
]

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
Profile = Callable[[Any], Any]

SUBSET_ENVELOPE_MAX_D = 12
SUBSET_NUMERIC_MAX_D = 6
DEFAULT_TOL = 1e-9

_NORM_HALF_WIDTH = 4096
_GL_NODES = 24
_DIRECT_X_MAX = 256.0
_FILON_STEP = 1.0 / 32.0


# ---------------------------------------------------------------------------
# Windows
# ---------------------------------------------------------------------------


def _sinc2_profile(x: Any, a: float) -> Any:
    return math.sqrt(1.5 * a) * np.sinc(a * np.asarray(x, dtype=float)) ** 2


def _sinc2_hat(s: Any, a: float) -> Any:
    return math.sqrt(1.5 * a) / a * np.maximum(0.0, 1.0 - np.abs(np.asarray(s, dtype=float)) / a)


def _sinc_profile(x: Any) -> Any:
    return np.sinc(np.asarray(x, dtype=float))


def _sinc_hat(s: Any) -> Any:
    return np.where(np.abs(np.asarray(s, dtype=float)) <= 0.5, 1.0, 0.0)


@functools.lru_cache(maxsize=1)
def _gl_panel_rule() -> tuple[FloatArray, FloatArray]:
    nodes, weights = roots_legendre(_GL_NODES)
    return 0.5 * (nodes + 1.0), 0.5 * weights


def _panel_integrals(g: Profile, half_width: int) -> tuple[FloatArray, FloatArray]:
    """Integrals of *g* over ``[k, k+1]`` and ``[−k−1, −k]`` for ``k < half_width``."""
    nodes, weights = _gl_panel_rule()
    starts = np.arange(half_width, dtype=float)[:, None]
    right = np.asarray(g(starts + nodes), dtype=float) @ weights
    left = np.asarray(g(-(starts + nodes)), dtype=float) @ weights
    return right, left


def _decay_constant(psi: Profile) -> float:
    """Smallest α with ``|ψ(x)|² ≤ α/(2x²)`` on a fine grid of ``(0, 64]``."""
    x = np.linspace(1e-4, 64.0, 1 << 17)
    values = np.asarray(psi(x), dtype=float)
    return float(np.max(2.0 * x * x * values * values)) * (1.0 + 1e-6)


def _l1_norm(psi: Profile) -> tuple[float, str]:
    """``‖ψ‖₁`` by panel quadrature with dyadic-block extrapolation.

    Returns ``(inf, reason)`` when the dyadic blocks stop shrinking, the
    signature of a ``1/|x|`` tail.
    """
    right, left = _panel_integrals(lambda x: np.abs(psi(x)), _NORM_HALF_WIDTH)
    per_unit = right + left
    blocks = [per_unit[0]] + [
        float(per_unit[2**k : 2 ** (k + 1)].sum())
        for k in range(int(math.log2(_NORM_HALF_WIDTH)))
    ]
    ratios = [b / a for a, b in zip(blocks[-4:], blocks[-3:], strict=False) if a > 0]
    if ratios and min(ratios) > 0.7:
        return math.inf, "ψ is not in L¹ (dyadic tail blocks do not decay)"
    ratio = ratios[-1] if ratios else 0.0
    tail = blocks[-1] * ratio / (1.0 - ratio) if 0.0 < ratio < 1.0 else 0.0
    return float(per_unit.sum()) + tail, ""


def _l2_norm(psi: Profile) -> float:
    right, left = _panel_integrals(lambda x: np.asarray(psi(x), dtype=float) ** 2, _NORM_HALF_WIDTH)
    return math.sqrt(float(right.sum() + left.sum()))


class Window(BaseModel):
    """A unit-L² window ψ whose Fourier transform lives in ``[−K, K]``.

    ``psi_hat`` (optional) is ``ψ̂(s) = ∫ e^{−2πisx} ψ(x) dx``; when present ψ
    is taken to be real and even and :func:`coord_factor` uses it directly.
    ``decay_alpha`` is the smallest α with ``|ψ(x)|² ≤ α|x|⁻²/2``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid", arbitrary_types_allowed=True)

    tag: Literal["sinc2", "sinc", "custom"]
    psi: Profile = Field(exclude=True, repr=False)
    psi_hat: Profile | None = Field(default=None, exclude=True, repr=False)
    K: float = Field(gt=0.0)
    l1_norm: float = Field(gt=0.0)
    l2_norm: float = Field(default=1.0, gt=0.0)
    decay_alpha: float = Field(default=0.0, ge=0.0)
    hat_breakpoints: tuple[float, ...] = (0.0,)
    reason: str = ""

    @model_validator(mode="after")
    def check_unit_norm(self) -> Window:
        if abs(self.l2_norm - 1.0) > 1e-8:
            raise ValueError(f"window must have unit L² norm, got {self.l2_norm:.12g}")
        return self

    @classmethod
    def sinc2(cls, bandwidth: float = 1.0) -> Window:
        """``ψ(x) = √(3a/2)·sinc²(πax)``: ``K = a``, ``‖ψ‖₁ = √(3/(2a))``."""
        if bandwidth <= 0.0:
            raise DomainError(f"bandwidth must be positive, got {bandwidth}")
        psi = functools.partial(_sinc2_profile, a=bandwidth)
        return cls(
            tag="sinc2",
            psi=psi,
            psi_hat=functools.partial(_sinc2_hat, a=bandwidth),
            K=bandwidth,
            l1_norm=math.sqrt(1.5 / bandwidth),
            decay_alpha=_decay_constant(psi),
            hat_breakpoints=(0.0,),
        )

    @classmethod
    def sinc(cls) -> Window:
        """``ψ(x) = sinc(πx)``: band-limited (K = 1/2) but not integrable."""
        return cls(
            tag="sinc",
            psi=_sinc_profile,
            psi_hat=_sinc_hat,
            K=0.5,
            l1_norm=math.inf,
            decay_alpha=_decay_constant(_sinc_profile),
            hat_breakpoints=(),
            reason="ψ is not in L¹",
        )

    @classmethod
    def custom(
        cls,
        psi: Profile,
        K: float,
        *,
        psi_hat: Profile | None = None,
        l1_norm: float | None = None,
        hat_breakpoints: Sequence[float] = (0.0,),
    ) -> Window:
        """Window from a profile; norms not declared are computed by quadrature.

        Raises:
            NormalizationError: If ``‖ψ‖₂`` differs from 1 by more than 1e-8.
        """
        l2 = _l2_norm(psi)
        if abs(l2 - 1.0) > 1e-8:
            raise NormalizationError(
                f"rescale ψ by {1.0 / l2:.12g}: ‖ψ‖₂ = {l2:.12g}, need 1"
            )
        reason = ""
        if l1_norm is None:
            l1_norm, reason = _l1_norm(psi)
        return cls(
            tag="custom",
            psi=psi,
            psi_hat=psi_hat,
            K=K,
            l1_norm=l1_norm,
            l2_norm=1.0,
            decay_alpha=_decay_constant(psi),
            hat_breakpoints=tuple(hat_breakpoints),
            reason=reason,
        )

    @property
    def integrable(self) -> bool:
        return math.isfinite(self.l1_norm)


class Admissibility(NamedTuple):
    admissible: bool
    margin: float
    reason: str


def admissibility(window: Window) -> Admissibility:
    """``‖ψ‖₁ < √(2/K)``, with ``margin = √(2/K) − ‖ψ‖₁``."""
    margin = math.sqrt(2.0 / window.K) - window.l1_norm
    if not window.integrable:
        return Admissibility(False, -math.inf, window.reason or "ψ is not in L¹")
    if margin <= 0.0:
        return Admissibility(False, margin, "‖ψ‖₁ ≥ √(2/K)")
    return Admissibility(True, margin, "")


# ---------------------------------------------------------------------------
# Targets
# ---------------------------------------------------------------------------


class OscillatoryTarget(BaseModel):
    """``x -> exp(2πi·r·(vᵀx + wᵀx₊))`` with threshold parameter γ."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    r: float = Field(ge=0.0)
    v: list[float]
    w: list[float]
    gamma: float = Field(default=1.0, gt=0.0)

    @model_validator(mode="after")
    def check_lengths(self) -> OscillatoryTarget:
        if len(self.v) != len(self.w) or not self.v:
            raise ValueError(
                f"v and w must be non-empty and equal length ({len(self.v)}, {len(self.w)})"
            )
        return self

    @property
    def d(self) -> int:
        return len(self.v)

    @property
    def v_arr(self) -> FloatArray:
        return np.asarray(self.v, dtype=float)

    @property
    def w_arr(self) -> FloatArray:
        return np.asarray(self.w, dtype=float)

    @property
    def tau(self) -> float:
        """``max_S ‖v + w_S‖_∞ = max_j max(|v_j|, |v_j + w_j|)``."""
        v, w = self.v_arr, self.w_arr
        return float(np.max(np.maximum(np.abs(v), np.abs(v + w))))

    @property
    def omega(self) -> frozenset[int]:
        """Coordinates with ``r·|w_j| ≥ γ·d²``."""
        threshold = self.gamma * self.d**2
        return frozenset(int(j) for j in np.flatnonzero(self.r * np.abs(self.w_arr) >= threshold))

    @property
    def eta(self) -> float:
        return len(self.omega) / self.d

    @property
    def l1_gamma(self) -> float:
        """``‖v‖₁ + ‖w‖₁``."""
        return float(np.abs(self.v_arr).sum() + np.abs(self.w_arr).sum())

    def xi(self, subset: Iterable[int]) -> FloatArray:
        """Orthant frequency ``ξ_S = r·(v + w_S)``."""
        mask = _mask(subset, self.d)
        return self.r * (self.v_arr + np.where(mask, self.w_arr, 0.0))

    def __call__(self, x: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        arr = np.atleast_2d(np.asarray(x, dtype=float))
        if arr.shape[1] != self.d:
            raise ShapeError(f"expected input of dimension {self.d}, got {arr.shape}")
        phase = arr @ self.v_arr + np.maximum(arr, 0.0) @ self.w_arr
        return np.exp(2j * np.pi * self.r * phase)


def _mask(subset: Iterable[int], d: int) -> npt.NDArray[np.bool_]:
    mask = np.zeros(d, dtype=bool)
    for j in subset:
        if not 0 <= j < d:
            raise DomainError(f"subset index {j} outside [0, {d})")
        mask[j] = True
    return mask


def heavy_tail_target(d: int, gamma: float = 1.0) -> OscillatoryTarget:
    """``r = d², w = 1, v = 0``: the worked heavy-tailed example."""
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    return OscillatoryTarget(r=float(d * d), v=[0.0] * d, w=[1.0] * d, gamma=gamma)


def heavy_tail_bound(d: int, N: int) -> float:
    """``1 − 1300·N·d²·0.75^d`` (may be negative when vacuous)."""
    return 1.0 - 1300.0 * N * d * d * 0.75**d


def heavy_tail_threshold(d: int) -> float:
    """``1.3^d / (10⁴·d³)``: below this N the error stays ≥ 1/2."""
    return 1.3**d / (1e4 * d**3)


# ---------------------------------------------------------------------------
# Half-line Fourier factors
# ---------------------------------------------------------------------------


def coord_factor_bound(window: Window, t: float) -> float:
    """``(‖ψ‖₁/2)·min(1, 2K/(π(|t| − K)₊))``."""
    excess = abs(t) - window.K
    factor = 1.0 if excess <= 0.0 else min(1.0, 2.0 * window.K / (math.pi * excess))
    return 0.5 * window.l1_norm * factor


def _principal_value(window: Window, t: float, tol: float) -> float:
    """``PV ∫ ψ̂(s)/(s − t) ds`` over the support ``[−K, K]``."""
    assert window.psi_hat is not None
    hat = window.psi_hat
    K = window.K
    breaks = sorted({p for p in (*window.hat_breakpoints, t) if -K < p < K})
    if abs(t) < K:
        h_t = float(hat(t))

        def regular(s: float) -> float:
            return 0.0 if s == t else (float(hat(s)) - h_t) / (s - t)

        value, err = quad(regular, -K, K, points=breaks or None, epsabs=0.1 * tol, limit=400)
        value += h_t * math.log((K - t) / (K + t))
    else:
        value, err = quad(
            lambda s: float(hat(s)) / (s - t) if s != t else 0.0,
            -K,
            K,
            points=breaks or None,
            epsabs=0.1 * tol,
            limit=400,
        )
    if err > tol:
        raise NumericError("principal-value quadrature did not converge", achieved=err)
    return float(value)


def coord_factor(
    window: Window, positive_halfline: bool, t: float, *, tol: float = DEFAULT_TOL
) -> complex:
    """``F(t) = ∫ 1{εx > 0}·e^{2πitx}·ψ(x) dx`` with ``ε = ±1``.

    With a declared ``ψ̂`` (ψ real and even) the positive half-line factor is
    ``ψ̂(t)/2 − (i/2π)·PV∫ ψ̂(s)/(s − t) ds``, a finite-interval integral;
    the negative one is its conjugate.  Otherwise the direct x-space
    quadrature of :func:`coord_factor_direct` is used.

    Raises:
        NumericError: If the achieved tolerance exceeds *tol*.
    """
    if window.psi_hat is None:
        result = coord_factor_direct(window, positive_halfline, t)
        if result.tail_bound > tol:
            raise NumericError("truncated x-space quadrature", achieved=result.tail_bound)
        return result.value
    pv = _principal_value(window, t, tol)
    value = complex(0.5 * float(window.psi_hat(t)), -pv / (2.0 * math.pi))
    return value if positive_halfline else value.conjugate()


class QuadratureResult(NamedTuple):
    value: complex
    tail_bound: float


def _filon_weights(theta: float) -> tuple[float, float, float]:
    if abs(theta) < 0.1:
        t2 = theta * theta
        return (
            2.0 * theta * t2 / 45.0 - 2.0 * theta * t2 * t2 / 315.0,
            2.0 / 3.0 + 2.0 * t2 / 15.0 - 4.0 * t2 * t2 / 105.0,
            4.0 / 3.0 - 2.0 * t2 / 15.0 + t2 * t2 / 210.0,
        )
    s, c = math.sin(theta), math.cos(theta)
    inv3 = 1.0 / theta**3
    alpha = inv3 * (theta * theta + theta * s * c - 2.0 * s * s)
    beta = 2.0 * inv3 * (theta * (1.0 + c * c) - 2.0 * s * c)
    gamma = 4.0 * inv3 * (s - theta * c)
    return alpha, beta, gamma


def _filon(values: FloatArray, h: float, omega: float) -> complex:
    """Filon's rule for ``∫_0^{2nh} f(x)·e^{iωx} dx`` from samples on ``kh``."""
    x = h * np.arange(values.size)
    alpha, beta, gamma = _filon_weights(omega * h)
    cos_kx, sin_kx = np.cos(omega * x), np.sin(omega * x)
    ends = values[[0, -1]]

    def even_sum(trig: FloatArray) -> float:
        edge = 0.5 * (ends[0] * trig[0] + ends[1] * trig[-1])
        return float(np.dot(values[::2], trig[::2]) - edge)

    cos_part = h * (
        alpha * (values[-1] * sin_kx[-1] - values[0] * sin_kx[0])
        + beta * even_sum(cos_kx)
        + gamma * float(np.dot(values[1::2], cos_kx[1::2]))
    )
    sin_part = h * (
        alpha * (values[0] * cos_kx[0] - values[-1] * cos_kx[-1])
        + beta * even_sum(sin_kx)
        + gamma * float(np.dot(values[1::2], sin_kx[1::2]))
    )
    return complex(cos_part, sin_part)


def coord_factor_direct(
    window: Window,
    positive_halfline: bool,
    t: float,
    *,
    x_max: float = _DIRECT_X_MAX,
) -> QuadratureResult:
    """Half-line factor by x-space quadrature on ``[0, x_max]``.

    Filon panels for ``|t| > 2``, adaptive Gauss–Kronrod with unit
    breakpoints otherwise; the tail beyond ``x_max`` is bounded from the
    observed ``x²|ψ|`` envelope.
    """
    sign = 1.0 if positive_halfline else -1.0

    def profile(x: Any) -> Any:
        return np.asarray(window.psi(sign * np.asarray(x, dtype=float)), dtype=float)

    omega = 2.0 * math.pi * t * sign
    if abs(t) > 2.0:
        steps = 2 * math.ceil(x_max / (2.0 * _FILON_STEP))
        h = x_max / steps
        value = _filon(profile(h * np.arange(steps + 1)), h, omega)
    else:
        points = [float(k) for k in range(1, int(x_max))]
        kwargs: dict[str, Any] = {"points": points, "limit": 2 * len(points) + 50, "epsabs": 1e-11}
        re, _ = quad(lambda x: float(profile(x)) * math.cos(omega * x), 0.0, x_max, **kwargs)
        im, _ = quad(lambda x: float(profile(x)) * math.sin(omega * x), 0.0, x_max, **kwargs)
        value = complex(re, im)
    probe = np.linspace(0.5 * x_max, x_max, 4097)
    envelope = float(np.max(probe * probe * np.abs(profile(probe))))
    return QuadratureResult(value, envelope / x_max)


# ---------------------------------------------------------------------------
# Envelope and windowed transform
# ---------------------------------------------------------------------------


def _shift_pairs(target: OscillatoryTarget, xi: npt.ArrayLike) -> tuple[FloatArray, FloatArray]:
    """Per-coordinate shifts ``ξ_j − r v_j`` (j ∉ S) and ``ξ_j − r(v_j + w_j)`` (j ∈ S)."""
    arr = np.asarray(xi, dtype=float).reshape(-1)
    if arr.size != target.d:
        raise ShapeError(f"ξ has {arr.size} entries for d = {target.d}")
    outside = arr - target.r * target.v_arr
    inside = arr - target.r * (target.v_arr + target.w_arr)
    return outside, inside


def _envelope_factor(shift: FloatArray, K: float) -> FloatArray:
    excess = np.abs(shift) - K
    with np.errstate(divide="ignore"):
        ratio = np.where(excess > 0.0, 2.0 * K / (math.pi * np.maximum(excess, 1e-300)), np.inf)
    return np.minimum(1.0, ratio)


def envelope_D(
    target: OscillatoryTarget,
    window: Window,
    xi: npt.ArrayLike,
    *,
    method: Literal["product", "subsets"] = "product",
) -> float:
    """``D(ξ) = Σ_S Π_j min(1, 2K/(π(|ξ_j − ξ_{S,j}| − K)₊))``.

    The product form ``Π_j (m(out_j) + m(in_j))`` is exact; ``"subsets"``
    sums the ``2^d`` terms explicitly.

    Raises:
        CapabilityError: For ``method="subsets"`` above ``d = 12``.
    """
    outside, inside = _shift_pairs(target, xi)
    m_out = _envelope_factor(outside, window.K)
    m_in = _envelope_factor(inside, window.K)
    if method == "product":
        return float(np.prod(m_out + m_in))
    if target.d > SUBSET_ENVELOPE_MAX_D:
        raise CapabilityError(f"subset enumeration capped at d = {SUBSET_ENVELOPE_MAX_D}")
    total = 0.0
    for bits in itertools.product((False, True), repeat=target.d):
        mask = np.asarray(bits)
        total += float(np.prod(np.where(mask, m_in, m_out)))
    return total


def envelope_cap(target: OscillatoryTarget, window: Window, xi: npt.ArrayLike) -> float:
    """``C_{K,γ}·2^{d(1−η)}·min(1, 2K/(π(‖ξ‖_∞ − rτ − K)₊))``."""
    arr = np.asarray(xi, dtype=float).reshape(-1)
    c_const, _ = kappa_constants(window.K, target.gamma)
    excess = float(np.max(np.abs(arr), initial=0.0)) - target.r * target.tau - window.K
    tail = 1.0 if excess <= 0.0 else min(1.0, 2.0 * window.K / (math.pi * excess))
    return c_const * 2.0 ** (target.d * (1.0 - target.eta)) * tail


def numeric_F(
    target: OscillatoryTarget,
    window: Window,
    xi: npt.ArrayLike,
    *,
    method: Literal["product", "subsets"] = "product",
    tol: float = DEFAULT_TOL,
) -> complex:
    """Windowed transform ``Σ_S Π_j F_{ε_j}(ξ_j − ξ_{S,j})`` of the target.

    Each distinct ``(shift, half-line)`` factor is computed once.

    Raises:
        CapabilityError: For ``method="subsets"`` above ``d = 6``.
    """
    outside, inside = _shift_pairs(target, xi)
    if method == "subsets" and target.d > SUBSET_NUMERIC_MAX_D:
        raise CapabilityError(f"subset enumeration capped at d = {SUBSET_NUMERIC_MAX_D}")
    cache: dict[tuple[float, bool], complex] = {}

    def factor(shift: float, positive: bool) -> complex:
        key = (float(shift), positive)
        if key not in cache:
            cache[key] = coord_factor(window, positive, shift, tol=tol)
        return cache[key]

    f_out = [factor(s, False) for s in outside]
    f_in = [factor(s, True) for s in inside]
    if method == "product":
        return complex(np.prod([a + b for a, b in zip(f_out, f_in, strict=True)]))
    total = 0j
    for bits in itertools.product((False, True), repeat=target.d):
        term = 1 + 0j
        for j, positive in enumerate(bits):
            term *= f_in[j] if positive else f_out[j]
        total += term
    return total


# ---------------------------------------------------------------------------
# Combinatorics and geometry
# ---------------------------------------------------------------------------


def count_large(vec: npt.ArrayLike, threshold: float) -> int:
    """Number of coordinates with ``|vec_j| ≥ threshold``."""
    return int(np.count_nonzero(np.abs(np.asarray(vec, dtype=float)) >= threshold))


def hamming_count(target: OscillatoryTarget, S: Iterable[int], S_prime: Iterable[int]) -> int:
    """``n(ξ_S − ξ_{S'}, γd²)`` as the Hamming distance of ``S ∩ Ω`` and ``S' ∩ Ω``."""
    omega = target.omega
    first = set(S) & omega
    second = set(S_prime) & omega
    return len(first ^ second)


def tube_volume_bound(K: float, R: float, d: int) -> float:
    """``8e²(d − 1)(K + R)(2K)^{d−1}``: ℓ∞-tube of radius K cut at ``‖ξ‖_∞ ≤ R``."""
    if K <= 0.0 or R <= 0.0:
        raise DomainError(f"K and R must be positive, got K={K}, R={R}")
    if d < 2:
        raise DomainError(f"tube bound needs d >= 2, got {d}")
    return 8.0 * math.e**2 * (d - 1) * (K + R) * (2.0 * K) ** (d - 1)


def _line_distance_inf(points: FloatArray, nu: FloatArray) -> FloatArray:
    """``min_α ‖ξ − α ν‖_∞`` per row, via the breakpoints of the convex objective."""
    d = nu.size
    candidates = []
    for j in range(d):
        if nu[j] != 0.0:
            candidates.append(points[:, j] / nu[j])
    for j, k in itertools.combinations(range(d), 2):
        for sign in (1.0, -1.0):
            denom = nu[j] - sign * nu[k]
            if denom != 0.0:
                candidates.append((points[:, j] - sign * points[:, k]) / denom)
    if not candidates:
        return np.max(np.abs(points), axis=1)
    alphas = np.stack(candidates, axis=1)
    dist = np.max(np.abs(points[:, None, :] - alphas[:, :, None] * nu[None, None, :]), axis=2)
    return np.min(dist, axis=1)


class TubeVolume(NamedTuple):
    volume: float
    std_error: float


def tube_volume_mc(
    K: float, R: float, nu: npt.ArrayLike, n: int, *, seed: int = 0
) -> TubeVolume:
    """Monte-Carlo volume of ``{‖ξ‖_∞ ≤ R : dist_∞(ξ, ℝν) ≤ K}``."""
    direction = np.asarray(nu, dtype=float).reshape(-1)
    if not direction.any():
        raise DomainError("tube axis must be non-zero")
    d = direction.size
    rng = np.random.default_rng(seed)
    hits = 0
    for start in range(0, n, 65536):
        batch = rng.uniform(-R, R, size=(min(65536, n - start), d))
        hits += int(np.count_nonzero(_line_distance_inf(batch, direction) <= K))
    cube = (2.0 * R) ** d
    p = hits / n
    return TubeVolume(cube * p, cube * math.sqrt(p * (1.0 - p) / n))


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------


def kappa_constants(K: float, gamma: float) -> tuple[float, float]:
    """``(C_{K,γ}, D_{K,γ})`` with ``C = 2exp(√(8K/(πγ)))`` and
    ``D = 32·exp(2 + √(8K/(πγ)))·(π⁻² + K⁻¹)``."""
    root = math.sqrt(8.0 * K / (math.pi * gamma))
    return 2.0 * math.exp(root), 32.0 * math.exp(2.0 + root) * (math.pi**-2 + 1.0 / K)


def _is_worked_example(window: Window, target: OscillatoryTarget) -> bool:
    """The default sinc² window against ``r = d², v = 0, w = 1, γ = 1``."""
    return (
        window.tag == "sinc2"
        and window.K == 1.0
        and target.gamma == 1.0
        and target.r == float(target.d**2)
        and not target.v_arr.any()
        and bool(np.all(target.w_arr == 1.0))
    )


def kappa_certificate(
    window: Window, target: OscillatoryTarget, d: int, N: int
) -> LowerBoundCertificate:
    """Lower bound ``max(0, 1 − N·κ²)`` on the best N-unit shallow L²(φ²) error.

    ``κ² ≤ D_{K,γ}·d·τ·r·α^d`` with ``α = ‖ψ‖₁²·2^{1−2η}·K``.  For the default
    sinc² window against :func:`heavy_tail_target` the worked constants take
    over, ``κ² = 1300·d²·0.75^d``, and the general value is kept in
    ``constants["kappa_sq_general"]``.  The certificate is marked
    ``"vacuous regime"`` when α ≥ 1, the window is inadmissible, ``d < 3``,
    ``r·τ < max(1, 10K)`` or ``d ≤ 2√(K/γ)``.
    """
    if d != target.d:
        raise ShapeError(f"target has dimension {target.d}, certificate asked for {d}")
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    adm = admissibility(window)
    if not adm.admissible:
        return LowerBoundCertificate(
            d=d, N=N, kappa_sq=math.inf, alpha=math.inf, lower_bound=0.0,
            regime="vacuous regime", notes=[f"window inadmissible: {adm.reason}"],
        )
    K, gamma = window.K, target.gamma
    eta = target.eta
    alpha = window.l1_norm**2 * 2.0 ** (1.0 - 2.0 * eta) * K
    c_const, d_const = kappa_constants(K, gamma)
    rtau = target.r * target.tau
    log_kappa = math.log(d_const * d * max(rtau, 1e-300)) + d * math.log(alpha)
    general = math.exp(min(log_kappa, 700.0))
    constants = {
        "C_K_gamma": c_const,
        "D_K_gamma": d_const,
        "eta": eta,
        "tau": target.tau,
        "r": target.r,
        "K": K,
        "gamma": gamma,
        "psi_l1": window.l1_norm,
    }
    violations: list[str] = []
    if alpha >= 1.0:
        violations.append(f"alpha = {alpha:.6g} >= 1")
    if d < 3:
        violations.append("d < 3")
    if rtau < max(1.0, 10.0 * K):
        violations.append(f"r·tau = {rtau:.6g} below max(1, 10K)")
    if d <= 2.0 * math.sqrt(K / gamma):
        violations.append("d <= 2·sqrt(K/gamma)")
    notes = list(violations)
    kappa_sq = general
    if _is_worked_example(window, target):
        kappa_sq = 1300.0 * d * d * 0.75**d
        threshold = heavy_tail_threshold(d)
        constants["kappa_sq_general"] = general
        constants["threshold_N"] = threshold
        notes.append(f"worked constants 1 − 1300·N·d²·0.75^d; N threshold {threshold:.6g}")
    bound = max(0.0, 1.0 - N * kappa_sq) if N else 1.0
    regime: Literal["ok", "vacuous regime"] = "vacuous regime" if violations else "ok"
    if violations:
        logger.info("kappa certificate d=%d N=%d is vacuous: %s", d, N, "; ".join(violations))
    return LowerBoundCertificate(
        d=d,
        N=N,
        kappa_sq=kappa_sq,
        alpha=alpha,
        lower_bound=min(bound, 1.0),
        regime=regime,
        constants=constants,
        notes=notes,
    )


def kappa_sweep(
    window: Window,
    dims: Iterable[int],
    Ns: Iterable[int],
    target_for: Callable[[int], OscillatoryTarget] = heavy_tail_target,
) -> list[tuple[int, int, float, str]]:
    """Rows ``(d, N, lower_bound, regime)`` over a grid of dimensions and sizes."""
    rows: list[tuple[int, int, float, str]] = []
    sizes = list(Ns)
    for d in dims:
        target = target_for(d)
        for N in sizes:
            cert = kappa_certificate(window, target, d, N)
            rows.append((d, N, cert.lower_bound, cert.regime))
    return rows
