"""Univariate approximation primitives.

Three constructions feed every compiler:

* :func:`fejer_trig_approx`: a real trigonometric polynomial built from the
  Fejér mean of a tilt-extended periodisation of ``f``;
* :func:`bernstein_poly`: the Bernstein polynomial of a Hölder function with
  controlled monomial coefficients;
* :func:`cheb_near_minimax`: Chebyshev interpolation standing in for the
  (non-constructive) Jackson polynomial, with the Jackson budget
  :func:`jackson_budget` to compare against.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from fractions import Fraction
from typing import Any, Literal

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.special import gammaln, xlogy

from aumai_depthsep.errors import CapabilityError, DomainError, InputError
from aumai_depthsep.netir import ceil_snapped

__all__ = [
    "RealFunction",
    "TrigPoly",
    "UniPoly",
    "fejer_trig_approx",
    "fejer_error_bound",
    "bernstein_degree",
    "bernstein_sum",
    "bernstein_poly",
    "coefficient_bound_holds",
    "cheb_near_minimax",
    "jackson_budget",
    "certified_sup_error",
    "sample_function",
]

logger = logging.getLogger(__name__)

RealFunction = Callable[[npt.NDArray[np.float64]], Any]

# Largest degree for which exact rational monomial coefficients are produced.
EXACT_MONOMIAL_DEGREE_CAP = 512

_EVAL_CHUNK = 512
_MAX_FFT_POINTS = 2**20
_FFT_RTOL = 1e-9


def sample_function(f: RealFunction, t: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """Evaluate a user function on *t*, broadcasting constant outputs.

    Raises:
        InputError: If any sample is NaN or infinite.
    """
    values = np.broadcast_to(np.asarray(f(t), dtype=float), t.shape).astype(float)
    if not np.all(np.isfinite(values)):
        raise InputError("function returned non-finite samples")
    return values


# ---------------------------------------------------------------------------
# Trigonometric polynomials
# ---------------------------------------------------------------------------


class TrigPoly(BaseModel):
    """``q(t) = Σ_{|k|<=n} b_k exp(i·ω₀·k·t)``.

    Coefficients are stored by index ``k + degree``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    base_frequency: float = Field(ge=0.0)
    coeffs_re: list[float]
    coeffs_im: list[float]
    real_valued: bool = True
    coeff_bound: float = Field(default=0.0, ge=0.0)

    @model_validator(mode="after")
    def validate_layout(self) -> TrigPoly:
        if len(self.coeffs_re) != len(self.coeffs_im) or len(self.coeffs_re) % 2 != 1:
            raise ValueError("coefficient arrays must have equal odd length 2n+1")
        return self

    @classmethod
    def from_coefficients(
        cls,
        base_frequency: float,
        coeffs: npt.ArrayLike,
        *,
        real_valued: bool,
        coeff_bound: float | None = None,
    ) -> TrigPoly:
        arr = np.asarray(coeffs, dtype=complex)
        bound = float(np.abs(arr).max(initial=0.0)) if coeff_bound is None else coeff_bound
        return cls(
            base_frequency=base_frequency,
            coeffs_re=arr.real.tolist(),
            coeffs_im=arr.imag.tolist(),
            real_valued=real_valued,
            coeff_bound=bound,
        )

    @property
    def degree(self) -> int:
        return len(self.coeffs_re) // 2

    @property
    def coefficients(self) -> npt.NDArray[np.complex128]:
        return np.asarray(self.coeffs_re) + 1j * np.asarray(self.coeffs_im)

    @property
    def frequencies(self) -> npt.NDArray[np.float64]:
        """Angular frequency ``ω₀·k`` of each coefficient."""
        n = self.degree
        return self.base_frequency * np.arange(-n, n + 1, dtype=float)

    def coefficient(self, k: int) -> complex:
        if abs(k) > self.degree:
            return 0j
        return complex(self.coeffs_re[k + self.degree], self.coeffs_im[k + self.degree])

    def lipschitz(self) -> float:
        """``Σ |b_k|·|ω₀ k|``, a Lipschitz constant on all of ℝ."""
        return float(np.dot(np.abs(self.coefficients), np.abs(self.frequencies)))

    def __call__(self, t: npt.ArrayLike) -> npt.NDArray[Any]:
        arr = np.asarray(t, dtype=float)
        flat = arr.reshape(-1)
        coeffs = self.coefficients
        freqs = self.frequencies
        out = np.empty(flat.shape, dtype=complex)
        for start in range(0, flat.size, _EVAL_CHUNK):
            chunk = flat[start : start + _EVAL_CHUNK]
            out[start : start + _EVAL_CHUNK] = np.exp(1j * np.outer(chunk, freqs)) @ coeffs
        result = out.reshape(arr.shape)
        return result.real if self.real_valued else result


def fejer_error_bound(L: float, r: float, n: int) -> float:
    """``3(1 + 2L²r²)·log(n)/n``."""
    return 3.0 * (1.0 + 2.0 * L * L * r * r) * math.log(n) / n


def fejer_trig_approx(f: RealFunction, L: float, r: float, n: int) -> TrigPoly:
    """Real trigonometric approximation of an L-Lipschitz *f* on ``[−r, r]``.

    ``f`` is extended past ``±r`` with slope ``L`` until both ends meet, the
    result is rescaled to a 2π-periodic function, and the Fejér mean of order
    *n* of its Fourier series is returned.  Fourier coefficients come from an
    FFT whose size doubles until the coefficients settle.

    Args:
        f: Vectorised target.
        L: Lipschitz constant of *f* on ``[−r, r]``.
        r: Half-width of the interval.
        n: Fejér order (the polynomial has degree ``n − 1``).

    Raises:
        DomainError: If ``n < 2`` or ``r <= 0`` or ``L < 0``.
        InputError: If *f* produces non-finite samples.

    Returns:
        A real-valued :class:`TrigPoly` with ``|b_k| <= sup|f|``.
    """
    if n < 2:
        raise DomainError(f"Fejér order n must be >= 2, got {n}")
    if r <= 0.0 or L < 0.0:
        raise DomainError(f"need r > 0 and L >= 0, got r={r}, L={L}")
    ends = sample_function(f, np.array([-r, r]))
    if ends[1] > ends[0]:
        mirrored = fejer_trig_approx(lambda t: f(-t), L, r, n)
        return TrigPoly.from_coefficients(
            mirrored.base_frequency,
            mirrored.coefficients[::-1],
            real_valued=True,
            coeff_bound=mirrored.coeff_bound,
        )

    f_minus, f_plus = float(ends[0]), float(ends[1])
    gap = f_minus - f_plus
    slope = max(L, gap / (2.0 * r))
    rho = r + gap / (2.0 * slope) if gap > 0.0 else r

    def periodised(x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        inside = np.clip(x, -r, r)
        values = sample_function(f, inside)
        values = np.where(x > r, f_plus + slope * (x - r), values)
        return np.where(x < -r, f_minus + slope * (x + r), values)

    degree = n - 1
    points = 1 << max(4, math.ceil(math.log2(8 * n)))
    previous: npt.NDArray[np.complex128] | None = None
    change = math.inf
    scale = 1.0
    while True:
        theta = -np.pi + 2.0 * np.pi * np.arange(points) / points
        samples = periodised(rho * theta / np.pi)
        scale = max(float(np.abs(samples).max()), 1e-300)
        spectrum = np.fft.fft(samples) / points
        ks = np.arange(-degree, degree + 1)
        current = ((-1.0) ** np.abs(ks)) * spectrum[ks % points]
        if previous is not None:
            change = float(np.abs(current - previous).max())
            if change <= _FFT_RTOL * scale:
                break
        if points >= _MAX_FFT_POINTS:
            logger.warning(
                "Fejér coefficients settled only to %.3g relative at %d points",
                change / scale,
                points,
            )
            break
        previous = current
        points *= 2

    weights = 1.0 - np.abs(ks) / n
    coeffs = weights * current
    # Hermitian symmetry for a real target.
    positive = coeffs[degree:]
    coeffs = np.concatenate([np.conj(positive[:0:-1]), positive])
    coeffs[degree] = coeffs[degree].real
    logger.debug("fejer n=%d rho=%.6g fft_points=%d", n, rho, points)
    return TrigPoly.from_coefficients(
        math.pi / rho, coeffs, real_valued=True, coeff_bound=scale
    )


# ---------------------------------------------------------------------------
# Algebraic polynomials
# ---------------------------------------------------------------------------


class UniPoly(BaseModel):
    """A univariate polynomial kept in its native basis.

    * ``monomial``: ``Σ coeffs[k]·t**k``;
    * ``chebyshev``: Chebyshev series on ``domain``;
    * ``bernstein``: ``f0 + Σ coeffs[i]·C(n,i)·s^i(1−s)^{n−i}``, with
      ``s = (t/radius + 1)/2``; ``coeffs`` are the samples ``g(i/n)``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    basis: Literal["monomial", "chebyshev", "bernstein"]
    coeffs: list[float]
    domain: tuple[float, float] = (-1.0, 1.0)
    radius: float = Field(default=1.0, gt=0.0)
    alpha: float = Field(default=1.0, gt=0.0, le=1.0)
    f0: float = 0.0
    measured_error: float | None = None

    @model_validator(mode="after")
    def validate_coeffs(self) -> UniPoly:
        if not self.coeffs:
            raise ValueError("a polynomial needs at least one coefficient")
        if self.domain[1] <= self.domain[0]:
            raise ValueError("domain must be an increasing interval")
        return self

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, t: npt.ArrayLike) -> npt.NDArray[np.float64]:
        arr = np.asarray(t, dtype=float)
        if self.basis == "monomial":
            return np.asarray(np.polynomial.polynomial.polyval(arr, self.coeffs), dtype=float)
        if self.basis == "chebyshev":
            series = np.polynomial.Chebyshev(self.coeffs, domain=list(self.domain))
            return np.asarray(series(arr), dtype=float)
        s = 0.5 * (arr / self.radius + 1.0)
        return bernstein_sum(np.asarray(self.coeffs), s) + self.f0

    def to_chebyshev(self) -> tuple[npt.NDArray[np.float64], tuple[float, float]]:
        """Chebyshev coefficients and the interval they live on."""
        if self.basis == "chebyshev":
            return np.asarray(self.coeffs, dtype=float), self.domain
        if self.basis == "monomial":
            series = np.polynomial.Polynomial(self.coeffs).convert(
                kind=np.polynomial.Chebyshev, domain=list(self.domain)
            )
            return np.asarray(series.coef, dtype=float), self.domain
        lo, hi = -self.radius, self.radius
        coef = np.polynomial.chebyshev.chebinterpolate(
            lambda x: self(lo + (x + 1.0) * (hi - lo) / 2.0), self.degree
        )
        return np.asarray(coef, dtype=float), (lo, hi)

    def monomial_coeffs(self) -> list[float]:
        """Coefficients of ``t**k`` (exact for Bernstein output, then rounded)."""
        if self.basis == "monomial":
            return list(self.coeffs)
        if self.basis == "bernstein":
            return [float(c) for c in self.exact_monomial_coeffs()]
        series = np.polynomial.Chebyshev(self.coeffs, domain=list(self.domain))
        return [float(c) for c in series.convert(kind=np.polynomial.Polynomial).coef]

    def exact_monomial_coeffs(self) -> list[Fraction]:
        """Exact rational monomial coefficients of a Bernstein polynomial.

        Raises:
            CapabilityError: For non-Bernstein bases or degrees above the cap.
        """
        if self.basis != "bernstein":
            raise CapabilityError("exact coefficients are only produced for Bernstein output")
        n = self.degree
        if n > EXACT_MONOMIAL_DEGREE_CAP:
            raise CapabilityError(
                f"degree {n} exceeds the exact-arithmetic cap {EXACT_MONOMIAL_DEGREE_CAP}"
            )
        # Power basis in s: a_j = C(n, j)·Δ^j g_0.
        diffs = [Fraction(v) for v in self.coeffs]
        power_s: list[Fraction] = []
        for j in range(n + 1):
            power_s.append(math.comb(n, j) * diffs[0])
            diffs = [b - a for a, b in zip(diffs, diffs[1:], strict=False)]
        # s = (1 + t/r)/2
        inv_r = 1 / Fraction(self.radius)
        coeffs: list[Fraction] = []
        for k in range(n + 1):
            total = sum(
                (power_s[j] * math.comb(j, k) / (1 << j) for j in range(k, n + 1)),
                Fraction(0),
            )
            coeffs.append(total * inv_r**k)
        coeffs[0] += Fraction(self.f0)
        return coeffs

    def lipschitz_bound(self, a: float, b: float) -> float:
        """Upper bound on ``sup |p'|`` over ``[a, b]``."""
        if self.basis == "monomial":
            radius = max(abs(a), abs(b))
            return float(
                sum(k * abs(c) * radius ** (k - 1) for k, c in enumerate(self.coeffs) if k)
            )
        if self.basis == "chebyshev":
            lo, hi = self.domain
            if a < lo - 1e-12 or b > hi + 1e-12:
                mono = self.monomial_coeffs()
                radius = max(abs(a), abs(b))
                return float(sum(k * abs(c) * radius ** (k - 1) for k, c in enumerate(mono) if k))
            ks = np.arange(len(self.coeffs), dtype=float)
            return float(np.dot(np.abs(self.coeffs), ks**2) * 2.0 / (hi - lo))
        # Derivative of a Bernstein sum is n·Σ Δg_i b_{i,n−1}(s), bounded on [0, 1].
        diffs = np.abs(np.diff(np.asarray(self.coeffs, dtype=float)))
        return float(self.degree * diffs.max(initial=0.0) / (2.0 * self.radius))


def bernstein_degree(alpha: float, r: float, eps: float) -> int:
    """``⌈4^{1/α}·r^α / ε^{1+2/α}⌉``.

    Raises:
        DomainError: If ``eps <= 0``, ``r <= 0`` or ``alpha`` is outside (0, 1].
    """
    if eps <= 0.0:
        raise DomainError(f"eps must be positive, got {eps}")
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if r <= 0.0:
        raise DomainError(f"r must be positive, got {r}")
    return ceil_snapped(4.0 ** (1.0 / alpha) * r**alpha / eps ** (1.0 + 2.0 / alpha))


def bernstein_sum(values: npt.ArrayLike, s: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """``Σ_i values[i]·C(n,i)·s^i(1−s)^{n−i}`` with log-space binomials.

    Works for ``s`` outside [0, 1] too; signs are tracked separately from the
    log-magnitudes.
    """
    g = np.asarray(values, dtype=float)
    x = np.asarray(s, dtype=float)
    n = g.size - 1
    flat = x.reshape(-1)
    i = np.arange(n + 1, dtype=float)
    log_binom = gammaln(n + 1.0) - gammaln(i + 1.0) - gammaln(n - i + 1.0)
    out = np.empty(flat.shape, dtype=float)
    for start in range(0, flat.size, _EVAL_CHUNK):
        chunk = flat[start : start + _EVAL_CHUNK][:, None]
        u, v = chunk, 1.0 - chunk
        log_mag = log_binom + xlogy(i, np.abs(u)) + xlogy(n - i, np.abs(v))
        sign = np.where(u < 0.0, (-1.0) ** i, 1.0) * np.where(v < 0.0, (-1.0) ** (n - i), 1.0)
        out[start : start + _EVAL_CHUNK] = (sign * np.exp(log_mag)) @ g
    return out.reshape(x.shape)


def bernstein_poly(f: RealFunction, r: float, alpha: float, eps: float) -> UniPoly:
    """Bernstein approximation of a (1, α)-Hölder *f* on ``[−r, r]``.

    The degree is :func:`bernstein_degree`; the samples of
    ``g(s) = f(r(2s − 1)) − f(0)`` on ``i/n`` are the stored coefficients.
    """
    n = bernstein_degree(alpha, r, eps)
    nodes = np.arange(n + 1, dtype=float) / n
    f0 = float(sample_function(f, np.zeros(1))[0])
    values = sample_function(f, r * (2.0 * nodes - 1.0)) - f0
    logger.debug("bernstein degree %d (alpha=%g, r=%g, eps=%g)", n, alpha, r, eps)
    return UniPoly(
        basis="bernstein", coeffs=values.tolist(), radius=r, alpha=alpha, f0=f0
    )


def _log2_abs(x: Fraction) -> float:
    return math.log2(abs(x.numerator)) - math.log2(x.denominator)


def coefficient_bound_holds(poly: UniPoly) -> bool:
    """Check ``|r_k| <= 2^n r^{α−k}`` and ``|r_0| <= r^α + |f(0)|`` in log space."""
    coeffs = poly.exact_monomial_coeffs()
    n, r, alpha = poly.degree, poly.radius, poly.alpha
    if abs(coeffs[0]) > Fraction(r**alpha) + abs(Fraction(poly.f0)) + Fraction(1, 10**12):
        return False
    log2_r = math.log2(r)
    for k, c in enumerate(coeffs[1:], start=1):
        if c and _log2_abs(c) > n + (alpha - k) * log2_r + 1e-9:
            return False
    return True


def cheb_near_minimax(f: RealFunction, a: float, b: float, n: int) -> UniPoly:
    """Chebyshev interpolant of degree *n* on ``[a, b]``.

    The sup error measured on a 10⁴-point grid is stored on the result.

    Raises:
        DomainError: If ``n < 0`` or ``a >= b``.
    """
    if n < 0:
        raise DomainError(f"degree must be >= 0, got {n}")
    if b <= a:
        raise DomainError(f"need a < b, got [{a}, {b}]")
    half, mid = 0.5 * (b - a), 0.5 * (b + a)
    coef = np.polynomial.chebyshev.chebinterpolate(
        lambda x: sample_function(f, mid + half * np.asarray(x, dtype=float)), n
    )
    grid = np.linspace(a, b, 10_001)
    series = np.polynomial.Chebyshev(coef, domain=[a, b])
    measured = float(np.abs(series(grid) - sample_function(f, grid)).max())
    return UniPoly(
        basis="chebyshev",
        coeffs=[float(c) for c in coef],
        domain=(a, b),
        measured_error=measured,
    )


def jackson_budget(omega: Callable[[float], float], a: float, b: float, n: int) -> float:
    """``6·ω((b − a)/(2n))`` for degree ``n >= 1``."""
    if n < 1:
        raise DomainError(f"degree must be >= 1, got {n}")
    return 6.0 * omega((b - a) / (2.0 * n))


def certified_sup_error(
    f: RealFunction,
    p: Callable[[npt.NDArray[np.float64]], Any],
    a: float,
    b: float,
    lipschitz_f: float,
    lipschitz_p: float,
    *,
    points: int = 4097,
    holder_alpha: float = 1.0,
) -> float:
    """Upper bound on ``sup_{[a,b]} |f − p|`` from a uniform grid.

    The grid maximum is inflated by the worst change between a point and its
    nearest grid node: ``L_f·(h/2)^α`` with ``L_f`` the Hölder constant of
    *f*, plus ``L_p·h/2``.
    """
    if points < 2:
        raise DomainError("need at least two grid points")
    grid = np.linspace(a, b, points)
    gap = np.abs(sample_function(f, grid) - np.asarray(p(grid), dtype=float))
    half_step = 0.5 * (b - a) / (points - 1)
    return float(gap.max()) + lipschitz_f * half_step**holder_alpha + lipschitz_p * half_step
