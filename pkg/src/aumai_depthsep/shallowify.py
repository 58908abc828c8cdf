"""Deep-to-shallow compilers.

Every compiler returns its artifact with a
:class:`~aumai_depthsep.models.Certificate` that carries the closed-form
budgets next to the certified a-posteriori error of what was actually
built.  Two schedules exist:

* ``closed_form`` materialises with the closed-form degrees and refuses when the
  predicted atom count is above the cap;
* ``adaptive`` (default) climbs a degree ladder until the certified error
  meets its share of ε, never going past the closed-form degrees.

Two-hidden-layer targets are handled through :class:`TwoLayerTarget`, a
flattened view ``Σ_k γ_k g_k(Σ_j W_kj h_j(u_j·x + b_j) + c_k)`` in which
complex exponentials are already split into cosine and sine parts.
"""

from __future__ import annotations

import functools
import logging
import math
import sys
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Literal, NamedTuple

import numpy as np
import numpy.typing as npt

from aumai_depthsep.errors import (
    BudgetExceededError,
    CapabilityError,
    DomainError,
    NormalizationError,
    PreconditionError,
    ShapeError,
)
from aumai_depthsep.fouriernet import (
    FourierNet,
    fn_compose_poly_pruned,
    fn_from_trigpoly,
    fn_linear_combine,
    fn_to_trig_pair,
)
from aumai_depthsep.harness import (
    ProbeDomain,
    Sampler,
    gaussian_tail_bound,
    grid_sup_error,
    mc_l2_error,
)
from aumai_depthsep.models import Certificate, CompileConfig, SamplerConfig
from aumai_depthsep.netir import (
    Activation,
    Layer,
    LayeredNet,
    ceil_snapped,
    depth,
    interpolating_units,
    oscillatory_net,
)
from aumai_depthsep.spectral import Window
from aumai_depthsep.uniapprox import (
    TrigPoly,
    UniPoly,
    certified_sup_error,
    cheb_near_minimax,
    fejer_trig_approx,
)

__all__ = [
    "KNorm",
    "BudgetBound",
    "DomainConstants",
    "InnerUnit",
    "OuterPart",
    "TwoLayerTarget",
    "two_layer_target",
    "domain_constants",
    "closed_form_certificate",
    "compile_two_layer",
    "resynthesize",
    "resynthesis_unit_bound",
    "compile_deep",
    "compile_oscillatory",
    "oscillatory_q_tilde",
    "compile_radial",
    "compile_gaussian",
    "gaussian_l2_budget",
    "fixed_dimension_budget",
    "radial_budget",
    "oscillatory_budget",
    "multilayer_degree",
    "deep_schedule_degree",
    "multilayer_log2_atoms",
    "gaussian_tail_bound",
]

logger = logging.getLogger(__name__)

KNorm = Literal["l2", "linf"]
FloatArray = npt.NDArray[np.float64]
RealFunction = Callable[[Any], Any]

_LOG2_FLOAT_MAX = 1023.0
_MIN_WIDTH = 1e-9
_MAX_TAIL_ROUNDS = 4


# ---------------------------------------------------------------------------
# Budget helpers
# ---------------------------------------------------------------------------


class BudgetBound(NamedTuple):
    """A closed-form size bound, kept in log₂ because it is usually huge."""

    log2: float

    @property
    def value(self) -> float:
        return 2.0**self.log2 if self.log2 < _LOG2_FLOAT_MAX else math.inf


def _ceil_budget(value: float) -> int:
    if not math.isfinite(value):
        raise DomainError("closed-form budget overflows a float; loosen eps")
    return ceil_snapped(value)


def _check_unit_interval(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")


def gaussian_l2_budget(
    d: int,
    w_l1: float,
    eps: float,
    *,
    p: int = 1,
    K: float = 1.0,
    s: float = 1.0,
) -> BudgetBound:
    """Shallow size bound under ``N(0, d⁻¹I)``.

    ``N = [K·p·S]^{K·(1 + (ln p/d)^s)·S}`` with ``S = (1 + ε^{−s})(1 + ‖w‖₁^s)``;
    ``K`` and ``s`` are the unspecified constants of the bound.
    """
    _check_unit_interval(eps)
    if d < 1 or p < 1 or w_l1 < 0.0:
        raise DomainError(f"need d >= 1, p >= 1, ‖w‖₁ >= 0; got d={d}, p={p}, w={w_l1}")
    spread = (1.0 + eps**-s) * (1.0 + w_l1**s)
    exponent = K * (1.0 + (math.log(p) / d) ** s) * spread
    return BudgetBound(exponent * math.log2(K * p * spread))


def fixed_dimension_budget(d: int, eps: float, *, beta: float = 1.0) -> BudgetBound:
    """``N ≤ 2 + β·d⁷·(β/ε)^d·ε⁻⁶`` for fixed input dimension."""
    _check_unit_interval(eps)
    if d < 1 or beta <= 0.0:
        raise DomainError(f"need d >= 1 and beta > 0, got d={d}, beta={beta}")
    log2_tail = (
        math.log2(beta) + 7.0 * math.log2(d) + d * math.log2(beta / eps) - 6.0 * math.log2(eps)
    )
    return BudgetBound(float(np.logaddexp2(1.0, log2_tail)))


def multilayer_degree(L: int, eps: float) -> int:
    """``⌈L/ε + (L − 1)⌉``: the per-layer polynomial degree for depth L."""
    if L < 1 or eps <= 0.0:
        raise DomainError(f"need L >= 1 and eps > 0, got L={L}, eps={eps}")
    return ceil_snapped(L / eps + (L - 1))


def deep_schedule_degree(L: int, eps: float) -> int:
    """Chebyshev degree for layers ``k >= 2``: ``⌈2(L−1)/ε + (L−2)⌉``, at least
    :func:`multilayer_degree`."""
    if L < 2:
        return 0
    return max(ceil_snapped(2.0 * (L - 1) / eps + (L - 2)), multilayer_degree(L, eps))


def multilayer_log2_atoms(L: int, n_first: int, d_first: int, degrees: Sequence[int]) -> float:
    """``log₂ (2^L·N₁·d₁)^{Π_k N_k}``."""
    exponent = math.prod(degrees) if degrees else 1
    return exponent * (L + math.log2(max(n_first * d_first, 1)))


# ---------------------------------------------------------------------------
# Two-layer targets
# ---------------------------------------------------------------------------


class DomainConstants(NamedTuple):
    """``C = max_j sup_K |u_j·x + b_j|``, ``M`` bounds the outer arguments,
    ``H = max_j sup_{[−C,C]} |h_j|``."""

    C: float
    M: float
    H: float
    resolution: float = 0.0


class InnerUnit(NamedTuple):
    """``x -> h(u·x + b)``."""

    direction: FloatArray
    offset: float
    act: Activation


class OuterPart(NamedTuple):
    """``γ·g(Σ_j weights_j·y_j + offset)`` with ``g`` (c, α)-Hölder.

    ``holder_constant(lo, hi)`` returns c on ``[lo, hi]``; ``sup`` bounds
    ``|g|`` on all of ℝ; ``unit`` is the outer unit the part came from.
    """

    weights: FloatArray
    offset: float
    g: RealFunction
    holder_constant: Callable[[float, float], float]
    alpha: float
    gamma: complex
    unit: int
    z_range: tuple[float, float] | None = None
    sup: float = math.inf


class TwoLayerTarget(NamedTuple):
    d: int
    inner: list[InnerUnit]
    outer: list[OuterPart]
    constant: complex = 0j

    def hidden(self, x: npt.ArrayLike) -> FloatArray:
        arr = np.atleast_2d(np.asarray(x, dtype=float))
        if arr.shape[1] != self.d:
            raise ShapeError(f"expected input of dimension {self.d}, got {arr.shape}")
        if not self.inner:
            return np.zeros((arr.shape[0], 0))
        return np.column_stack(
            [np.asarray(u.act(arr @ u.direction + u.offset), dtype=float) for u in self.inner]
        )

    def __call__(self, x: npt.ArrayLike) -> npt.NDArray[np.complex128]:
        y = self.hidden(x)
        out = np.full(y.shape[0], self.constant, dtype=complex)
        for part in self.outer:
            out += part.gamma * np.asarray(part.g(y @ part.weights + part.offset), dtype=float)
        return out


def _constant_holder(lo: float, hi: float, value: float) -> float:
    return value


def _activation_holder(act: Activation) -> Callable[[float, float], float]:
    if act.holder_alpha < 1.0:
        return functools.partial(_constant_holder, value=abs(act.scale))
    return act.lipschitz_on


def _global_sup(act: Activation) -> float:
    if act.kind in ("sigmoid", "cosine", "sine", "complex_exp"):
        return abs(act.scale)
    if act.kind == "piecewise_linear":
        return abs(act.scale) * max(abs(y) for _, y in act.knots)
    return math.inf


def _cos_of(t: Any, omega: float) -> Any:
    return np.cos(omega * np.asarray(t, dtype=float))


def _sin_of(t: Any, omega: float) -> Any:
    return np.sin(omega * np.asarray(t, dtype=float))


def two_layer_target(net: LayeredNet) -> TwoLayerTarget:
    """Flatten a two-hidden-layer net; ``complex_exp`` outer units become a
    cosine part with weight γ and a sine part with weight iγ.

    Raises:
        PreconditionError: Unless *net* has exactly two hidden layers with
            real inner activations.
    """
    if depth(net) != 2:
        raise PreconditionError(f"expected exactly two hidden layers, got {depth(net)}")
    (A1, b1), (A2, b2) = net.matrices
    first, second = net.layers
    inner: list[InnerUnit] = []
    for u, b, act in zip(A1, b1, first.activations(), strict=True):
        if act.is_complex:
            raise PreconditionError("inner activations must be real")
        inner.append(InnerUnit(u.copy(), float(b), act))
    outer: list[OuterPart] = []
    for k, (row, off, act) in enumerate(zip(A2, b2, second.activations(), strict=True)):
        gamma = complex(net.output_weights[k])
        if act.kind == "complex_exp":
            omega = 2.0 * math.pi * act.rate
            lip = functools.partial(_constant_holder, value=abs(omega))
            weight = gamma * act.scale
            outer.append(
                OuterPart(row.copy(), float(off), functools.partial(_cos_of, omega=omega),
                          lip, 1.0, weight, k, sup=1.0)
            )
            outer.append(
                OuterPart(row.copy(), float(off), functools.partial(_sin_of, omega=omega),
                          lip, 1.0, 1j * weight, k, sup=1.0)
            )
        else:
            outer.append(
                OuterPart(row.copy(), float(off), act, _activation_holder(act),
                          act.holder_alpha, gamma, k, sup=_global_sup(act))
            )
    return TwoLayerTarget(net.d, inner, outer, net.output_bias)


def _dual_norm(rows: FloatArray, K_norm: KNorm) -> FloatArray:
    return np.linalg.norm(np.atleast_2d(rows), ord=2 if K_norm == "l2" else 1, axis=1)


def domain_constants(
    net: LayeredNet | TwoLayerTarget, K_radius: float, K_norm: KNorm = "l2"
) -> DomainConstants:
    """``(C, M, H)`` of a two-hidden-layer net on the radius-``K_radius`` ball.

    ``C`` uses the dual norm of the inner rows (ℓ² for the ℓ² ball, ℓ¹ for
    the cube) plus the bias; ``H`` and ``M`` are analytic per activation
    kind, so ``resolution`` is always 0.
    """
    if K_radius <= 0.0:
        raise DomainError(f"K_radius must be positive, got {K_radius}")
    target = net if isinstance(net, TwoLayerTarget) else two_layer_target(net)
    if not target.inner:
        return DomainConstants(0.0, max((abs(p.offset) for p in target.outer), default=0.0), 0.0)
    rows = np.vstack([u.direction for u in target.inner])
    offsets = np.array([u.offset for u in target.inner])
    C = float(np.max(_dual_norm(rows, K_norm) * K_radius + np.abs(offsets)))
    H = max(u.act.sup_on(-C, C).value for u in target.inner)
    M = max(
        (float(np.abs(p.weights).sum()) * H + abs(p.offset) for p in target.outer),
        default=0.0,
    )
    return DomainConstants(C, M, H, 0.0)


class _ClosedForm(NamedTuple):
    n: int
    m: int
    log2_N: float
    V: float
    B: float
    log2_B: float


def _closed_form(
    eps: float,
    *,
    alpha: float,
    gamma_l1: float,
    w_inf: float,
    w_max: float,
    C: float,
    M: float,
    H: float,
    p: int,
) -> _ClosedForm:
    if gamma_l1 == 0.0 or p == 0:
        return _ClosedForm(0, 0, 0.0, 0.0, 0.0, 0.0)
    inv = 1.0 / alpha
    n = _ceil_budget(
        9.0 * 4.0**inv * gamma_l1**2 * w_inf**2 * (1.0 + 2.0 * C * C) ** 2 / eps ** (2.0 * inv)
    )
    lead = (eps / (2.0 * gamma_l1)) ** inv + M
    m = _ceil_budget(2.0 * 16.0**inv / eps ** (1.0 + 2.0 * inv) * gamma_l1**inv * lead**alpha)
    n, m = max(n, 1), max(m, 1)
    log2_N = m * math.log2(2 * n * p + 1)
    base = 4.0 * n * p * H * w_max
    log2_B = math.log2(2.0 * gamma_l1 * (1.0 + lead**alpha))
    if base > 0.0:
        log2_B += m * math.log2(base)
    B = 2.0**log2_B if log2_B < _LOG2_FLOAT_MAX else sys.float_info.max
    return _ClosedForm(n, m, log2_N, math.pi * m * n, B, log2_B)


def _first_parts(target: TwoLayerTarget) -> list[OuterPart]:
    seen: dict[int, OuterPart] = {}
    for part in target.outer:
        seen.setdefault(part.unit, part)
    return list(seen.values())


def _certificate(
    target: TwoLayerTarget,
    K_radius: float,
    K_norm: KNorm,
    eps: float,
    pipeline: str,
    schedule: str,
) -> Certificate:
    consts = domain_constants(target, K_radius, K_norm)
    firsts = _first_parts(target)
    gamma_l1 = sum(abs(part.gamma) for part in firsts)
    w_inf = max((float(np.abs(part.weights).sum()) for part in firsts), default=0.0)
    w_max = max((float(np.abs(part.weights).max(initial=0.0)) for part in firsts), default=0.0)
    alpha = min((part.alpha for part in target.outer), default=1.0)
    inner_lip = max(
        (u.act.lipschitz_on(-consts.C, consts.C) for u in target.inner), default=0.0
    )
    # g with Hölder constant c is g̃(λ·) with g̃ (1, α)-Hölder, λ = c^{1/α}.
    outer_scale = max(
        (part.holder_constant(-consts.M, consts.M) ** (1.0 / part.alpha) for part in target.outer),
        default=1.0,
    )
    closed = _closed_form(
        eps,
        alpha=alpha,
        gamma_l1=gamma_l1,
        w_inf=outer_scale * w_inf,
        w_max=outer_scale * w_max,
        C=inner_lip * consts.C,
        M=outer_scale * consts.M,
        H=consts.H,
        p=len(target.inner),
    )
    logger.info(
        "%s closed-form budget: n=%d m=%d p=%d log2_N=%.4g",
        pipeline, closed.n, closed.m, len(target.inner), closed.log2_N,
    )
    return Certificate(
        pipeline=pipeline,
        eps=eps,
        n=closed.n,
        m=closed.m,
        p=len(target.inner),
        log2_N=closed.log2_N,
        V=closed.V,
        B=closed.B,
        log2_B=closed.log2_B,
        schedule=schedule,
        constants={
            "C": consts.C,
            "M": consts.M,
            "H": consts.H,
            "gamma_l1": gamma_l1,
            "W_inf": w_inf,
            "W_max": w_max,
            "alpha": alpha,
            "inner_lipschitz": inner_lip,
            "outer_scale": outer_scale,
            "K_radius": K_radius,
        },
    )


def closed_form_certificate(
    net: LayeredNet | TwoLayerTarget,
    K_radius: float,
    eps: float,
    *,
    K_norm: KNorm = "l2",
) -> Certificate:
    """Closed-form two-layer budgets without building anything."""
    if eps <= 0.0:
        raise DomainError(f"eps must be positive, got {eps}")
    target = net if isinstance(net, TwoLayerTarget) else two_layer_target(net)
    return _certificate(target, K_radius, K_norm, eps, "two_layer", "closed_form")


# ---------------------------------------------------------------------------
# 1-D ladders
# ---------------------------------------------------------------------------


def _orders(start: int, cap: int) -> list[int]:
    """Doubling Fejér orders from *start*, always ending at *cap*."""
    out: list[int] = []
    n = max(2, start)
    while n < cap:
        out.append(n)
        n *= 2
    out.append(max(cap, 2))
    return out


def _degrees(cap: int) -> list[int]:
    """1, 2, 3, 4, 6, 8, 12, 16, ... up to *cap* (inclusive)."""
    out: list[int] = []
    k = 1
    while k < cap:
        out.append(k)
        k = k + 1 if k < 4 else (3 * k) // 2 if k & (k - 1) == 0 else (4 * k) // 3
    out.append(max(cap, 0))
    return out


def _prune_trig(q: TrigPoly, budget: float) -> TrigPoly:
    """Zero the ``±k`` pairs of smallest total modulus within *budget*."""
    n = q.degree
    if budget <= 0.0 or n == 0:
        return q
    c = q.coefficients.copy()
    pair = np.abs(c[n + 1 :]) + np.abs(c[:n][::-1])
    order = np.argsort(pair, kind="stable")
    cut = int(np.searchsorted(np.cumsum(pair[order]), budget, side="right"))
    if cut == 0:
        return q
    ks = order[:cut] + 1
    c[n + ks] = 0.0
    c[n - ks] = 0.0
    return TrigPoly.from_coefficients(
        q.base_frequency, c, real_valued=q.real_valued, coeff_bound=q.coeff_bound
    )


def _shifted(t: Any, act: Activation, offset: float) -> Any:
    return act(np.asarray(t, dtype=float) + offset)


class _Fit(NamedTuple):
    net: FourierNet
    error: float
    order: int


def _fejer_ladder(
    f: RealFunction,
    lip: float,
    rho: float,
    direction: FloatArray,
    tol: float,
    prune: float,
    orders: Iterable[int],
) -> _Fit | None:
    for n in orders:
        q = _prune_trig(fejer_trig_approx(f, lip, rho, n), prune)
        error = certified_sup_error(
            f, q, -rho, rho, lip, q.lipschitz(), points=max(4097, 16 * n + 1)
        )
        logger.debug("fejer n=%d rho=%.4g certified error %.3g (tol %.3g)", n, rho, error, tol)
        if error <= tol:
            return _Fit(fn_from_trigpoly(q, direction), error, n)
    return None


class _PolyFit(NamedTuple):
    poly: UniPoly
    error: float
    degree: int


def _cheb_ladder(
    g: RealFunction,
    a: float,
    b: float,
    holder: float,
    alpha: float,
    tol: float,
    degrees: Iterable[int],
) -> _PolyFit | None:
    for m in degrees:
        poly = cheb_near_minimax(g, a, b, m)
        error = certified_sup_error(
            g, poly, a, b, holder, poly.lipschitz_bound(a, b),
            points=max(4097, 64 * m + 1), holder_alpha=alpha,
        )
        logger.debug("chebyshev m=%d on [%.4g, %.4g] certified error %.3g", m, a, b, error)
        if error <= tol:
            return _PolyFit(poly, error, m)
    return None


def _widen(lo: float, hi: float) -> tuple[float, float]:
    if hi - lo < _MIN_WIDTH:
        mid = 0.5 * (lo + hi)
        return mid - _MIN_WIDTH, mid + _MIN_WIDTH
    return lo, hi


def _probe_domain(K_norm: KNorm, d: int, radius: float) -> ProbeDomain:
    return ProbeDomain(kind="ball" if K_norm == "l2" else "box", d=d, radius=radius)


# ---------------------------------------------------------------------------
# Two-layer compiler
# ---------------------------------------------------------------------------


def _z_range(part: OuterPart, ranges: Sequence[tuple[float, float]]) -> tuple[float, float]:
    if part.z_range is not None:
        return part.z_range
    lo = hi = part.offset
    for w, (h_lo, h_hi) in zip(part.weights, ranges, strict=True):
        lo += min(w * h_lo, w * h_hi)
        hi += max(w * h_lo, w * h_hi)
    return float(lo), float(hi)


def _compile_target(
    target: TwoLayerTarget,
    K_radius: float,
    K_norm: KNorm,
    eps: float,
    atom_cap: int,
    config: CompileConfig,
    pipeline: str,
) -> tuple[FourierNet, Certificate]:
    if eps <= 0.0:
        raise DomainError(f"eps must be positive, got {eps}")
    cert = _certificate(target, K_radius, K_norm, eps, pipeline, config.schedule)
    closed = config.schedule == "closed_form"
    if closed and cert.log2_N > math.log2(atom_cap):
        raise BudgetExceededError(
            f"(2np+1)^m = 2^{cert.log2_N:.4g} atoms exceeds the cap {atom_cap}", certificate=cert
        )
    d = target.d
    domain = _probe_domain(K_norm, d, K_radius)
    gamma_total = sum(abs(part.gamma) for part in target.outer)
    if gamma_total == 0.0:
        fn = FourierNet.constant(target.constant, d)
        probe = grid_sup_error(target, fn, domain, config.verify_points,
                               refine_points=config.refine_points, seed=config.seed)
        return fn, cert.model_copy(update={"predicted_error": 0.0, "measured_error": probe.value})

    split, pf = config.eps_split, 0.0 if closed else config.prune_fraction
    radii = (
        _dual_norm(np.vstack([u.direction for u in target.inner]), K_norm) * K_radius
        if target.inner
        else np.zeros(0)
    )
    ranges = [
        u.act.range_on(u.offset - rho, u.offset + rho)
        for u, rho in zip(target.inner, radii, strict=True)
    ]
    z_ranges = [_z_range(part, ranges) for part in target.outer]

    # Inner tolerance: ω_g(Σ_j |W_kj| e_j) must stay within split·ε/Σ|γ| per part.
    share = split * eps / gamma_total
    delta = np.full(len(target.inner), math.inf)
    for part, (lo, hi) in zip(target.outer, z_ranges, strict=True):
        c = part.holder_constant(lo - eps, hi + eps)
        tol_z = min((share / c) ** (1.0 / part.alpha) if c > 0.0 else math.inf, eps)
        row = np.abs(part.weights)
        if row.sum() > 0.0:
            used = row > 0.0
            delta[used] = np.minimum(delta[used], tol_z / row.sum())

    n_cap = max(cert.n, config.min_inner_degree)
    orders = (
        [max(cert.n, 2)]
        if closed
        else _orders(config.min_inner_degree, min(config.max_inner_degree, n_cap))
    )

    def fit_inner(j: int) -> _Fit:
        unit, rho, tol = target.inner[j], float(radii[j]), float(delta[j])
        if not math.isfinite(tol):
            return _Fit(FourierNet.zero(d), 0.0, 0)
        if rho == 0.0:
            value = float(np.asarray(unit.act(np.array([unit.offset])), dtype=float)[0])
            return _Fit(FourierNet.constant(value, d), 0.0, 0)
        f = functools.partial(_shifted, act=unit.act, offset=unit.offset)
        lip = unit.act.lipschitz_on(unit.offset - rho, unit.offset + rho)
        fit = _fejer_ladder(
            f, lip, rho, unit.direction, math.inf if closed else tol, pf * tol, orders
        )
        if fit is None:
            raise BudgetExceededError(
                f"inner unit {j}: Fejér order {orders[-1]} does not reach {tol:.3g}",
                certificate=cert,
            )
        return fit

    if config.shards > 1 and len(target.inner) > 1:
        with ThreadPoolExecutor(max_workers=config.shards) as pool:
            fits = list(pool.map(fit_inner, range(len(target.inner))))
    else:
        fits = [fit_inner(j) for j in range(len(target.inner))]
    ys = [fit.net for fit in fits]
    errors = np.array([fit.error for fit in fits])

    out_share = (1.0 - split) * eps / gamma_total
    m_cap = min(config.max_outer_degree, max(cert.m, 1))
    degrees = [cert.m] if closed else _degrees(m_cap)
    parts: list[FourierNet] = []
    predicted = 0.0
    m_used = 0
    try:
        for part, (lo, hi) in zip(target.outer, z_ranges, strict=True):
            e_z = float(np.abs(part.weights) @ errors) if errors.size else 0.0
            a, b = _widen(lo - e_z, hi + e_z)
            c_prop = part.holder_constant(lo - eps, hi + eps)
            fit = _cheb_ladder(
                part.g, a, b, part.holder_constant(a, b), part.alpha,
                math.inf if closed else (1.0 - pf) * out_share, degrees,
            )
            if fit is None:
                raise BudgetExceededError(
                    f"outer part of unit {part.unit}: degree {degrees[-1]} does not reach "
                    f"{(1.0 - pf) * out_share:.3g}",
                    certificate=cert,
                )
            z = fn_linear_combine(
                [*part.weights.tolist(), 1.0], [*ys, FourierNet.constant(part.offset, d)]
            )
            y, dropped = fn_compose_poly_pruned(
                fit.poly, z, prune_budget=pf * out_share, atom_cap=atom_cap
            )
            parts.append(y)
            m_used = max(m_used, fit.degree)
            propagated = c_prop * e_z**part.alpha if e_z > 0.0 else 0.0
            predicted += abs(part.gamma) * (propagated + fit.error + dropped)
        fn = fn_linear_combine(
            [p.gamma for p in target.outer] + [1.0],
            [*parts, FourierNet.constant(target.constant, d)],
        )
    except BudgetExceededError as exc:
        if exc.certificate is not None:
            raise
        raise BudgetExceededError(str(exc), certificate=cert) from exc
    if fn.atom_count > atom_cap:
        raise BudgetExceededError(
            f"compiled net has {fn.atom_count} atoms (cap {atom_cap})", certificate=cert
        )

    probe = grid_sup_error(target, fn, domain, config.verify_points,
                           refine_points=config.refine_points, seed=config.seed)
    if not closed and predicted > eps:
        logger.warning("%s: certified error %.3g above eps %.3g", pipeline, predicted, eps)
    logger.info(
        "%s compiled: %d atoms, certified %.3g, measured %.3g",
        pipeline, fn.atom_count, predicted, probe.value,
    )
    return fn, cert.model_copy(
        update={
            "n_used": max((fit.order for fit in fits), default=0),
            "m_used": m_used,
            "atoms": fn.atom_count,
            "predicted_error": predicted,
            "measured_error": probe.value,
        }
    )


def compile_two_layer(
    net: LayeredNet,
    K_radius: float,
    eps: float,
    atom_cap: int | None = None,
    *,
    K_norm: KNorm = "l2",
    config: CompileConfig | None = None,
) -> tuple[FourierNet, Certificate]:
    """Compile a two-hidden-layer net into a shallow Fourier network.

    Inner units are replaced by Fejér means, outer activations by Chebyshev
    interpolants composed through the Clenshaw recurrence.  ε is split
    between the stages by ``config.eps_split``.

    Returns:
        The Fourier net and a certificate with the closed-form ``n``, ``m``,
        ``log2_N``, ``V`` and ``B``, the degrees used, the certified error and
        the error measured on a low-discrepancy probe of the domain.

    Raises:
        PreconditionError: If *net* is not a two-hidden-layer net.
        BudgetExceededError: If the atom cap or the degree caps are hit; the
            certificate is attached.
    """
    config = config or CompileConfig()
    target = two_layer_target(net)
    return _compile_target(
        target, K_radius, K_norm, eps, atom_cap or config.atom_cap, config, "two_layer"
    )


# ---------------------------------------------------------------------------
# Activation resynthesis
# ---------------------------------------------------------------------------


def _clipped_cosine(t: Any, amplitude: float, phase: float, radius: float) -> Any:
    return amplitude * np.cos(np.clip(np.asarray(t, dtype=float), -radius, radius) - phase)


def resynthesis_unit_bound(
    fn: FourierNet, sigma: Activation, K_radius: float, eps: float, *, K_norm: KNorm = "l2"
) -> int:
    """``2N·(⌈4ν_σ·V·B₁/ε⌉ + 1)`` with N the non-constant cosine/sine terms,
    V the largest ``sup_K |v·x|`` and B₁ the coefficient mass."""
    pair = fn_to_trig_pair(fn)
    radii = _dual_norm(pair.frequencies, K_norm) * K_radius if len(pair) else np.zeros(0)
    terms = int(np.count_nonzero(radii > 0.0))
    if terms == 0:
        return 0
    V = float(radii.max())
    return 2 * terms * (math.ceil(4.0 * sigma.resynthesis_rate * V * fn.mass / eps) + 1)


def resynthesize(
    fn: FourierNet,
    sigma: Activation,
    K_radius: float,
    eps: float,
    *,
    K_norm: KNorm = "l2",
    config: CompileConfig | None = None,
) -> tuple[LayeredNet, Certificate]:
    """Rebuild a Fourier net as a one-hidden-layer σ-network.

    Each cosine/sine term becomes ``ρ·cos(v·x − φ)`` per real and imaginary
    part, rebuilt on ``[−V, V]`` by :func:`~aumai_depthsep.netir.interpolating_units`
    with error share ``ε·ρ/Σρ``.  Constants land in the output bias.

    Raises:
        DomainError: If ``eps`` or ``K_radius`` is not positive.
        CapabilityError: If σ has no constructive rebuild.
    """
    config = config or CompileConfig()
    if eps <= 0.0 or K_radius <= 0.0:
        raise DomainError(f"eps and K_radius must be positive, got eps={eps}, K_radius={K_radius}")
    if sigma.kind not in ("relu", "abs", "sigmoid"):
        raise CapabilityError(f"no constructive resynthesis for activation {sigma.kind!r}")
    d = fn.d
    pair = fn_to_trig_pair(fn)
    freqs = pair.frequencies
    radii = _dual_norm(freqs, K_norm) * K_radius if len(pair) else np.zeros(0)
    constant = 0j
    pieces: list[tuple[FloatArray, float, float, float, bool]] = []
    for freq, V, C, S in zip(freqs, radii, pair.cos_coeffs, pair.sin_coeffs, strict=True):
        if V == 0.0:
            constant += complex(C)
            continue
        for imag, (a, b) in ((False, (C.real, S.real)), (True, (C.imag, S.imag))):
            rho = math.hypot(a, b)
            if rho > 0.0:
                pieces.append((freq, float(V), rho, math.atan2(b, a), imag))

    total = sum(piece[2] for piece in pieces)
    rows: list[FloatArray] = []
    biases: list[float] = []
    out_re: list[float] = []
    out_im: list[float] = []
    bound = 0.0
    for freq, V, rho, phase, imag in pieces:
        units = interpolating_units(
            functools.partial(_clipped_cosine, amplitude=rho, phase=phase, radius=V),
            sigma, rho, V, eps * rho / total,
        )
        rows.extend(np.outer(units.inner, freq))
        biases.extend(units.bias.tolist())
        zeros = [0.0] * units.out.size
        out_re.extend(zeros if imag else units.out.tolist())
        out_im.extend(units.out.tolist() if imag else zeros)
        constant += 1j * units.const if imag else units.const
        bound += units.error_bound

    if rows:
        net = LayeredNet(
            d=d,
            layers=[Layer(A=[r.tolist() for r in rows], b=biases, act=sigma)],
            out_re=out_re,
            out_im=out_im,
            c_re=constant.real,
            c_im=constant.imag,
        )
    else:
        net = LayeredNet(d=d, layers=[], out_re=[0.0] * d, c_re=constant.real, c_im=constant.imag)
    probe = grid_sup_error(fn, net, _probe_domain(K_norm, d, K_radius), config.verify_points,
                           refine_points=config.refine_points, seed=config.seed)
    unit_bound = resynthesis_unit_bound(fn, sigma, K_radius, eps, K_norm=K_norm)
    logger.info(
        "resynthesized %d atoms into %d %s units (bound %d)",
        fn.atom_count, len(rows), sigma.kind, unit_bound,
    )
    cert = Certificate(
        pipeline="resynthesis",
        eps=eps,
        V=float(radii.max(initial=0.0)),
        B=float(np.abs(fn.coeffs).max(initial=0.0)),
        atoms=fn.atom_count,
        units=len(rows),
        predicted_error=bound,
        measured_error=probe.value,
        schedule=config.schedule,
        constants={
            "nu": sigma.resynthesis_rate,
            "mass": fn.mass,
            "unit_bound": float(unit_bound),
            "K_radius": K_radius,
        },
    )
    return net, cert


# ---------------------------------------------------------------------------
# Multi-layer compiler
# ---------------------------------------------------------------------------


def _check_normalised(net: LayeredNet) -> None:
    tol = 1e-12
    for k, ((A, b), layer) in enumerate(zip(net.matrices, net.layers, strict=True), start=1):
        row_sum = float(np.abs(A).sum(axis=1).max())
        if row_sum > 1.0 + tol:
            raise NormalizationError(f"rescale A of layer {k}: ‖A‖_∞ = {row_sum:.6g} > 1")
        if np.any(b != 0.0):
            raise NormalizationError(f"set the biases of layer {k} to zero")
        for act in layer.activations():
            if act.is_complex:
                raise NormalizationError(f"layer {k} has a complex activation; use real ones")
            if act.lipschitz > 1.0 / 6.0 + tol:
                raise NormalizationError(
                    f"rescale the activation of layer {k}: Lipschitz {act.lipschitz:.6g} > 1/6"
                )
            if abs(float(np.asarray(act(np.zeros(1)))[0])) > tol:
                raise NormalizationError(f"shift the activation of layer {k} so that σ(0) = 0")
    readout = float(np.abs(net.output_weights).sum())
    if readout > 1.0 + tol:
        raise NormalizationError(f"rescale the output weights: ‖a‖₁ = {readout:.6g} > 1")


def compile_deep(
    net: LayeredNet,
    eps: float,
    atom_cap: int | None = None,
    *,
    config: CompileConfig | None = None,
) -> tuple[FourierNet, Certificate]:
    """Compile an L-hidden-layer net on ``[−1, 1]^d`` into a Fourier net.

    The first layer is fitted with Fejér means; each deeper unit with a
    Chebyshev interpolant of its activation composed with the Fourier net of
    its pre-activation.  The error recursion is
    ``e_k = e_cheb + e_prune + Lip·Σ_j |A_ij|·e_{k−1,j}``.

    Raises:
        NormalizationError: Unless every activation is real, (1/6)-Lipschitz
            with ``σ(0) = 0``, every ``‖A‖_∞ <= 1``, biases vanish and
            ``‖a‖₁ <= 1``.
        BudgetExceededError: On atom or degree caps.
    """
    config = config or CompileConfig()
    cap = atom_cap or config.atom_cap
    if eps <= 0.0:
        raise DomainError(f"eps must be positive, got {eps}")
    L = depth(net)
    if L == 0:
        raise PreconditionError("need at least one hidden layer")
    _check_normalised(net)
    d, d_first = net.d, net.widths[0]
    closed = config.schedule == "closed_form"
    n_first = _ceil_budget(config.first_layer_constant**2 * (1.0 + 4.0 / eps**2))
    degree = deep_schedule_degree(L, eps)
    cert = Certificate(
        pipeline="deep",
        eps=eps,
        n=n_first,
        m=degree,
        p=d_first,
        log2_N=multilayer_log2_atoms(L, n_first, d_first, [degree] * (L - 1)),
        schedule=config.schedule,
        constants={
            "L": float(L),
            "lemma_degree": float(multilayer_degree(L, eps)),
            "schedule_degree": float(degree),
            "first_layer_constant": config.first_layer_constant,
        },
    )
    if closed and cert.log2_N > math.log2(cap):
        raise BudgetExceededError(
            f"multi-layer budget 2^{cert.log2_N:.4g} atoms exceeds the cap {cap}", certificate=cert
        )
    pf = 0.0 if closed else config.prune_fraction
    own_first = eps if L == 1 else config.eps_split * eps
    own_deep = 0.0 if L == 1 else (1.0 - config.eps_split) * eps / (L - 1)

    A1, _ = net.matrices[0]
    orders = [max(n_first, 2)] if closed else _orders(
        config.min_inner_degree, min(config.max_inner_degree, max(n_first, config.min_inner_degree))
    )
    ys: list[FourierNet] = []
    errs: list[float] = []
    sups: list[float] = []
    n_used = 0
    for i, (row, act) in enumerate(zip(A1, net.layers[0].activations(), strict=True)):
        rho = float(np.abs(row).sum())
        sups.append(act.sup_on(-rho, rho).value)
        if rho == 0.0:
            ys.append(FourierNet.zero(d))
            errs.append(0.0)
            continue
        fit = _fejer_ladder(act, act.lipschitz_on(-rho, rho), rho, row,
                            math.inf if closed else own_first, pf * own_first, orders)
        if fit is None:
            raise BudgetExceededError(
                f"first-layer unit {i} misses {own_first:.3g}", certificate=cert
            )
        ys.append(fit.net)
        errs.append(fit.error)
        n_used = max(n_used, fit.order)

    m_used = 0
    degrees = [degree] if closed else _degrees(max(min(config.max_outer_degree, degree), 1))
    try:
        for k in range(1, L):
            A, _ = net.matrices[k]
            new_ys, new_errs, new_sups = [], [], []
            for i, (row, act) in enumerate(zip(A, net.layers[k].activations(), strict=True)):
                weights = np.abs(row)
                P = float(weights @ np.asarray(sups))
                e_pre = float(weights @ np.asarray(errs))
                a, b = _widen(-(P + e_pre), P + e_pre)
                lip = act.lipschitz_on(a, b)
                fit = _cheb_ladder(act, a, b, lip, 1.0,
                                   math.inf if closed else (1.0 - pf) * own_deep, degrees)
                if fit is None:
                    raise BudgetExceededError(
                        f"layer {k + 1} unit {i} misses {own_deep:.3g}", certificate=cert
                    )
                z = fn_linear_combine(row.tolist(), ys)
                y, dropped = fn_compose_poly_pruned(
                    fit.poly, z, prune_budget=pf * own_deep, atom_cap=cap
                )
                new_ys.append(y)
                new_errs.append(fit.error + dropped + lip * e_pre)
                new_sups.append(act.sup_on(-P, P).value)
                m_used = max(m_used, fit.degree)
            ys, errs, sups = new_ys, new_errs, new_sups
        fn = fn_linear_combine(
            [*net.output_weights.tolist(), 1.0], [*ys, FourierNet.constant(net.output_bias, d)]
        )
    except BudgetExceededError as exc:
        if exc.certificate is not None:
            raise
        raise BudgetExceededError(str(exc), certificate=cert) from exc
    predicted = float(np.abs(net.output_weights) @ np.asarray(errs))
    probe = grid_sup_error(net, fn, ProbeDomain(kind="box", d=d, radius=1.0), config.verify_points,
                           refine_points=config.refine_points, seed=config.seed)
    logger.info("deep L=%d compiled: %d atoms, certified %.3g, measured %.3g",
                L, fn.atom_count, predicted, probe.value)
    return fn, cert.model_copy(
        update={
            "n_used": n_used,
            "m_used": m_used,
            "atoms": fn.atom_count,
            "predicted_error": predicted,
            "measured_error": probe.value,
        }
    )


# ---------------------------------------------------------------------------
# Oscillatory target
# ---------------------------------------------------------------------------


def oscillatory_q_tilde(alpha: float, d: int, N: int, r: float, gamma: float) -> float:
    """``Q̃ = (2αdN²/(r²γ²))^{1/3}``, the truncation radius minimising the error shape."""
    return float((2.0 * alpha * d * N * N / (r * r * gamma * gamma)) ** (1.0 / 3.0))


def _trivial_oscillatory(d: int, notes: list[str]) -> tuple[LayeredNet, Certificate]:
    net = LayeredNet(d=d, layers=[], out_re=[0.0] * d, c_re=1.0)
    return net, Certificate(
        pipeline="oscillatory", eps=0.0, predicted_error=0.0, notes=notes
    )


def compile_oscillatory(
    r: float,
    v: Sequence[float],
    w: Sequence[float],
    sigma: Activation,
    N_units: int,
    *,
    window: Window | None = None,
) -> tuple[LayeredNet, Certificate]:
    """Two-hidden-layer σ-network for ``x -> exp(2πi·r·(vᵀx + wᵀx₊))``.

    The first layer computes ``(x, x₊)``; the second interpolates
    ``s -> exp(2πirs)`` on ``[−Q, Q]`` with *N_units* σ units, where
    ``Q = γ·Q̃`` and ``γ = ‖v‖₁ + ‖w‖₁``.  The certificate's
    ``predicted_error`` bounds the ``L²(φ²)`` error:
    ``sqrt(e_sup² + (2 + e_sup)²·P(‖x‖_∞ > Q̃))`` with
    ``P(|x_j| > Q̃) <= α/Q̃`` from the window decay constant α.

    Raises:
        BudgetExceededError: If ``N_units <= r·γ``.
    """
    if len(v) != len(w):
        raise ShapeError(f"v and w differ in length: {len(v)} != {len(w)}")
    if r < 0.0:
        raise DomainError(f"r must be >= 0, got {r}")
    d = len(v)
    gamma = float(np.abs(v).sum() + np.abs(w).sum())
    if r == 0.0 or gamma == 0.0:
        return _trivial_oscillatory(d, ["target is the constant 1"])
    window = window or Window.sinc2()
    alpha = window.decay_alpha
    budget_cert = Certificate(
        pipeline="oscillatory", eps=0.0, units=N_units,
        constants={"r": r, "gamma_l1": gamma, "alpha": alpha, "d": float(d)},
    )
    if N_units <= r * gamma:
        raise BudgetExceededError(
            f"N_units = {N_units} must exceed r·(‖v‖₁ + ‖w‖₁) = {r * gamma:.6g}",
            certificate=budget_cert,
        )
    q_tilde = oscillatory_q_tilde(alpha, d, N_units, r, gamma)
    Q = gamma * q_tilde
    lip = 2.0 * math.pi * r
    cos_units = interpolating_units(
        functools.partial(_cos_of, omega=lip), sigma, lip, Q, 1.0, units=N_units
    )
    sin_units = interpolating_units(
        functools.partial(_sin_of, omega=lip), sigma, lip, Q, 1.0, units=N_units
    )
    vw = np.concatenate([np.asarray(v, dtype=float), np.asarray(w, dtype=float)])
    eye = np.eye(d)
    first = Layer(
        A=np.vstack([eye, eye]).tolist(),
        b=[0.0] * (2 * d),
        act=[Activation.identity()] * d + [Activation.relu()] * d,
    )
    second = Layer(
        A=np.outer(cos_units.inner, vw).tolist(),
        b=cos_units.bias.tolist(),
        act=sigma,
    )
    net = LayeredNet(
        d=d,
        layers=[first, second],
        out_re=cos_units.out.tolist(),
        out_im=sin_units.out.tolist(),
        c_re=cos_units.const,
        c_im=sin_units.const,
    )
    units = cos_units.out.size
    if sigma.kind in ("relu", "abs"):
        h = 2.0 * Q / max(units - 1, 1)
        e_sup = math.sqrt(2.0) * min(lip * h / 2.0, lip * lip * h * h / 8.0)
    else:
        e_sup = math.sqrt(2.0) * cos_units.error_bound
    e_sup = min(e_sup, 1.0 + math.sqrt(2.0))
    outside = min(1.0, 1.0 - (1.0 - min(1.0, alpha / q_tilde)) ** d)
    predicted = math.sqrt(e_sup**2 + (2.0 + e_sup) ** 2 * outside)
    shape = 4.0 * q_tilde**2 * gamma**2 * r**2 / N_units**2 + 16.0 * alpha * d / q_tilde
    logger.info(
        "oscillatory d=%d r=%g N=%d: Q~=%.4g predicted L2 error %.3g",
        d, r, N_units, q_tilde, predicted,
    )
    cert = budget_cert.model_copy(
        update={
            "eps": predicted,
            "units": units,
            "predicted_error": predicted,
            "constants": {
                **budget_cert.constants,
                "Q_tilde": q_tilde,
                "Q": Q,
                "e_sup": e_sup,
                "tail_mass": outside,
                "proof_shape": shape,
            },
        }
    )
    return net, cert


def oscillatory_budget(
    r: float, v: Sequence[float], w: Sequence[float], eps: float, *, K_radius: float = 1.0
) -> Certificate:
    """Closed-form Fourier-net budget for the oscillatory target on a ball."""
    return closed_form_certificate(oscillatory_net(r, v, w), K_radius, eps)


# ---------------------------------------------------------------------------
# Radial and Gaussian specialisations
# ---------------------------------------------------------------------------


def _radial_profile(t: Any, phi: RealFunction) -> Any:
    return phi(np.sqrt(np.maximum(np.asarray(t, dtype=float), 0.0)))


def _radial_target(
    phi: RealFunction, d: int, lipschitz: float, outer: Activation | None
) -> TwoLayerTarget:
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    square = Activation.polynomial((0.0, 0.0, 1.0), interval=(-1.0, 1.0))
    eye = np.eye(d)
    inner = [InnerUnit(eye[j], 0.0, square) for j in range(d)]
    if outer is None:
        part = OuterPart(
            np.ones(d), 0.0, functools.partial(_radial_profile, phi=phi),
            functools.partial(_constant_holder, value=lipschitz), 0.5, 1.0 + 0j, 0, (0.0, 1.0),
        )
    else:
        part = OuterPart(
            np.ones(d), 0.0, outer, _activation_holder(outer), outer.holder_alpha,
            1.0 + 0j, 0, (0.0, 1.0),
        )
    return TwoLayerTarget(d, inner, [part])


def compile_radial(
    phi: RealFunction,
    d: int,
    eps: float,
    atom_cap: int | None = None,
    *,
    lipschitz: float = 1.0,
    outer: Activation | None = None,
    config: CompileConfig | None = None,
) -> tuple[FourierNet, Certificate]:
    """Compile ``x -> φ(‖x‖)`` on the unit ball as ``g(Σ_i x_i²)``.

    ``g(t) = φ(√t₊)`` is ``(L_φ, 1/2)``-Hölder; when ``g`` is known to be a
    simpler activation (e.g. the identity for ``φ(t) = t²``) pass it as
    *outer*.
    """
    config = config or CompileConfig()
    target = _radial_target(phi, d, lipschitz, outer)
    return _compile_target(target, 1.0, "l2", eps, atom_cap or config.atom_cap, config, "radial")


def radial_budget(d: int, eps: float, *, lipschitz: float = 1.0) -> Certificate:
    """Closed-form budgets of the radial compiler (log₂ N ~ ε⁻⁵·log(d/ε))."""
    if eps <= 0.0:
        raise DomainError(f"eps must be positive, got {eps}")
    target = _radial_target(np.abs, d, lipschitz, None)
    return _certificate(target, 1.0, "l2", eps, "radial", "closed_form")


def _tail_radius(sigma: float, eps: float, amplitude: float) -> float:
    """Smallest t with ``exp(−t²/(4σ²))·amplitude <= eps/2``."""
    ratio = 2.0 * amplitude / eps
    return 2.0 * sigma * math.sqrt(math.log(ratio)) if ratio > 1.0 else 0.0


def compile_gaussian(
    net: LayeredNet,
    eps: float,
    atom_cap: int | None = None,
    *,
    sigma: float | None = None,
    samples: int = 20_000,
    config: CompileConfig | None = None,
) -> tuple[FourierNet, Certificate]:
    """Compile for the ``L²(N(0, σ²I))`` metric, ``σ = d^{−1/2}`` by default.

    The net is compiled in sup norm to ε/2 on the ball of radius
    ``σ√d + t`` where ``P{‖X‖ >= σ√d + t} <= exp(−t²/2σ²)`` keeps the
    outside contribution ``sqrt(P)·(Σ|u| + sup|f|)`` below ε/2; the result is
    then checked by Monte Carlo.

    Raises:
        PreconditionError: If an outer activation is unbounded on ℝ.
        BudgetExceededError: If the radius search does not settle.
    """
    config = config or CompileConfig()
    cap = atom_cap or config.atom_cap
    if eps <= 0.0:
        raise DomainError(f"eps must be positive, got {eps}")
    target = two_layer_target(net)
    d = net.d
    s = sigma if sigma is not None else d**-0.5
    sup_f = sum(abs(part.gamma) * part.sup for part in target.outer) + abs(target.constant)
    if not math.isfinite(sup_f):
        raise PreconditionError("compile_gaussian needs bounded outer activations")
    mass = 2.0 * sup_f
    ball_cert: Certificate | None = None
    for _ in range(_MAX_TAIL_ROUNDS):
        t = _tail_radius(s, eps, mass + sup_f)
        radius = s * math.sqrt(d) + t
        fn, ball_cert = _compile_target(target, radius, "l2", eps / 2.0, cap, config, "gaussian")
        tail = math.sqrt(gaussian_tail_bound(d, s, t)) * (fn.mass + sup_f)
        logger.debug("gaussian radius %.4g: tail term %.3g", radius, tail)
        if tail <= eps / 2.0:
            break
        mass = fn.mass
    else:
        raise BudgetExceededError("Gaussian tail radius did not settle", certificate=ball_cert)
    sampler = Sampler(SamplerConfig(kind="gaussian", d=d, sigma=s, seed=config.seed))
    mc = mc_l2_error(target, fn, sampler, samples)
    w_l1 = max((float(np.abs(u.direction).sum()) for u in target.inner), default=0.0)
    budget = gaussian_l2_budget(
        d, w_l1, min(eps, 0.999),
        p=max(len(target.inner), 1), K=config.gaussian_K, s=config.gaussian_s,
    )
    return fn, ball_cert.model_copy(
        update={
            "eps": eps,
            "predicted_error": (ball_cert.predicted_error or 0.0) + tail,
            "measured_error": mc.estimate,
            "constants": {
                **ball_cert.constants,
                "sigma": s,
                "t": t,
                "radius": radius,
                "tail_term": tail,
                "mc_std_error": mc.std_error,
                "gaussian_log2_N": budget.log2,
            },
        }
    )
