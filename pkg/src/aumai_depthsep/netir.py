"""Feed-forward network representation, evaluation and size metrics.

A :class:`LayeredNet` is the recursion ``x(0) = x``,
``x(k) = σ(k)(A(k) x(k-1) + b(k))`` followed by a complex linear read-out.
Activations carry the constants the compilers consume (Lipschitz and Hölder
constants, the resynthesis rate ν_σ) as declared metadata.
"""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Callable, Sequence
from typing import Any, Literal, NamedTuple

import numpy as np
import numpy.typing as npt
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PrivateAttr,
    field_validator,
    model_validator,
)
from scipy.special import expit

from aumai_depthsep.errors import CapabilityError, DomainError, ShapeError

__all__ = [
    "ActivationKind",
    "Activation",
    "Layer",
    "LayeredNet",
    "SupBound",
    "RidgeUnits",
    "eval_net",
    "size_metric",
    "width",
    "depth",
    "weight_norm",
    "resynthesis_budget",
    "interpolating_units",
    "resynthesize_1d",
    "oscillatory_net",
    "load_net",
    "dump_net",
    "ceil_snapped",
]

logger = logging.getLogger(__name__)

ActivationKind = Literal[
    "relu",
    "abs",
    "sigmoid",
    "cosine",
    "sine",
    "complex_exp",
    "polynomial",
    "piecewise_linear",
]

FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]

# Default ν_σ per kind; only kinds with a constructive resynthesis get one.
_DEFAULT_RESYNTHESIS_RATE: dict[str, float] = {
    "relu": 2.0,
    "abs": 2.0,
    "sigmoid": 3.0,
}

# Steepness of sigmoid steps, in units of the inverse knot spacing.
_SIGMOID_STEEPNESS = 20.0


def ceil_snapped(value: float, rel_tol: float = 1e-12) -> int:
    """Ceiling that ignores floating-point round-off just above an integer.

    ``4 / 0.1**3`` evaluates to ``3999.9999999999995``; the closed-form budgets
    are stated for exact arithmetic, so values within *rel_tol* of an integer
    snap to it before the ceiling is taken.
    """
    nearest = round(value)
    if abs(value - nearest) <= rel_tol * max(1.0, abs(value)):
        return int(nearest)
    return math.ceil(value)


class SupBound(NamedTuple):
    """Upper bound on ``sup |σ|`` over an interval.

    ``resolution`` is 0.0 when the value is analytic, otherwise the grid
    spacing used to obtain it.
    """

    value: float
    resolution: float


# ---------------------------------------------------------------------------
# Activation
# ---------------------------------------------------------------------------


class Activation(BaseModel):
    """A scalar activation with declared regularity metadata.

    ``scale`` multiplies the output, so ``Activation.relu(scale=1/6)`` is the
    (1/6)-Lipschitz ReLU used by the multi-layer compiler.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: ActivationKind
    rate: float = 0.0
    coeffs: tuple[float, ...] = ()
    knots: tuple[tuple[float, float], ...] = ()
    scale: float = 1.0
    lipschitz: float = Field(default=-1.0)
    holder_alpha: float = Field(default=1.0, gt=0.0, le=1.0)
    resynthesis_rate: float = Field(default=1.0, gt=0.0)
    interval: tuple[float, float] = (-1.0, 1.0)

    @field_validator("knots")
    @classmethod
    def validate_knots(
        cls, value: tuple[tuple[float, float], ...]
    ) -> tuple[tuple[float, float], ...]:
        """Knots must be strictly increasing in x."""
        xs = [x for x, _ in value]
        if any(b <= a for a, b in zip(xs, xs[1:], strict=False)):
            raise ValueError("piecewise_linear knots must be strictly increasing in x")
        return value

    @model_validator(mode="before")
    @classmethod
    def fill_defaults(cls, data: Any) -> Any:
        """Derive the Lipschitz constant and ν_σ when they are not declared."""
        if not isinstance(data, dict):
            return data
        data = dict(data)
        kind = data.get("kind")
        if kind == "piecewise_linear" and len(data.get("knots", ())) < 2:
            raise ValueError("piecewise_linear needs at least two knots")
        if kind == "polynomial" and not data.get("coeffs"):
            raise ValueError("polynomial activation needs coefficients")
        if data.get("lipschitz", -1.0) is None or data.get("lipschitz", -1.0) < 0.0:
            data["lipschitz"] = _default_lipschitz(data)
        if "resynthesis_rate" not in data and kind in _DEFAULT_RESYNTHESIS_RATE:
            data["resynthesis_rate"] = _DEFAULT_RESYNTHESIS_RATE[kind]
        return data

    # -- factories ---------------------------------------------------------

    @classmethod
    def relu(cls, scale: float = 1.0) -> Activation:
        return cls(kind="relu", scale=scale)

    @classmethod
    def absolute(cls, scale: float = 1.0) -> Activation:
        return cls(kind="abs", scale=scale)

    @classmethod
    def sigmoid(cls, scale: float = 1.0) -> Activation:
        return cls(kind="sigmoid", scale=scale)

    @classmethod
    def cosine(cls, scale: float = 1.0) -> Activation:
        return cls(kind="cosine", scale=scale)

    @classmethod
    def sine(cls, scale: float = 1.0) -> Activation:
        return cls(kind="sine", scale=scale)

    @classmethod
    def complex_exp(cls, rate: float) -> Activation:
        """``t -> exp(2πi·rate·t)``."""
        return cls(kind="complex_exp", rate=rate)

    @classmethod
    def polynomial(
        cls, coeffs: Sequence[float], interval: tuple[float, float] = (-1.0, 1.0)
    ) -> Activation:
        """Polynomial with ascending coefficients, Lipschitz on *interval*."""
        return cls(kind="polynomial", coeffs=tuple(coeffs), interval=interval)

    @classmethod
    def identity(cls) -> Activation:
        return cls(kind="polynomial", coeffs=(0.0, 1.0))

    @classmethod
    def piecewise_linear(cls, knots: Sequence[tuple[float, float]]) -> Activation:
        """Linear interpolation through *knots*, constant outside them."""
        return cls(kind="piecewise_linear", knots=tuple((x, y) for x, y in knots))

    # -- evaluation --------------------------------------------------------

    @property
    def is_complex(self) -> bool:
        return self.kind == "complex_exp"

    def __call__(self, t: npt.ArrayLike) -> npt.NDArray[Any]:
        """Evaluate elementwise."""
        arr = np.asarray(t, dtype=float)
        if self.kind == "relu":
            out: npt.NDArray[Any] = np.maximum(arr, 0.0)
        elif self.kind == "abs":
            out = np.abs(arr)
        elif self.kind == "sigmoid":
            out = expit(arr)
        elif self.kind == "cosine":
            out = np.cos(arr)
        elif self.kind == "sine":
            out = np.sin(arr)
        elif self.kind == "complex_exp":
            out = np.exp(2j * np.pi * self.rate * arr)
        elif self.kind == "polynomial":
            out = np.polynomial.polynomial.polyval(arr, self.coeffs)
        else:
            xs = np.array([x for x, _ in self.knots])
            ys = np.array([y for _, y in self.knots])
            out = np.interp(arr, xs, ys)
        if self.scale != 1.0:
            out = self.scale * out
        return out

    def lipschitz_on(self, lo: float, hi: float) -> float:
        """Lipschitz constant valid on ``[lo, hi]``.

        Only polynomials depend on the interval; every other kind returns the
        declared global constant.
        """
        if self.kind != "polynomial":
            return self.lipschitz
        radius = max(abs(lo), abs(hi))
        return abs(self.scale) * sum(
            k * abs(c) * radius ** (k - 1) for k, c in enumerate(self.coeffs) if k
        )

    def modulus(self, delta: float, lo: float = -1.0, hi: float = 1.0) -> float:
        """Modulus of continuity bound ω(δ) on ``[lo, hi]``.

        Lipschitz kinds give ``L·δ``; genuinely Hölder ones (``holder_alpha <
        1``) give ``δ**α`` from the (1, α)-Hölder declaration.
        """
        if delta <= 0.0:
            return 0.0
        if self.holder_alpha < 1.0:
            return float(delta**self.holder_alpha)
        return self.lipschitz_on(lo, hi) * delta

    def range_on(self, lo: float, hi: float) -> tuple[float, float]:
        """Exact ``(min σ, max σ)`` over ``lo <= t <= hi`` for real kinds.

        Raises:
            DomainError: For an empty interval.
            CapabilityError: For ``complex_exp``.
        """
        if hi < lo:
            raise DomainError(f"empty interval [{lo}, {hi}]")
        if self.kind == "complex_exp":
            raise CapabilityError("complex_exp has no real range")
        candidates = [lo, hi]
        if self.kind in ("relu", "abs") and lo < 0.0 < hi:
            candidates.append(0.0)
        elif self.kind in ("cosine", "sine"):
            shift = 0.0 if self.kind == "cosine" else math.pi / 2
            if hi - lo >= 2.0 * math.pi:
                candidates += [shift, shift + math.pi]
            else:
                first = math.ceil((lo - shift) / math.pi)
                last = math.floor((hi - shift) / math.pi)
                candidates += [shift + k * math.pi for k in range(first, last + 1)]
        elif self.kind == "polynomial":
            deriv = np.polynomial.polynomial.polyder(np.asarray(self.coeffs, float))
            if deriv.size > 1 and np.any(deriv):
                roots = np.atleast_1d(np.polynomial.polynomial.polyroots(deriv))
                candidates += [
                    float(z.real) for z in roots if abs(z.imag) < 1e-12 and lo <= z.real <= hi
                ]
        elif self.kind == "piecewise_linear":
            candidates += [x for x, _ in self.knots if lo <= x <= hi]
        values = np.asarray(self(np.asarray(candidates)), dtype=float)
        return float(values.min()), float(values.max())

    def sup_on(self, lo: float, hi: float) -> SupBound:
        """Bound ``sup |σ(t)|`` over ``lo <= t <= hi`` (analytic for every kind)."""
        if self.kind == "complex_exp":
            if hi < lo:
                raise DomainError(f"empty interval [{lo}, {hi}]")
            return SupBound(abs(self.scale), 0.0)
        low, high = self.range_on(lo, hi)
        return SupBound(max(abs(low), abs(high)), 0.0)


def _default_lipschitz(data: dict[str, Any]) -> float:
    kind = data.get("kind")
    scale = abs(float(data.get("scale", 1.0)))
    if kind in ("relu", "abs", "cosine", "sine"):
        return scale
    if kind == "sigmoid":
        return 0.25 * scale
    if kind == "complex_exp":
        return 2.0 * math.pi * abs(float(data.get("rate", 0.0))) * scale
    if kind == "polynomial":
        lo, hi = data.get("interval", (-1.0, 1.0))
        radius = max(abs(lo), abs(hi))
        coeffs = data.get("coeffs", ())
        return scale * sum(k * abs(c) * radius ** (k - 1) for k, c in enumerate(coeffs) if k)
    if kind == "piecewise_linear":
        knots = list(data.get("knots", ()))
        slopes = [
            abs((y1 - y0) / (x1 - x0))
            for (x0, y0), (x1, y1) in zip(knots, knots[1:], strict=False)
            if x1 > x0
        ]
        return scale * max(slopes, default=0.0)
    return 0.0


# ---------------------------------------------------------------------------
# LayeredNet
# ---------------------------------------------------------------------------


class Layer(BaseModel):
    """One hidden layer: ``σ(A x + b)`` with one activation per unit.

    ``act`` may be a single activation shared by all units.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    A: list[list[float]]
    b: list[float]
    act: Activation | list[Activation]

    @model_validator(mode="after")
    def validate_shapes(self) -> Layer:
        rows = len(self.A)
        if rows == 0:
            raise ValueError("a layer needs at least one unit")
        if len(self.b) != rows:
            raise ValueError(f"bias has {len(self.b)} entries for {rows} units")
        if len({len(row) for row in self.A}) != 1:
            raise ValueError("A must be rectangular")
        if isinstance(self.act, list) and len(self.act) != rows:
            raise ValueError(f"{len(self.act)} activations for {rows} units")
        return self

    @property
    def width(self) -> int:
        return len(self.A)

    @property
    def fan_in(self) -> int:
        return len(self.A[0])

    def activations(self) -> list[Activation]:
        """Per-unit activation list."""
        if isinstance(self.act, list):
            return list(self.act)
        return [self.act] * self.width


class LayeredNet(BaseModel):
    """Feed-forward network with complex output weights.

    JSON layout: ``{"d", "layers": [{"A", "b", "act"}], "out_re", "out_im"}``
    with optional output bias ``c_re``/``c_im``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    d: int = Field(gt=0)
    layers: list[Layer]
    out_re: list[float]
    out_im: list[float] = Field(default_factory=list)
    c_re: float = 0.0
    c_im: float = 0.0

    _matrices: list[tuple[FloatArray, FloatArray]] = PrivateAttr(default_factory=list)
    _groups: list[list[tuple[Activation, npt.NDArray[np.intp]]]] = PrivateAttr(
        default_factory=list
    )
    _readout: ComplexArray = PrivateAttr(default_factory=lambda: np.zeros(0, dtype=complex))

    @model_validator(mode="after")
    def validate_chain(self) -> LayeredNet:
        fan_in = self.d
        for k, layer in enumerate(self.layers):
            if layer.fan_in != fan_in:
                raise ValueError(
                    f"layer {k} expects input dimension {layer.fan_in}, got {fan_in}"
                )
            fan_in = layer.width
        if len(self.out_re) != fan_in:
            raise ValueError(f"out_re has {len(self.out_re)} entries, expected {fan_in}")
        if self.out_im and len(self.out_im) != fan_in:
            raise ValueError(f"out_im has {len(self.out_im)} entries, expected {fan_in}")
        return self

    def model_post_init(self, context: Any, /) -> None:
        self._matrices = [
            (np.asarray(layer.A, dtype=float), np.asarray(layer.b, dtype=float))
            for layer in self.layers
        ]
        self._groups = [_group_units(layer.activations()) for layer in self.layers]
        re = np.asarray(self.out_re, dtype=float)
        im = np.asarray(self.out_im, dtype=float) if self.out_im else np.zeros_like(re)
        self._readout = re + 1j * im

    @property
    def matrices(self) -> list[tuple[FloatArray, FloatArray]]:
        """``(A, b)`` arrays per layer."""
        return self._matrices

    @property
    def output_weights(self) -> ComplexArray:
        return self._readout

    @property
    def output_bias(self) -> complex:
        return complex(self.c_re, self.c_im)

    @property
    def widths(self) -> list[int]:
        return [layer.width for layer in self.layers]

    def hidden(self, x: npt.ArrayLike) -> list[npt.NDArray[Any]]:
        """Post-activation values of every hidden layer for a batch ``(n, d)``."""
        h: npt.NDArray[Any] = np.asarray(x)
        values: list[npt.NDArray[Any]] = []
        for (A, b), groups in zip(self._matrices, self._groups, strict=True):
            pre = h @ A.T + b
            if len(groups) == 1:
                h = groups[0][0](pre)
            else:
                post = np.empty(pre.shape, dtype=complex if _any_complex(groups, pre) else float)
                for act, idx in groups:
                    post[:, idx] = act(pre[:, idx])
                h = post
            values.append(h)
        return values

    def __call__(self, x: npt.ArrayLike) -> complex | ComplexArray:
        return eval_net(self, x)


def _group_units(acts: list[Activation]) -> list[tuple[Activation, npt.NDArray[np.intp]]]:
    groups: dict[Activation, list[int]] = {}
    for i, act in enumerate(acts):
        groups.setdefault(act, []).append(i)
    return [(act, np.asarray(idx, dtype=np.intp)) for act, idx in groups.items()]


def _any_complex(
    groups: list[tuple[Activation, npt.NDArray[np.intp]]], pre: npt.NDArray[Any]
) -> bool:
    return np.iscomplexobj(pre) or any(act.is_complex for act, _ in groups)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def eval_net(net: LayeredNet, x: npt.ArrayLike) -> complex | ComplexArray:
    """Evaluate *net* at a point ``(d,)`` or a batch ``(n, d)``.

    Raises:
        ShapeError: If the trailing dimension of *x* is not ``net.d``.
    """
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    batch = arr.reshape(1, -1) if single else arr
    if batch.ndim != 2 or batch.shape[1] != net.d:
        raise ShapeError(f"expected input of dimension {net.d}, got shape {arr.shape}")
    top = net.hidden(batch)[-1] if net.layers else batch
    out: ComplexArray = top @ net.output_weights + net.output_bias
    if single:
        return complex(out[0])
    return out


def size_metric(net: LayeredNet) -> int:
    """Total number of hidden units."""
    return sum(net.widths)


def width(net: LayeredNet) -> int:
    return max(net.widths, default=0)


def depth(net: LayeredNet) -> int:
    return len(net.layers)


def weight_norm(net: LayeredNet, p: float = math.inf) -> float:
    """``max_{k,i} ‖(a_{k,i}, b_{k,i})‖_p`` over all layers, read-out included.

    Biases enter as an appended coordinate; the read-out row uses moduli of
    the complex weights with the output bias appended.
    """
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    best = 0.0
    for A, b in net.matrices:
        rows = np.hstack([A, b[:, None]])
        best = max(best, float(np.linalg.norm(rows, ord=p, axis=1).max()))
    readout = np.append(np.abs(net.output_weights), abs(net.output_bias))
    return max(best, float(np.linalg.norm(readout, ord=p)))


def resynthesis_budget(activation: Activation, L: float, R: float, eps: float) -> int:
    """Unit budget ``⌈ν_σ·L·R/ε⌉`` for an L-Lipschitz function constant off [−R, R].

    Raises:
        DomainError: If ``eps``, ``L`` or ``R`` is not positive.
    """
    if eps <= 0.0:
        raise DomainError(f"eps must be positive, got {eps}")
    if L <= 0.0 or R <= 0.0:
        raise DomainError(f"L and R must be positive, got L={L}, R={R}")
    return ceil_snapped(activation.resynthesis_rate * L * R / eps)


class RidgeUnits(NamedTuple):
    """A 1-D σ-network ``const + Σ_i out_i σ(inner_i·t + bias_i)``."""

    inner: FloatArray
    bias: FloatArray
    out: FloatArray
    const: float
    error_bound: float


def interpolating_units(
    f: Callable[[FloatArray], npt.ArrayLike],
    activation: Activation,
    L: float,
    R: float,
    eps: float,
    *,
    units: int | None = None,
) -> RidgeUnits:
    """Build a 1-D σ-network approximating an L-Lipschitz function.

    The target is sampled on a uniform grid of ``[−R, R]`` and rebuilt as a
    piecewise-linear interpolant (relu, abs) or a smoothed staircase
    (sigmoid); both are constant outside the grid.  The returned
    ``error_bound`` is at most ``eps`` for any L-Lipschitz ``f``.
    Passing *units* fixes the unit count instead; the bound then follows from the count.

    Raises:
        CapabilityError: For activations without a constructive rebuild.
    """
    if activation.kind not in _DEFAULT_RESYNTHESIS_RATE or activation.scale == 0.0:
        raise CapabilityError(f"no constructive resynthesis for activation {activation.kind!r}")
    budget = resynthesis_budget(activation, L, R, eps)
    scale = activation.scale
    if activation.kind in ("relu", "abs"):
        if units is None:
            intervals = max(budget - 1, ceil_snapped(L * R / eps), 1)
        else:
            intervals = max(units - 1, 1)
        knots = np.linspace(-R, R, intervals + 1)
        values = _sample(f, knots)
        slopes = np.diff(values) / (knots[1] - knots[0])
        jumps = np.diff(np.concatenate([[0.0], slopes, [0.0]]))
        error = L * R / intervals
        if activation.kind == "relu":
            return RidgeUnits(
                np.ones_like(knots), -knots, jumps / scale, float(values[0]), error
            )
        # relu(z) = (|z| + z)/2 and the slope jumps sum to zero.
        const = float(values[0] - 0.5 * np.dot(jumps, knots))
        return RidgeUnits(np.ones_like(knots), -knots, 0.5 * jumps / scale, const, error)
    if units is None:
        steps = max(budget, ceil_snapped(2.002 * L * R / eps), 1)
    else:
        steps = max(units, 1)
    knots = np.linspace(-R, R, steps + 1)
    values = _sample(f, knots)
    h = knots[1] - knots[0]
    steepness = _SIGMOID_STEEPNESS / h
    midpoints = 0.5 * (knots[:-1] + knots[1:])
    error = 1.001 * L * h
    return RidgeUnits(
        np.full(steps, steepness),
        -steepness * midpoints,
        np.diff(values) / scale,
        float(values[0]),
        error,
    )


def _sample(f: Callable[[FloatArray], npt.ArrayLike], t: FloatArray) -> FloatArray:
    values = np.broadcast_to(np.asarray(f(t), dtype=float), t.shape).astype(float)
    if not np.all(np.isfinite(values)):
        raise DomainError("target function returned non-finite samples")
    return values


def resynthesize_1d(
    f: Callable[[FloatArray], npt.ArrayLike],
    activation: Activation,
    L: float,
    R: float,
    eps: float,
) -> LayeredNet:
    """One-hidden-layer σ-network on ℝ approximating *f* within *eps* on [−R, R]."""
    units = interpolating_units(f, activation, L, R, eps)
    logger.debug(
        "resynthesized %s with %d units (bound %.3g)",
        activation.kind,
        units.out.size,
        units.error_bound,
    )
    return LayeredNet(
        d=1,
        layers=[
            Layer(
                A=[[float(a)] for a in units.inner],
                b=[float(b) for b in units.bias],
                act=activation,
            )
        ],
        out_re=[float(u) for u in units.out],
        c_re=units.const,
    )


def oscillatory_net(r: float, v: Sequence[float], w: Sequence[float]) -> LayeredNet:
    """Exact two-hidden-layer net for ``x -> exp(2πi r (vᵀx + wᵀx₊))``."""
    if len(v) != len(w):
        raise ShapeError(f"v and w differ in length: {len(v)} != {len(w)}")
    d = len(v)
    eye = np.eye(d)
    first = Layer(
        A=np.vstack([eye, eye]).tolist(),
        b=[0.0] * (2 * d),
        act=[Activation.identity()] * d + [Activation.relu()] * d,
    )
    second = Layer(
        A=[[float(t) for t in v] + [float(t) for t in w]],
        b=[0.0],
        act=Activation.complex_exp(r),
    )
    return LayeredNet(d=d, layers=[first, second], out_re=[1.0], out_im=[0.0])


def load_net(text: str) -> LayeredNet:
    """Parse a network JSON document."""
    return LayeredNet.model_validate_json(text)


def dump_net(net: LayeredNet) -> str:
    """Serialise *net*; floats use shortest round-trip repr, so it is lossless."""
    payload = net.model_dump(mode="json", exclude_defaults=False)
    return json.dumps(payload, sort_keys=True)
