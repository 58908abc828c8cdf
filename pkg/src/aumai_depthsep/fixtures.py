"""Ready-made networks, targets and windows.

Factory functions return small, deterministic objects that every compiler
and certificate in the package accepts, so demos and tests can start from a
known-good input::

    from aumai_depthsep.fixtures import toy_two_layer_net
    from aumai_depthsep.shallowify import compile_two_layer

    fn, cert = compile_two_layer(toy_two_layer_net(), 1.0, 0.5)
"""

from __future__ import annotations

import numpy as np

from aumai_depthsep.errors import DomainError
from aumai_depthsep.netir import Activation, Layer, LayeredNet, dump_net
from aumai_depthsep.spectral import OscillatoryTarget, Window, heavy_tail_target
from aumai_depthsep.sphere import RidgeMeasure, ZonalSeries, ZonalTerm, spread_frame

__all__ = [
    "toy_two_layer_net",
    "random_two_layer_net",
    "normalised_deep_net",
    "toy_abs_net",
    "frame_measure",
    "zonal_bump",
    "separation_target",
    "default_window",
    "sample_experiment_yaml",
    "toy_net_json",
]


# ---------------------------------------------------------------------------
# Two-hidden-layer nets
# ---------------------------------------------------------------------------


def toy_two_layer_net(d: int = 2) -> LayeredNet:
    """``sigmoid(½·Σ_j cos(x_j/2))`` on ℝ^d.

    Small inner weights keep the inner and outer Fejér/Chebyshev degrees
    low, so this compiles in well under a second for ``d <= 3``.
    """
    inner = Layer(
        A=(0.5 * np.eye(d)).tolist(),
        b=[0.0] * d,
        act=Activation.cosine(),
    )
    outer = Layer(A=[[0.5] * d], b=[0.0], act=Activation.sigmoid())
    return LayeredNet(d=d, layers=[inner, outer], out_re=[1.0])


def random_two_layer_net(
    d: int,
    p: int,
    m: int = 1,
    *,
    seed: int = 0,
    weight_scale: float = 0.5,
    inner: Activation | None = None,
    outer: Activation | None = None,
) -> LayeredNet:
    """Random net with ``p`` inner and ``m`` outer units.

    Inner rows are Gaussian rescaled to ℓ² norm *weight_scale*; outer rows
    are rescaled to ℓ¹ norm *weight_scale*; output weights have ℓ¹ norm 1.
    """
    if d < 1 or p < 1 or m < 1:
        raise DomainError(f"need d, p, m >= 1, got ({d}, {p}, {m})")
    rng = np.random.default_rng(seed)
    A1 = rng.standard_normal((p, d))
    A1 *= weight_scale / np.linalg.norm(A1, axis=1, keepdims=True)
    A2 = rng.standard_normal((m, p))
    A2 *= weight_scale / np.abs(A2).sum(axis=1, keepdims=True)
    a = rng.standard_normal(m)
    a /= np.abs(a).sum()
    return LayeredNet(
        d=d,
        layers=[
            Layer(A=A1.tolist(), b=[0.0] * p, act=inner or Activation.cosine()),
            Layer(A=A2.tolist(), b=[0.0] * m, act=outer or Activation.sigmoid()),
        ],
        out_re=a.tolist(),
    )


# ---------------------------------------------------------------------------
# Deep nets
# ---------------------------------------------------------------------------


def normalised_deep_net(d: int = 2, width: int = 2, L: int = 3, *, seed: int = 0) -> LayeredNet:
    """An L-hidden-layer net meeting the multi-layer compiler's normalisation.

    Activations are ``sin(t)/6``; rows have ℓ¹ norm 1, biases vanish and
    the output weights have ℓ¹ norm 1.
    """
    if L < 1:
        raise DomainError(f"L must be >= 1, got {L}")
    rng = np.random.default_rng(seed)
    act = Activation.sine(scale=1.0 / 6.0)
    layers: list[Layer] = []
    fan_in = d
    for _ in range(L):
        A = rng.standard_normal((width, fan_in))
        A /= np.abs(A).sum(axis=1, keepdims=True)
        layers.append(Layer(A=A.tolist(), b=[0.0] * width, act=act))
        fan_in = width
    a = rng.standard_normal(width)
    a /= np.abs(a).sum()
    return LayeredNet(d=d, layers=layers, out_re=a.tolist())


# ---------------------------------------------------------------------------
# Sphere objects
# ---------------------------------------------------------------------------


def toy_abs_net(d: int = 3, units: int = 4, *, seed: int = 0) -> LayeredNet:
    """Bias-free one-hidden-layer ``|wᵀx|`` network with unit-norm rows."""
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((units, d))
    A /= np.linalg.norm(A, axis=1, keepdims=True)
    weights = rng.uniform(-1.0, 1.0, units)
    return LayeredNet(
        d=d,
        layers=[Layer(A=A.tolist(), b=[0.0] * units, act=Activation.absolute())],
        out_re=weights.tolist(),
    )


def frame_measure(d: int, *, seed: int = 0) -> RidgeMeasure:
    """Equal-mass measure on the spread frame with random signs."""
    frame = spread_frame(d)
    signs = np.random.default_rng(seed).choice([-1.0, 1.0], size=frame.shape[0])
    return RidgeMeasure(frame, signs / frame.shape[0])


def zonal_bump(d: int = 3, k: int = 2, coeff: float = 1.0) -> ZonalSeries:
    """A single zonal harmonic along ``e₁``."""
    axis = np.zeros(d)
    axis[0] = 1.0
    return ZonalSeries(d, [ZonalTerm(k, axis, coeff)])


# ---------------------------------------------------------------------------
# Separation objects
# ---------------------------------------------------------------------------


def separation_target(d: int) -> OscillatoryTarget:
    """The canonical oscillatory target with ``r = d²``, ``v = 0``, ``w = 1``."""
    return heavy_tail_target(d)


def default_window() -> Window:
    """``sinc²`` window of unit bandwidth."""
    return Window.sinc2()


# ---------------------------------------------------------------------------
# Scaffolding documents
# ---------------------------------------------------------------------------


def toy_net_json(d: int = 2) -> str:
    """:func:`toy_two_layer_net` as a network JSON document."""
    return dump_net(toy_two_layer_net(d))


def sample_experiment_yaml(name: str = "oscillatory-demo") -> str:
    """A small oscillatory sweep config, suitable for ``bench``."""
    return f"""\
# Example experiment for aumai-depthsep
name: {name}
experiment: oscillatory
r: 1.0
gamma: 1.0
samples: 2048
sampler: product_sinc4
sweep:
  d: [2]
  N: [128, 512]
seeds: [0, 1]
output_dir: results
threads: 1
"""
