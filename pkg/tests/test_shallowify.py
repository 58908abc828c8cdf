"""Tests for aumai_depthsep.shallowify: budgets and the deep-to-shallow compilers."""

from __future__ import annotations

import math

import numpy as np
import pytest

from aumai_depthsep.errors import (
    BudgetExceededError,
    CapabilityError,
    DomainError,
    NormalizationError,
    PreconditionError,
    ShapeError,
)
from aumai_depthsep.fixtures import random_two_layer_net
from aumai_depthsep.fouriernet import FourierNet
from aumai_depthsep.models import CompileConfig
from aumai_depthsep.netir import Activation, LayeredNet, depth, oscillatory_net
from aumai_depthsep.shallowify import (
    BudgetBound,
    closed_form_certificate,
    compile_deep,
    compile_gaussian,
    compile_oscillatory,
    compile_radial,
    compile_two_layer,
    deep_schedule_degree,
    domain_constants,
    fixed_dimension_budget,
    gaussian_l2_budget,
    multilayer_degree,
    multilayer_log2_atoms,
    oscillatory_q_tilde,
    radial_budget,
    resynthesize,
    two_layer_target,
)

# ---------------------------------------------------------------------------
# Closed-form budgets
# ---------------------------------------------------------------------------


class TestBudgets:
    """Closed-form size bounds."""

    def test_multilayer_degree(self) -> None:
        assert multilayer_degree(3, 0.5) == 8
        assert multilayer_degree(1, 0.5) == 2
        with pytest.raises(DomainError):
            multilayer_degree(0, 0.5)

    def test_deep_schedule_degree(self) -> None:
        assert deep_schedule_degree(3, 0.5) == 9
        assert deep_schedule_degree(1, 0.5) == 0

    def test_multilayer_log2_atoms(self) -> None:
        assert multilayer_log2_atoms(2, 4, 2, [3]) == pytest.approx(15.0)

    def test_fixed_dimension_budget(self) -> None:
        bound = fixed_dimension_budget(1, 0.5)
        assert bound.log2 == pytest.approx(math.log2(130.0))
        assert bound.value == pytest.approx(130.0)

    def test_gaussian_budget(self) -> None:
        assert gaussian_l2_budget(1, 1.0, 0.5).log2 == pytest.approx(6.0 * math.log2(6.0))
        with pytest.raises(DomainError):
            gaussian_l2_budget(1, 1.0, 1.0)
        with pytest.raises(DomainError):
            gaussian_l2_budget(0, 1.0, 0.5)

    def test_huge_bound_has_infinite_value(self) -> None:
        assert BudgetBound(5000.0).value == math.inf

    def test_oscillatory_q_tilde(self) -> None:
        assert oscillatory_q_tilde(1.0, 2, 10, 1.0, 1.0) == pytest.approx(400.0 ** (1.0 / 3.0))


# ---------------------------------------------------------------------------
# Two-layer targets
# ---------------------------------------------------------------------------


class TestTwoLayerTarget:
    """Flattening and domain constants."""

    def test_target_matches_net(self, toy_net: LayeredNet, rng: np.random.Generator) -> None:
        target = two_layer_target(toy_net)
        x = rng.uniform(-1.0, 1.0, size=(32, 2))
        np.testing.assert_allclose(target(x), toy_net(x), atol=1e-12)

    def test_complex_outer_split(self, rng: np.random.Generator) -> None:
        net = oscillatory_net(1.0, [0.25, 0.25], [0.25, 0.25])
        target = two_layer_target(net)
        assert len(target.outer) == 2
        x = rng.uniform(-1.0, 1.0, size=(16, 2))
        np.testing.assert_allclose(target(x), net(x), atol=1e-12)

    def test_depth_precondition(self, deep_net: LayeredNet) -> None:
        with pytest.raises(PreconditionError):
            two_layer_target(deep_net)

    def test_hidden_shape_check(self, toy_net: LayeredNet) -> None:
        with pytest.raises(ShapeError):
            two_layer_target(toy_net).hidden(np.zeros((2, 3)))

    def test_domain_constants(self, toy_net: LayeredNet) -> None:
        consts = domain_constants(toy_net, 1.0)
        assert consts.C == pytest.approx(0.5)
        assert consts.H == pytest.approx(1.0)
        assert consts.M == pytest.approx(1.0)
        assert consts.resolution == 0.0
        with pytest.raises(DomainError):
            domain_constants(toy_net, 0.0)

    def test_closed_form_certificate(self, toy_net: LayeredNet) -> None:
        cert = closed_form_certificate(toy_net, 1.0, 0.5)
        assert cert.pipeline == "two_layer"
        assert cert.n == 21
        assert cert.m == 128
        assert cert.p == 2
        assert cert.log2_N == pytest.approx(128 * math.log2(85))
        assert cert.V == pytest.approx(math.pi * 128 * 21)
        assert cert.constants["outer_scale"] == pytest.approx(0.25)
        with pytest.raises(DomainError):
            closed_form_certificate(toy_net, 1.0, 0.0)


# ---------------------------------------------------------------------------
# Two-layer compiler
# ---------------------------------------------------------------------------


class TestCompileTwoLayer:
    """Adaptive and closed-form schedules on the toy net."""

    def test_adaptive_meets_eps(self, toy_net: LayeredNet, fast_config: CompileConfig) -> None:
        fn, cert = compile_two_layer(toy_net, 1.0, 0.5, config=fast_config)
        assert isinstance(fn, FourierNet)
        assert cert.atoms == fn.atom_count
        assert cert.predicted_error is not None
        assert cert.measured_error is not None
        assert cert.measured_error <= 0.5
        assert cert.n_used is not None and cert.n_used <= max(cert.n, fast_config.min_inner_degree)

    def test_cube_norm(self, toy_net: LayeredNet, fast_config: CompileConfig) -> None:
        _, cert = compile_two_layer(toy_net, 1.0, 0.5, K_norm="linf", config=fast_config)
        assert cert.measured_error is not None
        assert cert.measured_error <= 0.5

    def test_sharded_fit_is_deterministic(
        self, toy_net: LayeredNet, fast_config: CompileConfig
    ) -> None:
        single, _ = compile_two_layer(toy_net, 1.0, 0.5, config=fast_config)
        sharded, _ = compile_two_layer(
            toy_net, 1.0, 0.5, config=fast_config.model_copy(update={"shards": 2})
        )
        np.testing.assert_array_equal(single.indices, sharded.indices)
        np.testing.assert_allclose(single.coeffs, sharded.coeffs)

    def test_closed_form_schedule_refuses(
        self, toy_net: LayeredNet, fast_config: CompileConfig
    ) -> None:
        closed = fast_config.model_copy(update={"schedule": "closed_form"})
        with pytest.raises(BudgetExceededError) as info:
            compile_two_layer(toy_net, 1.0, 0.5, config=closed)
        assert info.value.certificate is not None
        assert info.value.certificate.log2_N > math.log2(closed.atom_cap)

    def test_rejects_deep_net(self, deep_net: LayeredNet) -> None:
        with pytest.raises(PreconditionError):
            compile_two_layer(deep_net, 1.0, 0.5)

    def test_rejects_non_positive_eps(
        self, toy_net: LayeredNet, fast_config: CompileConfig
    ) -> None:
        with pytest.raises(DomainError):
            compile_two_layer(toy_net, 1.0, 0.0, config=fast_config)


# ---------------------------------------------------------------------------
# Resynthesis
# ---------------------------------------------------------------------------


class TestResynthesize:
    """Rebuilding Fourier nets as σ-networks."""

    def test_cosine_with_relu(self, fast_config: CompileConfig) -> None:
        fn = FourierNet([[1.0, 0.0]], [[1], [-1]], [0.5, 0.5])
        net, cert = resynthesize(fn, Activation.relu(), 1.0, 0.1, config=fast_config)
        assert depth(net) == 1
        assert cert.units == net.widths[0]
        assert cert.predicted_error is not None and cert.predicted_error <= 0.1 + 1e-12
        assert cert.measured_error is not None and cert.measured_error <= 0.1

    def test_constant_net_needs_no_units(self, fast_config: CompileConfig) -> None:
        net, cert = resynthesize(FourierNet.constant(2.0, 2), Activation.relu(), 1.0, 0.1,
                                 config=fast_config)
        assert depth(net) == 0
        assert cert.units == 0
        assert net.output_bias == pytest.approx(2.0)

    def test_unsupported_activation(self) -> None:
        fn = FourierNet([[1.0, 0.0]], [[1]], [1.0])
        with pytest.raises(CapabilityError):
            resynthesize(fn, Activation.cosine(), 1.0, 0.1)

    def test_domain(self) -> None:
        fn = FourierNet([[1.0, 0.0]], [[1]], [1.0])
        with pytest.raises(DomainError):
            resynthesize(fn, Activation.relu(), 1.0, 0.0)


# ---------------------------------------------------------------------------
# Multi-layer compiler
# ---------------------------------------------------------------------------


class TestCompileDeep:
    """Normalised L-layer nets on the cube."""

    def test_adaptive_meets_eps(self, deep_net: LayeredNet, fast_config: CompileConfig) -> None:
        fn, cert = compile_deep(deep_net, 0.5, config=fast_config)
        assert cert.pipeline == "deep"
        assert cert.m == deep_schedule_degree(3, 0.5)
        assert cert.atoms == fn.atom_count
        assert cert.measured_error is not None
        assert cert.measured_error <= 0.5

    def test_closed_form_schedule_refuses(
        self, deep_net: LayeredNet, fast_config: CompileConfig
    ) -> None:
        closed = fast_config.model_copy(update={"schedule": "closed_form"})
        with pytest.raises(BudgetExceededError) as info:
            compile_deep(deep_net, 0.5, config=closed)
        assert info.value.certificate is not None

    def test_unnormalised_net_rejected(self, toy_net: LayeredNet) -> None:
        with pytest.raises(NormalizationError):
            compile_deep(toy_net, 0.5)

    def test_layerless_net_rejected(self) -> None:
        net = LayeredNet(d=2, layers=[], out_re=[1.0, 0.0])
        with pytest.raises(PreconditionError):
            compile_deep(net, 0.5)


# ---------------------------------------------------------------------------
# Oscillatory, radial and Gaussian
# ---------------------------------------------------------------------------


class TestCompileOscillatory:
    """σ-networks for the oscillatory target."""

    V = [0.25, 0.25]
    W = [0.25, 0.25]

    @pytest.mark.parametrize("N", [128, 512, 2048])
    def test_sup_error_within_interpolation_bound(
        self, N: int, rng: np.random.Generator
    ) -> None:
        net, cert = compile_oscillatory(1.0, self.V, self.W, Activation.relu(), N)
        assert depth(net) == 2
        assert net.widths == [4, N]
        x = rng.uniform(-1.0, 1.0, size=(256, 2))
        exact = oscillatory_net(1.0, self.V, self.W)(x)
        assert np.max(np.abs(net(x) - exact)) <= cert.constants["e_sup"] + 1e-9

    def test_predicted_error_decreases_with_units(self) -> None:
        errors = [
            compile_oscillatory(1.0, self.V, self.W, Activation.relu(), N)[1].predicted_error
            for N in (128, 512, 2048)
        ]
        assert errors[0] > errors[1] > errors[2]

    def test_too_few_units(self) -> None:
        with pytest.raises(BudgetExceededError) as info:
            compile_oscillatory(1.0, self.V, self.W, Activation.relu(), 1)
        assert info.value.certificate is not None

    def test_trivial_target(self) -> None:
        net, cert = compile_oscillatory(0.0, self.V, self.W, Activation.relu(), 10)
        assert depth(net) == 0
        assert cert.predicted_error == 0.0
        assert net([0.3, -0.2]) == pytest.approx(1.0)

    def test_length_mismatch(self) -> None:
        with pytest.raises(ShapeError):
            compile_oscillatory(1.0, [0.5], [0.5, 0.5], Activation.relu(), 10)


class TestCompileRadial:
    """``φ(‖x‖)`` on the unit ball."""

    def test_squared_norm(self, fast_config: CompileConfig) -> None:
        fn, cert = compile_radial(
            np.square, 2, 0.5, outer=Activation.identity(), config=fast_config
        )
        assert cert.pipeline == "radial"
        assert cert.measured_error is not None
        assert cert.measured_error <= 0.5
        assert fn.d == 2

    def test_budget(self) -> None:
        cert = radial_budget(2, 0.5)
        assert cert.pipeline == "radial"
        assert cert.log2_N > 0.0
        with pytest.raises(DomainError):
            radial_budget(2, 0.0)


class TestCompileGaussian:
    """L² compilation under an isotropic Gaussian."""

    def test_sigmoid_net(self, fast_config: CompileConfig) -> None:
        net = random_two_layer_net(3, 2, seed=0)
        fn, cert = compile_gaussian(net, 0.4, samples=2000, config=fast_config)
        assert cert.pipeline == "gaussian"
        assert cert.eps == 0.4
        assert cert.constants["sigma"] == pytest.approx(3**-0.5)
        assert cert.measured_error is not None
        assert cert.measured_error <= 0.4
        assert fn.atom_count == cert.atoms

    def test_unbounded_outer_rejected(self) -> None:
        net = random_two_layer_net(3, 2, seed=0, outer=Activation.relu())
        with pytest.raises(PreconditionError):
            compile_gaussian(net, 0.4)
