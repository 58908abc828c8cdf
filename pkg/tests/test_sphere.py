"""Tests for aumai_depthsep.sphere."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest

from aumai_depthsep.errors import (
    CapabilityError,
    DegenerateInputError,
    DomainError,
    PreconditionError,
    ShapeError,
)
from aumai_depthsep.fixtures import frame_measure, zonal_bump
from aumai_depthsep.harness import Sampler
from aumai_depthsep.netir import Activation, Layer, LayeredNet
from aumai_depthsep.sphere import (
    RidgeMeasure,
    ZonalSeries,
    atom_sample_approx,
    blaschke_levy_sigma,
    coefficient_table,
    ell_ratio,
    export_frame,
    frame_coherence,
    funk_hecke,
    gamma1_upper,
    gegenbauer,
    gegenbauer_bound,
    gegenbauer_explicit,
    harmonic_dim,
    inapprox_certificate,
    mu_quadrature,
    sigma_inverse_constant,
    sign_invariant_spread_check,
    sparse_spread,
    sphere_dimension_log,
    spread_frame,
)

# ‖P_2^3‖₁ under μ_3
_P2_L1 = 2.0 / (3.0 * math.sqrt(3.0))


@pytest.fixture(scope="module")
def spread_d3() -> ZonalSeries:
    return sparse_spread(3, 144, samples=500, seed=0).series


# ---------------------------------------------------------------------------
# Dimensions and polynomials
# ---------------------------------------------------------------------------


class TestHarmonics:
    """Harmonic space dimensions and Gegenbauer polynomials."""

    @pytest.mark.parametrize(
        ("d", "k", "expected"), [(3, 0, 1), (3, 2, 5), (4, 1, 4), (2, 1, 2), (2, 7, 2)]
    )
    def test_harmonic_dim(self, d: int, k: int, expected: int) -> None:
        assert harmonic_dim(d, k) == expected

    def test_harmonic_dim_is_exact_for_large_arguments(self) -> None:
        value = harmonic_dim(200, 400)
        assert isinstance(value, int)
        assert math.log(value) == pytest.approx(sphere_dimension_log(200, 400), rel=1e-9)

    def test_dimension_log(self) -> None:
        assert sphere_dimension_log(3, 2) == pytest.approx(math.log(5.0))
        assert sphere_dimension_log(5, 0) == 0.0

    def test_domain_checks(self) -> None:
        with pytest.raises(DomainError):
            harmonic_dim(1, 2)
        with pytest.raises(DomainError):
            harmonic_dim(3, -1)

    def test_gegenbauer_known_values(self) -> None:
        assert gegenbauer(3, 2, 0.5) == pytest.approx(-0.125)
        assert gegenbauer(5, 9, 1.0) == pytest.approx(1.0)
        assert gegenbauer(2, 6, 0.3) == pytest.approx(math.cos(6.0 * math.acos(0.3)))

    def test_gegenbauer_vectorised(self) -> None:
        t = np.linspace(-1.0, 1.0, 5)
        values = gegenbauer(3, 2, t)
        np.testing.assert_allclose(values, (3.0 * t**2 - 1.0) / 2.0)

    def test_gegenbauer_outside_interval(self) -> None:
        with pytest.raises(DomainError):
            gegenbauer(3, 2, 1.5)

    @pytest.mark.parametrize(("d", "k"), [(3, 4), (6, 5), (10, 3)])
    def test_explicit_sum_agrees(self, d: int, k: int) -> None:
        for t in (-0.7, 0.1, 0.55):
            assert gegenbauer_explicit(d, k, t) == pytest.approx(gegenbauer(d, k, t), abs=1e-10)

    def test_bound_holds_off_the_poles(self) -> None:
        for t in np.linspace(-0.9, 0.9, 19):
            assert abs(gegenbauer(6, 20, t)) <= gegenbauer_bound(6, 20, t)
        assert gegenbauer_bound(6, 0, 0.0) == math.inf


# ---------------------------------------------------------------------------
# Projected measure
# ---------------------------------------------------------------------------


class TestMuMeasure:
    """Quadrature for μ_d and Funk–Hecke coefficients."""

    def test_rule_is_a_probability_measure(self) -> None:
        rule = mu_quadrature(5, 32)
        assert rule.weights.sum() == pytest.approx(1.0)
        assert rule.integrate(lambda t: np.ones_like(t)) == pytest.approx(1.0)

    def test_second_moment(self) -> None:
        # μ_d has variance 1/d.
        assert mu_quadrature(3).integrate(np.square) == pytest.approx(1.0 / 3.0)
        assert mu_quadrature(7).integrate(np.square) == pytest.approx(1.0 / 7.0)

    def test_rule_is_cached_and_frozen(self) -> None:
        rule = mu_quadrature(4, 16)
        assert mu_quadrature(4, 16) is rule
        with pytest.raises(ValueError):
            rule.nodes[0] = 0.0

    def test_rule_arguments(self) -> None:
        with pytest.raises(DomainError):
            mu_quadrature(1, 8)
        with pytest.raises(DomainError):
            mu_quadrature(3, 0)

    def test_sigma_closed_form_low_degrees(self) -> None:
        assert blaschke_levy_sigma(3, 0) == pytest.approx(0.5)
        assert blaschke_levy_sigma(3, 2) == pytest.approx(0.125)

    @pytest.mark.parametrize(("d", "k"), [(3, 2), (5, 4), (8, 6), (4, 10)])
    def test_funk_hecke_matches_sigma(self, d: int, k: int) -> None:
        assert funk_hecke(np.abs, d, k) == pytest.approx(blaschke_levy_sigma(d, k), rel=1e-7)

    def test_sigma_signs_alternate(self) -> None:
        signs = [np.sign(blaschke_levy_sigma(6, k)) for k in (2, 4, 6, 8)]
        assert signs == [1.0, -1.0, 1.0, -1.0]

    def test_odd_degree_sigma(self) -> None:
        with pytest.raises(DomainError):
            blaschke_levy_sigma(3, 3)

    def test_funk_hecke_of_odd_function_vanishes_on_even_degrees(self) -> None:
        assert funk_hecke(lambda t: t, 4, 2) == pytest.approx(0.0, abs=1e-12)
        assert funk_hecke(lambda t: t, 4, 1) == pytest.approx(0.25)


# ---------------------------------------------------------------------------
# Zonal series
# ---------------------------------------------------------------------------


class TestZonalSeries:
    """Zonal series evaluation and norms."""

    def test_single_harmonic_norms(self) -> None:
        bump = zonal_bump(3, 2)
        assert bump.energy(2) == pytest.approx(0.2)
        assert bump.l2_norm == pytest.approx(math.sqrt(0.2))
        norms = bump.norms(2)
        assert norms.exact
        assert norms.linf == pytest.approx(1.0)
        assert norms.l1 == pytest.approx(_P2_L1, rel=1e-8)

    def test_antipodal_axes_add_for_even_degree(self) -> None:
        e1 = np.array([1.0, 0.0, 0.0])
        series = ZonalSeries(3, [(2, e1, 1.0), (2, -e1, 1.0)])
        assert series.energy(2) == pytest.approx(0.8)
        axis, coeffs = series.single_axis(2)
        np.testing.assert_array_equal(axis, e1)
        assert coeffs == {2: 2.0}

    def test_energy_matches_sampled_mean(self, rng: np.random.Generator) -> None:
        axes = np.array([[1.0, 0.0, 0.0], [0.6, 0.8, 0.0]])
        series = ZonalSeries(3, [(4, axes[0], 1.0), (4, axes[1], -0.5)])
        x = rng.standard_normal((200_000, 3))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        assert np.mean(series(x) ** 2) == pytest.approx(series.energy(4), rel=0.05)

    def test_evaluation(self) -> None:
        bump = zonal_bump(3, 2, coeff=2.0)
        np.testing.assert_allclose(bump([[0.5, 0.0, math.sqrt(0.75)]]), [-0.25])
        with pytest.raises(ShapeError):
            bump(np.zeros((1, 4)))

    def test_mixed_axes_use_sampling(self) -> None:
        series = ZonalSeries(3, [(2, [1.0, 0.0, 0.0], 1.0), (2, [0.0, 1.0, 0.0], 1.0)])
        assert series.single_axis() is None
        norms = series.norms(2, samples=4000)
        assert not norms.exact
        assert norms.linf == pytest.approx(2.0)
        assert 0.0 < norms.l1 <= norms.l2

    def test_component_and_degrees(self) -> None:
        e1 = [1.0, 0.0, 0.0]
        series = ZonalSeries(3, [(4, e1, 1.0), (2, e1, 0.5)])
        assert series.degrees == [2, 4]
        assert series.component(4).degrees == [4]
        assert "degrees=[2, 4]" in repr(series)

    def test_validation(self) -> None:
        with pytest.raises(DomainError):
            ZonalSeries(1, [])
        with pytest.raises(DomainError):
            ZonalSeries(3, [(-1, [1.0, 0.0, 0.0], 1.0)])
        with pytest.raises(DomainError):
            ZonalSeries(3, [(2, [1.0, 1.0, 0.0], 1.0)])
        with pytest.raises(ShapeError):
            ZonalSeries(3, [(2, [1.0, 0.0], 1.0)])
        with pytest.raises(ShapeError):
            ZonalSeries(4, [], measure=RidgeMeasure([[1.0, 0.0, 0.0]], [1.0]))


class TestRidgeMeasure:
    """Atomic representing measures."""

    def test_evaluation_and_mass(self) -> None:
        measure = RidgeMeasure([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], [2.0, -1.0])
        assert measure.d == 3
        assert measure.mass == pytest.approx(3.0)
        np.testing.assert_allclose(measure([[0.5, -0.5, 0.0]]), [0.5])

    def test_from_net_reproduces_net(self, abs_net: LayeredNet, rng: np.random.Generator) -> None:
        measure = RidgeMeasure.from_net(abs_net)
        x = rng.standard_normal((32, 3))
        np.testing.assert_allclose(measure(x), np.asarray(abs_net(x)).real, atol=1e-12)

    def test_from_net_rejects_other_nets(self, toy_net: LayeredNet) -> None:
        with pytest.raises(CapabilityError):
            RidgeMeasure.from_net(toy_net)
        biased = LayeredNet(
            d=2,
            layers=[Layer(A=[[1.0, 0.0]], b=[0.5], act=Activation.absolute())],
            out_re=[1.0],
        )
        with pytest.raises(CapabilityError):
            RidgeMeasure.from_net(biased)

    def test_shape_mismatch(self) -> None:
        with pytest.raises(ShapeError):
            RidgeMeasure([[1.0, 0.0]], [1.0, 2.0])


# ---------------------------------------------------------------------------
# γ₁ and spreadness
# ---------------------------------------------------------------------------


class TestGamma1:
    """Upper bounds on γ₁."""

    def test_measure_short_circuit(self) -> None:
        measure = frame_measure(3, seed=1)
        assert gamma1_upper(measure) == pytest.approx(1.0)
        series = ZonalSeries(3, [], measure=measure)
        assert gamma1_upper(series) == pytest.approx(1.0)

    def test_single_harmonic(self) -> None:
        assert gamma1_upper(zonal_bump(3, 2)) == pytest.approx(_P2_L1 / 0.125, rel=1e-8)

    def test_linear_part_is_skipped(self) -> None:
        assert gamma1_upper(zonal_bump(3, 1)) == 0.0

    def test_odd_degree(self) -> None:
        with pytest.raises(DomainError):
            gamma1_upper(zonal_bump(3, 3))


class TestEllRatio:
    """ℓ_{q,p} spreadness ratios."""

    def test_equal_exponents(self) -> None:
        assert ell_ratio(zonal_bump(3, 2), 2.0, 2.0) == pytest.approx(1.0)

    def test_sup_over_l2(self) -> None:
        assert ell_ratio(zonal_bump(3, 2), math.inf, 2.0) == pytest.approx(math.sqrt(5.0))

    def test_sampled_callable(self) -> None:
        value = ell_ratio(lambda x: np.ones(x.shape[0]), 4.0, 1.0, d=3, samples=1000)
        assert value == pytest.approx(1.0)
        with pytest.raises(ShapeError):
            ell_ratio(lambda x: np.ones(x.shape[0]), 4.0, 1.0)

    def test_argument_checks(self) -> None:
        with pytest.raises(DomainError):
            ell_ratio(zonal_bump(3, 2), 0.5, 2.0)
        with pytest.raises(DegenerateInputError):
            ell_ratio(zonal_bump(3, 2, coeff=0.0), 2.0, 1.0)


# ---------------------------------------------------------------------------
# Frames and spread polynomials
# ---------------------------------------------------------------------------


class TestSpreadFrame:
    """Sign frames."""

    @pytest.mark.parametrize("d", [2, 3, 6])
    def test_coherence(self, d: int) -> None:
        frame = spread_frame(d)
        assert frame.shape == (2 ** (d - 1), d)
        np.testing.assert_allclose(np.linalg.norm(frame, axis=1), 1.0)
        assert frame_coherence(frame) == pytest.approx(1.0 - 2.0 / d, abs=1e-12)

    def test_dimension_limits(self) -> None:
        with pytest.raises(DomainError):
            spread_frame(1)
        with pytest.raises(CapabilityError):
            spread_frame(21)

    def test_single_vector_coherence(self) -> None:
        assert frame_coherence([[1.0, 0.0]]) == 0.0

    def test_export(self) -> None:
        doc = json.loads(export_frame(spread_frame(3)))
        assert doc["d"] == 3
        assert doc["count"] == 4
        assert doc["coherence"] == pytest.approx(1.0 / 3.0)
        assert len(doc["vectors"]) == 4


class TestSparseSpread:
    """High-degree spread polynomials over the sign frame."""

    def test_energy_and_sup(self) -> None:
        result = sparse_spread(3, 144, samples=500, seed=0)
        assert 1.0 <= result.energy <= 3.0
        assert result.beta == pytest.approx(2.0 / math.sqrt(10.0))
        assert result.sampled_sup <= result.sup_bound * (1.0 + 1e-9)
        assert result.series.norms(144).linf == pytest.approx(result.sup_bound)

    def test_degree_preconditions(self) -> None:
        with pytest.raises(PreconditionError):
            sparse_spread(3, 143)
        with pytest.raises(PreconditionError):
            sparse_spread(3, 100)

    def test_sign_invariant_check_passes(self, spread_d3: ZonalSeries) -> None:
        assert sign_invariant_spread_check(spread_d3, 3, 144)

    def test_sign_invariant_check_rejects_tilted_harmonic(self) -> None:
        tilted = ZonalSeries.zonal(3, 144, axis=[0.6, 0.8, 0.0])
        with pytest.raises(PreconditionError):
            sign_invariant_spread_check(tilted, 3, 144)

    def test_sign_invariant_check_arguments(self, spread_d3: ZonalSeries) -> None:
        with pytest.raises(PreconditionError):
            sign_invariant_spread_check(spread_d3, 3, 100)
        with pytest.raises(ShapeError):
            sign_invariant_spread_check(spread_d3, 4, 256)


# ---------------------------------------------------------------------------
# Certificates and atom sampling
# ---------------------------------------------------------------------------


class TestInapproxCertificate:
    """Lower bounds against one-hidden-layer networks."""

    def test_no_units_leaves_projected_energy(self) -> None:
        assert inapprox_certificate(zonal_bump(3, 2), [2], 1.0, (0, 1.0)) == pytest.approx(0.2)

    def test_large_candidate_clips_at_zero(self) -> None:
        assert inapprox_certificate(zonal_bump(3, 2), [2], 1.0, (1, 1.0)) == 0.0

    def test_spread_series_survives_small_candidates(self, spread_d3: ZonalSeries) -> None:
        bound = inapprox_certificate(spread_d3, [144], 0.0, (1, 0.1))
        assert 0.0 < bound < spread_d3.energy(144)

    def test_argument_checks(self) -> None:
        with pytest.raises(DomainError):
            inapprox_certificate(zonal_bump(3, 2), [], 1.0, (1, 1.0))
        with pytest.raises(DomainError):
            inapprox_certificate(zonal_bump(3, 2), [2], 1.0, (-1, 1.0))
        with pytest.raises(DegenerateInputError):
            inapprox_certificate(zonal_bump(3, 2, coeff=0.0), [2], 1.0, (1, 1.0))


class TestAtomSampling:
    """Sampling one-hidden-layer abs networks from a measure."""

    def test_systematic_reproduces_equal_frame(self, rng: np.random.Generator) -> None:
        measure = frame_measure(3, seed=4)
        net = atom_sample_approx(measure, 4, scheme="systematic", seed=9)
        x = rng.standard_normal((16, 3))
        np.testing.assert_allclose(np.asarray(net(x)).real, measure(x), atol=1e-12)

    def test_iid_keeps_mass(self) -> None:
        measure = RidgeMeasure([[1.0, 0.0], [0.0, 1.0], [0.6, 0.8]], [0.5, -1.0, 0.25])
        net = atom_sample_approx(measure, 50, seed=3)
        assert net.widths == [50]
        assert np.abs(net.output_weights.real).sum() == pytest.approx(measure.mass)
        assert RidgeMeasure.from_net(net).mass == pytest.approx(measure.mass)

    @pytest.mark.slow
    def test_iid_error_halves_when_width_quadruples(self) -> None:
        measure = frame_measure(4, seed=1)
        x = Sampler.of("uniform_sphere", 4, seed=0).sample(2000)
        exact = measure(x)
        widths = (16, 64, 256)
        medians = []
        for N in widths:
            errors = []
            for seed in range(50):
                net = atom_sample_approx(measure, N, seed=seed)
                assert RidgeMeasure.from_net(net).mass <= measure.mass + 1e-12
                errors.append(math.sqrt(np.mean((np.asarray(net(x)).real - exact) ** 2)))
            medians.append(float(np.median(errors)))
        ratios = np.array(medians[1:]) / np.array(medians[:-1])
        assert np.all((ratios >= 0.3) & (ratios <= 0.8))

    def test_series_with_measure(self) -> None:
        series = ZonalSeries(3, [], measure=frame_measure(3))
        assert atom_sample_approx(series, 8).widths == [8]

    def test_argument_checks(self) -> None:
        with pytest.raises(CapabilityError):
            atom_sample_approx(zonal_bump(3, 2), 4)
        with pytest.raises(DomainError):
            atom_sample_approx(frame_measure(3), 0)
        with pytest.raises(DegenerateInputError):
            atom_sample_approx(RidgeMeasure([[1.0, 0.0]], [0.0]), 4)


class TestTables:
    """Coefficient tables."""

    def test_coefficient_table(self) -> None:
        rows = coefficient_table(3, 4)
        assert [row.k for row in rows] == [0, 1, 2, 3, 4]
        assert rows[2].N == 5
        assert rows[2].sigma == pytest.approx(0.125)
        assert rows[2].lam == pytest.approx(0.125, rel=1e-7)
        assert math.isnan(rows[1].sigma)
        assert rows[1].lam == 0.0

    def test_sigma_inverse_constant(self) -> None:
        expected = 1.0 / (0.125 * 3.0**0.75 * 4.0 * math.sqrt(5.0))
        assert sigma_inverse_constant([3], [1, 2]) == pytest.approx(expected)
        assert sigma_inverse_constant([3], [1, 3]) == 0.0
