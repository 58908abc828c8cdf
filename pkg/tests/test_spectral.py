"""Tests for aumai_depthsep.spectral."""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from pydantic import ValidationError

from aumai_depthsep.errors import CapabilityError, DomainError, NormalizationError, ShapeError
from aumai_depthsep.spectral import (
    OscillatoryTarget,
    Window,
    admissibility,
    coord_factor,
    coord_factor_bound,
    coord_factor_direct,
    count_large,
    envelope_D,
    heavy_tail_bound,
    heavy_tail_target,
    heavy_tail_threshold,
    hamming_count,
    kappa_certificate,
    kappa_constants,
    kappa_sweep,
    numeric_F,
    tube_volume_bound,
    tube_volume_mc,
)


@pytest.fixture(scope="module")
def window() -> Window:
    return Window.sinc2()


@pytest.fixture()
def small_target() -> OscillatoryTarget:
    return OscillatoryTarget(r=2.0, v=[0.1, -0.2, 0.3], w=[0.5, 0.5, 0.5])


# ---------------------------------------------------------------------------
# Windows
# ---------------------------------------------------------------------------


class TestWindow:
    """Window construction and admissibility."""

    def test_sinc2_is_admissible(self, window: Window) -> None:
        assert window.K == 1.0
        assert window.l1_norm == pytest.approx(math.sqrt(1.5))
        assert window.decay_alpha > 0.0
        result = admissibility(window)
        assert result.admissible
        assert result.margin == pytest.approx(math.sqrt(2.0) - math.sqrt(1.5))

    def test_bandwidth_must_be_positive(self) -> None:
        with pytest.raises(DomainError):
            Window.sinc2(0.0)

    def test_sinc_is_not_integrable(self) -> None:
        sinc = Window.sinc()
        assert not sinc.integrable
        result = admissibility(sinc)
        assert not result.admissible
        assert result.margin == -math.inf

    def test_custom_window_norms(self) -> None:
        custom = Window.custom(lambda x: math.sqrt(1.5) * np.sinc(x) ** 2, 1.0)
        assert custom.tag == "custom"
        assert custom.l1_norm == pytest.approx(math.sqrt(1.5), rel=1e-4)

    def test_custom_window_must_be_normalised(self) -> None:
        with pytest.raises(NormalizationError):
            Window.custom(lambda x: 2.0 * np.sinc(x) ** 2, 1.0)


# ---------------------------------------------------------------------------
# Targets
# ---------------------------------------------------------------------------


class TestOscillatoryTarget:
    """Target parameters and evaluation."""

    def test_canonical_target(self) -> None:
        target = heavy_tail_target(3)
        assert target.r == 9.0
        assert target.tau == 1.0
        assert target.omega == frozenset({0, 1, 2})
        assert target.eta == 1.0
        assert target.l1_gamma == 3.0
        np.testing.assert_allclose(target.xi({0}), [9.0, 0.0, 0.0])

    def test_evaluation(self) -> None:
        target = heavy_tail_target(2)
        np.testing.assert_allclose(target(np.array([[-1.0, -0.5]])), [1.0 + 0j])
        with pytest.raises(ShapeError):
            target(np.zeros((1, 3)))

    def test_subset_index_checked(self) -> None:
        with pytest.raises(DomainError):
            heavy_tail_target(3).xi({5})

    def test_validation(self) -> None:
        with pytest.raises(ValidationError):
            OscillatoryTarget(r=1.0, v=[0.0], w=[1.0, 1.0])
        with pytest.raises(ValidationError):
            OscillatoryTarget(r=-1.0, v=[0.0], w=[1.0])
        with pytest.raises(DomainError):
            heavy_tail_target(0)

    def test_worked_example_constants(self) -> None:
        assert heavy_tail_bound(60, 1) == pytest.approx(1.0 - 1300.0 * 3600.0 * 0.75**60)
        assert heavy_tail_bound(60, 1) > 0.8
        assert heavy_tail_bound(3, 10) < 0.0
        assert heavy_tail_threshold(100) == pytest.approx(1.3**100 / 1e10)


# ---------------------------------------------------------------------------
# Fourier factors
# ---------------------------------------------------------------------------


class TestCoordFactor:
    """Half-line Fourier factors of the window."""

    @pytest.mark.parametrize("t", [0.3, 3.0])
    @pytest.mark.parametrize("positive", [True, False])
    def test_matches_direct_quadrature(self, window: Window, t: float, positive: bool) -> None:
        via_hat = coord_factor(window, positive, t)
        direct = coord_factor_direct(window, positive, t)
        assert abs(via_hat - direct.value) <= 1e-3

    @pytest.mark.parametrize("t", [0.0, 0.5, 2.0, 5.0])
    def test_respects_bound(self, window: Window, t: float) -> None:
        assert abs(coord_factor(window, True, t)) <= coord_factor_bound(window, t) + 1e-9

    def test_halves_sum_to_transform(self, window: Window) -> None:
        total = coord_factor(window, True, 0.4) + coord_factor(window, False, 0.4)
        assert total == pytest.approx(math.sqrt(1.5) * 0.6)


class TestWindowedTransform:
    """Envelope and numeric transform of the target."""

    def test_envelope_product_equals_subsets(
        self, small_target: OscillatoryTarget, window: Window
    ) -> None:
        xi = [0.4, 0.1, -0.3]
        assert envelope_D(small_target, window, xi) == pytest.approx(
            envelope_D(small_target, window, xi, method="subsets")
        )

    def test_numeric_product_equals_subsets(
        self, small_target: OscillatoryTarget, window: Window
    ) -> None:
        xi = [0.4, 0.1, -0.3]
        product = numeric_F(small_target, window, xi)
        subsets = numeric_F(small_target, window, xi, method="subsets")
        assert product == pytest.approx(subsets, abs=1e-12)

    @pytest.mark.parametrize("xi", [[0.4, 0.1, -0.3], [2.0, -1.5, 3.0]])
    def test_numeric_within_envelope(
        self, small_target: OscillatoryTarget, window: Window, xi: list[float]
    ) -> None:
        value = abs(numeric_F(small_target, window, xi))
        bound = envelope_D(small_target, window, xi) * (0.5 * window.l1_norm) ** 3
        assert value <= bound + 1e-9

    def test_subset_caps(self, window: Window) -> None:
        with pytest.raises(CapabilityError):
            envelope_D(heavy_tail_target(13), window, np.zeros(13), method="subsets")
        with pytest.raises(CapabilityError):
            numeric_F(heavy_tail_target(7), window, np.zeros(7), method="subsets")

    def test_xi_length_checked(self, small_target: OscillatoryTarget, window: Window) -> None:
        with pytest.raises(ShapeError):
            envelope_D(small_target, window, [0.0, 0.0])


# ---------------------------------------------------------------------------
# Combinatorics and geometry
# ---------------------------------------------------------------------------


class TestGeometry:
    """Counting and tube volumes."""

    def test_count_large(self) -> None:
        assert count_large([0.5, -2.0, 3.0], 2.0) == 2

    def test_hamming_count(self) -> None:
        assert hamming_count(heavy_tail_target(3), {0, 1}, {1, 2}) == 2

    def test_tube_bound(self) -> None:
        assert tube_volume_bound(1.0, 1.0, 2) == pytest.approx(32.0 * math.e**2)
        with pytest.raises(DomainError):
            tube_volume_bound(1.0, 1.0, 1)
        with pytest.raises(DomainError):
            tube_volume_bound(0.0, 1.0, 2)

    def test_axis_tube_volume(self) -> None:
        result = tube_volume_mc(0.5, 1.0, [1.0, 0.0], 20_000, seed=0)
        assert result.volume == pytest.approx(2.0, abs=0.1)
        assert result.std_error > 0.0

    def test_diagonal_tube_below_bound(self) -> None:
        result = tube_volume_mc(0.25, 2.0, [1.0, 1.0], 20_000, seed=1)
        assert result.volume <= tube_volume_bound(0.25, 2.0, 2)

    def test_zero_axis(self) -> None:
        with pytest.raises(DomainError):
            tube_volume_mc(0.5, 1.0, [0.0, 0.0], 100)


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------


class TestKappaCertificate:
    """Shallow lower-bound certificates."""

    def test_constants(self) -> None:
        root = math.sqrt(8.0 / math.pi)
        c_const, d_const = kappa_constants(1.0, 1.0)
        assert c_const == pytest.approx(2.0 * math.exp(root))
        assert d_const == pytest.approx(32.0 * math.exp(2.0 + root) * (math.pi**-2 + 1.0))

    @pytest.mark.parametrize(("d", "N"), [(100, 1), (100, 1000)])
    def test_general_bound(self, window: Window, d: int, N: int) -> None:
        _, d_const = kappa_constants(1.0, 0.5)
        expected = d_const * d * d * d * 0.75**d
        cert = kappa_certificate(window, heavy_tail_target(d, gamma=0.5), d, N)
        assert cert.regime == "ok"
        assert cert.alpha == pytest.approx(0.75)
        assert cert.kappa_sq == pytest.approx(expected, rel=1e-9)
        assert cert.lower_bound == pytest.approx(max(0.0, 1.0 - N * expected))
        assert "kappa_sq_general" not in cert.constants

    def test_worked_example_bound(self, window: Window) -> None:
        cert = kappa_certificate(window, heavy_tail_target(60), 60, 1)
        assert cert.regime == "ok"
        assert cert.lower_bound == pytest.approx(1.0 - 1300.0 * 3600.0 * 0.75**60, rel=1e-10)
        assert cert.lower_bound == pytest.approx(heavy_tail_bound(60, 1), rel=1e-12)
        assert 0.84 < cert.lower_bound < 0.87
        assert cert.kappa_sq == pytest.approx(1300.0 * 3600.0 * 0.75**60, rel=1e-12)
        _, d_const = kappa_constants(1.0, 1.0)
        general = d_const * 60**3 * 0.75**60
        assert cert.constants["kappa_sq_general"] == pytest.approx(general, rel=1e-9)
        assert cert.constants["threshold_N"] == heavy_tail_threshold(60)

    def test_worked_example_threshold(self, window: Window) -> None:
        threshold = heavy_tail_threshold(100)
        assert threshold == pytest.approx(1.3**100 / (1e4 * 100**3), rel=1e-10)
        assert 24.0 < threshold < 26.0
        cert = kappa_certificate(window, heavy_tail_target(100), 100, 1)
        assert cert.constants["threshold_N"] == pytest.approx(threshold)

    def test_monotone_decreasing_in_units(self, window: Window) -> None:
        target = heavy_tail_target(60)
        bounds = [
            kappa_certificate(window, target, 60, N).lower_bound
            for N in (0, 1, 2, 5, 10, 100, 10_000)
        ]
        assert all(a >= b for a, b in itertools.pairwise(bounds))
        assert bounds[0] == 1.0 > bounds[1] > bounds[2] > bounds[3]

    def test_monotone_increasing_in_eta(self, window: Window) -> None:
        d = 100
        certs = [
            kappa_certificate(
                window,
                OscillatoryTarget(
                    r=float(d * d), v=[0.0] * d, w=[1.0] * m + [0.25] * (d - m), gamma=0.5
                ),
                d,
                1,
            )
            for m in (80, 90, 100)
        ]
        etas = [cert.constants["eta"] for cert in certs]
        assert etas == pytest.approx([0.8, 0.9, 1.0])
        assert certs[0].kappa_sq > certs[1].kappa_sq > certs[2].kappa_sq
        bounds = [cert.lower_bound for cert in certs]
        assert all(a <= b for a, b in itertools.pairwise(bounds))
        assert bounds[-1] > bounds[0]

    def test_large_dimension_is_informative(self, window: Window) -> None:
        cert = kappa_certificate(window, heavy_tail_target(100), 100, 1)
        assert cert.lower_bound > 0.99

    def test_low_dimension_is_vacuous(self, window: Window) -> None:
        cert = kappa_certificate(window, heavy_tail_target(2), 2, 1)
        assert cert.regime == "vacuous regime"
        assert "d < 3" in cert.notes

    def test_inadmissible_window(self) -> None:
        cert = kappa_certificate(Window.sinc(), heavy_tail_target(5), 5, 1)
        assert cert.regime == "vacuous regime"
        assert cert.lower_bound == 0.0
        assert cert.kappa_sq == math.inf

    def test_zero_units(self, window: Window) -> None:
        assert kappa_certificate(window, heavy_tail_target(10), 10, 0).lower_bound == 1.0

    def test_argument_checks(self, window: Window) -> None:
        with pytest.raises(ShapeError):
            kappa_certificate(window, heavy_tail_target(3), 4, 1)
        with pytest.raises(DomainError):
            kappa_certificate(window, heavy_tail_target(3), 3, -1)

    def test_sweep_order(self, window: Window) -> None:
        rows = kappa_sweep(window, [3, 100], [1, 10])
        assert [(d, N) for d, N, _, _ in rows] == [(3, 1), (3, 10), (100, 1), (100, 10)]
        assert rows[0][3] == "vacuous regime"
        assert rows[2][3] == "ok"

    def test_sweep_uses_worked_form(self, window: Window) -> None:
        [(d, N, bound, regime)] = kappa_sweep(window, [60], [1])
        assert (d, N, regime) == (60, 1, "ok")
        assert bound == pytest.approx(heavy_tail_bound(60, 1), rel=1e-12)
