import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

import reference_values as ref
from ricewaves.level_angle import (PALM_FORMS, GradientAnisotropy, elliptic_K, length_intensity, palm_angle_cdf,
                                   palm_angle_density, palm_bin_probabilities)
from ricewaves.spectral_model import DegenerateModelError, StretchedSpectrum2D

gammas = st.floats(0.0, 0.95)
angles = st.floats(-math.pi / 2, math.pi / 2)


def test_elliptic_k():
    assert elliptic_K(0.25) == pytest.approx(ref.ELLIPK_QUARTER, rel=1e-14)
    direct = integrate.quad(lambda t: (1 - 0.5 * math.sin(t) ** 2) ** -0.5, 0, math.pi / 2, epsabs=1e-15,
                            epsrel=1e-14)[0]
    assert abs(elliptic_K(0.5) - direct) < 1e-12
    assert elliptic_K(0.0) == pytest.approx(math.pi / 2, rel=1e-15)


class TestLengthIntensity:
    def test_unit_model(self):
        assert length_intensity(1.0, 1.0) == pytest.approx(1 / math.pi, rel=1e-15)

    def test_level_and_area(self):
        assert length_intensity(2.0, 0.5, u=1.0, area=3.0) == pytest.approx(3 / math.pi * 2.0 * math.exp(-1.0))

    def test_rejects(self):
        with pytest.raises(ValueError):
            length_intensity(0.0, 1.0)
        with pytest.raises(ValueError):
            length_intensity(1.0, 1.0, area=-1.0)


class TestAnisotropy:
    @given(gammas, angles)
    def test_shape_round_trip(self, gamma, kappa):
        a = GradientAnisotropy.from_shape(gamma, kappa, 2.0)
        assert a.gamma2 == pytest.approx(gamma * gamma, abs=1e-12)
        if gamma > 0.05 and abs(abs(kappa) - math.pi / 2) > 1e-6:
            assert a.kappa == pytest.approx(kappa, abs=1e-9)

    def test_from_stretched_spectrum(self, ring):
        a = GradientAnisotropy.from_spectrum(StretchedSpectrum2D.stretched(ring, 0.5, 0.3))
        assert a.gamma2 == pytest.approx(0.25, rel=1e-10)

    def test_rejects_non_positive(self):
        with pytest.raises(DegenerateModelError):
            GradientAnisotropy(1.0, 1.0, 1.0)
        with pytest.raises(DegenerateModelError):
            GradientAnisotropy.from_shape(1.0, 0.0)


class TestPalmDensity:
    @pytest.mark.parametrize("form", PALM_FORMS)
    @given(gammas, angles)
    def test_normalized(self, form, gamma, kappa):
        assert palm_angle_cdf((gamma, kappa), -math.pi, math.pi, form) == pytest.approx(1.0, rel=1e-10)

    @pytest.mark.parametrize("form", PALM_FORMS)
    def test_isotropic_is_uniform(self, form):
        phi = np.linspace(-math.pi, math.pi, 17)
        np.testing.assert_allclose(palm_angle_density((0.0, 0.4), phi, form), 1 / (2 * math.pi), rtol=1e-14)

    @given(gammas, angles)
    def test_extreme_ratio(self, gamma, kappa):
        g = palm_angle_density((gamma, kappa), np.array([kappa, kappa + math.pi / 2]))
        assert g[0] / g[1] == pytest.approx((1 - gamma * gamma) ** 1.5, rel=1e-12)

    @pytest.mark.parametrize("form", PALM_FORMS)
    @given(gammas, angles, st.floats(-math.pi, math.pi))
    def test_symmetries(self, form, gamma, kappa, phi):
        g = lambda p: palm_angle_density((gamma, kappa), p, form)  # noqa: E731
        assert g(phi + math.pi) == pytest.approx(g(phi), rel=1e-12)
        assert g(2 * kappa - phi) == pytest.approx(g(phi), rel=1e-12)

    @given(gammas, angles, st.floats(-math.pi, 0.0), st.floats(0.0, math.pi))
    def test_cdf_additive(self, gamma, kappa, a, b):
        whole = palm_angle_cdf((gamma, kappa), a, b)
        mid = 0.5 * (a + b)
        assert whole == pytest.approx(palm_angle_cdf((gamma, kappa), a, mid) + palm_angle_cdf((gamma, kappa), mid, b),
                                      abs=1e-12)

    def test_bins_sum_to_one(self):
        edges = np.linspace(-math.pi, math.pi, 25)
        p = palm_bin_probabilities((0.7, 0.2), edges)
        assert p.sum() == pytest.approx(1.0, rel=1e-12)
        assert np.all(p > 0)

    def test_matches_length_weighted_gradient_directions(self):
        # sample gradients, weight each by its length, and histogram the direction
        aniso = GradientAnisotropy.from_shape(0.8, 0.5)
        cov = np.array([[aniso.l200, aniso.l110], [aniso.l110, aniso.l020]])
        g = np.random.default_rng(3).multivariate_normal(np.zeros(2), cov, size=400_000)
        edges = np.linspace(-math.pi, math.pi, 13)
        hist, _ = np.histogram(np.arctan2(g[:, 1], g[:, 0]), edges, weights=np.hypot(g[:, 0], g[:, 1]))
        hist /= hist.sum()
        np.testing.assert_allclose(hist, palm_bin_probabilities(aniso, edges), atol=3e-3)
        assert np.max(np.abs(hist - palm_bin_probabilities(aniso, edges, "published"))) > 0.01

    def test_rejects(self):
        with pytest.raises(ValueError, match="form"):
            palm_angle_density((0.2, 0.0), 0.0, "unweighted")
        with pytest.raises(ValueError):
            palm_angle_cdf((0.2, 0.0), 1.0, 0.0)
        with pytest.raises(DegenerateModelError):
            palm_angle_density((1.0, 0.0), 0.0)
