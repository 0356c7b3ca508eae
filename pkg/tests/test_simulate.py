import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ricewaves.simulate import (NonFiniteSampleError, count_vector_zeros_2d, count_zeros_1d, dump_csv,
                                extract_level_curves, sample_dislocation_pair, sample_field_2d, sample_path_1d,
                                sign_change_cells, substream)
from ricewaves.spectral_model import BumpConvolutionCovariance, GaussianCovariance, RingSpectrum
from ricewaves.specular1d import SpecularConfig, sp2_expectation


def _replicate_stats(values):
    v = np.asarray(values, dtype=float)
    return v.mean(), v.std(ddof=1) / math.sqrt(v.size)


class TestSampling:
    def test_deterministic_given_seed(self, gauss):
        a = sample_path_1d(gauss, M=64, seed=5, replicate=3)
        b = sample_path_1d(gauss, M=64, seed=5, replicate=3)
        c = sample_path_1d(gauss, M=64, seed=5, replicate=4)
        x = np.linspace(0, 10, 11)
        np.testing.assert_array_equal(a(x), b(x))
        assert not np.allclose(a(x), c(x))

    def test_substreams_are_independent_of_order(self):
        first = [substream(7, r).standard_normal() for r in range(5)]
        again = [substream(7, r).standard_normal() for r in reversed(range(5))][::-1]
        assert first == again

    def test_derivatives_are_consistent(self, gauss):
        f = sample_path_1d(gauss, M=200, seed=1)
        x = np.linspace(-3, 3, 7)
        errs = []
        for h in (1e-2, 5e-3):
            errs.append(np.max(np.abs((f(x + h) - f(x - h)) / (2 * h) - f(x, 1))))
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)

    def test_single_harmonic_is_a_cosine(self, gauss):
        f = sample_path_1d(gauss, M=1, seed=2)
        w = abs(float(f.frequencies[0]))
        res = count_zeros_1d(f, (0.0, 2 * math.pi / w), step=0.01 / w)
        assert res.count == 2

    def test_covariance_consistency(self, gauss):
        # lag-0 and lag-1 empirical covariances over 200 replicates
        lags = np.array([0.0, 0.5, 1.0, 2.0])
        prods = []
        d1 = []
        for r in range(200):
            f = sample_path_1d(gauss, M=4000, seed=1, replicate=r)
            w0 = f(np.zeros(1))[0]
            prods.append(w0 * f(lags))
            d1.append(f(np.zeros(1), 1)[0] ** 2)
        prods = np.array(prods)
        mean = prods.mean(axis=0)
        se = prods.std(axis=0, ddof=1) / math.sqrt(prods.shape[0])
        assert np.all(np.abs(mean - np.exp(-lags**2 / 2)) <= 4 * se)
        m, s = _replicate_stats(d1)
        assert abs(m - 1.0) <= 3 * s

    def test_ring_gradient_variance_and_independence(self, ring):
        gx, cross = [], []
        for r in range(200):
            xi, eta = sample_dislocation_pair(ring, M=500, seed=3, replicate=r)
            gx.append(xi(0.0, 0.0, dx=1) ** 2)
            cross.append(xi(0.3, -0.2) * eta(1.1, 0.4))
        m, s = _replicate_stats(gx)
        assert abs(m - 0.5) <= 3 * s
        m, s = _replicate_stats(cross)
        assert abs(m) <= 3 * s

    def test_plane_wave_level_lines_are_parallel(self, ring):
        f = sample_field_2d(ring, M=1, seed=4)
        res = extract_level_curves(f.with_gradient(), 0.0, (0.0, 10.0, 0.0, 10.0), 0.05)
        normal = np.mod(res.angles, math.pi)
        assert np.ptp(normal) < 1e-6 or np.ptp(np.mod(normal + math.pi / 2, math.pi)) < 1e-6

    def test_unknown_method(self, gauss):
        with pytest.raises(ValueError, match="method"):
            sample_path_1d(gauss, method="circulant")


class TestZeroCounting:
    def test_line(self):
        res = count_zeros_1d(lambda x: x - 0.5, (0.0, 1.0), 0.1)
        assert res.count == 1
        assert res.locations[0] == pytest.approx(0.5, abs=1e-12)

    def test_cosine(self):
        assert count_zeros_1d(np.cos, (0.0, 4 * math.pi), 0.01).count == 4

    def test_non_finite(self):
        with pytest.raises(NonFiniteSampleError):
            count_zeros_1d(lambda x: np.where(x > 0.5, np.nan, x - 0.2), (0.0, 1.0), 0.1)

    @given(st.floats(0.0, 10.0), st.floats(0.0, 10.0))
    def test_additive_over_disjoint_intervals(self, a, b):
        lo, hi = sorted((a, b))
        mid = 0.5 * (lo + hi)
        if hi - lo < 0.2:
            return
        f = lambda x: np.sin(3 * x) + 0.3  # noqa: E731
        step = 0.001
        whole = count_zeros_1d(f, (lo, hi), step).count
        assert whole == count_zeros_1d(f, (lo, mid), step).count + count_zeros_1d(f, (mid, hi), step).count \
            or np.any(np.abs(f(np.array([mid]))) < 1e-9)

    def test_roots_are_sorted_and_accurate(self, gauss):
        f = sample_path_1d(gauss, M=300, seed=9)
        res = count_zeros_1d(f, (-20.0, 20.0), 0.05)
        assert np.all(np.diff(res.locations) > 0)
        assert np.max(np.abs(f(res.locations))) < 1e-9
        assert np.all(res.converged)

    def test_sign_change_cells(self):
        np.testing.assert_array_equal(sign_change_cells(np.array([1.0, -1.0, -2.0, 0.0, 3.0])), [0, 2])

    def test_specular_mean_count(self, gauss):
        k = 0.3
        lam2 = 1.0
        half = 8.0 * math.sqrt(lam2) / k
        counts = []
        for r in range(200):
            f = sample_path_1d(gauss, M=1000, seed=21, replicate=r, method="gaussian")
            counts.append(count_zeros_1d(lambda x, f=f: f(x, 1) - k * x, (-half, half), 0.05).count)
        m, s = _replicate_stats(counts)
        expected = sp2_expectation(SpecularConfig(k, gauss))
        assert abs(m - expected) <= 3 * s


class TestVectorZeros:
    def test_single_root(self):
        f = lambda x, y: (x - 0.3, np.ones_like(x), np.zeros_like(x))  # noqa: E731
        g = lambda x, y: (y - 0.7, np.zeros_like(x), np.ones_like(x))  # noqa: E731
        res = count_vector_zeros_2d(f, g, (0.0, 1.0, 0.0, 1.0), 0.05)
        assert res.count == 1
        np.testing.assert_allclose(res.locations[0], [0.3, 0.7], atol=1e-10)

    def test_cosines(self):
        f = lambda x, y: (np.cos(x), -np.sin(x), np.zeros_like(x))  # noqa: E731
        g = lambda x, y: (np.cos(y), np.zeros_like(y), -np.sin(y))  # noqa: E731
        res = count_vector_zeros_2d(f, g, (0.0, 2 * math.pi, 0.0, 2 * math.pi), 0.05)
        assert res.count == 4


class TestLevelCurves:
    def test_straight_line(self):
        f = lambda x, y: (x, np.ones_like(x), np.zeros_like(x))  # noqa: E731
        res = extract_level_curves(f, 0.5, (0.0, 1.0, 0.0, 1.0), 0.01)
        assert res.total_length == pytest.approx(1.0, abs=1e-3)
        np.testing.assert_allclose(res.angles, 0.0, atol=1e-12)

    def test_circle(self):
        f = lambda x, y: (x * x + y * y, 2 * x, 2 * y)  # noqa: E731
        res = extract_level_curves(f, 1.0, (-1.5, 1.5, -1.5, 1.5), 0.01)
        assert res.total_length == pytest.approx(2 * math.pi, rel=0.01)

    def test_length_converges_with_step(self, ring):
        f = sample_field_2d(ring, M=300, seed=6).with_gradient()
        coarse = extract_level_curves(f, 0.0, (0.0, 20.0, 0.0, 20.0), 0.2).total_length
        fine = extract_level_curves(f, 0.0, (0.0, 20.0, 0.0, 20.0), 0.1).total_length
        assert abs(coarse - fine) < 0.01 * fine

    def test_flat_cells_are_tallied(self):
        f = lambda x, y: (np.zeros_like(x), np.zeros_like(x), np.zeros_like(x))  # noqa: E731
        res = extract_level_curves(f, 0.0, (0.0, 1.0, 0.0, 1.0), 0.25)
        assert res.skipped_cells == 16
        assert res.total_length == 0.0


def test_dump_csv(tmp_path):
    path = dump_csv(tmp_path / "out.csv", {"x": [0.0, 1.0], "y": np.array([[1.0], [2.0]])})
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y"
    assert len(lines) == 3


def test_bump_model_can_be_sampled_on_a_lattice():
    model = BumpConvolutionCovariance(2.0, 5)
    f = sample_path_1d(model, M=1024, seed=0, method="lattice", period=64.0)
    x = np.linspace(0, 10, 5)
    assert np.all(np.isfinite(f(x, 2)))
    assert GaussianCovariance(1.0, 1.0).variance == 1.0
