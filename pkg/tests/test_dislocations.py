import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

import oracles
import reference_values as ref
from ricewaves.dislocations import (DislocationModel, InadmissiblePairError, PairQuantities, correlation_A,
                                    correlation_A_double, lambda2_3d, mean_density_2d, mean_length_3d,
                                    pair_charfn_T, residue_integral, sinc_covariance_3d)
from ricewaves.simulate import count_vector_zeros_2d, sample_dislocation_pair
from ricewaves.spectral_model import GaussianRingSpectrum, RingSpectrum


class TestMeanDensities:
    def test_ring(self, ring):
        assert DislocationModel(ring).mean_density == pytest.approx(0.25 / math.pi, rel=1e-15)
        assert DislocationModel(ring, 3).mean_density == pytest.approx(0.5 / math.pi, rel=1e-15)

    @given(st.floats(1e-3, 1e3))
    def test_space_is_twice_the_plane(self, lam2):
        assert mean_length_3d(lam2) == pytest.approx(2 * mean_density_2d(lam2), rel=1e-15)

    def test_rejects(self, ring):
        with pytest.raises(ValueError):
            mean_density_2d(0.0)
        with pytest.raises(ValueError, match="dimension"):
            DislocationModel(ring, 4)

    def test_sinc_kernel_for_a_shell(self):
        # a narrow shell at |k| = 1 gives the sinc covariance and lambda2 = 1/3
        shell = lambda k: np.exp(-0.5 * ((k - 1.0) / 0.01) ** 2)  # noqa: E731
        c = sinc_covariance_3d(shell, np.array([0.0, 2.0]), 1.2, panels=64)
        assert c[1] / c[0] == pytest.approx(math.sin(2.0) / 2.0, rel=1e-3)
        assert lambda2_3d(shell, 1.2, panels=64) == pytest.approx(1 / 3, rel=1e-3)


class TestCharacteristicFunction:
    def test_at_origin(self, ring):
        assert pair_charfn_T(PairQuantities.at(ring, 1.0), 0.0, 0.0) == 1.0

    @given(st.floats(0.1, 10.0), st.floats(-5, 5), st.floats(-5, 5))
    def test_routes_agree(self, r, t1, t2):
        pq = PairQuantities.at(RingSpectrum(1.0), r)
        assert pair_charfn_T(pq, t1, t2, "eigen") == pytest.approx(pair_charfn_T(pq, t1, t2), abs=1e-10)

    @pytest.mark.parametrize("r", [0.5, 1.3, 3.0])
    def test_against_oracle(self, ring, r):
        pq = PairQuantities.at(ring, r)
        t1, t2 = np.array([0.7, -2.0, 0.1]), np.array([-0.4, 1.5, 3.0])
        np.testing.assert_allclose(pair_charfn_T(pq, t1, t2), oracles.pair_charfn(r, t1, t2), atol=1e-12)

    def test_unknown_route(self, ring):
        with pytest.raises(ValueError, match="route"):
            pair_charfn_T(PairQuantities.at(ring, 1.0), 0.1, 0.1, "series")


class TestPairDensity:
    @pytest.mark.parametrize("r", sorted(ref.A_RING))
    def test_against_oracle(self, ring, r):
        assert correlation_A(ring, r) == pytest.approx(ref.A_RING[r], rel=1e-6)

    @pytest.mark.parametrize("r", [0.3, 1.0, 2.5, 6.0])
    def test_single_and_double_integrals_agree(self, ring, r):
        assert correlation_A_double(ring, r) == pytest.approx(correlation_A(ring, r), rel=1e-4)

    def test_large_separation_factorizes(self):
        spec = GaussianRingSpectrum(1.0, 0.1)
        d = mean_density_2d(spec.lambda2)
        assert correlation_A(spec, 50.0) == pytest.approx(d * d, rel=1e-6)

    @given(st.floats(0.01, 30.0))
    def test_non_negative(self, r):
        assert correlation_A(RingSpectrum(1.0), r) >= 0

    def test_model_and_spectrum_are_interchangeable(self, ring):
        assert correlation_A(DislocationModel(ring), 1.0) == correlation_A(ring, 1.0)

    def test_refuses_tiny_separation(self, ring):
        with pytest.raises(ValueError, match="correlation lengths"):
            correlation_A(ring, 1e-4)

    def test_degenerate_pair(self):
        with pytest.raises(InadmissiblePairError):
            PairQuantities(1.0, 1.0, 0.0, 0.5, 0.5, 0.5)


@pytest.mark.slow
def test_pair_density_against_simulated_pair_counts(ring):
    # pairs at distance in [0.85, 1.15] around points of an inner square, which keeps the annuli inside the window
    window, inner, (lo, hi) = 20.0, (2.0, 18.0), (0.85, 1.15)
    pairs = []
    for r in range(200):
        xi, eta = sample_dislocation_pair(ring, 256, 7, r, method="gaussian", stratified=True)
        p = count_vector_zeros_2d(xi.with_gradient(), eta.with_gradient(), (0, window, 0, window), 0.1).locations
        core = p[np.all((p >= inner[0]) & (p <= inner[1]), axis=1)]
        d = np.hypot(core[:, None, 0] - p[None, :, 0], core[:, None, 1] - p[None, :, 1])
        pairs.append(np.count_nonzero((d > lo) & (d < hi)))
    area = (inner[1] - inner[0]) ** 2
    expected = area * 2 * math.pi * integrate.quad(lambda s: s * correlation_A(ring, s), lo, hi)[0]
    pairs = np.asarray(pairs, dtype=float)
    assert abs(pairs.mean() - expected) <= 4 * pairs.std(ddof=1) / math.sqrt(pairs.size)


class TestResidue:
    def test_spot_value(self):
        direct = integrate.quad(lambda t: (t * t + 1) / (t**4 + 4 * t * t + 4), -np.inf, np.inf, epsabs=1e-13)[0]
        assert residue_integral(-1.0, -4.0, 4.0) == pytest.approx(direct, rel=1e-8)

    @given(st.floats(-3, 3), st.floats(-1.5, 1.5), st.floats(0.2, 4.0))
    def test_against_quadrature(self, gamma, s_frac, q):
        P = q * q
        S = s_frac * q  # keeps 2 sqrt(P) - S > 0
        direct = integrate.quad(lambda t: (t * t - gamma) / (t**4 - S * t * t + P), -np.inf, np.inf,
                                epsabs=1e-12, epsrel=1e-11)[0]
        assert residue_integral(gamma, S, P) == pytest.approx(direct, rel=1e-8, abs=1e-10)

    def test_rejects_real_roots(self):
        with pytest.raises(ValueError):
            residue_integral(0.0, 3.0, 1.0)
        with pytest.raises(ValueError):
            residue_integral(0.0, 0.0, -1.0)
