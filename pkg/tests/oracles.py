"""Independent reference computations used to derive the frozen test values.

Nothing here imports ``ricewaves``. Each oracle rebuilds its quantity from
first principles with scipy (adaptive quadrature, special functions, dense
linear algebra), so agreement with the package is a genuine cross-check.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate, linalg, special, stats

# ---------------------------------------------------------------------------
# 1D covariance with compact support: Gamma = c (g * g), g(z) = (1 - (2z/delta)^2)^n
# ---------------------------------------------------------------------------


def _bump(delta: float, exponent: int) -> Polynomial:
    return Polynomial([1.0, 0.0, -4.0 / delta**2]) ** exponent


def bump_moments(delta: float = 2.0, exponent: int = 5) -> dict[int, float]:
    """``lambda_{2j} = int (g^(j))^2 / int g^2`` (Parseval), for j = 0..4."""
    g = _bump(delta, exponent)
    half = delta / 2.0
    norm = integrate.quad(lambda z: g(z) ** 2, -half, half, epsabs=0, epsrel=1e-13)[0]
    out = {}
    for j in range(5):
        d = g.deriv(j) if j else g
        out[2 * j] = integrate.quad(lambda z: d(z) ** 2, -half, half, epsabs=0, epsrel=1e-13)[0] / norm
    return out


def bump_covariance(z: float, order: int = 0, delta: float = 2.0, exponent: int = 5) -> float:
    """``Gamma^(order)(z) = c int g(s) g^(order)(s + z) ds`` with ``Gamma(0) = 1``."""
    g = _bump(delta, exponent)
    d = g.deriv(order) if order else g
    half = delta / 2.0
    norm = integrate.quad(lambda s: g(s) ** 2, -half, half, epsabs=0, epsrel=1e-13)[0]
    lo, hi = max(-half, -half - z), min(half, half - z)
    if lo >= hi:
        return 0.0
    return integrate.quad(lambda s: g(s) * d(s + z), lo, hi, epsabs=1e-15, epsrel=1e-13)[0] / norm


def h_zero_shift(rho: float) -> float:
    """``E|xi eta|`` for standard normals with correlation ``rho``, by 2D quadrature."""
    c = math.sqrt(1.0 - rho * rho)

    def inner(y):
        # E|x| given y, with x | y ~ N(rho y, 1 - rho^2), times |y| phi(y)
        m = rho * y
        return abs(y) * stats.norm.pdf(y) * stats.foldnorm(abs(m) / c, scale=c).mean()

    return integrate.quad(inner, -np.inf, np.inf, epsabs=1e-13, epsrel=1e-12)[0]


def h_shifted(rho: float, mu: float, nu: float) -> float:
    """``E|xi + mu| |eta + nu|`` by nested quadrature (conditioning on ``eta``)."""
    c = math.sqrt(1.0 - rho * rho)

    def inner(y):
        m = rho * y + mu
        return abs(y + nu) * stats.norm.pdf(y) * stats.foldnorm(abs(m) / c, scale=c).mean()

    kink = -nu
    return (integrate.quad(inner, -np.inf, kink, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
            + integrate.quad(inner, kink, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)[0])


def theta_conditioned(delta: float = 2.0, exponent: int = 5, support: float | None = None) -> float:
    """Leading variance coefficient from the conditional second-derivative moments.

    ``sigma^2 = lambda4 - q``, ``rho sigma^2 = Gamma''''(z) - q``,
    ``q = Gamma'''^2 / (2 (lambda2 + Gamma''))`` and
    ``theta = J / sqrt(2) + sqrt(2 lambda4 / pi) - 2 D lambda4 / sqrt(pi^3 lambda2)``
    with ``J`` integrated over ``[-D, D]``.
    """
    lam = bump_moments(delta, exponent)
    l2, l4 = lam[2], lam[4]
    D = delta if support is None else support

    def f(z):
        g2 = bump_covariance(z, 2, delta, exponent)
        g3 = bump_covariance(z, 3, delta, exponent)
        g4 = bump_covariance(z, 4, delta, exponent)
        q = g3 * g3 / (2.0 * (l2 + g2))
        s2 = l4 - q
        rho = max(-1.0, min(1.0, (g4 - q) / s2))
        h = 2.0 / math.pi * (math.sqrt(1.0 - rho * rho) + rho * math.asin(rho))
        return s2 * h / math.sqrt(2.0 * math.pi * (l2 + g2))

    # the integrand is O(z) at the origin, where s2 cancels; [0, 1e-6] contributes ~1e-12
    J = 2.0 * integrate.quad(f, 1e-6, D, epsabs=1e-13, epsrel=1e-11, limit=400, points=[delta] if D > delta else None)[0]
    return J / math.sqrt(2.0) + math.sqrt(2.0 * l4 / math.pi) - 2.0 * D * l4 / math.sqrt(math.pi**3 * l2)


# ---------------------------------------------------------------------------
# Exact specular points
# ---------------------------------------------------------------------------


def reflecting_slope(x, w, h1: float, h2: float):
    """Slope of the surface at ``(x, w)`` that reflects ``(0, h1)`` into ``(0, h2)``.

    The normal bisects the unit vectors toward source and observer, giving
    ``x (r1 + r2) / (a1 r2 + a2 r1)`` with ``a_i = h_i - w``, ``r_i = |(x, a_i)|``.
    Works for complex arguments (complex-step differentiation).
    """
    a1, a2 = h1 - w, h2 - w
    r1 = np.sqrt(x * x + a1 * a1)
    r2 = np.sqrt(x * x + a2 * a2)
    return x * (r1 + r2) / (a1 * r2 + a2 * r1)


def slope_partials(x: float, w: float, h1: float, h2: float, step: float = 1e-30) -> tuple[float, float, float]:
    m = reflecting_slope(x, w, h1, h2)
    mx = reflecting_slope(x + 1j * step, w, h1, h2).imag / step
    mw = reflecting_slope(x, w + 1j * step, h1, h2).imag / step
    return float(np.real(m)), mx, mw


def sp1_total(h1: float, h2: float, lambda2: float = 1.0, lambda4: float = 3.0) -> float:
    """Expected number of exact specular points on the line, by nested scipy quadrature."""
    c = math.sqrt(lambda4 - lambda2 * lambda2)

    def g(x, w):
        m1, mx, mw = slope_partials(x, w, h1, h2)
        m = (lambda2 * w + mx + mw * m1) / c
        fold = stats.foldnorm(abs(m)).mean()
        return fold * math.exp(-0.5 * (w * w + m1 * m1 / lambda2))

    k = 0.5 * (1.0 / h1 + 1.0 / h2)
    reach = 12.0 * math.sqrt(lambda2) / k

    def over_w(x):
        return integrate.quad(lambda w: g(x, w), -8.0, 8.0, epsabs=1e-12, epsrel=1e-10)[0]

    total = integrate.quad(over_w, -reach, reach, points=[0.0], epsabs=1e-10, epsrel=1e-10, limit=200)[0]
    return c / (2.0 * math.pi * math.sqrt(lambda2)) * total


def gauss_abs(mu: float, sigma: float) -> float:
    return float(stats.foldnorm(abs(mu) / sigma, scale=sigma).mean())


# ---------------------------------------------------------------------------
# Quadratic forms: E|det| of the Hessian
# ---------------------------------------------------------------------------

_DET = np.array([[0.0, 0.5, 0.0], [0.5, 0.0, 0.0], [0.0, 0.0, -1.0]])


def det_form_eigenvalues(sigma: np.ndarray) -> np.ndarray:
    root = np.real(linalg.sqrtm(sigma))
    return np.linalg.eigvalsh(root @ _DET @ root)


def abs_det_mean(sigma: np.ndarray, k: float = 0.0) -> float:
    """``E|(X - k)(Y - k) - Z^2|`` for ``(X, Y, Z) ~ N(0, sigma)``.

    ``|d| = (2/pi) int_0^inf (1 - cos(t d)) / t^2 dt`` and the characteristic
    function of the shifted quadratic form is evaluated from the
    eigen-decomposition of ``sigma^(1/2) Q sigma^(1/2)``.
    """
    root = np.real(linalg.sqrtm(sigma))
    lam, vec = np.linalg.eigh(root @ _DET @ root)
    # d = (z + m)^T Q (z + m) with m = (-k, -k, 0): linear part 2 m^T Q root z, constant m^T Q m
    m = np.array([-k, -k, 0.0])
    b = vec.T @ (root @ (_DET @ m))
    const = float(m @ _DET @ m)

    def re_cf(t):
        z = 1.0 - 2.0j * lam * t
        val = np.exp(1j * t * const) * np.prod(z ** -0.5 * np.exp(-2.0 * (b * t) ** 2 / z))
        return val.real

    scale = 1.0 / max(np.abs(lam).max(), k * k, 1e-300)
    head = integrate.quad(lambda t: (1.0 - re_cf(t)) / (t * t), 1e-8 * scale, scale, epsabs=0, epsrel=1e-11, limit=400)[0]
    # 1 - Re cf(t) ~ c t^2 near 0, so the piece below 1e-8 scale is negligible
    tail = integrate.quad(lambda u: (1.0 - re_cf(1.0 / u)), 0.0, 1.0 / scale, epsabs=0, epsrel=1e-11, limit=400)[0]
    return 2.0 / math.pi * (head + tail)


def abs_det_monte_carlo(sigma: np.ndarray, k: float, draws: int, seed: int) -> tuple[float, float]:
    rng = np.random.default_rng(seed)
    z = rng.multivariate_normal(np.zeros(3), sigma, size=draws)
    d = np.abs((z[:, 0] - k) * (z[:, 1] - k) - z[:, 2] ** 2)
    return float(d.mean()), float(d.std(ddof=1) / math.sqrt(draws))


# ---------------------------------------------------------------------------
# Dislocation pair correlation from generic Gaussian regression
# ---------------------------------------------------------------------------


def _ring_radial(r: float):
    """``rho, rho', rho''`` for the ring spectrum ``k0 = 1`` (``rho = J0``)."""
    j0, j1 = special.j0(r), special.j1(r)
    return j0, -j1, -(j0 - j1 / r)


def conditional_gradient_cov(r: float) -> np.ndarray:
    """Covariance of ``(xi_x(0), xi_y(0), xi_x(p), xi_y(p))`` given ``xi(0) = xi(p) = 0``, ``p = (r, 0)``."""
    c, d1, d2 = _ring_radial(r)
    f0 = 0.5  # -rho''(0) for the ring spectrum
    # Hessian of R(v) = rho(|v|) at v = (r, 0)
    hxx, hyy = d2, d1 / r
    vals = np.array([[1.0, c], [c, 1.0]])
    grads = np.array([[f0, 0, -hxx, 0], [0, f0, 0, -hyy], [-hxx, 0, f0, 0], [0, -hyy, 0, f0]])
    # Cov(grad, value): d/dq R(q - p) convention
    cross = np.array([[0.0, d1], [0.0, 0.0], [-d1, 0.0], [0.0, 0.0]])
    return grads - cross @ np.linalg.solve(vals, cross.T)


def _jacobian_forms(t1, t2) -> np.ndarray:
    """Symmetric matrices of ``t1 D(0) + t2 D(p)`` over ``(xi grads, eta grads)``, stacked."""
    t1, t2 = np.broadcast_arrays(np.asarray(t1, float), np.asarray(t2, float))
    M = np.zeros(t1.shape + (8, 8))
    # D(q) = xi_x eta_y - xi_y eta_x; xi grads at indices 0..3, eta grads 4..7
    for t, (ix, iy) in ((t1, (0, 1)), (t2, (2, 3))):
        M[..., ix, 4 + iy] += 0.5 * t
        M[..., 4 + iy, ix] += 0.5 * t
        M[..., iy, 4 + ix] -= 0.5 * t
        M[..., 4 + ix, iy] -= 0.5 * t
    return M


def pair_charfn(r: float, t1, t2) -> np.ndarray:
    S = conditional_gradient_cov(r)
    root = np.real(linalg.sqrtm(S))
    big = np.zeros((8, 8))
    big[:4, :4] = root
    big[4:, 4:] = root
    lam = np.linalg.eigvalsh(big @ _jacobian_forms(t1, t2) @ big)
    return np.prod((1.0 - 2.0j * lam) ** -0.5, axis=-1).real


def pair_correlation(r: float, nodes: int = 400) -> float:
    """``A(r) = E[|D(0)| |D(p)| | zeros] p(0)``, ``p(0) = 1/((2 pi)^2 (1 - rho^2))``."""
    c = special.j0(r)
    x, w = np.polynomial.legendre.leggauss(nodes)
    # t = tan(theta) on [0, pi/2), split in two panels at pi/4 for resolution near the pole
    th = np.concatenate([(x + 1) * math.pi / 8, (x + 3) * math.pi / 8])
    wt = np.concatenate([w, w]) * math.pi / 8
    # t = s tan(theta) with s the reciprocal spread of the Jacobian determinant
    S = conditional_gradient_cov(r)
    s = 1.0 / math.sqrt(S[0, 0] * S[1, 1])
    t = s * np.tan(th)
    jac = s * wt / np.cos(th) ** 2
    T1, T2 = np.meshgrid(t, t, indexing="ij")
    comb = (1.0 - pair_charfn(r, T1, 0.0 * T2) - pair_charfn(r, 0.0 * T1, T2)
            + 0.5 * (pair_charfn(r, T1, T2) + pair_charfn(r, T1, -T2)))
    expectation = 4.0 / math.pi**2 * float(jac @ (comb / (T1 * T1 * T2 * T2)) @ jac)
    return expectation / ((2.0 * math.pi) ** 2 * (1.0 - c * c))


def elliptic_k(m: float) -> float:
    return float(special.ellipk(m))
