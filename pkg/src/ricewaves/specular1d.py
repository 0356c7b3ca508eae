"""One-dimensional specular points.

A specular point is a point of the surface ``y = W(x)`` reflecting a ray from a
source at height ``h1`` into an observer at height ``h2``. For large heights
the reflection condition becomes ``W'(x) = k x`` with ``k = (1/h1 + 1/h2) / 2``,
and the number ``S`` of such points has explicit first and second moments.
Without the approximation, the count is the number of zeros of
``Z(x) = W'(x) - m1(x, W(x))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .quadrature import IntegrationDomain, QuadratureError, gauss_legendre_nodes, integrate
from .spectral_model import CovarianceModel1D, DegenerateModelError
from .special import normal_cdf, normal_pdf

_SQRT_2PI = math.sqrt(2.0 * math.pi)
W_TRUNCATION = 8.0
_H_HALF_WIDTH = 12.0
_H_NODES = 24
_H_SUBPANELS = 4


def gauss_abs_mean(mu, sigma):
    """``E|Z|`` for ``Z ~ N(mu, sigma**2)``: ``mu (2 Phi(mu/sigma) - 1) + 2 sigma phi(mu/sigma)``."""
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma < 0):
        raise ValueError("sigma must be non-negative")
    pos = sigma > 0
    safe = np.where(pos, sigma, 1.0)
    t = mu / safe
    val = mu * (2.0 * normal_cdf(t) - 1.0) + 2.0 * safe * normal_pdf(t)
    out = np.where(pos, val, np.abs(mu))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class SpecularConfig:
    """Slope ``k`` of the linearized reflection condition and the surface model.

    Build it from heights with :meth:`from_heights` (then ``k`` is
    ``(1/h1 + 1/h2) / 2``) or directly from ``k``.
    """

    k: float
    model: CovarianceModel1D
    h1: float | None = None
    h2: float | None = None

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError(f"k must be positive, got {self.k}")
        for name in ("h1", "h2"):
            h = getattr(self, name)
            if h is not None and not h > 0:
                raise ValueError(f"{name} must be positive, got {h}")
        lam2 = self.model.spectral_moment(2)
        lam4 = self.model.spectral_moment(4)
        if not lam4 * self.model.variance > lam2 * lam2:
            raise DegenerateModelError("need lambda4 > lambda2^2 / lambda0")

    @classmethod
    def from_heights(cls, h1: float, h2: float, model: CovarianceModel1D) -> "SpecularConfig":
        if not (h1 > 0 and h2 > 0):
            raise ValueError(f"heights must be positive, got h1={h1}, h2={h2}")
        return cls(0.5 * (1.0 / h1 + 1.0 / h2), model, h1, h2)

    @property
    def lambda2(self) -> float:
        return self.model.spectral_moment(2)

    @property
    def lambda4(self) -> float:
        return self.model.spectral_moment(4)


@dataclass(frozen=True)
class ThetaResult:
    """Leading coefficient of ``Var(S) = theta / k + O(1)``.

    ``theta`` is assembled from ``components = (J / sqrt(2), sqrt(2 lambda4 / pi),
    2 delta lambda4 / sqrt(pi^3 lambda2))`` as ``c0 + c1 - c2``. ``form`` records
    which pair-correlation weight produced ``J`` (see :func:`theta_coefficient`).
    """

    theta: float
    J: float
    delta: float
    components: tuple[float, float, float]
    form: str = "conditioned"

    @classmethod
    def assemble(cls, J: float, lambda2: float, lambda4: float, delta: float,
                 form: str = "conditioned") -> "ThetaResult":
        parts = (J / math.sqrt(2.0), math.sqrt(2.0 * lambda4 / math.pi),
                 2.0 * delta * lambda4 / math.sqrt(math.pi**3 * lambda2))
        return cls(parts[0] + parts[1] - parts[2], J, delta, parts, form)


# ---------------------------------------------------------------------------
# Crossings and the linearized count
# ---------------------------------------------------------------------------


def crossing_rate(model: CovarianceModel1D, u: float = 0.0, length: float = 1.0) -> float:
    """Expected number of crossings of level ``u`` on an interval of the given length."""
    lam0, lam2 = model.variance, model.spectral_moment(2)
    return length / math.pi * math.sqrt(lam2 / lam0) * math.exp(-u * u / (2.0 * lam0))


def sp2_intensity(x, config: SpecularConfig, sigma: Callable | float | None = None):
    """Density in ``x`` of the linearized specular points.

    ``sigma`` defaults to ``sqrt(lambda4)``; a callable ``sigma(x)`` may be passed
    for a surface whose second-derivative variance varies along the line.
    """
    x = np.asarray(x, dtype=float)
    lam2 = config.lambda2
    if sigma is None:
        s = math.sqrt(config.lambda4)
    else:
        s = sigma(x) if callable(sigma) else float(sigma)
    return gauss_abs_mean(config.k, s) / math.sqrt(lam2) * normal_pdf(config.k * x / math.sqrt(lam2))


def sp2_expectation(
    config: SpecularConfig,
    interval: tuple[float, float] | None = None,
    mode: str = "exact",
    order: int = 4,
    sigma: Callable | None = None,
) -> float:
    """Expected number of linearized specular points.

    Args:
        config: Slope and model.
        interval: ``(a, b)``; ``None`` means the whole line.
        mode: ``exact`` or ``taylor``. The Taylor mode is for the whole line only and
            keeps the terms up to ``k**order`` of ``G(k, sqrt(lambda4)) / k`` times ``k``.
        order: 0, 2 or 4.
        sigma: Optional ``x``-dependent standard deviation of ``W''``.
    """
    lam2, lam4, k = config.lambda2, config.lambda4, config.k
    if mode == "taylor":
        if interval is not None or sigma is not None:
            raise ValueError("the Taylor expansion is only available for the stationary whole-line count")
        if order not in (0, 2, 4):
            raise ValueError(f"Taylor order must be 0, 2 or 4, got {order}")
        if not k * k < lam4:
            raise ValueError("Taylor expansion needs k^2 < lambda4")
        r = k * k / lam4
        terms = [1.0, 0.5 * r, -r * r / 24.0][: order // 2 + 1]
        return math.sqrt(2.0 * lam4 / math.pi) / k * math.fsum(terms)
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    if sigma is not None:
        domain = IntegrationDomain.full_line() if interval is None else IntegrationDomain.finite(*interval)
        return integrate(lambda x: sp2_intensity(x, config, sigma), domain, tol=1e-10).value
    g = gauss_abs_mean(k, math.sqrt(lam4))
    if interval is None:
        return g / k
    a, b = interval
    s = math.sqrt(lam2)
    return g / k * float(normal_cdf(k * b / s) - normal_cdf(k * a / s))


def clt_statistic(S, k: float, lambda4: float, theta: float):
    """Standardized count ``(S - sqrt(2 lambda4/pi)/k) / sqrt(theta/k)``."""
    if not (theta > 0 and k > 0):
        raise ValueError("theta and k must be positive")
    S = np.asarray(S, dtype=float)
    out = (S - math.sqrt(2.0 * lambda4 / math.pi) / k) / math.sqrt(theta / k)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# E|xi + mu| |eta + nu| for a standard Gaussian pair with correlation rho
# ---------------------------------------------------------------------------


def h_abs_zero_shift(rho):
    """``E|xi||eta|`` for standard normals with correlation ``rho``."""
    rho = np.asarray(rho, dtype=float)
    if np.any(np.abs(rho) > 1):
        raise ValueError("correlation must lie in [-1, 1]")
    c = np.sqrt(np.clip(1.0 - rho * rho, 0.0, None))
    out = 2.0 / math.pi * (c + rho * np.arctan2(rho, c))
    return out if out.ndim else float(out)


def _h_abs_quadrature(rho, mu, nu):
    # E|x + mu| G(rho x + nu, sqrt(1 - rho^2)) over x ~ N(0,1). The Gaussian weight
    # confines the mass to [-12, 12]; the integrand has kinks at x = -mu and, when
    # |rho| = 1, at x = -nu/rho, which become panel breakpoints when they fall inside.
    rho, mu, nu = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (rho, mu, nu)))
    shape = rho.shape
    rho, mu, nu = rho.ravel(), mu.ravel(), nu.ravel()
    c = np.sqrt(np.clip(1.0 - rho * rho, 0.0, None))
    safe_rho = np.where(rho == 0, 1.0, rho)
    with np.errstate(over="ignore"):  # a subnormal rho sends the kink to +-inf, clipped below
        k2 = np.where(rho == 0, -mu, -nu / safe_rho)
    lim = _H_HALF_WIDTH
    edge = np.full(rho.size, lim)
    cuts = np.sort(np.column_stack([-edge, np.clip(-mu, -lim, lim), np.clip(k2, -lim, lim), edge]), axis=1)
    t, w = np.polynomial.legendre.leggauss(_H_NODES)
    total = np.zeros(rho.size)
    for p in range(3):
        a, b = cuts[:, p : p + 1], cuts[:, p + 1 : p + 2]
        width = (b - a) / _H_SUBPANELS
        for sub in range(_H_SUBPANELS):
            lo = a + width * sub
            x = lo + 0.5 * width * (1.0 + t)
            f = np.abs(x + mu[:, None]) * gauss_abs_mean(rho[:, None] * x + nu[:, None], c[:, None]) * normal_pdf(x)
            total += (f @ w) * 0.5 * width[:, 0]
    return total.reshape(shape)


def h_abs(rho, mu=0.0, nu=0.0, mode: str = "auto"):
    """``H(rho; mu, nu) = E|xi + mu||eta + nu|`` for standard normals with correlation ``rho``.

    ``mode='closed-form'`` requires ``mu = nu = 0``; ``mode='quadrature'`` works for any
    shift; ``auto`` picks the closed form when possible.
    """
    rho_a = np.asarray(rho, dtype=float)
    if np.any(np.abs(rho_a) > 1):
        raise ValueError("correlation must lie in [-1, 1]")
    zero = np.all(np.asarray(mu) == 0) and np.all(np.asarray(nu) == 0)
    if mode == "closed-form" or (mode == "auto" and zero):
        if not zero:
            raise ValueError("the closed form needs mu = nu = 0")
        return h_abs_zero_shift(np.broadcast_to(rho_a, np.broadcast_shapes(rho_a.shape, np.shape(mu), np.shape(nu))))
    if mode not in ("auto", "quadrature"):
        raise ValueError(f"unknown mode {mode!r}")
    out = _h_abs_quadrature(rho_a, mu, nu)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Second factorial moment and the variance coefficient
# ---------------------------------------------------------------------------


def _pair_quantities(model: CovarianceModel1D, z):
    """Conditional variance and correlation of ``(W''(x), W''(y))`` given both slopes."""
    lam2 = model.spectral_moment(2)
    lam4 = model.spectral_moment(4)
    g2 = model.covariance(z, 2)
    g3 = model.covariance(z, 3)
    g4 = model.covariance(z, 4)
    det = lam2 * lam2 - g2 * g2
    sigma2 = lam4 - lam2 * g3 * g3 / det
    cov = g4 + g2 * g3 * g3 / det
    return lam2, lam4, g2, g3, det, sigma2, cov


def factorial_moment_density(x, y, config: SpecularConfig):
    """Integrand of ``E[S (S - 1)]`` at the pair ``(x, y)``.

    ``sigma^2(z) H(rho(z); m1/sigma, m2/sigma) p(kx, ky)`` with ``z = x - y``,
    where ``p`` is the joint density of ``(W'(x), W'(y))`` and ``m1, m2`` the
    conditional means of ``W''(x) - k`` and ``W''(y) - k``. On the diagonal the
    integrand tends to zero; for ``|z|`` below ``1e-4`` correlation lengths that
    limit is returned.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    model, k = config.model, config.k
    z = x - y
    near = np.abs(z) < 1e-4 * model.correlation_length
    zs = np.where(near, model.correlation_length, z)
    lam2, lam4, g2, g3, det, sigma2, cov = _pair_quantities(model, zs)
    bad = (det <= 0) & ~near
    if np.any(bad):
        raise DegenerateModelError(f"joint density of the slopes is degenerate at z = {float(z[bad].ravel()[0])}")
    sigma2 = np.clip(sigma2, 0.0, None)
    sig = np.sqrt(sigma2)
    rho = np.clip(cov / np.where(sig > 0, sigma2, 1.0), -1.0, 1.0)
    m1 = -k * (1.0 + g3 * (g2 * x + lam2 * y) / det)
    m2 = -k * (1.0 - g3 * (g2 * y + lam2 * x) / det)
    dens = np.exp(-0.5 * k * k * (lam2 * x * x + 2.0 * g2 * x * y + lam2 * y * y) / det) / (2.0 * math.pi * np.sqrt(det))
    safe_sig = np.where(sig > 0, sig, 1.0)
    h = h_abs(rho, m1 / safe_sig, m2 / safe_sig, mode="quadrature")
    out = np.where(near, 0.0, sigma2 * h * dens)
    return out if out.ndim else float(out)


def _pair_excess(config: SpecularConfig, interval: tuple[float, float] | None, nodes: int) -> float:
    """``E[S(S-1)] - E[S]^2`` restricted to ``interval`` (``None`` is the whole line).

    Only pairs closer than the covariance range differ from the independent
    product ``G^2 p(kx) p(ky)``, so the difference is integrated over that band
    in the coordinates ``c = (x + y)/2``, ``z = x - y``. Working with the
    difference avoids the cancellation between ``E[S(S-1)]`` and ``E[S]^2``.
    """
    model, k = config.model, config.k
    lam2 = config.lambda2
    s = math.sqrt(lam2)
    g = gauss_abs_mean(k, math.sqrt(config.lambda4))
    scale = model.correlation_length
    reach = model.support if math.isfinite(model.support) else 12.0 * scale
    if interval is not None:
        a, b = map(float, interval)
        if not b > a:
            raise ValueError(f"need a < b, got {interval}")
        reach = min(reach, b - a)
    z_panels = max(4, int(math.ceil(reach / (0.3 * scale))))
    zn, zw = gauss_legendre_nodes(0.0, reach, nodes, z_panels)
    c_half = 10.0 * math.sqrt(2.0 * lam2) / k
    total = 0.0
    for z, wz in zip(zn, zw):
        lo, hi = -c_half, c_half
        if interval is not None:
            lo, hi = max(lo, a + 0.5 * z), min(hi, b - 0.5 * z)
            if hi <= lo:
                continue
        cn, cw = gauss_legendre_nodes(lo, hi, nodes, max(4, int(math.ceil((hi - lo) / (0.6 * s / k)))))
        x, y = cn + 0.5 * z, cn - 0.5 * z
        f = factorial_moment_density(x, y, config) - g * g * normal_pdf(k * x / s) * normal_pdf(k * y / s) / lam2
        total += 2.0 * wz * float(np.dot(cw, f))
    return total


def second_factorial_moment(config: SpecularConfig, interval: tuple[float, float] | None = None,
                            nodes: int = 16) -> float:
    """``E[S(S-1)]`` for the linearized specular count on ``interval``."""
    mean = sp2_expectation(config, interval)
    return _pair_excess(config, interval, nodes) + mean * mean


def sp2_variance(config: SpecularConfig, interval: tuple[float, float] | None = None,
                 nodes: int = 16) -> float:
    """Non-asymptotic ``Var(S)`` from the second factorial moment."""
    return _pair_excess(config, interval, nodes) + sp2_expectation(config, interval)


def _theta_integrand(model: CovarianceModel1D, form: str):
    # sigma^2 H(rho; 0, 0) / sqrt(2 pi (lambda2 + Gamma''(z))) with the conditional
    # moments of (W''(x), W''(y)) chosen by ``form``
    lam2, lam4 = model.spectral_moment(2), model.spectral_moment(4)

    def f(z):
        z = np.asarray(z, dtype=float)
        small = np.abs(z) < 1e-4 * model.correlation_length
        zs = np.where(small, 1.0, z)
        _, _, g2, g3, _, sigma2, cov = _pair_quantities(model, zs)
        if form == "conditioned":
            q = g3 * g3 / (2.0 * (lam2 + g2))
            sigma2, cov = lam4 - q, model.covariance(zs, 4) - q
        sigma2 = np.clip(sigma2, 0.0, None)
        rho = np.clip(cov / np.where(sigma2 > 0, sigma2, 1.0), -1.0, 1.0)
        val = sigma2 * h_abs_zero_shift(rho) / np.sqrt(2.0 * math.pi * (lam2 + g2))
        return np.where(small, 0.0, val)

    return f


def _panel_integral(f, a: float, b: float, tol: float, panels: int = 4) -> float:
    """Composite 32-point Gauss-Legendre with panel doubling until two passes agree.

    Used instead of adaptive bisection for the variance integrand, whose
    evaluation near ``z = 0`` carries rounding noise of order ``eps / z**4``:
    an adaptive rule would chase that noise, while Gauss nodes stay clear of it.
    """
    if b <= a:
        return 0.0
    prev = None
    while panels <= 4096:
        x, w = gauss_legendre_nodes(a, b, 32, panels)
        val = float(np.dot(w, f(x)))
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        prev = val
        panels *= 2
    raise QuadratureError("panel doubling did not converge", prev, float("nan"))


_THETA_FORMS = ("conditioned", "published")


def theta_coefficient(model: CovarianceModel1D, delta: float | None = None,
                      variant: str = "compact-support", tol: float = 1e-9,
                      form: str = "conditioned") -> ThetaResult:
    """Leading variance coefficient of the linearized specular count.

    ``J = int sigma^2(z) H(rho(z); 0, 0) / sqrt(2 pi (lambda2 + Gamma''(z))) dz``
    over ``[-delta, delta]``. Two choices of ``(sigma^2, rho)`` are available:

    ``conditioned`` (default)
        Moments of ``(W''(x), W''(y))`` given ``W'(x) = W'(y)``:
        ``sigma^2 = lambda4 - q`` and ``rho sigma^2 = Gamma''''(z) - q`` with
        ``q = Gamma'''^2 / (2 (lambda2 + Gamma''))``. For pairs at distance of
        order ``1/k`` from the origin the regression means are of order one, and
        averaging ``H`` over them gives exactly this weight. It matches the
        non-asymptotic :func:`sp2_variance` as ``k -> 0``.
    ``published``
        Moments given both slopes, with the means dropped. This omits the
        order-``1/k`` contribution of the means and underestimates the variance.

    ``compact-support`` integrates over ``[-delta, delta]`` (``delta`` defaults
    to the model's support and may be any larger value). ``mixing`` uses the
    whole-line form, which needs only integrable decay of the covariance; its
    ``J`` is reported for ``delta = 0``.
    """
    if form not in _THETA_FORMS:
        raise ValueError(f"unknown form {form!r}; expected one of {_THETA_FORMS}")
    lam2, lam4 = model.spectral_moment(2), model.spectral_moment(4)
    f = _theta_integrand(model, form)
    if variant == "compact-support":
        support = model.support
        if delta is None:
            delta = support
        if not math.isfinite(delta) or not delta > 0:
            raise ValueError("compact-support variant needs a finite positive delta")
        probe = np.linspace(delta, delta + 2.0 * model.correlation_length, 64)[1:]
        if np.any(np.abs(model.covariance(probe)) > 1e-12 * model.variance):
            raise ValueError(f"covariance does not vanish beyond delta = {delta}")
        inner = min(delta, support)
        half = _panel_integral(f, 0.0, inner, tol) + _panel_integral(f, inner, delta, tol)
        return ThetaResult.assemble(2.0 * half, lam2, lam4, float(delta), form)
    if variant == "mixing":
        flat = lam4 / (math.pi * math.sqrt(lam2))

        def g(z):
            return f(z) * math.sqrt(2.0 * math.pi) / 2.0 - flat

        reach = min(model.support, 12.0 * model.correlation_length)
        value = _panel_integral(g, 0.0, reach, tol)
        if not math.isfinite(model.support):
            value += integrate(g, IntegrationDomain.half_line(reach), tol=max(tol, 1e-12)).value
        value *= 2.0
        theta = math.sqrt(2.0 * lam4 / math.pi) + value / math.sqrt(math.pi)
        parts = (value / math.sqrt(math.pi), math.sqrt(2.0 * lam4 / math.pi), 0.0)
        return ThetaResult(theta, math.sqrt(2.0) * value / math.sqrt(math.pi), 0.0, parts, form)
    raise ValueError(f"unknown variant {variant!r}")


# ---------------------------------------------------------------------------
# Exact specular points
# ---------------------------------------------------------------------------


def m1_and_derivatives(x, w, h1: float, h2: float):
    """``m1(x, w)`` (slope of the reflecting surface) and its partial derivatives.

    Uses ``m1 = x a / (s + P - x^2)`` with ``a = alpha1 + alpha2``,
    ``P = alpha1 alpha2``, ``s = sqrt((x^2 + alpha1^2)(x^2 + alpha2^2))`` and
    ``alpha_i = h_i - w``, an algebraically equivalent form that is regular at
    ``x = 0`` (the denominator is at least ``2P``).
    """
    x, w = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(w, dtype=float))
    a1, a2 = h1 - w, h2 - w
    a = a1 + a2
    P = a1 * a2
    x2 = x * x
    q = a1 * a1 + a2 * a2
    s = np.sqrt((x2 + a1 * a1) * (x2 + a2 * a2))
    # s - x^2 and s_x - 2x rationalized so that large |x| does not cancel
    den = P + (q * x2 + P * P) / (s + x2)
    m1 = x * a / den
    den_x = x * (a1 * a1 - a2 * a2) ** 2 / (s * (2.0 * x2 + q + 2.0 * s))
    m1_x = a / den - x * a * den_x / (den * den)
    s_w = -(a1 * (x2 + a2 * a2) + a2 * (x2 + a1 * a1)) / s
    den_w = s_w - a
    m1_w = -2.0 * x / den - x * a * den_w / (den * den)
    return m1, m1_x, m1_w


def sp1_intensity(x, h1: float, h2: float, lambda2: float, lambda4: float,
                  w_nodes: int = 48, w_panels: int = 4):
    """``x``-density of the exact specular points (inner ``w`` integral done)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    wn, ww = gauss_legendre_nodes(-W_TRUNCATION, W_TRUNCATION, w_nodes, w_panels)
    X, Wv = np.meshgrid(x, wn, indexing="ij")
    m1, m1_x, m1_w = m1_and_derivatives(X, Wv, h1, h2)
    K = m1_x + m1_w * m1
    c = math.sqrt(lambda4 - lambda2 * lambda2)
    m = (lambda2 * Wv + K) / c
    f = gauss_abs_mean(m, 1.0) * np.exp(-0.5 * (Wv * Wv + m1 * m1 / lambda2))
    return c / (2.0 * math.pi * math.sqrt(lambda2)) * (f @ ww)


def sp1_exact_expectation(
    h1: float,
    h2: float,
    model: CovarianceModel1D | None = None,
    interval: tuple[float, float] | None = None,
    *,
    lambda2: float | None = None,
    lambda4: float | None = None,
    tol: float = 1e-9,
) -> tuple[float, float]:
    """Expected number of exact specular points.

    Moments come from ``model`` (which must have unit variance) or from the
    ``lambda2``/``lambda4`` keywords. ``interval=None`` integrates over the
    whole line.

    Returns:
        ``(value, tail_bound)`` where ``tail_bound`` bounds the mass dropped by
        truncating the ``w`` integral at ``|w| = 8``.
    """
    if model is not None:
        if abs(model.variance - 1.0) > 1e-12:
            raise ValueError("the exact specular formula assumes unit variance; normalize the model first")
        lambda2, lambda4 = model.spectral_moment(2), model.spectral_moment(4)
    if lambda2 is None or lambda4 is None:
        raise ValueError("provide a model or both lambda2 and lambda4")
    if not lambda4 > lambda2 * lambda2:
        raise DegenerateModelError("need lambda4 > lambda2^2: the conditional variance of W'' vanishes")
    if not (h1 > W_TRUNCATION and h2 > W_TRUNCATION):
        raise ValueError(f"heights must exceed the w truncation {W_TRUNCATION}")

    def f(x):
        return sp1_intensity(x, h1, h2, lambda2, lambda4)

    scale = math.sqrt(lambda2) / (0.5 * (1.0 / h1 + 1.0 / h2))
    if interval is None:
        # the intensity is even in x
        half = integrate(f, IntegrationDomain.half_line(0.0, breakpoints=(scale, 4 * scale)), tol=tol)
        value, err = 2.0 * half.value, 2.0 * half.error
    else:
        a, b = interval
        value, err = integrate(f, IntegrationDomain.finite(a, b), tol=tol)
    # Tail of the w integral: G(m, 1) <= |m| + 1 with |m| <= (lambda2 |w| + |K|) / c and
    # |K| <= 2k for the heights allowed here; the x integral of exp(-m1^2 / (2 lambda2))
    # is at most twice its small-slope value sqrt(2 pi lambda2) / k.
    c = math.sqrt(lambda4 - lambda2 * lambda2)
    k = 0.5 * (1.0 / h1 + 1.0 / h2)
    t = W_TRUNCATION
    w_tail = 2.0 * lambda2 * math.exp(-0.5 * t * t) / c + 2.0 * _SQRT_2PI * float(normal_cdf(-t)) * (1.0 + 2.0 * k / c)
    tail = c / (2.0 * math.pi * math.sqrt(lambda2)) * w_tail * 2.0 * math.sqrt(2.0 * math.pi * lambda2) / k
    if not math.isfinite(value):
        raise QuadratureError("exact specular integral is not finite", value, err)
    return value, tail
