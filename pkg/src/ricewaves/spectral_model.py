"""Covariance and spectrum models together with their spectral moments.

Conventions
-----------
A one-dimensional model is described by its covariance ``Gamma(z)`` and by
the two-sided spectral density ``S(w)`` with ``Gamma(z) = int S(w) cos(w z) dw``
over the whole line. The spectral moment of order ``n`` is
``lambda_n = int w**n S(w) dw = (-1)**(n/2) Gamma^(n)(0)``.

Planar isotropic spectra are described by a radial density ``Pi(k)`` on
``k >= 0`` with unit mass. The planar covariance is ``rho(r) = int J0(k r) Pi(k) dk``
and the two-index moments are ``lambda_ab = E[k_x**a k_y**b]`` for a wavevector
with that radial law and a uniform direction.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Mapping

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import simpson

from .linalg import jacobi_eigh
from .quadrature import QuadratureError, gauss_legendre_nodes
from .special import bessel_j0, bessel_j1

MAX_ORDER = 8


class DegenerateModelError(ValueError):
    """A model violates a non-degeneracy condition required downstream."""


class MissingMomentError(KeyError):
    """A spectral moment needed by an evaluator was not supplied."""


# ---------------------------------------------------------------------------
# Spectral moments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralMoments:
    """Map from a multi-index to a spectral moment.

    Keys are tuples: ``(n,)`` for a process, ``(a, b)`` for a planar field and
    ``(a, b, c)`` for a field indexed by two space variables and time.
    """

    entries: Mapping[tuple[int, ...], float]
    dim: int

    def __post_init__(self):
        clean = {}
        for key, value in dict(self.entries).items():
            key = (key,) if isinstance(key, int) else tuple(int(k) for k in key)
            if len(key) != self.dim:
                raise ValueError(f"moment index {key} does not match dimension {self.dim}")
            value = float(value)
            if all(k % 2 == 0 for k in key) and value < 0:
                raise DegenerateModelError(f"even moment {key} must be non-negative, got {value}")
            clean[key] = value
        object.__setattr__(self, "entries", clean)

    def __getitem__(self, key) -> float:
        key = (key,) if isinstance(key, int) else tuple(key)
        try:
            return self.entries[key]
        except KeyError:
            raise MissingMomentError(f"spectral moment lambda{''.join(map(str, key))} is not available") from None

    def __contains__(self, key) -> bool:
        key = (key,) if isinstance(key, int) else tuple(key)
        return key in self.entries

    def get(self, key, default=None):
        return self[key] if key in self else default


@dataclass(frozen=True, eq=False)
class HessianCov3:
    """Covariance of ``(W_xx, W_yy, W_xy)`` for a planar field."""

    sigma: np.ndarray

    def __post_init__(self):
        s = np.array(self.sigma, dtype=float)
        if s.shape != (3, 3):
            raise ValueError(f"Hessian covariance must be 3x3, got shape {s.shape}")
        if not np.allclose(s, s.T, rtol=0.0, atol=1e-14 * max(1.0, np.abs(s).max())):
            raise DegenerateModelError("Hessian covariance must be symmetric")
        s = 0.5 * (s + s.T)
        d, _ = jacobi_eigh(s)
        if np.any(d < -1e-12 * abs(np.trace(s))):
            raise DegenerateModelError(f"Hessian covariance is not positive semi-definite (eigenvalues {d})")
        s.setflags(write=False)
        object.__setattr__(self, "sigma", s)


def hessian_cov_matrix(moments: SpectralMoments) -> HessianCov3:
    """Assemble the covariance of ``(W_xx, W_yy, W_xy)`` from fourth-order moments."""
    l40, l22, l31 = moments[4, 0], moments[2, 2], moments[3, 1]
    l04, l13 = moments[0, 4], moments[1, 3]
    return HessianCov3(np.array([[l40, l22, l31], [l22, l04, l13], [l31, l13, l22]]))


# ---------------------------------------------------------------------------
# One-dimensional covariance models
# ---------------------------------------------------------------------------


class CovarianceModel1D(ABC):
    """Stationary covariance with derivatives up to order eight."""

    kind: str = "abstract"

    @property
    @abstractmethod
    def variance(self) -> float:
        """``Gamma(0)``."""

    @property
    def support(self) -> float:
        """Half-width beyond which the covariance vanishes (``inf`` if never)."""
        return math.inf

    @property
    def correlation_length(self) -> float:
        """A length scale of the covariance, ``sqrt(lambda0 / lambda2)``."""
        return math.sqrt(self.variance / self.spectral_moment(2))

    @abstractmethod
    def covariance(self, z, order: int = 0):
        """``Gamma^(order)(z)``, vectorized over ``z``."""

    @abstractmethod
    def spectral_density(self, omega):
        """Two-sided spectral density ``S(w)``."""

    @abstractmethod
    def sample_frequencies(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw non-negative frequencies from the normalized one-sided spectral law."""

    def spectral_moment(self, order: int) -> float:
        return spectral_moment(self, order)

    def moments(self) -> SpectralMoments:
        return SpectralMoments({(n,): self.spectral_moment(n) for n in range(0, MAX_ORDER + 1, 2)}, dim=1)

    def frequency_cutoff(self, rel: float = 1e-14) -> float:
        """Frequency beyond which the one-sided spectral mass is negligible."""
        return 40.0 / self.correlation_length

    def _validate(self) -> None:
        lam = [self._raw_moment(n) for n in (0, 2, 4, 6)]
        if not lam[0] > 0:
            raise DegenerateModelError(f"{self.kind}: Gamma(0) must be positive")
        if not all(v > 0 for v in lam[1:]):
            raise DegenerateModelError(f"{self.kind}: lambda2, lambda4, lambda6 must be positive, got {lam[1:]}")
        if not lam[2] * lam[0] > lam[1] ** 2 * (1 + 1e-12):
            raise DegenerateModelError(f"{self.kind}: need lambda4 > lambda2^2 / lambda0")

    def _raw_moment(self, order: int) -> float:
        return float((-1) ** (order // 2) * self.covariance(0.0, order))


def spectral_moment(model: CovarianceModel1D, order: int) -> float:
    """``lambda_order = (-1)**(order/2) Gamma^(order)(0)`` for an even order up to eight."""
    if isinstance(order, bool) or int(order) != order or order % 2 or not 0 <= order <= MAX_ORDER:
        raise ValueError(f"spectral moment order must be an even integer in [0, {MAX_ORDER}], got {order!r}")
    value = model._raw_moment(int(order))
    if order == 2 and not value > 0:
        raise DegenerateModelError(f"{model.kind}: lambda2 = {value} is not positive")
    return value


@dataclass(frozen=True)
class GaussianCovariance(CovarianceModel1D):
    """``Gamma(z) = variance * exp(-z**2 / (2 * length_scale**2))``."""

    var: float = 1.0
    length_scale: float = 1.0
    kind = "gaussian"

    def __post_init__(self):
        if not (self.var > 0 and self.length_scale > 0):
            raise ValueError("gaussian covariance needs positive variance and length scale")
        self._validate()

    @property
    def variance(self) -> float:
        return self.var

    def covariance(self, z, order: int = 0):
        if not 0 <= order <= MAX_ORDER:
            raise ValueError(f"derivative order must be in [0, {MAX_ORDER}]")
        x = np.asarray(z, dtype=float) / self.length_scale
        coeffs = np.zeros(order + 1)
        coeffs[order] = 1.0
        he = np.polynomial.hermite_e.hermeval(x, coeffs)
        out = self.var * (-1.0 / self.length_scale) ** order * he * np.exp(-0.5 * x * x)
        return out if np.ndim(out) else float(out)

    def spectral_density(self, omega):
        w = np.asarray(omega, dtype=float) * self.length_scale
        return self.var * self.length_scale / math.sqrt(2 * math.pi) * np.exp(-0.5 * w * w)

    def sample_frequencies(self, rng, size):
        return np.abs(rng.standard_normal(size)) / self.length_scale

    def frequency_cutoff(self, rel: float = 1e-14) -> float:
        return math.sqrt(-2.0 * math.log(rel)) / self.length_scale + 4.0 / self.length_scale


def _bump_autocorrelation(exponent: int) -> list[Fraction]:
    """Exact coefficients of P(u) = int p(s) p(s+u) ds, p(s) = (1-4s^2)^n on [-1/2, 1/2], 0 <= u <= 1."""
    n = exponent
    p = [Fraction(0)] * (2 * n + 1)
    for j in range(n + 1):
        p[2 * j] = Fraction(comb(n, j) * (-4) ** j)
    coeffs: dict[int, Fraction] = {}
    half = Fraction(1, 2)
    for i, ai in enumerate(p):
        if ai == 0:
            continue
        for k, ak in enumerate(p):
            if ak == 0:
                continue
            # p(s+u) term s^j u^(k-j); integrate s^(i+j) over [-1/2, 1/2 - u]
            for j in range(k + 1):
                c = ai * ak * comb(k, j)
                m = i + j
                e = k - j
                for q in range(m + 2):
                    term = c * comb(m + 1, q) * half ** (m + 1 - q) * (-1) ** q / (m + 1)
                    coeffs[e + q] = coeffs.get(e + q, Fraction(0)) + term
                coeffs[e] = coeffs.get(e, Fraction(0)) - c * (-half) ** (m + 1) / (m + 1)
    degree = max(coeffs)
    return [coeffs.get(d, Fraction(0)) for d in range(degree + 1)]


def _shift_reflect(coeffs: list[Fraction]) -> list[Fraction]:
    """Coefficients of Q(v) = P(1 - v)."""
    out = [Fraction(0)] * len(coeffs)
    for d, c in enumerate(coeffs):
        if c == 0:
            continue
        for j in range(d + 1):
            out[j] += c * comb(d, j) * (-1) ** j
    return out


@dataclass(frozen=True)
class BumpConvolutionCovariance(CovarianceModel1D):
    """Compactly supported covariance ``Gamma = c * (g * g)``.

    ``g(z) = (1 - (2 z / delta)**2)**exponent`` on ``[-delta/2, delta/2]``, so the
    covariance is a piecewise polynomial of degree ``4 * exponent + 1`` in
    ``|z| / delta`` that vanishes identically for ``|z| >= delta`` and has
    ``2 * exponent`` continuous derivatives.
    """

    delta: float = 2.0
    exponent: int = 5
    var: float = 1.0
    kind = "compact-bump-convolution"
    _near: Polynomial = field(init=False, repr=False, compare=False)
    _far: Polynomial = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if int(self.exponent) != self.exponent or self.exponent < 4:
            raise ValueError("exponent must be an integer >= 4 so that lambda8 is finite")
        exact = _bump_autocorrelation(int(self.exponent))
        p0 = exact[0]
        near = Polynomial([float(c / p0) for c in exact])
        far = Polynomial([float(c / p0) for c in _shift_reflect(exact)])
        object.__setattr__(self, "_near", near)
        object.__setattr__(self, "_far", far)
        object.__setattr__(self, "_p0", float(p0))
        self._validate()

    @property
    def variance(self) -> float:
        return self.var

    @property
    def support(self) -> float:
        return self.delta

    def covariance(self, z, order: int = 0):
        if not 0 <= order <= MAX_ORDER:
            raise ValueError(f"derivative order must be in [0, {MAX_ORDER}]")
        z = np.asarray(z, dtype=float)
        u = np.abs(z) / self.delta
        near = self._near.deriv(order) if order else self._near
        far = self._far.deriv(order) if order else self._far
        # Q(v) = P(1-v) so P^(j)(u) = (-1)^j Q^(j)(1-u)
        val = np.where(u <= 0.5, near(u), (-1) ** order * far(1.0 - u))
        val = np.where(u < 1.0, val, 0.0)
        sign = np.where(z < 0, (-1.0) ** order, 1.0)
        out = self.var * sign * val / self.delta**order
        return out if out.ndim else float(out)

    def _profile_transform(self, nu):
        """``int p(s) cos(nu s) ds`` over [-1/2, 1/2] for the unit profile p."""
        nu = np.abs(np.asarray(nu, dtype=float))
        n = int(self.exponent)
        out = np.empty_like(nu)
        small = nu < 40.0
        if np.any(small):
            s, w = gauss_legendre_nodes(0.0, 0.5, 48, 4)
            prof = (1.0 - 4.0 * s * s) ** n
            out[small] = 2.0 * (np.cos(np.outer(nu[small], s)) * prof) @ w
        if np.any(~small):
            # Repeated integration by parts; p and its first n-1 derivatives vanish at 1/2.
            p = Polynomial([1.0, 0.0, -4.0]) ** n
            x = nu[~small]
            acc = np.zeros_like(x)
            for j in range(2 * n + 1):
                dj = p.deriv(j) if j else p
                phase = (j + 1) * math.pi / 2
                upper = dj(0.5) * np.cos(0.5 * x - phase)
                lower = dj(0.0) * math.cos(-phase)
                acc += (-1) ** j * (upper - lower) / x ** (j + 1)
            out[~small] = 2.0 * acc
        return out

    def spectral_density(self, omega):
        nu = np.asarray(omega, dtype=float) * self.delta
        return self.var * self.delta * self._profile_transform(nu) ** 2 / (2 * math.pi * self._p0)

    def frequency_cutoff(self, rel: float = 1e-14) -> float:
        return 600.0 / self.delta

    @cached_property
    def _inverse_cdf(self):
        omega = np.linspace(0.0, self.frequency_cutoff(), 60001)
        dens = 2.0 * self.spectral_density(omega)
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(omega))])
        cdf /= cdf[-1]
        return cdf, omega

    def sample_frequencies(self, rng, size):
        cdf, omega = self._inverse_cdf
        return np.interp(rng.random(size), cdf, omega)


@dataclass(frozen=True, eq=False)
class TabulatedSpectrumCovariance(CovarianceModel1D):
    """Covariance given by a one-sided spectral density tabulated on a grid.

    ``Gamma(z) = int_0^inf S1(w) cos(w z) dw`` with ``S1 = 2 S`` the one-sided
    density; integrals use composite Simpson on the supplied grid.
    """

    frequencies: np.ndarray = field(default_factory=lambda: np.zeros(0))
    density: np.ndarray = field(default_factory=lambda: np.zeros(0))
    kind = "tabulated-spectrum"

    def __post_init__(self):
        w = np.asarray(self.frequencies, dtype=float)
        s = np.asarray(self.density, dtype=float)
        if w.ndim != 1 or w.shape != s.shape or w.size < 3:
            raise ValueError("tabulated spectrum needs matching 1D grids with at least 3 points")
        if np.any(np.diff(w) <= 0) or w[0] < 0:
            raise ValueError("frequency grid must be non-negative and strictly increasing")
        if np.any(s < 0):
            raise DegenerateModelError("spectral density must be non-negative")
        w.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "frequencies", w)
        object.__setattr__(self, "density", s)
        self._validate()

    @property
    def variance(self) -> float:
        return float(simpson(self.density, x=self.frequencies))

    def covariance(self, z, order: int = 0):
        if not 0 <= order <= MAX_ORDER:
            raise ValueError(f"derivative order must be in [0, {MAX_ORDER}]")
        z = np.asarray(z, dtype=float)
        w = self.frequencies
        kernel = w**order * np.cos(np.multiply.outer(z, w) + order * math.pi / 2)
        out = simpson(kernel * self.density, x=w, axis=-1)
        return out if np.ndim(out) else float(out)

    def spectral_density(self, omega):
        return 0.5 * np.interp(np.abs(omega), self.frequencies, self.density, right=0.0)

    def frequency_cutoff(self, rel: float = 1e-14) -> float:
        return float(self.frequencies[-1])

    def sample_frequencies(self, rng, size):
        w, s = self.frequencies, self.density
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (s[1:] + s[:-1]) * np.diff(w))])
        cdf /= cdf[-1]
        return np.interp(rng.random(size), cdf, w)


# ---------------------------------------------------------------------------
# Planar spectra
# ---------------------------------------------------------------------------


def _angular_moment(a: int, b: int) -> float:
    """``(1/2pi) int cos^a t sin^b t dt`` over a full turn."""
    if a % 2 or b % 2:
        return 0.0
    # Beta-function closed form for even powers.
    return math.gamma((a + 1) / 2) * math.gamma((b + 1) / 2) / (math.pi * math.gamma((a + b) / 2 + 1))


@dataclass(frozen=True)
class RhoDerivs:
    """Covariance ``C = rho(r)`` and the derived quantities ``E, H, F, F0``."""

    C: float
    E: float
    H: float
    F: float
    F0: float

    def __iter__(self):
        return iter((self.C, self.E, self.H, self.F, self.F0))


class PlanarSpectrum(ABC):
    """A stationary planar Gaussian field described through its wavevector law."""

    variance: float = 1.0

    @abstractmethod
    def sample_wavevectors(self, rng: np.random.Generator, size: int, stratified: bool = False) -> np.ndarray:
        """Draw ``size`` wavevectors as an array of shape ``(size, 2)``."""

    @abstractmethod
    def moment(self, a: int, b: int) -> float:
        """``lambda_ab = E[k_x**a k_y**b]`` (times the variance)."""

    @property
    def max_wavenumber(self) -> float:
        return 1.0

    def moments(self, max_order: int = 4) -> SpectralMoments:
        entries = {(a, n - a): self.moment(a, n - a) for n in range(0, max_order + 1, 2) for a in range(n + 1)}
        return SpectralMoments(entries, dim=2)

    def gradient_covariance(self) -> np.ndarray:
        return np.array([[self.moment(2, 0), self.moment(1, 1)], [self.moment(1, 1), self.moment(0, 2)]])


class IsotropicSpectrum2D(PlanarSpectrum):
    """Isotropic planar spectrum with unit variance and radial density ``Pi(k)``."""

    kind = "abstract"

    @abstractmethod
    def radial_moment(self, n: int) -> float:
        """``int k**n Pi(k) dk``."""

    @abstractmethod
    def sample_radii(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw wavenumbers from ``Pi``."""

    def moment(self, a: int, b: int) -> float:
        return self.radial_moment(a + b) * _angular_moment(a, b)

    @property
    def lambda2(self) -> float:
        """Variance of a first partial derivative, ``F0 = int (k^2/2) Pi``."""
        return 0.5 * self.radial_moment(2)

    def sample_wavevectors(self, rng, size, stratified=False):
        radii = self.sample_radii(rng, size)
        if stratified:
            # equally spaced directions on a half turn: the empirical gradient
            # covariance is then exactly isotropic for any size >= 2
            theta = (np.arange(size) + rng.random()) * math.pi / size
        else:
            theta = rng.random(size) * 2.0 * math.pi
        return radii[:, None] * np.column_stack([np.cos(theta), np.sin(theta)])

    @abstractmethod
    def rho(self, r, order: int = 0):
        """``rho^(order)(r)`` for order 0, 1, 2."""


def rho_derivs(spectrum: IsotropicSpectrum2D, r: float) -> RhoDerivs:
    """``(C, E, H, F, F0)`` with ``C = rho``, ``E = rho'``, ``H = -E/r``, ``F = -rho''``."""
    r = float(r)
    if not r >= 0:
        raise ValueError(f"distance must be non-negative, got {r}")
    f0 = spectrum.lambda2
    if r == 0.0:
        return RhoDerivs(1.0, 0.0, f0, f0, f0)
    c = float(spectrum.rho(r, 0))
    e = float(spectrum.rho(r, 1))
    f = -float(spectrum.rho(r, 2))
    return RhoDerivs(c, e, -e / r, f, f0)


def _bessel_kernel(x, order: int):
    """d^order/dx^order J0(x) for order 0, 1, 2."""
    if order == 0:
        return bessel_j0(x)
    if order == 1:
        return -bessel_j1(x)
    x = np.asarray(x, dtype=float)
    safe = np.where(x == 0, 1.0, x)
    j1_over_x = np.where(x == 0, 0.5, bessel_j1(safe) / safe)
    return -(bessel_j0(x) - j1_over_x)


@dataclass(frozen=True)
class RingSpectrum(IsotropicSpectrum2D):
    """All energy at wavenumber ``k0``; ``rho(r) = J0(k0 r)``."""

    k0: float = 1.0
    kind = "ring"

    def __post_init__(self):
        if not self.k0 > 0:
            raise ValueError(f"k0 must be positive, got {self.k0}")

    def radial_moment(self, n):
        return self.k0**n

    def sample_radii(self, rng, size):
        return np.full(size, float(self.k0))

    @property
    def max_wavenumber(self):
        return self.k0

    def rho(self, r, order=0):
        if order not in (0, 1, 2):
            raise ValueError("rho derivatives are available up to order 2")
        return self.k0**order * _bessel_kernel(self.k0 * np.asarray(r, dtype=float), order)


class _QuadratureRadial(IsotropicSpectrum2D):
    """Shared Bessel-transform machinery for spectra with a density ``Pi``."""

    rtol: float = 1e-10

    @abstractmethod
    def _radial_nodes(self, panels: int) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights (including ``Pi``) for integrals in ``k``."""

    def radial_moment(self, n):
        k, w = self._radial_nodes(64)
        return float(np.dot(w, k**n))

    def rho(self, r, order=0):
        if order not in (0, 1, 2):
            raise ValueError("rho derivatives are available up to order 2")
        r = np.atleast_1d(np.asarray(r, dtype=float))
        k_hi = self.max_wavenumber
        panels = int(16 + 2 * np.max(r) * k_hi / math.pi)
        values = []
        for p in (panels, 2 * panels):
            k, w = self._radial_nodes(p)
            values.append((k**order * _bessel_kernel(np.multiply.outer(r, k), order)) @ w)
        err = np.max(np.abs(values[1] - values[0]))
        if err > self.rtol * max(1.0, self.radial_moment(order)):
            raise QuadratureError("Bessel transform of the radial spectrum did not converge",
                                  float(values[1][0]), float(err))
        out = values[1]
        return out if out.size > 1 else float(out[0])


@dataclass(frozen=True)
class GaussianRingSpectrum(_QuadratureRadial):
    """``Pi(k)`` proportional to ``exp(-(k - k0)**2 / (2 width**2))`` on ``k >= 0``."""

    k0: float = 1.0
    width: float = 0.1
    kind = "gaussian-ring"

    def __post_init__(self):
        if not (self.k0 > 0 and self.width > 0):
            raise ValueError("gaussian ring needs positive k0 and width")

    @property
    def _range(self):
        return max(0.0, self.k0 - 12 * self.width), self.k0 + 12 * self.width

    @property
    def max_wavenumber(self):
        return self._range[1]

    def _density(self, k):
        return np.exp(-0.5 * ((k - self.k0) / self.width) ** 2)

    @cached_property
    def _norm(self):
        k, w = gauss_legendre_nodes(*self._range, 32, 8)
        return float(np.dot(w, self._density(k)))

    def _radial_nodes(self, panels):
        k, w = gauss_legendre_nodes(*self._range, 16, panels)
        return k, w * self._density(k) / self._norm

    def sample_radii(self, rng, size):
        lo = self._range[0]
        out = self.k0 + self.width * rng.standard_normal(size)
        bad = out < lo
        while np.any(bad):
            out[bad] = self.k0 + self.width * rng.standard_normal(int(bad.sum()))
            bad = out < lo
        return out


@dataclass(frozen=True, eq=False)
class TabulatedRadialSpectrum(_QuadratureRadial):
    """Radial density tabulated on a grid; normalized to unit mass by Simpson."""

    grid: np.ndarray = field(default_factory=lambda: np.zeros(0))
    values: np.ndarray = field(default_factory=lambda: np.zeros(0))
    kind = "tabulated"

    def __post_init__(self):
        k = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if k.ndim != 1 or k.shape != v.shape or k.size < 3 or np.any(np.diff(k) <= 0) or k[0] < 0:
            raise ValueError("tabulated radial spectrum needs an increasing non-negative grid with >= 3 points")
        if np.any(v < 0):
            raise DegenerateModelError("radial spectrum must be non-negative")
        mass = simpson(v, x=k)
        if not mass > 0:
            raise DegenerateModelError("radial spectrum has no mass")
        object.__setattr__(self, "grid", k)
        object.__setattr__(self, "values", v / mass)

    @property
    def max_wavenumber(self):
        return float(self.grid[-1])

    def radial_moment(self, n):
        return float(simpson(self.values * self.grid**n, x=self.grid))

    def _radial_nodes(self, panels):
        k, w = gauss_legendre_nodes(float(self.grid[0]), float(self.grid[-1]), 16, panels)
        return k, w * np.interp(k, self.grid, self.values)

    def sample_radii(self, rng, size):
        k, v = self.grid, self.values
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * np.diff(k))])
        return np.interp(rng.random(size) * cdf[-1], cdf, k)


@dataclass(frozen=True, eq=False)
class StretchedSpectrum2D(PlanarSpectrum):
    """Isotropic spectrum pushed through a linear map of the wavevectors.

    ``stretched(base, gamma, kappa)`` produces a field whose gradient
    covariance has eigenvalue ratio ``lambda_minus / lambda_plus = 1 - gamma**2``
    with the ``lambda_minus`` eigenvector at angle ``kappa``.
    """

    base: IsotropicSpectrum2D
    transform: np.ndarray

    @classmethod
    def stretched(cls, base: IsotropicSpectrum2D, gamma: float, kappa: float) -> "StretchedSpectrum2D":
        if not 0 <= gamma < 1:
            raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
        c, s = math.cos(kappa), math.sin(kappa)
        rot = np.array([[c, -s], [s, c]])
        return cls(base, rot @ np.diag([math.sqrt(1.0 - gamma * gamma), 1.0]))

    @property
    def max_wavenumber(self):
        return self.base.max_wavenumber * float(np.linalg.norm(self.transform, 2))

    def sample_wavevectors(self, rng, size, stratified=False):
        return self.base.sample_wavevectors(rng, size, stratified) @ np.asarray(self.transform).T

    def moment(self, a, b):
        # E[(L k)_x^a (L k)_y^b] expanded over the isotropic moments.
        (l11, l12), (l21, l22) = np.asarray(self.transform)
        total = 0.0
        for i in range(a + 1):
            for j in range(b + 1):
                px, py = i + j, (a - i) + (b - j)
                coef = comb(a, i) * comb(b, j) * l11**i * l12 ** (a - i) * l21**j * l22 ** (b - j)
                total += coef * self.base.moment(px, py)
        return total


@dataclass(frozen=True, eq=False)
class GaussianSpectrum2D(PlanarSpectrum):
    """Wavevectors distributed as ``N(0, cov)``; used for space-time fields ``W(x, t)``."""

    cov: np.ndarray

    def __post_init__(self):
        c = np.array(self.cov, dtype=float)
        if c.shape != (2, 2) or not np.allclose(c, c.T) or np.linalg.det(c) <= 0 or c[0, 0] <= 0:
            raise DegenerateModelError("wavevector covariance must be a 2x2 positive definite matrix")
        object.__setattr__(self, "cov", c)

    @property
    def max_wavenumber(self):
        return 6.0 * math.sqrt(float(np.max(np.linalg.eigvalsh(self.cov))))

    def sample_wavevectors(self, rng, size, stratified=False):
        return rng.standard_normal((size, 2)) @ np.linalg.cholesky(self.cov).T

    def moment(self, a, b):
        # exact for total degree below 2 * 8 with an 8-point Hermite tensor rule
        x, w = np.polynomial.hermite_e.hermegauss(8)
        w = w / w.sum()
        chol = np.linalg.cholesky(self.cov)
        z1, z2 = np.meshgrid(x, x, indexing="ij")
        kx = chol[0, 0] * z1
        ky = chol[1, 0] * z1 + chol[1, 1] * z2
        return float(np.sum(np.outer(w, w) * kx**a * ky**b))
