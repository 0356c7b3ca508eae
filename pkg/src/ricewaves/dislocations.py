"""Dislocations of a complex Gaussian wave ``psi = xi + i eta``.

``xi`` and ``eta`` are independent copies of an isotropic field with unit
variance. In the plane, dislocations are isolated points and their mean
density is ``lambda2 / (2 pi)``. In space they are curves with mean length per
unit volume ``lambda2 / pi``.

The second moment of the planar count is governed by the pair density
``A(r)``, which is the Rice second-moment density of two zeros at distance
``r``. It is evaluated from a single integral in ``t``. The same quantity is
also available as a double integral of the characteristic function ``T`` of
the pair of Jacobian determinants, which serves as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .linalg import jacobi_eigh, sqrtm_psd
from .quadrature import IntegrationDomain, gauss_legendre_nodes, integrate
from .spectral_model import DegenerateModelError, IsotropicSpectrum2D, rho_derivs

DIMENSIONS = (2, 3)
MIN_SEPARATION = 1e-3


class InadmissiblePairError(DegenerateModelError):
    """The pair covariance at the requested separation is not usable."""


def mean_density_2d(lambda2: float) -> float:
    """Mean number of dislocation points per unit area."""
    if not lambda2 > 0:
        raise ValueError(f"lambda2 must be positive, got {lambda2}")
    return lambda2 / (2.0 * math.pi)


def mean_length_3d(lambda2: float) -> float:
    """Mean dislocation length per unit volume."""
    if not lambda2 > 0:
        raise ValueError(f"lambda2 must be positive, got {lambda2}")
    return lambda2 / math.pi


def sinc_covariance_3d(density: Callable, r, k_max: float, nodes: int = 32, panels: int = 16):
    """``4 pi int_0^k_max sin(k r)/(k r) Pi(k) dk`` for a spatial radial density ``Pi``."""
    if not k_max > 0:
        raise ValueError(f"k_max must be positive, got {k_max}")
    k, w = gauss_legendre_nodes(0.0, k_max, nodes, panels)
    w = w * np.asarray(density(k), dtype=float)
    r = np.asarray(r, dtype=float)
    # np.sinc(x) is sin(pi x)/(pi x)
    out = 4.0 * math.pi * (np.sinc(np.multiply.outer(r, k) / math.pi) @ w)
    return out if out.ndim else float(out)


def lambda2_3d(density: Callable, k_max: float, nodes: int = 32, panels: int = 16) -> float:
    """Variance of a first partial derivative over the field variance, for the sinc kernel.

    Expanding ``sin(kr)/(kr) = 1 - (kr)^2/6 + ...`` gives
    ``lambda2 = (4 pi / 3) int k^2 Pi / (4 pi int Pi)``.
    """
    if not k_max > 0:
        raise ValueError(f"k_max must be positive, got {k_max}")
    k, w = gauss_legendre_nodes(0.0, k_max, nodes, panels)
    pi_k = np.asarray(density(k), dtype=float)
    variance = float(np.dot(w, pi_k))
    if not variance > 0:
        raise DegenerateModelError("radial density has no mass")
    return float(np.dot(w, k * k * pi_k)) / (3.0 * variance)


@dataclass(frozen=True)
class DislocationModel:
    """A complex wave built from two independent copies of ``spectrum``."""

    spectrum: IsotropicSpectrum2D
    dimension: int = 2

    def __post_init__(self):
        if self.dimension not in DIMENSIONS:
            raise ValueError(f"dimension must be one of {DIMENSIONS}, got {self.dimension}")
        if not self.lambda2 > 0:
            raise DegenerateModelError("derivative variance must be positive")
        if abs(self.spectrum.variance - 1.0) > 1e-12:
            raise DegenerateModelError("the component fields must have unit variance")

    @property
    def lambda2(self) -> float:
        return self.spectrum.lambda2

    @property
    def mean_density(self) -> float:
        if self.dimension == 3:
            return mean_length_3d(self.lambda2)
        return mean_density_2d(self.lambda2)


@dataclass(frozen=True)
class PairQuantities:
    """Covariance data for two points at distance ``r`` along the first axis.

    ``A`` is the conditional covariance of the derivatives along the
    separation at the two points, given that both fields vanish there.
    ``B`` is the covariance of the transverse derivatives, which the
    conditioning leaves unchanged.
    """

    r: float
    C: float
    E: float
    H: float
    F: float
    F0: float

    def __post_init__(self):
        if not self.F0 > 0:
            raise InadmissiblePairError("F0 must be positive")
        if not 1.0 - self.C**2 > 0:
            raise InadmissiblePairError(f"1 - C^2 must be positive at r={self.r}, got {1.0 - self.C**2}")
        if self.F0 - abs(self.H) < -1e-14 * self.F0:
            raise InadmissiblePairError(f"transverse covariance is not PSD at r={self.r}")
        if self.a11 - abs(self.a12) < -1e-14 * self.F0:
            raise InadmissiblePairError(f"conditional covariance is not PSD at r={self.r}")

    @classmethod
    def at(cls, spectrum: IsotropicSpectrum2D, r: float) -> "PairQuantities":
        if not r > 0:
            raise ValueError(f"separation must be positive, got {r}")
        return cls(float(r), *rho_derivs(spectrum, r))

    @property
    def a11(self) -> float:
        return self.F0 - self.E**2 / (1.0 - self.C**2)

    @property
    def a12(self) -> float:
        return self.F - self.E**2 * self.C / (1.0 - self.C**2)

    @property
    def A(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a12, self.a11]])

    @property
    def B(self) -> np.ndarray:
        return np.array([[self.F0, self.H], [self.H, self.F0]])

    @property
    def A1(self) -> float:
        return self.F0 * self.a11

    @property
    def A2(self) -> float:
        return self.H * self.a12 / (self.F0 * self.a11)

    @property
    def Z(self) -> float:
        return (self.F0**2 - self.H**2) / self.F0**2 * (1.0 - (self.a12 / self.a11) ** 2)

    def Z1(self, t1):
        return self.A2 / (1.0 + self.Z * np.asarray(t1, dtype=float) ** 2)

    def Z2(self, t1):
        u = np.asarray(t1, dtype=float) ** 2
        return (1.0 + u) / (1.0 + self.Z * u)

    @property
    def zero_density(self) -> float:
        """Density of ``(xi, eta)`` at both points, evaluated at the origin of ``R^4``."""
        return 1.0 / ((2.0 * math.pi) ** 2 * (1.0 - self.C**2))


def _charfn_closed(pq: PairQuantities, t1, t2):
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    a11, a12 = pq.a11, pq.a12
    denom = (1.0 + (t1**2 + t2**2) * pq.F0 * a11 + 2.0 * t1 * t2 * pq.H * a12
             + t1**2 * t2**2 * (pq.F0**2 - pq.H**2) * (a11**2 - a12**2))
    return 1.0 / denom


def _charfn_eigen(pq: PairQuantities, t1: float, t2: float) -> float:
    ra, rb = sqrtm_psd(pq.A), sqrtm_psd(pq.B)
    d = 0.5 * np.diag([t1, t2])
    zero = np.zeros((2, 2))
    h = np.block([[zero, zero, zero, d], [zero, zero, -d, zero], [zero, -d, zero, zero], [d, zero, zero, zero]])
    root = np.block([[ra, zero, zero, zero], [zero, rb, zero, zero], [zero, zero, ra, zero], [zero, zero, zero, rb]])
    lam, _ = jacobi_eigh(root @ h @ root)
    return float(np.prod((1.0 - 2.0j * lam) ** -0.5).real)


def pair_charfn_T(pq: PairQuantities, t1, t2, route: str = "closed"):
    """``E exp(i (t1 w1 + t2 w2))`` for the Jacobians ``w1, w2`` at the two zeros.

    ``route="eigen"`` diagonalizes the 8x8 quadratic form and multiplies the
    chi-square characteristic functions; it accepts scalars only.
    """
    if route == "closed":
        out = _charfn_closed(pq, t1, t2)
        return out if np.ndim(out) else float(out)
    if route == "eigen":
        return _charfn_eigen(pq, float(t1), float(t2))
    raise ValueError(f"unknown route {route!r}; expected 'closed' or 'eigen'")


def _radicand_check(pq: PairQuantities) -> None:
    # (1 + u)(1 + Z u) - A2^2 u must stay positive for u = t^2 >= 0.
    z, b = pq.Z, 1.0 + pq.Z - pq.A2**2
    if b >= 0:
        return
    if z <= 0 or b * b >= 4.0 * z:
        u = -b / (2.0 * z) if z > 0 else math.inf
        raise InadmissiblePairError(f"square-root argument is not positive near t1={math.sqrt(u):.6g} "
                                    f"at r={pq.r}")


def _single_integrand(pq: PairQuantities):
    a2sq, z = pq.A2**2, pq.Z
    lin = 1.0 + z - a2sq

    def h(t):
        # (1 - g(t)) / t^2 with the factor u = t^2 cancelled analytically
        u = np.asarray(t, dtype=float) ** 2
        n = 1.0 + lin * u + z * u * u
        root = np.sqrt(n)
        num = (1.0 + u) * (1.0 - z) + (1.0 + u) ** 2 * (lin + z * u) / (root + 1.0) + 2.0 * a2sq
        return num / ((1.0 + u) ** 2 * root)

    return h


def correlation_A(model: DislocationModel | IsotropicSpectrum2D, r: float, tol: float = 1e-12) -> float:
    """Pair density ``A(r)`` of dislocation points at distance ``r``.

    Raises:
        InadmissiblePairError: The pair covariance is degenerate at ``r`` or the
            reduced integrand is undefined somewhere on the line.
        ValueError: ``r`` is below ``MIN_SEPARATION`` correlation lengths,
            where the pair density is not resolved.
    """
    spectrum = model.spectrum if isinstance(model, DislocationModel) else model
    scale = 1.0 / math.sqrt(spectrum.lambda2)
    if not r >= MIN_SEPARATION * scale:
        raise ValueError(f"separation {r} is below {MIN_SEPARATION} correlation lengths")
    pq = PairQuantities.at(spectrum, r)
    _radicand_check(pq)
    h = _single_integrand(pq)
    half = integrate(h, IntegrationDomain.half_line(0.0, transform="algebraic-decay", tail_coefficient=1.0),
                     tol=tol).value
    return pq.A1 / (4.0 * math.pi**3 * (1.0 - pq.C**2)) * 2.0 * half


def correlation_A_double(model: DislocationModel | IsotropicSpectrum2D, r: float,
                         nodes: int = 32, panels: int = 16) -> float:
    """``A(r)`` by tensor Gauss-Legendre quadrature of the ``T`` combination.

    The integrand ``t1^-2 t2^-2 [1 - T(t1,0) - T(0,t2) + (T(t1,t2) + T(t1,-t2))/2]``
    is even in each variable. Each half-line is mapped to ``[0, pi/2)`` by
    ``t = s tan(theta)`` with ``s = 1/sqrt(A1)``.
    """
    spectrum = model.spectrum if isinstance(model, DislocationModel) else model
    pq = PairQuantities.at(spectrum, r)
    s = 1.0 / math.sqrt(pq.A1)
    th, w = gauss_legendre_nodes(0.0, 0.5 * math.pi, nodes, panels)
    t = s * np.tan(th)
    jac = w * s / np.cos(th) ** 2
    t1, t2 = np.meshgrid(t, t, indexing="ij")
    comb = (1.0 - _charfn_closed(pq, t1, 0.0) - _charfn_closed(pq, 0.0, t2)
            + 0.5 * (_charfn_closed(pq, t1, t2) + _charfn_closed(pq, t1, -t2)))
    inner = comb / (t1**2 * t2**2)
    expectation = 4.0 * float(jac @ inner @ jac) / math.pi**2
    return expectation * pq.zero_density


def residue_integral(gamma: float, S: float, P: float) -> float:
    """``int (t^2 - gamma) / (t^4 - S t^2 + P) dt`` over the line, by residues.

    Valid when ``P > 0`` and ``X^2 - S X + P`` has no root in ``[0, inf)``.
    """
    if not P > 0:
        raise ValueError(f"P must be positive, got {P}")
    q = math.sqrt(P)
    if not 2.0 * q - S > 0:
        raise ValueError("the quartic has a real root; the residue formula does not apply")
    return math.pi * (q - gamma) / math.sqrt(P * (2.0 * q - S))
