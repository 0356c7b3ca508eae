"""Special functions used by the analytic evaluators.

Bessel J0/J1 use the power series below x = 12 and the Hankel asymptotic
expansion above it. The complete elliptic integrals use the arithmetic-geometric
mean. Both paths are vectorized over numpy arrays.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr

_SERIES_CUTOFF = 12.0
_SERIES_TERMS = 60
_ASYMPTOTIC_TERMS = 12


def normal_pdf(x):
    """Standard normal density."""
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def normal_cdf(x):
    """Standard normal distribution function."""
    return ndtr(x)


def _bessel_series(x: np.ndarray, order: int) -> np.ndarray:
    # J_n(x) = sum_m (-1)^m (x/2)^(2m+n) / (m! (m+n)!)
    half = 0.5 * x
    q = -half * half
    term = half**order / math.factorial(order)
    total = term.copy()
    for m in range(1, _SERIES_TERMS):
        term = term * q / (m * (m + order))
        total = total + term
    return total


def _bessel_asymptotic(x: np.ndarray, order: int) -> np.ndarray:
    # Hankel expansion J_n(x) ~ sqrt(2/(pi x)) (P cos(chi) - Q sin(chi)),
    # chi = x - (n/2 + 1/4) pi.
    mu = 4.0 * order * order
    p = np.ones_like(x)
    q = np.zeros_like(x)
    coeff = 1.0
    for j in range(1, 2 * _ASYMPTOTIC_TERMS):
        coeff = coeff * (mu - (2 * j - 1) ** 2) / (j * 8.0)
        term = coeff / x**j
        if j % 2 == 1:
            q = q + (-1) ** ((j - 1) // 2) * term
        else:
            p = p + (-1) ** (j // 2) * term
    chi = x - (0.5 * order + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _bessel(x, order: int):
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    out = np.empty_like(ax)
    small = ax < _SERIES_CUTOFF
    if np.any(small):
        out[small] = _bessel_series(ax[small], order)
    if np.any(~small):
        out[~small] = _bessel_asymptotic(ax[~small], order)
    if order % 2 == 1:
        out = np.where(x < 0, -out, out)
    return out if out.ndim else float(out)


def bessel_j0(x):
    """Bessel function of the first kind of order zero."""
    return _bessel(x, 0)


def bessel_j1(x):
    """Bessel function of the first kind of order one."""
    return _bessel(x, 1)


def _check_parameter(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if np.any(m >= 1.0) or np.any(m < 0.0) or np.any(np.isnan(m)):
        raise ValueError(f"elliptic parameter must lie in [0, 1), got {m}")
    return m


def ellipk(m):
    """Complete elliptic integral of the first kind, parameter convention.

    K(m) = int_0^{pi/2} (1 - m sin^2 t)^(-1/2) dt, evaluated as pi / (2 AGM(1, sqrt(1-m))).
    """
    m = _check_parameter(m)
    a = np.ones_like(m)
    b = np.sqrt(1.0 - m)
    for _ in range(64):
        a, b = 0.5 * (a + b), np.sqrt(a * b)
        if np.all(np.abs(a - b) <= 1e-16 * a):
            break
    out = math.pi / (2.0 * a)
    return out if out.ndim else float(out)


def ellipe(m):
    """Complete elliptic integral of the second kind, parameter convention.

    E(m) = int_0^{pi/2} (1 - m sin^2 t)^(1/2) dt, via the AGM with the
    accumulated sum of squared half-differences.
    """
    m = _check_parameter(m)
    a = np.ones_like(m)
    b = np.sqrt(1.0 - m)
    c2_sum = 0.5 * m
    power = 0.5
    for _ in range(64):
        c = 0.5 * (a - b)
        a, b = 0.5 * (a + b), np.sqrt(a * b)
        power *= 2.0
        c2_sum = c2_sum + power * c * c
        if np.all(np.abs(c) <= 1e-17 * a):
            break
    out = math.pi / (2.0 * a) * (1.0 - c2_sum)
    return out if out.ndim else float(out)
