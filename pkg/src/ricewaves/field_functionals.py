"""Functionals of two-parameter fields: twinkles and two-dimensional specular points.

For a planar surface the linearized specular points are the zeros of
``Y = (W_x - kx, W_y - ky)``. ``Y'`` and ``Y`` are independent at a fixed
point, so the Rice density factorizes into ``E|det Y'|`` times the Gaussian
density of the gradient at ``(kx, ky)``. ``E|Delta|`` (the determinant) comes
from the characteristic function of a Gaussian quadratic form:
``E|Delta| = (2/pi) int_0^inf (1 - Re h(t)) / t^2 dt``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import jacobi_eigh, sqrtm_psd
from .quadrature import IntegrationDomain, integrate
from .spectral_model import DegenerateModelError, HessianCov3, PlanarSpectrum, SpectralMoments, hessian_cov_matrix
from .special import normal_cdf, normal_pdf
from .specular1d import gauss_abs_mean

# Delta = x^T A x for x = (W_xx, W_yy, W_xy)
DET_FORM = np.array([[0.0, 0.5, 0.0], [0.5, 0.0, 0.0], [0.0, 0.0, -1.0]])
_TAIL_BREAKS = (0.1, 1.0, 10.0, 100.0, 1e3, 1e4)


# ---------------------------------------------------------------------------
# Twinkles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwinkleMoments:
    """Space-time spectral moments ``lambda_ij`` (``i`` in space, ``j`` in time)."""

    l20: float
    l40: float
    l31: float
    l22: float
    l60: float

    def __post_init__(self):
        for name in ("l20", "l40", "l60"):
            if not getattr(self, name) > 0:
                raise DegenerateModelError(f"{name} must be positive, got {getattr(self, name)}")
        tol = 1e-12
        if self.slope_rate_variance < -tol * self.l22:
            raise DegenerateModelError("need l22 - l31^2 / l40 >= 0")
        if self.curvature_variance < -tol * self.l60:
            raise DegenerateModelError("need l60 - l40^2 / l20 >= 0")

    @property
    def slope_rate_variance(self) -> float:
        """Conditional variance of ``W_xt`` given ``W_xx``."""
        return self.l22 - self.l31**2 / self.l40

    @property
    def curvature_variance(self) -> float:
        """``lambda60 - lambda40^2 / lambda20``: conditional variance of ``W_xxx`` given ``W_x``."""
        return self.l60 - self.l40**2 / self.l20

    @classmethod
    def from_moments(cls, moments: SpectralMoments) -> "TwinkleMoments":
        return cls(*(moments[key] for key in ((2, 0), (4, 0), (3, 1), (2, 2), (6, 0))))


_TWINKLE_FORMS = ("closed", "integrated", "published")


def twinkle_rate(m: TwinkleMoments, k: float, form: str = "closed") -> float:
    """Expected number of twinkles per unit time on the whole line.

    ``closed`` evaluates the x-integral in closed form: ``aU + sigma xi`` with
    independent standard normals has ``E|.| = sqrt(2/pi) sqrt(a^2 + sigma^2)``.
    ``integrated`` performs that integral by quadrature. ``published`` is the
    closed form as it circulates in the literature, kept for comparison; it
    does not equal the other two.
    """
    if not k > 0:
        raise ValueError(f"k must be positive, got {k}")
    if form not in _TWINKLE_FORMS:
        raise ValueError(f"unknown form {form!r}; expected one of {_TWINKLE_FORMS}")
    l20, l40 = m.l20, m.l40
    lt6 = max(m.curvature_variance, 0.0)
    front = normal_pdf(k / math.sqrt(l40)) * gauss_abs_mean(m.l31 * k / l40, math.sqrt(max(m.slope_rate_variance, 0.0)))
    if form == "closed":
        return math.sqrt(2.0 / math.pi) * front / k * math.sqrt(l40 * l40 + lt6 * l20) / math.sqrt(l20 * l40)
    if form == "published":
        return (math.sqrt(2.0 / math.pi) * front / k * (math.sqrt(lt6 * l20) + l40) / math.sqrt(l20 * l40)
                * math.sqrt(lt6) / (lt6 + l40 * l40))
    s = math.sqrt(l20)

    def integrand(x):
        return gauss_abs_mean(l40 / l20 * k * x, math.sqrt(lt6)) * normal_pdf(k * x / s) / s

    scale = s / k
    inner = integrate(integrand, IntegrationDomain.full_line(breakpoints=(-4 * scale, 0.0, 4 * scale)), tol=1e-13)
    return front / math.sqrt(l40) * inner.value


# ---------------------------------------------------------------------------
# E|det Y'| in two dimensions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuadraticFormSpectrum:
    """Diagonal form of ``Delta`` in independent standard normals ``Z``.

    ``Delta = k^2 + sum_j (eigenvalues_j Z_j^2 - k shifts_j Z_j)`` where the
    eigenvalues are those of ``Sigma^{1/2} A Sigma^{1/2}`` and ``shifts_j`` is
    the sum of the first two rows of ``Sigma^{1/2} P`` in column ``j``.
    """

    eigenvalues: np.ndarray
    shifts: np.ndarray
    rotation: np.ndarray

    @classmethod
    def of(cls, sigma: HessianCov3 | np.ndarray) -> "QuadraticFormSpectrum":
        s = sigma.sigma if isinstance(sigma, HessianCov3) else np.asarray(sigma, dtype=float)
        root = sqrtm_psd(s)
        d, p = jacobi_eigh(root @ DET_FORM @ root)
        mix = root @ p
        return cls(d, mix[0] + mix[1], p)

    def second_moment(self, k: float) -> float:
        """``E[Delta^2]``."""
        d, c = self.eigenvalues, self.shifts
        mean = float(np.sum(d)) + k * k
        return 2.0 * float(np.sum(d * d)) + k * k * float(np.sum(c * c)) + mean * mean


def re_characteristic(t, spectrum: QuadraticFormSpectrum, k: float):
    """``Re E exp(i t Delta)``."""
    t = np.asarray(t, dtype=float)[..., None]
    d, c = spectrum.eigenvalues, spectrum.shifts
    q = 1.0 + 4.0 * d * d * t * t
    modulus = q ** -0.25 * np.exp(-0.5 * k * k * t * t * c * c / q)
    phase = 0.5 * np.arctan(2.0 * d * t) + k * k * t * (1.0 / 3.0 - t * t * c * c * d / q)
    return np.prod(modulus, axis=-1) * np.cos(np.sum(phase, axis=-1))


def _scale(spectrum: QuadraticFormSpectrum, k: float) -> float:
    return max(float(np.max(np.abs(spectrum.eigenvalues))), k * k, 1e-300)


def _char_integral(one_minus_re, limit: float, scale: float, tol: float) -> float:
    # (2/pi) int_0^inf (1 - Re h(t)) / t^2 dt computed in tau = t * scale
    def f(tau):
        tau = np.asarray(tau, dtype=float)
        return one_minus_re(tau / scale) / np.where(tau == 0, 1.0, tau * tau)

    domain = IntegrationDomain.half_line(
        0.0, transform="algebraic-decay", origin_limit=limit / (scale * scale),
        tail_coefficient=1.0, breakpoints=_TAIL_BREAKS)
    return 2.0 / math.pi * scale * integrate(f, domain, tol=tol).value


@dataclass(frozen=True)
class Spec2DProblem:
    """Linearized 2D specular problem: Hessian covariance, gradient covariance and slope ``k``."""

    sigma: HessianCov3
    l20: float
    l02: float
    l11: float
    k: float

    def __post_init__(self):
        if self.k < 0:
            raise ValueError(f"k must be non-negative, got {self.k}")
        if not (self.l20 > 0 and self.l02 > 0 and self.l20 * self.l02 - self.l11**2 > 0):
            raise DegenerateModelError("gradient covariance must be positive definite")

    @classmethod
    def from_moments(cls, moments: SpectralMoments, k: float) -> "Spec2DProblem":
        return cls(hessian_cov_matrix(moments), moments[(2, 0)], moments[(0, 2)], moments[(1, 1)], k)

    @classmethod
    def from_spectrum(cls, spectrum: PlanarSpectrum, k: float) -> "Spec2DProblem":
        return cls.from_moments(spectrum.moments(4), k)

    @property
    def gradient_det(self) -> float:
        return self.l20 * self.l02 - self.l11**2


def abs_det_expectation(problem: Spec2DProblem, tol: float = 1e-10) -> float:
    """``E|(W_xx - k)(W_yy - k) - W_xy^2|``."""
    k = problem.k
    if k < 0:
        raise ValueError("k must be non-negative")
    spec = QuadraticFormSpectrum.of(problem.sigma)
    size = max(float(np.max(np.abs(problem.sigma.sigma))), 1e-300)
    if np.all(np.abs(spec.eigenvalues) <= 1e-14 * size) and np.all(np.abs(spec.shifts) <= 1e-7 * math.sqrt(size)):
        return k * k

    scale = _scale(spec, k)
    return _char_integral(lambda t: 1.0 - re_characteristic(t, spec, k), spec.second_moment(k) / 2.0, scale, tol)


def gradient_density(x, y, problem: Spec2DProblem):
    """Density of ``(W_x, W_y)`` at ``(kx, ky)``."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    det = problem.gradient_det
    k = problem.k
    quad = (problem.l02 * x * x - 2.0 * problem.l11 * x * y + problem.l20 * y * y) * k * k / det
    out = np.exp(-0.5 * quad) / (2.0 * math.pi * math.sqrt(det))
    return out if out.ndim else float(out)


def sp2d_intensity(x, y, problem: Spec2DProblem, abs_det: float | None = None):
    """Density of linearized specular points at ``(x, y)``."""
    if abs_det is None:
        abs_det = abs_det_expectation(problem)
    return abs_det * gradient_density(x, y, problem)


def sp2d_expectation(problem: Spec2DProblem,
                     region: tuple[tuple[float, float], tuple[float, float]] | None = None) -> float:
    """Expected number of linearized specular points in a rectangle or the whole plane.

    The plane total is exactly ``E|Delta| / k^2``. For a rectangle the inner
    ``y`` integral is a conditional normal probability and the outer ``x``
    integral is done by quadrature.
    """
    k = problem.k
    if not k > 0:
        raise ValueError("k must be positive")
    abs_det = abs_det_expectation(problem)
    if region is None:
        return abs_det / (k * k)
    (x0, x1), (y0, y1) = region
    if not (x1 > x0 and y1 > y0):
        raise ValueError(f"empty rectangle {region}")
    s20 = math.sqrt(problem.l20)
    beta = problem.l11 / problem.l20
    cond = math.sqrt(problem.gradient_det / problem.l20)

    def f(u):
        return normal_pdf(u / s20) / s20 * (normal_cdf((k * y1 - beta * u) / cond) - normal_cdf((k * y0 - beta * u) / cond))

    prob = integrate(f, IntegrationDomain.finite(k * x0, k * x1), tol=1e-13).value
    return abs_det * prob / (k * k)


# ---------------------------------------------------------------------------
# Leading coefficient of the plane total
# ---------------------------------------------------------------------------


class FormMismatchError(ArithmeticError):
    """The two expressions for ``m2`` disagree."""

    def __init__(self, cos_form: float, ab_form: float):
        super().__init__(f"m2 forms disagree: cosine form {cos_form!r}, A/B form {ab_form!r}")
        self.cos_form = cos_form
        self.ab_form = ab_form


@dataclass(frozen=True)
class M2Result:
    value: float
    cos_form: float
    ab_form: float
    eigenvalues: tuple[float, float, float]
    convention: str


_M2_CONVENTIONS = ("exact", "published")


def m2_coefficient(sigma: HessianCov3 | np.ndarray, convention: str = "exact",
                   tol: float = 1e-10, check: float = 1e-6) -> M2Result:
    """Coefficient ``m2`` in ``E SP2(R^2) = m2 / k^2 + O(1)``.

    ``exact`` is ``lim_{k -> 0} E|Delta|``, i.e. the integral with the weight
    ``2/pi`` and the modulus ``prod (1 + 4 Delta_j^2 t^2)^(-1/4)`` of the
    characteristic function. ``published`` drops the ``2/pi`` and uses the
    exponent ``-1/2``. Both are computed in the cosine form and in the
    product form with ``A_j = (1 + 4 Delta_j^2 t^2)^(-1/2)`` and
    ``B_j = sign(Delta_j) sqrt((1 - A_j)/(1 + A_j))`` (``tan`` of each phase);
    a disagreement beyond ``check`` raises :class:`FormMismatchError`.
    """
    if convention not in _M2_CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}; expected one of {_M2_CONVENTIONS}")
    if not isinstance(sigma, HessianCov3):
        sigma = HessianCov3(np.asarray(sigma, dtype=float))
    spec = QuadraticFormSpectrum.of(sigma)
    d = spec.eigenvalues
    eig = tuple(float(v) for v in d)
    if np.all(d == 0):
        return M2Result(0.0, 0.0, 0.0, eig, convention)
    power = 0.25 if convention == "exact" else 0.5
    weight = 1.0 if convention == "exact" else math.pi / 2.0

    def cos_form(t):
        t = np.asarray(t, dtype=float)[..., None]
        q = 1.0 + 4.0 * d * d * t * t
        return 1.0 - np.prod(q**-power, axis=-1) * np.cos(np.sum(0.5 * np.arctan(2.0 * d * t), axis=-1))

    def ab_form(t):
        t = np.asarray(t, dtype=float)[..., None]
        a = 1.0 / np.sqrt(1.0 + 4.0 * d * d * t * t)
        b = np.sign(d) * np.sqrt((1.0 - a) / (1.0 + a))
        pairs = b[..., 0] * b[..., 1] + b[..., 1] * b[..., 2] + b[..., 2] * b[..., 0]
        return 1.0 - 2.0**-1.5 * np.prod(a ** (2.0 * power) * np.sqrt(1.0 + a), axis=-1) * (1.0 - pairs)

    scale = float(np.max(np.abs(d)))
    # near zero the modulus loses 4 power sum(d^2) t^2 and the cosine (sum d)^2 t^2 / 2
    limit = 4.0 * power * float(np.sum(d * d)) + 0.5 * float(np.sum(d)) ** 2
    v_cos = weight * _char_integral(cos_form, limit, scale, tol)
    v_ab = weight * _char_integral(ab_form, limit, scale, tol)
    if abs(v_cos - v_ab) > check * max(abs(v_cos), 1e-300):
        raise FormMismatchError(v_cos, v_ab)
    return M2Result(v_cos, v_cos, v_ab, eig, convention)
