"""Deterministic one-dimensional quadrature.

The workhorse is a vectorized adaptive Simpson rule: every refinement pass
evaluates the integrand once on the new nodes of all unconverged panels, so an
integrand written with numpy broadcasting is called O(depth) times rather than
once per node. Infinite ranges are mapped onto finite ones with
``t = a + u / (1 - u)``, which turns the algebraic tails met in this package
(``c / t**2`` at infinity) into bounded integrands. Integrands with a removable
singularity at the origin get their analytic limit substituted in a tiny
neighbourhood of zero.

Fixed Gauss-Legendre rules are provided for inner integrals that are smooth and
evaluated many times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple, Sequence

import numpy as np

ORIGIN_RADIUS = 1e-8
_INFINITY_CLIP = 1e-12
_INITIAL_PANELS = 8
_KINDS = ("finite", "half-line", "full-line")
_TRANSFORMS = ("none", "algebraic-decay", "origin-singularity-removal")


class QuadResult(NamedTuple):
    value: float
    error: float


class QuadratureError(ArithmeticError):
    """Raised when adaptive refinement cannot reach the requested tolerance."""

    def __init__(self, message: str, best_estimate: float, error_estimate: float):
        super().__init__(f"{message} (best estimate {best_estimate!r}, error {error_estimate:.3g})")
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


class NonFiniteIntegrandError(QuadratureError):
    """Raised when the integrand returns NaN or an infinity."""

    def __init__(self, locations: np.ndarray):
        locations = np.atleast_1d(np.asarray(locations, dtype=float))
        self.locations = locations
        shown = ", ".join(f"{t:.6g}" for t in locations[:5])
        ArithmeticError.__init__(self, f"integrand is not finite at t = {shown}")
        self.best_estimate = math.nan
        self.error_estimate = math.inf


@dataclass(frozen=True)
class IntegrationDomain:
    """Integration range plus the variable change applied before quadrature.

    ``kind`` is one of ``finite`` (``[a, b]``), ``half-line`` (``[a, inf)``) or
    ``full-line``. Infinite pieces are always mapped with ``u / (1 - u)``; the
    ``algebraic-decay`` transform names that explicitly. The
    ``origin-singularity-removal`` transform replaces the integrand on
    ``|t| < 1e-8`` by ``origin_limit`` (estimated by extrapolation when not
    given) and adds ``0`` as a breakpoint.

    With ``algebraic-decay`` and a ``tail_coefficient`` ``c`` (meaning
    ``f(t) ~ c / t**2`` on average as ``|t| -> inf``), infinite ends are cut at
    ``|t| = cutoff`` and ``c / cutoff`` is added for each of them. This is the
    route for tails that oscillate, where the rational map cannot converge.
    """

    kind: str
    a: float = 0.0
    b: float = math.inf
    transform: str = "none"
    breakpoints: tuple[float, ...] = ()
    origin_limit: float | None = None
    tail_coefficient: float | None = None
    cutoff: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}; expected one of {_KINDS}")
        if self.transform not in _TRANSFORMS:
            raise ValueError(f"unknown transform {self.transform!r}; expected one of {_TRANSFORMS}")
        if self.kind == "finite" and not (math.isfinite(self.a) and math.isfinite(self.b) and self.a < self.b):
            raise ValueError(f"finite domain needs a < b, got [{self.a}, {self.b}]")
        if self.kind == "half-line" and not math.isfinite(self.a):
            raise ValueError("half-line domain needs a finite left end")
        if self.transform == "algebraic-decay" and self.tail_coefficient is not None:
            if self.cutoff is not None and not self.cutoff > 0:
                raise ValueError(f"cutoff must be positive, got {self.cutoff}")

    @classmethod
    def finite(cls, a: float, b: float, **kwargs) -> "IntegrationDomain":
        return cls("finite", float(a), float(b), **kwargs)

    @classmethod
    def half_line(cls, a: float = 0.0, **kwargs) -> "IntegrationDomain":
        return cls("half-line", float(a), math.inf, **kwargs)

    @classmethod
    def full_line(cls, **kwargs) -> "IntegrationDomain":
        return cls("full-line", -math.inf, math.inf, **kwargs)

    @property
    def lower(self) -> float:
        return -math.inf if self.kind == "full-line" else self.a

    @property
    def upper(self) -> float:
        return self.b if self.kind == "finite" else math.inf

    def pieces(self) -> list[tuple[float, float]]:
        """Split the range at the breakpoints (and the origin when required)."""
        lo, hi = self.lower, self.upper
        cuts = set(float(p) for p in self.breakpoints)
        if self.transform == "origin-singularity-removal" or self.origin_limit is not None \
                or self.kind == "full-line":
            cuts.add(0.0)
        inner = sorted(c for c in cuts if lo < c < hi)
        edges = [lo, *inner, hi]
        return list(zip(edges[:-1], edges[1:]))


def _as_vectorized(f: Callable, vectorized: bool) -> Callable[[np.ndarray], np.ndarray]:
    if vectorized:
        return lambda t: np.broadcast_to(np.asarray(f(t), dtype=float), np.shape(t))
    return lambda t: np.fromiter((f(float(s)) for s in np.ravel(t)), float, np.size(t)).reshape(np.shape(t))


def _extrapolate_origin(f: Callable) -> float:
    # Richardson on f(h) ~ f(0) + c h^2 using the side where f is defined.
    h = 1e-3
    for side in (1.0, -1.0):
        vals = f(np.array([side * h, side * 2 * h]))
        if np.all(np.isfinite(vals)):
            return float((4.0 * vals[0] - vals[1]) / 3.0)
    raise NonFiniteIntegrandError(np.array([h, -h]))


def _piece_map(lo: float, hi: float):
    """Return (u0, u1, t(u), dt/du) for one piece of the range."""
    if math.isfinite(lo) and math.isfinite(hi):
        return 0.0, 1.0, (lambda u: lo + (hi - lo) * u), (lambda u: np.full_like(u, hi - lo))
    if math.isfinite(lo):
        return (0.0, 1.0 - _INFINITY_CLIP,
                lambda u: lo + u / (1.0 - u), lambda u: 1.0 / (1.0 - u) ** 2)
    if math.isfinite(hi):
        return (0.0, 1.0 - _INFINITY_CLIP,
                lambda u: hi - u / (1.0 - u), lambda u: 1.0 / (1.0 - u) ** 2)
    raise ValueError("a piece cannot be infinite at both ends; add a breakpoint")


def _adaptive_simpson(g, a: float, b: float, tol: float, max_depth: int, budget: int,
                      panels: int = _INITIAL_PANELS, min_depth: int = 2):
    """Vectorized breadth-first adaptive Simpson on [a, b]; returns (value, error, evals, converged)."""
    edges = np.linspace(a, b, panels + 1)
    pa, pb = edges[:-1], edges[1:]
    pm = 0.5 * (pa + pb)
    f_edges = g(edges)
    fa, fb = f_edges[:-1], f_edges[1:]
    fm = g(pm)
    whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb)
    evals = edges.size + pm.size
    total = []
    error = 0.0
    converged = True
    span = b - a
    for depth in range(max_depth + 1):
        ql, qr = 0.5 * (pa + pm), 0.5 * (pm + pb)
        fq = g(np.concatenate([ql, qr]))
        evals += fq.size
        fl, fr = fq[: ql.size], fq[ql.size:]
        left = (pm - pa) / 6.0 * (fa + 4.0 * fl + fm)
        right = (pb - pm) / 6.0 * (fm + 4.0 * fr + fb)
        refined = left + right
        err = (refined - whole) / 15.0
        local_tol = tol * (pb - pa) / span
        done = (np.abs(err) <= local_tol) | (np.abs(err) <= 1e-15 * np.abs(refined))
        if depth < min_depth:
            done[:] = False
        if depth == max_depth or evals > budget:
            converged = converged and bool(np.all(done))
            done = np.ones_like(done)
        total.append(refined[done] + err[done])
        error += float(np.sum(np.abs(err[done])))
        keep = ~done
        if not np.any(keep):
            break
        pa, pm, pb = pa[keep], pm[keep], pb[keep]
        fa, fl, fm, fr, fb = fa[keep], fl[keep], fm[keep], fr[keep], fb[keep]
        left, right = left[keep], right[keep]
        # children: [pa, pm] with midpoint ql, and [pm, pb] with midpoint qr
        pa, pm, pb = (np.concatenate([pa, pm]), np.concatenate([0.5 * (pa + pm), 0.5 * (pm + pb)]),
                      np.concatenate([pm, pb]))
        fa, fm, fb = np.concatenate([fa, fm]), np.concatenate([fl, fr]), np.concatenate([fm, fb])
        whole = np.concatenate([left, right])
    value = math.fsum(np.concatenate(total)) if total else 0.0
    return value, error, evals, converged


def integrate(
    f: Callable,
    domain: IntegrationDomain,
    tol: float = 1e-10,
    *,
    vectorized: bool = True,
    max_depth: int = 48,
    max_evaluations: int = 4_000_000,
    initial_panels: int = _INITIAL_PANELS,
) -> QuadResult:
    """Integrate ``f`` over ``domain`` to absolute tolerance ``tol``.

    Args:
        f: Integrand. With ``vectorized=True`` it must accept and return numpy
            arrays of the same shape.
        domain: Range and variable change, see :class:`IntegrationDomain`.
        tol: Absolute error target for the whole integral.
        vectorized: Set to ``False`` for scalar-only integrands.
        max_depth: Maximum number of bisections of any initial panel.
        max_evaluations: Evaluation budget across all pieces.
        initial_panels: Panels per piece before any adaptive decision. Raise
            it for oscillatory integrands so that the first Simpson comparison
            cannot alias.

    Returns:
        ``QuadResult(value, error)``.

    Raises:
        NonFiniteIntegrandError: The integrand produced NaN/inf; carries the locations.
        QuadratureError: The tolerance was not met; carries the best estimate.
    """
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    fv = _as_vectorized(f, vectorized)
    if domain.transform == "origin-singularity-removal" or domain.origin_limit is not None:
        limit = domain.origin_limit if domain.origin_limit is not None else _extrapolate_origin(fv)
        fv = _with_limit(fv, limit)
    pieces = domain.pieces()
    total = 0.0
    error = 0.0
    if domain.transform == "algebraic-decay" and domain.tail_coefficient is not None:
        c = float(domain.tail_coefficient)
        cutoff = domain.cutoff if domain.cutoff is not None else math.sqrt(10.0 * max(abs(c), 1.0) / tol)
        clipped = []
        for lo, hi in pieces:
            if not math.isfinite(lo):
                lo = min(-cutoff, hi - 1.0)
                total += c / -lo
            if not math.isfinite(hi):
                hi = max(cutoff, lo + 1.0)
                total += c / hi
            clipped.append((lo, hi))
        pieces = clipped
    converged = True
    budget = max_evaluations
    for lo, hi in pieces:
        u0, u1, t_of, jac = _piece_map(lo, hi)

        def g(u, t_of=t_of, jac=jac):
            t = t_of(u)
            vals = fv(t)
            bad = ~np.isfinite(vals)
            if np.any(bad):
                raise NonFiniteIntegrandError(t[bad])
            return vals * jac(u)

        # On (-inf, hi] the map runs backwards, so the orientation flip cancels
        # the negative Jacobian and the weight stays positive.
        value, err, evals, ok = _adaptive_simpson(g, u0, u1, tol / len(pieces), max_depth, budget,
                                                   panels=initial_panels)
        budget -= evals
        total += value
        error += err
        converged = converged and ok
    if not converged and error > tol:
        raise QuadratureError("adaptive Simpson did not converge", total, error)
    return QuadResult(total, error)


def _with_limit(f: Callable, limit: float) -> Callable:
    def g(t):
        t = np.asarray(t, dtype=float)
        near = np.abs(t) < ORIGIN_RADIUS
        if not np.any(near):
            return f(t)
        out = np.empty_like(t)
        out[near] = limit
        out[~near] = f(t[~near])
        return out

    return g


@lru_cache(maxsize=64)
def _legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre_nodes(a: float, b: float, n: int = 32, panels: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of a composite ``n``-point Gauss-Legendre rule on [a, b]."""
    if panels < 1 or n < 1:
        raise ValueError("need at least one panel and one node")
    x, w = _legendre(n)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def gauss_legendre_breakpoints(breakpoints: Sequence[float], n: int = 32) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights with one ``n``-point panel per breakpoint interval."""
    edges = np.asarray(sorted(breakpoints), dtype=float)
    x, w = _legendre(n)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


def fixed_gauss_legendre(f: Callable, a: float, b: float, n: int = 32, panels: int = 1) -> float:
    """Integrate a vectorized ``f`` on [a, b] with a composite Gauss-Legendre rule."""
    nodes, weights = gauss_legendre_nodes(a, b, n, panels)
    return float(np.dot(weights, f(nodes)))
