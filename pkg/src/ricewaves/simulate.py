"""Monte Carlo substrate: spectral synthesis of Gaussian paths and fields, and
the level-set measurements (zero counts, joint zeros, level curves) taken on them.

Samples are finite sums of harmonics ``a_j cos(<k_j, x> + phi_j)`` so every
derivative is available in closed form at arbitrary points, which lets root
finders refine off the evaluation grid.

Three harmonic layouts are offered:

``randomized``
    ``M`` frequencies drawn from the normalized spectral law, fixed amplitude
    ``sqrt(2 lambda0 / M)`` and uniform phases. The field is only
    asymptotically Gaussian in ``M``.
``gaussian``
    Same frequencies, Rayleigh amplitudes. Conditionally on the frequencies
    the field is exactly Gaussian.
``lattice`` (1D only)
    Every frequency ``m * 2 pi / period`` up to the spectral cutoff with
    weight ``S(w) dw`` and Rayleigh amplitudes. The covariance is the
    ``period``-periodization of the model covariance, hence exact on lags
    shorter than ``period - support`` for compactly supported models, and grid
    evaluation reduces to one FFT.

Random numbers come from Philox substreams keyed by ``(seed, replicate)``, so
replicate ``r`` is reproducible on its own and independent of run order.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .spectral_model import CovarianceModel1D, PlanarSpectrum

DEFAULT_HARMONICS = 4000
_CHUNK = 1 << 22
_METHODS_1D = ("randomized", "gaussian", "lattice")
_METHODS_2D = ("randomized", "gaussian")


class NonFiniteSampleError(ArithmeticError):
    """A sampled function returned NaN or an infinity."""


def substream(seed: int, replicate: int = 0, stream: int = 0) -> np.random.Generator:
    """Counter-based generator for replicate ``replicate`` of run ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(replicate), int(stream)])))


def _rayleigh(rng: np.random.Generator, size) -> np.ndarray:
    return np.sqrt(-2.0 * np.log1p(-rng.random(size)))


# ---------------------------------------------------------------------------
# Field samples
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FieldSample1D:
    """``W(x) = sum_j a_j cos(w_j x + phi_j)``."""

    amplitudes: np.ndarray
    frequencies: np.ndarray
    phases: np.ndarray
    lattice_step: float | None = None

    @property
    def size(self) -> int:
        return int(self.amplitudes.size)

    def __call__(self, x, order: int = 0):
        """``W^(order)(x)`` evaluated term by term."""
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        out = np.empty_like(flat)
        coef = self.amplitudes * self.frequencies**order
        shift = self.phases + order * math.pi / 2
        chunk = max(1, _CHUNK // max(self.size, 1))
        for start in range(0, flat.size, chunk):
            part = flat[start:start + chunk]
            out[start:start + chunk] = np.cos(np.multiply.outer(part, self.frequencies) + shift) @ coef
        out = out.reshape(x.shape)
        return out if out.ndim else float(out)

    def on_grid(self, x0: float, step: float, count: int, order: int = 0) -> np.ndarray:
        """Values at ``x0 + step * arange(count)``, by FFT when the lattice allows it."""
        if self.lattice_step is not None:
            n_fft = 2.0 * math.pi / (self.lattice_step * step)
            n = int(round(n_fft))
            if abs(n_fft - n) < 1e-9 * n_fft and n >= count:
                m = np.rint(self.frequencies / self.lattice_step).astype(np.int64)
                coef = (self.amplitudes * self.frequencies**order
                        * np.exp(1j * (self.frequencies * x0 + self.phases + order * math.pi / 2)))
                bins = np.bincount(m % n, weights=coef.real, minlength=n) + 1j * np.bincount(
                    m % n, weights=coef.imag, minlength=n)
                return (np.fft.ifft(bins) * n).real[:count]
        return self(x0 + step * np.arange(count), order)


@dataclass(frozen=True, eq=False)
class FieldSample2D:
    """``W(x, y) = sum_j a_j cos(kx_j x + ky_j y + phi_j)``."""

    amplitudes: np.ndarray
    wavevectors: np.ndarray
    phases: np.ndarray

    @property
    def size(self) -> int:
        return int(self.amplitudes.size)

    def __call__(self, x, y, dx: int = 0, dy: int = 0):
        """``d^dx/dx d^dy/dy W`` at the broadcast points ``(x, y)``."""
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        kx, ky = self.wavevectors[:, 0], self.wavevectors[:, 1]
        coef = self.amplitudes * kx**dx * ky**dy
        shift = self.phases + (dx + dy) * math.pi / 2
        fx, fy = x.ravel(), y.ravel()
        out = np.empty_like(fx)
        chunk = max(1, _CHUNK // max(self.size, 1))
        for start in range(0, fx.size, chunk):
            sl = slice(start, start + chunk)
            arg = np.multiply.outer(fx[sl], kx) + np.multiply.outer(fy[sl], ky) + shift
            out[sl] = np.cos(arg) @ coef
        out = out.reshape(x.shape)
        return out if out.ndim else float(out)

    def grid(self, xs, ys, dx: int = 0, dy: int = 0) -> np.ndarray:
        """Values on the tensor grid ``xs x ys`` (shape ``(len(xs), len(ys))``).

        Uses the factorization ``exp(i(kx x + ky y)) = exp(i kx x) exp(i ky y)`` so
        the work is a single complex matrix product.
        """
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        kx, ky = self.wavevectors[:, 0], self.wavevectors[:, 1]
        coef = self.amplitudes * kx**dx * ky**dy * np.exp(1j * (self.phases + (dx + dy) * math.pi / 2))
        ex = np.exp(1j * np.multiply.outer(xs, kx)) * coef
        ey = np.exp(1j * np.multiply.outer(ky, ys))
        return (ex @ ey).real

    def with_gradient(self) -> "GradientField":
        return GradientField(self)


@dataclass(frozen=True)
class GradientField:
    """Adapter returning ``(value, d/dx, d/dy)`` for level-set routines."""

    sample: FieldSample2D
    offset: float = 0.0

    def __call__(self, x, y):
        return (self.sample(x, y) - self.offset, self.sample(x, y, 1, 0), self.sample(x, y, 0, 1))

    def grid(self, xs, ys):
        return self.sample.grid(xs, ys) - self.offset


def sample_path_1d(
    model: CovarianceModel1D,
    M: int = DEFAULT_HARMONICS,
    seed: int = 0,
    replicate: int = 0,
    method: str = "randomized",
    period: float | None = None,
) -> FieldSample1D:
    """Draw a stationary Gaussian path with covariance ``model``.

    Args:
        model: Covariance model with a spectral sampler/density.
        M: Number of harmonics (ignored by the lattice layout).
        seed: Run seed.
        replicate: Replicate index; selects the random substream.
        method: ``randomized``, ``gaussian`` or ``lattice`` (see module docs).
        period: Lattice period, required for ``lattice``.
    """
    if method not in _METHODS_1D:
        raise ValueError(f"unknown sampling method {method!r}; expected one of {_METHODS_1D}")
    rng = substream(seed, replicate)
    lam0 = model.variance
    if method == "lattice":
        if period is None or not period > 0:
            raise ValueError("lattice sampling needs a positive period")
        dw = 2.0 * math.pi / period
        m_max = int(math.ceil(model.frequency_cutoff() / dw))
        omega = dw * np.arange(m_max + 1)
        weight = 2.0 * dw * model.spectral_density(omega)
        weight[0] *= 0.5
        amps = np.sqrt(weight) * _rayleigh(rng, omega.size)
        phases = rng.random(omega.size) * 2.0 * math.pi
        # the constant harmonic carries a real Gaussian coefficient, not a Rayleigh one
        a0 = math.sqrt(weight[0]) * rng.standard_normal()
        amps[0], phases[0] = abs(a0), (0.0 if a0 >= 0 else math.pi)
        return FieldSample1D(amps, omega, phases, lattice_step=dw)
    if int(M) < 1:
        raise ValueError(f"need at least one harmonic, got M={M}")
    try:
        omega = np.asarray(model.sample_frequencies(rng, int(M)), dtype=float)
    except NotImplementedError as exc:
        raise ValueError(f"model kind {model.kind!r} has no spectral sampler") from exc
    phases = rng.random(int(M)) * 2.0 * math.pi
    amps = np.full(int(M), math.sqrt(2.0 * lam0 / M))
    if method == "gaussian":
        amps = math.sqrt(lam0 / M) * _rayleigh(rng, int(M))
    return FieldSample1D(amps, omega, phases)


def sample_field_2d(
    spectrum: PlanarSpectrum,
    M: int = DEFAULT_HARMONICS,
    seed: int = 0,
    replicate: int = 0,
    method: str = "randomized",
    stratified: bool = False,
    stream: int = 0,
) -> FieldSample2D:
    """Draw a stationary planar Gaussian field from a wavevector law.

    ``stream`` selects an independent substream for the same replicate, which
    is how the independent real and imaginary parts of a complex wave are drawn.
    ``stratified`` spreads the directions of isotropic spectra evenly so the
    sample's gradient covariance is exactly isotropic.
    """
    if method not in _METHODS_2D:
        raise ValueError(f"unknown sampling method {method!r}; expected one of {_METHODS_2D}")
    if int(M) < 1:
        raise ValueError(f"need at least one harmonic, got M={M}")
    rng = substream(seed, replicate, stream)
    M = int(M)
    k = spectrum.sample_wavevectors(rng, M, stratified=stratified)
    phases = rng.random(M) * 2.0 * math.pi
    lam0 = spectrum.variance
    amps = np.full(M, math.sqrt(2.0 * lam0 / M))
    if method == "gaussian":
        amps = math.sqrt(lam0 / M) * _rayleigh(rng, M)
    return FieldSample2D(amps, k, phases)


def sample_dislocation_pair(spectrum: PlanarSpectrum, M: int = DEFAULT_HARMONICS, seed: int = 0,
                            replicate: int = 0, method: str = "randomized",
                            stratified: bool = False) -> tuple[FieldSample2D, FieldSample2D]:
    """Independent real and imaginary parts ``(xi, eta)`` of a complex wave."""
    return tuple(sample_field_2d(spectrum, M, seed, replicate, method, stratified, stream=s) for s in (1, 2))


# ---------------------------------------------------------------------------
# Zero counting in one dimension
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ZeroCountResult:
    """Roots found by a counting routine."""

    count: int
    locations: np.ndarray
    converged: np.ndarray


def _grid(a: float, b: float, step: float) -> np.ndarray:
    if not (b > a and step > 0):
        raise ValueError(f"need a < b and a positive step, got [{a}, {b}] with step {step}")
    n = max(1, int(math.ceil((b - a) / step - 1e-12)))
    return np.linspace(a, b, n + 1)


def _values_only(func: Callable, x):
    out = func(x)
    if isinstance(out, tuple):
        out = out[0]
    return np.asarray(out, dtype=float)


def _check_finite(values: np.ndarray, *coords: np.ndarray) -> None:
    bad = ~np.isfinite(values)
    if np.any(bad):
        where = tuple(float(np.asarray(c)[bad].ravel()[0]) for c in coords)
        raise NonFiniteSampleError(f"sample is not finite at {where}")


def sign_change_cells(values: np.ndarray) -> np.ndarray:
    """Indices ``i`` where ``values[i]`` and ``values[i+1]`` straddle zero (zero counts as positive)."""
    pos = values >= 0
    return np.flatnonzero(pos[1:] != pos[:-1])


def count_zeros_1d(
    func: Callable,
    interval: tuple[float, float],
    step: float,
    *,
    refine: bool = True,
    tol: float = 1e-12,
    values: np.ndarray | None = None,
) -> ZeroCountResult:
    """Count zeros of a vectorized function on a closed interval.

    Sign changes between neighbouring grid nodes are counted; each is refined
    by bisection until its bracket is shorter than ``tol``. Two roots inside
    one cell cancel and are missed, so ``step`` must be small against the
    oscillation scale of the function.

    Args:
        func: ``x -> y`` (or ``x -> (y, y')``), vectorized.
        interval: ``(a, b)``.
        step: Grid spacing.
        refine: Skip bisection when only the count is needed.
        tol: Bracket width at which bisection stops.
        values: Precomputed values on the grid ``linspace(a, b, n+1)``; saves a
            function evaluation when the caller has a fast grid evaluator.
    """
    a, b = map(float, interval)
    x = _grid(a, b, step)
    y = _values_only(func, x) if values is None else np.asarray(values, dtype=float)
    if y.shape != x.shape:
        raise ValueError(f"expected {x.size} grid values, got {y.shape}")
    _check_finite(y, x)
    cells = sign_change_cells(y)
    if not refine:
        return ZeroCountResult(int(cells.size), x[cells] + 0.5 * (x[cells + 1] - x[cells]),
                               np.zeros(cells.size, dtype=bool))
    lo, hi = x[cells].copy(), x[cells + 1].copy()
    ylo = y[cells].copy()
    for _ in range(200):
        width = hi - lo
        active = width > tol
        if not np.any(active):
            break
        mid = 0.5 * (lo + hi)
        ym = _values_only(func, mid[active])
        _check_finite(ym, mid[active])
        same = (ym >= 0) == (ylo[active] >= 0)
        idx = np.flatnonzero(active)
        lo[idx[same]] = mid[active][same]
        ylo[idx[same]] = ym[same]
        hi[idx[~same]] = mid[active][~same]
    roots = 0.5 * (lo + hi)
    return ZeroCountResult(int(cells.size), roots, (hi - lo) <= tol)


# ---------------------------------------------------------------------------
# Joint zeros of two planar functions
# ---------------------------------------------------------------------------


def _winding_number(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Discrete degree of (u, v) around the cell corners listed counter-clockwise (last axis)."""
    ang = np.arctan2(v, u)
    d = np.diff(np.concatenate([ang, ang[..., :1]], axis=-1), axis=-1)
    d = (d + math.pi) % (2.0 * math.pi) - math.pi
    return np.rint(d.sum(axis=-1) / (2.0 * math.pi)).astype(int)


def _grid_eval(func, xs, ys):
    if hasattr(func, "grid"):
        return np.asarray(func.grid(xs, ys), dtype=float)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    out = func(X, Y)
    return np.asarray(out[0] if isinstance(out, tuple) else out, dtype=float)


def count_vector_zeros_2d(
    f: Callable,
    g: Callable,
    rectangle: tuple[float, float, float, float],
    step: float,
    *,
    newton_steps: int = 30,
) -> ZeroCountResult:
    """Count joint zeros of ``f`` and ``g`` in ``[x0, x1] x [y0, y1]``.

    ``f`` and ``g`` map ``(x, y)`` to ``(value, d/dx, d/dy)``. A grid cell is a
    candidate when both functions take both signs on its corners; Newton
    iteration from the cell centre then locates the root. Cells where Newton
    fails or leaves the cell fall back to the discrete degree of ``(f, g)``
    around the cell, and those roots are flagged as not converged. Roots closer
    than ``step / 10`` are merged.
    """
    x0, x1, y0, y1 = map(float, rectangle)
    xs, ys = _grid(x0, x1, step), _grid(y0, y1, step)
    F = _grid_eval(f, xs, ys)
    G = _grid_eval(g, xs, ys)
    _check_finite(F, *np.meshgrid(xs, ys, indexing="ij"))
    _check_finite(G, *np.meshgrid(xs, ys, indexing="ij"))

    def corners(a):
        return np.stack([a[:-1, :-1], a[1:, :-1], a[1:, 1:], a[:-1, 1:]], axis=-1)

    fc, gc = corners(F), corners(G)
    cand = ((fc.min(-1) <= 0) & (fc.max(-1) >= 0) & (gc.min(-1) <= 0) & (gc.max(-1) >= 0))
    ci, cj = np.nonzero(cand)
    if ci.size == 0:
        return ZeroCountResult(0, np.zeros((0, 2)), np.zeros(0, dtype=bool))
    ax, bx = xs[ci], xs[ci + 1]
    ay, by = ys[cj], ys[cj + 1]
    px, py = 0.5 * (ax + bx), 0.5 * (ay + by)
    ok = np.ones(ci.size, dtype=bool)
    scale = max(np.abs(F).max(), np.abs(G).max(), 1e-300)
    for _ in range(newton_steps):
        fv, fx, fy = f(px, py)
        gv, gx, gy = g(px, py)
        det = fx * gy - fy * gx
        good = det != 0
        det = np.where(good, det, 1.0)
        dx = (fv * gy - gv * fy) / det
        dy = (gv * fx - fv * gx) / det
        px = np.where(good, px - dx, px)
        py = np.where(good, py - dy, py)
        ok &= good & np.isfinite(px) & np.isfinite(py)
        px = np.where(np.isfinite(px), px, 0.5 * (ax + bx))
        py = np.where(np.isfinite(py), py, 0.5 * (ay + by))
    fv = f(px, py)[0]
    gv = g(px, py)[0]
    slack = 1e-9 * step
    inside = (px >= ax - slack) & (px <= bx + slack) & (py >= ay - slack) & (py <= by + slack)
    resid = np.hypot(fv, gv) <= 1e-9 * scale
    newton_ok = ok & inside & resid
    found = _dedupe(np.column_stack([px[newton_ok], py[newton_ok]]), step / 10.0)
    roots = [found]
    flags = [np.ones(found.shape[0], dtype=bool)]
    fail = np.flatnonzero(~newton_ok)
    if fail.size:
        # Newton may have walked into a neighbouring cell; credit a failed cell
        # with |degree| roots minus those already located inside it.
        deg = np.abs(_winding_number(fc[ci[fail], cj[fail]], gc[ci[fail], cj[fail]]))
        for n_deg, lo_x, hi_x, lo_y, hi_y in zip(deg, ax[fail], bx[fail], ay[fail], by[fail]):
            already = np.count_nonzero((found[:, 0] >= lo_x - slack) & (found[:, 0] <= hi_x + slack)
                                       & (found[:, 1] >= lo_y - slack) & (found[:, 1] <= hi_y + slack))
            extra = max(0, int(n_deg) - already)
            if extra:
                roots.append(np.tile([0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y)], (extra, 1)))
                flags.append(np.zeros(extra, dtype=bool))
    pts = np.concatenate(roots)
    conv = np.concatenate(flags)
    inside_rect = (pts[:, 0] >= x0) & (pts[:, 0] <= x1) & (pts[:, 1] >= y0) & (pts[:, 1] <= y1)
    return ZeroCountResult(int(inside_rect.sum()), pts[inside_rect], conv[inside_rect])


def _dedupe(pts: np.ndarray, radius: float) -> np.ndarray:
    """Greedy merge of points closer than ``radius``."""
    if pts.shape[0] < 2:
        return pts
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
    keep = np.ones(pts.shape[0], dtype=bool)
    for i in range(pts.shape[0]):
        if not keep[i]:
            continue
        # sorted by x, so only a short forward window can be within radius
        j = i + 1
        while j < pts.shape[0] and pts[j, 0] - pts[i, 0] < radius:
            if keep[j] and abs(pts[j, 1] - pts[i, 1]) < radius and np.hypot(*(pts[j] - pts[i])) < radius:
                keep[j] = False
            j += 1
    return pts[keep]


# ---------------------------------------------------------------------------
# Level curves (marching squares)
# ---------------------------------------------------------------------------

# corner order: 0 = (i, j), 1 = (i+1, j), 2 = (i+1, j+1), 3 = (i, j+1)
# edge e joins corners e and (e + 1) % 4
_SEGMENTS = {
    1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)], 6: [(0, 2)], 7: [(3, 2)],
    8: [(2, 3)], 9: [(2, 0)], 11: [(2, 1)], 12: [(1, 3)], 13: [(1, 0)], 14: [(0, 3)],
}
_SADDLES = {5: ([(3, 0), (1, 2)], [(0, 1), (2, 3)]), 10: ([(0, 1), (2, 3)], [(3, 0), (1, 2)])}


@dataclass(frozen=True, eq=False)
class LevelCurveResult:
    """Marching-squares segments with their lengths and normal angles."""

    segments: np.ndarray
    lengths: np.ndarray
    angles: np.ndarray
    skipped_cells: int

    @property
    def total_length(self) -> float:
        return float(self.lengths.sum())


def extract_level_curves(
    func: Callable,
    u: float,
    rectangle: tuple[float, float, float, float],
    step: float,
) -> LevelCurveResult:
    """Polyline approximation of ``{W = u}`` with per-segment normal angles.

    ``func`` maps ``(x, y)`` to ``(W, W_x, W_y)``; it may expose a
    ``grid(xs, ys)`` method for fast evaluation of ``W`` on the lattice. The
    normal angle of a segment is ``atan2(W_y, W_x)`` at its midpoint. Cells
    whose four corners all equal ``u`` are skipped and tallied.
    """
    x0, x1, y0, y1 = map(float, rectangle)
    xs, ys = _grid(x0, x1, step), _grid(y0, y1, step)
    V = _grid_eval(func, xs, ys) - u
    _check_finite(V, *np.meshgrid(xs, ys, indexing="ij"))
    c = np.stack([V[:-1, :-1], V[1:, :-1], V[1:, 1:], V[:-1, 1:]], axis=-1)
    flat = np.all(c == 0, axis=-1)
    above = c > 0
    case = (above[..., 0] * 1 + above[..., 1] * 2 + above[..., 2] * 4 + above[..., 3] * 8)
    case = np.where(flat, 0, case)
    ii, jj = np.meshgrid(np.arange(xs.size - 1), np.arange(ys.size - 1), indexing="ij")
    cx = np.stack([xs[ii], xs[ii + 1], xs[ii + 1], xs[ii]], axis=-1)
    cy = np.stack([ys[jj], ys[jj], ys[jj + 1], ys[jj + 1]], axis=-1)

    def edge_point(sel, e):
        a, b = e, (e + 1) % 4
        va, vb = c[sel][:, a], c[sel][:, b]
        t = va / (va - vb)
        px = cx[sel][:, a] + t * (cx[sel][:, b] - cx[sel][:, a])
        py = cy[sel][:, a] + t * (cy[sel][:, b] - cy[sel][:, a])
        return px, py

    pieces = []
    for code, pairs in _SEGMENTS.items():
        sel = case == code
        if not np.any(sel):
            continue
        for ea, eb in pairs:
            pieces.append(np.column_stack([*edge_point(sel, ea), *edge_point(sel, eb)]))
    for code, (low_pairs, high_pairs) in _SADDLES.items():
        sel_all = case == code
        if not np.any(sel_all):
            continue
        centre_high = c[sel_all].mean(axis=-1) > 0
        for pairs, mask in ((low_pairs, ~centre_high), (high_pairs, centre_high)):
            sel = np.zeros_like(sel_all)
            sel[sel_all] = mask
            if not np.any(sel):
                continue
            for ea, eb in pairs:
                pieces.append(np.column_stack([*edge_point(sel, ea), *edge_point(sel, eb)]))
    if pieces:
        seg = np.concatenate(pieces)
    else:
        seg = np.zeros((0, 4))
    lengths = np.hypot(seg[:, 2] - seg[:, 0], seg[:, 3] - seg[:, 1])
    mx, my = 0.5 * (seg[:, 0] + seg[:, 2]), 0.5 * (seg[:, 1] + seg[:, 3])
    if seg.shape[0]:
        _, wx, wy = func(mx, my)
        angles = np.arctan2(wy, wx)
    else:
        angles = np.zeros(0)
    return LevelCurveResult(seg, lengths, np.asarray(angles, dtype=float), int(flat.sum()))


# ---------------------------------------------------------------------------
# CSV dump
# ---------------------------------------------------------------------------


def dump_csv(path: str | Path, columns: dict[str, Sequence[float]]) -> Path:
    """Write equal-length columns to a CSV file with a header row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    data = [np.asarray(columns[n]).ravel() for n in names]
    if len({d.size for d in data}) > 1:
        raise ValueError("all CSV columns must have the same length")
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for row in zip(*data):
            writer.writerow([repr(float(v)) for v in row])
    return path
