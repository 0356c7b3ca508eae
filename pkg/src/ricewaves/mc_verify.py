"""Monte Carlo checks of the analytic evaluators.

Every replicate draws its randomness from the substream ``(seed, replicate)``,
so a report depends only on its configuration and seed. Replicates may be
spread over worker processes; results are gathered back in replicate order
before any aggregation.
"""

from __future__ import annotations

import csv
import json
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np
from scipy import stats

from .dislocations import mean_density_2d
from .field_functionals import TwinkleMoments, twinkle_rate
from .level_angle import GradientAnisotropy, length_intensity, palm_bin_probabilities
from .simulate import (count_vector_zeros_2d, count_zeros_1d, extract_level_curves, sample_dislocation_pair,
                       sample_field_2d, sample_path_1d)
from .spectral_model import CovarianceModel1D, GaussianSpectrum2D, IsotropicSpectrum2D, PlanarSpectrum
from .specular1d import (SpecularConfig, clt_statistic, crossing_rate, m1_and_derivatives, sp1_exact_expectation,
                         sp2_expectation, theta_coefficient)
from .special import normal_cdf

QUANTITIES = ("crossings", "sp2-count", "sp1-count", "dislocation-count", "curve-length", "twinkle-support-check")
MIN_REPLICATES = 30
WINDOW_SIGMAS = 8.0
LATTICE_STEP = 0.0390625


class ConfigurationError(ValueError):
    """A verification request that cannot be run as stated."""


@dataclass
class VerificationReport:
    quantity: str
    analytic: float
    mc_mean: float
    mc_se: float
    replicates: int
    z: float
    threshold: float
    passed: bool
    seed: int
    wall_time: float
    details: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_samples(cls, quantity: str, analytic: float, samples, threshold: float, seed: int,
                     wall_time: float, **details) -> "VerificationReport":
        samples = np.asarray(samples, dtype=float)
        n = samples.size
        mean = float(np.mean(samples))
        se = float(np.std(samples, ddof=1)) / math.sqrt(n)
        if se > 0:
            z = (mean - analytic) / se
        else:
            z = 0.0 if mean == analytic else math.copysign(math.inf, mean - analytic)
        return cls(quantity, float(analytic), mean, se, n, float(z), float(threshold), bool(abs(z) <= threshold),
                   int(seed), float(wall_time), details)

    def to_json(self) -> str:
        return json.dumps(asdict(self), default=_jsonable, sort_keys=True)

    def summary(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return (f"{flag} {self.quantity}: analytic={self.analytic:.6g} mc={self.mc_mean:.6g} "
                f"se={self.mc_se:.3g} z={self.z:+.2f} (|z|<={self.threshold:g}, n={self.replicates})")


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


_CSV_FIELDS = ("quantity", "analytic", "mc_mean", "mc_se", "replicates", "z", "threshold", "passed", "seed",
               "wall_time")


def write_reports(reports: Sequence[VerificationReport], jsonl: str | Path | None = None,
                  csv_path: str | Path | None = None) -> None:
    """Append-free dump of reports as JSON lines and/or CSV."""
    if jsonl is not None:
        Path(jsonl).write_text("".join(r.to_json() + "\n" for r in reports))
    if csv_path is not None:
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(_CSV_FIELDS)
            for r in reports:
                writer.writerow([getattr(r, name) for name in _CSV_FIELDS])


def run_replicates(fn: Callable[[int], Any], replicates: int, workers: int = 1) -> list:
    """``[fn(0), ..., fn(replicates - 1)]``, optionally across processes."""
    if workers <= 1:
        return [fn(r) for r in range(replicates)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(replicates), chunksize=max(1, replicates // (4 * workers))))


# ---------------------------------------------------------------------------
# Per-replicate simulators. Module level so they can be pickled.
# ---------------------------------------------------------------------------


def _crossings_once(r, *, model, u, interval, step, M, seed):
    path = sample_path_1d(model, M, seed, r, method="gaussian")
    return count_zeros_1d(lambda x: path(x) - u, interval, step, refine=False).count


def _lattice_layout(model: CovarianceModel1D, half_width: float, step: float) -> tuple[int, float]:
    # smallest power-of-two lattice whose period keeps every lag in the window exact
    span = 2.0 * half_width + 2.0 * model.support
    n = 1 << max(10, math.ceil(math.log2(span / step)))
    return n, n * step


def specular_count(model: CovarianceModel1D, k: float, seed: int, replicate: int, step: float = LATTICE_STEP,
                   half_width: float | None = None) -> int:
    """Zeros of ``W'(x) - kx`` on ``[-L, L]`` for one replicate (``L`` defaults to 8 sd of the window)."""
    if half_width is None:
        half_width = WINDOW_SIGMAS * math.sqrt(model.spectral_moment(2)) / k
    n = int(math.ceil(2.0 * half_width / step))
    a = -0.5 * n * step
    x = a + step * np.arange(n + 1)
    if math.isfinite(model.support):
        _, period = _lattice_layout(model, half_width, step)
        path = sample_path_1d(model, seed=seed, replicate=replicate, method="lattice", period=period)
        v = path.on_grid(a, step, n + 1, order=1) - k * x
    else:
        path = sample_path_1d(model, seed=seed, replicate=replicate, method="gaussian")
        v = path(x, 1) - k * x
    return count_zeros_1d(None, (a, a + n * step), step, refine=False, values=v).count


def _sp2_once(r, *, model, k, step, seed):
    return specular_count(model, k, seed, r, step)


def _sp1_once(r, *, model, h1, h2, interval, step, M, seed):
    path = sample_path_1d(model, M, seed, r, method="gaussian")

    def z(x):
        m1 = m1_and_derivatives(x, path(x), h1, h2)[0]
        return path(x, 1) - m1

    return count_zeros_1d(z, interval, step, refine=False).count


def _disloc_once(r, *, spectrum, window, step, M, seed):
    xi, eta = sample_dislocation_pair(spectrum, M, seed, r, method="gaussian", stratified=True)
    return count_vector_zeros_2d(xi.with_gradient(), eta.with_gradient(), (0.0, window, 0.0, window), step).count


def _curve_once(r, *, spectrum, u, window, step, M, seed):
    f = sample_field_2d(spectrum, M, seed, r, method="gaussian", stratified=True).with_gradient()
    res = extract_level_curves(f, u, (0.0, window, 0.0, window), step)
    return float(np.sum(res.lengths * np.abs(np.cos(res.angles))))


@dataclass(frozen=True)
class _SlopeField:
    """``(d^a W/dx^a - target(x), d/dx, d/dt)`` for a space-time sample ``W(x, t)``."""

    sample: Any
    order: int
    k: float

    def _target(self, x):
        x = np.asarray(x, dtype=float)
        return self.k * x if self.order == 1 else np.full_like(x, self.k)

    def __call__(self, x, t):
        a = self.order
        d_target = self.k if a == 1 else 0.0
        return (self.sample(x, t, a, 0) - self._target(x), self.sample(x, t, a + 1, 0) - d_target,
                self.sample(x, t, a, 1))

    def grid(self, xs, ts):
        return self.sample.grid(xs, ts, self.order, 0) - self._target(xs)[:, None]


def _twinkle_once(r, *, spectrum, k, half_width, duration, step, M, seed):
    w = sample_field_2d(spectrum, M, seed, r, method="gaussian")
    res = count_vector_zeros_2d(_SlopeField(w, 1, k), _SlopeField(w, 2, k),
                                (-half_width, half_width, 0.0, duration), step)
    return res.count / duration


# ---------------------------------------------------------------------------
# verify_mean
# ---------------------------------------------------------------------------


def _require(model, kind, quantity):
    if not isinstance(model, kind):
        raise ConfigurationError(f"{quantity} needs a {kind.__name__}, got {type(model).__name__}")


def _plan(quantity: str, model, seed: int, params: dict) -> tuple[Callable, float, dict]:
    """Check units and build ``(replicate function, analytic value, details)``."""
    p = dict(params)
    if quantity == "crossings":
        _require(model, CovarianceModel1D, quantity)
        u = float(p.pop("u", 0.0))
        interval = tuple(p.pop("interval", (0.0, math.pi)))
        step = float(p.pop("step", 0.01 * model.correlation_length))
        fn = partial(_crossings_once, model=model, u=u, interval=interval, step=step, M=int(p.pop("M", 4000)),
                     seed=seed)
        analytic = crossing_rate(model, u, interval[1] - interval[0])
        details = {"u": u, "interval": list(interval), "step": step}
    elif quantity == "sp2-count":
        _require(model, CovarianceModel1D, quantity)
        k = float(p.pop("k"))
        step = float(p.pop("step", LATTICE_STEP))
        config = SpecularConfig(k, model)
        half = WINDOW_SIGMAS * math.sqrt(config.lambda2) / k
        analytic = sp2_expectation(config, (-half, half))
        fn = partial(_sp2_once, model=model, k=k, step=step, seed=seed)
        truncation = sp2_expectation(config) - analytic
        details = {"k": k, "half_width": half, "step": step, "truncation": truncation}
    elif quantity == "sp1-count":
        _require(model, CovarianceModel1D, quantity)
        h1, h2 = float(p.pop("h1")), float(p.pop("h2"))
        k = 0.5 * (1.0 / h1 + 1.0 / h2)
        half = WINDOW_SIGMAS * math.sqrt(model.spectral_moment(2)) / k
        step = float(p.pop("step", 0.05 * model.correlation_length))
        analytic, tail = sp1_exact_expectation(h1, h2, model, (-half, half))
        fn = partial(_sp1_once, model=model, h1=h1, h2=h2, interval=(-half, half), step=step,
                     M=int(p.pop("M", 1000)), seed=seed)
        details = {"h1": h1, "h2": h2, "half_width": half, "step": step, "w_tail_bound": tail}
    elif quantity == "dislocation-count":
        _require(model, IsotropicSpectrum2D, quantity)
        window = float(p.pop("window", 8.0))
        step = float(p.pop("step", 0.1 / model.max_wavenumber))
        analytic = mean_density_2d(model.lambda2) * window * window
        fn = partial(_disloc_once, spectrum=model, window=window, step=step, M=int(p.pop("M", 256)), seed=seed)
        details = {"window": window, "step": step}
    elif quantity == "curve-length":
        _require(model, PlanarSpectrum, quantity)
        u = float(p.pop("u", 0.0))
        window = float(p.pop("window", 20.0))
        step = float(p.pop("step", 0.1 / model.max_wavenumber))
        analytic = length_intensity(model.moment(2, 0), model.variance, u, window * window)
        fn = partial(_curve_once, spectrum=model, u=u, window=window, step=step, M=int(p.pop("M", 512)),
                     seed=seed)
        details = {"u": u, "window": window, "step": step}
    elif quantity == "twinkle-support-check":
        _require(model, GaussianSpectrum2D, quantity)
        k = float(p.pop("k", 1.0))
        m = TwinkleMoments.from_moments(model.moments(6))
        half = WINDOW_SIGMAS * math.sqrt(m.l20) / k
        duration = float(p.pop("duration", 20.0))
        step = float(p.pop("step", 0.04))
        analytic = twinkle_rate(m, k)
        fn = partial(_twinkle_once, spectrum=model, k=k, half_width=half, duration=duration, step=step,
                     M=int(p.pop("M", 512)), seed=seed)
        details = {"k": k, "half_width": half, "duration": duration, "step": step,
                   "truncation": analytic * 2.0 * float(normal_cdf(-WINDOW_SIGMAS))}
    else:
        raise ConfigurationError(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}")
    if p:
        raise ConfigurationError(f"unused parameters for {quantity}: {sorted(p)}")
    return fn, analytic, details


def verify_mean(quantity: str, model, replicates: int = 200, seed: int = 0, z_threshold: float = 3.0,
                workers: int = 1, **params) -> VerificationReport:
    """Compare the simulated mean of ``quantity`` with its analytic value.

    Quantity-specific parameters:

    * ``crossings``: ``u``, ``interval``, ``step``, ``M``
    * ``sp2-count``: ``k``, ``step``
    * ``sp1-count``: ``h1``, ``h2``, ``step``, ``M``
    * ``dislocation-count``: ``window``, ``step``, ``M``
    * ``curve-length``: ``u``, ``window``, ``step``, ``M``
    * ``twinkle-support-check``: ``k``, ``duration``, ``step``, ``M``
    """
    if replicates < MIN_REPLICATES:
        raise ConfigurationError(f"need at least {MIN_REPLICATES} replicates, got {replicates}")
    fn, analytic, details = _plan(quantity, model, seed, params)
    start = time.perf_counter()
    samples = run_replicates(fn, replicates, workers)
    return VerificationReport.from_samples(quantity, analytic, samples, z_threshold, seed,
                                           time.perf_counter() - start, **details)


# ---------------------------------------------------------------------------
# Variance scaling and the central limit
# ---------------------------------------------------------------------------


def specular_counts(model: CovarianceModel1D, k: float, replicates: int, seed: int = 0,
                    step: float = LATTICE_STEP, workers: int = 1) -> np.ndarray:
    """Counts of linearized specular points for replicates ``0..replicates-1``."""
    fn = partial(_sp2_once, model=model, k=k, step=step, seed=seed)
    return np.asarray(run_replicates(fn, replicates, workers), dtype=float)


@dataclass
class ScalingRow:
    k: float
    mean_k: float
    var_k: float
    theta: float
    cv: float
    cv_predicted: float
    mean_k_limit: float


@dataclass
class ScalingReport:
    rows: list[ScalingRow]
    replicates: int
    seed: int
    wall_time: float
    variance_tolerance: float = 0.15
    cv_tolerance: float = 0.20
    mean_tolerance: float = 0.02
    warnings: list[str] = field(default_factory=list)

    @property
    def variance_ok(self) -> bool:
        last = self.rows[-1]
        return abs(last.var_k - last.theta) <= self.variance_tolerance * last.theta

    @property
    def cv_ok(self) -> bool:
        cvs = [r.cv for r in self.rows]
        decreasing = all(b < a for a, b in zip(cvs, cvs[1:]))
        close = all(abs(r.cv - r.cv_predicted) <= self.cv_tolerance * r.cv_predicted for r in self.rows)
        return decreasing and close

    @property
    def mean_ok(self) -> bool:
        last = self.rows[-1]
        return abs(last.mean_k - last.mean_k_limit) <= self.mean_tolerance * last.mean_k_limit

    @property
    def passed(self) -> bool:
        return self.variance_ok and self.cv_ok and self.mean_ok

    def to_json(self) -> str:
        out = asdict(self)
        out.update(variance_ok=self.variance_ok, cv_ok=self.cv_ok, mean_ok=self.mean_ok, passed=self.passed)
        return json.dumps(out, default=_jsonable, sort_keys=True)


def verify_variance_scaling(model: CovarianceModel1D, ks: Sequence[float] = (0.2, 0.1, 0.05),
                            replicates: int = 2000, seed: int = 0, theta: float | None = None,
                            workers: int = 1, counts: dict[float, np.ndarray] | None = None) -> ScalingReport:
    """Simulated ``Var(S) k`` and coefficient of variation against ``theta``.

    The predicted coefficient of variation is ``sqrt(theta k) / sqrt(2 lambda4/pi)``,
    since ``E(S) k`` tends to ``sqrt(2 lambda4 / pi)``. ``counts`` may supply
    precomputed counts keyed by ``k``.
    """
    if not math.isfinite(model.support):
        raise ConfigurationError("variance scaling needs a compactly supported covariance")
    ks = [float(k) for k in ks]
    if any(b >= a for a, b in zip(ks, ks[1:])):
        raise ConfigurationError("the k grid must be strictly decreasing")
    notes = []
    if replicates < 500:
        notes.append(f"only {replicates} replicates; variance estimates are unstable below 500")
        warnings.warn(notes[-1], RuntimeWarning, stacklevel=2)
    if theta is None:
        theta = theta_coefficient(model).theta
    lam4 = model.spectral_moment(4)
    limit = math.sqrt(2.0 * lam4 / math.pi)
    start = time.perf_counter()
    rows = []
    for k in ks:
        if counts is not None and k in counts:
            s = np.asarray(counts[k], dtype=float)[:replicates]
        else:
            s = specular_counts(model, k, replicates, seed, workers=workers)
        mean, var = float(np.mean(s)), float(np.var(s, ddof=1))
        rows.append(ScalingRow(k, mean * k, var * k, theta, math.sqrt(var) / mean,
                               math.sqrt(theta * k) / limit, limit))
    return ScalingReport(rows, replicates, seed, time.perf_counter() - start, warnings=notes)


@dataclass
class CLTReport:
    k: float
    ks_distance: float
    ks_threshold: float | None
    passed: bool | None
    z_mean: float
    z_mean_bound: float
    replicates: int
    seed: int
    theta: float
    wall_time: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), default=_jsonable, sort_keys=True)


def verify_clt(model: CovarianceModel1D, k: float = 0.05, replicates: int = 500, seed: int = 0,
               theta: float | None = None, ks_threshold: float | None = 0.08, workers: int = 1,
               counts: np.ndarray | None = None) -> CLTReport:
    """Kolmogorov-Smirnov distance of the standardized counts from ``N(0, 1)``.

    Pass ``ks_threshold=None`` to report the distance without a verdict.
    """
    if replicates < 300:
        raise ConfigurationError(f"need at least 300 replicates, got {replicates}")
    if theta is None:
        theta = theta_coefficient(model).theta
    if not theta > 0:
        raise ConfigurationError(f"theta must be positive, got {theta}")
    start = time.perf_counter()
    s = specular_counts(model, k, replicates, seed, workers=workers) if counts is None \
        else np.asarray(counts, dtype=float)[:replicates]
    z = clt_statistic(s, k, model.spectral_moment(4), theta)
    ks = float(stats.kstest(z, "norm").statistic)
    passed = None if ks_threshold is None else bool(ks < ks_threshold)
    return CLTReport(k, ks, ks_threshold, passed, float(np.mean(z)), 3.0 / math.sqrt(replicates),
                     replicates, seed, theta, time.perf_counter() - start)


# ---------------------------------------------------------------------------
# Normal-angle law on level curves
# ---------------------------------------------------------------------------


def _angle_once(r, *, spectrum, u, window, step, M, seed, edges):
    f = sample_field_2d(spectrum, M, seed, r, method="gaussian", stratified=True).with_gradient()
    res = extract_level_curves(f, u, (0.0, window, 0.0, window), step)
    return np.histogram(res.angles, edges, weights=res.lengths)[0]


def angle_histograms(spectrum: PlanarSpectrum, replicates: int, seed: int = 0, bins: int = 24, u: float = 0.0,
                     window: float = 24.0, step: float = 0.2, M: int = 512, workers: int = 1) -> np.ndarray:
    """Length per angle bin, one row per replicate; bins split ``[-pi, pi]`` evenly."""
    edges = np.linspace(-math.pi, math.pi, bins + 1)
    fn = partial(_angle_once, spectrum=spectrum, u=u, window=window, step=step, M=M, seed=seed, edges=edges)
    return np.asarray(run_replicates(fn, replicates, workers), dtype=float)


def ratio_chi_square(rows: np.ndarray, expected: np.ndarray) -> tuple[float, int, float]:
    """Chi-square of pooled bin fractions against ``expected``.

    Bin lengths within a replicate are correlated, so the covariance of the
    pooled fractions is estimated from the replicates (ratio estimator). The
    last bin is dropped to remove the sum constraint.
    """
    rows = np.asarray(rows, dtype=float)
    n, bins = rows.shape
    totals = rows.sum(axis=1)
    if not totals.sum() > 0:
        raise ConfigurationError("no level curve was found; enlarge the window or move the level")
    phat = rows.sum(axis=0) / totals.sum()
    resid = rows - np.outer(totals, phat)
    cov = np.cov(resid[:, :-1], rowvar=False) / (n * totals.mean() ** 2)
    d = (phat - np.asarray(expected, dtype=float))[:-1]
    chi2 = float(d @ np.linalg.solve(cov, d))
    dof = bins - 1
    return chi2, dof, float(stats.chi2.sf(chi2, dof))


def two_sample_chi_square(rows_a: np.ndarray, rows_b: np.ndarray) -> tuple[float, int, float]:
    """Chi-square for equality of the pooled bin fractions of two independent ensembles."""
    out = []
    for rows in (np.asarray(rows_a, dtype=float), np.asarray(rows_b, dtype=float)):
        totals = rows.sum(axis=1)
        phat = rows.sum(axis=0) / totals.sum()
        resid = rows - np.outer(totals, phat)
        out.append((phat, np.cov(resid[:, :-1], rowvar=False) / (rows.shape[0] * totals.mean() ** 2)))
    d = (out[0][0] - out[1][0])[:-1]
    chi2 = float(d @ np.linalg.solve(out[0][1] + out[1][1], d))
    dof = d.size
    return chi2, dof, float(stats.chi2.sf(chi2, dof))


@dataclass
class AngleReport:
    form: str
    chi2: float
    dof: int
    p_value: float
    alpha: float
    passed: bool
    replicates: int
    seed: int
    observed: list[float]
    expected: list[float]
    wall_time: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), default=_jsonable, sort_keys=True)


def verify_angle_distribution(spectrum: PlanarSpectrum, replicates: int = 200, seed: int = 0, bins: int = 24,
                              form: str = "length-weighted", alpha: float = 0.01, workers: int = 1,
                              rows: np.ndarray | None = None, **sampling) -> AngleReport:
    """Length-weighted histogram of normal angles against the Palm density.

    ``sampling`` is forwarded to :func:`angle_histograms`.
    """
    if replicates < 100:
        raise ConfigurationError(f"need at least 100 replicates, got {replicates}")
    if bins < 16:
        raise ConfigurationError(f"need at least 16 angle bins, got {bins}")
    start = time.perf_counter()
    if rows is None:
        rows = angle_histograms(spectrum, replicates, seed, bins, workers=workers, **sampling)
    if rows.shape[1] != bins:
        raise ConfigurationError(f"histogram rows have {rows.shape[1]} bins, expected {bins}")
    edges = np.linspace(-math.pi, math.pi, bins + 1)
    expected = palm_bin_probabilities(GradientAnisotropy.from_spectrum(spectrum), edges, form)
    chi2, dof, p = ratio_chi_square(rows, expected)
    observed = rows.sum(axis=0) / rows.sum()
    return AngleReport(form, chi2, dof, p, alpha, bool(p > alpha), int(rows.shape[0]), seed, observed.tolist(),
                       expected.tolist(), time.perf_counter() - start)
