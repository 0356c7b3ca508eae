"""Command-line entry point: ``ricewaves <command> [options]``.

Every command resolves its inputs into an :class:`~ricewaves.config.ExperimentConfig`
(file values overridden by flags), writes that record next to its outputs and
prints a one-line summary. Exit status: 0 on success, 1 on a numerical or
verification failure, 2 on a usage or configuration error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import mc_verify
from .config import (ConfigError, ExperimentConfig, build_model, build_spectrum, dump_config, gradient_matrix,
                     load_config, parse_config, sigma_matrix)
from .dislocations import DislocationModel, correlation_A, correlation_A_double
from .field_functionals import (Spec2DProblem, TwinkleMoments, abs_det_expectation, m2_coefficient,
                                sp2d_expectation, sp2d_intensity, twinkle_rate)
from .level_angle import PALM_FORMS, palm_angle_density
from .simulate import dump_csv, sample_field_2d, sample_path_1d
from .spectral_model import GaussianCovariance, IsotropicSpectrum2D
from .specular1d import (SpecularConfig, sp1_exact_expectation, sp1_intensity, sp2_expectation, sp2_intensity,
                         sp2_variance, theta_coefficient)

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class VerificationFailed(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _outdir(cfg: ExperimentConfig) -> Path:
    path = Path(cfg.output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _record(cfg: ExperimentConfig, name: str) -> Path:
    path = _outdir(cfg) / f"{name}.resolved.cfg"
    path.write_text(dump_config(cfg))
    return path


def _moment_config(k: float, lambda2: float) -> SpecularConfig:
    # a Gaussian covariance with the requested lambda2; lambda4 enters through ``sigma``
    return SpecularConfig(k, GaussianCovariance(1.0, 1.0 / math.sqrt(lambda2)))


def _slope(cfg: ExperimentConfig) -> float:
    if "k" in cfg.params:
        return cfg.params["k"]
    h1, h2 = cfg.param("h1", required=True), cfg.param("h2", required=True)
    return 0.5 * (1.0 / h1 + 1.0 / h2)


def _moments_1d(cfg: ExperimentConfig) -> tuple[float, float]:
    if "lambda4" in cfg.params:
        l2 = cfg.param("lambda2", 1.0)
        l4 = cfg.params["lambda4"]
        if not l4 > l2 * l2:
            raise ConfigError("params.lambda4", f"must exceed lambda2^2 = {l2 * l2}")
        return l2, l4
    model = build_model(cfg)
    return model.spectral_moment(2), model.spectral_moment(4)


def _grid(cfg: ExperimentConfig, key: str, default) -> np.ndarray:
    values = cfg.param(key)
    return np.asarray(default if values is None else values, dtype=float)


# ---------------------------------------------------------------------------
# Commands. Each takes the resolved config and returns a summary line.
# ---------------------------------------------------------------------------


def cmd_moments(cfg: ExperimentConfig) -> str:
    out = _outdir(cfg)
    if cfg.param("quantity") == "planar":
        spec = build_spectrum(cfg)
        pairs = [(a, n - a) for n in range(0, 5, 2) for a in range(n + 1)]
        dump_csv(out / "moments.csv", {"a": [p[0] for p in pairs], "b": [p[1] for p in pairs],
                                       "moment": [spec.moment(*p) for p in pairs]})
        return f"planar moments: lambda20={spec.moment(2, 0):.6g} lambda02={spec.moment(0, 2):.6g}"
    model = build_model(cfg)
    orders = list(range(0, 9, 2))
    values = [model.spectral_moment(n) for n in orders]
    dump_csv(out / "moments.csv", {"order": orders, "moment": values})
    return "moments: " + " ".join(f"lambda{n}={v:.6g}" for n, v in zip(orders, values))


def cmd_sp1d(cfg: ExperimentConfig) -> str:
    k = _slope(cfg)
    l2, l4 = _moments_1d(cfg)
    config = _moment_config(k, l2)
    total = sp2_expectation(config, sigma=lambda x: math.sqrt(l4) + 0.0 * x)
    closed = float(sp2_intensity(0.0, config, math.sqrt(l4))) * math.sqrt(2.0 * math.pi * l2) / k
    lead = math.sqrt(2.0 * l4 / math.pi) / k
    dump_csv(_outdir(cfg) / "sp1d.csv", {"k": [k], "expectation": [closed], "quadrature": [total],
                                         "leading_term": [lead]})
    return f"sp1d: k={k:.6g} E(SP2)={closed:.6f} leading={lead:.6f}"


def cmd_sp1d_exact(cfg: ExperimentConfig) -> str:
    h1, h2 = cfg.param("h1", required=True), cfg.param("h2", required=True)
    l2, l4 = _moments_1d(cfg)
    exact, tail = sp1_exact_expectation(h1, h2, lambda2=l2, lambda4=l4)
    k = 0.5 * (1.0 / h1 + 1.0 / h2)
    approx = float(sp2_intensity(0.0, _moment_config(k, l2), math.sqrt(l4))) * math.sqrt(2.0 * math.pi * l2) / k
    dump_csv(_outdir(cfg) / "sp1d_exact.csv", {"h1": [h1], "h2": [h2], "lambda2": [l2], "lambda4": [l4],
                                               "exact": [exact], "approximate": [approx], "w_tail_bound": [tail]})
    return f"sp1d-exact: h1={h1:g} h2={h2:g} exact={exact:.4f} approximate={approx:.4f} gap={exact - approx:.4f}"


def cmd_variance(cfg: ExperimentConfig) -> str:
    model = build_model(cfg)
    variant = "compact-support" if math.isfinite(model.support) else "mixing"
    res = theta_coefficient(model, variant=variant)
    pub = theta_coefficient(model, variant=variant, form="published")
    row = {"theta": [res.theta], "theta_published": [pub.theta], "J": [res.J]}
    line = f"variance: theta={res.theta:.6f} (published form {pub.theta:.6f})"
    if "k" in cfg.params:
        v = sp2_variance(SpecularConfig(cfg.params["k"], model))
        row.update(k=[cfg.params["k"]], var_k=[v * cfg.params["k"]])
        line += f" Var*k at k={cfg.params['k']:g}: {v * cfg.params['k']:.6f}"
    if cfg.replicates:
        rep = mc_verify.verify_variance_scaling(model, replicates=cfg.replicates, seed=cfg.seed,
                                                theta=res.theta, workers=cfg.workers)
        (_outdir(cfg) / "variance_report.json").write_text(rep.to_json() + "\n")
        dump_csv(_outdir(cfg) / "variance_scaling.csv",
                 {name: [getattr(r, name) for r in rep.rows] for name in ("k", "mean_k", "var_k", "theta", "cv",
                                                                          "cv_predicted")})
        line += f" MC Var*k at k={rep.rows[-1].k:g}: {rep.rows[-1].var_k:.4f} ({'PASS' if rep.passed else 'FAIL'})"
        if not rep.passed:
            dump_csv(_outdir(cfg) / "variance.csv", row)
            raise VerificationFailed(line)
    dump_csv(_outdir(cfg) / "variance.csv", row)
    return line


def cmd_clt(cfg: ExperimentConfig) -> str:
    model = build_model(cfg)
    k = cfg.param("k", 0.05)
    variant = "compact-support" if math.isfinite(model.support) else "mixing"
    theta = theta_coefficient(model, variant=variant).theta
    rep = mc_verify.verify_clt(model, k, cfg.replicates or 500, cfg.seed, theta=theta,
                               ks_threshold=cfg.tolerances.get("ks", 0.08), workers=cfg.workers)
    (_outdir(cfg) / "clt_report.json").write_text(rep.to_json() + "\n")
    line = f"clt: k={k:g} KS={rep.ks_distance:.4f} mean z={rep.z_mean:+.4f} ({'PASS' if rep.passed else 'FAIL'})"
    if not rep.passed:
        raise VerificationFailed(line)
    return line


def cmd_twinkle(cfg: ExperimentConfig) -> str:
    if "cov" not in cfg.spectrum:
        cfg = cfg.replace("spectrum", kind="gaussian-2d", cov=[1.0, 0.5, 0.5, 1.0])
    spec = build_spectrum(cfg)
    m = TwinkleMoments.from_moments(spec.moments(6))
    k = cfg.param("k", 1.0)
    rates = {form: twinkle_rate(m, k, form) for form in ("closed", "integrated", "published")}
    dump_csv(_outdir(cfg) / "twinkle.csv", {"k": [k], **{f: [v] for f, v in rates.items()}})
    return f"twinkle: k={k:g} rate={rates['closed']:.6g} (integrated {rates['integrated']:.6g})"


def _spec2d_problem(cfg: ExperimentConfig) -> Spec2DProblem:
    grad = gradient_matrix(cfg)
    return Spec2DProblem(sigma_matrix(cfg), grad[0, 0], grad[1, 1], grad[0, 1], cfg.param("k", 0.1))


def cmd_sp2d(cfg: ExperimentConfig) -> str:
    problem = _spec2d_problem(cfg)
    e = abs_det_expectation(problem)
    total = sp2d_expectation(problem)
    dump_csv(_outdir(cfg) / "sp2d.csv", {"k": [problem.k], "abs_det": [e], "total": [total]})
    return f"sp2d: k={problem.k:g} E|det|={e:.6g} E(SP2(R^2))={total:.6g}"


def cmd_m2(cfg: ExperimentConfig) -> str:
    sigma = sigma_matrix(cfg)
    exact = m2_coefficient(sigma)
    pub = m2_coefficient(sigma, convention="published")
    dump_csv(_outdir(cfg) / "m2.csv", {"m2": [exact.value], "m2_published": [pub.value],
                                       "ab_form": [exact.ab_form]})
    return f"m2: {exact.value:.4e} (published convention {pub.value:.4e})"


def cmd_angle(cfg: ExperimentConfig) -> str:
    gamma = cfg.spectrum.get("gamma", 0.5)
    kappa = cfg.spectrum.get("kappa", math.pi / 4)
    n = cfg.param("phi_grid", 360)
    phi = np.linspace(-math.pi, math.pi, n + 1)
    cols = {"phi": phi}
    for form in PALM_FORMS:
        cols[form] = palm_angle_density((gamma, kappa), phi, form)
    dump_csv(_outdir(cfg) / "angle_density.csv", cols)
    line = f"angle: gamma={gamma:g} kappa={kappa:.6g} max/min={cols['length-weighted'].max() / cols['length-weighted'].min():.4f}"
    if cfg.replicates:
        spec = build_spectrum(cfg.replace("spectrum", kind="stretched-ring", gamma=gamma, kappa=kappa))
        rep = mc_verify.verify_angle_distribution(spec, cfg.replicates, cfg.seed, workers=cfg.workers)
        (_outdir(cfg) / "angle_report.json").write_text(rep.to_json() + "\n")
        line += f" chi2 p={rep.p_value:.3g} ({'PASS' if rep.passed else 'FAIL'})"
        if not rep.passed:
            raise VerificationFailed(line)
    return line


def cmd_disloc(cfg: ExperimentConfig) -> str:
    spec = build_spectrum(cfg)
    if not isinstance(spec, IsotropicSpectrum2D):
        raise ConfigError("spectrum.kind", "dislocations need an isotropic spectrum (ring or gaussian-ring)")
    model = DislocationModel(spec)
    r = _grid(cfg, "r_grid", np.linspace(0.25, 10.0, 40))
    a = [correlation_A(model, x) for x in r]
    cols = {"r": r, "A": a, "A_over_d2sq": np.array(a) / model.mean_density**2}
    if cfg.tolerances.get("double_check"):
        cols["A_double"] = [correlation_A_double(model, x) for x in r]
    dump_csv(_outdir(cfg) / "disloc.csv", cols)
    return f"disloc: lambda2={model.lambda2:.6g} d2={model.mean_density:.6g} A(r) at {r.size} separations"


def cmd_simulate(cfg: ExperimentConfig) -> str:
    out = _outdir(cfg)
    step = cfg.param("step", 0.05)
    window = cfg.param("window", 20.0)
    if cfg.param("quantity", "path") == "field":
        f = sample_field_2d(build_spectrum(cfg), seed=cfg.seed, method="gaussian")
        xs = np.arange(0.0, window + 0.5 * step, step)
        values = f.grid(xs, xs)
        X, Y = np.meshgrid(xs, xs, indexing="ij")
        dump_csv(out / "field.csv", {"x": X, "y": Y, "W": values})
        return f"simulate: field on {xs.size}x{xs.size} grid"
    path = sample_path_1d(build_model(cfg), seed=cfg.seed, method="gaussian")
    x = np.arange(0.0, window + 0.5 * step, step)
    dump_csv(out / "path.csv", {"x": x, "W": path(x), "W1": path(x, 1), "W2": path(x, 2)})
    return f"simulate: path with {x.size} points"


def _verify_targets(cfg: ExperimentConfig):
    q = cfg.param("quantity", "crossings")
    if q in ("crossings", "sp2-count", "sp1-count"):
        model = build_model(cfg)
    elif q == "twinkle-support-check":
        model = build_spectrum(cfg if "cov" in cfg.spectrum
                               else cfg.replace("spectrum", kind="gaussian-2d", cov=[1.0, 0.5, 0.5, 1.0]))
    else:
        model = build_spectrum(cfg)
    keys = {"crossings": ("u", "step"), "sp2-count": ("k", "step"), "sp1-count": ("h1", "h2", "step"),
            "dislocation-count": ("window", "step"), "curve-length": ("u", "window", "step"),
            "twinkle-support-check": ("k", "step")}
    if q not in keys:
        raise ConfigError("params.quantity", f"expected one of {', '.join(mc_verify.QUANTITIES)}, got {q!r}")
    extra = {key: cfg.params[key] for key in keys[q] if key in cfg.params}
    if q == "sp2-count":
        extra.setdefault("k", 0.3)
    if q == "sp1-count":
        extra.setdefault("h1", 20.0)
        extra.setdefault("h2", 20.0)
    return q, model, extra


def cmd_verify(cfg: ExperimentConfig) -> str:
    quantity, model, extra = _verify_targets(cfg)
    rep = mc_verify.verify_mean(quantity, model, cfg.replicates or 200, cfg.seed,
                                cfg.tolerances.get("z", 3.0), cfg.workers, **extra)
    out = _outdir(cfg)
    mc_verify.write_reports([rep], out / "verify.jsonl", out / "verify.csv")
    if not rep.passed:
        raise VerificationFailed(rep.summary())
    return rep.summary()


# ---------------------------------------------------------------------------
# Figure data
# ---------------------------------------------------------------------------


def emit_figure_data(figure: int | str, cfg: ExperimentConfig) -> list[Path]:
    """Write the data behind figure 1 (specular intensities), 2 (Palm density) or 4 (2D intensity)."""
    figure = str(figure)
    out = _outdir(cfg)
    if figure == "1":
        h1, h2 = cfg.param("h1", 100.0), cfg.param("h2", 300.0)
        l2, l4 = cfg.param("lambda2", 1.0), cfg.param("lambda4", 3.0)
        k = 0.5 * (1.0 / h1 + 1.0 / h2)
        x = _grid(cfg, "x_grid", np.linspace(-4.0 * math.sqrt(l2) / k, 4.0 * math.sqrt(l2) / k, 401))
        exact = sp1_intensity(x, h1, h2, l2, l4)
        approx = sp2_intensity(x, _moment_config(k, l2), math.sqrt(l4))
        return [dump_csv(out / "figure1.csv", {"x": x, "exact": exact, "approximate": approx})]
    if figure == "2":
        gamma = cfg.spectrum.get("gamma", 0.5)
        kappa = cfg.spectrum.get("kappa", math.pi / 4)
        phi = np.linspace(-math.pi, math.pi, cfg.param("phi_grid", 360) + 1)
        return [dump_csv(out / "figure2.csv", {"phi": phi, "density": palm_angle_density((gamma, kappa), phi)})]
    if figure == "4":
        problem = _spec2d_problem(cfg)
        half = 4.0 * math.sqrt(max(problem.l20, problem.l02)) / problem.k
        x = _grid(cfg, "x_grid", np.linspace(-half, half, 81))
        X, Y = np.meshgrid(x, x, indexing="ij")
        values = sp2d_intensity(X, Y, problem)
        return [dump_csv(out / "figure4.csv", {"x": X, "y": Y, "intensity": values})]
    raise ConfigError("params.figure", f"expected 1, 2 or 4, got {figure!r}")


def cmd_figure(cfg: ExperimentConfig) -> str:
    figure = cfg.param("figure", required=True)
    paths = emit_figure_data(figure, cfg)
    return f"figure {figure}: wrote {', '.join(str(p) for p in paths)}"


COMMANDS = {
    "moments": cmd_moments, "sp1d": cmd_sp1d, "sp1d-exact": cmd_sp1d_exact, "variance": cmd_variance,
    "clt": cmd_clt, "twinkle": cmd_twinkle, "sp2d": cmd_sp2d, "m2": cmd_m2, "angle": cmd_angle,
    "disloc": cmd_disloc, "simulate": cmd_simulate, "verify": cmd_verify, "figure": cmd_figure,
}

# flag name -> (config section, key)
_FLAGS = {
    "k": ("params", "k"), "h1": ("params", "h1"), "h2": ("params", "h2"), "lambda2": ("params", "lambda2"),
    "lambda4": ("params", "lambda4"), "u": ("params", "u"), "window": ("params", "window"),
    "step": ("params", "step"), "r_grid": ("params", "r_grid"), "grid": ("params", "phi_grid"),
    "quantity": ("params", "quantity"), "figure": ("params", "figure"),
    "gamma": ("spectrum", "gamma"), "kappa": ("spectrum", "kappa"), "spectrum": ("spectrum", "kind"),
    "k0": ("spectrum", "k0"), "model": ("model", "kind"), "seed": ("run", "seed"),
    "replicates": ("run", "replicates"), "workers": ("run", "workers"), "output_dir": ("run", "output_dir"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ricewaves", description=__doc__.splitlines()[0])
    parser.add_argument("command", nargs="?", choices=sorted(COMMANDS),
                        help="defaults to [run] command of --config")
    parser.add_argument("figure_id", nargs="?", help="figure number for the 'figure' command")
    parser.add_argument("--config", help="INI experiment file")
    parser.add_argument("--sigma-file", help="INI file whose [params] give sigma/gradient matrices")
    for name in ("k", "h1", "h2", "lambda2", "lambda4", "u", "window", "step", "gamma", "kappa", "k0"):
        parser.add_argument(f"--{name.replace('_', '-')}", type=float)
    parser.add_argument("--r-grid", help="comma-separated separations")
    parser.add_argument("--grid", type=int, help="number of angle grid intervals")
    parser.add_argument("--quantity", help="what to verify or simulate")
    parser.add_argument("--spectrum", help="planar spectrum kind")
    parser.add_argument("--model", help="covariance model kind")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--replicates", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--output-dir")
    return parser


def resolve(args: argparse.Namespace) -> ExperimentConfig:
    """Config file, then ``--sigma-file`` matrices, then flags; the result is schema-validated."""
    cfg = load_config(args.config) if args.config else parse_config("")
    command = args.command or cfg.command
    if command is None:
        raise ConfigError("run.command", "give a command on the command line or in the config file")
    if command not in COMMANDS:
        raise ConfigError("run.command", f"expected one of {', '.join(sorted(COMMANDS))}, got {command!r}")
    if args.sigma_file:
        extra = load_config(args.sigma_file).params
        cfg = cfg.replace("params", **{k: v for k, v in extra.items()
                                       if k in ("sigma", "sigma_scale", "gradient", "gradient_scale")})
    args.figure = args.figure_id if command == "figure" else None
    updates: dict[str, dict] = {}
    for flag, (section, key) in _FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            updates.setdefault(section, {})[key] = value
    for section, values in updates.items():
        cfg = cfg.replace(section, **values)
    return cfg.replace("run", command=command)


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = resolve(args)
        record = _record(cfg, cfg.command)
        line = COMMANDS[cfg.command](cfg)
    except VerificationFailed as exc:
        print(str(exc))
        return EXIT_FAILED
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"{line} [config: {record}]")
    return EXIT_OK


def main() -> None:
    sys.exit(run())
