"""INI experiment files.

Schema (every key optional unless noted)::

    [run]
    command = sp1d-exact          ; required when the file drives a whole run
    seed = 0
    replicates = 200
    workers = 1
    output_dir = out              ; defaults to $RICEWAVES_OUTPUT_DIR or "."

    [model]                       ; one-dimensional covariance
    kind = gaussian | compact-bump-convolution | tabulated-spectrum
    variance = 1.0
    length_scale = 1.0
    delta = 2.0
    exponent = 5
    frequencies = 0, 0.1, ...     ; tabulated-spectrum only
    density = ...

    [spectrum]                    ; planar spectrum
    kind = ring | gaussian-ring | stretched-ring | gaussian-2d
    k0 = 1.0
    width = 0.1
    gamma = 0.5
    kappa = 0.785398
    cov = 1, 0.5, 0.5, 1          ; gaussian-2d wavevector covariance, row major

    [params]                      ; numeric inputs of the command
    k, h1, h2, lambda2, lambda4, u, window, step, sigma_scale, gradient_scale
    r_grid, x_grid, sigma (9 entries), gradient (4 entries)
    phi_grid (point count), quantity, figure

    [tolerances]
    any_name = positive float

Values that are absent are filled from ``DEFAULTS`` and the filled-in record
is what :func:`dump_config` writes, so a dumped file reproduces the run.
"""

from __future__ import annotations

import configparser
import io
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .spectral_model import (BumpConvolutionCovariance, CovarianceModel1D, GaussianCovariance, GaussianRingSpectrum,
                             GaussianSpectrum2D, HessianCov3, PlanarSpectrum, RingSpectrum, StretchedSpectrum2D,
                             TabulatedSpectrumCovariance)

OUTPUT_ENV = "RICEWAVES_OUTPUT_DIR"
COMMANDS = ("moments", "sp1d", "sp1d-exact", "variance", "clt", "twinkle", "sp2d", "m2", "angle", "disloc",
            "simulate", "verify", "figure")
MODEL_KINDS = ("gaussian", "compact-bump-convolution", "tabulated-spectrum")
SPECTRUM_KINDS = ("ring", "gaussian-ring", "stretched-ring", "gaussian-2d")


class ConfigError(ValueError):
    """A config value is missing, malformed or out of range."""

    def __init__(self, key: str, problem: str):
        super().__init__(f"{key}: {problem}")
        self.key = key


def _positive(key, v):
    if not v > 0:
        raise ConfigError(key, f"must be positive, got {v}")
    return v


def _non_negative(key, v):
    if not v >= 0:
        raise ConfigError(key, f"must be non-negative, got {v}")
    return v


def _unit_interval(key, v):
    if not 0 <= v < 1:
        raise ConfigError(key, f"must lie in [0, 1), got {v}")
    return v


def _float(check=None):
    def parse(key, raw):
        try:
            v = float(raw)
        except ValueError:
            raise ConfigError(key, f"expected a number, got {raw!r}") from None
        if not math.isfinite(v):
            raise ConfigError(key, f"expected a finite number, got {raw!r}")
        return check(key, v) if check else v

    return parse


def _int(check=None):
    def parse(key, raw):
        try:
            v = int(raw)
        except ValueError:
            raise ConfigError(key, f"expected an integer, got {raw!r}") from None
        return check(key, v) if check else v

    return parse


def _floats(length: int | None = None, check=None):
    def parse(key, raw):
        items = [s for s in str(raw).replace("\n", ",").split(",") if s.strip()]
        try:
            values = [float(s) for s in items]
        except ValueError:
            raise ConfigError(key, f"expected comma-separated numbers, got {raw!r}") from None
        if length is not None and len(values) != length:
            raise ConfigError(key, f"expected {length} numbers, got {len(values)}")
        if not values:
            raise ConfigError(key, "expected at least one number")
        if check:
            for v in values:
                check(key, v)
        return values

    return parse


def _choice(options):
    def parse(key, raw):
        if raw not in options:
            raise ConfigError(key, f"expected one of {', '.join(options)}, got {raw!r}")
        return raw

    return parse


def _text(key, raw):
    return str(raw)


SCHEMA: dict[str, dict[str, Callable[[str, str], Any]]] = {
    "run": {
        "command": _choice(COMMANDS),
        "seed": _int(_non_negative),
        "replicates": _int(_positive),
        "workers": _int(_positive),
        "output_dir": _text,
    },
    "model": {
        "kind": _choice(MODEL_KINDS),
        "variance": _float(_positive),
        "length_scale": _float(_positive),
        "delta": _float(_positive),
        "exponent": _int(_positive),
        "frequencies": _floats(check=_non_negative),
        "density": _floats(check=_non_negative),
    },
    "spectrum": {
        "kind": _choice(SPECTRUM_KINDS),
        "k0": _float(_positive),
        "width": _float(_positive),
        "gamma": _float(_unit_interval),
        "kappa": _float(),
        "cov": _floats(4),
    },
    "params": {
        "k": _float(_positive),
        "h1": _float(_positive),
        "h2": _float(_positive),
        "lambda2": _float(_positive),
        "lambda4": _float(_positive),
        "u": _float(),
        "window": _float(_positive),
        "step": _float(_positive),
        "r_grid": _floats(check=_positive),
        "x_grid": _floats(),
        "phi_grid": _int(_positive),
        "sigma": _floats(9),
        "sigma_scale": _float(_positive),
        "gradient": _floats(4),
        "gradient_scale": _float(_positive),
        "quantity": _text,
        "figure": _choice(("1", "2", "4")),
    },
    "tolerances": {},
}

DEFAULTS: dict[str, dict[str, Any]] = {
    "run": {"seed": 0, "workers": 1},
    "model": {"kind": "gaussian", "variance": 1.0, "length_scale": 1.0},
    "spectrum": {"kind": "ring", "k0": 1.0},
    "params": {},
    "tolerances": {},
}


@dataclass(frozen=True)
class ExperimentConfig:
    command: str | None = None
    seed: int = 0
    replicates: int | None = None
    workers: int = 1
    output_dir: str = "."
    model: dict[str, Any] = field(default_factory=dict)
    spectrum: dict[str, Any] = field(default_factory=dict)
    params: dict[str, Any] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)

    def param(self, key: str, default: Any = None, required: bool = False):
        if key in self.params:
            return self.params[key]
        if required:
            raise ConfigError(f"params.{key}", "is required for this command")
        return default

    def replace(self, section: str, **values) -> "ExperimentConfig":
        """Copy with ``values`` merged into ``section`` (validated like file input)."""
        raw = {section: {k: _format(v) for k, v in values.items() if v is not None}}
        merged = _merge(self.to_sections(), _validate(raw))
        return _from_sections(merged)

    def to_sections(self) -> dict[str, dict[str, Any]]:
        run = {"seed": self.seed, "workers": self.workers, "output_dir": self.output_dir}
        if self.command is not None:
            run["command"] = self.command
        if self.replicates is not None:
            run["replicates"] = self.replicates
        return {"run": run, "model": dict(self.model), "spectrum": dict(self.spectrum),
                "params": dict(self.params), "tolerances": dict(self.tolerances)}


def _validate(raw: dict[str, dict[str, str]]) -> dict[str, dict[str, Any]]:
    out: dict[str, dict[str, Any]] = {}
    for section, items in raw.items():
        if section not in SCHEMA:
            raise ConfigError(section, f"unknown section; expected one of {', '.join(SCHEMA)}")
        schema = SCHEMA[section]
        parsed = {}
        for key, value in items.items():
            name = f"{section}.{key}"
            if section == "tolerances":
                parsed[key] = _float(_positive)(name, value)
            elif key not in schema:
                raise ConfigError(name, f"unknown key; expected one of {', '.join(schema)}")
            else:
                parsed[key] = schema[key](name, value)
        out[section] = parsed
    return out


def _merge(base: dict, extra: dict) -> dict:
    merged = {s: dict(v) for s, v in base.items()}
    for section, items in extra.items():
        merged.setdefault(section, {}).update(items)
    return merged


def _from_sections(sections: dict[str, dict[str, Any]]) -> ExperimentConfig:
    full = _merge(DEFAULTS, sections)
    run = full["run"]
    run.setdefault("output_dir", os.environ.get(OUTPUT_ENV, "."))
    model, spectrum, params = full["model"], full["spectrum"], full["params"]
    if model.get("kind") == "tabulated-spectrum" and not ("frequencies" in model and "density" in model):
        raise ConfigError("model.frequencies", "tabulated-spectrum needs frequencies and density")
    if "frequencies" in model and "density" in model and len(model["frequencies"]) != len(model["density"]):
        raise ConfigError("model.density", "must have as many entries as model.frequencies")
    if model.get("kind") == "compact-bump-convolution":
        model.setdefault("delta", 2.0)
        model.setdefault("exponent", 5)
    if spectrum.get("kind") == "gaussian-ring":
        spectrum.setdefault("width", 0.1)
    if spectrum.get("kind") == "stretched-ring":
        spectrum.setdefault("gamma", 0.5)
        spectrum.setdefault("kappa", math.pi / 4)
    if spectrum.get("kind") == "gaussian-2d" and "cov" not in spectrum:
        raise ConfigError("spectrum.cov", "gaussian-2d needs the wavevector covariance")
    if "figure" in params:
        params["figure"] = str(params["figure"])
    return ExperimentConfig(run.get("command"), run["seed"], run.get("replicates"), run["workers"],
                            run["output_dir"], model, spectrum, params, full["tolerances"])


def parse_config(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("file", f"cannot parse: {exc}") from exc
    raw = {s: dict(parser.items(s)) for s in parser.sections()}
    return _from_sections(_validate(raw))


def load_config(path: str | Path) -> ExperimentConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError("file", f"cannot read {p}: {exc.strerror}") from exc
    return parse_config(text)


def _format(v) -> str:
    if isinstance(v, (list, tuple, np.ndarray)):
        return ", ".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def dump_config(config: ExperimentConfig) -> str:
    """INI text of the resolved config; :func:`parse_config` reads it back unchanged."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    for section, items in config.to_sections().items():
        parser[section] = {k: _format(v) for k, v in items.items()}
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Building models
# ---------------------------------------------------------------------------


def build_model(config: ExperimentConfig) -> CovarianceModel1D:
    m = config.model
    kind = m.get("kind", "gaussian")
    if kind == "gaussian":
        return GaussianCovariance(m.get("variance", 1.0), m.get("length_scale", 1.0))
    if kind == "compact-bump-convolution":
        return BumpConvolutionCovariance(m.get("delta", 2.0), int(m.get("exponent", 5)), m.get("variance", 1.0))
    return TabulatedSpectrumCovariance(np.array(m["frequencies"]), np.array(m["density"]))


def build_spectrum(config: ExperimentConfig) -> PlanarSpectrum:
    s = config.spectrum
    kind = s.get("kind", "ring")
    if kind == "ring":
        return RingSpectrum(s.get("k0", 1.0))
    if kind == "gaussian-ring":
        return GaussianRingSpectrum(s.get("k0", 1.0), s.get("width", 0.1))
    if kind == "stretched-ring":
        return StretchedSpectrum2D.stretched(RingSpectrum(s.get("k0", 1.0)), s["gamma"], s["kappa"])
    return GaussianSpectrum2D(np.array(s["cov"]).reshape(2, 2))


def sigma_matrix(config: ExperimentConfig) -> HessianCov3:
    values = config.param("sigma", required=True)
    return HessianCov3(np.array(values).reshape(3, 3) * config.param("sigma_scale", 1.0))


def gradient_matrix(config: ExperimentConfig) -> np.ndarray:
    values = config.param("gradient", required=True)
    return np.array(values).reshape(2, 2) * config.param("gradient_scale", 1.0)
