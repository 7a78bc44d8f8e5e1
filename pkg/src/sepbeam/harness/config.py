"""Experiment configuration: YAML file loading, defaults and validation.

A config file is a flat YAML mapping; keys mirror the
:class:`ExperimentConfig` fields. CLI flags override file values.
Validation errors name the offending field.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import yaml

__all__ = ["ConfigError", "ExperimentConfig", "load_config"]

EXPERIMENTS = (
    "ber_vs_snr",
    "ber_vs_rho",
    "cond_vs_rho",
    "flops_vs_size",
    "array_factor_maps",
)
METHODS = ("mmse", "mmse_lemma", "tmmse", "kmmse")
STATS_MODES = ("analytic", "sample")


class ConfigError(ValueError):
    """Invalid or unparsable experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a harness run needs besides the output directory.

    ``directions`` (optional list of ``[p, q]`` pairs) pins the wavefront
    layout instead of drawing it per trial; the first ``snr_grid_db`` entry
    is used by single-SNR experiments. ``desired_index`` is zero-based.
    """

    experiment: str
    n_h: int = 8
    n_v: int = 8
    r: int = 4
    k: int = 1000
    trials: int = 200
    snr_grid_db: tuple[float, ...] = tuple(range(-20, 12, 2))
    rho: tuple[float, ...] = (0.5,)
    eps: float = 1e-3
    max_iter: int = 50
    seed: int = 0
    methods: tuple[str, ...] = ("mmse", "tmmse", "kmmse")
    stats_mode: str = "sample"
    desired_index: int = 0
    directions: tuple[tuple[float, float], ...] | None = None
    workers: int = 1
    tmmse_iterations: int = 5
    size_grid: tuple[int, ...] = (2, 4, 8, 12, 16)
    af_points: int = 181

    def validate(self) -> None:
        def fail(name, msg):
            raise ConfigError(f"{name}: {msg}")

        if self.experiment not in EXPERIMENTS:
            fail("experiment", f"must be one of {EXPERIMENTS}, got {self.experiment!r}")
        for name in ("n_h", "n_v", "r", "k", "trials", "max_iter", "workers",
                     "tmmse_iterations", "af_points"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                fail(name, f"must be a positive integer, got {v!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            fail("seed", f"must be a non-negative integer, got {self.seed!r}")
        if not self.snr_grid_db:
            fail("snr_grid_db", "must contain at least one value")
        if not all(isinstance(v, (int, float)) for v in self.snr_grid_db):
            fail("snr_grid_db", "entries must be numbers")
        if not self.rho or any((not isinstance(v, (int, float))) or v < 0 for v in self.rho):
            fail("rho", "entries must be numbers >= 0")
        if not (isinstance(self.eps, (int, float)) and self.eps > 0):
            fail("eps", f"must be > 0, got {self.eps!r}")
        if not self.methods:
            fail("methods", "must contain at least one method")
        for m in self.methods:
            if m not in METHODS:
                fail("methods", f"unknown method {m!r}; expected subset of {METHODS}")
        if self.stats_mode not in STATS_MODES:
            fail("stats_mode", f"must be one of {STATS_MODES}, got {self.stats_mode!r}")
        if self.directions is not None:
            if len(self.directions) != self.r:
                fail("directions", f"expected {self.r} [p, q] pairs, got {len(self.directions)}")
            for i, d in enumerate(self.directions):
                if len(d) != 2 or any(not isinstance(c, (int, float)) for c in d):
                    fail(f"directions[{i}]", f"must be a [p, q] pair of numbers, got {d!r}")
                if any(abs(c) > 1 for c in d):
                    fail(f"directions[{i}]", f"cosines must lie in [-1, 1], got {d!r}")
        if not 0 <= self.desired_index < self.r:
            fail("desired_index", f"must be in [0, {self.r - 1}], got {self.desired_index}")
        if not self.size_grid or any((not isinstance(v, int)) or v < 1 for v in self.size_grid):
            fail("size_grid", "entries must be positive integers")


_TUPLE_FIELDS = {"snr_grid_db", "rho", "methods", "size_grid"}


def _coerce(name: str, value):
    if name in _TUPLE_FIELDS:
        if not isinstance(value, (list, tuple)):
            value = (value,)
        return tuple(value)
    if name == "directions":
        if value is None:
            return None
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"directions: expected a list of [p, q] pairs, got {value!r}")
        out = []
        for i, d in enumerate(value):
            if not isinstance(d, (list, tuple)):
                raise ConfigError(f"directions[{i}]: expected a [p, q] pair, got {d!r}")
            out.append(tuple(d))
        return tuple(out)
    return value


def load_config(path: str, overrides: dict | None = None) -> ExperimentConfig:
    """Read a YAML config, apply overrides, validate, return the config."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config file {path!r}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"config file {path!r} is not valid YAML: {e}") from e
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path!r} must contain a mapping at the top level")

    known = {f.name for f in fields(ExperimentConfig)}
    for key in raw:
        if key not in known:
            raise ConfigError(f"{key}: unknown config field")

    values = {k: _coerce(k, v) for k, v in raw.items()}
    if overrides:
        for k, v in overrides.items():
            if v is not None:
                if k not in known:
                    raise ConfigError(f"{k}: unknown config field")
                values[k] = _coerce(k, v)
    if "experiment" not in values:
        raise ConfigError("experiment: required field is missing")

    cfg = ExperimentConfig(**values)
    cfg.validate()
    return cfg
