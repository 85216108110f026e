"""Run configuration: flat TOML files plus command-line overrides.

Recognised keys::

    e1 e2 gamma gamma1 gamma2 lambda c x tau t_max n
    initial_b1_re initial_b1_im initial_b2_re initial_b2_im
    method oracle_n_modes oracle_e_max_over_lambda out

``gamma`` is shorthand for equal widths and cannot be combined with
``gamma1``/``gamma2``.  Exactly one of ``x`` and ``tau`` is required for every
method except ``unmeasured``.  For the stepwise methods the measurement count
follows from ``x`` (or ``tau``) as ``n = round(t_max * lambda / x)``; for
``scaling`` and ``unmeasured`` the key ``n`` is the number of sampling
intervals on ``[0, t_max]``.
"""

from __future__ import annotations

import math
import sys
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import ConfigError, ParameterError
from .model import DotAmplitudes, MeasurementProtocol, PhysParams
from .oracle import DEFAULT_E_MAX_OVER_LAMBDA, DEFAULT_N_MODES

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = ["RunConfig", "SweepSpec", "KEYS", "METHODS", "parse_config", "build_config"]

METHODS = ("scaling", "analytic-stepwise", "pseudomode", "oracle", "perturbative", "unmeasured")
STEPWISE = ("analytic-stepwise", "pseudomode", "oracle", "perturbative")
CONTINUOUS = ("scaling", "unmeasured")
SWEEP_KEYS = ("x", "lambda", "e1", "e2", "gamma_ratio")
DEFAULT_SAMPLES = 200

KEYS: dict[str, type] = {
    "e1": float, "e2": float, "gamma": float, "gamma1": float, "gamma2": float,
    "lambda": float, "c": float, "x": float, "tau": float, "t_max": float, "n": int,
    "initial_b1_re": float, "initial_b1_im": float,
    "initial_b2_re": float, "initial_b2_im": float,
    "method": str, "oracle_n_modes": int, "oracle_e_max_over_lambda": float, "out": str,
}


@dataclass(frozen=True)
class RunConfig:
    params: PhysParams
    t_max: float
    method: str
    initial: DotAmplitudes
    x: float | None = None
    tau: float | None = None
    n: int | None = None
    oracle_n_modes: int = DEFAULT_N_MODES
    oracle_e_max_over_lambda: float = DEFAULT_E_MAX_OVER_LAMBDA
    out: str | None = None

    @property
    def protocol(self) -> MeasurementProtocol:
        """Measurement sequence landing exactly on ``t_max``."""
        lam = self.params.bandwidth
        if self.x is not None:
            return MeasurementProtocol.from_x(self.x, self.t_max, lam)
        if self.tau is not None:
            return MeasurementProtocol.from_tau(self.tau, self.t_max, lam)
        raise ConfigError("exactly one of x, tau is required for a measurement protocol", "x")

    @property
    def scaling_x(self) -> float:
        if self.x is not None:
            return self.x
        if self.tau is not None:
            return self.params.bandwidth * self.tau
        raise ConfigError("exactly one of x, tau is required", "x")

    @property
    def samples(self) -> int:
        return self.n if self.n is not None else DEFAULT_SAMPLES

    def with_method(self, method: str) -> "RunConfig":
        return _check(replace(self, method=method, n=None if method in STEPWISE else self.n))


@dataclass(frozen=True)
class SweepSpec:
    base: RunConfig
    key: str
    values: tuple[float, ...]
    methods: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.key not in SWEEP_KEYS:
            raise ConfigError(f"cannot sweep {self.key!r}; choose one of {', '.join(SWEEP_KEYS)}",
                              self.key)
        if not self.values:
            raise ConfigError("sweep needs at least one value", self.key)
        if not all(math.isfinite(v) for v in self.values):
            raise ConfigError("sweep values must be finite", self.key)
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"unknown method {m!r}", "method")

    def points(self) -> list[tuple[float, RunConfig]]:
        out = []
        for v in self.values:
            raw = _flatten(self.base)
            if self.key == "gamma_ratio":
                raw.pop("gamma", None)
                raw["gamma2"] = raw.get("gamma2", self.base.params.gamma2)
                raw["gamma1"] = v * v * raw["gamma2"]
            else:
                raw[self.key] = v
            for m in self.methods:
                cfg = build_config(dict(raw, method=m, n=raw["n"] if m in CONTINUOUS else None))
                out.append((v, cfg))
        return out


def _flatten(cfg: RunConfig) -> dict:
    p = cfg.params
    b = cfg.initial
    return {"e1": p.e1, "e2": p.e2, "gamma1": p.gamma1, "gamma2": p.gamma2,
            "lambda": p.bandwidth, "c": p.c, "x": cfg.x, "tau": cfg.tau, "t_max": cfg.t_max,
            "n": cfg.n, "initial_b1_re": b.b1.real, "initial_b1_im": b.b1.imag,
            "initial_b2_re": b.b2.real, "initial_b2_im": b.b2.imag, "method": cfg.method,
            "oracle_n_modes": cfg.oracle_n_modes,
            "oracle_e_max_over_lambda": cfg.oracle_e_max_over_lambda, "out": cfg.out}


def _coerce(key: str, value):
    kind = KEYS[key]
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"{key}: expected a string, got {value!r}", key)
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        if isinstance(value, str):
            try:
                return kind(value)
            except ValueError:
                pass
        raise ConfigError(f"{key}: expected a number, got {value!r}", key)
    if kind is int:
        if int(value) != value:
            raise ConfigError(f"{key}: expected an integer, got {value!r}", key)
        return int(value)
    if not math.isfinite(value):
        raise ConfigError(f"{key}: value must be finite", key)
    return float(value)


def _check(cfg: RunConfig) -> RunConfig:
    if cfg.method not in METHODS:
        raise ConfigError(f"method: unknown method {cfg.method!r}; choose one of "
                          f"{', '.join(METHODS)}", "method")
    if cfg.x is not None and cfg.tau is not None:
        raise ConfigError("exactly one of x, tau", "x")
    if cfg.x is not None and not cfg.x > 0:
        raise ConfigError("x must be positive", "x")
    if cfg.tau is not None and not cfg.tau > 0:
        raise ConfigError("tau must be positive", "tau")
    if cfg.method != "unmeasured" and cfg.x is None and cfg.tau is None:
        raise ConfigError(f"exactly one of x, tau is required for method {cfg.method!r}", "x")
    if not (cfg.t_max > 0 and math.isfinite(cfg.t_max)):
        raise ConfigError("t_max must be positive", "t_max")
    if cfg.n is not None:
        if cfg.n < 1:
            raise ConfigError("n must be a positive integer", "n")
        if cfg.method in STEPWISE and cfg.n != cfg.protocol.n:
            raise ConfigError(
                f"n={cfg.n} conflicts with the measurement count {cfg.protocol.n} "
                f"derived from x/tau; omit n for stepwise methods", "n")
    if cfg.oracle_n_modes < 3 or cfg.oracle_n_modes % 2 == 0:
        raise ConfigError("oracle_n_modes must be an odd integer >= 3", "oracle_n_modes")
    if not cfg.oracle_e_max_over_lambda >= 1:
        raise ConfigError("oracle_e_max_over_lambda must be at least 1",
                          "oracle_e_max_over_lambda")
    return cfg


def build_config(raw: dict) -> RunConfig:
    """Validate a flat mapping of config keys into a :class:`RunConfig`."""
    vals = {}
    for key, value in raw.items():
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}", key)
        if value is not None:
            vals[key] = _coerce(key, value)
    if "gamma" in vals:
        if "gamma1" in vals or "gamma2" in vals:
            raise ConfigError("gamma cannot be combined with gamma1/gamma2", "gamma")
        vals["gamma1"] = vals["gamma2"] = vals.pop("gamma")
    if "t_max" not in vals:
        raise ConfigError("t_max is required", "t_max")
    if "method" not in vals:
        raise ConfigError("method is required", "method")
    try:
        params = PhysParams(vals.get("e1", 0.0), vals.get("e2", 0.0),
                            vals.get("gamma1", 1.0), vals.get("gamma2", 1.0),
                            vals.get("lambda", 3.0), vals.get("c"))
    except ParameterError as exc:
        raise ConfigError(str(exc), str(exc).split(":")[0]) from exc

    b1 = complex(vals.get("initial_b1_re", 1.0), vals.get("initial_b1_im", 0.0))
    b2 = complex(vals.get("initial_b2_re", 0.0), vals.get("initial_b2_im", 0.0))
    initial = DotAmplitudes(b1, b2)
    if initial.norm2 == 0:
        raise ConfigError("initial amplitudes are both zero", "initial_b1_re")
    if abs(initial.norm2 - 1) > 1e-9:
        warnings.warn(f"initial amplitudes renormalized (squared norm was {initial.norm2:.12g})",
                      stacklevel=2)
    initial = initial.normalized()

    cfg = RunConfig(params, vals["t_max"], vals["method"], initial,
                    x=vals.get("x"), tau=vals.get("tau"), n=vals.get("n"),
                    oracle_n_modes=vals.get("oracle_n_modes", DEFAULT_N_MODES),
                    oracle_e_max_over_lambda=vals.get("oracle_e_max_over_lambda",
                                                      DEFAULT_E_MAX_OVER_LAMBDA),
                    out=vals.get("out"))
    try:
        return _check(cfg)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc


def parse_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Read a flat TOML file (optional) and apply ``overrides`` on top.

    Raises
    ------
    ConfigError
        With the parse position or the offending key in the message.
    OSError
        If the file cannot be read.
    """
    raw: dict = {}
    if path is not None:
        text = Path(path).read_bytes().decode("utf-8")
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        for key, value in raw.items():
            if isinstance(value, dict):
                raise ConfigError(f"{path}: tables are not allowed (key {key!r})", key)
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return build_config(raw)
