"""Run configuration: the same `key = value` text format as the stack files.

Precedence is command-line flag > config file > shipped default. The shipped
defaults describe the GaAs/AlAs reference design at 950 nm; the material
indices are calibration inputs (the model is index-agnostic) and the default
scattering coefficient comes from the documented calibration run (see
docs/calibration.md).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .errors import ConfigError

#: Default sidewall-scattering coefficient. Calibrated once against the
#: published efficiency anchors; procedure and value in docs/calibration.md.
DEFAULT_ALPHA = 0.10


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


def _parse_float(raw: str) -> float:
    low = raw.strip().lower()
    if low in ("inf", "infinity"):
        return math.inf
    return float(raw)


def _parse_float_list(raw: str) -> tuple[float, ...]:
    parts = raw.replace(",", " ").split()
    if not parts:
        raise ValueError("empty list")
    return tuple(_parse_float(p) for p in parts)


@dataclass(frozen=True)
class RunConfig:
    """Typed view of one run configuration."""

    # geometry and materials
    stack: str | None = None
    wavelength_nm: float = 950.0
    core_index: float = 3.5
    cladding_index: float = 1.0
    resonance_window_nm: tuple[float, float] = (935.0, 965.0)
    effective_length_nm: float | None = None  # overrides the stack-derived value

    # coupling and losses
    gamma: float = 1.0
    q_ext: float = 30000.0
    alpha: float = DEFAULT_ALPHA
    tau0_ns: float = 1.0
    mode_degeneracy: bool = True

    # diameter grid
    d_min_um: float = 0.5
    d_max_um: float = 6.0
    d_count: int = 64
    d_scale: str = "log"

    # planar finesse series
    q_2d: tuple[float, ...] = (500.0, 1000.0, 2000.0, 5000.0)

    # fitting
    fit_data: str | None = None
    per_series: bool = False
    q2d_by_series: dict[str, float] = field(default_factory=dict)

    # Monte Carlo budget
    beta: float | None = None
    q_int: float | None = None
    q_scat: float | None = None
    top_fraction: float = 1.0
    n_photons: int = 1_000_000
    threads: int = 1

    # run control
    out: str | None = None
    seed: int = 20020923
    digest: str = "defaults"

    def __post_init__(self):
        if self.d_scale not in ("log", "linear"):
            raise ConfigError(f"d_scale must be 'log' or 'linear', got {self.d_scale!r}")
        if self.d_min_um <= 0 or self.d_max_um < self.d_min_um:
            raise ConfigError("need 0 < d_min_um <= d_max_um")
        if self.d_count < 1:
            raise ConfigError("d_count must be >= 1")
        lo, hi = self.resonance_window_nm
        if not (0 < lo < hi):
            raise ConfigError("resonance_window_nm must be an increasing pair")
        if not self.q_2d or any(q <= 0 for q in self.q_2d):
            raise ConfigError("q_2d values must be positive")

    def diameter_grid(self) -> tuple[float, ...]:
        import numpy as np

        if self.d_count == 1:
            return (self.d_min_um,)
        if self.d_scale == "log":
            return tuple(np.geomspace(self.d_min_um, self.d_max_um, self.d_count))
        return tuple(np.linspace(self.d_min_um, self.d_max_um, self.d_count))


_SCALAR_PARSERS = {
    "stack": str,
    "wavelength_nm": _parse_float,
    "core_index": _parse_float,
    "cladding_index": _parse_float,
    "effective_length_nm": _parse_float,
    "gamma": _parse_float,
    "q_ext": _parse_float,
    "alpha": _parse_float,
    "tau0_ns": _parse_float,
    "mode_degeneracy": _parse_bool,
    "d_min_um": _parse_float,
    "d_max_um": _parse_float,
    "d_count": int,
    "d_scale": str,
    "fit_data": str,
    "per_series": _parse_bool,
    "beta": _parse_float,
    "q_int": _parse_float,
    "q_scat": _parse_float,
    "top_fraction": _parse_float,
    "n_photons": int,
    "threads": int,
    "out": str,
    "seed": int,
}

_PATH_KEYS = ("stack", "fit_data", "out")


def parse_config(path, text: str, overrides: dict[str, str] | None = None) -> RunConfig:
    """Parse `key = value` text into a RunConfig; errors name the line."""
    values: dict = {}
    q2d_by_series: dict[str, float] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}: line {number}: expected 'key = value'")
        key, _, raw_value = line.partition("=")
        key = key.strip().lower()
        raw_value = raw_value.strip()
        if not raw_value:
            raise ConfigError(f"{path}: line {number}: empty value for {key!r}")
        try:
            if key.startswith("q2d."):
                q2d_by_series[key[4:]] = _parse_float(raw_value)
            elif key == "q_2d":
                values["q_2d"] = _parse_float_list(raw_value)
            elif key == "resonance_window_nm":
                pair = _parse_float_list(raw_value)
                if len(pair) != 2:
                    raise ValueError("expected two wavelengths")
                values["resonance_window_nm"] = (pair[0], pair[1])
            elif key in _SCALAR_PARSERS:
                values[key] = _SCALAR_PARSERS[key](raw_value)
            else:
                raise ConfigError(f"{path}: line {number}: unknown key {key!r}")
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{path}: line {number}: {exc}") from None

    digest_src = text.encode()
    if overrides:
        for key, raw_value in sorted(overrides.items()):
            if raw_value is None:
                continue
            if key != "out":  # the output path is not a computation parameter
                digest_src += f"\n!{key}={raw_value}".encode()
            try:
                if key == "q_2d":
                    values["q_2d"] = _parse_float_list(raw_value)
                elif key in _SCALAR_PARSERS:
                    values[key] = _SCALAR_PARSERS[key](raw_value)
                else:
                    raise ConfigError(f"unknown override {key!r}")
            except ValueError as exc:
                raise ConfigError(f"override {key}={raw_value!r}: {exc}") from None

    if q2d_by_series:
        values["q2d_by_series"] = q2d_by_series
    values["digest"] = hashlib.sha256(digest_src).hexdigest()[:12]

    base = Path(path).parent if path else Path(".")
    for key in _PATH_KEYS:
        if values.get(key):
            values[key] = str((base / values[key]).resolve()) if key != "out" else values[key]

    try:
        return RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def load_config(path, overrides: dict[str, str] | None = None) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(str(exc)) from None
    return parse_config(path, text, overrides)
