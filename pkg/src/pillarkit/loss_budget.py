"""Cavity loss budget: harmonic Q composition and the sidewall-scattering fit.

Losses add as inverse quality factors,

    1/Q = 1/Q_2D + 1/Q_scat = 1/Q_int + 1/Q_ext + 1/Q_scat,

and the sidewall channel is modelled as proportional to the guided mode's
power-normalized intensity at the pillar surface:

    1/Q_scat = alpha * sidewall_overlap(d).

alpha is a dimensionless roughness coefficient shared across pillar series
etched by the same process; it is the single fit parameter. Fits run in 1/Q
space, where the model is linear and the least-squares solution is closed
form.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, InputDomainError, RankDeficientFitError
from .pillar_mode import GuidedMode, PillarGeometry, solve_fundamental_mode

_REL_TOL = 1e-12


def _check_q(name: str, value: float):
    if math.isnan(value) or (not math.isinf(value) and value <= 0):
        raise InputDomainError(f"{name} must be > 0 or infinite, got {value}")


@dataclass(frozen=True)
class LossBudget:
    """The four partial quality factors and their harmonic compositions."""

    q_int: float
    q_ext: float
    q_scat: float
    q_2d: float
    q_total: float

    def __post_init__(self):
        for name in ("q_int", "q_ext", "q_scat", "q_2d", "q_total"):
            _check_q(name, getattr(self, name))
        inv_2d = 1.0 / self.q_int + 1.0 / self.q_ext
        if abs(1.0 / self.q_2d - inv_2d) > _REL_TOL * inv_2d:
            raise InputDomainError("1/q_2d != 1/q_int + 1/q_ext")
        inv_total = inv_2d + 1.0 / self.q_scat
        if abs(1.0 / self.q_total - inv_total) > _REL_TOL * inv_total:
            raise InputDomainError("1/q_total != 1/q_2d + 1/q_scat")
        if self.q_total > min(self.q_int, self.q_ext, self.q_scat) * (1 + _REL_TOL):
            raise InputDomainError("q_total exceeds a partial quality factor")


def compose(q_int: float, q_ext: float = math.inf, q_scat: float = math.inf) -> LossBudget:
    """Harmonically compose partial quality factors into a LossBudget."""
    for name, value in (("q_int", q_int), ("q_ext", q_ext), ("q_scat", q_scat)):
        _check_q(name, value)
    inv_2d = 1.0 / q_int + 1.0 / q_ext
    if inv_2d == 0.0:
        raise InputDomainError("q_int and q_ext cannot both be infinite")
    inv_total = inv_2d + 1.0 / q_scat
    return LossBudget(
        q_int=q_int,
        q_ext=q_ext,
        q_scat=q_scat,
        q_2d=1.0 / inv_2d,
        q_total=1.0 / inv_total,
    )


@dataclass(frozen=True)
class ScatteringModel:
    """Sidewall roughness model: 1/Q_scat = alpha * sidewall_overlap."""

    alpha: float

    def __post_init__(self):
        if self.alpha < 0 or math.isnan(self.alpha):
            raise InputDomainError(f"alpha must be >= 0, got {self.alpha}")


def q_scat_of_diameter(model: ScatteringModel, mode: GuidedMode) -> float:
    """Sidewall-scattering Q for a solved mode; infinite for alpha = 0."""
    inv = model.alpha * mode.sidewall_overlap
    return math.inf if inv == 0.0 else 1.0 / inv


@dataclass(frozen=True)
class QMeasurement:
    """One measured (diameter, Q) point belonging to a pillar series."""

    diameter_um: float
    q: float
    series: str

    def __post_init__(self):
        if self.diameter_um <= 0 or self.q <= 0:
            raise InputDomainError("diameter and q must be > 0")


@dataclass(frozen=True)
class AlphaFit:
    """Result of the shared-alpha least-squares fit in 1/Q space."""

    alpha: float
    residuals: np.ndarray  # model 1/Q minus measured 1/Q, per point
    model_q: np.ndarray  # fitted Q(d) at the measurement diameters
    alpha_by_series: dict[str, float] = field(default_factory=dict)


def mode_context(
    wavelength_nm: float, core_index: float, cladding_index: float = 1.0
) -> Callable[[float], GuidedMode]:
    """Mode solver bound to fixed indices/wavelength, cached per diameter."""
    cache: dict[float, GuidedMode] = {}

    def solve(diameter_um: float) -> GuidedMode:
        if diameter_um not in cache:
            cache[diameter_um] = solve_fundamental_mode(
                PillarGeometry(diameter_um, core_index, cladding_index, wavelength_nm)
            )
        return cache[diameter_um]

    return solve


def _alpha_lstsq(overlaps: np.ndarray, shifts: np.ndarray) -> float:
    denom = float(np.dot(overlaps, overlaps))
    if denom == 0.0:
        raise RankDeficientFitError("all sidewall overlaps are zero")
    return float(np.dot(overlaps, shifts) / denom)


def fit_alpha(
    data: Sequence[QMeasurement],
    q_2d_per_series: dict[str, float],
    mode_solver: Callable[[float], GuidedMode],
    per_series: bool = False,
) -> AlphaFit:
    """Fit the shared scattering coefficient to measured Q(d) data.

    Minimizes sum((1/q_model - 1/q_meas)^2) over all series jointly with
    1/q_model(d) = 1/q_2d(series) + alpha * overlap(d). ``per_series``
    additionally reports an independent alpha per series (diagnostics only).
    """
    if not data:
        raise InputDomainError("no measurements to fit")
    for m in data:
        if m.series not in q_2d_per_series:
            raise InputDomainError(f"series {m.series!r} has no q_2d value")

    overlaps = np.array([mode_solver(m.diameter_um).sidewall_overlap for m in data])
    inv_q2d = np.array([1.0 / q_2d_per_series[m.series] for m in data])
    shifts = np.array([1.0 / m.q for m in data]) - inv_q2d

    if len(data) >= 2 and np.ptp(overlaps) <= 1e-12 * np.max(np.abs(overlaps)):
        raise RankDeficientFitError(
            "all measurements share one sidewall overlap; alpha is not constrained "
            "by any diameter dependence"
        )

    alpha = _alpha_lstsq(overlaps, shifts)
    model_inv = inv_q2d + alpha * overlaps
    residuals = model_inv - (shifts + inv_q2d)

    by_series: dict[str, float] = {}
    if per_series:
        for series in sorted({m.series for m in data}):
            sel = np.array([m.series == series for m in data])
            by_series[series] = _alpha_lstsq(overlaps[sel], shifts[sel])

    return AlphaFit(
        alpha=alpha,
        residuals=residuals,
        model_q=1.0 / model_inv,
        alpha_by_series=by_series,
    )


def load_q_measurements(path, known_series: set[str] | None = None) -> list[QMeasurement]:
    """Read a `diameter_um,q,series` CSV; schema errors name the row."""
    out: list[QMeasurement] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["diameter_um", "q", "series"]:
            raise ConfigError(f"{path}: expected header 'diameter_um,q,series'")
        for idx, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise ConfigError(f"{path}: row {idx}: expected 3 columns, got {len(row)}")
            try:
                d = float(row[0])
                q = float(row[1])
            except ValueError as exc:
                raise ConfigError(f"{path}: row {idx}: {exc}") from None
            series = row[2].strip()
            if known_series is not None and series not in known_series:
                raise ConfigError(
                    f"{path}: row {idx}: unknown series {series!r}; expected one of "
                    f"{sorted(known_series)}"
                )
            try:
                out.append(QMeasurement(d, q, series))
            except InputDomainError as exc:
                raise ConfigError(f"{path}: row {idx}: {exc}") from None
    if not out:
        raise ConfigError(f"{path}: no measurement rows")
    return out
