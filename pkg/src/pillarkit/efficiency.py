"""Source efficiency: the fraction of emission leaving through the top mirror.

Two equivalent forms (bottom-mirror transmission neglected):

    eta = beta * (1/Q_int) / (1/Q)                      (loss-ratio form)
    eta = beta * (Q/Q_2D - Q/Q_ext)                     (algebraic form)

Diameter sweeps chain the whole model: guided mode -> sidewall Q -> loss
budget -> mode volume -> Purcell factor -> beta -> eta. A sweep realizes a
requested planar Q_2D by adjusting the mirror term, 1/q_int = 1/q_2d -
1/q_ext, at fixed extrinsic losses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import multilayer
from .coupling import beta as beta_factor
from .coupling import purcell_factor
from .errors import (
    InconsistentBudgetError,
    InputDomainError,
    PillarKitError,
    SweepError,
)
from .loss_budget import LossBudget, ScatteringModel, compose, q_scat_of_diameter
from .pillar_mode import PillarGeometry, effective_mode_volume, solve_fundamental_mode

#: Longitudinal fill factor of the cos^2 standing wave: the energy-weighted
#: cavity length is half the geometric one (spacer plus both penetration
#: depths), matching the antinode normalization of the Purcell mode volume.
ANTINODE_LENGTH_FACTOR = 0.5

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0


def efficiency_eq2(beta_val: float, budget: LossBudget) -> float:
    """eta from the loss-ratio form beta * (1/q_int) / (1/q_total)."""
    if not (0.0 <= beta_val <= 1.0):
        raise InputDomainError("beta outside [0, 1]")
    return beta_val * (1.0 / budget.q_int) / (1.0 / budget.q_total)


def efficiency_eq3(beta_val: float, q_total: float, q_2d: float, q_ext: float) -> float:
    """eta from the algebraic form beta * (q_total/q_2d - q_total/q_ext)."""
    if not (0.0 <= beta_val <= 1.0):
        raise InputDomainError("beta outside [0, 1]")
    if q_total <= 0 or q_2d <= 0 or q_ext <= 0:
        raise InputDomainError("quality factors must be > 0")
    if q_total > q_2d * (1.0 + 1e-12):
        raise InconsistentBudgetError(f"q_total = {q_total:g} exceeds q_2d = {q_2d:g}")
    return beta_val * (q_total / q_2d - q_total / q_ext)


@dataclass(frozen=True)
class DesignPoint:
    """One row of a diameter sweep."""

    diameter_um: float
    q_2d: float
    q_total: float
    f_p: float
    beta: float
    eta: float

    def __post_init__(self):
        if not (0.0 <= self.eta <= self.beta <= 1.0):
            raise InputDomainError("need 0 <= eta <= beta <= 1")


@dataclass(frozen=True)
class EfficiencyCurve:
    """Sweep rows ordered by diameter plus the configuration snapshot."""

    points: tuple[DesignPoint, ...]
    provenance: dict

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if not self.provenance:
            raise InputDomainError("provenance must not be empty")
        d = [p.diameter_um for p in self.points]
        if any(b - a <= 0 for a, b in zip(d, d[1:])):
            raise InputDomainError("diameters must be strictly increasing")

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(p, name) for p in self.points])


def mirror_q_int(q_2d: float, q_ext: float) -> float:
    """Mirror-loss Q realizing a planar Q_2D at fixed extrinsic losses."""
    if q_2d <= 0:
        raise InputDomainError("q_2d must be > 0")
    inv = 1.0 / q_2d - (0.0 if math.isinf(q_ext) else 1.0 / q_ext)
    if inv <= 0:
        raise InputDomainError(f"q_2d = {q_2d:g} must be below q_ext = {q_ext:g}")
    return 1.0 / inv


def design_point(
    diameter_um: float,
    q_2d: float,
    scattering: ScatteringModel,
    *,
    wavelength_nm: float,
    effective_length_nm: float,
    core_index: float,
    cladding_index: float = 1.0,
    q_ext: float = 30000.0,
    gamma: float = 1.0,
    degenerate_mode: bool = True,
) -> DesignPoint:
    """Evaluate the full model chain at one pillar diameter."""
    mode = solve_fundamental_mode(
        PillarGeometry(diameter_um, core_index, cladding_index, wavelength_nm)
    )
    budget = compose(
        mirror_q_int(q_2d, q_ext), q_ext, q_scat_of_diameter(scattering, mode)
    )
    volume = effective_mode_volume(mode, ANTINODE_LENGTH_FACTOR * effective_length_nm)
    f_p = purcell_factor(budget.q_total, volume.volume_lam_n3)
    b = beta_factor(f_p, gamma, degenerate_mode)
    eta = efficiency_eq3(b, budget.q_total, budget.q_2d, q_ext)
    return DesignPoint(
        diameter_um=diameter_um,
        q_2d=budget.q_2d,
        q_total=budget.q_total,
        f_p=f_p,
        beta=b,
        eta=eta,
    )


def sweep_design(
    d_grid_um: Sequence[float],
    q_2d: float,
    scattering: ScatteringModel,
    *,
    wavelength_nm: float,
    effective_length_nm: float,
    core_index: float,
    cladding_index: float = 1.0,
    q_ext: float = 30000.0,
    gamma: float = 1.0,
    degenerate_mode: bool = True,
    extra_provenance: dict | None = None,
) -> EfficiencyCurve:
    """Diameter sweep with the planar-cavity inputs given directly.

    A failing diameter aborts the sweep; the raised SweepError names it.
    """
    grid = [float(d) for d in d_grid_um]
    if not grid:
        raise InputDomainError("diameter grid is empty")
    points = []
    for d in grid:
        try:
            points.append(
                design_point(
                    d,
                    q_2d,
                    scattering,
                    wavelength_nm=wavelength_nm,
                    effective_length_nm=effective_length_nm,
                    core_index=core_index,
                    cladding_index=cladding_index,
                    q_ext=q_ext,
                    gamma=gamma,
                    degenerate_mode=degenerate_mode,
                )
            )
        except PillarKitError as exc:
            raise SweepError(d, str(exc)) from exc
    provenance = {
        "q_2d": q_2d,
        "alpha": scattering.alpha,
        "gamma": gamma,
        "q_ext": q_ext,
        "wavelength_nm": wavelength_nm,
        "effective_length_nm": effective_length_nm,
        "core_index": core_index,
        "cladding_index": cladding_index,
        "degenerate_mode": degenerate_mode,
    }
    provenance.update(extra_provenance or {})
    return EfficiencyCurve(points=tuple(points), provenance=provenance)


def sweep(
    d_grid_um: Sequence[float],
    stack: multilayer.LayerStack,
    scattering: ScatteringModel,
    *,
    q_2d: float,
    resonance_window_nm: tuple[float, float],
    cladding_index: float = 1.0,
    q_ext: float = 30000.0,
    gamma: float = 1.0,
    degenerate_mode: bool = True,
    extra_provenance: dict | None = None,
) -> EfficiencyCurve:
    """Diameter sweep taking the planar resonance and L_eff from a stack.

    The pillar core index is that of the cavity spacer layer; the resonance
    wavelength and effective length come from the transfer-matrix model.
    """
    lam_res, _ = multilayer.planar_cavity_q(stack, resonance_window_nm)
    _, cavity, _ = multilayer.split_at_cavity(stack)
    l_eff = multilayer.effective_cavity_length(stack, lam_res)
    extra = {"resonance_wavelength_nm": lam_res}
    extra.update(extra_provenance or {})
    return sweep_design(
        d_grid_um,
        q_2d,
        scattering,
        wavelength_nm=lam_res,
        effective_length_nm=l_eff,
        core_index=complex(cavity.refractive_index).real,
        cladding_index=cladding_index,
        q_ext=q_ext,
        gamma=gamma,
        degenerate_mode=degenerate_mode,
        extra_provenance=extra,
    )


@dataclass(frozen=True)
class OptimumPoint:
    """Best diameter for one planar Q_2D."""

    q_2d: float
    diameter_um: float
    eta: float
    f_p: float
    beta: float
    q_total: float
    boundary: bool


@dataclass(frozen=True)
class OptimizeResult:
    per_q2d: tuple[OptimumPoint, ...]
    best: OptimumPoint
    warnings: tuple[str, ...]


def _golden_max(fn, lo: float, hi: float, rel_tol: float) -> float:
    a, b = lo, hi
    c = b - (b - a) / GOLDEN_RATIO
    d = a + (b - a) / GOLDEN_RATIO
    fc, fd = fn(c), fn(d)
    while (b - a) > rel_tol * max(abs(a), abs(b)):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - (b - a) / GOLDEN_RATIO
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) / GOLDEN_RATIO
            fd = fn(d)
    return 0.5 * (a + b)


def optimize(
    q_2d_values: Sequence[float],
    d_range_um: tuple[float, float],
    scattering: ScatteringModel,
    *,
    wavelength_nm: float,
    effective_length_nm: float,
    core_index: float,
    cladding_index: float = 1.0,
    q_ext: float = 30000.0,
    gamma: float = 1.0,
    degenerate_mode: bool = True,
    coarse_points: int = 64,
    rel_tol: float = 1e-4,
) -> OptimizeResult:
    """Maximize eta over diameter for each Q_2D; report the global best.

    Coarse log-spaced scan followed by golden-section refinement around the
    best coarse point. An optimum pinned to the range edge is flagged and a
    warning is attached instead of raising.
    """
    if not q_2d_values:
        raise InputDomainError("q_2d grid is empty")
    d_lo, d_hi = float(d_range_um[0]), float(d_range_um[1])
    if d_lo <= 0 or d_hi < d_lo:
        raise InputDomainError(f"invalid diameter range ({d_lo}, {d_hi})")

    kwargs = dict(
        wavelength_nm=wavelength_nm,
        effective_length_nm=effective_length_nm,
        core_index=core_index,
        cladding_index=cladding_index,
        q_ext=q_ext,
        gamma=gamma,
        degenerate_mode=degenerate_mode,
    )

    results = []
    warnings: list[str] = []
    for q_2d in q_2d_values:
        def eta_of(d: float) -> float:
            return design_point(d, q_2d, scattering, **kwargs).eta

        if d_lo == d_hi:
            d_star, boundary = d_lo, False
        else:
            grid = np.geomspace(d_lo, d_hi, coarse_points)
            etas = [eta_of(float(d)) for d in grid]
            i = int(np.argmax(etas))
            boundary = i == 0 or i == coarse_points - 1
            lo = float(grid[max(i - 1, 0)])
            hi = float(grid[min(i + 1, coarse_points - 1)])
            d_star = _golden_max(eta_of, lo, hi, rel_tol)
            if boundary:
                warnings.append(
                    f"q_2d = {q_2d:g}: boundary optimum; eta is monotone over "
                    f"({d_lo:g}, {d_hi:g}) um"
                )
        p = design_point(d_star, q_2d, scattering, **kwargs)
        results.append(
            OptimumPoint(
                q_2d=q_2d,
                diameter_um=d_star,
                eta=p.eta,
                f_p=p.f_p,
                beta=p.beta,
                q_total=p.q_total,
                boundary=boundary,
            )
        )
    best = max(results, key=lambda r: r.eta)
    return OptimizeResult(per_q2d=tuple(results), best=best, warnings=tuple(warnings))
