"""Emitter-cavity coupling: Purcell factor and spontaneous-emission fraction.

An ideal emitter (spectrally resonant, at the field antinode, dipole aligned)
radiates into the confined mode at rate F_p / tau0 and into the leaky-mode
continuum at gamma / tau0, so the confined fraction is

    beta = F_eff / (F_eff + gamma),

with F_eff = F_p for the polarization-degenerate pair of fundamental modes of
a circular pillar and F_p / 2 for a non-degenerate (e.g. elliptical) mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InputDomainError


def purcell_factor(q_total: float, mode_volume_lam_n3: float) -> float:
    """F_p = 3 Q (lambda/n)^3 / (4 pi^2 V), with V given in (lambda/n)^3."""
    if q_total <= 0 or mode_volume_lam_n3 <= 0:
        raise InputDomainError("q_total and mode volume must be > 0")
    return 3.0 * q_total / (4.0 * math.pi**2 * mode_volume_lam_n3)


def beta(f_p: float, gamma: float, degenerate_mode: bool = True) -> float:
    """Spontaneous-emission coupling fraction into the fundamental mode(s)."""
    if f_p < 0:
        raise InputDomainError("Purcell factor must be >= 0")
    if gamma <= 0:
        raise InputDomainError("gamma must be > 0")
    f_eff = f_p if degenerate_mode else 0.5 * f_p
    return f_eff / (f_eff + gamma)


@dataclass(frozen=True)
class EmitterCoupling:
    """Coupling snapshot for one design point.

    tau0 only sets the absolute rate scale (rates are F_p/tau0, gamma/tau0);
    it cancels in beta and in the source efficiency.
    """

    purcell_factor: float
    gamma: float
    tau0_ns: float
    beta: float
    degenerate_mode: bool

    def __post_init__(self):
        if self.purcell_factor < 0 or self.gamma <= 0:
            raise InputDomainError("need F_p >= 0 and gamma > 0")
        if not (0.0 <= self.beta < 1.0):
            raise InputDomainError("beta outside [0, 1)")
        expected = beta(self.purcell_factor, self.gamma, self.degenerate_mode)
        if abs(self.beta - expected) > 1e-12:
            raise InputDomainError("beta inconsistent with F_p and gamma")

    @property
    def mode_rate_per_ns(self) -> float:
        """Emission rate into the confined mode(s), 1/ns."""
        f_eff = self.purcell_factor if self.degenerate_mode else 0.5 * self.purcell_factor
        return f_eff / self.tau0_ns


def make_coupling(
    f_p: float, gamma: float = 1.0, tau0_ns: float = 1.0, degenerate_mode: bool = True
) -> EmitterCoupling:
    return EmitterCoupling(
        purcell_factor=f_p,
        gamma=gamma,
        tau0_ns=tau0_ns,
        beta=beta(f_p, gamma, degenerate_mode),
        degenerate_mode=degenerate_mode,
    )
