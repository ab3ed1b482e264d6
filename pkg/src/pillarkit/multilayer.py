"""Transfer-matrix electromagnetics for planar layer stacks at normal incidence.

Conventions
-----------
* Lengths in nanometers, wavelengths are vacuum values.
* A stack is described from the illuminated (ambient) side down to the
  substrate; layer 0 is topmost.
* Characteristic matrices follow the exp(-i*delta) phase choice, so the
  reflection phase of a Bragg mirror decreases with wavelength and the
  penetration depth -lambda^2/(4*pi*n_c) * dphi/dlambda is positive.
* Absorption enters through a positive imaginary index part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateCavityError,
    InputDomainError,
    NotAMirrorError,
    ResonanceNotFoundError,
    SolverFailureError,
    WindowError,
)

_REFINE_START = 2**12 + 1
_REFINE_CAP = 2**20


@dataclass(frozen=True)
class Layer:
    """One homogeneous dielectric layer."""

    refractive_index: complex
    thickness_nm: float

    def __post_init__(self):
        n = complex(self.refractive_index)
        if self.thickness_nm <= 0:
            raise InputDomainError(f"layer thickness must be > 0, got {self.thickness_nm}")
        if n.real < 1.0:
            raise InputDomainError(f"real refractive index must be >= 1, got {n.real}")
        if n.imag < 0.0:
            raise InputDomainError("imaginary index part must be >= 0 (absorption)")

    @property
    def optical_thickness_nm(self) -> float:
        return complex(self.refractive_index).real * self.thickness_nm


@dataclass(frozen=True)
class LayerStack:
    """Finite layer stack between semi-infinite ambient and substrate media."""

    ambient_index: float
    layers: tuple[Layer, ...]
    substrate_index: float

    def __post_init__(self):
        if self.ambient_index < 1.0 or self.substrate_index < 1.0:
            raise InputDomainError("ambient and substrate indices must be >= 1")
        object.__setattr__(self, "layers", tuple(self.layers))

    def reversed(self) -> "LayerStack":
        """Same physical stack illuminated from the substrate side."""
        return LayerStack(self.substrate_index, tuple(reversed(self.layers)), self.ambient_index)


@dataclass(frozen=True)
class SpectralResponse:
    """Sampled reflectance / transmittance / reflection-phase spectra."""

    wavelengths_nm: np.ndarray
    reflectance: np.ndarray
    transmittance: np.ndarray
    reflection_phase: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.wavelengths_nm, dtype=float)
        if lam.ndim != 1 or lam.size == 0 or np.any(np.diff(lam) <= 0):
            raise InputDomainError("wavelengths must be a non-empty increasing 1-d grid")
        for name in ("reflectance", "transmittance"):
            arr = getattr(self, name)
            if arr.shape != lam.shape:
                raise InputDomainError(f"{name} shape does not match wavelength grid")
            if np.any(arr < -1e-12) or np.any(arr > 1.0 + 1e-9):
                raise InputDomainError(f"{name} outside [0, 1]")


def _amplitudes(stack: LayerStack, wavelengths_nm: np.ndarray):
    """Vectorized complex (r, t) over a wavelength array."""
    lam = np.asarray(wavelengths_nm, dtype=float)
    if np.any(lam <= 0):
        raise InputDomainError("wavelength must be > 0")
    n0 = stack.ambient_index
    ns = stack.substrate_index
    m11 = np.ones_like(lam, dtype=complex)
    m12 = np.zeros_like(m11)
    m21 = np.zeros_like(m11)
    m22 = np.ones_like(m11)
    for layer in stack.layers:
        n = complex(layer.refractive_index)
        delta = 2.0 * np.pi * n * layer.thickness_nm / lam
        c = np.cos(delta)
        s = np.sin(delta)
        a12 = -1j * s / n
        a21 = -1j * n * s
        t11 = m11 * c + m12 * a21
        t12 = m11 * a12 + m12 * c
        t21 = m21 * c + m22 * a21
        t22 = m21 * a12 + m22 * c
        m11, m12, m21, m22 = t11, t12, t21, t22
    b = m11 + m12 * ns
    cc = m21 + m22 * ns
    denom = n0 * b + cc
    r = (n0 * b - cc) / denom
    t = 2.0 * n0 / denom
    return r, t


def stack_response(stack: LayerStack, wavelength_nm: float) -> tuple[complex, complex]:
    """Complex reflection and transmission coefficients at one wavelength.

    ``|r|**2`` is the reflectance; the transmittance is
    ``(substrate_index / ambient_index) * |t|**2``.
    """
    r, t = _amplitudes(stack, np.atleast_1d(float(wavelength_nm)))
    return complex(r[0]), complex(t[0])


def reflectance(stack: LayerStack, wavelength_nm) -> np.ndarray | float:
    r, _ = _amplitudes(stack, np.atleast_1d(wavelength_nm))
    out = np.abs(r) ** 2
    return float(out[0]) if np.isscalar(wavelength_nm) else out


def transmittance(stack: LayerStack, wavelength_nm) -> np.ndarray | float:
    _, t = _amplitudes(stack, np.atleast_1d(wavelength_nm))
    out = (stack.substrate_index / stack.ambient_index) * np.abs(t) ** 2
    return float(out[0]) if np.isscalar(wavelength_nm) else out


def spectrum(stack: LayerStack, wavelengths_nm) -> SpectralResponse:
    lam = np.asarray(wavelengths_nm, dtype=float)
    r, t = _amplitudes(stack, lam)
    return SpectralResponse(
        wavelengths_nm=lam,
        reflectance=np.abs(r) ** 2,
        transmittance=(stack.substrate_index / stack.ambient_index) * np.abs(t) ** 2,
        reflection_phase=np.angle(r),
    )


def dbr_transmission(stack: LayerStack, center_wavelength_nm: float) -> float:
    """Mirror transmittance at its design wavelength."""
    return float(transmittance(stack, float(center_wavelength_nm)))


def _fwhm_from_grid(lam, t, peak_idx):
    """Half-max crossing wavelengths around an interior peak; None if truncated."""
    half = t[peak_idx] / 2.0
    i = peak_idx
    while i > 0 and t[i] > half:
        i -= 1
    if t[i] > half:
        return None
    left = lam[i] + (lam[i + 1] - lam[i]) * (half - t[i]) / (t[i + 1] - t[i])
    j = peak_idx
    while j < len(t) - 1 and t[j] > half:
        j += 1
    if t[j] > half:
        return None
    right = lam[j - 1] + (lam[j] - lam[j - 1]) * (half - t[j - 1]) / (t[j] - t[j - 1])
    return left, right


def planar_cavity_q(stack: LayerStack, search_window: tuple[float, float]) -> tuple[float, float]:
    """Locate the cavity resonance and return (wavelength_nm, Q).

    The resonance is the transmittance maximum inside ``search_window``;
    Q = wavelength / FWHM. Sampling density doubles until Q is stable to
    0.1 percent, capped at 2**20 samples per pass.
    """
    lo, hi = float(search_window[0]), float(search_window[1])
    if not (0 < lo < hi):
        raise InputDomainError(f"invalid search window ({lo}, {hi})")

    lam = np.linspace(lo, hi, _REFINE_START)
    t = transmittance(stack, lam)
    interior = np.flatnonzero((t[1:-1] > t[:-2]) & (t[1:-1] >= t[2:])) + 1
    if interior.size == 0:
        raise ResonanceNotFoundError(
            f"no transmittance peak inside window ({lo:g}, {hi:g}) nm"
        )
    peak = int(interior[np.argmax(t[interior])])
    crossings = _fwhm_from_grid(lam, t, peak)
    if crossings is None:
        # No half-max drop inside the window: either a truncated resonance or
        # mere stop-band ripple. A resonance must at least double the floor.
        if t[peak] < 2.0 * float(np.min(t)):
            raise ResonanceNotFoundError(
                f"no transmittance peak inside window ({lo:g}, {hi:g}) nm"
            )
        raise WindowError("resonance peak truncated by the search window edge")
    left, right = crossings

    q_prev = lam[peak] / (right - left)
    pad = 4.0 * (right - left)
    sub_lo = max(lo, lam[peak] - pad)
    sub_hi = min(hi, lam[peak] + pad)
    n = _REFINE_START
    while True:
        n = 2 * (n - 1) + 1
        if n > _REFINE_CAP:
            raise SolverFailureError(
                f"cavity-Q refinement did not stabilize within {_REFINE_CAP} samples"
            )
        lam = np.linspace(sub_lo, sub_hi, n)
        t = transmittance(stack, lam)
        peak = int(np.argmax(t))
        if peak == 0 or peak == n - 1:
            raise WindowError("resonance peak truncated by the search window edge")
        crossings = _fwhm_from_grid(lam, t, peak)
        if crossings is None:
            raise WindowError("resonance peak truncated by the search window edge")
        left, right = crossings
        q = lam[peak] / (right - left)
        if abs(q - q_prev) <= 1e-3 * q:
            return float(lam[peak]), float(q)
        q_prev = q


def split_at_cavity(stack: LayerStack) -> tuple[LayerStack, Layer, LayerStack]:
    """Split a full cavity stack into (top mirror, cavity layer, bottom mirror).

    The cavity layer is identified as the layer of largest optical thickness
    (first one on ties). Both mirror stacks are described from the cavity
    side, i.e. their ambient medium is the cavity material.
    """
    if not stack.layers:
        raise InputDomainError("stack has no layers, cannot locate a cavity")
    thicknesses = [layer.optical_thickness_nm for layer in stack.layers]
    k = int(np.argmax(thicknesses))
    cavity = stack.layers[k]
    n_cav = complex(cavity.refractive_index).real
    top = LayerStack(n_cav, tuple(reversed(stack.layers[:k])), stack.ambient_index)
    bottom = LayerStack(n_cav, stack.layers[k + 1:], stack.substrate_index)
    return top, cavity, bottom


def escape_fractions(t_top: float, t_bottom: float) -> tuple[float, float]:
    """Top/bottom photon escape probabilities from mirror transmissions."""
    if t_top < 0 or t_bottom < 0:
        raise InputDomainError("mirror transmissions must be >= 0")
    total = t_top + t_bottom
    if total == 0:
        raise DegenerateCavityError("both mirror transmissions are zero")
    return t_top / total, t_bottom / total


def escape_split(stack: LayerStack, resonance_wavelength_nm: float) -> tuple[float, float]:
    """Escape fractions of a full cavity stack at its resonance."""
    top, _, bottom = split_at_cavity(stack)
    return escape_fractions(
        transmittance(top, float(resonance_wavelength_nm)),
        transmittance(bottom, float(resonance_wavelength_nm)),
    )


def _wrap_phase(dphi: float) -> float:
    return (dphi + math.pi) % (2.0 * math.pi) - math.pi


def phase_derivative(phase_fn, wavelength_nm: float) -> float:
    """d(phase)/d(lambda) by centered differences, step refined to 3 digits."""
    h = wavelength_nm * 1e-3
    d_prev = None
    for _ in range(40):
        d = _wrap_phase(phase_fn(wavelength_nm + h) - phase_fn(wavelength_nm - h)) / (2.0 * h)
        if d_prev is not None and abs(d - d_prev) <= 1e-3 * abs(d) + 1e-15:
            return d
        d_prev = d
        h *= 0.5
    raise SolverFailureError("phase derivative did not stabilize to 3 digits")


def penetration_from_phase(phase_fn, wavelength_nm: float, cavity_index: float) -> float:
    """L_pen = -(lambda^2 / (4 pi n_c)) * dphi/dlambda, in nm."""
    dphi = phase_derivative(phase_fn, wavelength_nm)
    return -(wavelength_nm**2) / (4.0 * math.pi * cavity_index) * dphi


def phase_penetration_depth(mirror: LayerStack, center_wavelength_nm: float) -> float:
    """Phase penetration depth of a mirror described from the cavity side."""
    lam0 = float(center_wavelength_nm)
    if reflectance(mirror, lam0) <= 0.9:
        raise NotAMirrorError(
            "stack reflectance is <= 0.9 at the center wavelength; not a cavity mirror"
        )

    def phase(lam):
        r, _ = stack_response(mirror, lam)
        return math.atan2(r.imag, r.real)

    return penetration_from_phase(phase, lam0, mirror.ambient_index)


def effective_cavity_length(stack: LayerStack, resonance_wavelength_nm: float) -> float:
    """Spacer thickness plus both mirror phase penetration depths, in nm."""
    top, cavity, bottom = split_at_cavity(stack)
    lam = float(resonance_wavelength_nm)
    return (
        cavity.thickness_nm
        + phase_penetration_depth(top, lam)
        + phase_penetration_depth(bottom, lam)
    )


def quarter_wave_dbr(
    high_index: float,
    low_index: float,
    pairs: int,
    center_wavelength_nm: float,
    *,
    ambient_index: float = 1.0,
    substrate_index: float = 1.0,
    first: str = "low",
) -> LayerStack:
    """Quarter-wave Bragg mirror with ``pairs`` low/high periods.

    ``first`` selects the layer adjacent to the ambient medium. Mirrors seen
    from a high-index cavity start with the low-index layer.
    """
    if pairs < 0:
        raise InputDomainError("pair count must be >= 0")
    if first not in ("low", "high"):
        raise InputDomainError("first layer must be 'low' or 'high'")
    t_hi = center_wavelength_nm / (4.0 * high_index)
    t_lo = center_wavelength_nm / (4.0 * low_index)
    pair = (
        (Layer(low_index, t_lo), Layer(high_index, t_hi))
        if first == "low"
        else (Layer(high_index, t_hi), Layer(low_index, t_lo))
    )
    return LayerStack(ambient_index, pair * pairs, substrate_index)


def planar_cavity_stack(
    top_pairs: int,
    bottom_pairs: int,
    center_wavelength_nm: float,
    *,
    cavity_index: float = 3.5,
    high_index: float = 3.5,
    low_index: float = 2.95,
    cavity_order: int = 1,
    ambient_index: float = 1.0,
    substrate_index: float | None = None,
) -> LayerStack:
    """Full planar microcavity: top DBR / wavelength-thick spacer / bottom DBR.

    Both mirrors present their low-index layer to the spacer so the DBR
    reflections add in phase for a high-index cavity.
    """
    if substrate_index is None:
        substrate_index = high_index
    t_hi = center_wavelength_nm / (4.0 * high_index)
    t_lo = center_wavelength_nm / (4.0 * low_index)
    top = (Layer(high_index, t_hi), Layer(low_index, t_lo)) * top_pairs
    bottom = (Layer(low_index, t_lo), Layer(high_index, t_hi)) * bottom_pairs
    spacer = Layer(cavity_index, cavity_order * center_wavelength_nm / cavity_index)
    return LayerStack(ambient_index, top + (spacer,) + bottom, substrate_index)
