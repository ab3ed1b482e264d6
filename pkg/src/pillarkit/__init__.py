"""pillarkit: design toolkit for micropillar single-photon sources.

Computes cavity loss budgets, Purcell factors, spontaneous-emission coupling
and source efficiency from layer-stack and pillar geometry, and optimizes the
pillar diameter and planar finesse for maximum efficiency.
"""

__version__ = "0.1.0"

from .coupling import EmitterCoupling, beta, make_coupling, purcell_factor
from .efficiency import (
    ANTINODE_LENGTH_FACTOR,
    DesignPoint,
    EfficiencyCurve,
    OptimizeResult,
    OptimumPoint,
    design_point,
    efficiency_eq2,
    efficiency_eq3,
    mirror_q_int,
    optimize,
    sweep,
    sweep_design,
)
from .loss_budget import (
    AlphaFit,
    LossBudget,
    QMeasurement,
    ScatteringModel,
    compose,
    fit_alpha,
    load_q_measurements,
    mode_context,
    q_scat_of_diameter,
)
from .multilayer import (
    Layer,
    LayerStack,
    SpectralResponse,
    dbr_transmission,
    effective_cavity_length,
    escape_fractions,
    escape_split,
    phase_penetration_depth,
    planar_cavity_q,
    planar_cavity_stack,
    quarter_wave_dbr,
    reflectance,
    spectrum,
    split_at_cavity,
    stack_response,
    transmittance,
)
from .photon_mc import ChannelRates, FateTally, estimate_eta, simulate
from .pillar_mode import (
    GuidedMode,
    ModeVolume,
    PillarGeometry,
    effective_mode_volume,
    far_field_divergence,
    solve_fundamental_mode,
)
