"""Semiclassical and finite-size analysis of the generalized Dicke model."""

from .dos import critical_energies, energy_domains
from .dynamics import integrate, linear_stability
from .errors import (
    ConfigError,
    DegenerateBranch,
    GenDickeError,
    InvalidParameters,
    NonConvergence,
    PoleSingularity,
)
from .fixed_points import classify, critical_couplings, enumerate_fixed_points, hessian, refine
from .model import ModelParams, PhaseSpacePoint, classical_energy, hamilton_rhs, surface_energy
from .phases import classify_qpt, ground_state, gs_gradient, sweep

__all__ = [
    "ConfigError", "DegenerateBranch", "GenDickeError", "InvalidParameters", "ModelParams",
    "NonConvergence", "PhaseSpacePoint", "PoleSingularity", "classical_energy", "classify",
    "classify_qpt", "critical_couplings", "critical_energies",
    "energy_domains", "enumerate_fixed_points", "ground_state", "gs_gradient", "hamilton_rhs",
    "hessian", "integrate", "linear_stability", "refine", "surface_energy", "sweep",
]
