"""Named parameter sets covering every regime (omega = omega0 = 1)."""

from __future__ import annotations

from .model import ModelParams

#: Energy-surface examples in the rotating-wave limit with an anisotropic y interaction.
SURFACES = {
    "rwa_normal": ModelParams(gamma=0.8, eta_y=0.9),
    "rwa_x_only": ModelParams(gamma=1.2, eta_y=0.9),
    "rwa_superposition": ModelParams(gamma=1.6, eta_y=0.9),
}

#: One normal, one single-family and one two-family configuration per coupling limit.
DOS_PANELS = {
    "rwa_normal": ModelParams(xi=0.0, gamma=0.5, eta_y=0.9),
    "rwa_x": ModelParams(xi=0.0, gamma=1.2, eta_y=0.9),
    "rwa_superposition": ModelParams(xi=0.0, gamma=1.6, eta_y=0.4),
    "full_normal": ModelParams(xi=1.0, gamma=0.3, eta_y=0.5),
    "full_x": ModelParams(xi=1.0, gamma=0.7),
    "full_x_deformed": ModelParams(xi=1.0, gamma=0.8, eta_z=1.5),
    "half_normal": ModelParams(xi=0.5, gamma=0.4),
    "half_x": ModelParams(xi=0.5, gamma=0.9),
    "half_superposition": ModelParams(xi=0.5, gamma=1.0, eta_z=1.5),
}

#: Symmetric rotating-wave case with a continuum of minima.
RING = ModelParams(xi=0.0, gamma=1.5, eta_x=0.5, eta_y=0.5)
