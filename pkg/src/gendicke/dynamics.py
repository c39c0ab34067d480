"""Classical trajectories and linear stability.

Integration runs in ``(q, p, jz, phi)`` and hands over to the canonical pole
chart when the orbit comes within ``CHART_ENTER`` of a pole, leaving it again
beyond ``CHART_LEAVE``.  Each hand-over is recorded as an event.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InvalidParameters, NonConvergence
from .fixed_points import FixedPoint, hessian
from .model import (
    INTERIOR_SYMPLECTIC,
    NORTH,
    SOUTH,
    ModelParams,
    PhaseSpacePoint,
    chart_energy,
    chart_hessian,
    chart_symplectic,
    classical_energy,
    from_chart,
    to_chart,
)

CHART_ENTER = 0.02
CHART_LEAVE = 0.1
DRIFT_TOL = 1e-8


class Scheme(str, Enum):
    RK4 = "rk4"
    IMPLICIT_MIDPOINT = "implicit_midpoint"


@dataclass(frozen=True)
class Event:
    t: float
    kind: str
    pole: int


@dataclass
class Trajectory:
    """Sampled orbit; ``states`` rows are ``(q, p, jz, phi)``."""

    times: np.ndarray
    states: np.ndarray
    energies: np.ndarray
    dt: float
    scheme: Scheme
    events: list[Event] = field(default_factory=list)

    @property
    def samples(self) -> list[tuple[float, PhaseSpacePoint, float]]:
        return [(float(t), PhaseSpacePoint.from_array(s), float(e))
                for t, s, e in zip(self.times, self.states, self.energies)]

    @property
    def energy_drift(self) -> float:
        return float(np.max(np.abs(self.energies - self.energies[0])))

    def max_displacement(self) -> float:
        """Largest Euclidean distance from the start in ``(q, p, jx, jy, jz)``."""
        s = self.states
        st = np.sqrt(np.maximum(0.0, 1.0 - s[:, 2] ** 2))
        emb = np.column_stack([s[:, 0], s[:, 1], st * np.cos(s[:, 3]), st * np.sin(s[:, 3]), s[:, 2]])
        return float(np.max(np.linalg.norm(emb - emb[0], axis=1)))


# --------------------------------------------------------------------------
# Scalar vector fields (plain floats for speed)
# --------------------------------------------------------------------------

def _interior_field(k, y):
    w, w0, g, xi, ex, ey, ez = k
    q, p, jz, phi = y
    c, s = math.cos(phi), math.sin(phi)
    s2 = (1.0 - jz) * (1.0 + jz)
    st = math.sqrt(s2)
    bx = (1.0 + xi) * q * c - (1.0 - xi) * p * s
    by = (1.0 + xi) * q * s + (1.0 - xi) * p * c
    return (
        w * p - g * st * (1.0 - xi) * s,
        -w * q - g * st * (1.0 + xi) * c,
        s2 * (ex - ey) * c * s + g * st * by,
        w0 + ez * jz - jz * (ex * c * c + ey * s * s) - g * jz / st * bx,
    )


def _chart_field(k, y, pole):
    w, w0, g, xi, ex, ey, ez = k
    q, p, X, Y = y
    rho2 = X * X + Y * Y
    kk = 1.0 - 0.25 * rho2
    sk = math.sqrt(kk)
    jz = pole * (1.0 - 0.5 * rho2)
    cc = (1.0 + xi) * q * X - (1.0 - xi) * p * Y
    quad = ex * X * X + ey * Y * Y
    spin = w0 + ez * jz
    hq = w * q + g * sk * (1.0 + xi) * X
    hp = w * p - g * sk * (1.0 - xi) * Y
    hx = -pole * X * spin - 0.25 * X * quad + kk * ex * X + g * (-X / (4.0 * sk) * cc + sk * (1.0 + xi) * q)
    hy = -pole * Y * spin - 0.25 * Y * quad + kk * ey * Y + g * (-Y / (4.0 * sk) * cc - sk * (1.0 - xi) * p)
    return (hp, -hq, pole * hy, -pole * hx)


def _rk4(f, y, dt):
    k1 = f(y)
    y2 = tuple(a + 0.5 * dt * b for a, b in zip(y, k1))
    k2 = f(y2)
    y3 = tuple(a + 0.5 * dt * b for a, b in zip(y, k2))
    k3 = f(y3)
    y4 = tuple(a + dt * b for a, b in zip(y, k3))
    k4 = f(y4)
    return tuple(a + dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4) for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4))


def _midpoint(f, y, dt, tol=1e-15, max_iter=100):
    """Implicit midpoint rule solved by fixed-point iteration (symplectic)."""
    k = f(y)
    for _ in range(max_iter):
        ym = tuple(a + 0.5 * dt * b for a, b in zip(y, k))
        k_new = f(ym)
        diff = max(abs(a - b) for a, b in zip(k, k_new))
        k = k_new
        if diff * dt < tol:
            break
    else:
        raise NonConvergence("implicit midpoint iteration did not converge")
    return tuple(a + dt * b for a, b in zip(y, k))


def integrate(params: ModelParams, x0: PhaseSpacePoint, t_end: float, dt: float,
              scheme: Scheme | str = Scheme.RK4, sample_every: int = 1) -> Trajectory:
    """Fixed-step integration of Hamilton's equations.

    Parameters
    ----------
    params : ModelParams
    x0 : PhaseSpacePoint
        Initial condition.  A start at a pole begins in the pole chart.
    t_end, dt : float
        Final time and step (raw time units).
    scheme : Scheme
        ``RK4`` (default) or the symplectic ``IMPLICIT_MIDPOINT``.
    sample_every : int
        Keep every n-th step in the returned trajectory.
    """
    if dt <= 0 or t_end < 0:
        raise InvalidParameters("dt must be positive and t_end non-negative")
    scheme = Scheme(scheme)
    step = _rk4 if scheme is Scheme.RK4 else _midpoint
    k = (params.omega, params.omega0, params.gamma, params.xi, params.eta_x, params.eta_y, params.eta_z)
    n_steps = int(round(t_end / dt))
    events: list[Event] = []

    def pole_near(jz):
        if 1.0 + jz < CHART_ENTER:
            return SOUTH
        if 1.0 - jz < CHART_ENTER:
            return NORTH
        return None

    pole = pole_near(x0.jz)
    y = tuple(to_chart(x0, pole)) if pole is not None else (x0.q, x0.p, x0.jz, x0.phi)
    if pole is not None:
        events.append(Event(0.0, "pole_approach", pole))

    def current_point():
        if pole is None:
            return PhaseSpacePoint(y[0], y[1], max(-1.0, min(1.0, y[2])), y[3])
        return from_chart(y, pole)

    def energy():
        if pole is None:
            return classical_energy(params, current_point())
        return chart_energy(params, y, pole)

    def advance(field):
        try:
            out = step(field, y, dt)
        except (ValueError, OverflowError, ZeroDivisionError):
            raise NonConvergence(f"step of {dt} left the phase space; reduce dt") from None
        if not all(math.isfinite(v) for v in out):
            raise NonConvergence(f"step of {dt} produced a non-finite state; reduce dt")
        return out

    times, states, energies = [0.0], [current_point().as_array()], [energy()]
    for i in range(1, n_steps + 1):
        if pole is None:
            y = advance(lambda z: _interior_field(k, z))
            if abs(y[2]) > 1.0 + 1e-9:
                raise NonConvergence(f"step of {dt} overshot a pole; reduce dt")
            nxt = pole_near(y[2])
            if nxt is not None:
                pole = nxt
                y = tuple(to_chart(PhaseSpacePoint(y[0], y[1], max(-1.0, min(1.0, y[2])), y[3]), pole))
                events.append(Event(i * dt, "pole_approach", pole))
        else:
            y = advance(lambda z, pl=pole: _chart_field(k, z, pl))
            x = from_chart(y, pole)
            if 1.0 - pole * x.jz > CHART_LEAVE:
                events.append(Event(i * dt, "pole_exit", pole))
                pole = None
                y = (x.q, x.p, x.jz, x.phi)
        if i % sample_every == 0 or i == n_steps:
            times.append(i * dt)
            states.append(current_point().as_array())
            energies.append(energy())
    return Trajectory(np.array(times), np.array(states), np.array(energies), dt, scheme, events)


def linear_stability(params: ModelParams, fp: FixedPoint) -> np.ndarray:
    """Eigenvalues of the linearized Hamiltonian flow at a fixed point.

    Poles are linearized in the pole chart.  Eigenvalues come in
    ``(lambda, -lambda)`` pairs.
    """
    x = fp.point
    if 1.0 + x.jz < 1e-6:
        jac = chart_symplectic(SOUTH) @ chart_hessian(params, to_chart(x, SOUTH), SOUTH)
    elif 1.0 - x.jz < 1e-6:
        jac = chart_symplectic(NORTH) @ chart_hessian(params, to_chart(x, NORTH), NORTH)
    else:
        jac = INTERIOR_SYMPLECTIC @ hessian(params, x)
    return np.linalg.eigvals(jac)


# --------------------------------------------------------------------------
# Specialized vector fields for the two coupling limits
# --------------------------------------------------------------------------

def rhs_rotating(params: ModelParams, x: PhaseSpacePoint) -> np.ndarray:
    """Equations of motion written out for ``xi = 0``; ordered ``(q, p, phi, jz)``."""
    q, p, jz, phi = x.q, x.p, x.jz, x.phi
    g, w = params.gamma, params.omega
    st = math.sqrt(1.0 - jz * jz)
    c, s = math.cos(phi), math.sin(phi)
    return np.array([
        w * p - g * st * s,
        -w * q - g * st * c,
        params.omega0 + params.eta_z * jz - jz * (params.eta_x * c * c + params.eta_y * s * s)
        - g * jz / st * (q * c - p * s),
        (1.0 - jz * jz) * (params.eta_x - params.eta_y) * c * s + g * st * (q * s + p * c),
    ])


def rhs_full_coupling(params: ModelParams, x: PhaseSpacePoint) -> np.ndarray:
    """Equations of motion written out for ``xi = 1``; ordered ``(q, p, phi, jz)``."""
    q, p, jz, phi = x.q, x.p, x.jz, x.phi
    g, w = params.gamma, params.omega
    st = math.sqrt(1.0 - jz * jz)
    c, s = math.cos(phi), math.sin(phi)
    return np.array([
        w * p,
        -w * q - 2.0 * g * st * c,
        params.omega0 + params.eta_z * jz - jz * (params.eta_x * c * c + params.eta_y * s * s)
        - 2.0 * g * jz / st * q * c,
        (1.0 - jz * jz) * (params.eta_x - params.eta_y) * c * s + 2.0 * g * st * q * s,
    ])
