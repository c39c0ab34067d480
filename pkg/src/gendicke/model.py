"""Classical phase space of the generalized Dicke model.

The model couples a single boson mode (quadratures ``q, p``) to a collective
pseudospin (Bloch variables ``jz, phi``) through rotating and counter-rotating
terms weighted by ``xi``, plus collective spin-spin interactions
``eta_x, eta_y, eta_z``.  All energies returned to callers are scaled by
``omega0`` (``epsilon = E / (omega0 j)``); the Hamilton vector field is
expressed in the raw time unit.

Near the poles ``jz = +-1`` the angle ``phi`` is undefined.  There the module
offers a canonical chart ``(q, p, X, Y)`` with ``X + iY = rho exp(i phi)`` and
``rho**2 = 2 (1 -+ jz)``, in which the Hamiltonian is smooth.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameters, PoleSingularity

TWO_PI = 2.0 * math.pi

#: Distance from a pole below which (jz, phi) formulas are not evaluated.
POLE_GUARD = 1e-9
#: Magnitude below which f-functions and the angle denominator count as zero.
F_FLOOR = 1e-10

SOUTH = -1
NORTH = +1


@dataclass(frozen=True)
class ModelParams:
    """Hamiltonian parameters in energy units.

    Parameters
    ----------
    omega, omega0 : float
        Boson frequency and qubit splitting, both positive.
    gamma : float
        Light-matter coupling, non-negative.
    xi : float
        Counter-rotating weight in ``[0, 1]``; 0 is the rotating-wave limit.
    eta_x, eta_y, eta_z : float
        Collective spin-spin couplings, any sign.
    """

    omega: float = 1.0
    omega0: float = 1.0
    gamma: float = 0.0
    xi: float = 0.0
    eta_x: float = 0.0
    eta_y: float = 0.0
    eta_z: float = 0.0

    def __post_init__(self) -> None:
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            try:
                v = float(v)
            except (TypeError, ValueError):
                raise InvalidParameters(f"{f.name} must be a real number, got {v!r}") from None
            if not math.isfinite(v):
                raise InvalidParameters(f"{f.name} must be finite, got {v}")
            object.__setattr__(self, f.name, v)
        if self.omega <= 0 or self.omega0 <= 0:
            raise InvalidParameters("omega and omega0 must be positive")
        if self.gamma < 0:
            raise InvalidParameters("gamma must be non-negative")
        if not 0.0 <= self.xi <= 1.0:
            raise InvalidParameters("xi must lie in [0, 1]")

    def replace(self, **changes: float) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)

    # relative interactions
    @property
    def delta_zx(self) -> float:
        return self.eta_z - self.eta_x

    @property
    def delta_zy(self) -> float:
        return self.eta_z - self.eta_y

    # scaled couplings
    @property
    def f_plus(self) -> float:
        return self.gamma**2 * (1.0 + self.xi) ** 2 / (self.omega * self.omega0)

    @property
    def f_minus(self) -> float:
        return self.gamma**2 * (1.0 - self.xi) ** 2 / (self.omega * self.omega0)

    @property
    def gamma_plus(self) -> float:
        return math.sqrt(self.omega * self.omega0) / (1.0 + self.xi)

    @property
    def gamma_minus(self) -> float:
        """``sqrt(omega omega0)/(1 - xi)``; ``math.inf`` at ``xi = 1``."""
        if self.xi == 1.0:
            return math.inf
        return math.sqrt(self.omega * self.omega0) / (1.0 - self.xi)

    @property
    def f_x(self) -> float:
        return self.delta_zx / self.omega0 + self.f_plus

    @property
    def f_y(self) -> float:
        return self.delta_zy / self.omega0 + self.f_minus

    @property
    def coef_x(self) -> float:
        """Coefficient of ``(1-jz^2) cos^2(phi)/2`` removed by the boson: ``f_plus - eta_x/omega0``."""
        return self.f_plus - self.eta_x / self.omega0

    @property
    def coef_y(self) -> float:
        return self.f_minus - self.eta_y / self.omega0

    @property
    def eps_south(self) -> float:
        return -1.0 + self.eta_z / (2.0 * self.omega0)

    @property
    def eps_north(self) -> float:
        return 1.0 + self.eta_z / (2.0 * self.omega0)


@dataclass(frozen=True)
class PhaseSpacePoint:
    """Point ``(q, p, jz, phi)``; ``phi`` is reduced to ``[0, 2 pi)``."""

    q: float
    p: float
    jz: float
    phi: float

    def __post_init__(self) -> None:
        jz = float(self.jz)
        if not abs(jz) <= 1.0 + 1e-12:
            raise InvalidParameters(f"|jz| must not exceed 1, got {jz}")
        object.__setattr__(self, "jz", max(-1.0, min(1.0, jz)))
        object.__setattr__(self, "q", float(self.q))
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "phi", wrap_angle(float(self.phi)))

    @property
    def jx(self) -> float:
        return math.sqrt(1.0 - self.jz**2) * math.cos(self.phi)

    @property
    def jy(self) -> float:
        return math.sqrt(1.0 - self.jz**2) * math.sin(self.phi)

    def as_array(self) -> np.ndarray:
        return np.array([self.q, self.p, self.jz, self.phi])

    @classmethod
    def from_array(cls, a) -> "PhaseSpacePoint":
        return cls(a[0], a[1], a[2], a[3])


@dataclass(frozen=True)
class SurfacePoint:
    u: float
    v: float
    epsilon: float


def wrap_angle(phi: float) -> float:
    w = math.fmod(phi, TWO_PI)
    if w < 0:
        w += TWO_PI
    # fmod of a value just below 0 can round up to 2 pi
    return 0.0 if w >= TWO_PI else w


# --------------------------------------------------------------------------
# Hamiltonian in (q, p, jz, phi)
# --------------------------------------------------------------------------

def raw_energy(params: ModelParams, q, p, jz, phi):
    """Unscaled classical energy per j; broadcasts over numpy arrays."""
    c, s = np.cos(phi), np.sin(phi)
    s2 = 1.0 - jz * jz
    st = np.sqrt(np.maximum(s2, 0.0))
    xi = params.xi
    return (
        0.5 * params.omega * (q * q + p * p)
        + jz * (params.omega0 + 0.5 * params.eta_z * jz)
        + 0.5 * s2 * (params.eta_x * c * c + params.eta_y * s * s)
        + params.gamma * st * ((1.0 + xi) * q * c - (1.0 - xi) * p * s)
    )


def energy_array(params: ModelParams, q, p, jz, phi):
    """Scaled classical energy on arrays."""
    return raw_energy(params, q, p, jz, phi) / params.omega0


def classical_energy(params: ModelParams, x: PhaseSpacePoint) -> float:
    """Scaled classical energy ``epsilon = H_cl / omega0`` at ``x``."""
    return float(raw_energy(params, x.q, x.p, x.jz, x.phi)) / params.omega0


def raw_gradient(params: ModelParams, q: float, p: float, jz: float, phi: float) -> np.ndarray:
    """Unscaled ``(dH/dq, dH/dp, dH/djz, dH/dphi)`` at an interior point."""
    if abs(jz) > 1.0 - POLE_GUARD:
        raise PoleSingularity(f"jz={jz} is within pole_guard of a pole")
    c, s = math.cos(phi), math.sin(phi)
    st = math.sqrt(1.0 - jz * jz)
    g, xi = params.gamma, params.xi
    bx = (1.0 + xi) * q * c - (1.0 - xi) * p * s
    by = (1.0 + xi) * q * s + (1.0 - xi) * p * c
    return np.array([
        params.omega * q + g * st * (1.0 + xi) * c,
        params.omega * p - g * st * (1.0 - xi) * s,
        params.omega0 + params.eta_z * jz
        - jz * (params.eta_x * c * c + params.eta_y * s * s)
        - g * jz / st * bx,
        -(1.0 - jz * jz) * (params.eta_x - params.eta_y) * c * s - g * st * by,
    ])


def hamilton_rhs(params: ModelParams, x: PhaseSpacePoint) -> np.ndarray:
    """Hamilton vector field ordered ``(dq/dt, dp/dt, dphi/dt, djz/dt)``.

    Raises
    ------
    PoleSingularity
        If ``|jz| > 1 - POLE_GUARD``; use the pole chart there.
    """
    gq, gp, gj, gf = raw_gradient(params, x.q, x.p, x.jz, x.phi)
    return np.array([gp, -gq, gj, -gf])


# --------------------------------------------------------------------------
# Boson-eliminated spin surface and the (u, v) map
# --------------------------------------------------------------------------

def spin_surface_energy(params: ModelParams, jz, phi):
    """Scaled energy minimized over ``(q, p)`` at fixed ``(jz, phi)``."""
    c2 = np.cos(phi) ** 2
    return (
        jz + 0.5 * params.eta_z / params.omega0 * jz * jz
        - 0.5 * (1.0 - jz * jz) * (params.coef_x * c2 + params.coef_y * (1.0 - c2))
    )


def surface_energy(params: ModelParams, u, v):
    """Spin-surface energy in ``(u, v)`` coordinates; smooth at the origin."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    theta = np.hypot(u, v)
    # sin(theta)/theta via numpy's normalized sinc
    sinc = np.sinc(theta / math.pi)
    w0 = params.omega0
    out = 0.5 * sinc**2 * (
        u * u * (params.eta_x / w0 - params.f_plus) + v * v * (params.eta_y / w0 - params.f_minus)
    ) - np.cos(theta) * (1.0 - params.eta_z * np.cos(theta) / (2.0 * w0))
    return out[()] if out.ndim == 0 else out


def to_surface(x: PhaseSpacePoint, params: ModelParams | None = None) -> SurfacePoint:
    """Map ``(jz, phi)`` to ``(u, v)``; the energy field is filled when params are given."""
    theta = math.acos(-x.jz)
    u, v = theta * math.cos(x.phi), theta * math.sin(x.phi)
    eps = float(surface_energy(params, u, v)) if params is not None else math.nan
    return SurfacePoint(u, v, eps)


def from_surface(u: float, v: float) -> tuple[float, float]:
    """Inverse of :func:`to_surface`; returns ``(jz, phi)`` with ``phi = 0`` at the origin."""
    theta = math.hypot(u, v)
    return -math.cos(theta), wrap_angle(math.atan2(v, u))


# --------------------------------------------------------------------------
# Pole chart
# --------------------------------------------------------------------------

def to_chart(x: PhaseSpacePoint, pole: int) -> np.ndarray:
    """Chart coordinates ``(q, p, X, Y)`` around ``pole`` (``SOUTH`` or ``NORTH``)."""
    rho = math.sqrt(max(0.0, 2.0 * (1.0 - pole * x.jz)))
    return np.array([x.q, x.p, rho * math.cos(x.phi), rho * math.sin(x.phi)])


def from_chart(y, pole: int) -> PhaseSpacePoint:
    q, p, X, Y = (float(t) for t in y)
    rho2 = X * X + Y * Y
    jz = pole * (1.0 - 0.5 * rho2)
    phi = math.atan2(Y, X) if rho2 > 0 else 0.0
    return PhaseSpacePoint(q, p, max(-1.0, min(1.0, jz)), phi)


def chart_energy(params: ModelParams, y, pole: int) -> float:
    """Scaled energy in chart coordinates."""
    q, p, X, Y = y
    rho2 = X * X + Y * Y
    k = 1.0 - 0.25 * rho2
    jz = pole * (1.0 - 0.5 * rho2)
    xi = params.xi
    h = (
        0.5 * params.omega * (q * q + p * p)
        + jz * (params.omega0 + 0.5 * params.eta_z * jz)
        + 0.5 * k * (params.eta_x * X * X + params.eta_y * Y * Y)
        + params.gamma * math.sqrt(max(k, 0.0)) * ((1.0 + xi) * q * X - (1.0 - xi) * p * Y)
    )
    return h / params.omega0


def chart_gradient(params: ModelParams, y, pole: int) -> np.ndarray:
    """Unscaled ``(dH/dq, dH/dp, dH/dX, dH/dY)``; valid away from the opposite pole."""
    q, p, X, Y = (float(t) for t in y)
    rho2 = X * X + Y * Y
    k = 1.0 - 0.25 * rho2
    if k <= 0.0:
        raise PoleSingularity("chart evaluated at the opposite pole")
    sk = math.sqrt(k)
    jz = pole * (1.0 - 0.5 * rho2)
    xi, g = params.xi, params.gamma
    cc = (1.0 + xi) * q * X - (1.0 - xi) * p * Y
    quad = params.eta_x * X * X + params.eta_y * Y * Y
    spin = params.omega0 + params.eta_z * jz
    return np.array([
        params.omega * q + g * sk * (1.0 + xi) * X,
        params.omega * p - g * sk * (1.0 - xi) * Y,
        -pole * X * spin - 0.25 * X * quad + k * params.eta_x * X
        + g * (-X / (4.0 * sk) * cc + sk * (1.0 + xi) * q),
        -pole * Y * spin - 0.25 * Y * quad + k * params.eta_y * Y
        + g * (-Y / (4.0 * sk) * cc - sk * (1.0 - xi) * p),
    ])


def chart_rhs(params: ModelParams, y, pole: int) -> np.ndarray:
    """Time derivative of chart coordinates ``(q, p, X, Y)``."""
    gq, gp, gx, gy = chart_gradient(params, y, pole)
    return np.array([gp, -gq, pole * gy, -pole * gx])


def chart_hessian(params: ModelParams, y, pole: int, h: float = 1e-5) -> np.ndarray:
    """Unscaled Hessian in chart coordinates by central differences of the analytic gradient."""
    y = np.asarray(y, dtype=float)
    out = np.empty((4, 4))
    for i in range(4):
        e = np.zeros(4)
        e[i] = h
        out[:, i] = (chart_gradient(params, y + e, pole) - chart_gradient(params, y - e, pole)) / (2 * h)
    return 0.5 * (out + out.T)


#: Symplectic matrix for the chart: d/dt y = CHART_OMEGA[pole] @ grad H.
def chart_symplectic(pole: int) -> np.ndarray:
    return np.array([
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, float(pole)],
        [0.0, 0.0, -float(pole), 0.0],
    ])


#: d/dt (q, p, jz, phi) = INTERIOR_SYMPLECTIC @ grad H, gradient ordered (q, p, jz, phi).
INTERIOR_SYMPLECTIC = np.array([
    [0.0, 1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0],
])
