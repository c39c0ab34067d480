"""Semiclassical density of states and excited-state critical energies.

Integrating out the boson exactly reduces the phase-space volume below an
energy ``epsilon`` to an area on the Bloch sphere.  With
``nu_scaled = omega nu / 2`` this reads

    nu_scaled(epsilon) = |{(jz, phi) : eps_s(jz, phi) <= epsilon}| / (4 pi)

where ``eps_s`` is the boson-eliminated spin surface.  At fixed ``jz`` the
allowed angles satisfy ``cos^2 phi >= g`` (or ``<=`` when the angular
denominator is negative), so the phi-measure is ``4 arccos sqrt(g)``.  The
jz axis is cut where ``g`` crosses 0 or 1; each piece is either fully
allowed, empty, or partial, and only partial pieces need quadrature.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass
from enum import Enum

from scipy import integrate

from .errors import DegenerateBranch, DegenerateDenominator, DivergenceFlag
from .fixed_points import Classification, Family, enumerate_fixed_points, pair_energy
from .model import F_FLOOR, TWO_PI, ModelParams
from .phases import ground_state

QUAD_EPSABS = 1e-11
QUAD_EPSREL = 1e-10
QUAD_LIMIT = 200


class DomainKind(str, Enum):
    BELOW_GS = "below_gs"
    SX_ONLY = "sx_only"
    SY_SLICE = "sy_slice"
    MID_SLICE = "mid_slice"
    UPPER_SLICE = "upper_slice"
    SATURATED = "saturated"


class EsqptType(str, Enum):
    LOGARITHMIC = "logarithmic"
    JUMP = "jump"


class Coverage(str, Enum):
    PARTIAL = "partial"
    FULL_CIRCLE = "full_circle"
    EMPTY = "empty"


@dataclass(frozen=True)
class DiscriminantData:
    """Coefficients of the momentum quadratic ``-p^2 + a p + b`` and the angular bound.

    ``a^2 + 4 b >= 0`` holds exactly when ``cos^2 phi >= g`` for a positive
    ``denominator`` (reversed for a negative one).
    """

    a: float
    b: float
    g: float
    denominator: float


@dataclass(frozen=True)
class JzRoots:
    """Edges of the x-family (``minus, plus``) and y-family (``one, two``) windows.

    ``None`` marks a root that is complex or outside ``[-1, 1]``; the
    ``raw`` tuple keeps unclipped real values (``nan`` when complex).
    """

    minus: float | None
    plus: float | None
    one: float | None
    two: float | None
    raw: tuple[float, float, float, float]


@dataclass(frozen=True)
class LimitingAngle:
    angle: float | None
    coverage: Coverage
    measure: float


@dataclass(frozen=True)
class CriticalEnergy:
    epsilon_c: float
    source: str
    esqpt_type: EsqptType
    index_r: int

    def record(self) -> dict:
        return {"epsilon_c": self.epsilon_c, "source": self.source, "type": self.esqpt_type.value, "r": self.index_r}


@dataclass(frozen=True)
class EnergyDomain:
    lower: float
    upper: float
    kind: DomainKind
    jz_window: str


@dataclass(frozen=True)
class DosResult:
    epsilon: float
    nu_scaled: float
    domain: DomainKind
    quadrature_error: float


# --------------------------------------------------------------------------
# Pointwise pieces
# --------------------------------------------------------------------------

def _angular_denominator(params: ModelParams) -> float:
    return (params.f_plus - params.f_minus) - (params.eta_x - params.eta_y) / params.omega0


def _threshold(params: ModelParams, jz: float, eps: float) -> float:
    """``2 (h(jz) - eps) / (1 - jz^2)`` with ``h`` the spin part of the surface."""
    h = jz + 0.5 * params.eta_z / params.omega0 * jz * jz
    return 2.0 * (h - eps) / ((1.0 - jz) * (1.0 + jz))


def discriminant(params: ModelParams, jz: float, phi: float, eps: float) -> DiscriminantData:
    """Coefficients of the real-momentum condition at ``(jz, phi)`` and energy ``eps``."""
    w, w0, g, xi = params.omega, params.omega0, params.gamma, params.xi
    c, s = math.cos(phi), math.sin(phi)
    s2 = 1.0 - jz * jz
    a = 2.0 * g / w * math.sqrt(max(s2, 0.0)) * (1.0 - xi) * s
    b = (
        -2.0 / w * jz * (w0 + 0.5 * params.eta_z * jz)
        - s2 / w * (params.eta_x * c * c + params.eta_y * s * s)
        + 2.0 * eps * w0 / w
        + (g / w) ** 2 * s2 * (1.0 + xi) ** 2 * c * c
    )
    den = _angular_denominator(params)
    gval = (_threshold(params, jz, eps) - params.coef_y) / den if den != 0.0 else math.nan
    return DiscriminantData(a, b, gval, den)


def _measure_from_g(g: float, den: float) -> float:
    if den > 0:
        if g <= 0.0:
            return TWO_PI
        if g >= 1.0:
            return 0.0
        return 4.0 * math.acos(math.sqrt(g))
    if g >= 1.0:
        return TWO_PI
    if g <= 0.0:
        return 0.0
    return TWO_PI - 4.0 * math.acos(math.sqrt(g))


def phi_measure(params: ModelParams, jz: float, eps: float) -> float:
    """Length of the allowed phi set at fixed ``jz``; handles a vanishing denominator."""
    if abs(jz) >= 1.0:
        h = jz + 0.5 * params.eta_z / params.omega0
        return TWO_PI if h <= eps else 0.0
    den = _angular_denominator(params)
    t = _threshold(params, jz, eps)
    if abs(den) < F_FLOOR:
        return TWO_PI if params.coef_y >= t else 0.0
    return _measure_from_g((t - params.coef_y) / den, den)


def limiting_angle(params: ModelParams, jz: float, eps: float) -> LimitingAngle:
    """Limiting angle ``arccos sqrt(g)`` with the allowed phi measure.

    Raises
    ------
    DegenerateDenominator
        When the angular denominator is below ``F_FLOOR`` in magnitude.
    """
    den = _angular_denominator(params)
    if abs(den) < F_FLOOR:
        raise DegenerateDenominator("phi-independent bound: angular denominator vanishes")
    g = (_threshold(params, jz, eps) - params.coef_y) / den
    m = _measure_from_g(g, den)
    if m == TWO_PI:
        return LimitingAngle(None, Coverage.FULL_CIRCLE, m)
    if m == 0.0:
        return LimitingAngle(None, Coverage.EMPTY, m)
    return LimitingAngle(math.acos(math.sqrt(min(1.0, max(0.0, g)))), Coverage.PARTIAL, m)


def _closed_pair(f: float, eps: float, eps_s: float) -> tuple[float, float]:
    rad = 2.0 * f * (eps - eps_s)
    if rad < 0.0:
        return math.nan, math.nan
    r = math.sqrt(rad)
    return -(1.0 - r) / f, -(1.0 + r) / f


def jz_roots(params: ModelParams, eps: float) -> JzRoots:
    """Closed-form window edges ``jz = -(1/f)[1 -+ sqrt(2 f (eps - eps_s))]``.

    A pair whose ``|f|`` is below ``F_FLOOR`` has no closed form and is
    reported absent.

    Raises
    ------
    DegenerateBranch
        When both ``|f_x|`` and ``|f_y|`` are below ``F_FLOOR``.
    """
    fx, fy = params.f_x, params.f_y
    if abs(fx) < F_FLOOR and abs(fy) < F_FLOOR:
        raise DegenerateBranch(f"f_x = {fx} and f_y = {fy} are below the floor; both pairs degenerate")

    def pair(f: float) -> tuple[float, float]:
        if abs(f) < F_FLOOR:
            return math.nan, math.nan
        return _closed_pair(f, eps, pair_energy(params, f))

    plus, minus = pair(fx)
    one, two = pair(fy)

    def clip(v: float) -> float | None:
        return v if (not math.isnan(v) and -1.0 <= v <= 1.0) else None

    return JzRoots(clip(minus), clip(plus), clip(one), clip(two), (minus, plus, one, two))


def _quadratic_roots(a2: float, c0: float) -> list[float]:
    """Real roots of ``a2 x^2 + 2 x - c0 = 0``, stable as ``a2 -> 0``."""
    disc = 1.0 + a2 * c0
    if disc < 0.0:
        return []
    qq = -(1.0 + math.sqrt(disc))
    roots = [-c0 / qq]
    if a2 != 0.0:
        roots.append(qq / a2)
    return roots


def _breakpoints(params: ModelParams, eps: float) -> list[float]:
    pts = [-1.0, 1.0]
    for f, coef in ((params.f_x, params.coef_x), (params.f_y, params.coef_y)):
        for r in _quadratic_roots(f, 2.0 * eps + coef):
            if -1.0 < r < 1.0:
                pts.append(r)
    return sorted(set(pts))


def _pieces(params: ModelParams, eps: float):
    """Yield ``(a, b, kind)`` with kind in {"full", "empty", "partial"}."""
    pts = _breakpoints(params, eps)
    for a, b in zip(pts[:-1], pts[1:]):
        if b - a <= 0.0:
            continue
        m = phi_measure(params, 0.5 * (a + b), eps)
        kind = "full" if m == TWO_PI else ("empty" if m == 0.0 else "partial")
        yield a, b, kind


def _quad_window(fn, a: float, b: float) -> tuple[float, float]:
    """Integrate ``fn`` over ``[a, b]`` with a cosine map that tames edge singularities."""
    half = 0.5 * (b - a)

    def integrand(s: float) -> float:
        x = a + half * (1.0 - math.cos(math.pi * s))
        return fn(x) * half * math.pi * math.sin(math.pi * s)

    # near a pole the integrand carries roundoff of order 1e-12; quad then
    # warns that epsrel is unreachable, while err still reports the real accuracy
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(integrand, 0.0, 1.0, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT)
    return val, err


# --------------------------------------------------------------------------
# Stationary structure
# --------------------------------------------------------------------------

def _source_name(family: Family) -> str:
    return {
        Family.POLE_SOUTH: "pole_south",
        Family.POLE_NORTH: "pole_north",
        Family.SUPERRADIANT_X: "saddle_x",
        Family.SUPERRADIANT_Y: "saddle_y",
        Family.DEFORMED: "saddle_y",
        Family.SYMMETRIC_CONTINUUM: "ring",
    }[family]


@functools.lru_cache(maxsize=512)
def critical_energies(params: ModelParams) -> tuple[CriticalEnergy, ...]:
    """Stationary energies above the ground state, typed by the Hessian index.

    An odd index gives a logarithmic singularity of the DoS derivative, an
    even index a finite jump.
    """
    eps_gs = ground_state(params).epsilon
    seen: dict[float, CriticalEnergy] = {}
    for fp in enumerate_fixed_points(params, n_ring=4):
        if fp.epsilon <= eps_gs + 1e-12 * max(1.0, abs(eps_gs)):
            continue
        if fp.classification is Classification.DEGENERATE_CONTINUUM and not fp.is_pole:
            continue
        key = round(fp.epsilon, 12)
        if key in seen:
            continue
        src = _source_name(fp.family)
        if fp.epsilon > params.eps_north and not fp.is_pole:
            src = "upper_" + ("x" if fp.family is Family.SUPERRADIANT_X else "y")
        kind = EsqptType.LOGARITHMIC if fp.index_r % 2 == 1 else EsqptType.JUMP
        seen[key] = CriticalEnergy(fp.epsilon, src, kind, fp.index_r)
    return tuple(sorted(seen.values(), key=lambda c: c.epsilon_c))


_WINDOWS = {
    DomainKind.SX_ONLY: "jz in [jz(-), jz(+)] around the lowest pair, limiting angle inside",
    DomainKind.SY_SLICE: "jz from -1 to jz(+) with the second pair's window [jz(1), jz(2)] excluded partially",
    DomainKind.MID_SLICE: "jz from -1 (full circle) to the upper edge jz(+) or +1",
    DomainKind.UPPER_SLICE: "whole sphere except windows around upper stationary points",
    DomainKind.SATURATED: "whole sphere [-1, 1] x [0, 2 pi)",
}


@functools.lru_cache(maxsize=512)
def _domain_table(params: ModelParams) -> tuple[tuple[EnergyDomain, ...], tuple[CriticalEnergy, ...]]:
    eps_gs = ground_state(params).epsilon
    crit = critical_energies(params)
    bounds = [eps_gs] + [c.epsilon_c for c in crit]
    sources = ["gs"] + [c.source for c in crit]
    domains = []
    for i, lo in enumerate(bounds):
        hi = bounds[i + 1] if i + 1 < len(bounds) else math.inf
        src = sources[i]
        if math.isinf(hi):
            kind = DomainKind.SATURATED
        elif src == "gs":
            kind = DomainKind.MID_SLICE if abs(lo - params.eps_south) <= 1e-12 else DomainKind.SX_ONLY
        elif src == "pole_south":
            kind = DomainKind.MID_SLICE
        elif src in ("saddle_x", "saddle_y", "ring"):
            kind = DomainKind.SY_SLICE
        else:
            kind = DomainKind.UPPER_SLICE
        domains.append(EnergyDomain(lo, hi, kind, _WINDOWS[kind]))
    return tuple(domains), crit


def energy_domains(params: ModelParams) -> tuple[list[EnergyDomain], list[CriticalEnergy]]:
    """Energy domains partitioning ``[eps_gs, inf)`` and the critical energies between them."""
    d, c = _domain_table(params)
    return list(d), list(c)


def saturation_energy(params: ModelParams) -> float:
    """Highest stationary energy; above it the whole sphere is allowed."""
    top = params.eps_north
    for f in (params.f_x, params.f_y):
        if f <= -1.0:
            top = max(top, pair_energy(params, f))
    return top


def domain_of(params: ModelParams, eps: float) -> DomainKind:
    domains, _ = _domain_table(params)
    if eps < domains[0].lower:
        return DomainKind.BELOW_GS
    for d in domains:
        if d.lower <= eps < d.upper:
            return d.kind
    return DomainKind.SATURATED


# --------------------------------------------------------------------------
# DoS and its derivative
# --------------------------------------------------------------------------

def dos(params: ModelParams, eps: float) -> DosResult:
    """Scaled semiclassical density of states ``omega nu / 2`` at ``eps``."""
    eps = float(eps)
    kind = domain_of(params, eps)
    if kind is DomainKind.BELOW_GS:
        return DosResult(eps, 0.0, kind, 0.0)
    if eps >= saturation_energy(params):
        return DosResult(eps, 1.0, kind, 0.0)
    full = 0.0
    partial = 0.0
    err = 0.0
    for a, b, k in _pieces(params, eps):
        if k == "full":
            full += b - a
        elif k == "partial":
            v, e = _quad_window(lambda x: phi_measure(params, x, eps), a, b)
            partial += v
            err += e
    nu = 0.5 * full + partial / (4.0 * math.pi)
    return DosResult(eps, min(1.0, max(0.0, nu)), kind, err / (4.0 * math.pi))


def _measure_rate(params: ModelParams, jz: float, eps: float, den: float) -> float:
    """Derivative of the phi-measure with respect to ``eps`` (interior of a partial window)."""
    s2 = (1.0 - jz) * (1.0 + jz)
    g = (_threshold(params, jz, eps) - params.coef_y) / den
    gg = g * (1.0 - g)
    if gg <= 0.0 or s2 <= 0.0:
        return 0.0
    return 4.0 / (s2 * abs(den) * math.sqrt(gg))


def dos_derivative(params: ModelParams, eps: float) -> float:
    """Energy derivative of ``nu_scaled``.

    Raises
    ------
    DivergenceFlag
        At a critical energy of logarithmic type, where the derivative diverges.
    """
    eps = float(eps)
    for c in critical_energies(params):
        if c.esqpt_type is EsqptType.LOGARITHMIC and abs(eps - c.epsilon_c) <= 1e-12 * max(1.0, abs(eps)):
            raise DivergenceFlag(f"logarithmic divergence at epsilon={c.epsilon_c}")
    if domain_of(params, eps) is DomainKind.BELOW_GS or eps >= saturation_energy(params):
        return 0.0
    den = _angular_denominator(params)
    if abs(den) < F_FLOOR:
        return _degenerate_rate(params, eps)
    total = 0.0
    for a, b, k in _pieces(params, eps):
        if k == "partial":
            v, _ = _quad_window(lambda x: _measure_rate(params, x, eps, den), a, b)
            total += v
    return total / (4.0 * math.pi)


def _degenerate_rate(params: ModelParams, eps: float) -> float:
    # all-or-nothing phi measure: only the moving window edges contribute
    f = params.f_y
    total = 0.0
    for a, b, k in _pieces(params, eps):
        if k != "full":
            continue
        for edge, sign in ((a, -1.0), (b, 1.0)):
            if -1.0 < edge < 1.0:
                total += sign / (f * edge + 1.0)
    return 0.5 * total
