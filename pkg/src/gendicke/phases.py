"""Ground-state energy, phase labels, transition orders and parameter sweeps.

The ground state follows from the largest admissible scaled function
``F = max(f_x, f_y, 1)`` (only functions ``>= 1`` compete):

    epsilon_gs = -(F + 1/F)/2 + eta_z/(2 omega0)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import GridTooLarge, InvalidParameters
from .fixed_points import count_fixed_points
from .model import ModelParams

#: Relative threshold for a first-derivative jump to count as first order.
DERIV_TOL = 1e-6
#: Step used for one-sided Richardson differences.
DERIV_STEP = 1e-4
MAX_CELLS = 10_000_000


class PhaseLabel(str, Enum):
    NORMAL = "normal"
    DEFORMED_NORMAL = "deformednormal"
    SUPERRADIANT_SYMMETRIC = "superradiantsymmetric"
    SUPERRADIANT_X = "superradiantx"
    SUPERRADIANT_Y = "superradianty"
    DEFORMED = "deformed"
    SUPERPOSITION_XY = "superpositionxy"


class Dominant(str, Enum):
    X = "x"
    Y = "y"
    SYMMETRIC = "symmetric"
    NONE = "none"


@dataclass(frozen=True)
class Phase:
    label: PhaseLabel
    dominant: Dominant
    border: bool = False


@dataclass(frozen=True)
class GroundState:
    epsilon: float
    F: float
    phase: Phase


@dataclass(frozen=True)
class GradientResult:
    """Ground-state gradient ordered ``(d/dgamma, d/deta_x, d/deta_y, d/deta_z)``.

    On a phase boundary ``one_sided`` holds the branch gradients of every
    touching branch, keyed by dominant family.
    """

    gradient: np.ndarray
    on_boundary: bool
    one_sided: dict[str, np.ndarray] | None = None


def _tie(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-12 * max(1.0, abs(a), abs(b))


def ground_state(params: ModelParams) -> GroundState:
    """Closed-form ground state and its phase label.

    Exact boundaries belong to the higher-``F`` side: ``f >= 1`` counts as
    superradiant.  On an ``f_x == f_y`` tie outside the symmetric
    rotating-wave case the x family is reported dominant with ``border``
    set, except at ``xi = 1`` where the tie is labelled deformed.
    """
    fx, fy = params.f_x, params.f_y
    ex, ey = fx >= 1.0, fy >= 1.0
    xi = params.xi
    border = False
    if ex and ey:
        if _tie(fx, fy):
            if xi == 0.0 and params.eta_x == params.eta_y:
                dom = Dominant.SYMMETRIC
            elif xi == 1.0:
                # the deformed label wins ties at xi = 1
                dom, border = Dominant.Y, True
            else:
                dom, border = Dominant.X, True
        else:
            dom = Dominant.X if fx > fy else Dominant.Y
    elif ex:
        dom = Dominant.X
    elif ey:
        dom = Dominant.Y
    else:
        dom = Dominant.NONE

    if dom is Dominant.NONE:
        label = PhaseLabel.NORMAL if params.eta_x == params.eta_y else PhaseLabel.DEFORMED_NORMAL
        F = 1.0
    elif dom is Dominant.SYMMETRIC:
        label, F = PhaseLabel.SUPERRADIANT_SYMMETRIC, fx
    elif dom is Dominant.X:
        F = fx
        label = PhaseLabel.SUPERPOSITION_XY if (ey and xi < 1.0) else PhaseLabel.SUPERRADIANT_X
    else:
        F = fy
        if xi == 1.0:
            label = PhaseLabel.DEFORMED
        else:
            label = PhaseLabel.SUPERPOSITION_XY if ex else PhaseLabel.SUPERRADIANT_Y
    eps = -0.5 * (F + 1.0 / F) + params.eta_z / (2.0 * params.omega0)
    return GroundState(eps, F, Phase(label, dom, border))


def _branch_gradient(params: ModelParams, branch: str) -> np.ndarray:
    w0 = params.omega0
    base = np.array([0.0, 0.0, 0.0, 1.0])
    if branch == "none":
        return base / (2.0 * w0)
    if branch == "x":
        F = params.f_x
        dF = np.array([2.0 * params.gamma * (1.0 + params.xi) ** 2 / params.omega, -1.0, 0.0, 1.0])
    else:
        F = params.f_y
        dF = np.array([2.0 * params.gamma * (1.0 - params.xi) ** 2 / params.omega, 0.0, -1.0, 1.0])
    return ((1.0 - F * F) / (F * F) * dF + base) / (2.0 * w0)


def gs_gradient(params: ModelParams, boundary_tol: float = 1e-9) -> GradientResult:
    """Analytic gradient of the ground-state energy.

    Within ``boundary_tol`` of a phase boundary every touching branch is
    reported in ``one_sided``; ``gradient`` is then the branch selected by
    :func:`ground_state`.
    """
    gs = ground_state(params)
    fx, fy = params.f_x, params.f_y
    active = {
        "none": max(fx, fy) <= 1.0 + boundary_tol,
        "x": fx >= 1.0 - boundary_tol and fx >= fy - boundary_tol,
        "y": fy >= 1.0 - boundary_tol and fy >= fx - boundary_tol,
    }
    names = [k for k, v in active.items() if v]
    chosen = {Dominant.NONE: "none", Dominant.X: "x", Dominant.Y: "y", Dominant.SYMMETRIC: "x"}[gs.phase.dominant]
    grad = _branch_gradient(params, chosen)
    if len(names) > 1:
        return GradientResult(grad, True, {k: _branch_gradient(params, k) for k in names})
    return GradientResult(grad, False, None)


# --------------------------------------------------------------------------
# Transition order along a path
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class QPTEvent:
    t: float
    params: ModelParams
    order: int
    left_derivative: float
    right_derivative: float
    left_second: float
    right_second: float
    from_dominant: Dominant
    to_dominant: Dominant


def linear_path(start: ModelParams, stop: ModelParams) -> Callable[[float], ModelParams]:
    """Straight line between two parameter sets, ``t in [0, 1]``."""
    a, b = start.as_dict(), stop.as_dict()

    def at(t: float) -> ModelParams:
        return ModelParams(**{k: a[k] + t * (b[k] - a[k]) for k in a})

    return at


def _branch_key(params: ModelParams) -> Dominant:
    d = ground_state(params).phase.dominant
    return Dominant.X if d is Dominant.SYMMETRIC else d


def _one_sided(fn: Callable[[float], float], t: float, h: float, side: int) -> tuple[float, float]:
    """Richardson-extrapolated one-sided first and second derivatives."""
    e0 = fn(t)

    def d1(hh):
        # second-order one-sided stencil
        return side * (-3.0 * e0 + 4.0 * fn(t + side * hh) - fn(t + 2 * side * hh)) / (2.0 * hh)

    def d2(hh):
        return (e0 - 2.0 * fn(t + side * hh) + fn(t + 2 * side * hh)) / (hh * hh)

    first = (4.0 * d1(h / 2) - d1(h)) / 3.0
    second = 2.0 * d2(h / 2) - d2(h)
    return first, second


def classify_qpt(path: Callable[[float], ModelParams], n_samples: int = 201,
                 deriv_tol: float = DERIV_TOL, step: float = DERIV_STEP) -> list[QPTEvent]:
    """Locate ground-state transitions along ``path(t)``, ``t in [0, 1]``.

    A transition is a change of the dominant family.  Its order is 1 when the
    one-sided first derivatives differ by more than ``deriv_tol`` (relative),
    otherwise 2.  Label changes that keep the dominant family (e.g. entering
    a superposition) are not transitions.
    """
    if n_samples < 2:
        raise InvalidParameters("n_samples must be at least 2")

    def energy(t: float) -> float:
        return ground_state(path(t)).epsilon

    ts = np.linspace(0.0, 1.0, n_samples)
    keys = [_branch_key(path(float(t))) for t in ts]
    events = []
    for i in range(n_samples - 1):
        if keys[i] is keys[i + 1]:
            continue
        lo, hi = float(ts[i]), float(ts[i + 1])
        k_lo = keys[i]
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if _branch_key(path(mid)) is k_lo:
                lo = mid
            else:
                hi = mid
        tc = hi
        # linear paths extrapolate, so the stencil may leave [0, 1]
        dl, sl = _one_sided(energy, tc, step, -1)
        dr, sr = _one_sided(energy, tc, step, +1)
        scale = max(1.0, abs(dl), abs(dr))
        order = 1 if abs(dl - dr) > deriv_tol * scale else 2
        events.append(QPTEvent(tc, path(tc), order, dl, dr, sl, sr, k_lo, keys[i + 1]))
    return events


# --------------------------------------------------------------------------
# Sweeps
# --------------------------------------------------------------------------

AXIS_NAMES = ("gamma", "gamma_rel", "xi", "omega", "omega0", "eta_x", "eta_y", "eta_z", "delta_zx", "delta_zy")


@dataclass(frozen=True)
class SweepRecord:
    param1: float
    param2: float
    phase: PhaseLabel
    dominant: Dominant
    epsilon: float
    n_fixed_points: int
    border: bool


@dataclass(frozen=True)
class Link:
    """Derived axis ``target = source + offset`` applied after the grid values."""

    target: str
    source: str
    offset: float


def _axis_value(params: ModelParams, name: str) -> float:
    if name == "gamma_rel":
        return params.gamma / params.gamma_plus
    return getattr(params, name)


def set_axis(params: ModelParams, name: str, value: float) -> ModelParams:
    """Return ``params`` with one named axis set; Delta axes move eta_x or eta_y."""
    if name not in AXIS_NAMES:
        raise InvalidParameters(f"unknown sweep axis {name!r}")
    if name == "gamma_rel":
        return params.replace(gamma=value * params.gamma_plus)
    if name == "delta_zx":
        return params.replace(eta_x=params.eta_z - value)
    if name == "delta_zy":
        return params.replace(eta_y=params.eta_z - value)
    return params.replace(**{name: value})


def sweep(base: ModelParams, axis1: tuple[str, Sequence[float]], axis2: tuple[str, Sequence[float]],
          links: Iterable[Link] = ()) -> list[SweepRecord]:
    """Phase raster over two axes, row-major in ``axis1``.

    Raises
    ------
    GridTooLarge
        Above ``MAX_CELLS`` cells.
    """
    n1, v1 = axis1[0], np.asarray(axis1[1], dtype=float)
    n2, v2 = axis2[0], np.asarray(axis2[1], dtype=float)
    if v1.size * v2.size > MAX_CELLS:
        raise GridTooLarge(f"{v1.size * v2.size} cells exceed the limit of {MAX_CELLS}")
    links = list(links)
    for lk in links:
        if lk.target not in AXIS_NAMES or lk.source not in AXIS_NAMES:
            raise InvalidParameters(f"unknown axis in link {lk}")
    out = []
    for a in v1:
        pa = set_axis(base, n1, float(a))
        for b in v2:
            p = set_axis(pa, n2, float(b))
            for lk in links:
                p = set_axis(p, lk.target, _axis_value(p, lk.source) + lk.offset)
            gs = ground_state(p)
            out.append(SweepRecord(float(a), float(b), gs.phase.label, gs.phase.dominant, gs.epsilon,
                                   count_fixed_points(p), gs.phase.border))
    return out
