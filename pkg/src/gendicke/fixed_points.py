"""Stationary points of the classical energy surface.

Five analytic families exist: the two poles, the superradiant pairs along the
x axis (``phi in {0, pi}``) and the y axis (``phi = pi/2, 3pi/2``), and, when
``f_x == f_y``, a continuous ring.  A pair with scaled function ``f`` sits at
``jz = -1/f`` and exists whenever ``|f| >= 1``.

Classification works on the spin block reduced by the boson (Schur complement
of the ``omega`` block), which is what the energy surface shows; the index
``r`` counts negative eigenvalues of the full 4x4 Hessian.  The two agree in
sign count because the boson block is positive definite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import NonConvergence, PoleSingularity
from .model import (
    NORTH,
    POLE_GUARD,
    SOUTH,
    TWO_PI,
    ModelParams,
    PhaseSpacePoint,
    chart_gradient,
    chart_hessian,
    classical_energy,
    from_chart,
    hamilton_rhs,
    raw_gradient,
    to_chart,
)

#: Distance from a pole at which refinement switches to the pole chart.
CHART_SWITCH = 1e-6
#: Relative scale for zero Hessian eigenvalues.
DEGENERACY_REL = 1e-8
#: Samples used to represent a continuum ring.
N_RING = 64


class Family(str, Enum):
    POLE_SOUTH = "pole_south"
    POLE_NORTH = "pole_north"
    SUPERRADIANT_X = "superradiant_x"
    SUPERRADIANT_Y = "superradiant_y"
    SYMMETRIC_CONTINUUM = "symmetric_continuum"
    DEFORMED = "deformed"


class Classification(str, Enum):
    MINIMUM = "minimum"
    MAXIMUM = "maximum"
    SADDLE = "saddle"
    DEGENERATE_CONTINUUM = "degenerate_continuum"


@dataclass(frozen=True)
class FixedPoint:
    """A stationary point with its Hessian-based classification.

    ``hessian_eigenvalues`` are those of the unscaled 4x4 Hessian (pole chart
    coordinates at the poles), ``reduced_eigenvalues`` those of the 2x2 spin
    block after eliminating the boson.
    """

    point: PhaseSpacePoint
    epsilon: float
    family: Family
    classification: Classification
    hessian_eigenvalues: np.ndarray
    index_r: int
    reduced_eigenvalues: np.ndarray
    residual: float
    phi_indeterminate: bool = False
    also_families: tuple[Family, ...] = ()
    iterations: int = 0

    @property
    def is_pole(self) -> bool:
        return self.family in (Family.POLE_SOUTH, Family.POLE_NORTH)

    def record(self) -> dict:
        """Flat serializable form."""
        return {
            "family": self.family.value,
            "q": self.point.q,
            "p": self.point.p,
            "jz": self.point.jz,
            "phi": None if self.phi_indeterminate else self.point.phi,
            "epsilon": self.epsilon,
            "class": self.classification.value,
            "r": self.index_r,
            "also": [f.value for f in self.also_families],
        }


@dataclass(frozen=True)
class CriticalCouplings:
    """Critical couplings; ``gamma_c_y`` is ``None`` at ``xi = 1``."""

    gamma_c_x: float
    gamma_c_y: float | None
    f_x: float
    f_y: float
    order_inverted: bool
    crossing_delta_zy: float
    deformed: bool = False


@dataclass(frozen=True)
class RingDescriptor:
    """Analytic description of the continuum of minima when ``f_x == f_y``."""

    jz: float
    epsilon: float
    f: float
    samples: list[FixedPoint] = field(default_factory=list)


# --------------------------------------------------------------------------
# Hessian
# --------------------------------------------------------------------------

def hessian(params: ModelParams, x: PhaseSpacePoint) -> np.ndarray:
    """Unscaled Hessian of the classical energy in ``(q, p, jz, phi)``.

    Raises
    ------
    PoleSingularity
        Within ``POLE_GUARD`` of a pole.
    """
    jz, phi = x.jz, x.phi
    if abs(jz) > 1.0 - POLE_GUARD:
        raise PoleSingularity(f"jz={jz} is within pole_guard of a pole")
    q, p = x.q, x.p
    g, xi, w = params.gamma, params.xi, params.omega
    c, s = math.cos(phi), math.sin(phi)
    s2 = 1.0 - jz * jz
    st = math.sqrt(s2)
    dxy = params.eta_x - params.eta_y
    bx = (1.0 + xi) * q * c - (1.0 - xi) * p * s
    by = (1.0 + xi) * q * s + (1.0 - xi) * p * c

    h_qj = -g * jz / st * (1.0 + xi) * c
    h_pj = g * jz / st * (1.0 - xi) * s
    h_qf = -g * st * (1.0 + xi) * s
    h_pf = -g * st * (1.0 - xi) * c
    h_jj = params.eta_z - (params.eta_x * c * c + params.eta_y * s * s) - g * bx / (s2 * st)
    h_jf = 2.0 * jz * dxy * c * s + g * jz / st * by
    h_ff = s2 * dxy * (s * s - c * c) - g * st * bx
    return np.array([
        [w, 0.0, h_qj, h_qf],
        [0.0, w, h_pj, h_pf],
        [h_qj, h_pj, h_jj, h_jf],
        [h_qf, h_pf, h_jf, h_ff],
    ])


def hessian_determinant(params: ModelParams, x: PhaseSpacePoint) -> float:
    """Closed-form determinant of :func:`hessian` built from the spin entries."""
    h = hessian(params, x)
    jz, phi = x.jz, x.phi
    g, xi, w = params.gamma, params.xi, params.omega
    c, s = math.cos(phi), math.sin(phi)
    s2 = 1.0 - jz * jz
    a2, b2 = (1.0 + xi) ** 2, (1.0 - xi) ** 2
    h_jj, h_jf, h_ff = h[2, 2], h[2, 3], h[3, 3]
    return (
        w * w * (h_jj * h_ff - h_jf**2)
        + g**4 * jz * jz * a2 * b2 * (c * c + s * s) ** 2
        - w * g * g * (
            s2 * (b2 * c * c + a2 * s * s) * h_jj
            + jz * jz / s2 * (b2 * s * s + a2 * c * c) * h_ff
            + 2.0 * jz * c * s * (b2 - a2) * h_jf
        )
    )


def pole_determinant(params: ModelParams, phi: float) -> float:
    """Closed-form Hessian determinant at ``q = p = 0, jz = +-1`` as a function of the nominal angle."""
    g, xi, w = params.gamma, params.xi, params.omega
    dxy = params.eta_x - params.eta_y
    c, s = math.cos(phi), math.sin(phi)
    s2p = math.sin(2.0 * phi) ** 2
    return (
        -w * w * dxy**2 * s2p
        + w * g * g * dxy * (((1.0 + xi) ** 2 * c * c + (1.0 - xi) ** 2 * s * s) * math.cos(2.0 * phi) - 4.0 * xi * s2p)
        + g**4 * (1.0 - xi) ** 2 * (1.0 + xi) ** 2
    )


def reduced_hessian(h4: np.ndarray, omega: float) -> np.ndarray:
    """Schur complement of the boson block ``omega * I`` in a 4x4 Hessian."""
    b = h4[:2, 2:]
    return h4[2:, 2:] - b.T @ b / omega


# --------------------------------------------------------------------------
# Critical couplings
# --------------------------------------------------------------------------

def critical_couplings(params: ModelParams) -> CriticalCouplings:
    """Couplings at which the x and y superradiant pairs appear."""
    w0 = params.omega0
    dzx, dzy = params.delta_zx, params.delta_zy
    gcx = params.gamma_plus * math.sqrt(1.0 - dzx / w0) if dzx < w0 else 0.0
    if params.xi == 1.0:
        gcy = None
    else:
        gcy = params.gamma_minus * math.sqrt(1.0 - dzy / w0) if dzy < w0 else 0.0
    ratio = ((1.0 - params.xi) / (1.0 + params.xi)) ** 2
    crossing = ratio * dzx + w0 * (1.0 - ratio)
    return CriticalCouplings(
        gamma_c_x=gcx,
        gamma_c_y=gcy,
        f_x=params.f_x,
        f_y=params.f_y,
        order_inverted=gcy is not None and gcy < gcx,
        crossing_delta_zy=crossing,
        deformed=params.xi == 1.0 and dzy >= w0,
    )


# --------------------------------------------------------------------------
# Analytic seeds
# --------------------------------------------------------------------------

def pair_energy(params: ModelParams, f: float) -> float:
    return -0.5 * (f + 1.0 / f) + params.eta_z / (2.0 * params.omega0)


def _pair_point(params: ModelParams, f: float, phi: float) -> PhaseSpacePoint:
    jz = -1.0 / f
    st = math.sqrt(max(0.0, 1.0 - jz * jz))
    r = params.gamma / params.omega
    q = -r * (1.0 + params.xi) * st * math.cos(phi)
    p = r * (1.0 - params.xi) * st * math.sin(phi)
    return PhaseSpacePoint(q, p, jz, phi)


def _symmetric(params: ModelParams) -> bool:
    fx, fy = params.f_x, params.f_y
    return abs(fx - fy) <= 1e-12 * max(1.0, abs(fx), abs(fy))


def _at_unity(f: float) -> bool:
    return abs(abs(f) - 1.0) <= 1e-12


def count_fixed_points(params: ModelParams) -> int:
    """Number of isolated stationary points (ring samples excluded)."""
    n = 2
    if _symmetric(params):
        return n
    for f in (params.f_x, params.f_y):
        if abs(f) >= 1.0 and not _at_unity(f):
            n += 2
    return n


# --------------------------------------------------------------------------
# Classification and refinement
# --------------------------------------------------------------------------

def _classify_matrix(h4: np.ndarray, omega: float) -> tuple[Classification, np.ndarray, int, np.ndarray]:
    eig = np.linalg.eigvalsh(h4)
    red = np.linalg.eigvalsh(reduced_hessian(h4, omega))
    tol = DEGENERACY_REL * max(1.0, float(np.max(np.sum(np.abs(h4), axis=1))))
    r = int(np.sum(eig < -tol))
    if np.any(np.abs(eig) < tol):
        cls = Classification.DEGENERATE_CONTINUUM
    elif r == 0:
        cls = Classification.MINIMUM
    elif int(np.sum(red < 0)) == 2:
        cls = Classification.MAXIMUM
    else:
        cls = Classification.SADDLE
    return cls, eig, r, red


def _pole_of(jz: float) -> int | None:
    if jz <= -1.0 + CHART_SWITCH:
        return SOUTH
    if jz >= 1.0 - CHART_SWITCH:
        return NORTH
    return None


def _newton(grad, hess, y0: np.ndarray, max_iter: int = 50, tol: float = 1e-12) -> tuple[np.ndarray, int]:
    y = np.array(y0, dtype=float)
    for it in range(max_iter + 1):
        gvec = grad(y)
        if np.linalg.norm(gvec) < tol:
            return y, it
        if it == max_iter:
            break
        step = np.linalg.lstsq(hess(y), -gvec, rcond=1e-13)[0]
        y = y + step
    raise NonConvergence(f"Newton refinement stalled with |grad|={np.linalg.norm(gvec):.3e}")


def _infer_family(params: ModelParams, x: PhaseSpacePoint, pole: int | None) -> Family:
    if pole == SOUTH:
        return Family.POLE_SOUTH
    if pole == NORTH:
        return Family.POLE_NORTH
    if _symmetric(params):
        return Family.SYMMETRIC_CONTINUUM
    if abs(math.sin(x.phi)) < 1e-6:
        return Family.SUPERRADIANT_X
    return Family.DEFORMED if params.xi == 1.0 else Family.SUPERRADIANT_Y


def _build(params: ModelParams, x: PhaseSpacePoint, pole: int | None, family: Family | None,
           iterations: int, also: tuple[Family, ...] = ()) -> FixedPoint:
    if pole is None:
        h4 = hessian(params, x)
        residual = float(np.linalg.norm(hamilton_rhs(params, x)))
        eps = classical_energy(params, x)
    else:
        y = to_chart(x, pole)
        h4 = chart_hessian(params, y, pole)
        residual = float(np.linalg.norm(chart_gradient(params, y, pole)))
        eps = classical_energy(params, x)
    cls, eig, r, red = _classify_matrix(h4, params.omega)
    fam = family if family is not None else _infer_family(params, x, pole)
    return FixedPoint(
        point=x,
        epsilon=eps,
        family=fam,
        classification=cls,
        hessian_eigenvalues=eig,
        index_r=r,
        reduced_eigenvalues=red,
        residual=residual,
        phi_indeterminate=pole is not None,
        also_families=also,
        iterations=iterations,
    )


def refine(params: ModelParams, guess: PhaseSpacePoint, family: Family | None = None,
           max_iter: int = 50) -> FixedPoint:
    """Polish ``guess`` to a stationary point by Newton iteration.

    Guesses within ``CHART_SWITCH`` of a pole are refined in the pole chart,
    where the Hamiltonian is regular.

    Raises
    ------
    NonConvergence
        If the gradient does not fall below 1e-12 within ``max_iter`` steps.
    """
    pole = _pole_of(guess.jz)
    if pole is not None:
        def grad(y):
            return chart_gradient(params, y, pole)

        def hess(y):
            return chart_hessian(params, y, pole)

        y, it = _newton(grad, hess, to_chart(guess, pole), max_iter)
        x = from_chart(y, pole)
        if _pole_of(x.jz) != pole:
            pole = None
    else:
        def grad(y):
            return raw_gradient(params, y[0], y[1], y[2], y[3])

        def hess(y):
            return hessian(params, PhaseSpacePoint(y[0], y[1], y[2], y[3]))

        y, it = _newton(grad, hess, guess.as_array(), max_iter)
        if abs(y[2]) > 1.0:
            raise NonConvergence("Newton iterate left the sphere")
        x = PhaseSpacePoint.from_array(y)
        pole = _pole_of(x.jz)
    return _build(params, x, pole, family, it)


def _pole_point(pole: int) -> PhaseSpacePoint:
    return PhaseSpacePoint(0.0, 0.0, float(pole), 0.0)


def enumerate_fixed_points(params: ModelParams, n_ring: int = N_RING) -> list[FixedPoint]:
    """All stationary points, sorted by energy.

    Pairs with ``|f| == 1`` coincide with a pole and are reported once, as
    the pole tagged with the extra family.  A continuum ring is represented
    by ``n_ring`` samples.
    """
    fx, fy = params.f_x, params.f_y
    ydef = Family.DEFORMED if params.xi == 1.0 else Family.SUPERRADIANT_Y
    tags: dict[int, list[Family]] = {SOUTH: [], NORTH: []}
    out: list[FixedPoint] = []

    def seeds(f: float, fam: Family, phis: list[float]):
        if abs(f) < 1.0 and not _at_unity(f):
            return
        if _at_unity(f):
            tags[SOUTH if f > 0 else NORTH].append(fam)
            return
        for phi in phis:
            out.append(refine(params, _pair_point(params, f, phi), fam))

    if _symmetric(params):
        f = 0.5 * (fx + fy)
        if _at_unity(f):
            tags[SOUTH if f > 0 else NORTH].append(Family.SYMMETRIC_CONTINUUM)
        elif abs(f) > 1.0:
            for k in range(n_ring):
                phi = TWO_PI * k / n_ring
                out.append(refine(params, _pair_point(params, f, phi), Family.SYMMETRIC_CONTINUUM))
    else:
        seeds(fx, Family.SUPERRADIANT_X, [0.0, math.pi])
        seeds(fy, ydef, [0.5 * math.pi, 1.5 * math.pi])

    for pole, fam in ((SOUTH, Family.POLE_SOUTH), (NORTH, Family.POLE_NORTH)):
        fp = _build(params, _pole_point(pole), pole, fam, 0, tuple(tags[pole]))
        out.append(fp)
    order = {f: i for i, f in enumerate(Family)}
    out.sort(key=lambda fp: (fp.epsilon, order[fp.family], fp.point.phi))
    return out


def ring_descriptor(params: ModelParams, n_ring: int = N_RING) -> RingDescriptor | None:
    """Continuum description when ``f_x == f_y`` with ``|f| > 1``, else ``None``."""
    if not _symmetric(params):
        return None
    f = 0.5 * (params.f_x + params.f_y)
    if abs(f) <= 1.0 or _at_unity(f):
        return None
    samples = [fp for fp in enumerate_fixed_points(params, n_ring) if fp.family is Family.SYMMETRIC_CONTINUUM]
    return RingDescriptor(jz=-1.0 / f, epsilon=pair_energy(params, f), f=f, samples=samples)


def classify(params: ModelParams, fp: FixedPoint) -> tuple[Classification, int]:
    """Re-derive classification and index ``r`` for ``fp``."""
    pole = _pole_of(fp.point.jz)
    if pole is None:
        h4 = hessian(params, fp.point)
    else:
        h4 = chart_hessian(params, to_chart(fp.point, pole), pole)
    cls, _, r, _ = _classify_matrix(h4, params.omega)
    return cls, r
