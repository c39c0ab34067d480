"""Independent numerical checks used by the test suite and ``validate``.

None of these routines use the closed forms they are meant to check: the
ground state comes from direct minimization of the 4D classical energy, the
DoS from Monte Carlo sampling of phase space, and derivatives from finite
differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize

from .model import TWO_PI, ModelParams, energy_array


# --------------------------------------------------------------------------
# Brute-force ground state
# --------------------------------------------------------------------------

def _energy_theta(params: ModelParams, q, p, theta, phi):
    """Classical energy with ``jz = -cos(theta)``; negative ``sin(theta)`` flips phi by pi."""
    jz = -np.cos(theta)
    flip = np.sin(theta) < 0
    return energy_array(params, q, p, jz, np.where(flip, phi + math.pi, phi))


def brute_force_ground_state(params: ModelParams, n_grid: int = 20, n_polish: int = 6) -> float:
    """Global minimum of the classical energy over ``(q, p, jz, phi)``.

    A coarse 4D grid picks starting points that are then polished with
    L-BFGS-B in the smooth ``(q, p, theta, phi)`` parametrization.
    """
    radius = params.gamma / params.omega * 2.0 + 0.5
    th = np.linspace(0.0, math.pi, n_grid)
    ph = np.linspace(0.0, TWO_PI, n_grid, endpoint=False)
    qs = np.linspace(-radius, radius, n_grid)
    Q, Pm, T, F = np.meshgrid(qs, qs, th, ph, indexing="ij")
    E = _energy_theta(params, Q, Pm, T, F).ravel()
    order = np.argsort(E)
    starts = []
    for idx in order:
        pt = np.array([Q.flat[idx], Pm.flat[idx], T.flat[idx], F.flat[idx]])
        if all(np.linalg.norm(pt - s) > 0.3 for s in starts):
            starts.append(pt)
        if len(starts) >= n_polish:
            break

    def fun(y):
        return float(_energy_theta(params, y[0], y[1], y[2], y[3]))

    best = float(E[order[0]])
    for s in starts:
        res = optimize.minimize(fun, s, method="L-BFGS-B", options={"ftol": 1e-15, "gtol": 1e-11, "maxiter": 2000})
        res = optimize.minimize(fun, res.x, method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-15, "maxiter": 4000})
        best = min(best, float(res.fun))
    return best


# --------------------------------------------------------------------------
# Finite differences
# --------------------------------------------------------------------------

def richardson_derivative(fn: Callable[[float], float], x: float, h: float = 1e-3) -> float:
    """Central difference with one Richardson step (error O(h^4))."""
    d1 = (fn(x + h) - fn(x - h)) / (2 * h)
    d2 = (fn(x + h / 2) - fn(x - h / 2)) / h
    return (4 * d2 - d1) / 3


def fd_hessian(fn: Callable[[np.ndarray], float], x: np.ndarray, h: float = 2e-3) -> np.ndarray:
    """Central-difference Hessian of a scalar function, Richardson-extrapolated in ``h``."""
    x = np.asarray(x, dtype=float)
    n = x.size

    def central(step):
        out = np.empty((n, n))
        for i in range(n):
            for k in range(i, n):
                ei = np.zeros(n)
                ek = np.zeros(n)
                ei[i] = step
                ek[k] = step
                v = (fn(x + ei + ek) - fn(x + ei - ek) - fn(x - ei + ek) + fn(x - ei - ek)) / (4 * step * step)
                out[i, k] = out[k, i] = v
        return out

    return (4.0 * central(0.5 * h) - central(h)) / 3.0


def fd_gradient(fn: Callable[[np.ndarray], float], x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    g = np.empty(x.size)
    for i in range(x.size):
        e = np.zeros(x.size)
        e[i] = h
        g[i] = (fn(x + e) - fn(x - e)) / (2 * h)
    return g


# --------------------------------------------------------------------------
# DoS oracles
# --------------------------------------------------------------------------

def direct_scan_measure(params: ModelParams, jz: float, eps: float, n: int = 10_000) -> float:
    """Allowed phi measure at fixed ``jz`` by scanning the real-momentum condition."""
    from .dos import discriminant

    phis = (np.arange(n) + 0.5) * TWO_PI / n
    ok = 0
    for phi in phis:
        d = discriminant(params, jz, float(phi), eps)
        ok += d.a * d.a + 4.0 * d.b >= 0.0
    return ok * TWO_PI / n


@dataclass(frozen=True)
class MonteCarloEstimate:
    epsilon: float
    half_width: float
    nu_scaled: float
    stderr: float
    count: int


def mc_dos(params: ModelParams, energies, half_width: float = 0.05, n_samples: int = 1_000_000,
           seed: int = 0, eps_max: float | None = None, chunk: int = 250_000) -> list[MonteCarloEstimate]:
    """Window-averaged DoS from uniform phase-space sampling.

    ``(q, p)`` are drawn uniformly in a disc that contains every state up to
    ``eps_max``, ``jz`` and ``phi`` uniformly on the sphere.  The estimate at
    ``e`` is the sampled volume with energy in ``[e - h, e + h]`` divided by
    ``2 h``, normalized so that the saturated value is 1.
    """
    energies = np.asarray(energies, dtype=float)
    if eps_max is None:
        eps_max = float(energies.max() + half_width)
    # lowest possible energy is bounded by the spin surface minimum; a crude
    # lower bound keeps the oracle independent of the closed forms
    jz_g = np.linspace(-1, 1, 401)
    ph_g = np.linspace(0, TWO_PI, 401)
    J, Ph = np.meshgrid(jz_g, ph_g)
    st = np.sqrt(1 - J * J)
    q0 = -params.gamma / params.omega * (1 + params.xi) * st * np.cos(Ph)
    p0 = params.gamma / params.omega * (1 - params.xi) * st * np.sin(Ph)
    eps_floor = float(energy_array(params, q0, p0, J, Ph).min()) - 0.1
    radius = params.gamma / params.omega * (1.0 + params.xi) + math.sqrt(
        2.0 * params.omega0 * max(eps_max - eps_floor, 0.0) / params.omega)
    rng = np.random.default_rng(seed)
    lo = energies - half_width
    hi = energies + half_width
    counts = np.zeros(energies.size, dtype=np.int64)
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        r = radius * np.sqrt(rng.random(m))
        t = TWO_PI * rng.random(m)
        jz = 2.0 * rng.random(m) - 1.0
        phi = TWO_PI * rng.random(m)
        e = np.sort(energy_array(params, r * np.cos(t), r * np.sin(t), jz, phi))
        counts += np.searchsorted(e, hi, side="right") - np.searchsorted(e, lo, side="left")
        done += m
    vol = math.pi * radius**2 * 4.0 * math.pi
    scale = params.omega / (2.0 * params.omega0) / (4.0 * math.pi**2) * vol / (2.0 * half_width)
    frac = counts / n_samples
    out = []
    for e, c, f in zip(energies, counts, frac):
        out.append(MonteCarloEstimate(float(e), half_width, float(f * scale),
                                      float(math.sqrt(f * (1 - f) / n_samples) * scale), int(c)))
    return out


def window_average(fn: Callable[[float], float], center: float, half_width: float, n_nodes: int = 24,
                   breaks=()) -> float:
    """Average of ``fn`` over ``[center - h, center + h]``, split at interior ``breaks``."""
    a, b = center - half_width, center + half_width
    cuts = [a] + sorted(x for x in breaks if a < x < b) + [b]
    xg, wg = np.polynomial.legendre.leggauss(n_nodes)
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        total += half * sum(w * fn(mid + half * x) for x, w in zip(xg, wg))
    return total / (b - a)
