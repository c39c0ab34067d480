"""Finite-size quantum Hamiltonian in the symmetric pseudospin sector.

    H = omega a^dag a + omega0 Jz
        + gamma / sqrt(N) [(a J+ + a^dag J-) + xi (a^dag J+ + a J-)]
        + (eta_x Jx^2 + eta_y Jy^2 + eta_z Jz^2) / N,      N = 2j

The basis is ``|n> (x) |j, m>`` with index ``n (2j+1) + (m + j)``.  Every
matrix element is real, so storage is real symmetric.  Reported energies are
scaled as ``E / (omega0 j)``.

In the photon-number direction ``H`` is block tridiagonal, which is used to
count eigenvalues below any energy (Sylvester inertia of a block LDL^T
factorization) without diagonalizing the full matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .errors import InvalidParameters, NonConvergence, PreconditionViolated
from .model import ModelParams
from .phases import ground_state as classical_ground_state

DENSE_LIMIT = 4000
GS_TOL = 1e-8


@dataclass(frozen=True)
class QuantumModel:
    params: ModelParams
    j: float
    n_max: int

    def __post_init__(self) -> None:
        j2 = 2.0 * float(self.j)
        if j2 < 1 or abs(j2 - round(j2)) > 1e-12:
            raise InvalidParameters("j must be a positive half-integer")
        if int(self.n_max) < 0:
            raise InvalidParameters("n_max must be non-negative")
        object.__setattr__(self, "j", round(j2) / 2.0)
        object.__setattr__(self, "n_max", int(self.n_max))

    @property
    def spin_dim(self) -> int:
        return int(round(2 * self.j)) + 1

    @property
    def dim(self) -> int:
        return (self.n_max + 1) * self.spin_dim

    @property
    def energy_unit(self) -> float:
        return self.params.omega0 * self.j

    def with_n_max(self, n_max: int) -> "QuantumModel":
        return QuantumModel(self.params, self.j, n_max)


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues_per_j: np.ndarray
    n_max_used: int
    converged: bool
    gs_epsilon: float
    history: tuple[tuple[int, float], ...] = field(default=())


@dataclass(frozen=True)
class Histogram:
    """Level density per unit scaled energy.

    ``density`` integrates (sum times bin width) to the number of levels
    counted; ``nu_scaled`` rescales it to compare with the semiclassical
    ``omega nu / 2``.
    """

    edges: np.ndarray
    counts: np.ndarray
    density: np.ndarray
    nu_scaled: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])


# --------------------------------------------------------------------------
# Operators
# --------------------------------------------------------------------------

def spin_operators(j: float) -> tuple[np.ndarray, np.ndarray]:
    """Dense ``Jz`` (diagonal) and ``J+`` in the ``m = -j..j`` basis."""
    m = np.arange(-j, j + 0.5, 1.0)
    d = m.size
    jp = np.zeros((d, d))
    for k in range(d - 1):
        jp[k + 1, k] = math.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    return np.diag(m), jp


def spin_hamiltonian(model: QuantumModel) -> np.ndarray:
    p = model.params
    jz, jp = spin_operators(model.j)
    jm = jp.T
    jx = 0.5 * (jp + jm)
    # Jy^2 = -(J+ - J-)^2 / 4 keeps everything real
    jy2 = -0.25 * (jp - jm) @ (jp - jm)
    n_atoms = 2.0 * model.j
    return p.omega0 * jz + (p.eta_x * jx @ jx + p.eta_y * jy2 + p.eta_z * jz @ jz) / n_atoms


def _coupling_block(model: QuantumModel) -> np.ndarray:
    """Spin factor of the block coupling photon numbers ``n-1 -> n`` (without sqrt(n))."""
    p = model.params
    _, jp = spin_operators(model.j)
    return p.gamma / math.sqrt(2.0 * model.j) * (jp.T + p.xi * jp)


def build_matrix(model: QuantumModel) -> sp.csr_matrix:
    """Sparse real symmetric Hamiltonian (unscaled energy units)."""
    nb = model.n_max + 1
    hs = sp.csr_matrix(spin_hamiltonian(model))
    num = sp.diags(np.arange(nb, dtype=float) * model.params.omega)
    adag = sp.diags(np.sqrt(np.arange(1, nb, dtype=float)), -1)
    cb = sp.csr_matrix(_coupling_block(model))
    eye_s = sp.identity(model.spin_dim, format="csr")
    eye_b = sp.identity(nb, format="csr")
    h = sp.kron(num, eye_s) + sp.kron(eye_b, hs)
    off = sp.kron(adag, cb)
    h = h + off + off.T
    return sp.csr_matrix(h)


def parity_diagonal(model: QuantumModel) -> np.ndarray:
    """Diagonal of ``exp(i pi (n + m + j))`` in the product basis."""
    n = np.repeat(np.arange(model.n_max + 1), model.spin_dim)
    k = np.tile(np.arange(model.spin_dim), model.n_max + 1)
    return np.where((n + k) % 2 == 0, 1.0, -1.0)


def excitation_diagonal(model: QuantumModel) -> np.ndarray:
    n = np.repeat(np.arange(model.n_max + 1), model.spin_dim)
    k = np.tile(np.arange(model.spin_dim), model.n_max + 1)
    return (n + k).astype(float)


def commutator_norm(h: sp.spmatrix, diag: np.ndarray) -> float:
    """Max-abs entry of ``[H, D]`` for diagonal ``D``."""
    coo = sp.coo_matrix(h)
    vals = coo.data * (diag[coo.col] - diag[coo.row])
    return float(np.max(np.abs(vals))) if vals.size else 0.0


def excitation_block_check(model: QuantumModel) -> float:
    """Largest entry coupling different excitation numbers ``n + m + j``.

    Raises
    ------
    PreconditionViolated
        Unless ``xi = 0`` and ``eta_x = eta_y`` (where the number is conserved).
    """
    p = model.params
    if p.xi != 0.0 or p.eta_x != p.eta_y:
        raise PreconditionViolated("excitation number is conserved only for xi=0 and eta_x=eta_y")
    return commutator_norm(build_matrix(model), excitation_diagonal(model))


# --------------------------------------------------------------------------
# Spectra
# --------------------------------------------------------------------------

def initial_n_max(params: ModelParams, j: float) -> int:
    return max(1, math.ceil(4.0 * j * max(1.0, params.f_plus, params.f_x, params.f_y)))


def full_spectrum(model: QuantumModel) -> np.ndarray:
    """All eigenvalues (scaled), dense; only for small dimensions."""
    if model.dim > DENSE_LIMIT:
        raise InvalidParameters(f"dimension {model.dim} exceeds the dense limit {DENSE_LIMIT}")
    ev = sla.eigvalsh(build_matrix(model).toarray())
    return np.sort(ev) / model.energy_unit


def lowest_eigenvalues(model: QuantumModel, k: int = 1) -> np.ndarray:
    """Lowest ``k`` eigenvalues (scaled)."""
    k = min(k, model.dim)
    if model.dim <= DENSE_LIMIT:
        return full_spectrum(model)[:k]
    h = build_matrix(model)
    # shift-invert about a point safely below the spectrum
    sigma = (classical_ground_state(model.params).epsilon - 1.0 - 2.0 / model.j) * model.energy_unit
    while count_below(model, sigma) > 0:
        sigma -= model.energy_unit
    v0 = np.ones(model.dim) / math.sqrt(model.dim)
    vals = eigsh(h.tocsc(), k=k, sigma=sigma, which="LM", v0=v0, tol=1e-13, return_eigenvectors=False)
    return np.sort(vals) / model.energy_unit


def ground_state(model: QuantumModel, k: int = 1, auto_truncate: bool = True,
                 max_rounds: int = 8) -> SpectrumResult:
    """Lowest ``k`` levels with the boson cutoff grown until the ground state settles.

    Starting from ``model.n_max`` (or the heuristic when ``auto_truncate``
    and the model cutoff is smaller), the cutoff grows by 25% until the
    ground state changes by less than ``GS_TOL``.
    """
    n = model.n_max
    if auto_truncate:
        n = max(n, initial_n_max(model.params, model.j))
    cur = lowest_eigenvalues(model.with_n_max(n), k)
    history = [(n, float(cur[0]))]
    if not auto_truncate:
        return SpectrumResult(cur, n, False, float(cur[0]), tuple(history))
    for _ in range(max_rounds):
        n_next = max(n + 1, math.ceil(1.25 * n))
        nxt = lowest_eigenvalues(model.with_n_max(n_next), k)
        history.append((n_next, float(nxt[0])))
        if abs(nxt[0] - cur[0]) < GS_TOL:
            return SpectrumResult(nxt, n_next, True, float(nxt[0]), tuple(history))
        n, cur = n_next, nxt
    raise NonConvergence(f"ground state did not settle within {max_rounds} truncation rounds")


def count_below(model: QuantumModel, energy: float) -> int:
    """Number of eigenvalues strictly below ``energy`` (unscaled units).

    Uses the block LDL^T factorization of ``H - energy`` along the photon
    number; by Sylvester's law of inertia the negative eigenvalues of the
    Schur-complement blocks add up to the answer.  A singular pivot block
    (``energy`` hitting a block eigenvalue exactly) is sidestepped by moving
    ``energy`` down by a relative 1e-10.
    """
    hs = spin_hamiltonian(model)
    cb = _coupling_block(model)
    eye = np.eye(model.spin_dim)
    w = model.params.omega
    scale = max(1.0, abs(energy))
    for _ in range(8):
        total = 0
        inv_prev = None
        for n in range(model.n_max + 1):
            d = hs + (n * w - energy) * eye
            if inv_prev is not None:
                c = math.sqrt(n) * cb
                d = d - c @ inv_prev @ c.T
                d = 0.5 * (d + d.T)
            ev, vec = np.linalg.eigh(d)
            if np.min(np.abs(ev)) < 1e-12 * scale:
                break
            total += int(np.sum(ev < 0.0))
            inv_prev = (vec / ev) @ vec.T
        else:
            return total
        energy -= 1e-10 * scale
    raise NonConvergence("could not avoid a singular pivot block")


def finite_size_dos(model: QuantumModel, bin_width: float, e_range: tuple[float, float] | None = None) -> Histogram:
    """Histogram of scaled levels.

    Small models are diagonalized in full.  Beyond ``DENSE_LIMIT`` the
    counts per bin come from :func:`count_below` at the bin edges, which
    requires ``e_range``.
    """
    p = model.params
    if model.dim <= DENSE_LIMIT:
        ev = full_spectrum(model)
        lo, hi = e_range if e_range is not None else (ev[0], ev[-1])
        nb = max(1, int(math.ceil((hi - lo) / bin_width - 1e-9)))
        edges = lo + bin_width * np.arange(nb + 1)
        counts, _ = np.histogram(ev, edges)
    else:
        if e_range is None:
            raise InvalidParameters("e_range is required above the dense limit")
        lo, hi = e_range
        nb = max(1, int(math.ceil((hi - lo) / bin_width - 1e-9)))
        edges = lo + bin_width * np.arange(nb + 1)
        cum = np.array([count_below(model, e * model.energy_unit) for e in edges])
        counts = np.diff(cum)
    density = counts / bin_width
    nu = density * p.omega / (2.0 * model.j**2 * p.omega0)
    return Histogram(edges, counts.astype(np.int64), density, nu)
