"""Self-check battery run by the ``validate`` subcommand.

Each suite compares a closed form against an independent oracle on a small,
seeded sample so the whole battery finishes in seconds and its report is
byte-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dos as dosmod
from .fixed_points import critical_couplings, enumerate_fixed_points, hessian
from .model import ModelParams, PhaseSpacePoint, energy_array
from .oracles import brute_force_ground_state, fd_hessian, mc_dos, richardson_derivative, window_average
from .phases import gs_gradient, ground_state
from .quantum import QuantumModel, build_matrix, commutator_norm, full_spectrum, parity_diagonal

FAULTS = ("critical-coupling",)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def _random_params(rng: np.random.Generator) -> ModelParams:
    return ModelParams(
        gamma=float(rng.uniform(0, 3)), xi=float(rng.uniform(0, 1)),
        eta_x=float(rng.uniform(-2, 2)), eta_y=float(rng.uniform(-2, 2)), eta_z=float(rng.uniform(-2, 2)),
    )


def suite_critical_couplings(inject: str | None = None) -> SuiteResult:
    cases = [
        (ModelParams(xi=0.0), 1.0),
        (ModelParams(xi=1.0), 0.5),
        (ModelParams(xi=0.0, eta_z=1.0), 0.0),
    ]
    worst = 0.0
    for p, expected in cases:
        got = critical_couplings(p).gamma_c_x
        if inject == "critical-coupling":
            got *= 1.01
            got += 0.01
        worst = max(worst, abs(got - expected))
    return SuiteResult("critical_couplings", worst < 1e-12, f"max error {worst:.3e}")


def suite_ground_state(rng: np.random.Generator, n: int = 4) -> SuiteResult:
    worst = 0.0
    for _ in range(n):
        p = _random_params(rng)
        worst = max(worst, abs(ground_state(p).epsilon - brute_force_ground_state(p)))
    return SuiteResult("ground_state_vs_minimization", worst < 1e-6, f"max error {worst:.3e} over {n} sets")


def suite_gradient(rng: np.random.Generator, n: int = 5) -> SuiteResult:
    worst = 0.0
    names = ("gamma", "eta_x", "eta_y", "eta_z")
    done = 0
    while done < n:
        p = _random_params(rng)
        res = gs_gradient(p, boundary_tol=1e-2)
        if res.on_boundary:
            continue
        for i, name in enumerate(names):
            d = richardson_derivative(lambda v: ground_state(p.replace(**{name: v})).epsilon, getattr(p, name), 1e-4)
            worst = max(worst, abs(d - res.gradient[i]) / max(1.0, abs(d)))
        done += 1
    return SuiteResult("gradient_vs_differences", worst < 1e-5, f"max relative error {worst:.3e}")


def suite_hessian(rng: np.random.Generator, n: int = 20) -> SuiteResult:
    worst = 0.0
    for _ in range(n):
        p = _random_params(rng)
        y = np.array([rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-0.9, 0.9), rng.uniform(0, 2 * math.pi)])
        h = hessian(p, PhaseSpacePoint.from_array(y))
        fd = fd_hessian(lambda z: float(energy_array(p, *z)) * p.omega0, y, 2e-3 * min(1.0, 4.0 * (1.0 - abs(y[2]))))
        worst = max(worst, float(np.max(np.abs(h - fd))))
    return SuiteResult("hessian_vs_differences", worst < 1e-5, f"max entry error {worst:.3e}")


def suite_fixed_points(params: ModelParams) -> SuiteResult:
    fps = enumerate_fixed_points(params)
    res = max(fp.residual for fp in fps)
    gs = ground_state(params).epsilon
    low = min(fp.epsilon for fp in fps)
    ok = res < 1e-9 and abs(low - gs) < 1e-10
    return SuiteResult("fixed_points", ok, f"{len(fps)} points, max residual {res:.3e}, min-gs {low - gs:.3e}")


def suite_dos_structure(params: ModelParams) -> SuiteResult:
    domains, crit = dosmod.energy_domains(params)
    worst = 0.0
    for c in crit:
        a = dosmod.dos(params, c.epsilon_c - 1e-5).nu_scaled
        b = dosmod.dos(params, c.epsilon_c + 1e-5).nu_scaled
        worst = max(worst, abs(a - b))
    top = dosmod.saturation_energy(params)
    sat = dosmod.dos(params, top + 1e-12).nu_scaled
    ok = worst < 1e-3 and sat == 1.0
    return SuiteResult("dos_continuity_saturation", ok,
                       f"{len(domains)} domains, max straddle {worst:.3e}, saturated value {sat:.17g}")


def suite_dos_monte_carlo(params: ModelParams, seed: int, n_samples: int, n_energies: int = 8) -> SuiteResult:
    gs = ground_state(params).epsilon
    top = dosmod.saturation_energy(params)
    es = np.linspace(gs + 0.06, top + 0.1, n_energies)
    breaks = [c.epsilon_c for c in dosmod.critical_energies(params)] + [gs]
    worst = 0.0
    for m in mc_dos(params, es, n_samples=n_samples, seed=seed):
        ref = window_average(lambda e: dosmod.dos(params, e).nu_scaled, m.epsilon, m.half_width, breaks=breaks)
        worst = max(worst, abs(m.nu_scaled - ref) / max(m.stderr, 1e-12))
    return SuiteResult("dos_vs_monte_carlo", worst < 3.0, f"max deviation {worst:.2f} standard errors")


def suite_quantum() -> SuiteResult:
    ev = full_spectrum(QuantumModel(ModelParams(), 0.5, 0))
    m = QuantumModel(ModelParams(xi=1.0, gamma=1.0), 5, 30)
    comm = commutator_norm(build_matrix(m), parity_diagonal(m))
    ok = np.allclose(ev, [-1.0, 1.0], atol=1e-14) and comm < 1e-12
    return SuiteResult("quantum_small", ok, f"free qubit {ev[0]:.3f},{ev[1]:.3f}; parity commutator {comm:.1e}")


def run_validation(params: ModelParams, seed: int = 0, mc_samples: int = 200_000,
                   inject: str | None = None) -> list[SuiteResult]:
    rng = np.random.default_rng(seed)
    return [
        suite_critical_couplings(inject),
        suite_ground_state(rng),
        suite_gradient(rng),
        suite_hessian(rng),
        suite_fixed_points(params),
        suite_dos_structure(params),
        suite_dos_monte_carlo(params, seed, mc_samples),
        suite_quantum(),
    ]
