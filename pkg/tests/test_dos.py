import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gendicke import dos as D
from gendicke.errors import DegenerateBranch, DegenerateDenominator, DivergenceFlag
from gendicke.model import ModelParams, classical_energy, PhaseSpacePoint
from gendicke.oracles import direct_scan_measure, mc_dos, window_average
from gendicke.phases import ground_state
from gendicke.presets import DOS_PANELS, RING


# --- pointwise pieces -------------------------------------------------------------

def test_jz_roots_examples():
    p = ModelParams(xi=1.0, gamma=1.0)
    r = D.jz_roots(p, -1.0)
    assert r.plus == pytest.approx(0.5)
    # independent: the energy at the window edge, with the boson at its minimum, equals epsilon
    q = -2.0 * math.sqrt(1 - 0.25)
    assert classical_energy(p, PhaseSpacePoint(q, 0.0, 0.5, 0.0)) == pytest.approx(-1.0)
    at = D.jz_roots(p, -2.125)
    assert at.minus == pytest.approx(-0.25) and at.plus == pytest.approx(-0.25)
    below = D.jz_roots(p, -2.2)
    assert below.minus is None and below.plus is None


def test_jz_roots_degenerate_branch():
    with pytest.raises(DegenerateBranch):
        D.jz_roots(ModelParams(), 0.0)
    # a single degenerate pair is just absent
    r = D.jz_roots(ModelParams(xi=1.0, gamma=1.0), 0.0)
    assert r.one is None and r.two is None


def test_limiting_angle_flags():
    p = DOS_PANELS["rwa_x"]
    cov = {D.limiting_angle(p, jz, 0.0).coverage for jz in np.linspace(-0.99, 0.99, 41)}
    assert D.Coverage.PARTIAL in cov
    la = D.limiting_angle(p, -0.2, -1.2)
    if la.coverage is D.Coverage.PARTIAL:
        assert 0.0 <= la.angle <= math.pi / 2
        assert la.measure == pytest.approx(4 * la.angle)
    with pytest.raises(DegenerateDenominator):
        D.limiting_angle(RING, 0.0, 0.0)


def test_limiting_angle_ends():
    assert D._measure_from_g(0.0, 1.0) == 2 * math.pi
    assert D._measure_from_g(1.0, 1.0) == 0.0
    assert D._measure_from_g(1e-300, 1.0) == pytest.approx(4 * math.acos(0.0))


@pytest.mark.parametrize("seed, name", list(enumerate(["rwa_normal", "rwa_x", "rwa_superposition", "half_x",
                                                       "full_x_deformed"])))
def test_phi_measure_against_direct_scan(seed, name):
    p = DOS_PANELS[name]
    rng = np.random.default_rng(seed)
    gs = ground_state(p).epsilon
    for _ in range(8):
        jz = rng.uniform(-0.95, 0.95)
        eps = rng.uniform(gs, D.saturation_energy(p))
        assert D.phi_measure(p, jz, eps) == pytest.approx(direct_scan_measure(p, jz, eps, 20_000), abs=1e-3)


# --- density of states -----------------------------------------------------------

@pytest.mark.parametrize("eps", [-0.9, -0.5, 0.0, 0.3, 0.99])
def test_decoupled_limit(eps):
    assert D.dos(ModelParams(), eps).nu_scaled == pytest.approx((eps + 1) / 2, abs=1e-12)


def test_below_ground_state_and_saturation():
    p = DOS_PANELS["half_superposition"]
    gs = ground_state(p).epsilon
    assert D.dos(p, gs - 0.01).nu_scaled == 0.0
    assert D.dos(p, gs - 0.01).domain is D.DomainKind.BELOW_GS
    top = D.saturation_energy(p)
    for e in (top, top + 1e-12, top + 3.0):
        assert D.dos(p, e).nu_scaled == 1.0


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 2.5), st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.floats(-3, 3))
def test_rotating_wave_swap_symmetry(gamma, ex, ey, ez, eps):
    p = ModelParams(gamma=gamma, eta_x=ex, eta_y=ey, eta_z=ez)
    q = p.replace(eta_x=ey, eta_y=ex)
    assert D.dos(p, eps).nu_scaled == pytest.approx(D.dos(q, eps).nu_scaled, abs=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(sorted(DOS_PANELS)), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_monotone_and_bounded(name, a, b):
    p = DOS_PANELS[name]
    gs = ground_state(p).epsilon
    top = D.saturation_energy(p)
    lo, hi = sorted((gs + a * (top - gs), gs + b * (top - gs)))
    va, vb = D.dos(p, lo).nu_scaled, D.dos(p, hi).nu_scaled
    assert 0.0 <= va <= vb + 1e-12 <= 1.0 + 1e-12


@pytest.mark.parametrize("name", sorted(DOS_PANELS))
def test_continuity_at_domain_boundaries(name):
    p = DOS_PANELS[name]
    domains, crit = D.energy_domains(p)
    assert [c.epsilon_c for c in crit] == [d.lower for d in domains[1:]]
    for d in domains[1:]:
        assert abs(D.dos(p, d.lower + 1e-5).nu_scaled - D.dos(p, d.lower - 1e-5).nu_scaled) < 1e-3


def test_degenerate_denominator_path():
    # the ring case has a vanishing angular denominator: compare with the MC oracle
    gs = ground_state(RING).epsilon
    es = np.linspace(gs + 0.1, 1.1, 8)
    for m in mc_dos(RING, es, n_samples=400_000, seed=4):
        ref = window_average(lambda e: D.dos(RING, e).nu_scaled, m.epsilon, m.half_width, breaks=[-1.0, 1.0])
        assert abs(m.nu_scaled - ref) < 3.5 * m.stderr


# --- derivative ----------------------------------------------------------------

def test_derivative_zero_when_saturated():
    p = DOS_PANELS["full_x"]
    assert D.dos_derivative(p, D.saturation_energy(p) + 0.5) == 0.0


def test_derivative_divergence_flag():
    p = DOS_PANELS["rwa_x"]
    ec = [c for c in D.critical_energies(p) if c.esqpt_type is D.EsqptType.LOGARITHMIC][0].epsilon_c
    with pytest.raises(DivergenceFlag):
        D.dos_derivative(p, ec)


@pytest.mark.parametrize("name", ["rwa_superposition", "full_x_deformed", "half_superposition"])
def test_saddle_log_signature_binary_approach(name):
    p = DOS_PANELS[name]
    ec = [c for c in D.critical_energies(p) if c.source == "saddle_y"][0].epsilon_c
    vals = [D.dos_derivative(p, ec + 2.0**-k) for k in range(4, 13)]
    diffs = np.diff(vals)
    assert np.ptp(diffs) < 0.1 * np.mean(np.abs(diffs))


def test_jump_at_south_pole_exceeds_secular_variation():
    p = DOS_PANELS["rwa_superposition"]
    e = p.eps_south
    jump = abs(D.dos_derivative(p, e + 1e-4) - D.dos_derivative(p, e - 1e-4))
    secular = abs(D.dos_derivative(p, e + 2e-4) - D.dos_derivative(p, e + 1e-4))
    assert jump > 10 * secular


def test_derivative_matches_differences_in_degenerate_case():
    for e in (-0.8, 0.2, 0.7):
        fd = (D.dos(RING, e + 1e-5).nu_scaled - D.dos(RING, e - 1e-5).nu_scaled) / 2e-5
        assert D.dos_derivative(RING, e) == pytest.approx(fd, abs=1e-5)


# --- domains -------------------------------------------------------------------

def test_normal_phase_domains():
    domains, crit = D.energy_domains(ModelParams(gamma=0.3))
    assert [(d.kind, d.lower, d.upper) for d in domains] == [
        (D.DomainKind.MID_SLICE, -1.0, 1.0), (D.DomainKind.SATURATED, 1.0, math.inf)]
    assert len(crit) == 1 and crit[0].esqpt_type is D.EsqptType.JUMP and crit[0].epsilon_c == 1.0


def test_superposition_domains():
    domains, crit = D.energy_domains(DOS_PANELS["rwa_superposition"])
    assert len(domains) == 4
    assert [c.esqpt_type for c in crit] == [D.EsqptType.LOGARITHMIC, D.EsqptType.JUMP, D.EsqptType.JUMP]
    assert [c.source for c in crit] == ["saddle_y", "pole_south", "pole_north"]


def test_symmetric_case_two_jumps():
    crit = D.critical_energies(RING)
    assert len(crit) == 2 and all(c.esqpt_type is D.EsqptType.JUMP for c in crit)


def test_x_only_south_pole_is_logarithmic():
    # in the x-only phase the south pole has one negative Hessian direction
    crit = D.critical_energies(DOS_PANELS["rwa_x"])
    south = [c for c in crit if c.source == "pole_south"][0]
    assert south.index_r == 1 and south.esqpt_type is D.EsqptType.LOGARITHMIC


def test_critical_record_schema():
    rec = D.critical_energies(DOS_PANELS["half_x"])[0].record()
    assert set(rec) == {"epsilon_c", "source", "type", "r"}
