import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gendicke.errors import PoleSingularity
from gendicke.fixed_points import (
    Classification,
    Family,
    classify,
    count_fixed_points,
    critical_couplings,
    enumerate_fixed_points,
    hessian,
    hessian_determinant,
    pole_determinant,
    refine,
    ring_descriptor,
)
from gendicke.model import ModelParams, PhaseSpacePoint, chart_rhs, hamilton_rhs, to_chart
from gendicke.oracles import brute_force_ground_state
from gendicke.phases import ground_state
from gendicke.presets import RING, SURFACES

params_st = st.builds(
    ModelParams, gamma=st.floats(0.0, 3.0), xi=st.floats(0.0, 1.0),
    eta_x=st.floats(-2.0, 2.0), eta_y=st.floats(-2.0, 2.0), eta_z=st.floats(-2.0, 2.0),
)


def by_family(fps, fam):
    return [fp for fp in fps if fp.family is fam]


# --- critical couplings -------------------------------------------------------

def test_critical_coupling_examples():
    c0 = critical_couplings(ModelParams(xi=0.0))
    assert c0.gamma_c_x == 1.0 and c0.gamma_c_y == 1.0
    c1 = critical_couplings(ModelParams(xi=1.0))
    assert c1.gamma_c_x == 0.5 and c1.gamma_c_y is None
    assert critical_couplings(ModelParams(eta_z=1.0)).gamma_c_x == 0.0


@given(params_st)
def test_critical_coupling_marks_onset(p):
    c = critical_couplings(p)
    # at gamma = gamma_c the x function sits exactly at 1 (unless the pair is unconditional)
    if c.gamma_c_x > 0:
        assert p.replace(gamma=c.gamma_c_x).f_x == pytest.approx(1.0, abs=1e-12)
    if c.gamma_c_y:
        assert p.replace(gamma=c.gamma_c_y).f_y == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=200)
@given(st.floats(0.0, 0.95), st.floats(-2.0, 0.9))
def test_crossing_locus_equalizes_couplings(xi, dzx):
    p = ModelParams(xi=xi, eta_x=-dzx)
    dzy = critical_couplings(p).crossing_delta_zy
    if dzy >= 1.0:
        return
    q = p.replace(eta_y=-dzy)
    c = critical_couplings(q)
    assert c.gamma_c_y == pytest.approx(c.gamma_c_x, rel=1e-10)


# --- enumeration --------------------------------------------------------------

def test_dicke_normal_two_points():
    fps = enumerate_fixed_points(ModelParams(xi=1.0, gamma=0.4))
    assert len(fps) == 2
    south = by_family(fps, Family.POLE_SOUTH)[0]
    assert south.classification is Classification.MINIMUM and south.index_r == 0


def test_dicke_superradiant_four_points():
    p = ModelParams(xi=1.0, gamma=1.0)
    fps = enumerate_fixed_points(p)
    assert len(fps) == 4
    pair = by_family(fps, Family.SUPERRADIANT_X)
    assert len(pair) == 2
    for fp in pair:
        assert fp.point.jz == pytest.approx(-0.25)
        assert fp.epsilon == pytest.approx(-2.125)
    assert by_family(fps, Family.POLE_SOUTH)[0].classification is Classification.SADDLE
    assert brute_force_ground_state(p) == pytest.approx(-2.125, abs=1e-8)


def test_symmetric_ring():
    fps = enumerate_fixed_points(RING, n_ring=16)
    ring = by_family(fps, Family.SYMMETRIC_CONTINUUM)
    assert len(ring) == 16
    for fp in ring:
        assert fp.point.jz == pytest.approx(-1.0 / 1.75)
        assert fp.classification is Classification.DEGENERATE_CONTINUUM
    d = ring_descriptor(RING, 8)
    assert d.f == pytest.approx(1.75) and d.epsilon == pytest.approx(ground_state(RING).epsilon)


def test_figure_panels_counts_and_classes():
    c5 = enumerate_fixed_points(SURFACES["rwa_x_only"])
    assert [fp.classification for fp in c5].count(Classification.MINIMUM) == 2
    assert sorted(fp.classification.value for fp in c5) == ["maximum", "minimum", "minimum", "saddle"]
    assert {round(fp.point.phi, 12) for fp in by_family(c5, Family.SUPERRADIANT_X)} == {0.0, round(math.pi, 12)}
    c6 = enumerate_fixed_points(SURFACES["rwa_superposition"])
    assert len(c6) == 6
    # both poles are local maxima of the boson-eliminated surface here
    classes = sorted(fp.classification.value for fp in c6)
    assert classes == ["maximum", "maximum", "minimum", "minimum", "saddle", "saddle"]


def test_superposition_energy_order():
    p = SURFACES["rwa_superposition"]
    fps = enumerate_fixed_points(p)
    ex = by_family(fps, Family.SUPERRADIANT_X)[0].epsilon
    ey = by_family(fps, Family.SUPERRADIANT_Y)[0].epsilon
    assert ex < ey <= p.eps_south <= p.eps_north


def test_boundary_pair_merges_into_pole():
    fps = enumerate_fixed_points(ModelParams(xi=1.0, gamma=0.5))
    assert len(fps) == 2
    south = by_family(fps, Family.POLE_SOUTH)[0]
    assert Family.SUPERRADIANT_X in south.also_families


@settings(max_examples=60, deadline=None)
@given(params_st)
def test_enumeration_properties(p):
    fps = enumerate_fixed_points(p, n_ring=8)
    for fp in fps:
        assert fp.residual < 1e-9
        assert 0 <= fp.index_r <= 4
        eig = fp.hessian_eigenvalues
        if fp.classification is Classification.MINIMUM:
            assert np.all(eig > 0)
    if p.xi == 1.0:
        assert len(fps) <= 4
    assert min(fp.epsilon for fp in fps) == pytest.approx(ground_state(p).epsilon, abs=1e-10)
    assert count_fixed_points(p) == len([fp for fp in fps if fp.family is not Family.SYMMETRIC_CONTINUUM])


def test_count_law():
    rng = np.random.default_rng(11)
    for _ in range(100):
        p = ModelParams(xi=rng.choice([0.0, 0.5, 1.0]), gamma=rng.uniform(0, 3), eta_x=rng.uniform(-2, 2),
                        eta_y=rng.uniform(-2, 2), eta_z=rng.uniform(-2, 2))
        expected = 2 + 2 * sum(abs(f) > 1.0 for f in (p.f_x, p.f_y))
        assert len(enumerate_fixed_points(p)) == expected


def test_dicke_limit_can_hold_six_points():
    # x pair and deformed pair coexist when f_x > 1 and delta_zy > omega0
    p = ModelParams(xi=1.0, gamma=0.8, eta_z=1.5)
    fps = enumerate_fixed_points(p)
    assert len(fps) == 6
    assert len(by_family(fps, Family.DEFORMED)) == 2
    assert max(fp.residual for fp in fps) < 1e-12


def test_rotating_wave_swap_symmetry():
    p = ModelParams(gamma=1.6, eta_x=0.3, eta_y=-0.4, eta_z=0.2)
    q = p.replace(eta_x=p.eta_y, eta_y=p.eta_x)
    ea = sorted(fp.epsilon for fp in enumerate_fixed_points(p))
    eb = sorted(fp.epsilon for fp in enumerate_fixed_points(q))
    np.testing.assert_allclose(ea, eb, atol=1e-12)
    xa = {round(fp.point.phi % math.pi, 9) for fp in by_family(enumerate_fixed_points(p), Family.SUPERRADIANT_X)}
    yb = {round(fp.point.phi % math.pi, 9) for fp in by_family(enumerate_fixed_points(q), Family.SUPERRADIANT_Y)}
    assert {round((a + math.pi / 2) % math.pi, 9) for a in xa} == yb


# --- refine / classify ----------------------------------------------------------

def test_refine_recovers_perturbed_seed():
    p = ModelParams(xi=0.5, gamma=1.2, eta_y=0.3)
    exact = by_family(enumerate_fixed_points(p), Family.SUPERRADIANT_X)[0]
    x = exact.point
    fp = refine(p, PhaseSpacePoint(x.q + 1e-3, x.p - 1e-3, x.jz + 1e-3, x.phi + 1e-3))
    assert fp.residual < 1e-12 and fp.iterations <= 6
    assert fp.point.jz == pytest.approx(x.jz, abs=1e-10)
    assert np.linalg.norm(hamilton_rhs(p, fp.point)) < 1e-10


def test_refine_near_pole_uses_chart():
    p = ModelParams(gamma=0.3)
    fp = refine(p, PhaseSpacePoint(1e-4, -1e-4, -1.0 + 5e-10, 0.2))
    assert fp.is_pole and fp.phi_indeterminate
    assert np.linalg.norm(chart_rhs(p, to_chart(fp.point, -1), -1)) < 1e-12


def test_classify_consistency():
    for p in (ModelParams(xi=0.5, gamma=0.4), ModelParams(xi=0.5, gamma=1.0), SURFACES["rwa_superposition"]):
        for fp in enumerate_fixed_points(p):
            cls, r = classify(p, fp)
            assert cls is fp.classification and r == fp.index_r


# --- hessian --------------------------------------------------------------------

def test_hessian_boson_block():
    h = hessian(ModelParams(omega=1.7, gamma=0.9, xi=0.3), PhaseSpacePoint(0.3, -0.2, 0.1, 1.0))
    assert h[0, 0] == 1.7 and h[1, 1] == 1.7 and h[0, 1] == 0.0
    np.testing.assert_array_equal(h, h.T)


def test_hessian_raises_at_pole():
    with pytest.raises(PoleSingularity):
        hessian(ModelParams(), PhaseSpacePoint(0, 0, 1.0, 0))


@settings(max_examples=200)
@given(params_st, st.floats(-2, 2), st.floats(-2, 2), st.floats(-0.95, 0.95), st.floats(0, 2 * math.pi))
def test_closed_form_determinant(p, q, pp, jz, phi):
    x = PhaseSpacePoint(q, pp, jz, phi)
    d = np.linalg.det(hessian(p, x))
    assert hessian_determinant(p, x) == pytest.approx(d, rel=1e-8, abs=1e-8)


@given(st.floats(0.01, 3.0), st.floats(-2, 2), st.floats(0, 2 * math.pi))
def test_symmetric_pole_determinant(g, eta, phi):
    assert pole_determinant(ModelParams(gamma=g, eta_x=eta, eta_y=eta), phi) == pytest.approx(g**4, rel=1e-10)


@pytest.mark.parametrize("params, expected", [
    (ModelParams(xi=1.0, gamma=1.0), Classification.MAXIMUM),
    (ModelParams(eta_z=-3.0), Classification.MINIMUM),
    (ModelParams(eta_x=1.5, eta_y=-1.5), Classification.SADDLE),
])
def test_north_pole_signature_follows_hessian(params, expected):
    north = next(fp for fp in enumerate_fixed_points(params) if fp.family is Family.POLE_NORTH)
    assert north.classification is expected
