import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gendicke.errors import GridTooLarge, InvalidParameters
from gendicke.fixed_points import enumerate_fixed_points
from gendicke.model import ModelParams
from gendicke.oracles import brute_force_ground_state, richardson_derivative
from gendicke.phases import (
    Dominant,
    Link,
    PhaseLabel,
    classify_qpt,
    ground_state,
    gs_gradient,
    linear_path,
    set_axis,
    sweep,
)

params_st = st.builds(
    ModelParams, gamma=st.floats(0.0, 3.0), xi=st.floats(0.0, 1.0),
    eta_x=st.floats(-2.0, 2.0), eta_y=st.floats(-2.0, 2.0), eta_z=st.floats(-2.0, 2.0),
)


# --- ground state -------------------------------------------------------------

def test_dicke_superradiant_example():
    gs = ground_state(ModelParams(xi=1.0, gamma=1.0))
    assert gs.epsilon == pytest.approx(-2.125) and gs.phase.label is PhaseLabel.SUPERRADIANT_X


def test_normal_example():
    gs = ground_state(ModelParams(xi=0.3, gamma=0.2))
    assert gs.epsilon == -1.0 and gs.phase.label is PhaseLabel.NORMAL and gs.F == 1.0


def test_deformed_example():
    p = ModelParams(xi=1.0, eta_z=2.0)
    gs = ground_state(p)
    assert gs.phase.label is PhaseLabel.DEFORMED and gs.F == 2.0
    assert gs.epsilon == pytest.approx(-0.25)
    assert brute_force_ground_state(p) == pytest.approx(-0.25, abs=1e-8)


def test_deformed_normal_label():
    assert ground_state(ModelParams(gamma=0.1, eta_x=0.3)).phase.label is PhaseLabel.DEFORMED_NORMAL


def test_symmetric_and_superposition_labels():
    assert ground_state(ModelParams(gamma=1.5, eta_x=0.5, eta_y=0.5)).phase.label is PhaseLabel.SUPERRADIANT_SYMMETRIC
    sup = ground_state(ModelParams(gamma=1.6, eta_y=0.9))
    assert sup.phase.label is PhaseLabel.SUPERPOSITION_XY and sup.phase.dominant is Dominant.X
    assert ground_state(ModelParams(gamma=1.2, eta_x=0.9)).phase.label is PhaseLabel.SUPERRADIANT_Y


def test_tie_on_first_order_border():
    # f_x = -0.3 + 2.25 and f_y = 1.7 + 0.25 coincide: x wins the tie and the record is flagged
    gs = ground_state(ModelParams(xi=0.5, gamma=1.0, eta_x=0.3, eta_y=-1.7))
    assert gs.phase.dominant is Dominant.X and gs.phase.border


@settings(max_examples=150, deadline=None)
@given(params_st)
def test_ground_state_properties(p):
    gs = ground_state(p)
    assert gs.F >= 1.0
    assert gs.epsilon == pytest.approx(-0.5 * (gs.F + 1 / gs.F) + p.eta_z / (2 * p.omega0), abs=1e-14)
    assert all(gs.epsilon <= fp.epsilon + 1e-12 for fp in enumerate_fixed_points(p, n_ring=4))
    if gs.phase.label is PhaseLabel.SUPERPOSITION_XY:
        assert p.f_x >= 1 and p.f_y >= 1 and p.xi < 1
    if gs.phase.label is PhaseLabel.DEFORMED:
        assert p.xi == 1.0 and p.delta_zy >= p.omega0


@settings(max_examples=60, deadline=None)
@given(params_st, st.sampled_from(["gamma", "eta_x", "eta_y", "eta_z"]))
def test_ground_state_continuous(p, name):
    # a jump would survive shrinking the step; a continuous function shrinks with it
    v = getattr(p, name)

    def spread(h):
        lo = max(0.0, v - h) if name == "gamma" else v - h
        return abs(ground_state(p.replace(**{name: v + h})).epsilon - ground_state(p.replace(**{name: lo})).epsilon)

    assert spread(1e-7) < 0.2 * spread(1e-6) + 1e-12


# --- gradient -----------------------------------------------------------------

@given(params_st)
def test_normal_phase_gradient(p):
    p = p.replace(gamma=0.0, eta_x=p.eta_z - 0.5, eta_y=p.eta_z - 0.5)
    np.testing.assert_array_equal(gs_gradient(p).gradient, [0.0, 0.0, 0.0, 0.5])


def test_dicke_gradient_against_differences():
    p = ModelParams(xi=1.0, gamma=1.0)
    grad = gs_gradient(p).gradient
    for i, name in enumerate(("gamma", "eta_x", "eta_y", "eta_z")):
        d = richardson_derivative(lambda v: ground_state(p.replace(**{name: v})).epsilon, getattr(p, name))
        assert grad[i] == pytest.approx(d, abs=1e-7)


def test_gradient_at_critical_coupling():
    res = gs_gradient(ModelParams(xi=1.0, gamma=0.5))
    assert res.on_boundary
    g_none, g_x = res.one_sided["none"], res.one_sided["x"]
    assert g_none[0] == g_x[0] == 0.0


# --- transition order -----------------------------------------------------------

def test_dicke_gamma_path_second_order():
    ev = classify_qpt(linear_path(ModelParams(xi=1.0), ModelParams(xi=1.0, gamma=2.0)))
    assert len(ev) == 1 and ev[0].order == 2
    assert ev[0].params.gamma == pytest.approx(0.5, abs=1e-9)
    assert abs(ev[0].left_derivative - ev[0].right_derivative) < 1e-6
    assert abs(ev[0].left_second - ev[0].right_second) > 1e-6


def test_rotating_wave_border_first_order():
    a = ModelParams(gamma=1.5, eta_x=0.5)
    ev = classify_qpt(linear_path(a, a.replace(eta_x=-0.5)))
    assert len(ev) == 1 and ev[0].order == 1
    assert ev[0].params.delta_zx == pytest.approx(ev[0].params.delta_zy, abs=1e-9)


def test_dicke_normal_to_deformed_is_continuous_in_slope():
    # the ground-state slope along delta_zy is 0 on both sides of delta_zy = omega0
    a = ModelParams(xi=1.0, gamma=0.25)
    ev = classify_qpt(linear_path(a, a.replace(eta_y=-2.0)))
    assert len(ev) == 1
    assert ev[0].params.delta_zy == pytest.approx(1.0, abs=1e-9)
    assert ev[0].left_derivative == pytest.approx(0.0, abs=1e-8)
    assert ev[0].right_derivative == pytest.approx(0.0, abs=1e-6)


def test_entering_superposition_is_not_a_transition():
    a = ModelParams(gamma=1.6, eta_y=2.5)
    path = linear_path(a, a.replace(eta_y=0.5))
    labels = {ground_state(path(t)).phase.label for t in np.linspace(0, 1, 21)}
    assert PhaseLabel.SUPERPOSITION_XY in labels and PhaseLabel.SUPERRADIANT_X in labels
    assert classify_qpt(path) == []


def test_classify_qpt_needs_samples():
    with pytest.raises(InvalidParameters):
        classify_qpt(linear_path(ModelParams(), ModelParams(gamma=1.0)), n_samples=1)


# --- sweeps ---------------------------------------------------------------------

def test_single_cell_sweep_matches_ground_state():
    base = ModelParams(xi=0.4, eta_z=0.3)
    (rec,) = sweep(base, ("gamma", [1.1]), ("delta_zx", [0.2]))
    p = set_axis(set_axis(base, "gamma", 1.1), "delta_zx", 0.2)
    gs = ground_state(p)
    assert rec.epsilon == gs.epsilon and rec.phase is gs.phase.label


def test_dicke_deformed_half_plane():
    # gamma = gamma_plus / 2 keeps the x pair away while delta_zx < 3/4
    base = ModelParams(xi=1.0, gamma=0.25)
    recs = sweep(base, ("delta_zx", np.linspace(-2, 0.7, 7)), ("delta_zy", np.linspace(-2, 2, 17)))
    for r in recs:
        assert (r.phase is PhaseLabel.DEFORMED) == (r.param2 >= 1.0)


def test_rotating_wave_border_on_diagonal():
    recs = sweep(ModelParams(gamma=2.0), ("delta_zx", np.linspace(-1, 1, 9)), ("delta_zy", np.linspace(-1, 1, 9)))
    for r in recs:
        if r.param1 > r.param2 + 1e-12:
            assert r.dominant is Dominant.X
        elif r.param1 < r.param2 - 1e-12:
            assert r.dominant is Dominant.Y


def test_linked_axis_shift():
    recs = sweep(ModelParams(), ("gamma", [1.5]), ("delta_zx", [-1.0, 0.0, 1.0]), [Link("delta_zy", "delta_zx", 0.5)])
    for r in recs:
        p = set_axis(set_axis(ModelParams(gamma=1.5), "delta_zx", r.param2), "delta_zy", r.param2 + 0.5)
        assert r.epsilon == ground_state(p).epsilon
        assert r.dominant is Dominant.Y


def test_gamma_rel_axis():
    p = set_axis(ModelParams(xi=1.0), "gamma_rel", 0.5)
    assert p.gamma == pytest.approx(0.25)


def test_sweep_limits():
    with pytest.raises(GridTooLarge):
        sweep(ModelParams(), ("gamma", np.zeros(4000)), ("xi", np.zeros(4000)))
    with pytest.raises(InvalidParameters):
        set_axis(ModelParams(), "bogus", 1.0)
    assert math.isfinite(sweep(ModelParams(), ("gamma", [0.0]), ("xi", [1.0]))[0].epsilon)
