import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coevo_kuramoto import (AdaptiveLawSpec, Constant, LinearFeedback, MeanFieldState, MeanFieldSystem,
                            PeriodicDrive, Target, full_two_pop_rhs, general_meanfield_rhs,
                            integrate_meanfield, reduced_inter_rhs, reduced_intra_rhs)
from coevo_kuramoto.meanfield import Diagnostics, GeneralMeanFieldState, MultiPopulationParams
from conftest import make_params
from oracles import fast_field

INTER_LAW = AdaptiveLawSpec(Target.INTER, 0.02, LinearFeedback(2.5, 10.0))
INTRA_LAW = AdaptiveLawSpec(Target.INTRA1, 0.02, LinearFeedback(2.5, 10.0))


# --- general M ---

def test_single_population_equilibrium():
    rho = math.sqrt(1 - 2 * 0.5 / 2.0)
    drho, _ = general_meanfield_rhs(GeneralMeanFieldState([rho], [0.3]), [[2.0]], [0.5], [1.0])
    assert abs(drho[0]) < 1e-12


def test_incoherent_state_is_fixed():
    K = np.array([[1.0, 2.0, 0.5], [0.3, 4.0, 1.0], [2.0, 2.0, 2.0]])
    drho, dphi = general_meanfield_rhs(GeneralMeanFieldState(np.zeros(3), [0.1, 1.0, 2.0]),
                                       K, [0.1, 0.2, 0.3], [1.0, 2.0, 3.0])
    assert np.all(drho == 0.0) and np.all(dphi == 0.0)


def test_phase_equation_floor_counts():
    diag = Diagnostics()
    K = [[1.0, 1.0], [1.0, 1.0]]
    _, dphi = general_meanfield_rhs(GeneralMeanFieldState([0.0, 0.8], [0.0, 1.0]), K, [0.1, 0.1],
                                    [1.0, 1.0], diag)
    assert dphi[0] == 0.0 and diag.floor_count == 1


@given(st.floats(0.01, 0.99), st.floats(-6, 6), st.floats(-3, 5), st.floats(0, 3),
       st.floats(0.01, 2), st.floats(-0.5, 0.5), st.floats(0, 9))
def test_two_population_general_form_reduces(r1, psi, k1, mu, d1, omega, k2):
    K = [[k1, mu], [mu, k2]]
    phi1 = 0.7
    drho, dphi = general_meanfield_rhs(GeneralMeanFieldState([r1, 1.0], [phi1, phi1 + psi]), K,
                                       [d1, 0.0], [5.0, 5.0 + omega])
    red = reduced_inter_rhs(MeanFieldState(r1, psi, mu), make_params(d1=d1, d2=0.0, w1=5.0,
                                                                       w2=5.0 + omega, k1=k1, mu=0.0),
                            None)
    assert abs(drho[0] - red[0]) < 1e-12
    assert abs(drho[1]) < 1e-12
    assert abs((dphi[1] - dphi[0]) - red[1]) < 1e-12 * max(1.0, abs(red[1]))


# --- full two population ---

def test_pinned_layer_does_not_move():
    p = make_params(d2=0.0, mu=2.0)
    d = full_two_pop_rhs(MeanFieldState(0.4, 0.9, 2.0, rho2=1.0), p)
    assert d[1] == 0.0


def test_in_phase_without_detuning_is_stationary_in_psi():
    p = make_params(w1=5.0, w2=5.0, mu=1.3)
    assert full_two_pop_rhs(MeanFieldState(0.3, 0.0, 1.3, rho2=0.8), p)[2] == 0.0


def test_phase_difference_hand_value():
    p = make_params(w1=5.0, w2=5.0, mu=1.0)
    d = full_two_pop_rhs(MeanFieldState(0.5, math.pi / 2, 1.0, rho2=0.5), p)
    assert d[2] == pytest.approx(-1.25, abs=1e-12)


def test_full_law_target_selects_coupling():
    p = make_params(k1=0.9, mu=3.0)
    s = MeanFieldState(0.5, 0.2, 1.7, rho2=0.9)
    inter = full_two_pop_rhs(s, p, INTER_LAW)
    assert inter[0] == pytest.approx(full_two_pop_rhs(s, make_params(k1=0.9, mu=1.7))[0], abs=1e-15)
    intra = full_two_pop_rhs(s, p, INTRA_LAW)
    assert intra[0] == pytest.approx(full_two_pop_rhs(s, make_params(k1=1.7, mu=3.0))[0], abs=1e-15)


def test_pinned_layer_invariance_under_integration():
    p = make_params(d2=0.0, mu=3.0)
    T = 200.0
    tr = integrate_meanfield(MeanFieldSystem.FULL, p, MeanFieldState(0.9, -0.5, 3.0, rho2=1.0),
                             INTER_LAW, dt=0.01, t_final=T)
    assert np.max(np.abs(tr.R2 - 1.0)) < 1e-9 * T


# --- reduced systems ---

def test_inter_on_manifold_point_is_fixed():
    p = make_params(w1=5.0, w2=5.0, d1=1.0, k1=0.9)
    d = reduced_inter_rhs(MeanFieldState(0.5, 0.0, 0.5 * (2 / 0.75 - 0.9)), p, None)
    assert abs(d[0]) < 1e-12 and abs(d[1]) < 1e-12


def test_inter_decoupled_phase_is_stationary():
    p = make_params(w1=5.0, w2=5.0)
    assert reduced_inter_rhs(MeanFieldState(0.4, 1.2, 0.0), p, None)[1] == 0.0


@given(st.floats(1e-3, 0.999), st.floats(0.01, 2.0), st.floats(0, 0.999))
def test_inter_decays_below_threshold(r, d1, frac):
    k1 = frac * 2 * d1
    p = make_params(d1=d1, k1=k1, w1=5.0, w2=5.0)
    assert reduced_inter_rhs(MeanFieldState(r, 0.3, 0.0), p, None)[0] < 0


@given(st.floats(0.01, 0.99), st.floats(-6, 6), st.floats(-2, 4), st.floats(-2, 3),
       st.floats(0.01, 2), st.floats(-0.5, 0.5))
def test_reduced_fields_match_oracle(r, psi, k1, mu, d1, omega):
    p = make_params(d1=d1, w1=5.0, w2=5.0 + omega, k1=k1, mu=mu)
    ref = fast_field(r, psi, k1, mu, d1, omega)
    inter = reduced_inter_rhs(MeanFieldState(r, psi, mu), p, None)
    intra = reduced_intra_rhs(MeanFieldState(r, psi, k1), p, None)
    tol = 1e-12 * max(1.0, abs(ref[1]))
    assert np.allclose(inter[:2], ref, atol=tol) and np.allclose(intra[:2], ref, atol=tol)


def test_intra_on_lower_branch_is_fixed():
    p = make_params(w1=5.0, w2=5.0, d1=1.0, mu=0.3)
    d = reduced_intra_rhs(MeanFieldState(0.5, 0.0, 2 / 0.75 - 0.3 / 0.5), p, None)
    assert abs(d[0]) < 1e-12


def test_intra_decoupled_drift():
    p = make_params(w1=5.0, w2=5.25, mu=0.0)
    assert reduced_intra_rhs(MeanFieldState(0.4, 1.0, 2.0), p, None)[1] == pytest.approx(-0.25)


def test_intra_frozen_without_law():
    p = make_params(mu=0.3)
    tr = integrate_meanfield(MeanFieldSystem.INTRA, p, MeanFieldState(0.6, 0.0, 3.5), None, t_final=20.0)
    assert np.all(tr.coupling == 3.5)


def test_rho_floor_freezes_phase():
    diag = Diagnostics()
    p = make_params(mu=1.0)
    d = reduced_inter_rhs(MeanFieldState(1e-8, 1.0, 1.0), p, None, diag)
    assert d[1] == 0.0 and diag.floor_count == 1


# --- integration ---

def test_stationary_inter_equilibrium_reached():
    p = make_params()
    tr = integrate_meanfield(MeanFieldSystem.INTER, p, MeanFieldState(0.99, -0.5, 3.0), INTER_LAW,
                             t_final=600.0)
    assert tr.R1[-1] == pytest.approx(0.2231166, abs=1e-4)
    assert tr.coupling[-1] == pytest.approx(0.2688340, abs=1e-3)
    assert tr.clamp_count == 0 and tr.floor_count == 0


def test_full_system_tracks_reduced():
    p = make_params()
    init = MeanFieldState(0.99, -0.5, 3.0, rho2=0.99)
    red = integrate_meanfield(MeanFieldSystem.INTER, p, init, INTER_LAW, t_final=600.0)
    full = integrate_meanfield(MeanFieldSystem.FULL, p, init, INTER_LAW, t_final=600.0)
    after = slice(len(red) // 5, None)
    assert np.max(np.abs(red.R1[after] - full.R1[after])) < 0.02


def test_rk4_order_on_smooth_case():
    p = make_params()
    init = MeanFieldState(0.9, -0.5, 3.0)

    def r1(dt):
        return integrate_meanfield(MeanFieldSystem.INTER, p, init, INTER_LAW, dt=dt, t_final=8.0,
                                   record_stride=int(round(0.4 / dt))).R1

    ref = r1(0.0125)
    e1 = np.max(np.abs(r1(0.1) - ref))
    e2 = np.max(np.abs(r1(0.05) - ref))
    assert 3.5 < math.log2(e1 / e2) < 4.5


def test_general_system_integrates():
    mp = MultiPopulationParams([[2.0]], [0.5], [1.0])
    tr = integrate_meanfield(MeanFieldSystem.GENERAL, mp, GeneralMeanFieldState([0.2], [0.0]),
                             t_final=60.0)
    assert tr.R1[-1] == pytest.approx(math.sqrt(0.5), abs=1e-6)
    assert np.isnan(tr.R2[-1])


def test_clamp_counted_near_synchrony():
    # identical oscillators with strong coupling push rho to 1 within one step
    p = make_params(d1=0.0, k1=500.0, w1=5.0, w2=5.0)
    tr = integrate_meanfield(MeanFieldSystem.INTER, p, MeanFieldState(0.999999, 0.0, 0.0), None,
                             dt=0.05, t_final=1.0)
    assert tr.clamp_count > 0
    assert np.all(tr.R1 <= 1.0 - 1e-12)


def test_law_target_must_match_system():
    with pytest.raises(ValueError):
        integrate_meanfield(MeanFieldSystem.INTRA, make_params(), MeanFieldState(0.5, 0, 1), INTER_LAW,
                            t_final=1.0)


def test_periodic_drive_gets_fast_time():
    law = AdaptiveLawSpec(Target.INTER, 0.02, PeriodicDrive(1.0, 0.02))
    tr = integrate_meanfield(MeanFieldSystem.INTER, make_params(), MeanFieldState(0.99, -0.5, 1.1), law,
                             t_final=100.0)
    assert np.allclose(tr.coupling, 1.1 + np.sin(0.02 * tr.times), atol=1e-9)


def test_constant_law_keeps_coupling():
    law = AdaptiveLawSpec(Target.INTER, 0.02, Constant())
    tr = integrate_meanfield(MeanFieldSystem.INTER, make_params(), MeanFieldState(0.5, 0.0, 1.0), law,
                             t_final=10.0)
    assert np.all(tr.coupling == 1.0)
