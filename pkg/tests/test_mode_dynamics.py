import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kzchain.mode_dynamics import (BlochState, ModeEnsemble, ground_state_bloch,
                                   evolve_continuous, run_quench,
                                   trotter_step_mode)
from kzchain.protocol import (Evolution, QuenchProtocol, Variant, momentum_grid,
                              pseudo_field, schedule_at)


class TestGroundState:
    def test_initial_state_points_up(self):
        # at t = -tau_q the field is (0, 0, 4) so n = z-hat
        f = pseudo_field(1.0, 0.0, 2.0)
        np.testing.assert_allclose(ground_state_bloch(f), [0.0, 0.0, 1.0])

    @given(st.floats(0.05, 3.1), st.floats(0.0, 2.0))
    def test_unit_norm(self, k, j):
        f = pseudo_field(k, j, 2.0 - j)
        n = ground_state_bloch(f)
        assert np.linalg.norm(n) == pytest.approx(1.0, abs=1e-12)


class TestContinuousEvolution:
    def test_adiabatic_limit_follows_ground_state(self):
        # slow quench on a gapped mode: n(t) stays close to h(t)/|h(t)|
        p = QuenchProtocol(tau_q=200.0)
        k = 2.0  # large gap
        (state,) = evolve_continuous(p, 0.0, k, p.t_start, 0.0, [0.0])
        target = ground_state_bloch(pseudo_field(k, 1.0, 1.0))
        assert np.linalg.norm(state.n - target) < 1e-2

    def test_sudden_limit_freezes(self):
        # fast quench: n barely moves from its initial z-hat
        p = QuenchProtocol(tau_q=1e-3)
        (state,) = evolve_continuous(p, 0.0, 0.3, p.t_start, 0.0, [0.0])
        assert state.n[2] > 0.999

    def test_norm_preserved_when_unitary(self):
        p = QuenchProtocol(tau_q=2.0)
        for k in momentum_grid(16).modes:
            (s,) = evolve_continuous(p, 0.0, float(k), p.t_start, 0.0, [0.0])
            assert np.linalg.norm(s.n) == pytest.approx(1.0, abs=1e-8)

    def test_decoherence_shrinks_norm(self):
        p = QuenchProtocol(tau_q=4.0)
        k = float(momentum_grid(64).modes[0])
        (unitary,) = evolve_continuous(p, 0.0, k, p.t_start, 0.0, [0.0])
        (damped,) = evolve_continuous(p, 1.0, k, p.t_start, 0.0, [0.0])
        assert np.linalg.norm(damped.n) < np.linalg.norm(unitary.n) - 1e-3

    def test_landau_zener_excitation(self):
        """Small-k modes obey the Landau-Zener formula at the QCP crossing.

        Near k = 0 the mode reduces to a two-level sweep with minimum gap
        4k and diabatic splitting rate 8/tau_q (both couplings ramp, so the
        distance from criticality closes at twice the single-ramp rate),
        giving excitation probability p_k = exp(-pi*tau_q*k^2); 1 - 2 p_k
        is the projection of n on the final ground state.
        """
        tau_q = 4.0
        p = QuenchProtocol(tau_q=tau_q, variant=Variant.FULL_QUENCH)
        for k in [0.05, 0.1, 0.2]:
            (s,) = evolve_continuous(p, 0.0, k, p.t_start, tau_q, [tau_q])
            sched = schedule_at(p, tau_q)
            target = ground_state_bloch(pseudo_field(k, sched.j, sched.h))
            p_exc = 0.5 * (1.0 - float(np.dot(s.n, target)))
            p_lz = math.exp(-math.pi * tau_q * k * k)
            assert p_exc == pytest.approx(p_lz, abs=0.01)

    def test_interval_validation(self):
        p = QuenchProtocol(tau_q=1.0)
        with pytest.raises(ValueError):
            evolve_continuous(p, 0.0, 0.5, 0.0, -1.0, [0.0])
        with pytest.raises(ValueError):
            evolve_continuous(p, -0.5, 0.5, -1.0, 0.0, [0.0])


class TestTrotterStep:
    @given(st.floats(0.05, 3.1), st.floats(0.0, 2.0), st.floats(0.01, 0.5))
    @settings(max_examples=60)
    def test_step_preserves_norm(self, k, j, dt):
        n = np.array([0.3, -0.5, math.sqrt(1 - 0.34)])
        out = trotter_step_mode(n, k, j, 2.0 - j, dt)
        assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-12)

    def test_many_small_steps_approach_continuous(self):
        tau_q = 2.0
        k = 0.9
        fine = QuenchProtocol(tau_q=tau_q, evolution=Evolution.TROTTER,
                              dt=tau_q / 2000, steps=2000)
        coarse = QuenchProtocol(tau_q=tau_q)
        e_fine = run_quench(fine, 8, lam=0.0)[-1]
        e_cont = run_quench(coarse, 8, lam=0.0, sample_times=[0.0])[0]
        for sf, sc in zip(e_fine.states, e_cont.states):
            assert np.linalg.norm(sf.n - sc.n) < 5e-3


class TestRunQuench:
    def test_ensemble_shape(self, small_quench_ensemble):
        e = small_quench_ensemble
        assert e.n_sites == 8
        assert len(e.states) == 4
        assert e.bloch_array().shape == (4, 3)
        assert e.j == 1.0 and e.h == 1.0

    def test_mode_independence(self):
        # a mode's trajectory is identical solved alone or in the ensemble
        p = QuenchProtocol(tau_q=1.5)
        e = run_quench(p, 12, lam=0.3, sample_times=[0.0])[0]
        k = float(e.grid.modes[2])
        (alone,) = evolve_continuous(p, 0.3, k, p.t_start, 0.0, [0.0])
        np.testing.assert_array_equal(e.states[2].n, alone.n)

    def test_trotter_rejects_decoherence(self, small_trotter_protocol):
        with pytest.raises(ValueError):
            run_quench(small_trotter_protocol, 8, lam=0.5)

    def test_trotter_rejects_sample_times(self, small_trotter_protocol):
        with pytest.raises(ValueError):
            run_quench(small_trotter_protocol, 8, lam=0.0, sample_times=[0.0])

    def test_trotter_samples_all_step_boundaries(self, small_trotter_protocol):
        ensembles = run_quench(small_trotter_protocol, 8, lam=0.0)
        times = [e.t for e in ensembles]
        np.testing.assert_allclose(times, small_trotter_protocol.step_times())

    def test_states_grid_mismatch_rejected(self):
        grid = momentum_grid(8)
        with pytest.raises(ValueError):
            ModeEnsemble(grid=grid, states=[BlochState(k=0.1, n=np.zeros(3))],
                         t=0.0, lam=0.0, j=1.0, h=1.0)
