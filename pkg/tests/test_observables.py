import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kzchain.correlators import fermion_correlators
from kzchain.mode_dynamics import (BlochState, ModeEnsemble,
                                   ground_state_bloch, run_quench)
from kzchain.observables import (RunRecord, defect_density, excess_energy,
                                 magnetization_se, power_law_fit, residual_energy,
                                 run_record, shot_error_floor, total_energy)
from kzchain.protocol import QuenchProtocol, Variant, momentum_grid, pseudo_field


def ground_state_ensemble(n, j, h):
    grid = momentum_grid(n)
    states = [
        BlochState(k=float(k), n=ground_state_bloch(pseudo_field(float(k), j, h)))
        for k in grid.modes
    ]
    return ModeEnsemble(grid=grid, states=states, t=0.0, lam=0.0, j=j, h=h)


class TestEnergy:
    @given(st.floats(0.1, 3.0), st.floats(0.1, 3.0),
           st.sampled_from([4, 8, 10, 16]))
    @settings(max_examples=30, deadline=None)
    def test_ground_state_energy_calibration(self, j, h, n):
        """Vacuum energy must be -h*N + sum_k (h_k^z - |h_k|)."""
        e = ground_state_ensemble(n, j, h)
        k = e.grid.modes
        hy = 2 * j * np.sin(k)
        hz = 2 * h - 2 * j * np.cos(k)
        expected = -h * n + np.sum(hz) - np.sum(np.sqrt(hy**2 + hz**2))
        assert total_energy(e) == pytest.approx(expected, rel=1e-12, abs=1e-12)

    def test_ground_state_residual_vanishes(self):
        e = ground_state_ensemble(16, 1.3, 0.7)
        assert residual_energy(e) == pytest.approx(0.0, abs=1e-12)

    def test_quench_raises_residual(self):
        p = QuenchProtocol(tau_q=1.0)
        e = run_quench(p, 32, lam=0.0, sample_times=[0.0])[0]
        assert residual_energy(e) > 0.1

    def test_residual_is_total_minus_vacuum(self):
        p = QuenchProtocol(tau_q=2.0)
        e = run_quench(p, 32, lam=0.0, sample_times=[0.0])[0]
        vac = ground_state_ensemble(32, 1.0, 1.0)
        assert residual_energy(e) == pytest.approx(
            total_energy(e) - total_energy(vac), rel=1e-10)


class TestEndOfQuenchIdentity:
    def test_residual_energy_counts_defects(self):
        """At t = +tau_q the couplings are (J, h) = (2, 0), a classical
        Ising chain where each kink costs 2J = 4, so E_res/N = 4 n_def."""
        p = QuenchProtocol(tau_q=1.5, variant=Variant.FULL_QUENCH)
        e = run_quench(p, 64, lam=0.0, sample_times=[1.5])[0]
        n_def = defect_density(fermion_correlators(e))
        assert residual_energy(e) / 64 == pytest.approx(4.0 * n_def, abs=1e-10)


class TestExcessEnergy:
    def test_self_comparison_is_zero(self):
        p = QuenchProtocol(tau_q=2.0)
        clean = run_quench(p, 16, lam=0.0, sample_times=[0.0])[0]
        assert excess_energy(clean, clean) == 0.0

    def test_decoherence_heats(self):
        p = QuenchProtocol(tau_q=2.0)
        clean = run_quench(p, 16, lam=0.0, sample_times=[0.0])[0]
        noisy = run_quench(p, 16, lam=0.5, sample_times=[0.0])[0]
        assert excess_energy(noisy, clean) > 0.0

    def test_mismatched_reference_rejected(self):
        p = QuenchProtocol(tau_q=2.0)
        clean = run_quench(p, 16, lam=0.0, sample_times=[0.0])[0]
        noisy = run_quench(p, 16, lam=0.5, sample_times=[0.0])[0]
        with pytest.raises(ValueError):
            excess_energy(clean, noisy)  # reference must be lam = 0
        other = run_quench(QuenchProtocol(tau_q=3.0), 16, lam=0.0,
                           sample_times=[0.0])[0]
        with pytest.raises(ValueError):
            excess_energy(noisy, other)


class TestPowerLawFit:
    @given(st.floats(0.1, 10.0), st.floats(-2.0, 2.0))
    @settings(max_examples=50)
    def test_exact_recovery(self, amp, beta):
        tau = np.array([1.0, 2.0, 4.0, 8.0, 16.0])
        y = amp * tau ** (-beta)
        a_fit, b_fit, rmse = power_law_fit(list(zip(tau, y)))
        assert a_fit == pytest.approx(amp, rel=1e-9)
        assert b_fit == pytest.approx(beta, abs=1e-9)
        assert rmse < 1e-12

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            power_law_fit([(1.0, 1.0), (2.0, -0.5), (3.0, 0.2)])

    def test_rejects_too_few_points(self):
        with pytest.raises(ValueError):
            power_law_fit([(1.0, 1.0), (2.0, 0.5)])


class TestShotNoise:
    def test_floor_scaling(self):
        assert shot_error_floor(10_000) == pytest.approx(0.01)
        assert shot_error_floor(1) == 1.0

    def test_magnetization_se_vanishes_at_saturation(self):
        assert magnetization_se(1.0, 100) == 0.0
        assert magnetization_se(0.0, 400) == pytest.approx(0.05)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            shot_error_floor(0)
        with pytest.raises(ValueError):
            magnetization_se(1.5, 100)


class TestRunRecord:
    def test_assembles_all_samples(self, small_full_quench):
        p, ensembles = small_full_quench
        rec = run_record(ensembles, p)
        assert len(rec.samples) == 2
        s = rec.samples[-1]
        assert s["t"] == pytest.approx(2.0)
        assert s["e_res"] / 8 == pytest.approx(4 * s["n_def"], abs=1e-9)

    def test_negative_residual_rejected(self):
        p = QuenchProtocol(tau_q=1.0)
        rec = RunRecord(protocol=p, n_sites=8, lam=0.0)
        with pytest.raises(ValueError):
            rec.add_sample(t=0.0, m_x=0.5, n_def=0.1, e_total=-1.0, e_res=-1e-6)

    def test_excess_column_filled_with_clean_twin(self):
        p = QuenchProtocol(tau_q=2.0)
        clean = run_quench(p, 16, lam=0.0, sample_times=[0.0])
        noisy = run_quench(p, 16, lam=0.3, sample_times=[0.0])
        rec = run_record(noisy, p, clean=clean)
        assert rec.samples[0]["e_exc"] > 0.0
