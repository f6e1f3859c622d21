"""Split-step integrator of the forward/backward no-jump equations.

Cross-checks every reported number against the closed-form engine and pins the
structural invariants: norm bookkeeping, exact adjoint stepping (constant
overlap), and the center-of-mass delay identities.
"""

import math

import numpy as np
import pytest

from dwelltime import spectral, timedomain
from dwelltime.domain import (
    GaussianPulse,
    NarrowBandPulse,
    TabulatedSpectrumPulse,
    make_gaussian_pulse,
    make_uniform_medium,
)
from dwelltime.errors import (
    InvalidParameterError,
    OracleBudgetError,
    UndefinedConditionalError,
    UnsupportedVariantError,
)

PULSE = make_gaussian_pulse(1.0)
MEDIUM = make_uniform_medium(2.0)


@pytest.fixture(scope="module")
def run_default():
    fwd = timedomain.integrate_forward(PULSE, MEDIUM)
    bwd = timedomain.integrate_backward(fwd, MEDIUM)
    return fwd, bwd


class TestGridSpec:
    def test_rejects_narrowband(self):
        with pytest.raises(UnsupportedVariantError):
            timedomain.GridSpec.build(NarrowBandPulse(0.0), MEDIUM)

    def test_rejects_coarse_medium(self):
        with pytest.raises(InvalidParameterError):
            timedomain.GridSpec.build(PULSE, MEDIUM, cells_per_medium=10)

    def test_geometry(self):
        grid = timedomain.GridSpec.build(PULSE, MEDIUM)
        assert grid.dt == grid.dz
        assert grid.z_centers.size == grid.n_cells
        # monitor sits just past the exit face
        z_mon = grid.z_centers[grid.i_monitor]
        assert MEDIUM.length < z_mon < MEDIUM.length + 2 * grid.dz
        # right buffer outruns the light cone: no outflow for the whole run
        assert grid.n_cells - grid.i_monitor >= grid.max_steps

    def test_initial_pulse_fits_left_of_medium(self):
        grid = timedomain.GridSpec.build(PULSE, MEDIUM)
        zc = grid.z_centers
        a0 = PULSE.time_amplitude(grid.t_start - zc)
        inside = slice(grid.i_med0, grid.i_med0 + grid.n_med)
        assert np.max(np.abs(a0[inside])) < 1e-7 * np.max(np.abs(a0))


class TestForward:
    def test_transmission_matches_spectral(self, run_default):
        fwd, _ = run_default
        p_ref, _ = spectral.transmission_probability(PULSE, MEDIUM)
        assert fwd.p_t == pytest.approx(p_ref, rel=1e-4)

    def test_norm_bookkeeping(self, run_default):
        fwd, _ = run_default
        assert fwd.bookkeeping_dev < 1e-5

    def test_average_dwell_matches_spectral(self, run_default):
        fwd, _ = run_default
        ref = spectral.tau_avg(PULSE, MEDIUM)
        assert timedomain.tau_avg_td(fwd) == pytest.approx(ref, rel=1e-4)

    def test_input_com_centered(self, run_default):
        fwd, _ = run_default
        assert abs(fwd.input_com) < 1e-9

    def test_scattered_cum_monotone(self, run_default):
        fwd, _ = run_default
        assert np.all(np.diff(fwd.scattered_cum) >= -1e-15)
        assert fwd.scattered_cum[-1] == pytest.approx(1.0 - fwd.p_t, rel=1e-4)


class TestBackward:
    def test_overlap_constant(self, run_default):
        _, bwd = run_default
        ov = bwd.overlap
        assert np.max(np.abs(ov - ov[-1])) < 1e-10

    def test_transmitted_time_matches_spectral(self, run_default):
        fwd, bwd = run_default
        ref = spectral.tau_T(PULSE, MEDIUM)
        assert timedomain.tau_T_td(fwd, bwd) == pytest.approx(ref, rel=1e-3)

    def test_weak_trace_shape(self, run_default):
        fwd, bwd = run_default
        times, phi = timedomain.weak_trace(fwd, bwd)
        assert times.shape == phi.shape
        assert phi.dtype.kind == "f"
        peak = np.max(np.abs(phi))
        assert abs(phi[0]) < 1e-10 * peak and abs(phi[-1]) < 1e-8 * peak

    def test_probe_strength_scales_linearly(self, run_default):
        from dwelltime.domain import WeakProbeConfig
        fwd, bwd = run_default
        _, phi1 = timedomain.weak_trace(fwd, bwd, WeakProbeConfig(1.0))
        _, phi3 = timedomain.weak_trace(fwd, bwd, WeakProbeConfig(3.0))
        np.testing.assert_allclose(phi3, 3.0 * phi1, rtol=0, atol=1e-14)

    def test_rejects_mismatched_histories(self, run_default):
        fwd, _ = run_default
        with pytest.raises(InvalidParameterError):
            timedomain.weak_trace(fwd, fwd)


class TestCenterOfMass:
    def test_transmitted_com_equals_weak_value_time(self, run_default):
        """The transmitted pulse is delayed by exactly the conditioned dwell time."""
        fwd, bwd = run_default
        transmitted, _ = timedomain.com_delays(fwd, include_scattered=False)
        assert transmitted == pytest.approx(timedomain.tau_T_td(fwd, bwd), rel=1e-3, abs=1e-5)

    def test_scattered_com_equals_tau_s(self, run_default):
        """Emission events at (Z, T) average to the scattered dwell time."""
        fwd, _ = run_default
        _, scattered = timedomain.com_delays(fwd)
        assert scattered == pytest.approx(spectral.tau_S(PULSE, MEDIUM), rel=1e-3)

    def test_scattered_skipped_on_request(self, run_default):
        fwd, _ = run_default
        _, scattered = timedomain.com_delays(fwd, include_scattered=False)
        assert math.isnan(scattered)

    def test_backward_history_rejected(self, run_default):
        _, bwd = run_default
        with pytest.raises(InvalidParameterError):
            timedomain.com_delays(bwd)


class TestDelayReportTd:
    def test_report_recombines_exactly(self, run_default):
        rep = timedomain.delay_report_td(PULSE, MEDIUM)
        assert rep.method == "timedomain"
        lhs = rep.P_S * rep.tau_S + rep.P_T * rep.tau_T
        assert lhs == pytest.approx(rep.tau_0, rel=1e-12)
        assert rep.od_eff == pytest.approx(-math.log(rep.P_T), rel=1e-12)
        assert math.isnan(rep.t_g)

    def test_report_matches_analytic_engine(self):
        ana = spectral.delay_report(PULSE, MEDIUM)
        num = timedomain.delay_report_td(PULSE, MEDIUM)
        assert num.P_T == pytest.approx(ana.P_T, rel=1e-4)
        assert num.tau_T == pytest.approx(ana.tau_T, rel=1e-3)
        assert num.tau_S == pytest.approx(ana.tau_S, rel=1e-3)


class TestEmptyMedium:
    def test_everything_transmits(self):
        m0 = make_uniform_medium(0.0)
        fwd = timedomain.integrate_forward(PULSE, m0)
        assert fwd.p_t == pytest.approx(1.0, abs=1e-9)
        with pytest.raises(UndefinedConditionalError):
            timedomain.com_delays(fwd)
        with pytest.raises(UndefinedConditionalError):
            timedomain.tau_S_oracle(fwd, m0)


@pytest.fixture(scope="module")
def coarse():
    medium = make_uniform_medium(1.0)
    grid = timedomain.GridSpec.build(PULSE, medium, cells_per_medium=60)
    return timedomain.integrate_forward(PULSE, medium, grid), medium


class TestScatteredOracle:
    def test_event_average_matches_sum_rule(self, coarse):
        fwd, medium = coarse
        got = timedomain.tau_S_oracle(fwd, medium)
        assert got == pytest.approx(spectral.tau_S(PULSE, medium), rel=1e-2)

    def test_budget_guard(self, coarse):
        fwd, medium = coarse
        with pytest.raises(OracleBudgetError):
            timedomain.tau_S_oracle(fwd, medium, max_gmacs=1e-6)


def test_tabulated_pulse_integrates():
    ref = GaussianPulse(1.0, 0.0)
    w = np.linspace(-9.0, 9.0, 4001)
    tab = TabulatedSpectrumPulse(w, ref.spectral_amplitude(w))
    medium = make_uniform_medium(1.0)
    grid = timedomain.GridSpec.build(tab, medium, cells_per_medium=60)
    fwd = timedomain.integrate_forward(tab, medium, grid)
    p_ref, _ = spectral.transmission_probability(ref, medium)
    assert fwd.p_t == pytest.approx(p_ref, rel=1e-3)
