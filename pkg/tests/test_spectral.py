"""Closed-form frequency-domain engine against independently computed values.

The numbers in FROZEN were produced by standalone high-precision quadrature
scripts before this module existed and are pinned here verbatim.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dwelltime import spectral
from dwelltime.domain import (
    GaussianPulse,
    NarrowBandPulse,
    TabulatedSpectrumPulse,
    make_gaussian_pulse,
    make_uniform_medium,
)
from dwelltime.errors import (
    InvalidParameterError,
    NumericError,
    UndefinedConditionalError,
    UnsupportedVariantError,
)

# (sigma, detuning, od0) -> {P_T, tau_T, tau_S, [od_eff]}; sigma None = narrow-band
FROZEN = [
    (1.0, 0.0, 0.5, dict(P_T=0.7268948363663614, tau_T=-0.14665892101766855,
                         tau_S=1.3903463815053060)),
    (1.0, 0.0, 1.0, dict(P_T=0.5379858683679452, tau_T=-0.2432256292104671,
                         tau_S=1.2832206687659128)),
    (1.0, 0.0, 2.0, dict(P_T=0.3110950959672883, tau_T=-0.3009778644636860,
                         tau_S=1.1359153303761557)),
    (1.0, 0.0, 5.0, dict(P_T=0.0875201981054383, tau_T=0.1355281423641520,
                         tau_S=0.9870008630942351)),
    (0.05, 0.0, 0.1, dict(P_T=0.9941284433276833, tau_T=-8.6199344159177e-5,
                          tau_S=1.0145946338607029, od_eff=0.0058888620340519)),
    (0.05, 0.0, 1800.0, dict(P_T=0.0498701290043493, tau_T=1.4968742609264131,
                             tau_S=0.9214325169911093, od_eff=2.9983330726147521)),
    (0.05, 0.0, 5000.0, dict(P_T=0.0067480620521450, tau_T=2.4971247654396656,
                             tau_S=0.9830347646701300, od_eff=4.9984999187056963)),
    (0.05, 0.0, 12800.0, dict(P_T=3.3593471381590094e-4, tau_T=3.9972655402778063,
                              tau_S=0.9986567284931514, od_eff=7.9985937209999033)),
    (0.5, 1.3, 3.0, dict(P_T=0.5901675322907900, tau_T=0.1638476777325195,
                         tau_S=0.7640558343767243)),
    (3.0, 0.0, 2.0, dict(P_T=0.1644193148361657, tau_T=-1.4447858309624736)),
    (0.02, -2.0, 20.0, dict(P_T=0.8831344018850662, tau_T=0.0601921069578044,
                            tau_S=0.5451379941246395)),
    (None, 0.7, 3.0, dict(P_T=0.3629415367353997, tau_T=0.3287070854638422,
                          tau_S=0.8127307592419351)),
]


def _pulse(sigma, detuning):
    return NarrowBandPulse(detuning) if sigma is None else GaussianPulse(sigma, detuning)


@pytest.mark.parametrize("sigma,detuning,od0,expect", FROZEN,
                         ids=[f"s{s}_d{d}_od{o}" for s, d, o, _ in FROZEN])
def test_frozen_reference_values(sigma, detuning, od0, expect):
    pulse = _pulse(sigma, detuning)
    medium = make_uniform_medium(od0)
    p_t, p_s = spectral.transmission_probability(pulse, medium)
    assert p_t == pytest.approx(expect["P_T"], rel=5e-9)
    assert p_t + p_s == pytest.approx(1.0, abs=1e-12)
    assert spectral.tau_T(pulse, medium) == pytest.approx(expect["tau_T"], rel=5e-9, abs=1e-12)
    if "tau_S" in expect:
        assert spectral.tau_S(pulse, medium) == pytest.approx(expect["tau_S"], rel=5e-9)
    if "od_eff" in expect:
        assert spectral.effective_od(pulse, medium) == pytest.approx(expect["od_eff"], rel=5e-9)


class TestClosedForms:
    def test_group_delay_formula(self):
        # -od0 (1 - 4 d^2) / (1 + 4 d^2)^2; vanishes at |detuning| = 1/2
        assert spectral.group_delay(0.0, 3.0) == -3.0
        assert spectral.group_delay(0.5, 7.0) == 0.0
        assert spectral.group_delay(-0.5, 7.0) == 0.0
        assert spectral.group_delay(1.0, 2.0) == pytest.approx(2.0 * 3.0 / 25.0)

    def test_wigner_delay_is_twice_lorentzian(self):
        assert spectral.wigner_delay(0.0) == 2.0
        assert spectral.wigner_delay(0.5) == pytest.approx(1.0)

    def test_medium_response_attenuation_and_phase(self):
        m = make_uniform_medium(4.0)
        od, phase = spectral.medium_response(m, 0.5, 1.0)
        assert od == pytest.approx(2.0 / 5.0, rel=1e-12)
        assert phase == pytest.approx(-1.0 * od, rel=1e-12)

    def test_narrowband_tau_t_is_group_delay(self):
        for d, od0 in ((0.0, 1.0), (0.7, 3.0), (-1.4, 12.0)):
            got = spectral.tau_T(NarrowBandPulse(d), make_uniform_medium(od0))
            assert got == spectral.group_delay(d, make_uniform_medium(od0).od0)

    def test_narrowband_scattered_formula(self):
        # tau_S = 1 - t_g / (exp(x) - 1), x the absorbed depth at the carrier
        d, od0 = 0.7, 3.0
        x = od0 * spectral.lorentzian(d)
        want = 1.0 - spectral.group_delay(d, od0) / math.expm1(x)
        got = spectral.tau_S(NarrowBandPulse(d), make_uniform_medium(od0))
        assert got == pytest.approx(want, rel=1e-14)

    def test_narrowband_transmission(self):
        d, od0 = 0.7, 3.0
        p_t, _ = spectral.transmission_probability(NarrowBandPulse(d), make_uniform_medium(od0))
        assert p_t == pytest.approx(math.exp(-od0 * spectral.lorentzian(d)), rel=1e-14)

    def test_both_transmitted_time_routes_agree(self):
        for sigma, d, od0 in ((1.0, 0.0, 2.0), (0.2, 1.1, 8.0), (4.0, -0.3, 0.7)):
            kernel, weighted = spectral.tau_T_forms(GaussianPulse(sigma, d), make_uniform_medium(od0))
            assert kernel == pytest.approx(weighted, abs=5e-13)

    def test_scattered_delay_matches_tau_s(self):
        for sigma, d, od0 in ((1.0, 0.0, 1.0), (0.3, 0.8, 6.0)):
            p, m = GaussianPulse(sigma, d), make_uniform_medium(od0)
            assert spectral.scattered_delay(p, m) == pytest.approx(spectral.tau_S(p, m), rel=1e-9)

    def test_scattered_delay_against_numeric_inner_integral(self):
        # independent route: emission-depth integral evaluated by brute quadrature
        for d, od0 in ((0.0, 2.0), (1.1, 5.0)):
            closed = spectral.tau_S(NarrowBandPulse(d), make_uniform_medium(od0))
            numeric = spectral.scattered_delay_quadrature(d, od0)
            assert closed == pytest.approx(numeric, rel=1e-7)


class TestEffectiveDepth:
    def test_narrowband_effective_depth_closed_form(self):
        assert spectral.effective_od(NarrowBandPulse(0.0), make_uniform_medium(3.0)) == \
            pytest.approx(3.0, rel=1e-14)
        got = spectral.effective_od(NarrowBandPulse(1.0), make_uniform_medium(3.0))
        assert got == pytest.approx(3.0 / 5.0, rel=1e-14)

    def test_inversion_round_trip(self):
        p = make_gaussian_pulse(0.5)
        od0 = spectral.invert_od_eff(p, 1.7)
        assert spectral.effective_od(p, make_uniform_medium(od0)) == pytest.approx(1.7, abs=1e-8)

    def test_inversion_rejects_negative_target(self):
        with pytest.raises(InvalidParameterError):
            spectral.invert_od_eff(make_gaussian_pulse(1.0), -0.1)

    def test_effective_depth_never_exceeds_resonant_depth(self):
        for sigma, od0 in ((0.05, 30.0), (1.0, 5.0), (10.0, 1.0)):
            p, m = make_gaussian_pulse(sigma), make_uniform_medium(od0)
            assert spectral.effective_od(p, m) <= od0 + 1e-12


class TestDelayReport:
    def test_gaussian_report_structure(self):
        rep = spectral.delay_report(make_gaussian_pulse(1.0), make_uniform_medium(2.0))
        assert rep.method == "analytic"
        assert math.isnan(rep.t_g) and math.isnan(rep.t_W) and math.isnan(rep.t_S)
        assert rep.od_eff == pytest.approx(-math.log(rep.P_T), rel=1e-12)
        assert rep.tau_0 == pytest.approx(rep.P_S, abs=1e-12)

    def test_narrowband_report_has_finite_delays(self):
        rep = spectral.delay_report(NarrowBandPulse(0.7), make_uniform_medium(3.0))
        assert rep.t_g == spectral.group_delay(0.7, 3.0)
        assert rep.t_W == spectral.wigner_delay(0.7)
        assert rep.t_S == pytest.approx(rep.tau_S, rel=1e-12)

    def test_empty_medium_leaves_conditional_nan(self):
        rep = spectral.delay_report(make_gaussian_pulse(1.0), make_uniform_medium(0.0))
        assert rep.P_T == pytest.approx(1.0, abs=1e-12)
        assert rep.tau_T == pytest.approx(0.0, abs=1e-12)
        assert math.isnan(rep.tau_S)

    def test_tau_s_raises_without_scattering(self):
        with pytest.raises(UndefinedConditionalError):
            spectral.tau_S(make_gaussian_pulse(1.0), make_uniform_medium(0.0))


class TestFields:
    def test_forward_fields_boundary_values(self):
        p, m = make_gaussian_pulse(1.0), make_uniform_medium(2.0)
        grid = spectral.FrequencyGrid.for_pulse(p)
        f = spectral.forward_fields(p, m, grid)
        np.testing.assert_allclose(f.alpha_fwd[0], p.spectral_amplitude(f.omegas), rtol=1e-12)
        # exit density integrates to P_T
        p_t, _ = spectral.transmission_probability(p, m)
        got = np.trapezoid(np.abs(f.alpha_fwd[-1]) ** 2, f.omegas)
        assert got == pytest.approx(p_t, rel=1e-9)

    def test_excitation_ratio_and_adjoint_pole(self):
        p, m = make_gaussian_pulse(1.0), make_uniform_medium(2.0)
        grid = spectral.FrequencyGrid.for_pulse(p)
        f = spectral.forward_fields(p, m, grid)
        w = f.omegas
        np.testing.assert_allclose(f.beta_fwd[3], 1j * m.g0 / (1j * w + 0.5) * f.alpha_fwd[3],
                                   rtol=1e-12)
        p_t, _ = spectral.transmission_probability(p, m)
        b = spectral.backward_fields(f, m, p_t)
        np.testing.assert_allclose(b.beta_back[3], 1j * m.g0 / (1j * w - 0.5) * b.alpha_back[3],
                                   rtol=1e-12)

    def test_weak_value_from_fields_reproduces_tau_t(self):
        """Integrating conj(beta_back) * beta_fwd over the medium and spectrum,
        normalized by the final overlap, is the transmitted dwell time."""
        p, m = make_gaussian_pulse(1.0), make_uniform_medium(2.0)
        grid = spectral.FrequencyGrid.for_pulse(p, count=8192)
        f = spectral.forward_fields(p, m, grid, z_points=129)
        p_t, _ = spectral.transmission_probability(p, m)
        b = spectral.backward_fields(f, m, p_t)
        cross = np.conj(b.beta_back) * b.beta_fwd
        num = np.trapezoid(np.trapezoid(cross, b.omegas, axis=1), b.z).real
        den = np.trapezoid((np.conj(b.alpha_back[-1]) * b.alpha_fwd[-1]).real, b.omegas)
        assert num / den == pytest.approx(spectral.tau_T(p, m), rel=1e-9)

    def test_narrowband_fields_unsupported(self):
        m = make_uniform_medium(1.0)
        grid = spectral.FrequencyGrid.for_pulse(make_gaussian_pulse(1.0))
        with pytest.raises(UnsupportedVariantError):
            spectral.forward_fields(NarrowBandPulse(0.0), m, grid)


class TestAsymptotics:
    def test_transmission_limits_bracket_exact(self):
        p = make_gaussian_pulse(0.05)
        m_lo, m_hi = make_uniform_medium(0.1), make_uniform_medium(1800.0)
        a_lo = spectral.asymptotics(p, m_lo)
        exact_lo, _ = spectral.transmission_probability(p, m_lo)
        assert a_lo.pt_low_od == pytest.approx(exact_lo, rel=1e-3)
        a_hi = spectral.asymptotics(p, m_hi)
        exact_hi, _ = spectral.transmission_probability(p, m_hi)
        assert a_hi.pt_high_od == pytest.approx(exact_hi, rel=5e-3)

    def test_warns_outside_bandwidth_window(self):
        with pytest.warns(UserWarning):
            spectral.asymptotics(make_gaussian_pulse(1.0), make_uniform_medium(1.0))

    def test_narrowband_has_no_asymptotics(self):
        with pytest.raises(UnsupportedVariantError):
            spectral.asymptotics(NarrowBandPulse(0.0), make_uniform_medium(1.0))

    def test_dilute_transmitted_form_needs_tiny_bandwidth(self):
        """At sigma = 0.05 the quadratic-depth form misses even its own sign;
        the window check therefore probes it at sigma = 5e-4."""
        p, m = make_gaussian_pulse(0.05), make_uniform_medium(0.1)
        exact = spectral.tau_T(p, m)
        approx = spectral.asymptotics(p, m).tau_t_low_od
        assert exact < 0 < approx  # fractional error above 1, by a wide margin
        p_tiny = make_gaussian_pulse(5e-4)
        m = make_uniform_medium(0.06)
        exact = spectral.tau_T(p_tiny, m)
        approx = spectral.asymptotics(p_tiny, m).tau_t_low_od
        assert approx == pytest.approx(exact, rel=0.1)


class TestTabulatedSpectrum:
    def test_dense_gaussian_table_matches_closed_form(self):
        ref = GaussianPulse(1.0, 0.3)
        w = np.linspace(0.3 - 9.0, 0.3 + 9.0, 20001)
        tab = TabulatedSpectrumPulse(w, ref.spectral_amplitude(w))
        m = make_uniform_medium(2.0)
        assert spectral.tau_T(tab, m) == pytest.approx(spectral.tau_T(ref, m), rel=1e-6)
        assert spectral.tau_S(tab, m) == pytest.approx(spectral.tau_S(ref, m), rel=1e-6)

    def test_chirped_spectrum_still_satisfies_sum_rule(self):
        w = np.linspace(-8.0, 8.0, 8001)
        tab = TabulatedSpectrumPulse(w, np.exp(-(w**2)) * np.exp(1j * 0.4 * w**2))
        m = make_uniform_medium(3.0)
        p_t, p_s = spectral.transmission_probability(tab, m)
        lhs = p_s * spectral.tau_S(tab, m) + p_t * spectral.tau_T(tab, m)
        assert lhs == pytest.approx(spectral.tau_avg(tab, m), rel=1e-9)


def test_quadrature_cap_raises():
    # oscillation far below any affordable panel size never stabilizes
    def rows(w):
        return np.stack([np.cos(1e8 * w).astype(complex)])

    with pytest.raises(NumericError):
        spectral.converge_trapezoid(rows, 0.0, 20.0, tol=1e-12)


def test_frequency_grid_validation():
    with pytest.raises(InvalidParameterError):
        spectral.FrequencyGrid(np.linspace(-1, 1, 1002))  # odd panel count
    grid = spectral.FrequencyGrid.for_pulse(make_gaussian_pulse(1.0), count=2048)
    assert grid.count == 2048
    assert grid.half_width == pytest.approx(20.0)


# --- property-based invariants --------------------------------------------

sigmas = st.floats(0.05, 20.0)
detunings = st.floats(-3.0, 3.0)
depths = st.floats(1e-3, 20.0)


@given(sigmas, detunings, depths)
@settings(max_examples=40, deadline=None)
def test_probabilities_partition_unity(sigma, detuning, od0):
    p_t, p_s = spectral.transmission_probability(GaussianPulse(sigma, detuning),
                                                 make_uniform_medium(od0))
    assert 0.0 < p_t <= 1.0
    assert abs(p_t + p_s - 1.0) < 1e-12


@given(sigmas, detunings, depths)
@settings(max_examples=40, deadline=None)
def test_outcome_times_recombine(sigma, detuning, od0):
    p, m = GaussianPulse(sigma, detuning), make_uniform_medium(od0)
    p_t, p_s = spectral.transmission_probability(p, m)
    lhs = p_s * spectral.tau_S(p, m) + p_t * spectral.tau_T(p, m)
    assert lhs == pytest.approx(p_s, rel=1e-9, abs=1e-12)


@given(sigmas, detunings, depths)
@settings(max_examples=30, deadline=None)
def test_detuning_sign_symmetry(sigma, detuning, od0):
    m = make_uniform_medium(od0)
    a = spectral.tau_T(GaussianPulse(sigma, detuning), m)
    b = spectral.tau_T(GaussianPulse(sigma, -detuning), m)
    assert a == pytest.approx(b, rel=1e-10, abs=1e-12)


@given(sigmas, detunings, depths, depths)
@settings(max_examples=30, deadline=None)
def test_transmission_decreases_with_depth(sigma, detuning, od_a, od_b):
    lo, hi = sorted((od_a, od_b))
    p = GaussianPulse(sigma, detuning)
    pt_lo, _ = spectral.transmission_probability(p, make_uniform_medium(lo))
    pt_hi, _ = spectral.transmission_probability(p, make_uniform_medium(hi))
    assert pt_hi <= pt_lo + 1e-12


@given(sigmas, detunings, depths)
@settings(max_examples=30, deadline=None)
def test_conditional_times_bounded(sigma, detuning, od0):
    """tau_S lives in (0, 2/Gamma]; |tau_T| never exceeds the resonant depth."""
    p, m = GaussianPulse(sigma, detuning), make_uniform_medium(od0)
    tau_s = spectral.tau_S(p, m)
    assert 0.0 < tau_s <= 2.0 + 1e-9
    assert abs(spectral.tau_T(p, m)) <= od0 + 1e-9
