"""Closed-form frequency-domain engine for dwell and delay times.

Fourier convention exp(+i w t). All formulas are in internal units c = Gamma = 1;
w is the offset from atomic resonance. The no-jump transmission amplitude through
optical depth od is exp(od * lorentzian(w) * (i*w - 1/2)), whose modulus gives
the familiar exp(-od * lorentzian(w) / 2) attenuation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .domain import (
    GaussianPulse,
    MediumProfile,
    NarrowBandPulse,
    PulseSpec,
    TabulatedSpectrumPulse,
    make_uniform_medium,
    od_integral,
)
from .errors import (
    InvalidParameterError,
    NumericError,
    UndefinedConditionalError,
    UnsupportedVariantError,
)

DEFAULT_TOL = 1e-9
N_START = 1024
N_CAP = 2**20


def lorentzian(omega):
    """Resonance line shape 1 / (1 + (2 w)^2), unit height at w = 0."""
    w = np.asarray(omega, dtype=float)
    return 1.0 / (1.0 + 4.0 * w * w)


def group_delay(detuning, od0):
    """Stationary-phase transmission delay through resonant optical depth od0."""
    d = float(detuning)
    q = 1.0 - 4.0 * d * d
    return -od0 * q / (1.0 + 4.0 * d * d) ** 2


def wigner_delay(detuning):
    """Scattering phase derivative of a single atom, 2 * lorentzian(detuning)."""
    return 2.0 * float(lorentzian(detuning))


def medium_response(medium: MediumProfile, z, omega):
    """Accumulated optical depth and phase at depth z: (od, phase) with phase = -w * od."""
    od_z = od_integral(medium, z)
    w = np.asarray(omega, dtype=float)
    od = od_z * lorentzian(w)
    return od, -w * od


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform quadrature grid, symmetric about the pulse carrier."""

    omegas: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.omegas, dtype=float)
        n = w.size - 1  # panel count
        if n < N_START or n % 2:
            raise InvalidParameterError(f"grid needs an even panel count >= {N_START}, got {n}")
        object.__setattr__(self, "omegas", w)

    @property
    def count(self):
        return self.omegas.size - 1

    @property
    def half_width(self):
        return 0.5 * (self.omegas[-1] - self.omegas[0])

    @classmethod
    def for_pulse(cls, pulse: PulseSpec, count=4096):
        center, half = _spectral_window(pulse)
        return cls(np.linspace(center - half, center + half, count + 1))


def _spectral_window(pulse: PulseSpec):
    """Center and half-width wide enough for both the line and the pulse spectrum."""
    if isinstance(pulse, GaussianPulse):
        return pulse.detuning, max(20.0, 8.0 / pulse.sigma)
    if isinstance(pulse, TabulatedSpectrumPulse):
        lo, hi = pulse.omegas[0], pulse.omegas[-1]
        center = 0.5 * (lo + hi)
        return center, max(20.0, 0.5 * (hi - lo))
    raise UnsupportedVariantError("narrow-band pulses have no quadrature window")


def converge_trapezoid(rows_fn, center, half_width, *, tol=DEFAULT_TOL, grid_n=None):
    """Integrate each row of rows_fn(w) on a doubling uniform grid until stable.

    Stops when every row changes by less than tol * max(|value|, 1) under one
    doubling. grid_n pins the panel count instead (no convergence check).
    Returns (values, panel_count).
    """
    if grid_n is not None:
        w = np.linspace(center - half_width, center + half_width, int(grid_n) + 1)
        return _trapz_rows(rows_fn(w), w), int(grid_n)
    prev = None
    n = N_START
    while n <= N_CAP:
        w = np.linspace(center - half_width, center + half_width, n + 1)
        vals = _trapz_rows(rows_fn(w), w)
        if prev is not None and np.all(np.abs(vals - prev) <= tol * np.maximum(np.abs(vals), 1.0)):
            return vals, n
        prev = vals
        n *= 2
    raise NumericError(f"quadrature not converged at {N_CAP} panels (tol={tol})")


def _trapz_rows(rows, w):
    rows = np.atleast_2d(np.asarray(rows))
    h = w[1] - w[0]
    return h * (rows.sum(axis=1) - 0.5 * (rows[:, 0] + rows[:, -1]))


def _transmission_kernel(omega, od0):
    """Complex response kernel whose real part is the per-frequency group delay."""
    w = np.asarray(omega, dtype=float)
    return (od0 / 4.0) / (w * w - 0.25 - 1j * w)


def _core_integrals(pulse: PulseSpec, medium: MediumProfile, tol, grid_n):
    """Shared quadrature pass: norm, P_T, P_S, tau_0 and both tau_T numerators."""
    od0 = medium.od0
    center, half = _spectral_window(pulse)

    def rows(w):
        dens = pulse.spectral_density(w)
        x = od0 * lorentzian(w)
        trans = np.exp(-x)
        return np.stack(
            [
                dens.astype(complex),
                (dens * trans).astype(complex),
                (dens * -np.expm1(-x)).astype(complex),
                (dens * (1.0 - np.exp(-x))).astype(complex),
                (dens * trans * _group_delay_profile(w, od0)).astype(complex),
                dens * trans * _transmission_kernel(w, od0),
            ]
        )

    vals, n = converge_trapezoid(rows, center, half, tol=tol, grid_n=grid_n)
    norm, pt_raw, ps_raw, tau0_raw, tauw_raw, tauk_raw = vals
    return {
        "norm": norm.real,
        "pt": pt_raw.real / norm.real,
        "ps": ps_raw.real / norm.real,
        "tau0": tau0_raw.real / norm.real,
        "tau_t_weighted": tauw_raw.real / pt_raw.real,
        "tau_t_kernel": tauk_raw.real / pt_raw.real,
        # 0/0 at od0 = 0, where the scattered channel is empty
        "pt_tau_t_over_ps": tauw_raw.real / ps_raw.real if ps_raw.real > 0.0 else math.nan,
        "panels": n,
    }


def _group_delay_profile(w, od0):
    q = 1.0 - 4.0 * w * w
    return -od0 * q / (1.0 + 4.0 * w * w) ** 2


def transmission_probability(pulse: PulseSpec, medium: MediumProfile, *, tol=DEFAULT_TOL, grid_n=None):
    """(P_T, P_S): probabilities that the photon survives or scatters."""
    if isinstance(pulse, NarrowBandPulse):
        x = medium.od0 * float(lorentzian(pulse.detuning))
        return math.exp(-x), -math.expm1(-x)
    core = _core_integrals(pulse, medium, tol, grid_n)
    return core["pt"], core["ps"]


def tau_avg(pulse: PulseSpec, medium: MediumProfile, *, tol=DEFAULT_TOL, grid_n=None):
    """Average excited-state dwell time over all outcomes, (1/Gamma) * P_S."""
    if isinstance(pulse, NarrowBandPulse):
        x = medium.od0 * float(lorentzian(pulse.detuning))
        return 1.0 - math.exp(-x)
    return _core_integrals(pulse, medium, tol, grid_n)["tau0"]


def tau_T_forms(pulse: PulseSpec, medium: MediumProfile, *, tol=DEFAULT_TOL, grid_n=None):
    """Both routes to the transmitted-photon dwell time: (kernel form, weighted form)."""
    if isinstance(pulse, NarrowBandPulse):
        d = pulse.detuning
        kernel = float(np.real(_transmission_kernel(d, medium.od0)))
        return kernel, group_delay(d, medium.od0)
    core = _core_integrals(pulse, medium, tol, grid_n)
    return core["tau_t_kernel"], core["tau_t_weighted"]


def tau_T(pulse: PulseSpec, medium: MediumProfile, *, tol=DEFAULT_TOL, grid_n=None):
    """Excited-state dwell time conditioned on transmission.

    Negative values are allowed: the transmitted weak value of the excitation
    integrates the group delay over the surviving spectrum.
    """
    if isinstance(pulse, NarrowBandPulse):
        return group_delay(pulse.detuning, medium.od0)
    return _core_integrals(pulse, medium, tol, grid_n)["tau_t_weighted"]


def tau_S(pulse: PulseSpec, medium: MediumProfile, *, tol=DEFAULT_TOL, grid_n=None):
    """Excited-state dwell time conditioned on scattering, from the outcome sum rule."""
    if medium.od0 == 0.0:
        raise UndefinedConditionalError("nothing scatters at od0 = 0")
    if isinstance(pulse, NarrowBandPulse):
        d = pulse.detuning
        x = medium.od0 * float(lorentzian(d))
        return 1.0 - group_delay(d, medium.od0) / math.expm1(x)
    core = _core_integrals(pulse, medium, tol, grid_n)
    return 1.0 - core["pt_tau_t_over_ps"]


def scattered_delay(pulse: PulseSpec, medium: MediumProfile, *, tol=DEFAULT_TOL, grid_n=None):
    """Arrival-time delay of the scattered photon relative to free flight.

    Narrow band: closed form. Finite bandwidth: average of the per-frequency
    delay over the scattered part of the spectrum.
    """
    if medium.od0 == 0.0:
        raise UndefinedConditionalError("nothing scatters at od0 = 0")
    od0 = medium.od0
    if isinstance(pulse, NarrowBandPulse):
        return _scattered_delay_point(pulse.detuning, od0)
    center, half = _spectral_window(pulse)

    def rows(w):
        dens = pulse.spectral_density(w)
        weight = dens * -np.expm1(-od0 * lorentzian(w))
        return np.stack([weight, weight * _scattered_delay_point_arr(w, od0)])

    (den, num), _ = converge_trapezoid(rows, center, half, tol=tol, grid_n=grid_n)
    return float(num.real / den.real)


def _scattered_delay_point(detuning, od0):
    return float(_scattered_delay_point_arr(np.asarray(float(detuning)), od0))


def _scattered_delay_point_arr(w, od0):
    line = lorentzian(w)
    q = 1.0 - 4.0 * np.asarray(w, dtype=float) ** 2
    x = od0 * line  # > 0 whenever anything scatters
    return 2.0 * line + q * line * (x / np.expm1(x) - 1.0)


def scattered_delay_quadrature(detuning, od0, n_od=4001):
    """Numeric-inner-integral route to the narrow-band scattered delay (test oracle).

    Averages the group delay over the depth at which the photon is lost,
    weighting each depth by its exponential survival factor.
    """
    if od0 <= 0:
        raise UndefinedConditionalError("nothing scatters at od0 = 0")
    line = float(lorentzian(detuning))
    eta = np.linspace(0.0, od0, int(n_od))
    surv = np.exp(-eta * line)
    tg_unit = group_delay(detuning, 1.0)  # group delay is linear in depth
    num = tg_unit * np.trapezoid(surv * eta, eta)
    den = np.trapezoid(surv, eta)
    return wigner_delay(detuning) + num / den


def effective_od(pulse: PulseSpec, medium: MediumProfile, *, tol=DEFAULT_TOL, grid_n=None):
    """Effective optical depth -ln(P_T) seen by the full pulse spectrum."""
    if isinstance(pulse, NarrowBandPulse):
        return medium.od0 * float(lorentzian(pulse.detuning))
    center, half = _spectral_window(pulse)
    od0 = medium.od0

    def rows(w):
        dens = pulse.spectral_density(w)
        return np.stack([dens, dens * np.exp(-od0 * lorentzian(w))])

    (norm, pt_raw), _ = converge_trapezoid(rows, center, half, tol=tol, grid_n=grid_n)
    return float(-np.log(pt_raw.real / norm.real))


def invert_od_eff(pulse: PulseSpec, od_eff, *, length=1.0, tol=1e-10):
    """Resonant optical depth od0 whose effective depth equals od_eff, by bisection."""
    target = float(od_eff)
    if target < 0:
        raise InvalidParameterError(f"od_eff must be nonnegative, got {target}")
    if target == 0.0:
        return 0.0
    if isinstance(pulse, NarrowBandPulse):
        return target / float(lorentzian(pulse.detuning))

    def f(od0):
        return effective_od(pulse, make_uniform_medium(od0, length))

    # od_eff <= od0 always, so od0 = target is a valid lower bracket
    lo = target
    hi = max(2.0 * target, 1.0)
    while f(hi) < target:
        lo = hi
        hi *= 2.0
        if hi > 1e9:
            raise NumericError(f"no od0 below 1e9 reaches od_eff = {target}")
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class SpectralFields:
    """Per-frequency forward and backward no-jump fields on a (z, w) grid."""

    z: np.ndarray
    omegas: np.ndarray
    alpha_fwd: np.ndarray  # (nz, nw)
    beta_fwd: np.ndarray
    alpha_back: np.ndarray | None = None
    beta_back: np.ndarray | None = None


def forward_fields(pulse: PulseSpec, medium: MediumProfile, grid: FrequencyGrid, z_points=65):
    """Forward no-jump fields: attenuated, phase-shifted pulse and driven excitation."""
    if isinstance(pulse, NarrowBandPulse):
        raise UnsupportedVariantError("spectral fields need a finite-bandwidth pulse")
    w = grid.omegas
    z = np.linspace(0.0, medium.length, int(z_points))
    amp = pulse.spectral_amplitude(w)
    line = lorentzian(w)
    od_z = np.array([od_integral(medium, zi) for zi in z])
    expo = np.outer(od_z, line * (1j * w - 0.5)) - 1j * np.outer(z, w)
    alpha = amp[None, :] * np.exp(expo)
    gz = medium.g_of(z)
    beta = (1j * gz[:, None] / (1j * w + 0.5)[None, :]) * alpha
    return SpectralFields(z=z, omegas=w, alpha_fwd=alpha, beta_fwd=beta)


def backward_fields(fields: SpectralFields, medium: MediumProfile, p_t):
    """Backward (post-selected on transmission) fields added to a forward solution."""
    if not p_t > 0:
        raise UndefinedConditionalError("transmission post-selection needs P_T > 0")
    w = fields.omegas
    z = fields.z
    line = lorentzian(w)
    od_z = np.array([od_integral(medium, zi) for zi in z])
    od0 = medium.od0
    grow = np.exp(np.outer(od_z, line) - od0 * line[None, :])
    alpha_b = fields.alpha_fwd / math.sqrt(p_t) * grow
    gz = medium.g_of(z)
    beta_b = (1j * gz[:, None] / (1j * w - 0.5)[None, :]) * alpha_b
    return SpectralFields(
        z=z,
        omegas=w,
        alpha_fwd=fields.alpha_fwd,
        beta_fwd=fields.beta_fwd,
        alpha_back=alpha_b,
        beta_back=beta_b,
    )


def delay_report(pulse: PulseSpec, medium: MediumProfile, *, tol=DEFAULT_TOL, grid_n=None):
    """Full analytic DelayReport for one case; conditional times are NaN at od0 = 0."""
    from .domain import DelayReport

    nan = float("nan")
    if isinstance(pulse, NarrowBandPulse):
        d = pulse.detuning
        p_t, p_s = transmission_probability(pulse, medium)
        if medium.od0 > 0:
            t_s_cond = tau_S(pulse, medium)
            arrival = _scattered_delay_point(d, medium.od0)
        else:
            t_s_cond, arrival = nan, nan
        return DelayReport(
            P_T=p_t,
            P_S=p_s,
            tau_0=tau_avg(pulse, medium),
            tau_T=group_delay(d, medium.od0),
            tau_S=t_s_cond,
            t_g=group_delay(d, medium.od0),
            t_W=wigner_delay(d),
            t_S=arrival,
            od_eff=medium.od0 * float(lorentzian(d)),
            method="analytic",
        )
    core = _core_integrals(pulse, medium, tol, grid_n)
    has_loss = medium.od0 > 0
    return DelayReport(
        P_T=core["pt"],
        P_S=core["ps"],
        tau_0=core["tau0"],
        tau_T=core["tau_t_weighted"],
        tau_S=1.0 - core["pt_tau_t_over_ps"] if has_loss else nan,
        t_g=nan,
        t_W=nan,
        t_S=nan,
        od_eff=float(-np.log(core["pt"])),
        method="analytic",
    )


@dataclass(frozen=True)
class Asymptotics:
    """Narrow-bandwidth limiting forms, valid for sigma << 1/Gamma."""

    od_eff: float
    pt_low_od: float
    pt_high_od: float
    tau_t_low_od: float
    tau_t_high_od: float
    tau_s_low_od: float
    tau_s_high_od: float


def asymptotics(pulse: PulseSpec, medium: MediumProfile, *, tol=DEFAULT_TOL):
    """Dilute- and dense-medium limiting forms for a Gaussian pulse."""
    if not isinstance(pulse, GaussianPulse):
        raise UnsupportedVariantError("asymptotic forms are derived for Gaussian pulses")
    if pulse.sigma > 0.2:
        warnings.warn("asymptotics assume sigma * Gamma << 1; sigma exceeds 0.2", stacklevel=2)
    od0 = medium.od0
    sig = pulse.sigma
    od_eff = effective_od(pulse, medium, tol=tol)
    return Asymptotics(
        od_eff=od_eff,
        pt_low_od=1.0 - math.sqrt(math.pi / 2.0) * sig * od0,
        pt_high_od=math.exp(-sig * math.sqrt(2.0 * od0)),
        tau_t_low_od=math.sqrt(math.pi / 2.0) * (sig / 4.0) * od0**2,
        tau_t_high_od=od_eff / 2.0,
        tau_s_low_od=1.0 - math.sqrt(2.0 / math.pi) * od_eff / (4.0 * sig),
        tau_s_high_od=1.0 - od_eff / (2.0 * math.expm1(od_eff)) if od_eff > 0 else 1.0,
    )
