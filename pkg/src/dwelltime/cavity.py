"""Single-sided driving of a two-mirror cavity: dwell times of the intracavity field.

Same weak-value structure as the atomic medium, with the cavity mode playing the
role of the excitation. Post-selecting on the photon returning through the input
mirror gives a back-reflection dwell time tau_B that can be negative while the
unconditioned dwell time stays positive. Frequencies are offsets from the cavity
resonance; gamma1 (input) and gamma2 (output) are the mirror intensity decay rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import NarrowBandPulse, PulseSpec
from .errors import InvalidParameterError, UndefinedConditionalError
from .spectral import _spectral_window, converge_trapezoid

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class CavityParams:
    """Intensity decay rates through the input (1) and output (2) mirrors."""

    gamma1: float
    gamma2: float

    def __post_init__(self):
        if not (self.gamma1 > 0 and self.gamma2 > 0):
            raise InvalidParameterError("both mirror rates must be positive")


@dataclass(frozen=True)
class MirrorParams:
    """Amplitude reflectivities and round-trip time of the equivalent etalon."""

    r1: float
    r2: float
    tau_rt: float

    def __post_init__(self):
        if not (0.0 < self.r1 < 1.0 and 0.0 < self.r2 < 1.0):
            raise InvalidParameterError("reflectivities must lie in (0, 1); the bounce series diverges otherwise")
        if not self.tau_rt > 0:
            raise InvalidParameterError("round-trip time must be positive")


def steady_fields(params: CavityParams, omega):
    """Per-frequency mode, reflected and transmitted amplitudes for unit drive.

    |reflected|^2 + |transmitted|^2 = 1 exactly at every frequency.
    """
    g1, g2 = params.gamma1, params.gamma2
    w = np.asarray(omega, dtype=float)
    den = g1 + g2 + 2j * w
    beta = -2.0 * math.sqrt(g1) / den
    refl = (g2 - g1 + 2j * w) / den
    trans = -2.0 * math.sqrt(g1 * g2) / den
    return beta, refl, trans


def _cavity_window(params: CavityParams, pulse: PulseSpec):
    center, half = _spectral_window(pulse)
    return center, max(half, 10.0 * (params.gamma1 + params.gamma2))


def scatter_probabilities(params: CavityParams, pulse: PulseSpec, *, tol=DEFAULT_TOL):
    """(P_ref, P_tr): probabilities of leaving through the input or output mirror."""
    g1, g2 = params.gamma1, params.gamma2
    if isinstance(pulse, NarrowBandPulse):
        d = pulse.detuning
        den = (g1 + g2) ** 2 + 4.0 * d * d
        p_ref = ((g2 - g1) ** 2 + 4.0 * d * d) / den
        return p_ref, 1.0 - p_ref

    def rows(w):
        dens = pulse.spectral_density(w)
        den = (g1 + g2) ** 2 + 4.0 * w * w
        return np.stack([dens, dens * ((g2 - g1) ** 2 + 4.0 * w * w) / den])

    (norm, ref_raw), _ = converge_trapezoid(rows, *_cavity_window(params, pulse), tol=tol)
    p_ref = float(ref_raw.real / norm.real)
    return p_ref, 1.0 - p_ref


def dwell_avg(params: CavityParams, pulse: PulseSpec, *, tol=DEFAULT_TOL):
    """Unconditioned dwell time: time integral of the mode population.

    Equals P_tr / gamma2, since output leakage drains the mode at rate gamma2.
    """
    g1, g2 = params.gamma1, params.gamma2
    if isinstance(pulse, NarrowBandPulse):
        d = pulse.detuning
        return 4.0 * g1 / ((g1 + g2) ** 2 + 4.0 * d * d)

    def rows(w):
        dens = pulse.spectral_density(w)
        return np.stack([dens, dens * 4.0 * g1 / ((g1 + g2) ** 2 + 4.0 * w * w)])

    (norm, raw), _ = converge_trapezoid(rows, *_cavity_window(params, pulse), tol=tol)
    return float(raw.real / norm.real)


def tau_B_direct(params: CavityParams, pulse: PulseSpec, *, tol=DEFAULT_TOL):
    """Dwell time conditioned on back-reflection, from the weak-value integral."""
    g1, g2 = params.gamma1, params.gamma2
    if isinstance(pulse, NarrowBandPulse):
        d = pulse.detuning
        p_ref = ((g2 - g1) ** 2 + 4.0 * d * d) / ((g1 + g2) ** 2 + 4.0 * d * d)
        if p_ref <= 0.0:
            raise UndefinedConditionalError("nothing reflects; conditional dwell undefined")
        num = (g1 - g2 + 2j * d) / ((g1 + g2 + 2j * d) * ((g1 + g2) ** 2 + 4.0 * d * d))
        return float(4.0 * g1 * np.real(num) / p_ref)

    def rows(w):
        dens = pulse.spectral_density(w)
        den2 = (g1 + g2) ** 2 + 4.0 * w * w
        ref2 = ((g2 - g1) ** 2 + 4.0 * w * w) / den2
        num = dens * (g1 - g2 + 2j * w) / ((g1 + g2 + 2j * w) * den2)
        return np.stack([(dens * ref2).astype(complex), num])

    (ref_raw, num_raw), _ = converge_trapezoid(rows, *_cavity_window(params, pulse), tol=tol)
    if not ref_raw.real > 0.0:
        raise UndefinedConditionalError("nothing reflects; conditional dwell undefined")
    return float(4.0 * g1 * np.real(num_raw) / ref_raw.real)


def tau_B_closed(params: CavityParams):
    """Resonant narrow-band tau_B in terms of the effective depth -ln P_ref."""
    g1, g2 = params.gamma1, params.gamma2
    if not g1 < g2:
        raise InvalidParameterError("closed form holds on the undercoupled branch gamma1 < gamma2")
    eta0 = -2.0 * math.log((g2 - g1) / (g1 + g2))
    return -2.0 * math.sinh(eta0 / 2.0) / g2


def mirror_map(params: CavityParams, tau_rt=None):
    """Equivalent etalon reflectivities for the given rates; tau_rt defaults
    to 0.01 / gamma2 (well inside the fast round-trip regime)."""
    if tau_rt is None:
        tau_rt = 0.01 / params.gamma2
    if not tau_rt > 0:
        raise InvalidParameterError("round-trip time must be positive")
    vals = []
    for g in (params.gamma1, params.gamma2):
        x = g * tau_rt / 4.0
        if x >= 1.0:
            raise InvalidParameterError(f"gamma * tau_rt / 4 = {x} >= 1 leaves no valid reflectivity")
        vals.append((1.0 - x) / (1.0 + x))
    return MirrorParams(r1=vals[0], r2=vals[1], tau_rt=float(tau_rt))


def mirror_map_inverse(mirrors: MirrorParams):
    """Rates reproducing the etalon reflectivities; exact inverse of mirror_map."""
    t = mirrors.tau_rt
    g1 = (4.0 / t) * (1.0 - mirrors.r1) / (1.0 + mirrors.r1)
    g2 = (4.0 / t) * (1.0 - mirrors.r2) / (1.0 + mirrors.r2)
    return CavityParams(gamma1=g1, gamma2=g2)


def feynman_tau_B(mirrors: MirrorParams, n_terms):
    """Bounce-by-bounce (path sum) construction of tau_B.

    Each n-bounce path contributes n round trips weighted by its amplitude;
    the sum is normalized by the net reflection amplitude. Returns
    (series_value, closed_form); the partial sums converge geometrically in
    r1 * r2.
    """
    if int(n_terms) < 1:
        raise InvalidParameterError("need at least one bounce term")
    r1, r2, t = mirrors.r1, mirrors.r2, mirrors.tau_rt
    if r1 == r2:
        raise UndefinedConditionalError("net reflection vanishes at r1 = r2")
    t1_sq = 1.0 - r1 * r1
    n = np.arange(1, int(n_terms) + 1, dtype=float)
    series = float(np.sum(n * (r1 * r2) ** (n - 1)))
    net_reflection = (r1 - r2) / (1.0 - r1 * r2)
    series_value = -t * t1_sq * r2 * series / net_reflection
    closed_form = -t * t1_sq * r2 / ((1.0 - r1 * r2) * (r1 - r2))
    return series_value, closed_form
