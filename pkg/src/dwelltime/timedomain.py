"""Split-step integrator for the forward and backward no-jump field equations.

One spatial cell is advected per step (unit Courant number, c = 1), so free
propagation is exact; the local atom coupling is applied as an exact 2x2 matrix
exponential on the half steps. The backward pass uses the exact adjoint of the
forward step, which keeps the forward/backward overlap constant to rounding.

The domain is sized so nothing ever crosses a boundary: the right edge lies
beyond the light cone of the run, the left edge holds the full initial pulse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .domain import (
    GaussianPulse,
    MediumProfile,
    NarrowBandPulse,
    PulseSpec,
    TabulatedSpectrumPulse,
    WeakProbeConfig,
    TAIL_CUT,
)
from .errors import (
    InvalidParameterError,
    NumericError,
    OracleBudgetError,
    UndefinedConditionalError,
    UnsupportedVariantError,
)

RESIDUAL_TOL = 1e-8  # stop once the excited norm has decayed to this fraction of its peak


def _time_amplitude(pulse: PulseSpec, t):
    if isinstance(pulse, GaussianPulse):
        return pulse.time_amplitude(t)
    if isinstance(pulse, TabulatedSpectrumPulse):
        t = np.asarray(t, dtype=float)
        w = pulse.omegas
        amp = pulse.amplitudes
        phases = np.exp(1j * np.outer(t, w))
        return np.trapezoid(phases * amp[None, :], w, axis=1) / math.sqrt(2.0 * math.pi)
    raise UnsupportedVariantError("time-domain integration needs a finite-bandwidth pulse")


def _support_halfwidth(pulse: PulseSpec):
    if isinstance(pulse, GaussianPulse):
        return pulse.support_halfwidth
    # widen until the boundary amplitude is below the tail cut
    half = 8.0 / (pulse.omegas[-1] - pulse.omegas[0])
    for _ in range(60):
        t = np.linspace(-half, half, 513)
        a = np.abs(_time_amplitude(pulse, t))
        if max(a[0], a[-1]) < TAIL_CUT * a.max():
            return half
        half *= 2.0
    raise NumericError("could not bracket the pulse support")


@dataclass(frozen=True)
class GridSpec:
    """Space-time lattice with dt = dz (unit Courant number)."""

    dz: float
    z_min: float  # left cell boundary
    n_cells: int
    i_med0: int  # index of the first cell inside the medium
    n_med: int
    t_start: float
    max_steps: int
    snap_every: int = 1

    def __post_init__(self):
        if self.n_med < 50:
            raise InvalidParameterError(f"medium needs >= 50 cells, got {self.n_med}")
        if self.max_steps < 1:
            raise InvalidParameterError("max_steps must be positive")

    @property
    def dt(self):
        return self.dz

    @property
    def z_centers(self):
        return self.z_min + (np.arange(self.n_cells) + 0.5) * self.dz

    @property
    def i_monitor(self):
        # first cell past the medium exit
        return self.i_med0 + self.n_med

    @classmethod
    def build(cls, pulse: PulseSpec, medium: MediumProfile, *, cells_per_medium=200,
              samples_per_sigma=50, settle_time=45.0):
        if isinstance(pulse, NarrowBandPulse):
            raise UnsupportedVariantError("time-domain integration needs a finite-bandwidth pulse")
        if cells_per_medium < 50:
            raise InvalidParameterError(f"medium needs >= 50 cells, got {cells_per_medium}")
        length = medium.length
        sigma = pulse.sigma if isinstance(pulse, GaussianPulse) else _support_halfwidth(pulse) / 6.0
        n_med = max(int(cells_per_medium), int(math.ceil(length * samples_per_sigma / sigma)))
        dz = length / n_med
        t_half = _support_halfwidth(pulse)
        m_lead = int(math.ceil(t_half / dz)) + 2  # pulse center to medium entrance
        m_hold = int(math.ceil(t_half / dz)) + 2  # entrance to left edge
        t_start = -m_lead * dz
        z_min = t_start - m_hold * dz
        t_end_max = t_half + length + settle_time
        max_steps = int(math.ceil((t_end_max - t_start) / dz))
        # right edge beyond the light cone of the whole run
        n_right = max_steps + 2
        n_cells = m_lead + m_hold + n_med + n_right
        snap_every = max(1, max_steps // 40)
        return cls(dz=dz, z_min=z_min, n_cells=n_cells, i_med0=m_lead + m_hold,
                   n_med=n_med, t_start=t_start, max_steps=max_steps, snap_every=snap_every)


@dataclass
class FieldHistory:
    """Recorded trajectory of one integration pass."""

    grid: GridSpec
    direction: str  # "forward" or "backward"
    times: np.ndarray  # (n_rec,)
    beta: np.ndarray  # (n_rec, n_med) excitation amplitude on medium cells
    alpha_norm: np.ndarray
    beta_norm: np.ndarray
    scattered_cum: np.ndarray  # Gamma * integral of the excited norm up to t
    snap_steps: np.ndarray
    snap_alpha: np.ndarray  # (n_snap, n_cells)
    final_alpha: np.ndarray
    final_beta: np.ndarray
    p_t: float
    input_com: float = 0.0
    monitor: Optional[np.ndarray] = None  # transmitted amplitude time series
    overlap: Optional[np.ndarray] = None  # <back|fwd> at snapshot steps
    bookkeeping_dev: float = 0.0

    @property
    def n_rec(self):
        return self.times.size


def _coupling_halfstep(medium: MediumProfile, grid: GridSpec):
    """Exact 2x2 matrix exponential of the local coupling over dt/2.

    Returns real coefficient arrays (a11, a12, a22) over the medium cells; the
    half-step maps (alpha, beta) -> (a11 a + i a12 b, i a12 a + a22 b), and its
    exact adjoint is the same map with a12 negated.
    """
    h = grid.dt / 2.0
    zc = grid.z_centers[grid.i_med0:grid.i_med0 + grid.n_med]
    g = medium.g_of(zc)
    nu2 = 1.0 / 16.0 - g * g
    nu = np.sqrt(nu2.astype(complex))
    arg = nu * h
    c = np.cosh(arg).real
    small = np.abs(arg) < 1e-6
    safe_nu = np.where(small, 1.0, nu)
    st = np.where(small, h * (1.0 + nu2 * h * h / 6.0), (np.sinh(arg) / safe_nu).real)
    damp = math.exp(-h / 4.0)
    a11 = damp * (c + st / 4.0)
    a12 = damp * g * st
    a22 = damp * (c - st / 4.0)
    return a11, a12, a22


def _apply_half(alpha_med, beta, a11, a12, a22, sign):
    na = a11 * alpha_med + sign * 1j * a12 * beta
    nb = sign * 1j * a12 * alpha_med + a22 * beta
    return na, nb


def integrate_forward(pulse: PulseSpec, medium: MediumProfile, grid: GridSpec | None = None):
    """Propagate the initial pulse through the medium under no-jump evolution."""
    if grid is None:
        grid = GridSpec.build(pulse, medium)
    dz = grid.dz
    dt = grid.dt
    i0, nm = grid.i_med0, grid.n_med
    zc = grid.z_centers
    alpha = np.asarray(_time_amplitude(pulse, grid.t_start - zc), dtype=complex)
    beta = np.zeros(nm, dtype=complex)
    a11, a12, a22 = _coupling_halfstep(medium, grid)

    w = np.abs(alpha) ** 2
    na0 = dz * float(w.sum())
    input_com = float((w * (grid.t_start - zc)).sum() / w.sum())

    times = [grid.t_start]
    beta_rows = [beta.copy()]
    alpha_norms = [na0]
    beta_norms = [0.0]
    scattered = [0.0]
    monitor = [alpha[grid.i_monitor]]
    snap_steps = [0]
    snaps = [alpha.copy()]
    buf = np.empty_like(alpha)

    t_half = _support_halfwidth(pulse)
    t_min_end = medium.length + t_half + 4 * dz
    peak_beta = 0.0
    book_dev = 0.0
    done = False
    for n in range(1, grid.max_steps + 1):
        am = alpha[i0:i0 + nm]
        am, beta = _apply_half(am, beta, a11, a12, a22, +1.0)
        alpha[i0:i0 + nm] = am
        buf[1:] = alpha[:-1]
        buf[0] = 0.0
        alpha, buf = buf, alpha
        am = alpha[i0:i0 + nm]
        am, beta = _apply_half(am, beta, a11, a12, a22, +1.0)
        alpha[i0:i0 + nm] = am

        t = grid.t_start + n * dt
        na = dz * float(np.vdot(alpha, alpha).real)
        nb = dz * float(np.vdot(beta, beta).real)
        scat = scattered[-1] + dt * 0.5 * (beta_norms[-1] + nb)  # Gamma = 1
        times.append(t)
        beta_rows.append(beta.copy())
        alpha_norms.append(na)
        beta_norms.append(nb)
        scattered.append(scat)
        monitor.append(alpha[grid.i_monitor])
        if n % grid.snap_every == 0:
            snap_steps.append(n)
            snaps.append(alpha.copy())
        book_dev = max(book_dev, abs(na + nb + scat - 1.0))
        peak_beta = max(peak_beta, nb)
        if t >= t_min_end and nb <= RESIDUAL_TOL * peak_beta:
            done = True
            break
    if not done:
        raise NumericError(
            f"excited norm did not settle below {RESIDUAL_TOL} of peak within {grid.max_steps} steps")
    if snap_steps[-1] != n:
        snap_steps.append(n)
        snaps.append(alpha.copy())
    p_t = alpha_norms[-1] + beta_norms[-1]
    return FieldHistory(
        grid=grid,
        direction="forward",
        times=np.array(times),
        beta=np.array(beta_rows),
        alpha_norm=np.array(alpha_norms),
        beta_norm=np.array(beta_norms),
        scattered_cum=np.array(scattered),
        snap_steps=np.array(snap_steps),
        snap_alpha=np.array(snaps),
        final_alpha=alpha,
        final_beta=beta.copy(),
        p_t=float(p_t),
        input_com=input_com,
        monitor=np.array(monitor),
        bookkeeping_dev=book_dev,
    )


def integrate_backward(forward: FieldHistory, medium: MediumProfile):
    """Evolve the transmission-post-selected state backward over the forward window.

    Uses the exact adjoint of the forward step, so the overlap with the forward
    state is constant to rounding; samples of it are stored for verification.
    """
    if forward.direction != "forward":
        raise InvalidParameterError("need a forward history")
    grid = forward.grid
    if not forward.p_t > 0:
        raise UndefinedConditionalError("transmission post-selection needs P_T > 0")
    dz, dt = grid.dz, grid.dt
    i0, nm = grid.i_med0, grid.n_med
    root = math.sqrt(forward.p_t)
    alpha = forward.final_alpha.astype(complex) / root
    beta = np.zeros(nm, dtype=complex)
    a11, a12, a22 = _coupling_halfstep(medium, grid)

    n_rec = forward.n_rec
    beta_rows = np.empty((n_rec, nm), dtype=complex)
    alpha_norms = np.empty(n_rec)
    beta_norms = np.empty(n_rec)
    beta_rows[n_rec - 1] = beta
    alpha_norms[n_rec - 1] = dz * float(np.vdot(alpha, alpha).real)
    beta_norms[n_rec - 1] = 0.0
    snap_lookup = {int(s): k for k, s in enumerate(forward.snap_steps)}
    overlaps = np.full(forward.snap_steps.size, np.nan + 0j, dtype=complex)
    buf = np.empty_like(alpha)

    def record_overlap(step_idx):
        k = snap_lookup.get(step_idx)
        if k is None:
            return
        ov = np.vdot(alpha, forward.snap_alpha[k]) + np.vdot(beta, forward.beta[step_idx])
        overlaps[k] = dz * ov

    record_overlap(n_rec - 1)
    for n in range(n_rec - 2, -1, -1):
        am = alpha[i0:i0 + nm]
        am, beta = _apply_half(am, beta, a11, a12, a22, -1.0)
        alpha[i0:i0 + nm] = am
        buf[:-1] = alpha[1:]
        buf[-1] = 0.0
        alpha, buf = buf, alpha
        am = alpha[i0:i0 + nm]
        am, beta = _apply_half(am, beta, a11, a12, a22, -1.0)
        alpha[i0:i0 + nm] = am
        beta_rows[n] = beta
        alpha_norms[n] = dz * float(np.vdot(alpha, alpha).real)
        beta_norms[n] = dz * float(np.vdot(beta, beta).real)
        record_overlap(n)
    return FieldHistory(
        grid=grid,
        direction="backward",
        times=forward.times.copy(),
        beta=beta_rows,
        alpha_norm=alpha_norms,
        beta_norm=beta_norms,
        scattered_cum=np.zeros(n_rec),
        snap_steps=forward.snap_steps.copy(),
        snap_alpha=np.empty((0, grid.n_cells)),
        final_alpha=alpha,
        final_beta=beta.copy(),
        p_t=forward.p_t,
        overlap=overlaps,
    )


def weak_trace(forward: FieldHistory, backward: FieldHistory, probe: WeakProbeConfig = WeakProbeConfig()):
    """Probe phase shift vs time: (times, phi) with phi ~ the conditioned excitation."""
    if forward.direction != "forward" or backward.direction != "backward":
        raise InvalidParameterError("need one forward and one backward history")
    if forward.n_rec != backward.n_rec or forward.grid is not backward.grid:
        raise InvalidParameterError("histories were not computed on the same grid/run")
    dz = forward.grid.dz
    cross = np.sum(np.conj(backward.beta) * forward.beta, axis=1) * dz
    phi = probe.epsilon / math.sqrt(forward.p_t) * cross.real
    return forward.times, phi


def tau_T_td(forward: FieldHistory, backward: FieldHistory, probe: WeakProbeConfig = WeakProbeConfig()):
    """Transmitted dwell time: time integral of the weak trace over probe strength."""
    times, phi = weak_trace(forward, backward, probe)
    return float(np.trapezoid(phi, times)) / probe.epsilon


def tau_avg_td(forward: FieldHistory):
    """Average dwell time: time integral of the excited-state norm."""
    return float(np.trapezoid(forward.beta_norm, forward.times))


def com_delays(forward: FieldHistory, *, include_scattered=True):
    """Center-of-mass delays (transmitted, scattered) relative to free flight."""
    if forward.direction != "forward" or forward.monitor is None:
        raise InvalidParameterError("need a forward history with a monitor series")
    grid = forward.grid
    m = np.abs(forward.monitor) ** 2
    if m.sum() <= 0:
        raise NumericError("no transmitted amplitude reached the monitor")
    z_out = grid.z_centers[grid.i_monitor]
    t_out = float((m * forward.times).sum() / m.sum())
    transmitted = t_out - z_out - forward.input_com
    if not include_scattered:
        return transmitted, float("nan")
    wsum = float(np.sum(np.abs(forward.beta) ** 2))
    if wsum <= 0.0:
        raise UndefinedConditionalError("nothing scatters; scattered delay undefined")
    zc = grid.z_centers[grid.i_med0:grid.i_med0 + grid.n_med]
    w2 = np.abs(forward.beta) ** 2
    val = float((w2 * (forward.times[:, None] - zc[None, :])).sum() / wsum)
    return transmitted, val - forward.input_com


def delay_report_td(pulse: PulseSpec, medium: MediumProfile, grid: GridSpec | None = None):
    """DelayReport from the time-domain engine (tau_S via the outcome sum rule)."""
    from .domain import DelayReport

    fwd = integrate_forward(pulse, medium, grid)
    bwd = integrate_backward(fwd, medium)
    p_t = fwd.p_t
    p_s = 1.0 - p_t
    t_t = tau_T_td(fwd, bwd)
    t_0 = tau_avg_td(fwd)
    nan = float("nan")
    return DelayReport(
        P_T=p_t,
        P_S=p_s,
        tau_0=t_0,
        tau_T=t_t,
        tau_S=(t_0 - p_t * t_t) / p_s if p_s > 1e-12 else nan,
        t_g=nan,
        t_W=nan,
        t_S=nan,
        od_eff=-math.log(p_t),
        method="timedomain",
    )


def tau_S_oracle(forward: FieldHistory, medium: MediumProfile, *, kernel_tail=1e-10, max_gmacs=2000.0):
    """Brute-force scattered dwell time, averaging the conditional weak value
    over every scattering event (position Z, time T), weighted by its rate.

    Scales with (steps x kernel lags x medium cells^2); meant for coarse grids.
    """
    grid = forward.grid
    dz, dt = grid.dz, grid.dt
    nm = grid.n_med
    f = forward.beta  # (n_rec, nm)
    n_rec = f.shape[0]
    p_s_td = dt * dz * float(np.sum(np.abs(f) ** 2))
    if p_s_td <= 0.0:
        raise UndefinedConditionalError("nothing scatters; conditional time undefined")

    # kernel norm decays ~exp(-lag*dt/2) going backward; bound the lag count
    k_max_est = min(n_rec - 1, int(math.ceil(2.0 * math.log(1.0 / kernel_tail) / dt)))
    est_gmacs = k_max_est * n_rec * nm * nm / 1e9
    if est_gmacs > max_gmacs:
        raise OracleBudgetError(
            f"estimated {est_gmacs:.1f} GMACs exceeds budget {max_gmacs}; coarsen the grid")

    a11, a12, a22 = _coupling_halfstep(medium, grid)
    c11, c12, c22 = a11[:, None], a12[:, None], a22[:, None]
    b = np.eye(nm, dtype=complex) / dz  # beta kernel, columns indexed by event cell Z
    a = np.zeros((nm, nm), dtype=complex)
    norm0 = float(np.linalg.norm(b))
    acc = 0.0 + 0.0j
    for k in range(k_max_est + 1):
        ck = f[k:].conj().T @ f[: n_rec - k]  # (Z, z) correlation at this lag
        weight = 0.5 if k == 0 else 1.0
        acc += weight * np.vdot(b, ck.T)
        if float(np.linalg.norm(b)) + float(np.linalg.norm(a)) < kernel_tail * norm0:
            break
        # one backward step of the kernel, restricted to the medium (exact there:
        # the post-selected field never re-enters from either side)
        a, b = _apply_half(a, b, c11, c12, c22, -1.0)
        a = np.vstack([a[1:], np.zeros((1, nm), dtype=complex)])
        a, b = _apply_half(a, b, c11, c12, c22, -1.0)
    return float((dt * dt * dz * dz / p_s_td) * acc.real)  # Gamma = 1
