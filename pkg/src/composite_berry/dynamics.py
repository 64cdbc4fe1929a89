"""Time-dependent Schroedinger evolution around the field-rotation loop.

phi(t) = omega t. The integrator is fixed-step classic RK4; the state norm is
monitored but never renormalized, so drift is a direct accuracy diagnostic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .berry import eigenstate_berry_phase
from .linalg import wrap_phase
from .model import ModelParams, eigensystem, hamiltonian, hamiltonian_fourier, hamiltonians

NORM_ABORT = 1e-6
# target for the predicted norm loss per run, used to size the default step
NORM_BUDGET = 2e-9
MAX_RECORDS = 20000


class NormDriftError(RuntimeError):
    pass


class AdiabaticityUndefined(ValueError):
    pass


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray  # every integrator step
    energy_expect: np.ndarray  # <psi|H|psi> on ``times``
    state_times: np.ndarray  # subsampled record grid, includes both ends
    states: np.ndarray  # (len(state_times), 4)
    params: ModelParams
    level: int
    loops: int
    steps_per_loop: int
    max_norm_drift: float


@dataclass(frozen=True)
class PhaseReport:
    total_phase: float
    dynamical_phase: float
    geometric_phase: float
    final_fidelity: float
    min_fidelity: float
    adiabaticity_ratio: float
    loop_duration: float
    extras: dict = field(default_factory=dict)


def adiabaticity_ratio(params: ModelParams) -> float:
    """|omega / (g sin theta)|."""
    s = math.sin(params.theta)
    if params.g == 0 or abs(s) < 1e-15:
        raise AdiabaticityUndefined("condition undefined; gap closes (g sin(theta) = 0)")
    return abs(params.omega / (params.g * s))


def default_steps_per_loop(params: ModelParams, loops: int = 1) -> int:
    """Fixed step sized by accuracy and by the RK4 norm-loss bound.

    For a mode of energy E and step dt, one RK4 step scales the amplitude by
    |R(-iE dt)| = 1 - (E dt)^6 / 144 + ...; the step count is chosen so the
    accumulated loss over the run stays within NORM_BUDGET, and never above
    ||H|| dt = 0.05.
    """
    period = 2 * math.pi / params.omega
    e_max = float(np.max(np.abs(np.linalg.eigvalsh(hamiltonian(params, 0.0)))))
    by_accuracy = period * e_max / 0.05
    total = loops * period * e_max
    by_norm = (total**6 / (144 * NORM_BUDGET)) ** 0.2 / loops
    return int(max(20000, math.ceil(by_accuracy), math.ceil(by_norm)))


@numba.njit(cache=True)
def _rk4_loop(psi0, h0, hc, hs, omega, dt, n_steps, stride):
    n_rec = n_steps // stride + 1 + (1 if n_steps % stride else 0)
    states = np.empty((n_rec, 4), dtype=np.complex128)
    energy = np.empty(n_steps + 1, dtype=np.float64)
    psi = psi0.copy()
    max_drift = 0.0
    h = np.empty((4, 4), dtype=np.complex128)
    k1 = np.empty(4, dtype=np.complex128)
    k2 = np.empty(4, dtype=np.complex128)
    k3 = np.empty(4, dtype=np.complex128)
    k4 = np.empty(4, dtype=np.complex128)
    tmp = np.empty(4, dtype=np.complex128)

    states[0] = psi
    for step in range(n_steps + 1):
        t = step * dt
        c = math.cos(omega * t)
        s = math.sin(omega * t)
        for i in range(4):
            for j in range(4):
                h[i, j] = h0[i, j] + c * hc[i, j] + s * hs[i, j]
        e = 0.0
        nn = 0.0
        for i in range(4):
            acc = 0j
            for j in range(4):
                acc += h[i, j] * psi[j]
            k1[i] = -1j * acc
            e += (psi[i].conjugate() * acc).real
            nn += psi[i].real ** 2 + psi[i].imag ** 2
        # normalized, so RK4 norm loss does not leak into the dynamical phase
        energy[step] = e / nn
        if step == n_steps:
            break

        c = math.cos(omega * (t + 0.5 * dt))
        s = math.sin(omega * (t + 0.5 * dt))
        for i in range(4):
            for j in range(4):
                h[i, j] = h0[i, j] + c * hc[i, j] + s * hs[i, j]
        for i in range(4):
            tmp[i] = psi[i] + 0.5 * dt * k1[i]
        for i in range(4):
            acc = 0j
            for j in range(4):
                acc += h[i, j] * tmp[j]
            k2[i] = -1j * acc
        for i in range(4):
            tmp[i] = psi[i] + 0.5 * dt * k2[i]
        for i in range(4):
            acc = 0j
            for j in range(4):
                acc += h[i, j] * tmp[j]
            k3[i] = -1j * acc

        c = math.cos(omega * (t + dt))
        s = math.sin(omega * (t + dt))
        for i in range(4):
            for j in range(4):
                h[i, j] = h0[i, j] + c * hc[i, j] + s * hs[i, j]
        for i in range(4):
            tmp[i] = psi[i] + dt * k3[i]
        for i in range(4):
            acc = 0j
            for j in range(4):
                acc += h[i, j] * tmp[j]
            k4[i] = -1j * acc

        nrm = 0.0
        for i in range(4):
            psi[i] = psi[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            nrm += psi[i].real ** 2 + psi[i].imag ** 2
        drift = abs(math.sqrt(nrm) - 1.0)
        if drift > max_drift:
            max_drift = drift
        if (step + 1) % stride == 0:
            states[(step + 1) // stride] = psi
    states[n_rec - 1] = psi
    return states, energy, max_drift


def evolve_loop(
    params: ModelParams,
    psi0,
    loops: int = 1,
    steps_per_loop: int | None = None,
    level: int = 3,
) -> Trajectory:
    psi0 = np.asarray(psi0, dtype=complex)
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-10:
        raise ValueError("psi0 must be unit norm")
    if loops < 1:
        raise ValueError(f"loops must be >= 1, got {loops}")
    if steps_per_loop is None:
        steps_per_loop = default_steps_per_loop(params, loops)
    if steps_per_loop < 1000:
        raise ValueError(f"steps_per_loop must be >= 1000, got {steps_per_loop}")
    period = 2 * math.pi / params.omega
    n_steps = loops * steps_per_loop
    dt = period / steps_per_loop
    stride = max(1, -(-n_steps // MAX_RECORDS))
    h0, hc, hs = hamiltonian_fourier(params)
    states, energy, drift = _rk4_loop(psi0, h0, hc, hs, params.omega, dt, n_steps, stride)
    if drift > NORM_ABORT:
        raise NormDriftError(
            f"norm drift {drift:.3e} exceeds {NORM_ABORT:g} at dt={dt:.4g}; "
            f"increase steps_per_loop above {steps_per_loop}"
        )
    times = np.arange(n_steps + 1) * dt
    record_idx = np.arange(0, n_steps + 1, stride)
    if record_idx[-1] != n_steps:
        record_idx = np.append(record_idx, n_steps)
    return Trajectory(
        times=times,
        energy_expect=energy,
        state_times=times[record_idx],
        states=states,
        params=params,
        level=level,
        loops=loops,
        steps_per_loop=steps_per_loop,
        max_norm_drift=float(drift),
    )


def initial_eigenstate(params: ModelParams, level: int = 3) -> np.ndarray:
    return eigensystem(params, 0.0).vector(level)


def _simpson(y, dx):
    """Composite Simpson; an odd interval count ends with a 3/8 panel."""
    y = np.asarray(y, dtype=float)
    n = len(y) - 1
    if n < 3:
        return float(dx * (np.sum(y) - 0.5 * (y[0] + y[-1])))
    tail = 0.0
    if n % 2:
        tail = 3 * dx / 8 * (y[-4] + 3 * y[-3] + 3 * y[-2] + y[-1])
        y = y[:-3]
    body = dx / 3 * (y[0] + y[-1] + 4 * np.sum(y[1:-1:2]) + 2 * np.sum(y[2:-1:2]))
    return float(body + tail)


def instantaneous_fidelities(traj: Trajectory) -> np.ndarray:
    hs = hamiltonians(traj.params, traj.params.omega * traj.state_times)
    _, v = np.linalg.eigh(hs)
    ov = np.einsum("ki,ki->k", v[:, :, traj.level].conj(), traj.states)
    return np.abs(ov) ** 2


def phase_report(traj: Trajectory, reference_state=None) -> PhaseReport:
    """Split arg<psi(0)|psi(T)> into dynamical and geometric parts.

    dynamical = -int <H> dt (Simpson on the integrator grid). The geometric
    part is reported even when the evolution is not cyclic; the fidelities
    show how far from cyclic it was.
    """
    period = 2 * math.pi / traj.params.omega
    covered = traj.times[-1] / period
    if abs(covered - round(covered)) > 1e-9 or round(covered) < 1:
        raise ValueError(f"trajectory covers {covered:.6g} loops; need an integer number")
    psi0 = traj.states[0] if reference_state is None else np.asarray(reference_state)
    total = float(np.angle(np.vdot(psi0, traj.states[-1])))
    dynamical = -_simpson(traj.energy_expect, traj.times[1] - traj.times[0])
    geometric = wrap_phase(total - dynamical)
    fid = instantaneous_fidelities(traj)
    try:
        ratio = adiabaticity_ratio(traj.params)
    except AdiabaticityUndefined:
        ratio = float("inf")
    return PhaseReport(
        total_phase=total,
        dynamical_phase=dynamical,
        geometric_phase=geometric,
        final_fidelity=float(fid[-1]),
        min_fidelity=float(np.min(fid)),
        adiabaticity_ratio=ratio,
        loop_duration=period,
        extras={"max_norm_drift": traj.max_norm_drift, "steps_per_loop": traj.steps_per_loop},
    )


def run_cycle(params: ModelParams, level: int = 3, loops: int = 1, steps_per_loop=None):
    psi0 = initial_eigenstate(params, level)
    traj = evolve_loop(params, psi0, loops, steps_per_loop, level)
    return traj, phase_report(traj)


@dataclass(frozen=True)
class BreakdownRow:
    g: float
    ratio: float
    final_fidelity: float
    min_fidelity: float
    geometric_phase: float
    berry_phase: float
    loop_duration: float


def breakdown_sweep(
    theta: float,
    omega: float,
    g_values,
    steps_per_loop: int | None = None,
    level: int = 3,
    base: ModelParams | None = None,
    berry_points: int = 4000,
):
    """Fixed-omega, shrinking-g table; rows in descending g."""
    g_values = sorted((float(g) for g in g_values), reverse=True)
    if any(g <= 0 for g in g_values):
        raise ValueError("all g values must be > 0")
    base = base or ModelParams(theta=theta, omega=omega)
    rows = []
    for g in g_values:
        params = base.with_(theta=theta, omega=omega, g=g)
        _, rep = run_cycle(params, level, 1, steps_per_loop)
        berry = eigenstate_berry_phase(params, level, berry_points).gamma
        rows.append(
            BreakdownRow(g, rep.adiabaticity_ratio, rep.final_fidelity, rep.min_fidelity,
                         rep.geometric_phase, berry, rep.loop_duration)
        )
    return rows


def rotating_frame_fidelity(ratio: float) -> float:
    """Closed-form final fidelity at theta = pi/2 in the first-order effective model.

    In the frame co-rotating with H, spin 2 sees g M(0) plus the frame term
    (omega/2) sigma_z; it precesses for one period about the tilted axis.
    Valid for omega, g << B.
    """
    r = ratio
    big = math.sqrt(1.0 / r**2 + 0.25)  # precession rate over omega
    tilt = (r**2 / 4) / (1 + r**2 / 4)
    return 1.0 - math.sin(2 * math.pi * big) ** 2 * tilt
