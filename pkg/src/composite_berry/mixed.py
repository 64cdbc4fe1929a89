"""Subsystem geometric phase as a weighted sum of Bloch-sphere areas.

The reduced state of one qubit is a point r inside the Bloch ball. Its two
eigenkets sit at +r/|r| and -r/|r| on the unit sphere; each traces a closed
loop whose signed solid angle Omega gives a pure-state phase -Omega/2. The
subsystem phase weights the two by the spectral weights p+ and p-.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .berry import BRANCH_SNAP, StatePath, berry_phase
from .linalg import PAULI, density, partial_trace, wrap_phase

WEIGHT_TOL = 1e-4


class ProlongationError(ValueError):
    pass


@dataclass(frozen=True)
class BlochPath:
    phis: np.ndarray
    r: np.ndarray  # (N+1, 3)
    p: np.ndarray  # (N+1, 2), p[:, 0] >= p[:, 1]
    subsystem: int

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        p = np.asarray(self.p, dtype=float)
        if np.max(np.abs(p.sum(axis=1) - 1.0)) > 1e-12:
            raise ValueError("spectral weights must sum to one")
        if np.max(np.abs(np.linalg.norm(r, axis=1) - (p[:, 0] - p[:, 1]))) > 1e-9:
            raise ValueError("|r| must equal p+ - p-")
        object.__setattr__(self, "phis", np.asarray(self.phis, dtype=float))
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "p", p)

    @property
    def weight_variation(self) -> float:
        return float(np.max(np.abs(self.p[:, 0] - self.p[:, 0].mean())))


@dataclass(frozen=True)
class SolidAngle:
    omega: float  # principal value in (-2pi, 2pi]
    unwrapped: float
    winding: int  # (unwrapped - omega) / 4pi


@dataclass(frozen=True)
class MixedPhaseResult:
    omega_plus: float
    omega_minus: float
    p_plus: float
    p_minus: float
    gamma: float  # (-pi, pi]
    gamma_unreduced: float
    weight_variation: float
    omega_plus_unwrapped: float = float("nan")
    omega_minus_unwrapped: float = float("nan")


def bloch_vector(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    return np.array([np.trace(rho @ s).real for s in PAULI])


def bloch_decompose(rho):
    """(p, r, kets) with p = (p+, p-), r = tr(rho sigma), kets[0] along +r."""
    rho = np.asarray(rho, dtype=complex)
    r = bloch_vector(rho)
    nr = float(np.linalg.norm(r))
    if nr < 1e-8:
        raise ProlongationError("prolongation undefined: maximally mixed state (|r| < 1e-8)")
    p = np.array([(1 + nr) / 2, (1 - nr) / 2])
    n = r / nr
    return p, r, (coherent_state(n), coherent_state(-n))


def coherent_state(n) -> np.ndarray:
    """Spin-1/2 ket with Bloch vector n: (cos(a/2), e^{ib} sin(a/2))."""
    n = np.asarray(n, dtype=float)
    a = np.arccos(np.clip(n[2] / np.linalg.norm(n), -1.0, 1.0))
    b = np.arctan2(n[1], n[0])
    return np.array([np.cos(a / 2), np.exp(1j * b) * np.sin(a / 2)])


def coherent_states(ns) -> np.ndarray:
    ns = np.asarray(ns, dtype=float)
    ns = ns / np.linalg.norm(ns, axis=1)[:, None]
    a = np.arccos(np.clip(ns[:, 2], -1.0, 1.0))
    b = np.arctan2(ns[:, 1], ns[:, 0])
    return np.column_stack([np.cos(a / 2), np.exp(1j * b) * np.sin(a / 2)])


def _phase_canonical(psi: np.ndarray) -> np.ndarray:
    """Remove the global phase of ``psi``.

    The largest amplitude is first moved into the quadrant re > 0, im >= 0 by
    an exact quarter turn, so states differing by a factor i^m canonicalize to
    identical bits; the remaining phase is then divided out.
    """
    j = int(np.argmax(np.abs(psi)))
    a = psi[j]
    for _ in range(4):
        if a.real > 0 and a.imag >= 0:
            break
        psi = np.column_stack([-psi.imag, psi.real]).view(complex).ravel()  # exact * 1j
        a = psi[j]
    return psi * (abs(a) / a)


def reduced_bloch_path(path: StatePath, subsystem: int) -> BlochPath:
    if path.dim != 4:
        raise ValueError("reduced_bloch_path needs a two-qubit path")
    rs, ps = [], []
    for phi, psi in zip(path.phis, path.states):
        rho = partial_trace(density(_phase_canonical(psi)), subsystem)
        r = bloch_vector(rho)
        nr = float(np.linalg.norm(r))
        if nr < 1e-8:
            raise ProlongationError(
                f"reduced state of subsystem {subsystem} is maximally mixed at phi={phi:.6g}"
            )
        rs.append(r)
        ps.append(((1 + nr) / 2, (1 - nr) / 2))
    return BlochPath(path.phis, np.array(rs), np.array(ps), subsystem)


def prolong(bp: BlochPath):
    """Unit-sphere paths of the two eigenkets: (r/|r|, -r/|r|)."""
    nr = np.linalg.norm(bp.r, axis=1)
    if np.min(nr) < 1e-8:
        raise ProlongationError("prolongation undefined: vanishing Bloch vector")
    n = bp.r / nr[:, None]
    return n, -n


def _loop_area(closed: np.ndarray):
    """(-2 gamma principal, -2 gamma unwrapped) of the coherent-state loop."""
    phis = np.arange(len(closed), dtype=float)
    res = berry_phase(StatePath(phis, coherent_states(closed)))
    return -2.0 * res.gamma, -2.0 * res.raw_unwrapped


def solid_angle(points, extrapolate: bool = True) -> SolidAngle:
    """Signed solid angle enclosed by a closed unit-sphere loop.

    Uses Omega = -2 gamma, with gamma the loop phase of the spin-1/2 coherent
    states along the path. That is exactly the area of the geodesic polygon
    through the samples; when the points sample a smooth loop at uniform
    parameter steps, ``extrapolate`` combines the full and every-other-point
    polygons (Richardson, h^2 -> h^4).

    The unwrapped value follows the north-pole gauge of :func:`coherent_state`.
    """
    n = np.asarray(points, dtype=float)
    n = n / np.linalg.norm(n, axis=1)[:, None]
    closed = n if np.allclose(n[0], n[-1], rtol=0, atol=1e-12) else np.vstack([n, n[:1]])
    step = np.arccos(np.clip(np.einsum("ki,ki->k", closed[:-1], closed[1:]), -1.0, 1.0))
    if np.max(step) >= np.pi / 2:
        k = int(np.argmax(step))
        raise ValueError(f"path undersampled: geodesic step {step[k]:.3f} rad at index {k}")
    principal, unwrapped = _loop_area(closed)
    n_seg = len(closed) - 1
    if extrapolate and n_seg % 2 == 0 and n_seg >= 64:
        coarse_p, coarse_u = _loop_area(closed[::2])
        # the principal values may sit on different 4pi sheets; align first
        coarse_p += 4 * np.pi * round((principal - coarse_p) / (4 * np.pi))
        principal = (4 * principal - coarse_p) / 3
        unwrapped = (4 * unwrapped - coarse_u) / 3
    principal = _wrap_4pi(principal)
    winding = int(round((unwrapped - principal) / (4 * np.pi)))
    return SolidAngle(principal, unwrapped, winding)


def _wrap_4pi(x: float, snap: float = 1e-9) -> float:
    """Reduce to (-2pi, 2pi]; values within ``snap`` of -2pi go to +2pi."""
    y = float(2 * np.pi - np.mod(2 * np.pi - x, 4 * np.pi))
    return 2 * np.pi if y <= -2 * np.pi + snap else y


def subsystem_phase(bp: BlochPath, weight_tol: float = WEIGHT_TOL) -> MixedPhaseResult:
    """gamma = p+ (-Omega+/2) + p- (-Omega-/2) with loop-constant weights."""
    variation = bp.weight_variation
    if variation > weight_tol:
        raise ValueError(
            f"spectral weights vary by {variation:.3e} around the loop; "
            "weighted phase is ambiguous for time-dependent weights"
        )
    plus, minus = prolong(bp)
    om_p = solid_angle(plus)
    om_m = solid_angle(minus)
    p_plus = float(bp.p[:, 0].mean())
    p_minus = float(bp.p[:, 1].mean())
    unreduced = p_plus * (-om_p.omega / 2) + p_minus * (-om_m.omega / 2)
    gamma = wrap_phase(unreduced)
    if gamma <= -np.pi + BRANCH_SNAP:
        gamma = float(np.pi)
    return MixedPhaseResult(
        omega_plus=om_p.omega,
        omega_minus=om_m.omega,
        p_plus=p_plus,
        p_minus=p_minus,
        gamma=gamma,
        gamma_unreduced=unreduced,
        weight_variation=variation,
        omega_plus_unwrapped=om_p.unwrapped,
        omega_minus_unwrapped=om_m.unwrapped,
    )
