"""Non-Abelian connection on the g=0 degenerate pair and its Wilson loop."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import permutations
from typing import Callable

import numpy as np

from .linalg import expm_i_hermitian, wrap_phase


class Provenance(str, enum.Enum):
    ANALYTIC = "analytic_reply"
    NUMERIC = "numeric_from_basis"


@dataclass(frozen=True)
class Connection:
    rank: int
    sample: Callable[[float], np.ndarray]
    provenance: Provenance

    def __call__(self, phi: float) -> np.ndarray:
        return self.sample(phi)


@dataclass(frozen=True)
class Holonomy:
    u: np.ndarray
    eigenphases: np.ndarray
    trace: complex
    n_steps: int


def connection_analytic(theta: float) -> Connection:
    """A = [[c - 1/2, 1/2], [1/2, c - 1/2]], c = cos^2(theta/2), constant in phi."""
    if not 0.0 <= theta <= np.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    c = np.cos(theta / 2) ** 2
    a = np.array([[c - 0.5, 0.5], [0.5, c - 0.5]], dtype=complex)
    a.setflags(write=False)
    return Connection(2, lambda phi: a, Provenance.ANALYTIC)


def constant_connection(a) -> Connection:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return Connection(a.shape[0], lambda phi: a, Provenance.NUMERIC)


def _stack(vectors) -> np.ndarray:
    return np.column_stack([np.asarray(v, dtype=complex) for v in vectors])


def check_orthonormal(vecs: np.ndarray, tol: float = 1e-8):
    gram = vecs.conj().T @ vecs
    dev = np.max(np.abs(gram - np.eye(gram.shape[0])))
    if dev > tol:
        raise ValueError(f"basis is not orthonormal (Gram deviation {dev:.3e})")


def connection_numeric(basis, phi: float, step: float = 1e-4) -> np.ndarray:
    """A_xy = i <Psi_x| d/dphi |Psi_y> by central differences, Hermitian-symmetrized.

    ``basis`` maps phi to a list of k orthonormal state vectors.
    """
    if not 1e-6 <= step <= 1e-2:
        raise ValueError(f"step must lie in [1e-6, 1e-2], got {step}")
    v0 = _stack(basis(phi))
    check_orthonormal(v0)
    dv = (_stack(basis(phi + step)) - _stack(basis(phi - step))) / (2 * step)
    a = 1j * (v0.conj().T @ dv)
    return 0.5 * (a + a.conj().T)


def numeric_connection(basis, step: float = 1e-4) -> Connection:
    k = len(basis(0.0))
    return Connection(k, lambda phi: connection_numeric(basis, phi, step), Provenance.NUMERIC)


def _holonomy(u: np.ndarray, n_steps: int) -> Holonomy:
    ev = np.linalg.eigvals(u)
    return Holonomy(u, np.sort(wrap_phase(np.angle(ev))), complex(np.trace(u)), n_steps)


def wilson_loop(conn: Connection, n_steps: int = 1024) -> Holonomy:
    """U = P exp(i oint A dphi) as an ordered product, later phi on the left.

    Each factor samples A at the midpoint of its phi cell, which keeps the
    product second-order accurate for phi-dependent connections.
    """
    if n_steps < 16:
        raise ValueError(f"n_steps must be >= 16, got {n_steps}")
    dphi = 2 * np.pi / n_steps
    u = np.eye(conn.rank, dtype=complex)
    cache = None
    for k in range(n_steps):
        a = conn((k + 0.5) * dphi)
        if conn.provenance is Provenance.ANALYTIC:
            # phi-independent by construction
            if cache is None:
                cache = expm_i_hermitian(a, dphi)
            step = cache
        else:
            step = expm_i_hermitian(a, dphi)
        u = step @ u
    return _holonomy(u, n_steps)


def holonomy_from_matrix(u, n_steps: int = 0) -> Holonomy:
    return _holonomy(np.asarray(u, dtype=complex), n_steps)


def holonomy_invariants(h: Holonomy):
    return h.eigenphases, h.trace


def same_invariants(h1: Holonomy, h2: Holonomy, tol: float = 1e-8) -> bool:
    """Eigenphase multisets agree mod 2pi and traces agree."""
    return invariant_deviation(h1, h2) <= tol


def invariant_deviation(h1: Holonomy, h2: Holonomy) -> float:
    p1 = np.sort(np.mod(h1.eigenphases, 2 * np.pi))
    p2 = np.sort(np.mod(h2.eigenphases, 2 * np.pi))
    # a pair straddling 0 == 2pi sorts differently; compare as points on the circle
    d_phase = _multiset_circle_distance(p1, p2)
    return max(d_phase, abs(h1.trace - h2.trace))


def _multiset_circle_distance(p1, p2) -> float:
    best = np.inf
    for perm in permutations(range(len(p2))):
        d = max(float(abs(wrap_phase(a - p2[j]))) for a, j in zip(p1, perm))
        best = min(best, d)
    return best


def gauge_transform(basis, omega, tol: float = 1e-10):
    """New basis |Psi~_x(phi)> = sum_y omega(phi)_yx |Psi_y(phi)>.

    ``omega`` must be unitary at every phi and periodic; both are checked on a
    coarse probe grid.
    """
    probes = np.linspace(0.0, 2 * np.pi, 33)
    for p in probes:
        w = np.asarray(omega(p), dtype=complex)
        if np.max(np.abs(w.conj().T @ w - np.eye(w.shape[0]))) > tol:
            raise ValueError(f"omega is not unitary at phi={p:.6g}")
    if np.max(np.abs(np.asarray(omega(0.0)) - np.asarray(omega(2 * np.pi)))) > tol:
        raise ValueError("omega is not periodic: omega(0) != omega(2pi)")

    def transformed(phi):
        vecs = _stack(basis(phi)) @ np.asarray(omega(phi), dtype=complex)
        return [vecs[:, j] for j in range(vecs.shape[1])]

    return transformed
