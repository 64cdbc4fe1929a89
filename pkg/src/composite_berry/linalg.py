"""Small dense complex linear algebra for one and two qubits.

Matrices and state vectors are plain numpy arrays. Basis ordering is
|up> = (1, 0), |down> = (0, 1); for two qubits the composite index is
2*i1 + i2 with i = 0 for up.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
DEGENERACY_GAP = 1e-9

UP = np.array([1.0, 0.0], dtype=complex)
DOWN = np.array([0.0, 1.0], dtype=complex)

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SX, SY, SZ)


class LinalgError(ValueError):
    pass


@dataclass(frozen=True)
class HermEig:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns

    def vector(self, i: int) -> np.ndarray:
        return self.eigenvectors[:, i]


def _square(m, name="matrix"):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise LinalgError(f"{name} must be square, got shape {m.shape}")
    return m


def is_hermitian(m, tol=HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def check_hermitian(m, tol=HERMITIAN_TOL, name="matrix"):
    m = _square(m, name)
    dev = np.max(np.abs(m - m.conj().T), initial=0.0)
    if dev > tol:
        raise LinalgError(f"{name} is not Hermitian (max|M - M^dag| = {dev:.3e})")
    return m


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product with subsystem 1 as the slow index."""
    return np.kron(_square(a, "a"), _square(b, "b"))


def ket_product(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(rho, keep: int, tol: float = 1e-10) -> np.ndarray:
    """Reduced 2x2 density matrix of subsystem ``keep`` (1 or 2) of a two-qubit state."""
    rho = _square(rho, "rho")
    if rho.shape != (4, 4):
        raise LinalgError(f"rho must be 4x4, got {rho.shape}")
    if keep not in (1, 2):
        raise LinalgError(f"keep must be 1 or 2, got {keep!r}")
    check_hermitian(rho, tol, "rho")
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol:
        raise LinalgError(f"rho must have unit trace, got {tr.real:.12g}")
    if np.linalg.eigvalsh(rho)[0] < -tol:
        raise LinalgError("rho is not positive semidefinite")
    r = rho.reshape(2, 2, 2, 2)
    if keep == 1:
        return np.einsum("ijkj->ik", r)
    return np.einsum("jijk->ik", r)


def density(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def _canonical_phase(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    idx = np.flatnonzero(np.abs(v) > tol)
    if idx.size == 0:
        return v
    a = v[idx[0]]
    return v * (abs(a) / a)


def _lead_key(v: np.ndarray, tol: float = 1e-12):
    """Sort key: descending first-nonzero magnitude (to 1e-9), then its index."""
    idx = np.flatnonzero(np.abs(v) > tol)
    if idx.size == 0:
        return (0.0, len(v))
    return (-round(float(abs(v[idx[0]])), 9), int(idx[0]))


def _canonical_cluster_basis(vecs: np.ndarray) -> np.ndarray:
    """Basis of span(vecs) that depends only on the subspace.

    Gram-Schmidt on the projections of the computational basis vectors,
    then sorted by descending magnitude of the first nonzero amplitude
    (ties within 1e-9 go to the earlier leading index).
    """
    n, k = vecs.shape
    proj = vecs @ vecs.conj().T
    out = []
    for j in range(n):
        v = proj[:, j].copy()
        for u in out:
            v -= u * (u.conj() @ v)
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            out.append(v / nv)
        if len(out) == k:
            break
    out = [_canonical_phase(u) for u in out]
    out.sort(key=_lead_key)
    return np.column_stack(out)


def herm_eig(h) -> HermEig:
    """Hermitian eigendecomposition with ascending eigenvalues.

    Eigenvectors inside a degenerate cluster (gap < 1e-9) are replaced by a
    canonical basis of the cluster, and every eigenvector is phased so its
    first nonzero amplitude is real positive. The result is therefore a
    deterministic function of ``h``.
    """
    h = check_hermitian(h, name="h")
    w, v = np.linalg.eigh(h)
    v = v.copy()
    n = len(w)
    i = 0
    while i < n:
        j = i + 1
        while j < n and w[j] - w[j - 1] < DEGENERACY_GAP:
            j += 1
        if j - i > 1:
            v[:, i:j] = _canonical_cluster_basis(v[:, i:j])
        else:
            v[:, i] = _canonical_phase(v[:, i])
        i = j
    return HermEig(w, v)


def jacobi_eigh(h, tol: float = 1e-13, max_sweeps: int = 50):
    """Cyclic complex Jacobi diagonalization; returns (ascending eigenvalues, columns).

    Slow and intended for small matrices; kept as an independent check on
    :func:`herm_eig`.
    """
    a = check_hermitian(h, name="h").copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a) ** 2) - np.sum(np.abs(np.diag(a)) ** 2))
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                # unitary phase turns a[p, q] real, then a real Givens rotation
                phase = apq / abs(apq)
                app, aqq = a[p, p].real, a[q, q].real
                theta = 0.5 * np.arctan2(2 * abs(apq), aqq - app)
                c, s = np.cos(theta), np.sin(theta)
                rot = np.eye(n, dtype=complex)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s * phase
                rot[q, p] = -s * np.conj(phase)
                a = rot.conj().T @ a @ rot
                v = v @ rot
    w = np.diag(a).real
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def expm_i_hermitian(a, s: float) -> np.ndarray:
    """exp(i*s*a) for Hermitian ``a`` by spectral decomposition."""
    a = check_hermitian(a, tol=1e-9, name="a")
    w, v = np.linalg.eigh(a)
    return (v * np.exp(1j * s * w)) @ v.conj().T


def wrap_phase(x):
    """Reduce an angle to the branch (-pi, pi]."""
    y = np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2 * np.pi)
    return float(y) if np.ndim(y) == 0 else y


def phase_distance(a, b) -> float:
    """Distance between two angles on the circle, in [0, pi]."""
    return np.abs(wrap_phase(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))
