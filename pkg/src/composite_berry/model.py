"""Two-qubit composite system: spin 1 in a rotating field, coupled to spin 2.

H(phi) = (B/2) n(theta, phi).sigma (x) I + g C, with C fixed by the coupling
kind. Units: hbar = 1, energies in units of B.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .linalg import I2, PAULI, SX, SY, SZ, herm_eig, ket_product, tensor_product

# XXminusYY is a reconstruction: the original Hamiltonian is not given in the
# reply, only its g=0 degenerate eigenstates and the adiabatic gap scaling.
RECONSTRUCTION_DISCLAIMER = (
    "Hamiltonian reconstructed: H = (B/2) n.sigma1 + g*C(kind); "
    "the xx-minus-yy coupling is a best-fit reconstruction, not the original model"
)


class CouplingKind(str, enum.Enum):
    XX_MINUS_YY = "xx-minus-yy"
    HEISENBERG = "heisenberg"
    ISING = "ising"
    XY = "xy"


# J[a, b] weights sigma_a (x) sigma_b in C
_COUPLING_J = {
    CouplingKind.XX_MINUS_YY: np.diag([1.0, -1.0, 0.0]),
    CouplingKind.HEISENBERG: np.eye(3),
    CouplingKind.ISING: np.diag([0.0, 0.0, 1.0]),
    CouplingKind.XY: np.diag([1.0, 1.0, 0.0]),
}


class BasisLabel(str, enum.Enum):
    REPLY = "reply_basis"
    PRIMED = "primed_basis"


@dataclass(frozen=True)
class ModelParams:
    theta: float
    g: float = 0.0
    b_field: float = 1.0
    omega: float = 1e-3
    coupling_kind: CouplingKind = CouplingKind.XX_MINUS_YY

    def __post_init__(self):
        if not 0.0 <= self.theta <= np.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if self.g < 0:
            raise ValueError(f"g must be >= 0, got {self.g}")
        if self.b_field <= 0:
            raise ValueError(f"b_field must be > 0, got {self.b_field}")
        if self.omega <= 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        object.__setattr__(self, "coupling_kind", CouplingKind(self.coupling_kind))

    def with_(self, **kw) -> "ModelParams":
        return replace(self, **kw)


@dataclass(frozen=True)
class DegeneratePair:
    psi_a: np.ndarray
    psi_b: np.ndarray
    label: BasisLabel

    def as_list(self):
        return [self.psi_a, self.psi_b]


def field_direction(theta: float, phi: float) -> np.ndarray:
    if not 0.0 <= theta <= np.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    st = np.sin(theta)
    return np.array([st * np.cos(phi), st * np.sin(phi), np.cos(theta)])


def coupling_matrix(kind) -> np.ndarray:
    j = _COUPLING_J[CouplingKind(kind)]
    c = np.zeros((4, 4), dtype=complex)
    for a in range(3):
        for b in range(3):
            if j[a, b]:
                c += j[a, b] * tensor_product(PAULI[a], PAULI[b])
    return c


def spin_operator(n) -> np.ndarray:
    return n[0] * SX + n[1] * SY + n[2] * SZ


def hamiltonian(params: ModelParams, phi: float) -> np.ndarray:
    n = field_direction(params.theta, phi)
    h = 0.5 * params.b_field * tensor_product(spin_operator(n), I2)
    if params.g:
        h = h + params.g * coupling_matrix(params.coupling_kind)
    return h


def hamiltonian_fourier(params: ModelParams):
    """(H0, Hc, Hs) with H(phi) = H0 + cos(phi) Hc + sin(phi) Hs."""
    h0 = 0.5 * (hamiltonian(params, 0.0) + hamiltonian(params, np.pi))
    hc = 0.5 * (hamiltonian(params, 0.0) - hamiltonian(params, np.pi))
    hs = hamiltonian(params, 0.5 * np.pi) - h0
    return h0, hc, hs


def hamiltonians(params: ModelParams, phis) -> np.ndarray:
    """H at each phi in ``phis``, stacked as (len(phis), 4, 4)."""
    phis = np.asarray(phis, dtype=float)
    h0, hc, hs = hamiltonian_fourier(params)
    return h0 + np.cos(phis)[:, None, None] * hc + np.sin(phis)[:, None, None] * hs


def spin1_state(theta: float, phi: float) -> np.ndarray:
    """cos(theta/2) e^{-i phi}|up> + sin(theta/2)|down>, the +1 eigenstate of n.sigma."""
    return np.array([np.cos(theta / 2) * np.exp(-1j * phi), np.sin(theta / 2)])


def spin2_reply_state(phi: float, sign: int) -> np.ndarray:
    """(|down> + sign e^{i phi}|up>)/sqrt(2)."""
    return np.array([sign * np.exp(1j * phi), 1.0]) / np.sqrt(2)


def degenerate_basis(theta: float, phi: float) -> DegeneratePair:
    f = spin1_state(theta, phi)
    return DegeneratePair(
        ket_product(f, spin2_reply_state(phi, +1)),
        ket_product(f, spin2_reply_state(phi, -1)),
        BasisLabel.REPLY,
    )


def primed_basis(theta: float, phi: float) -> DegeneratePair:
    f = spin1_state(theta, phi)
    return DegeneratePair(
        ket_product(f, np.array([1.0, 0.0])),
        ket_product(f, np.array([0.0, 1.0])),
        BasisLabel.PRIMED,
    )


def basis_path(label, theta: float):
    """phi -> [psi_a, psi_b] at fixed theta, for either preset basis."""
    make = degenerate_basis if BasisLabel(label) is BasisLabel.REPLY else primed_basis
    return lambda phi: make(theta, phi).as_list()


def effective_coupling_operator(theta: float, phi: float, kind=CouplingKind.XX_MINUS_YY):
    """First-order operator M on spin 2, H_eff = B/2 + g M in the upper g=0 cluster."""
    n = field_direction(theta, phi)
    m = n @ _COUPLING_J[CouplingKind(kind)]
    return spin_operator(m)


def projected_coupling(theta: float, phi: float, kind=CouplingKind.XX_MINUS_YY):
    """Brute-force projection of C onto the upper g=0 cluster, in the primed basis.

    The primed basis f (x) |up>, f (x) |down> maps the cluster onto spin 2's
    computational basis, so this 2x2 matrix is directly comparable to
    :func:`effective_coupling_operator`.
    """
    vecs = np.column_stack(primed_basis(theta, phi).as_list())
    return vecs.conj().T @ coupling_matrix(kind) @ vecs


def rotation_generator(kind) -> np.ndarray:
    """Generator G with H(phi) = exp(-i phi G) H(0) exp(i phi G).

    Spin 1 always rotates with the field. The xx-minus-yy coupling
    (sigma+ sigma+ + h.c.) is only invariant when spin 2 counter-rotates;
    the other presets conserve total S_z.
    """
    kind = CouplingKind(kind)
    s2 = -1.0 if kind is CouplingKind.XX_MINUS_YY else 1.0
    return 0.5 * (tensor_product(SZ, I2) + s2 * tensor_product(I2, SZ))


def rotation(phi: float, kind) -> np.ndarray:
    d = np.diag(rotation_generator(kind)).real
    return np.diag(np.exp(-1j * phi * d))


def spectral_gap(params: ModelParams, phi: float, level: int) -> float:
    if not 0 <= level <= 3:
        raise ValueError(f"level must be in 0..3, got {level}")
    w = np.linalg.eigvalsh(hamiltonian(params, phi))
    others = np.delete(w, level)
    return float(np.min(np.abs(others - w[level])))


def eigensystem(params: ModelParams, phi: float):
    return herm_eig(hamiltonian(params, phi))


def reply_level_map(params: ModelParams) -> dict:
    """Which ascending-index levels continue the reply's upper degenerate pair.

    Evaluated at phi = 0 with the coupling reduced to a small reference value,
    by overlap with span{Psi_a, Psi_b}.
    """
    g_ref = min(params.g, 1e-3 * params.b_field) if params.g > 0 else 1e-3 * params.b_field
    ref = params.with_(g=g_ref)
    eig = eigensystem(ref, 0.0)
    pair = np.column_stack(degenerate_basis(params.theta, 0.0).as_list())
    weight = np.sum(np.abs(pair.conj().T @ eig.eigenvectors) ** 2, axis=0)
    levels = [int(i) for i in np.argsort(-weight, kind="stable")[:2]]
    return {"upper_pair_levels": sorted(levels), "reference_g": g_ref, "reference_phi": 0.0}
