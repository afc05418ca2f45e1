"""Quantum-mechanical reference: Pauli algebra, Bell kets and Born-rule probabilities.

Everything here is computed by explicit complex matrix algebra so the module
acts as an oracle independent of the real vector-space construction in
:mod:`chshlab.gudder`.
"""

from __future__ import annotations

import numpy as np

from .algebra import BellState, DirectionLike, unit_vector
from .models import OUTCOMES, BilinearModel

__all__ = [
    "PAULI",
    "spin_operator",
    "projector",
    "bell_ket",
    "born_probability",
    "qm_correlation",
    "qm_joint_probability",
    "QuantumModel",
]

IMAG_TOL = 1e-12

#: sigma_0 (identity) followed by sigma_x, sigma_y, sigma_z.
PAULI = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
PAULI.setflags(write=False)
_PAULI_ROWS = PAULI.reshape(4, 4)

_S = 1 / np.sqrt(2)
# Amplitudes on |uu>, |ud>, |du>, |dd> (kron ordering A (x) B).
_KETS = {
    BellState.PhiPlus: np.array([_S, 0, 0, _S], dtype=complex),
    BellState.PhiMinus: np.array([_S, 0, 0, -_S], dtype=complex),
    BellState.PsiPlus: np.array([0, _S, _S, 0], dtype=complex),
    BellState.PsiMinus: np.array([0, _S, -_S, 0], dtype=complex),
}


def _real(z) -> float:
    z = complex(z)
    if abs(z.imag) > IMAG_TOL:
        raise ArithmeticError(f"expected a real value, imaginary residue {z.imag:.3e}")
    return z.real


def spin_operator(d: DirectionLike) -> np.ndarray:
    """``n . sigma`` for the direction ``d``."""
    return (unit_vector(d) @ _PAULI_ROWS[1:]).reshape(2, 2)


def projector(d: DirectionLike, alpha: int = 1) -> np.ndarray:
    """Pi(n, alpha) = (sigma_0 + alpha n . sigma) / 2."""
    coeff = np.empty(4)
    coeff[0] = 0.5
    coeff[1:] = (0.5 * alpha) * unit_vector(d)
    return (coeff @ _PAULI_ROWS).reshape(2, 2)


def bell_ket(kind) -> np.ndarray:
    return _KETS[BellState.parse(kind)].copy()


def born_probability(phi: DirectionLike, psi: DirectionLike) -> float:
    """Tr(Pi_phi Pi_psi) for the pure qubit states with Bloch vectors phi, psi."""
    return _real(np.trace(projector(phi) @ projector(psi)))


def _expect(ket: np.ndarray, op: np.ndarray) -> float:
    return _real(np.vdot(ket, op @ ket))


def qm_correlation(state, a: DirectionLike, b: DirectionLike) -> float:
    op = np.kron(spin_operator(a), spin_operator(b))
    return _expect(bell_ket(state), op)


def qm_joint_probability(state, a: DirectionLike, b: DirectionLike, alpha: int, beta: int) -> float:
    if alpha not in OUTCOMES or beta not in OUTCOMES:
        raise ValueError(f"outcomes must be +1 or -1, got {alpha}, {beta}")
    op = np.kron(projector(a, alpha), projector(b, beta))
    return _expect(bell_ket(state), op)


class QuantumModel(BilinearModel):
    """Bell-ket expectation values as a :class:`CorrelationModel`."""

    def __init__(self, state=BellState.PsiMinus):
        self.state = BellState.parse(state)
        self.name = f"qm/{self.state.value}"
        ket = bell_ket(self.state)
        self._amp = ket.reshape(2, 2)  # amp[i, j] on |i>_A |j>_B

    def correlation(self, a, b):
        return qm_correlation(self.state, a, b)

    def joint_probabilities(self, a, b):
        return np.array(
            [[qm_joint_probability(self.state, a, b, al, be) for be in OUTCOMES] for al in OUTCOMES]
        )

    def correlation_matrix(self, na, nb):
        # <k|A (x) B|k> = sum conj(K_ij) A_ik B_jl K_kl, batched over operators
        ops_a = np.einsum("ni,ijk->njk", np.atleast_2d(na), PAULI[1:])
        ops_b = np.einsum("ni,ijk->njk", np.atleast_2d(nb), PAULI[1:])
        k = self._amp
        left = np.einsum("ij,nik,kl->njl", k.conj(), ops_a, k)
        e = np.einsum("njl,mjl->nm", left, ops_b)
        if np.max(np.abs(e.imag), initial=0.0) > IMAG_TOL:
            raise ArithmeticError("imaginary residue in batched correlation")
        return e.real
