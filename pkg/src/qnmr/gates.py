"""Gate vocabulary shared by circuit generation, simulation and rewriting.

Angle conventions:

* ``RZ(a) = exp(-i a Z / 2)``
* ``RXX/RYY/RZZ(a) = exp(-i a P (x) P / 2)`` for the matching Pauli pair
* ``SU2(theta, phi, lam) = RZ(phi) RY(theta) RZ(lam)`` (general 1q rotation
  up to global phase)

Two-qubit matrices are written in the basis ordered as ``|b1 b0>`` where
``b0`` is the first qubit listed on the gate; all two-qubit kinds used here
are symmetric under qubit exchange except that convention still matters for
consumers building explicit matrices.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


class GateKind(enum.Enum):
    PREPH = "PREPH"
    PAULIX = "PAULIX"
    RZ = "RZ"
    RXX = "RXX"
    RYY = "RYY"
    RZZ = "RZZ"
    CZ = "CZ"
    SU2 = "SU2"
    SWAP = "SWAP"
    MEASURE = "MEASURE"


# qubits, params expected per kind
_ARITY = {
    GateKind.PREPH: (1, 0),
    GateKind.PAULIX: (1, 0),
    GateKind.RZ: (1, 1),
    GateKind.RXX: (2, 1),
    GateKind.RYY: (2, 1),
    GateKind.RZZ: (2, 1),
    GateKind.CZ: (2, 0),
    GateKind.SU2: (1, 3),
    GateKind.SWAP: (2, 0),
    GateKind.MEASURE: (1, 0),
}

TWO_QUBIT_KINDS = frozenset(
    k for k, (nq, _) in _ARITY.items() if nq == 2
)


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    tag: str = ""

    def __post_init__(self) -> None:
        nq, np_ = _ARITY[self.kind]
        if len(self.qubits) != nq:
            raise ValidationError(
                f"{self.kind.value} takes {nq} qubit(s), got {self.qubits}"
            )
        if len(self.params) != np_:
            raise ValidationError(
                f"{self.kind.value} takes {np_} parameter(s), got {self.params}"
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise ValidationError(f"repeated qubit in {self.kind.value} {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValidationError(f"negative qubit index in {self.qubits}")
        if not all(math.isfinite(p) for p in self.params):
            raise ValidationError(f"non-finite angle in {self.kind.value} {self.params}")

    @property
    def is_two_qubit(self) -> bool:
        return self.kind in TWO_QUBIT_KINDS

    def on(self, *qubits: int) -> "Gate":
        """Same gate relocated to other wires."""
        return Gate(self.kind, tuple(qubits), self.params, self.tag)


def gate(kind: GateKind, *qubits: int, params: tuple[float, ...] = (), tag: str = "") -> Gate:
    return Gate(kind, tuple(qubits), tuple(float(p) for p in params), tag)


MAT_I = np.eye(2, dtype=complex)
MAT_X = np.array([[0, 1], [1, 0]], dtype=complex)
MAT_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
MAT_Z = np.array([[1, 0], [0, -1]], dtype=complex)
MAT_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
MAT_S = np.diag([1.0, 1j]).astype(complex)
MAT_SDG = np.diag([1.0, -1j]).astype(complex)
MAT_SX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex)


def rz_matrix(a: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * a), np.exp(0.5j * a)])


def ry_matrix(a: float) -> np.ndarray:
    c, s = math.cos(a / 2), math.sin(a / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rx_matrix(a: float) -> np.ndarray:
    c, s = math.cos(a / 2), math.sin(a / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def su2_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    return rz_matrix(phi) @ ry_matrix(theta) @ rz_matrix(lam)


def _two_pauli_rotation(a: float, pauli: np.ndarray) -> np.ndarray:
    pp = np.kron(pauli, pauli)
    return math.cos(a / 2) * np.eye(4, dtype=complex) - 1j * math.sin(a / 2) * pp


def gate_matrix(g: Gate) -> np.ndarray:
    """Dense local unitary (2x2 or 4x4, see module docstring for ordering)."""
    if g.kind is GateKind.PREPH:
        return MAT_H
    if g.kind is GateKind.PAULIX:
        return MAT_X
    if g.kind is GateKind.RZ:
        return rz_matrix(g.params[0])
    if g.kind is GateKind.SU2:
        return su2_matrix(*g.params)
    if g.kind is GateKind.RXX:
        return _two_pauli_rotation(g.params[0], MAT_X)
    if g.kind is GateKind.RYY:
        return _two_pauli_rotation(g.params[0], MAT_Y)
    if g.kind is GateKind.RZZ:
        return _two_pauli_rotation(g.params[0], MAT_Z)
    if g.kind is GateKind.CZ:
        return np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
    if g.kind is GateKind.SWAP:
        m = np.eye(4, dtype=complex)
        m[[1, 2]] = m[[2, 1]]
        return m
    raise ValidationError(f"{g.kind.value} has no matrix form")


def zyz_angles(u: np.ndarray, tol: float = 1e-12) -> tuple[float, float, float, float]:
    """Euler angles (theta, phi, lam, phase) with u = e^{i phase} SU2(...)."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValidationError(f"expected 2x2 matrix, got {u.shape}")
    det = u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0]
    phase = 0.5 * np.angle(det)
    v = u * np.exp(-1j * phase)
    theta = 2.0 * math.atan2(abs(v[1, 0]), abs(v[0, 0]))
    if abs(v[0, 0]) < tol:
        phi = 2.0 * np.angle(v[1, 0])
        lam = 0.0
    elif abs(v[1, 0]) < tol:
        phi = 2.0 * np.angle(v[1, 1])
        lam = 0.0
    else:
        phi = np.angle(v[1, 1]) + np.angle(v[1, 0])
        lam = np.angle(v[1, 1]) - np.angle(v[1, 0])
    return float(theta), float(phi), float(lam), float(phase)


def su2_gate(qubit: int, u: np.ndarray, tag: str = "") -> Gate:
    """Single SU2 gate implementing u up to global phase."""
    theta, phi, lam, _ = zyz_angles(u)
    return Gate(GateKind.SU2, (qubit,), (theta, phi, lam), tag)
