"""Dense statevector execution of circuits, exact or shot-sampled.

States are little-endian: basis index bit k is the state of qubit k.
Kernels mutate the state buffer in place through reshaped views; a gate
touches the full array once, so memory traffic stays near one state copy
per gate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError, ValidationError
from .gates import Gate, GateKind, gate_matrix

DEFAULT_WIDTH_LIMIT = 26


def check_width(width: int, max_width: int | None = None) -> None:
    limit = DEFAULT_WIDTH_LIMIT if max_width is None else max_width
    if width > limit:
        raise CapabilityError(
            f"statevector of {width} qubits exceeds the {limit}-qubit limit "
            f"({2 ** width} amplitudes); raise max_width to override"
        )


def zero_state(width: int, max_width: int | None = None) -> np.ndarray:
    check_width(width, max_width)
    state = np.zeros(1 << width, dtype=complex)
    state[0] = 1.0
    return state


def _apply_single(state: np.ndarray, u: np.ndarray, q: int) -> None:
    view = state.reshape(-1, 2, 1 << q)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :].copy()
    view[:, 0, :] = u[0, 0] * a0 + u[0, 1] * a1
    view[:, 1, :] = u[1, 0] * a0 + u[1, 1] * a1


def _pair_view(state: np.ndarray, i: int, j: int):
    """Axes [high, bit_j, mid, bit_i, low] for i < j."""
    return state.reshape(-1, 2, 1 << (j - i - 1), 2, 1 << i)


def _apply_mix(state, i, j, c, m_aligned, m_anti) -> None:
    """Mix the aligned (00, 11) and anti-aligned (01, 10) bit pairs."""
    v = _pair_view(state, i, j)
    s00 = v[:, 0, :, 0, :].copy()
    s11 = v[:, 1, :, 1, :].copy()
    v[:, 0, :, 0, :] = c * s00 + m_aligned * s11
    v[:, 1, :, 1, :] = c * s11 + m_aligned * s00
    s01 = v[:, 0, :, 1, :].copy()
    s10 = v[:, 1, :, 0, :].copy()
    v[:, 0, :, 1, :] = c * s01 + m_anti * s10
    v[:, 1, :, 0, :] = c * s10 + m_anti * s01


def apply_gate(state: np.ndarray, g: Gate) -> None:
    """Apply one gate in place. Measurement gates are inert here."""
    kind = g.kind
    if kind is GateKind.MEASURE:
        return
    if kind is GateKind.RZ:
        (q,) = g.qubits
        view = state.reshape(-1, 2, 1 << q)
        half = 0.5 * g.params[0]
        view[:, 0, :] *= complex(math.cos(half), -math.sin(half))
        view[:, 1, :] *= complex(math.cos(half), math.sin(half))
        return
    if kind in (GateKind.PREPH, GateKind.PAULIX, GateKind.SU2):
        _apply_single(state, gate_matrix(g), g.qubits[0])
        return
    i, j = sorted(g.qubits)
    if kind is GateKind.RZZ:
        v = _pair_view(state, i, j)
        half = 0.5 * g.params[0]
        aligned = complex(math.cos(half), -math.sin(half))
        anti = aligned.conjugate()
        v[:, 0, :, 0, :] *= aligned
        v[:, 1, :, 1, :] *= aligned
        v[:, 0, :, 1, :] *= anti
        v[:, 1, :, 0, :] *= anti
        return
    if kind is GateKind.CZ:
        v = _pair_view(state, i, j)
        v[:, 1, :, 1, :] *= -1.0
        return
    if kind is GateKind.RXX:
        half = 0.5 * g.params[0]
        m = -1j * math.sin(half)
        _apply_mix(state, i, j, math.cos(half), m, m)
        return
    if kind is GateKind.RYY:
        half = 0.5 * g.params[0]
        s = math.sin(half)
        _apply_mix(state, i, j, math.cos(half), 1j * s, -1j * s)
        return
    if kind is GateKind.SWAP:
        v = _pair_view(state, i, j)
        tmp = v[:, 0, :, 1, :].copy()
        v[:, 0, :, 1, :] = v[:, 1, :, 0, :]
        v[:, 1, :, 0, :] = tmp
        return
    raise ValidationError(f"engine cannot apply {kind.value}")


def apply_pauli(state: np.ndarray, q: int, axis: str) -> None:
    """Apply a single Pauli X, Y or Z on qubit q in place."""
    view = state.reshape(-1, 2, 1 << q)
    if axis == "X":
        tmp = view[:, 0, :].copy()
        view[:, 0, :] = view[:, 1, :]
        view[:, 1, :] = tmp
    elif axis == "Y":
        tmp = view[:, 0, :].copy()
        view[:, 0, :] = -1j * view[:, 1, :]
        view[:, 1, :] = 1j * tmp
    elif axis == "Z":
        view[:, 1, :] *= -1.0
    else:
        raise ValidationError(f"axis must be X, Y or Z, got {axis!r}")


def run_gates(state: np.ndarray, gates) -> np.ndarray:
    for g in gates:
        apply_gate(state, g)
    return state


def run_circuit(circuit, initial_state=None, max_width: int | None = None) -> np.ndarray:
    """Final statevector of a circuit (measurements excluded)."""
    check_width(circuit.width, max_width)
    if initial_state is None:
        state = zero_state(circuit.width, max_width)
    else:
        state = np.array(initial_state, dtype=complex)
        if state.shape != (1 << circuit.width,):
            raise ValidationError(
                f"initial state has shape {state.shape}, circuit width {circuit.width}"
            )
    return run_gates(state, circuit.gates)


def probabilities(state: np.ndarray) -> np.ndarray:
    return np.abs(state) ** 2


def expectation_z(state: np.ndarray, q: int) -> float:
    view = probabilities(state).reshape(-1, 2, 1 << q)
    return float(view[:, 0, :].sum() - view[:, 1, :].sum())


def _pair_overlap(state: np.ndarray, q: int) -> complex:
    """sum over pairs differing in bit q of conj(a[bit=0]) * a[bit=1]."""
    view = state.reshape(-1, 2, 1 << q)
    return complex(np.vdot(view[:, 0, :], view[:, 1, :]))


def expectation_magnetization(state: np.ndarray, qubits, axis: str = "Z") -> float:
    """Exact sum of <sigma_axis>/2 over the chosen qubits, no sampling."""
    qubits = tuple(qubits)
    if not qubits:
        raise ValidationError("observed qubit set must be nonempty")
    if axis == "Z":
        return 0.5 * sum(expectation_z(state, q) for q in qubits)
    if axis == "X":
        return float(sum(_pair_overlap(state, q).real for q in qubits))
    if axis == "Y":
        return float(sum(_pair_overlap(state, q).imag for q in qubits))
    raise ValidationError(f"axis must be X, Y or Z, got {axis!r}")


def transverse_magnetization(state: np.ndarray, qubits) -> complex:
    """<M_X> + i <M_Y> over the chosen qubits in one pass."""
    qubits = tuple(qubits)
    if not qubits:
        raise ValidationError("observed qubit set must be nonempty")
    return complex(sum(_pair_overlap(state, q) for q in qubits))


@dataclass(frozen=True, eq=False)
class ShotCounts:
    """Sparse joint counts over an ordered qubit subset.

    Outcome bit p holds the measured value of ``qubits[p]``.
    """

    qubits: tuple[int, ...]
    n_shots: int
    outcomes: np.ndarray
    counts: np.ndarray

    def __post_init__(self) -> None:
        if self.n_shots < 1:
            raise ValidationError(f"need at least one shot, got {self.n_shots}")
        if int(self.counts.sum()) != self.n_shots:
            raise ValidationError("counts do not sum to n_shots")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ShotCounts):
            return NotImplemented
        return (
            self.qubits == other.qubits
            and self.n_shots == other.n_shots
            and np.array_equal(self.outcomes, other.outcomes)
            and np.array_equal(self.counts, other.counts)
        )

    def as_dict(self) -> dict[int, int]:
        return {int(o): int(c) for o, c in zip(self.outcomes, self.counts)}

    def bit_position(self, qubit: int) -> int:
        return self.qubits.index(qubit)

    def magnetization(self, qubits=None) -> float:
        """Estimate of sum_q <Z_q>/2 over the chosen qubit labels."""
        if qubits is None:
            qubits = self.qubits
        total = 0.0
        for q in qubits:
            p = self.bit_position(q)
            bit = (self.outcomes >> np.uint64(p)) & np.uint64(1)
            ones = int(self.counts[bit == 1].sum())
            total += (self.n_shots - 2 * ones)
        return 0.5 * total / self.n_shots


def marginal_probabilities(state: np.ndarray, width: int, qubits) -> np.ndarray:
    """Joint distribution over the given qubits, bit p = qubits[p]."""
    qubits = tuple(qubits)
    if len(set(qubits)) != len(qubits):
        raise ValidationError("repeated qubit in measurement subset")
    probs = probabilities(state).reshape([2] * width)
    # tensor axis a holds qubit width-1-a
    keep = {width - 1 - q for q in qubits}
    drop = tuple(a for a in range(width) if a not in keep)
    marg = probs.sum(axis=drop) if drop else probs
    remaining = sorted(keep)
    order = [remaining.index(width - 1 - q) for q in reversed(qubits)]
    return marg.transpose(order).ravel()


def sample_shots(state: np.ndarray, width: int, qubits, n_shots: int, rng) -> ShotCounts:
    """Multinomial sampling of the measured-qubit distribution."""
    if n_shots < 1:
        raise ValidationError(f"need at least one shot, got {n_shots}")
    flat = marginal_probabilities(state, width, qubits)
    flat = np.clip(flat, 0.0, None)
    flat /= flat.sum()
    raw = rng.multinomial(n_shots, flat)
    hit = np.nonzero(raw)[0]
    return ShotCounts(tuple(qubits), n_shots, hit.astype(np.uint64), raw[hit])
