"""Circuit construction for one product-formula step per time point.

Each acquisition time t gets its own shallow circuit: prepare the uniform
transverse state, apply one first-order product-formula factor per
Hamiltonian term scaled by the full t, rotate the measurement basis onto
X or Y, and read out. The term order is the Hamiltonian's canonical order
(offsets by spin, couplings by (i, j)); within a coupling the factors are
XX then YY then ZZ, which all commute with each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ValidationError
from .gates import Gate, GateKind, gate
from .hamiltonian import PauliTermList

AXIS_X = "X"
AXIS_Y = "Y"


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list on ``width`` wires, with acquisition metadata.

    ``metadata`` may carry transpiler products (layouts, schedules); it is
    not interpreted by the simulator.
    """

    width: int
    gates: tuple[Gate, ...]
    time_point: float | None = None
    measured_qubits: tuple[int, ...] = ()
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.width < 1:
            raise ValidationError(f"circuit width must be >= 1, got {self.width}")
        seen_measure = False
        for g in self.gates:
            if any(q >= self.width for q in g.qubits):
                raise ValidationError(
                    f"gate {g.kind.value} {g.qubits} exceeds width {self.width}"
                )
            if g.kind is GateKind.MEASURE:
                seen_measure = True
            elif seen_measure:
                raise ValidationError("measurement must come after all other gates")
        if len(set(self.measured_qubits)) != len(self.measured_qubits):
            raise ValidationError("repeated measured qubit")
        if any(q >= self.width for q in self.measured_qubits):
            raise ValidationError("measured qubit exceeds width")

    @property
    def body(self) -> tuple[Gate, ...]:
        """Gates excluding trailing measurements."""
        return tuple(g for g in self.gates if g.kind is not GateKind.MEASURE)

    def two_qubit_count(self) -> int:
        return sum(1 for g in self.gates if g.is_two_qubit)

    def replace_gates(self, gates, **meta) -> "Circuit":
        merged = dict(self.metadata)
        merged.update(meta)
        return Circuit(
            self.width, tuple(gates), self.time_point, self.measured_qubits, merged
        )


def prepare_plus_state_gates(width: int) -> list[Gate]:
    """One Hadamard per wire: |0..0> -> uniform superposition."""
    if width < 1:
        raise ValidationError(f"width must be >= 1, got {width}")
    return [gate(GateKind.PREPH, q) for q in range(width)]


def trotter_step_gates(h: PauliTermList, t: float) -> list[Gate]:
    """One product-formula factor per term, each scaled by the full time t."""
    if not math.isfinite(t):
        raise ValidationError(f"time must be finite, got {t}")
    gates: list[Gate] = []
    for k, omega in h.z_terms:
        gates.append(gate(GateKind.RZ, k, params=(omega * t,)))
    for i, j, c in h.coupling_terms:
        angle = 0.5 * c * t
        gates.append(gate(GateKind.RXX, i, j, params=(angle,)))
        gates.append(gate(GateKind.RYY, i, j, params=(angle,)))
        gates.append(gate(GateKind.RZZ, i, j, params=(angle,)))
    return gates


def measurement_rotation_gates(axis: str, qubits) -> list[Gate]:
    """Map the chosen transverse axis onto the computational Z axis.

    X: a Hadamard. Y: the single-qubit rotation equal to H * Sdg up to
    global phase, so that measuring Z afterwards reads out Y.
    """
    if axis == AXIS_X:
        return [gate(GateKind.PREPH, q) for q in qubits]
    if axis == AXIS_Y:
        half_pi = math.pi / 2
        return [
            gate(GateKind.SU2, q, params=(half_pi, 0.0, half_pi)) for q in qubits
        ]
    raise ValidationError(f"axis must be 'X' or 'Y', got {axis!r}")


def observable_circuit(
    h: PauliTermList,
    t: float,
    axis: str,
    measured_qubits=None,
) -> Circuit:
    """Full circuit for one acquisition time: prepare, evolve, rotate, measure."""
    width = h.n_spins
    if measured_qubits is None:
        measured_qubits = tuple(range(width))
    else:
        measured_qubits = tuple(measured_qubits)
    gates = prepare_plus_state_gates(width)
    gates += trotter_step_gates(h, t)
    gates += measurement_rotation_gates(axis, measured_qubits)
    gates += [gate(GateKind.MEASURE, q) for q in measured_qubits]
    return Circuit(width, tuple(gates), time_point=t, measured_qubits=measured_qubits)


def logical_two_qubit_depth(circuit: Circuit) -> int:
    """Depth counting only two-qubit gates; single-qubit gates are free."""
    level = [0] * circuit.width
    depth = 0
    for g in circuit.gates:
        if not g.is_two_qubit:
            continue
        i, j = g.qubits
        d = max(level[i], level[j]) + 1
        level[i] = level[j] = d
        depth = max(depth, d)
    return depth


def serialize_circuit(circuit: Circuit) -> str:
    """Line-oriented text form; parse_circuit inverts it exactly."""
    lines = [f"WIDTH {circuit.width}"]
    if circuit.time_point is not None:
        lines.append(f"TIME {circuit.time_point!r}")
    if circuit.measured_qubits:
        lines.append("MEASURED " + " ".join(str(q) for q in circuit.measured_qubits))
    for g in circuit.gates:
        parts = [g.kind.value] + [str(q) for q in g.qubits]
        parts += [repr(p) for p in g.params]
        if g.tag:
            parts.append(f"tag={g.tag}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> Circuit:
    width = None
    time_point = None
    measured: tuple[int, ...] = ()
    gates: list[Gate] = []
    kinds = {k.value: k for k in GateKind}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        try:
            if head == "WIDTH":
                width = int(parts[1])
            elif head == "TIME":
                time_point = float(parts[1])
            elif head == "MEASURED":
                measured = tuple(int(p) for p in parts[1:])
            elif head in kinds:
                kind = kinds[head]
                tag = ""
                if parts and parts[-1].startswith("tag="):
                    tag = parts[-1][4:]
                    parts = parts[:-1]
                nq = 2 if kind in {
                    GateKind.RXX, GateKind.RYY, GateKind.RZZ,
                    GateKind.CZ, GateKind.SWAP,
                } else 1
                qubits = tuple(int(p) for p in parts[1:1 + nq])
                params = tuple(float(p) for p in parts[1 + nq:])
                gates.append(Gate(kind, qubits, params, tag))
            else:
                raise ValueError(f"unknown line {head!r}")
        except (ValueError, IndexError) as exc:
            raise ValidationError(f"circuit line {line_no}: {exc}") from exc
    if width is None:
        raise ValidationError("circuit text missing WIDTH")
    return Circuit(width, tuple(gates), time_point, measured)
