"""Idle-window decoupling pulses, inserted after all other rewriting.

Gates are scheduled as-soon-as-possible from the per-kind durations.
Whenever a wire sits idle between two of its operations for at least
twice the single-qubit gate time, an X-X pulse pair goes in, centered
at the quarter and three-quarter points of the window; that spacing
refocuses quasi-static dephasing and the pair composes to identity, so
noiseless results are unchanged. Windows before a wire's first
operation are skipped: the wire still holds its reset state there.

The returned circuit carries the full schedule in its metadata as
(start, duration) pairs aligned with the gate tuple; downstream noise
models read idle times from it rather than rescheduling.
"""

from __future__ import annotations

from ..circuits import Circuit
from ..errors import ValidationError
from ..gates import Gate, GateKind, gate

DD_TAG = "dd"


def _gate_duration(g: Gate, durations) -> float:
    d1, d2, dro = durations
    if g.kind is GateKind.MEASURE:
        return dro
    return d2 if g.is_two_qubit else d1


def _acquisition_start(gates, width: int, durations) -> float:
    """Common readout start: when every measured wire has gone quiet.

    Acquisition is simultaneous across wires, so a wire that finishes
    its gates early idles until the slowest measured wire catches up.
    """
    avail = [0.0] * width
    latest = 0.0
    for g in gates:
        if g.kind is GateKind.MEASURE:
            latest = max(latest, avail[g.qubits[0]])
            continue
        dur = _gate_duration(g, durations)
        start = max(avail[q] for q in g.qubits)
        for q in g.qubits:
            avail[q] = start + dur
    return latest


def schedule_gates(gates, width: int, durations) -> list[tuple[float, float]]:
    """As-soon-as-possible (start, duration) for each gate in order.

    Measurements all start together at the acquisition time.
    """
    acquisition = _acquisition_start(gates, width, durations)
    avail = [0.0] * width
    out = []
    for g in gates:
        dur = _gate_duration(g, durations)
        if g.kind is GateKind.MEASURE:
            start = acquisition
        else:
            start = max(avail[q] for q in g.qubits)
        for q in g.qubits:
            avail[q] = start + dur
        out.append((start, dur))
    return out


def insert_dynamical_decoupling(
    circuit: Circuit,
    durations,
    min_gap: float | None = None,
) -> Circuit:
    """Fill long idle windows with tagged X-X pulse pairs.

    durations is the (single-qubit, two-qubit, readout) gate time
    triple. min_gap defaults to twice the single-qubit time, the
    shortest window the two pulses physically fit in.
    """
    d1, d2, dro = (float(d) for d in durations)
    if min(d1, d2, dro) <= 0.0:
        raise ValidationError("durations must be positive")
    threshold = 2.0 * d1 if min_gap is None else float(min_gap)
    if threshold < 2.0 * d1:
        raise ValidationError(
            f"min_gap {threshold} cannot fit two pulses of duration {d1}"
        )

    acquisition = _acquisition_start(circuit.gates, circuit.width, durations)
    avail = [0.0] * circuit.width
    seen = [False] * circuit.width
    starts: list[float] = []
    pulse_lists: list[list[tuple[float, Gate]]] = []
    for g in circuit.gates:
        dur = _gate_duration(g, durations)
        if g.kind is GateKind.MEASURE:
            start = acquisition
        else:
            start = max(avail[q] for q in g.qubits)
        pulses: list[tuple[float, Gate]] = []
        for q in g.qubits:
            gap = start - avail[q]
            if seen[q] and gap >= threshold:
                for frac in (0.25, 0.75):
                    t = avail[q] + frac * gap - 0.5 * d1
                    pulses.append((t, gate(GateKind.PAULIX, q, tag=DD_TAG)))
            avail[q] = start + dur
            seen[q] = True
        starts.append(start)
        pulse_lists.append(pulses)

    # Pulses filling gaps that end at a measurement must still precede
    # every measurement in list order, so they are hoisted together.
    first_measure = next(
        (k for k, g in enumerate(circuit.gates) if g.kind is GateKind.MEASURE),
        len(circuit.gates),
    )
    hoisted = sorted(
        (item for pulses in pulse_lists[first_measure:] for item in pulses),
        key=lambda item: (item[0], item[1].qubits),
    )

    gates: list[Gate] = []
    schedule: list[tuple[float, float]] = []

    def emit_pulses(items) -> None:
        for t, pulse in items:
            gates.append(pulse)
            schedule.append((t, d1))

    for idx, g in enumerate(circuit.gates):
        if idx == first_measure:
            emit_pulses(hoisted)
        if idx < first_measure:
            emit_pulses(sorted(pulse_lists[idx], key=lambda item: item[0]))
        gates.append(g)
        schedule.append((starts[idx], _gate_duration(g, durations)))
    if first_measure == len(circuit.gates):
        emit_pulses(hoisted)

    return circuit.replace_gates(
        gates,
        schedule=tuple(schedule),
        durations=(d1, d2, dro),
    )
