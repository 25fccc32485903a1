"""Idle-window decoupling pulses: placement, scheduling, transparency."""

import numpy as np
import pytest

from qnmr.circuits import Circuit
from qnmr.engine import probabilities, run_circuit
from qnmr.errors import ValidationError
from qnmr.gates import GateKind, gate
from qnmr.transpile import DD_TAG, insert_dynamical_decoupling, schedule_gates

DUR = (0.1, 0.2, 1.0)


def su2(q):
    return gate(GateKind.SU2, q, params=(0.3, 0.1, 0.4))


def idle_gap_circuit(fillers=8):
    # wire 0 acts once, then waits for wire 1 to finish a long run
    gates = [su2(0)] + [su2(1) for _ in range(fillers)] + [gate(GateKind.CZ, 0, 1)]
    return Circuit(2, tuple(gates))


def dd_pulses(circuit):
    return [g for g in circuit.gates if g.tag == DD_TAG]


def test_schedule_is_asap():
    c = idle_gap_circuit(fillers=3)
    sched = schedule_gates(c.gates, c.width, DUR)
    assert sched[0] == (0.0, 0.1)
    assert sched[1] == (0.0, 0.1)
    assert sched[3] == (pytest.approx(0.2), 0.1)
    # the entangler starts when its busiest wire frees up
    assert sched[4] == (pytest.approx(0.3), 0.2)


def test_measurements_start_together():
    gates = (su2(0), su2(1), su2(1), su2(1),
             gate(GateKind.MEASURE, 0), gate(GateKind.MEASURE, 1))
    c = Circuit(2, gates, measured_qubits=(0, 1))
    sched = schedule_gates(c.gates, c.width, DUR)
    # wire 0 is free at 0.1 but acquisition waits for wire 1
    assert sched[4] == (pytest.approx(0.3), 1.0)
    assert sched[5] == (pytest.approx(0.3), 1.0)


def test_long_gap_gets_one_pulse_pair():
    out = insert_dynamical_decoupling(idle_gap_circuit(), DUR)
    pulses = dd_pulses(out)
    assert len(pulses) == 2
    assert all(p.kind is GateKind.PAULIX and p.qubits == (0,) for p in pulses)


def test_pulse_timing_quarters_the_gap():
    out = insert_dynamical_decoupling(idle_gap_circuit(), DUR)
    sched = out.metadata["schedule"]
    times = [sched[k][0] for k, g in enumerate(out.gates) if g.tag == DD_TAG]
    # gap runs from 0.1 to 0.8; pulse centers sit at the quarter points
    assert times == [pytest.approx(0.1 + 0.25 * 0.7 - 0.05),
                     pytest.approx(0.1 + 0.75 * 0.7 - 0.05)]


def test_short_gaps_left_alone():
    c = Circuit(2, (su2(0), su2(1), gate(GateKind.CZ, 0, 1), su2(0), su2(1)))
    out = insert_dynamical_decoupling(c, DUR)
    assert dd_pulses(out) == []
    assert out.gates == c.gates


def test_leading_idle_is_not_filled():
    # wire 0 first acts late; the wait before its first gate is not a gap
    gates = [su2(1) for _ in range(8)] + [gate(GateKind.CZ, 0, 1)]
    out = insert_dynamical_decoupling(Circuit(2, tuple(gates)), DUR)
    assert dd_pulses(out) == []


def test_pulse_pairs_are_transparent():
    rng = np.random.default_rng(61)
    gates = []
    for _ in range(14):
        if rng.random() < 0.5:
            q = int(rng.integers(0, 3))
            gates.append(gate(GateKind.SU2, q,
                              params=tuple(rng.uniform(-3, 3, 3))))
        else:
            i, j = rng.choice(3, size=2, replace=False)
            gates.append(gate(GateKind.CZ, int(i), int(j)))
    gates += [gate(GateKind.MEASURE, q) for q in range(3)]
    c = Circuit(3, tuple(gates), measured_qubits=(0, 1, 2))
    out = insert_dynamical_decoupling(c, DUR)
    p_before = probabilities(run_circuit(c))
    p_after = probabilities(run_circuit(out))
    np.testing.assert_allclose(p_after, p_before, atol=1e-12)


def test_gap_before_measurement_is_decoupled():
    gates = [su2(0)] + [su2(1) for _ in range(8)]
    gates += [gate(GateKind.MEASURE, 0), gate(GateKind.MEASURE, 1)]
    c = Circuit(2, tuple(gates), measured_qubits=(0, 1))
    out = insert_dynamical_decoupling(c, DUR)
    pulses = dd_pulses(out)
    assert len(pulses) == 2
    kinds = [g.kind for g in out.gates]
    first_measure = kinds.index(GateKind.MEASURE)
    assert all(k is GateKind.MEASURE for k in kinds[first_measure:])


def test_schedule_metadata_is_aligned_and_disjoint():
    out = insert_dynamical_decoupling(idle_gap_circuit(), DUR)
    sched = out.metadata["schedule"]
    assert len(sched) == len(out.gates)
    assert out.metadata["durations"] == DUR
    by_wire = {0: [], 1: []}
    for (start, dur), g in zip(sched, out.gates):
        for q in g.qubits:
            by_wire[q].append((start, start + dur))
    for intervals in by_wire.values():
        intervals.sort()
        for (_, end), (nxt, _) in zip(intervals, intervals[1:]):
            assert nxt >= end - 1e-12


def test_custom_threshold_suppresses_pulses():
    out = insert_dynamical_decoupling(idle_gap_circuit(), DUR, min_gap=5.0)
    assert dd_pulses(out) == []


def test_bad_arguments_rejected():
    c = idle_gap_circuit()
    with pytest.raises(ValidationError):
        insert_dynamical_decoupling(c, (0.0, 0.2, 1.0))
    with pytest.raises(ValidationError):
        insert_dynamical_decoupling(c, DUR, min_gap=0.1)
