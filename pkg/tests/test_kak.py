"""Two-qubit synthesis: chamber coordinates, gate counts, reconstruction.

The oracle path rebuilds every synthesized gate list as a dense matrix
through tests/util.py and compares it to the input up to global phase,
independent of the synthesizer's own internal verification.
"""

import math

import numpy as np
import pytest
import scipy.linalg

from util import circuit_unitary, embed, random_unitary

from qnmr.errors import ValidationError
from qnmr.gates import GateKind, gate, gate_matrix, su2_gate
from qnmr.transpile import (
    NATIVE_CZ,
    NATIVE_MS,
    canonical_coordinates,
    cnot_count_for,
    synthesize_two_qubit,
)

QUARTER = math.pi / 4

XX = np.kron(np.array([[0, 1], [1, 0]]), np.array([[0, 1], [1, 0]])).astype(complex)
YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))
ZZ = np.kron(np.diag([1, -1]), np.diag([1, -1])).astype(complex)

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
CZ4 = np.diag([1, 1, 1, -1]).astype(complex)
ISWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]], dtype=complex
)
SWAP4 = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def canonical_matrix(a, b, c):
    return scipy.linalg.expm(1j * (a * XX + b * YY + c * ZZ))


def assert_same_up_to_phase(got, want, atol):
    k = np.unravel_index(np.argmax(np.abs(want)), want.shape)
    phase = got[k] / want[k]
    assert abs(abs(phase) - 1.0) < 1e-8
    np.testing.assert_allclose(got, phase * want, atol=atol)


def dressed(rng, a, b, c):
    locals4 = [np.kron(random_unitary(rng, 2), random_unitary(rng, 2))
               for _ in range(2)]
    return locals4[0] @ canonical_matrix(a, b, c) @ locals4[1]


@pytest.mark.parametrize("matrix, coords", [
    (np.eye(4, dtype=complex), (0.0, 0.0, 0.0)),
    (CZ4, (QUARTER, 0.0, 0.0)),
    (CNOT, (QUARTER, 0.0, 0.0)),
    (ISWAP, (QUARTER, QUARTER, 0.0)),
    (SWAP4, (QUARTER, QUARTER, QUARTER)),
])
def test_known_class_coordinates(matrix, coords):
    got = canonical_coordinates(matrix)
    np.testing.assert_allclose(got, coords, atol=1e-9)


def test_pair_rotation_coordinates():
    for theta in (0.3, 1.0, math.pi / 2):
        for kind in (GateKind.RXX, GateKind.RYY, GateKind.RZZ):
            m = gate_matrix(gate(kind, 0, 1, params=(theta,)))
            got = canonical_coordinates(m)
            np.testing.assert_allclose(got, (theta / 2, 0.0, 0.0), atol=1e-9)


def test_coordinates_live_in_the_chamber():
    rng = np.random.default_rng(11)
    for _ in range(60):
        a, b, c = canonical_coordinates(random_unitary(rng, 4))
        assert QUARTER + 1e-12 >= a >= b >= abs(c) >= 0.0
        if abs(a - QUARTER) < 1e-12 or abs(c) < 1e-12:
            assert c >= 0.0


def test_coordinates_invariant_under_local_dressing():
    rng = np.random.default_rng(12)
    for _ in range(25):
        u = random_unitary(rng, 4)
        base = canonical_coordinates(u)
        k1 = np.kron(random_unitary(rng, 2), random_unitary(rng, 2))
        k2 = np.kron(random_unitary(rng, 2), random_unitary(rng, 2))
        phase = np.exp(1j * rng.uniform(0, 2 * math.pi))
        got = canonical_coordinates(phase * k1 @ u @ k2)
        np.testing.assert_allclose(got, base, atol=1e-7)


def test_canonical_triples_recovered():
    rng = np.random.default_rng(13)
    for _ in range(40):
        a = rng.uniform(0.02, QUARTER - 0.02)
        b = rng.uniform(0.01, a)
        c = rng.uniform(-b, b)
        got = canonical_coordinates(dressed(rng, a, b, c))
        np.testing.assert_allclose(got, (a, b, c), atol=1e-7)


@pytest.mark.parametrize("coords, count", [
    ((0.0, 0.0, 0.0), 0),
    ((QUARTER, 0.0, 0.0), 1),
    ((0.3, 0.2, 0.0), 2),
    ((QUARTER, 0.1, 0.0), 2),
    ((0.3, 0.2, 0.1), 3),
    ((QUARTER, QUARTER, QUARTER), 3),
    ((0.3, 0.2, -0.1), 3),
])
def test_gate_count_classes(coords, count):
    assert cnot_count_for(coords) == count


def native_two_qubit_gates(gates, native):
    picked = [g for g in gates if g.is_two_qubit]
    for g in picked:
        if native == NATIVE_CZ:
            assert g.kind is GateKind.CZ
        else:
            assert g.kind is GateKind.RXX
            assert abs(abs(g.params[0]) - math.pi / 2) < 1e-12
    return picked


def test_synthesis_random_unitaries_exact_count():
    rng = np.random.default_rng(14)
    for _ in range(40):
        u = random_unitary(rng, 4)
        want = cnot_count_for(canonical_coordinates(u))
        gates = synthesize_two_qubit(u)
        assert len(native_two_qubit_gates(gates, NATIVE_CZ)) == want
        got = circuit_unitary(gates, 2)
        assert_same_up_to_phase(got, u, atol=1e-8)


def test_synthesis_special_classes():
    cases = [
        (np.eye(4, dtype=complex), 0),
        (np.kron(gate_matrix(su2_gate(0, np.array([[0, 1], [1, 0]], dtype=complex))),
                 np.eye(2, dtype=complex)), 0),
        (CZ4, 1),
        (CNOT, 1),
        (ISWAP, 2),
        (SWAP4, 3),
    ]
    for matrix, count in cases:
        gates = synthesize_two_qubit(matrix)
        assert len(native_two_qubit_gates(gates, NATIVE_CZ)) == count
        got = circuit_unitary(gates, 2)
        assert_same_up_to_phase(got, matrix, atol=1e-9)


def test_synthesis_dressed_canonicals():
    rng = np.random.default_rng(15)
    for _ in range(25):
        a = rng.uniform(0.02, QUARTER - 0.02)
        b = rng.uniform(0.01, a)
        c = rng.uniform(-b, b)
        u = dressed(rng, a, b, c)
        gates = synthesize_two_qubit(u)
        got = circuit_unitary(gates, 2)
        assert_same_up_to_phase(got, u, atol=1e-7)


def test_synthesis_small_angle_stability():
    rng = np.random.default_rng(16)
    for scale in (1e-3, 1e-5, 1e-7):
        u = dressed(rng, scale, scale / 2, scale / 4)
        gates = synthesize_two_qubit(u)
        got = circuit_unitary(gates, 2)
        assert_same_up_to_phase(got, u, atol=1e-6)


def test_synthesis_ms_native():
    rng = np.random.default_rng(17)
    for _ in range(20):
        u = random_unitary(rng, 4)
        want = cnot_count_for(canonical_coordinates(u))
        gates = synthesize_two_qubit(u, native=NATIVE_MS)
        assert len(native_two_qubit_gates(gates, NATIVE_MS)) == want
        got = circuit_unitary(gates, 2)
        assert_same_up_to_phase(got, u, atol=1e-8)


def test_synthesis_relocates_to_requested_wires():
    rng = np.random.default_rng(18)
    u = random_unitary(rng, 4)
    gates = synthesize_two_qubit(u, qubits=(3, 1))
    assert all(set(g.qubits) <= {1, 3} for g in gates)
    got = circuit_unitary(gates, 4)
    want = embed(u, (3, 1), 4)
    assert_same_up_to_phase(got, want, atol=1e-8)


def test_synthesis_rejects_bad_input():
    with pytest.raises(ValidationError):
        synthesize_two_qubit(np.eye(4), native="sqrt_iswap")
    with pytest.raises(ValidationError):
        synthesize_two_qubit(np.eye(4), qubits=(2, 2))
    with pytest.raises(ValidationError):
        synthesize_two_qubit(np.ones((4, 4), dtype=complex))
    with pytest.raises(ValidationError):
        synthesize_two_qubit(np.eye(3, dtype=complex))


def test_synthesis_single_qubit_output_kinds():
    # everything around the natives must be a plain rotation gate
    rng = np.random.default_rng(19)
    gates = synthesize_two_qubit(random_unitary(rng, 4))
    for g in gates:
        assert g.kind in (GateKind.SU2, GateKind.CZ)
