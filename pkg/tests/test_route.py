"""Swap insertion: connectivity compliance and semantic equivalence.

The equivalence oracle embeds a random logical state at the initial
physical positions, pushes it through the routed circuit as a dense
matrix, and compares against the logical result placed at the final
positions. This exercises the full layout bookkeeping independent of
the router's own data structures.
"""

import math

import numpy as np
import pytest

from util import circuit_unitary, random_state

from qnmr.circuits import Circuit
from qnmr.errors import RoutingError, ValidationError
from qnmr.gates import GateKind, gate
from qnmr.transpile import (
    NATIVE_MS,
    ROUTE_TAG,
    all_to_all_map,
    CouplingMap,
    compact_circuit,
    lower_to_native,
    route_circuit,
)


def line_map(n, err=1e-3):
    return CouplingMap(n, {(k, k + 1): err for k in range(n - 1)})


def random_two_qubit_circuit(rng, n, m, measured=()):
    kinds = [GateKind.RXX, GateKind.RYY, GateKind.RZZ, GateKind.CZ]
    gates = []
    for _ in range(m):
        i, j = rng.choice(n, size=2, replace=False)
        kind = kinds[rng.integers(0, len(kinds))]
        n_params = 0 if kind is GateKind.CZ else 1
        gates.append(gate(kind, int(i), int(j),
                          params=tuple(rng.uniform(-4, 4, n_params))))
    gates += [gate(GateKind.MEASURE, q) for q in measured]
    return Circuit(n, tuple(gates), measured_qubits=tuple(measured))


def place_state(psi, positions, width):
    """Embed a logical state at the listed wires, all others |0>."""
    out = np.zeros(1 << width, dtype=complex)
    for idx in range(len(psi)):
        phys = 0
        for q, p in enumerate(positions):
            if (idx >> q) & 1:
                phys |= 1 << p
        out[phys] = psi[idx]
    return out


def assert_states_match(got, want, atol=1e-9):
    k = np.argmax(np.abs(want))
    phase = got[k] / want[k]
    assert abs(abs(phase) - 1.0) < 1e-8
    np.testing.assert_allclose(got, phase * want, atol=atol)


def check_routing_equivalence(circuit, cmap, routed, rng, atol=1e-9):
    compacted, used = compact_circuit(routed)
    pos = {p: k for k, p in enumerate(used)}
    init = [pos[p] for p in routed.metadata["initial_layout"]]
    final = [pos[p] for p in routed.metadata["final_layout"]]

    u_routed = circuit_unitary(compacted.body, compacted.width)
    u_logical = circuit_unitary(circuit.body, circuit.width)

    psi = random_state(rng, circuit.width)
    got = u_routed @ place_state(psi, init, compacted.width)
    want = place_state(u_logical @ psi, final, compacted.width)
    assert_states_match(got, want, atol)


def test_all_to_all_needs_no_swaps():
    rng = np.random.default_rng(41)
    c = random_two_qubit_circuit(rng, 4, 10)
    routed = route_circuit(c, all_to_all_map(4))
    assert not any(g.tag == ROUTE_TAG for g in routed.gates)
    assert routed.metadata["initial_layout"] == routed.metadata["final_layout"]
    check_routing_equivalence(c, all_to_all_map(4), routed, rng)


def test_output_respects_connectivity():
    rng = np.random.default_rng(42)
    cmap = line_map(7)
    for _ in range(8):
        c = random_two_qubit_circuit(rng, 5, 12)
        routed = route_circuit(c, cmap)
        for g in routed.gates:
            if g.is_two_qubit:
                assert cmap.has_edge(*g.qubits), g
        assert not any(g.kind is GateKind.SWAP for g in routed.gates)


def test_routing_preserves_semantics_on_a_line():
    rng = np.random.default_rng(43)
    cmap = line_map(6)
    for _ in range(10):
        c = random_two_qubit_circuit(rng, int(rng.integers(3, 6)), 12)
        routed = route_circuit(c, cmap)
        check_routing_equivalence(c, cmap, routed, rng)


def test_routing_preserves_semantics_on_a_tee():
    rng = np.random.default_rng(44)
    cmap = CouplingMap(6, {(0, 1): 1e-3, (1, 2): 1e-3, (1, 3): 1e-3,
                           (3, 4): 1e-3, (4, 5): 1e-3})
    for _ in range(10):
        c = random_two_qubit_circuit(rng, int(rng.integers(3, 6)), 12)
        routed = route_circuit(c, cmap)
        check_routing_equivalence(c, cmap, routed, rng)


def test_lowered_circuits_route_identically_well():
    rng = np.random.default_rng(45)
    cmap = line_map(6)
    c = lower_to_native(random_two_qubit_circuit(rng, 4, 10))
    routed = route_circuit(c, cmap)
    for g in routed.gates:
        assert g.kind in (GateKind.SU2, GateKind.CZ)
        if g.is_two_qubit:
            assert cmap.has_edge(*g.qubits)
    check_routing_equivalence(c, cmap, routed, rng)


def test_ms_native_swaps_use_half_turn_rxx():
    rng = np.random.default_rng(46)
    cmap = line_map(5)
    c = lower_to_native(
        Circuit(4, (gate(GateKind.CZ, 0, 1), gate(GateKind.RZZ, 0, 3, params=(0.7,)),
                    gate(GateKind.CZ, 1, 2))),
        NATIVE_MS,
    )
    routed = route_circuit(c, cmap, initial_layout=(0, 1, 2, 3), native=NATIVE_MS)
    swap_two_qubit = [g for g in routed.gates
                      if g.is_two_qubit and g.tag == ROUTE_TAG]
    assert swap_two_qubit, "line map forces at least one swap here"
    for g in swap_two_qubit:
        assert g.kind is GateKind.RXX
        assert abs(abs(g.params[0]) - math.pi / 2) < 1e-12
    check_routing_equivalence(c, cmap, routed, rng)


def test_measured_qubits_follow_the_final_layout():
    rng = np.random.default_rng(47)
    c = random_two_qubit_circuit(rng, 4, 10, measured=(0, 1, 2, 3))
    routed = route_circuit(c, line_map(6))
    final = routed.metadata["final_layout"]
    assert routed.measured_qubits == tuple(final[q] for q in range(4))


def test_routing_is_deterministic():
    rng = np.random.default_rng(48)
    c = random_two_qubit_circuit(rng, 4, 12)
    cmap = line_map(6)
    assert route_circuit(c, cmap).gates == route_circuit(c, cmap).gates


def test_explicit_layout_is_honored():
    c = Circuit(2, (gate(GateKind.CZ, 0, 1),))
    routed = route_circuit(c, line_map(4), initial_layout=(3, 2))
    assert routed.metadata["initial_layout"] == (3, 2)
    assert routed.gates[0].qubits in ((2, 3), (3, 2))


def test_disconnected_pair_raises():
    cmap = CouplingMap(4, {(0, 1): 1e-3, (2, 3): 1e-3})
    c = Circuit(2, (gate(GateKind.CZ, 0, 1),))
    with pytest.raises(RoutingError) as err:
        route_circuit(c, cmap, initial_layout=(0, 2))
    assert err.value.exit_code == 4


@pytest.mark.parametrize("layout", [(0,), (0, 0), (0, 9), (1, 2, 3)])
def test_bad_layouts_rejected(layout):
    c = Circuit(2, (gate(GateKind.CZ, 0, 1),))
    with pytest.raises(ValidationError):
        route_circuit(c, line_map(4), initial_layout=layout)


def test_compact_drops_unused_wires():
    c = Circuit(6, (gate(GateKind.CZ, 1, 4), gate(GateKind.PREPH, 5)))
    small, used = compact_circuit(c)
    assert used == (1, 4, 5)
    assert small.width == 3
    assert small.gates[0].qubits == (0, 1)
    assert small.gates[1].qubits == (2,)
    assert small.metadata["wire_map"] == (1, 4, 5)


def test_compact_rejects_empty_circuits():
    with pytest.raises(ValidationError):
        compact_circuit(Circuit(3, ()))
