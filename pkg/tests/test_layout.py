"""Initial placement: interaction weights, cost model, local search."""

import numpy as np
import pytest

from qnmr.circuits import Circuit
from qnmr.errors import ValidationError
from qnmr.gates import GateKind, gate
from qnmr.transpile import (
    CouplingMap,
    all_to_all_map,
    interaction_weights,
    layout_cost,
    select_layout,
)


def cz_circuit(width, pairs):
    return Circuit(width, tuple(gate(GateKind.CZ, i, j) for i, j in pairs))


def random_cz_circuit(rng, n, m):
    pairs = []
    for _ in range(m):
        i, j = rng.choice(n, size=2, replace=False)
        pairs.append((int(i), int(j)))
    return cz_circuit(n, pairs)


def line_map(n, errs=None):
    if errs is None:
        errs = [1e-3] * (n - 1)
    return CouplingMap(n, {(k, k + 1): float(errs[k]) for k in range(n - 1)})


def test_interaction_weights_normalize_pairs():
    c = cz_circuit(3, [(0, 1), (1, 0), (2, 1)])
    assert interaction_weights(c) == {(0, 1): 2, (1, 2): 1}


def test_interaction_weights_ignore_single_qubit_gates():
    c = Circuit(2, (gate(GateKind.PREPH, 0), gate(GateKind.CZ, 0, 1)))
    assert interaction_weights(c) == {(0, 1): 1}


def test_layout_cost_hand_example():
    cmap = line_map(4, errs=[1e-3, 2e-3, 3e-3])
    weights = {(0, 1): 3, (1, 2): 1}
    work, err = layout_cost([0, 1, 2], weights, cmap)
    assert work == 0.0
    assert err == pytest.approx(3 * 1e-3 + 1 * 2e-3)
    # placing wires 0 and 1 two hops apart costs one unit of work each use
    work, err = layout_cost([0, 2, 3], weights, cmap)
    assert work == 3.0
    assert err == pytest.approx(1 * 3e-3)


def test_all_to_all_gets_identity_layout():
    rng = np.random.default_rng(31)
    c = random_cz_circuit(rng, 4, 6)
    assert select_layout(c, all_to_all_map(7)) == (0, 1, 2, 3)


def test_layout_is_a_valid_assignment():
    rng = np.random.default_rng(32)
    cmap = line_map(6)
    for _ in range(10):
        c = random_cz_circuit(rng, int(rng.integers(2, 5)), 6)
        lay = select_layout(c, cmap)
        assert len(lay) == c.width
        assert len(set(lay)) == c.width
        assert all(0 <= p < cmap.n_physical for p in lay)


def test_layout_deterministic():
    rng = np.random.default_rng(33)
    c = random_cz_circuit(rng, 4, 8)
    cmap = line_map(6, errs=[1e-3, 5e-3, 2e-4, 3e-3, 1e-3])
    assert select_layout(c, cmap) == select_layout(c, cmap)
    assert select_layout(c, cmap, seed=7) == select_layout(c, cmap)


def test_too_wide_circuit_rejected():
    c = cz_circuit(4, [(0, 1)])
    with pytest.raises(ValidationError):
        select_layout(c, line_map(3))


def test_path_interactions_embed_without_work():
    cmap = line_map(6)
    for n in (3, 4, 5):
        c = cz_circuit(n, [(k, k + 1) for k in range(n - 1)] * 2)
        lay = select_layout(c, cmap)
        work, _ = layout_cost(list(lay), interaction_weights(c), cmap)
        assert work == 0.0


def test_layout_prefers_lower_error_edges():
    cmap = CouplingMap(3, {(0, 1): 5e-2, (1, 2): 1e-4})
    c = cz_circuit(2, [(0, 1)])
    lay = select_layout(c, cmap)
    assert set(lay) == {1, 2}


def locally_optimal(layout, circuit, cmap):
    """No single move or swap of one wire improves the cost pair."""
    weights = interaction_weights(circuit)
    base = layout_cost(list(layout), weights, cmap)
    used = set(layout)
    for l in range(len(layout)):
        for target in range(cmap.n_physical):
            if target == layout[l]:
                continue
            cand = list(layout)
            if target in used:
                cand[cand.index(target)] = cand[l]
            cand[l] = target
            if layout_cost(cand, weights, cmap) < base:
                return False
    return True


def test_layout_is_locally_optimal():
    rng = np.random.default_rng(34)
    for _ in range(20):
        errs = rng.uniform(1e-4, 5e-3, size=4)
        line = line_map(5, errs)
        tee = CouplingMap(5, {
            (0, 1): float(errs[0]), (1, 2): float(errs[1]),
            (1, 3): float(errs[2]), (3, 4): float(errs[3]),
        })
        for cmap in (line, tee):
            c = random_cz_circuit(rng, int(rng.integers(2, 5)),
                                  int(rng.integers(2, 8)))
            assert locally_optimal(select_layout(c, cmap), c, cmap)


def test_disconnected_pairs_cost_is_huge():
    cmap = CouplingMap(4, {(0, 1): 1e-3, (2, 3): 1e-3})
    weights = {(0, 1): 1}
    near, _ = layout_cost([0, 1], weights, cmap)
    far, _ = layout_cost([0, 2], weights, cmap)
    assert near == 0.0
    assert far > 1e6
