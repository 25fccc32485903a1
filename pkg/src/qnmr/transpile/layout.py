"""Initial placement of logical wires onto physical qubits.

The placement cost is the total routing work it implies: for every pair
of logical wires that share two-qubit gates, (hop distance - 1) weighted
by how many gates the pair carries. Ties break toward lower summed
two-qubit error on the edges actually used, then toward lower qubit
indices, so the result is deterministic for a given map and circuit.

A greedy construction seeds the placement and a swap/move local search
polishes it. The search is exhaustive over single moves, so on small
maps it reaches the optimum; on large maps it stops at a local one.
"""

from __future__ import annotations

from ..circuits import Circuit
from ..errors import ValidationError
from .coupling import CouplingMap

_MAX_PASSES = 60

# Finite stand-in for unreachable pairs so cost comparisons stay total.
_FAR = 1e7


def interaction_weights(circuit: Circuit) -> dict[tuple[int, int], int]:
    """Multiplicity of two-qubit gates per unordered wire pair."""
    weights: dict[tuple[int, int], int] = {}
    for g in circuit.gates:
        if g.is_two_qubit:
            i, j = g.qubits
            key = (min(i, j), max(i, j))
            weights[key] = weights.get(key, 0) + 1
    return weights


def _pair_distance(dist, p: int, q: int) -> float:
    d = float(dist[p, q])
    return _FAR if d > 1e6 else d


def layout_cost(
    layout,
    weights: dict[tuple[int, int], int],
    cmap: CouplingMap,
    dist=None,
) -> tuple[float, float]:
    """(routing work, adjacent two-qubit error) for a placement."""
    if dist is None:
        dist = cmap.distance_matrix()
    work = 0.0
    err = 0.0
    for (i, j), w in weights.items():
        d = _pair_distance(dist, layout[i], layout[j])
        work += w * (d - 1.0)
        if d == 1.0:
            err += w * cmap.edge_error(layout[i], layout[j])
    return work, err


def _greedy_seed(n_logical, weights, cmap, dist):
    total = [0] * n_logical
    partners: list[list[int]] = [[] for _ in range(n_logical)]
    for (i, j), w in weights.items():
        total[i] += w
        total[j] += w
        partners[i].append(j)
        partners[j].append(i)

    placed: dict[int, int] = {}
    free = set(range(cmap.n_physical))

    def best_anchor() -> int:
        return min(
            range(cmap.n_physical),
            key=lambda p: (
                -cmap.degree(p),
                sum(cmap.edge_error(p, nb) for nb in cmap.neighbors(p)),
                p,
            ),
        )

    order = sorted(range(n_logical), key=lambda l: (-total[l], l))
    for logical in order:
        anchored = [p for p in partners[logical] if p in placed]
        if not placed:
            pos = best_anchor()
        elif not anchored:
            pos = min(free)
        else:
            def move_cost(p: int):
                work = 0.0
                err = 0.0
                for other in anchored:
                    w = weights[(min(logical, other), max(logical, other))]
                    d = _pair_distance(dist, p, placed[other])
                    work += w * (d - 1.0)
                    if d == 1.0:
                        err += w * cmap.edge_error(p, placed[other])
                return (work, err, p)

            pos = min(free, key=move_cost)
        placed[logical] = pos
        free.remove(pos)
    return [placed[l] for l in range(n_logical)]


def select_layout(circuit: Circuit, cmap: CouplingMap, seed=None) -> tuple[int, ...]:
    """Choose physical positions for the circuit's wires.

    The seed argument is accepted for interface stability but unused:
    the construction is fully deterministic. Returns a tuple where entry
    k is the physical qubit carrying logical wire k.
    """
    n = circuit.width
    if n > cmap.n_physical:
        raise ValidationError(
            f"circuit needs {n} qubits but the map has {cmap.n_physical}"
        )
    if cmap.all_to_all:
        return tuple(range(n))

    weights = interaction_weights(circuit)
    dist = cmap.distance_matrix()
    layout = _greedy_seed(n, weights, cmap, dist)

    best = layout_cost(layout, weights, cmap, dist)
    for _ in range(_MAX_PASSES):
        improved = False
        used = {p: l for l, p in enumerate(layout)}
        targets = sorted(used) + sorted(set(range(cmap.n_physical)) - set(used))
        for logical in range(n):
            for target in targets:
                if target == layout[logical]:
                    continue
                trial = list(layout)
                trial[logical] = target
                holder = used.get(target)
                if holder is not None:
                    trial[holder] = layout[logical]
                cost = layout_cost(trial, weights, cmap, dist)
                if cost < best:
                    layout = trial
                    best = cost
                    used = {p: l for l, p in enumerate(layout)}
                    improved = True
        if not improved:
            break
    return tuple(layout)
