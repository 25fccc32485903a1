"""Swap insertion so every two-qubit gate lands on a coupled pair.

Gates run in list order. When the next two-qubit gate sits on separated
physical qubits, candidate swaps are the map edges touching either
endpoint; each is scored by the endpoint distance it leaves behind plus
a discounted average over the next few two-qubit gates, and the lowest
(edge index breaking ties) wins. If scoring stalls the router walks a
shortest path directly, which always makes progress, so termination
never depends on the heuristic. Swaps are emitted already lowered to
the native set and tagged "route" so later passes can count them.
"""

from __future__ import annotations

from ..circuits import Circuit
from ..errors import RoutingError, ValidationError
from ..gates import Gate, GateKind, gate
from .coupling import CouplingMap
from .kak import NATIVE_CZ, NATIVE_MS, _rewrite_cz_as_ms
from .layout import select_layout
from .lower import lower_gate

_LOOKAHEAD = 8
_LOOKAHEAD_WEIGHT = 0.5

ROUTE_TAG = "route"


def _check_layout(layout, width: int, cmap: CouplingMap) -> list[int]:
    layout = list(layout)
    if len(layout) != width:
        raise ValidationError(
            f"layout has {len(layout)} entries for width {width}"
        )
    if len(set(layout)) != len(layout):
        raise ValidationError("layout repeats a physical qubit")
    if any(not 0 <= p < cmap.n_physical for p in layout):
        raise ValidationError("layout entry out of range")
    return layout


def _native_swap(p: int, q: int, native: str) -> list[Gate]:
    gates = lower_gate(gate(GateKind.SWAP, p, q, tag=ROUTE_TAG))
    if native == NATIVE_MS:
        gates = _rewrite_cz_as_ms(gates)
    return gates


class _Router:
    def __init__(self, circuit, cmap, layout, native, lookahead):
        self.cmap = cmap
        self.native = native
        self.lookahead = lookahead
        self.phys_of = list(layout)
        self.logical_at: list[int | None] = [None] * cmap.n_physical
        for logical, p in enumerate(layout):
            self.logical_at[p] = logical
        self.dist = None if cmap.all_to_all else cmap.distance_matrix()
        self.gates = list(circuit.gates)
        self.future_pairs = [
            g.qubits for g in self.gates if g.is_two_qubit
        ]
        self.out: list[Gate] = []

    def _distance(self, li: int, lj: int, phys=None) -> int:
        phys = self.phys_of if phys is None else phys
        if self.cmap.all_to_all:
            return 1
        return int(self.dist[phys[li], phys[lj]])

    def _apply_swap(self, a: int, b: int) -> None:
        self.out.extend(_native_swap(a, b, self.native))
        la, lb = self.logical_at[a], self.logical_at[b]
        self.logical_at[a], self.logical_at[b] = lb, la
        if la is not None:
            self.phys_of[la] = b
        if lb is not None:
            self.phys_of[lb] = a

    def _score_swap(self, a, b, front, window) -> float:
        trial = list(self.phys_of)
        la, lb = self.logical_at[a], self.logical_at[b]
        if la is not None:
            trial[la] = b
        if lb is not None:
            trial[lb] = a
        score = float(self._distance(*front, trial))
        if window:
            total = sum(self._distance(*pair, trial) for pair in window)
            score += _LOOKAHEAD_WEIGHT * total / len(window)
        return score

    def _bring_adjacent(self, front, window) -> None:
        stall_limit = self.cmap.n_physical
        stalled = 0
        while True:
            d = self._distance(*front)
            if d > 10**6:
                raise RoutingError(
                    f"wires {front[0]} and {front[1]} sit on disconnected "
                    "map regions"
                )
            if d <= 1:
                return
            if stalled >= stall_limit:
                self._walk_path(front)
                return
            best = None
            pi, pj = self.phys_of[front[0]], self.phys_of[front[1]]
            for a, b in self.cmap.edges:
                if a in (pi, pj) or b in (pi, pj):
                    score = self._score_swap(a, b, front, window)
                    if best is None or score < best[0]:
                        best = (score, a, b)
            if best is None:
                raise RoutingError(
                    f"no coupled edge touches qubits {pi} or {pj}"
                )
            self._apply_swap(best[1], best[2])
            stalled = stalled + 1 if self._distance(*front) >= d else 0

    def _walk_path(self, front) -> None:
        li, lj = front
        path = self.cmap.shortest_path(self.phys_of[li], self.phys_of[lj])
        for step in path[1:-1]:
            self._apply_swap(self.phys_of[li], step)

    def run(self) -> list[Gate]:
        seen_2q = 0
        for g in self.gates:
            if g.is_two_qubit:
                seen_2q += 1
                front = g.qubits
                window = self.future_pairs[seen_2q:seen_2q + self.lookahead]
                self._bring_adjacent(front, window)
            self.out.append(g.on(*(self.phys_of[q] for q in g.qubits)))
        return self.out


def route_circuit(
    circuit: Circuit,
    cmap: CouplingMap,
    initial_layout=None,
    native: str = NATIVE_CZ,
    lookahead: int = _LOOKAHEAD,
) -> Circuit:
    """Map the circuit onto the device, inserting swaps where needed.

    Returns a circuit on cmap.n_physical wires whose metadata records
    the initial and final logical-to-physical assignments. Measured
    qubits are remapped through the final assignment.
    """
    if native not in (NATIVE_CZ, NATIVE_MS):
        raise ValidationError(f"unknown native gate {native!r}")
    if initial_layout is None:
        initial_layout = select_layout(circuit, cmap)
    layout = _check_layout(initial_layout, circuit.width, cmap)

    router = _Router(circuit, cmap, layout, native, lookahead)
    gates = router.run()

    metadata = dict(circuit.metadata)
    metadata["initial_layout"] = tuple(layout)
    metadata["final_layout"] = tuple(router.phys_of)
    return Circuit(
        cmap.n_physical,
        tuple(gates),
        circuit.time_point,
        tuple(router.phys_of[q] for q in circuit.measured_qubits),
        metadata,
    )


def compact_circuit(circuit: Circuit) -> tuple[Circuit, tuple[int, ...]]:
    """Drop unused wires, renumbering the rest densely.

    Returns the compacted circuit and the tuple of original wire indices
    in their new order, so entry k names the wire that became k.
    """
    used = sorted(
        {q for g in circuit.gates for q in g.qubits}
        | set(circuit.measured_qubits)
    )
    if not used:
        raise ValidationError("circuit has no gates to compact")
    renumber = {p: k for k, p in enumerate(used)}
    gates = tuple(g.on(*(renumber[q] for q in g.qubits)) for g in circuit.gates)
    metadata = dict(circuit.metadata)
    metadata["wire_map"] = tuple(used)
    return (
        Circuit(
            len(used),
            gates,
            circuit.time_point,
            tuple(renumber[q] for q in circuit.measured_qubits),
            metadata,
        ),
        tuple(used),
    )
