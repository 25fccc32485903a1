"""Block consolidation: merge runs on a qubit pair and resynthesize.

Consecutive gates supported on the same pair of wires (including the
single-qubit rotations interleaved with them) multiply out to one 4x4
unitary whose minimal native-gate cost is known from its interaction
class. When that cost beats the run's current count the run is replaced
by the synthesized form; otherwise the original gates are kept. Runs on
disjoint pairs are tracked concurrently, and gates commute across runs
they do not touch, so the rewritten order is equivalent to the original.

A single sweep segments runs by the input order, so when a middle run
collapses to purely local gates, the runs it used to separate only
become mergeable on the next sweep. The public entry point therefore
sweeps until the gate list stops changing, which also makes it exactly
idempotent.
"""

from __future__ import annotations

from ..circuits import Circuit
from ..errors import NumericalError
from ..gates import Gate, GateKind
from .kak import (
    NATIVE_CZ,
    _fuse_local_runs,
    _gates_matrix,
    synthesize_two_qubit,
)


def _two_qubit_total(gates) -> int:
    return sum(1 for g in gates if g.is_two_qubit)


def _resynthesize_block(pair, gates, native: str, tol: float) -> list[Gate]:
    old = _two_qubit_total(gates)
    if old < 2:
        return list(gates)
    lo, hi = pair
    remapped = []
    for g in gates:
        if g.is_two_qubit:
            # every two-qubit kind here is exchange symmetric
            remapped.append(g.on(0, 1))
        else:
            remapped.append(g.on(0 if g.qubits[0] == lo else 1))
    matrix = _gates_matrix(remapped)
    try:
        synth = synthesize_two_qubit(matrix, qubits=(lo, hi), native=native, tol=tol)
    except NumericalError:
        # synthesis is self-checking; on the rare failure keep the
        # original gates, which are always sound
        return list(gates)
    if _two_qubit_total(synth) < old:
        return list(synth)
    return list(gates)


def _consolidate_once(circuit: Circuit, native: str, tol: float) -> Circuit:
    """One consolidation sweep.

    Output groups are anchored at the input position of their first
    gate; nothing between a group's anchor and its last member touches
    the group's wires, so sorting groups by anchor keeps the circuit
    equivalent while making the emission order independent of when each
    run happened to end.
    """
    groups: list[tuple[int, list[Gate]]] = []
    blocks: dict[tuple[int, int], tuple[int, list[Gate]]] = {}
    owner: dict[int, tuple[int, int]] = {}
    pending: dict[int, tuple[int, list[Gate]]] = {}

    def close(pair) -> None:
        anchor, gates = blocks.pop(pair)
        for q in pair:
            owner.pop(q)
        groups.append((anchor, _resynthesize_block(pair, gates, native, tol)))

    def close_all() -> None:
        for pair in sorted(blocks):
            close(pair)

    def flush_all() -> None:
        for q in sorted(pending):
            anchor, gates = pending.pop(q)
            groups.append((anchor, gates))

    for idx, g in enumerate(circuit.gates):
        if g.kind is GateKind.MEASURE:
            close_all()
            flush_all()
            groups.append((idx, [g]))
        elif g.is_two_qubit:
            i, j = g.qubits
            key = (min(i, j), max(i, j))
            if key not in blocks:
                for q in key:
                    if q in owner:
                        close(owner[q])
                # pulled locals move later, to the opener's slot; their
                # wire is untouched in between, so that is equivalent
                opening: list[Gate] = []
                for q in key:
                    if q in pending:
                        opening.extend(pending.pop(q)[1])
                blocks[key] = (idx, opening)
                owner[key[0]] = owner[key[1]] = key
            blocks[key][1].append(g)
        else:
            q = g.qubits[0]
            if q in owner:
                blocks[owner[q]][1].append(g)
            elif q in pending:
                pending[q][1].append(g)
            else:
                pending[q] = (idx, [g])

    close_all()
    flush_all()
    groups.sort(key=lambda item: item[0])
    out = [g for _, gates in groups for g in gates]
    return circuit.replace_gates(_fuse_local_runs(out))


def consolidate_and_resynthesize(
    circuit: Circuit,
    native: str = NATIVE_CZ,
    tol: float = 1e-9,
) -> Circuit:
    """Collapse same-pair gate runs to their cheapest equivalent form."""
    # Convergence is fast: a sweep only differs from its predecessor
    # after a run vanished, and each vanished run removes at least one
    # two-qubit gate, so the loop is bounded anyway. The cap guards the
    # pathological case without affecting correctness.
    for _ in range(max(4, circuit.two_qubit_count())):
        swept = _consolidate_once(circuit, native, tol)
        if swept.gates == circuit.gates:
            return swept
        circuit = swept
    return circuit
