"""Lowering to a native gate set.

Both hardware targets expose arbitrary single-qubit rotations plus one
entangling primitive: a controlled-Z, or a maximally entangling XX
rotation. Every gate in the logical vocabulary rewrites exactly into
that set. ZZ rotations are the workhorse: a ZZ rotation by t equals a
basis change on one wire around an X rotation between two controlled-Z
gates, and XX / YY rotations are single-qubit conjugations of it.

Angles that land on special values get cheaper forms: a full turn drops
out entirely, a half turn is a pair of Z flips, and a quarter turn needs
only one entangling gate.
"""

from __future__ import annotations

import math

from ..circuits import Circuit
from ..errors import ValidationError
from ..gates import (
    Gate,
    GateKind,
    MAT_H,
    MAT_X,
    MAT_Z,
    gate,
    rx_matrix,
    rz_matrix,
    su2_gate,
)
from .kak import NATIVE_CZ, NATIVE_MS, _rewrite_cz_as_ms

_TWO_PI = 2.0 * math.pi

# Angle snapping for the special forms. Coarser than synthesis tolerance
# because a miss only costs one extra entangling gate, never correctness.
_ANGLE_TOL = 1e-12

_V_PLUS = rx_matrix(math.pi / 2)
_V_MINUS = rx_matrix(-math.pi / 2)


def _wrap_angle(a: float) -> float:
    return a - _TWO_PI * round(a / _TWO_PI)


def _lower_rzz(i: int, j: int, theta: float, tag: str) -> list[Gate]:
    t = _wrap_angle(theta)
    if abs(t) <= _ANGLE_TOL:
        return []
    if abs(abs(t) - math.pi) <= _ANGLE_TOL:
        return [su2_gate(i, MAT_Z, tag), su2_gate(j, MAT_Z, tag)]
    if abs(abs(t) - math.pi / 2) <= _ANGLE_TOL:
        half = math.copysign(math.pi / 2, t)
        return [
            gate(GateKind.CZ, i, j, tag=tag),
            su2_gate(i, rz_matrix(half), tag),
            su2_gate(j, rz_matrix(half), tag),
        ]
    return [
        su2_gate(i, MAT_H, tag),
        gate(GateKind.CZ, i, j, tag=tag),
        su2_gate(i, rx_matrix(t), tag),
        gate(GateKind.CZ, i, j, tag=tag),
        su2_gate(i, MAT_H, tag),
    ]


def _conjugated_rzz(i, j, theta, tag, pre_i, pre_j, post_i, post_j):
    body = _lower_rzz(i, j, theta, tag)
    if not body:
        return []
    return (
        [su2_gate(i, pre_i, tag), su2_gate(j, pre_j, tag)]
        + body
        + [su2_gate(i, post_i, tag), su2_gate(j, post_j, tag)]
    )


def lower_gate(g: Gate) -> list[Gate]:
    """Exact rewrite of one gate into SU2 rotations and controlled-Z."""
    if g.kind in (GateKind.SU2, GateKind.CZ, GateKind.MEASURE):
        return [g]
    if g.kind is GateKind.PREPH:
        return [su2_gate(g.qubits[0], MAT_H, g.tag)]
    if g.kind is GateKind.PAULIX:
        return [su2_gate(g.qubits[0], MAT_X, g.tag)]
    if g.kind is GateKind.RZ:
        return [su2_gate(g.qubits[0], rz_matrix(g.params[0]), g.tag)]
    if g.kind is GateKind.RZZ:
        i, j = g.qubits
        return _lower_rzz(i, j, g.params[0], g.tag)
    if g.kind is GateKind.RXX:
        i, j = g.qubits
        return _conjugated_rzz(
            i, j, g.params[0], g.tag, MAT_H, MAT_H, MAT_H, MAT_H
        )
    if g.kind is GateKind.RYY:
        i, j = g.qubits
        return _conjugated_rzz(
            i, j, g.params[0], g.tag, _V_MINUS, _V_MINUS, _V_PLUS, _V_PLUS
        )
    if g.kind is GateKind.SWAP:
        i, j = g.qubits
        out: list[Gate] = []
        for target in (j, i, j):
            out.append(su2_gate(target, MAT_H, g.tag))
            out.append(gate(GateKind.CZ, i, j, tag=g.tag))
            out.append(su2_gate(target, MAT_H, g.tag))
        return out
    raise ValidationError(f"cannot lower gate kind {g.kind.value}")


def lower_to_native(circuit: Circuit, native: str = NATIVE_CZ) -> Circuit:
    """Rewrite every gate of the circuit into the native set.

    With native "cz" the output contains only SU2, CZ and MEASURE; with
    native "ms" every controlled-Z is further rewritten around a
    maximally entangling XX rotation. XX rotations already present pass
    through when they carry the native angle, otherwise they are lowered
    like any other coupling term.
    """
    if native not in (NATIVE_CZ, NATIVE_MS):
        raise ValidationError(f"unknown native gate {native!r}")
    lowered: list[Gate] = []
    for g in circuit.gates:
        if (
            native == NATIVE_MS
            and g.kind is GateKind.RXX
            and abs(_wrap_angle(g.params[0]) - math.pi / 2) <= _ANGLE_TOL
        ):
            lowered.append(g)
            continue
        lowered += lower_gate(g)
    if native == NATIVE_MS:
        lowered = _rewrite_cz_as_ms(lowered)
    return circuit.replace_gates(lowered, native=native)
