"""Cost summaries for transpiled circuits.

These run on the gate lists alone, so they work at any width, including
systems far too large to simulate. The two-qubit depth treats
single-qubit rotations as free, which matches how entangling gates
dominate both error and duration on the targeted hardware.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..circuits import Circuit, logical_two_qubit_depth
from ..errors import ValidationError
from ..gates import GateKind
from .dd import DD_TAG
from .route import ROUTE_TAG


@dataclass(frozen=True)
class TranspileReport:
    """Per-circuit gate inventory and depth."""

    width: int
    total_gates: int
    one_qubit: int
    two_qubit: int
    measurements: int
    routing_two_qubit: int
    dd_pulses: int
    two_qubit_depth: int
    duration: float | None

    def as_row(self) -> dict:
        row = {
            "width": self.width,
            "total_gates": self.total_gates,
            "one_qubit": self.one_qubit,
            "two_qubit": self.two_qubit,
            "measurements": self.measurements,
            "routing_two_qubit": self.routing_two_qubit,
            "dd_pulses": self.dd_pulses,
            "two_qubit_depth": self.two_qubit_depth,
        }
        row["duration"] = "" if self.duration is None else repr(self.duration)
        return row


REPORT_FIELDS = (
    "width",
    "total_gates",
    "one_qubit",
    "two_qubit",
    "measurements",
    "routing_two_qubit",
    "dd_pulses",
    "two_qubit_depth",
    "duration",
)


def report_from_circuit(circuit: Circuit) -> TranspileReport:
    one = two = measures = routing = dd = 0
    for g in circuit.gates:
        if g.kind is GateKind.MEASURE:
            measures += 1
        elif g.is_two_qubit:
            two += 1
            if g.tag == ROUTE_TAG:
                routing += 1
        else:
            one += 1
            if g.tag == DD_TAG and g.kind is GateKind.PAULIX:
                dd += 1
    schedule = circuit.metadata.get("schedule")
    duration = None
    if schedule:
        duration = float(max(start + dur for start, dur in schedule))
    return TranspileReport(
        width=circuit.width,
        total_gates=len(circuit.gates),
        one_qubit=one,
        two_qubit=two,
        measurements=measures,
        routing_two_qubit=routing,
        dd_pulses=dd,
        two_qubit_depth=logical_two_qubit_depth(circuit),
        duration=duration,
    )


@dataclass(frozen=True)
class DepthStatistics:
    """Two-qubit depth distribution over a circuit collection."""

    count: int
    mean: float
    std: float
    minimum: int
    maximum: int
    histogram: tuple[tuple[int, int], ...]


def depth_statistics(circuits) -> DepthStatistics:
    depths = [logical_two_qubit_depth(c) for c in circuits]
    if not depths:
        raise ValidationError("need at least one circuit for depth statistics")
    arr = np.asarray(depths, dtype=float)
    values, counts = np.unique(np.asarray(depths), return_counts=True)
    hist = tuple(
        (int(v), int(n)) for v, n in zip(values, counts)
    )
    return DepthStatistics(
        count=len(depths),
        mean=float(arr.mean()),
        std=float(arr.std(ddof=0)),
        minimum=int(arr.min()),
        maximum=int(arr.max()),
        histogram=hist,
    )
