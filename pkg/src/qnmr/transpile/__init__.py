"""Circuit rewriting for hardware execution.

Five passes, applied in this order by transpile(): lowering to the
native gate set, wire placement, swap routing, pair-block consolidation
with minimal resynthesis, and idle-window decoupling. Each pass is also
usable on its own.
"""

from .consolidate import consolidate_and_resynthesize
from .coupling import (
    CouplingMap,
    QubitInfo,
    all_to_all_map,
    heavy_hex_map,
    load_coupling_map,
    parse_coupling_map,
    write_coupling_map,
)
from .dd import DD_TAG, insert_dynamical_decoupling, schedule_gates
from .kak import (
    NATIVE_CZ,
    NATIVE_MS,
    canonical_coordinates,
    cnot_count_for,
    synthesize_two_qubit,
)
from .layout import interaction_weights, layout_cost, select_layout
from .lower import lower_gate, lower_to_native
from .pipeline import TranspileOptions, transpile
from .report import (
    DepthStatistics,
    REPORT_FIELDS,
    TranspileReport,
    depth_statistics,
    report_from_circuit,
)
from .route import ROUTE_TAG, compact_circuit, route_circuit

__all__ = [
    "CouplingMap",
    "QubitInfo",
    "all_to_all_map",
    "heavy_hex_map",
    "load_coupling_map",
    "parse_coupling_map",
    "write_coupling_map",
    "DD_TAG",
    "insert_dynamical_decoupling",
    "schedule_gates",
    "NATIVE_CZ",
    "NATIVE_MS",
    "canonical_coordinates",
    "cnot_count_for",
    "synthesize_two_qubit",
    "interaction_weights",
    "layout_cost",
    "select_layout",
    "lower_gate",
    "lower_to_native",
    "TranspileOptions",
    "transpile",
    "DepthStatistics",
    "REPORT_FIELDS",
    "TranspileReport",
    "depth_statistics",
    "report_from_circuit",
    "ROUTE_TAG",
    "compact_circuit",
    "route_circuit",
    "consolidate_and_resynthesize",
]
