"""The full rewrite chain from logical circuit to device circuit.

Pass order is fixed: lower to the native set, place wires, insert
routing swaps, consolidate and resynthesize pair blocks, then add
decoupling pulses. Decoupling runs last because every earlier pass may
move gates between wires and would invalidate the idle windows; the
block consolidation in particular would fuse the pulse pairs away.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..circuits import Circuit
from ..errors import ValidationError
from .consolidate import consolidate_and_resynthesize
from .coupling import CouplingMap
from .dd import insert_dynamical_decoupling
from .kak import NATIVE_CZ, NATIVE_MS
from .layout import select_layout
from .lower import lower_to_native
from .route import route_circuit


@dataclass(frozen=True)
class TranspileOptions:
    native: str = NATIVE_CZ
    consolidate: bool = True
    decouple: bool = True
    lookahead: int = 8
    synthesis_tol: float = 1e-9
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.native not in (NATIVE_CZ, NATIVE_MS):
            raise ValidationError(f"unknown native gate {self.native!r}")
        if self.lookahead < 0:
            raise ValidationError("lookahead must be >= 0")
        if self.synthesis_tol <= 0:
            raise ValidationError("synthesis tolerance must be positive")


def transpile(
    circuit: Circuit,
    cmap: CouplingMap,
    options: TranspileOptions | None = None,
    initial_layout=None,
) -> Circuit:
    """Rewrite a logical circuit for the device described by cmap."""
    opts = options or TranspileOptions()
    lowered = lower_to_native(circuit, opts.native)
    if initial_layout is None:
        initial_layout = select_layout(lowered, cmap, opts.seed)
    routed = route_circuit(
        lowered, cmap, initial_layout, opts.native, opts.lookahead
    )
    if opts.consolidate:
        routed = consolidate_and_resynthesize(
            routed, opts.native, opts.synthesis_tol
        )
    if opts.decouple:
        routed = insert_dynamical_decoupling(routed, cmap.durations)
    return routed
