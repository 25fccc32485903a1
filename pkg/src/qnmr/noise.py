"""Synthetic device noise for shot-sampled circuit execution.

The channel model is a stochastic Pauli unraveling: after every gate a
uniformly random non-identity Pauli (pair) fires on the gate's wires
with the configured probability, idle windows dephase with a rate set
by the idle coherence time, and readout flips each measured bit
independently. Each shot owns one sampled fault pattern; shots sharing
a pattern are simulated once, so the common no-fault pattern costs a
single statevector run.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import rng
from .circuits import Circuit
from .engine import (
    ShotCounts,
    apply_gate,
    apply_pauli,
    check_width,
    marginal_probabilities,
    run_circuit,
    sample_shots,
    zero_state,
)
from .errors import ParseError, ValidationError
from .gates import GateKind
from .transpile.coupling import DEFAULT_DURATIONS
from .transpile.dd import DD_TAG, schedule_gates

_PAULIS = ("X", "Y", "Z")
# all non-identity Pauli pairs, low wire letter first
_PAULI_PAIRS = tuple(
    (a, b) for a in ("I", "X", "Y", "Z") for b in ("I", "X", "Y", "Z")
)[1:]


@dataclass(frozen=True)
class NoiseModel:
    """Device error rates plus the idle and drift behavior."""

    p1: float = 0.0
    p2: float = 0.0
    p_ro: float = 0.0
    t2_idle: float = math.inf
    dd_suppression: float = 1.0
    drift: float = 0.0
    durations: tuple[float, float, float] = DEFAULT_DURATIONS
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("p1", "p2", "p_ro"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name} must be in [0,1], got {v}")
        if not self.t2_idle > 0:
            raise ValidationError(f"t2_idle must be positive, got {self.t2_idle}")
        if not 0.0 <= self.dd_suppression <= 1.0:
            raise ValidationError(
                f"dd_suppression must be in [0,1], got {self.dd_suppression}"
            )
        if not math.isfinite(self.drift):
            raise ValidationError(f"drift must be finite, got {self.drift}")
        if any(d <= 0 for d in self.durations):
            raise ValidationError("durations must be positive")

    def effective_rates(self, run_fraction: float = 0.0) -> tuple[float, float, float]:
        """(p1, p2, p_ro) at a point of the acquisition run.

        run_fraction 0 is the start of the run, 1 the end; the drift
        slope scales every rate linearly in between.
        """
        scale = 1.0 + self.drift * run_fraction
        return tuple(
            min(max(p * scale, 0.0), 1.0) for p in (self.p1, self.p2, self.p_ro)
        )

    @property
    def dephasing_active(self) -> bool:
        return math.isfinite(self.t2_idle)


@dataclass(frozen=True)
class _FaultSite:
    """One place in the circuit where a random Pauli may fire."""

    gate_index: int
    qubits: tuple[int, ...]
    prob: float
    before_gate: bool  # idle errors accrue before the waiting gate
    n_choices: int

    def paulis(self, choice: int) -> tuple[tuple[str, int], ...]:
        if len(self.qubits) == 1:
            if self.n_choices == 1:
                return (("Z", self.qubits[0]),)
            return ((_PAULIS[choice], self.qubits[0]),)
        a, b = _PAULI_PAIRS[choice]
        out = []
        if a != "I":
            out.append((a, self.qubits[0]))
        if b != "I":
            out.append((b, self.qubits[1]))
        return tuple(out)


def _gate_fault_sites(circuit: Circuit, p1: float, p2: float) -> list[_FaultSite]:
    sites = []
    for idx, g in enumerate(circuit.gates):
        if g.kind is GateKind.MEASURE:
            continue
        if g.is_two_qubit:
            if p2 > 0.0:
                sites.append(_FaultSite(idx, g.qubits, p2, False, 15))
        elif p1 > 0.0:
            sites.append(_FaultSite(idx, g.qubits, p1, False, 3))
    return sites


def _idle_fault_sites(circuit: Circuit, nm: NoiseModel) -> list[_FaultSite]:
    """One Z site per idle window, read off the circuit's schedule.

    A window adjacent to a decoupling pulse counts as protected and its
    dephasing probability shrinks by the suppression factor.
    """
    if not nm.dephasing_active:
        return []
    schedule = circuit.metadata.get("schedule")
    if schedule is None or len(schedule) != len(circuit.gates):
        schedule = schedule_gates(circuit.gates, circuit.width, nm.durations)
    free = [0.0] * circuit.width
    seen = [False] * circuit.width
    last_tag = [""] * circuit.width
    sites = []
    for idx, g in enumerate(circuit.gates):
        start, dur = schedule[idx]
        for q in g.qubits:
            gap = start - free[q]
            if seen[q] and gap > 0.0:
                p = 0.5 * (1.0 - math.exp(-gap / nm.t2_idle))
                if g.tag == DD_TAG or last_tag[q] == DD_TAG:
                    p *= nm.dd_suppression
                if p > 0.0:
                    sites.append(_FaultSite(idx, (q,), p, True, 1))
            free[q] = start + dur
            seen[q] = True
            last_tag[q] = g.tag
    return sites


def _readout_channel(dist: np.ndarray, n_bits: int, p: float) -> np.ndarray:
    """Convolve a joint bit distribution with independent flips."""
    if p == 0.0:
        return dist
    arr = dist.reshape([2] * n_bits)
    for axis in range(n_bits):
        v0 = arr.take(0, axis=axis)
        v1 = arr.take(1, axis=axis)
        arr = np.stack([(1 - p) * v0 + p * v1, p * v0 + (1 - p) * v1], axis=axis)
    return arr.reshape(-1)


def _evolve_with_faults(circuit: Circuit, faults, max_width) -> np.ndarray:
    """Statevector after the circuit with one fault pattern spliced in.

    faults maps gate index to (before, after) Pauli lists.
    """
    state = zero_state(circuit.width, max_width)
    for idx, g in enumerate(circuit.gates):
        before, after = faults.get(idx, ((), ()))
        for axis, q in before:
            apply_pauli(state, q, axis)
        if g.kind is not GateKind.MEASURE:
            apply_gate(state, g)
        for axis, q in after:
            apply_pauli(state, q, axis)
    return state


def _pattern_faults(pattern, sites):
    faults: dict[int, tuple[list, list]] = {}
    for site_index, choice in pattern:
        site = sites[site_index]
        slot = faults.setdefault(site.gate_index, ([], []))
        slot[0 if site.before_gate else 1].extend(site.paulis(choice))
    return faults


def _sample_patterns(sites, n_shots: int, fault_rng) -> dict[tuple, int]:
    """Group shots by their sampled fault pattern.

    Returns pattern -> shot count, the empty pattern included. Draw
    order is canonical (shot-major, then site order), so the grouping
    is reproducible.
    """
    probs = np.array([s.prob for s in sites])
    hits = fault_rng.random((n_shots, len(sites))) < probs[None, :]
    shot_idx, site_idx = np.nonzero(hits)
    per_shot: dict[int, list[tuple[int, int]]] = {}
    for shot, site in zip(shot_idx.tolist(), site_idx.tolist()):
        choice = int(fault_rng.integers(sites[site].n_choices))
        per_shot.setdefault(shot, []).append((site, choice))
    patterns: dict[tuple, int] = {(): n_shots - len(per_shot)}
    for faults in per_shot.values():
        key = tuple(faults)
        patterns[key] = patterns.get(key, 0) + 1
    if patterns[()] == 0:
        del patterns[()]
    return patterns


def noisy_run(
    circuit: Circuit,
    nm: NoiseModel,
    n_shots: int,
    seed: int | None = None,
    time_index: int = 0,
    run_fraction: float = 0.0,
    max_width: int | None = None,
) -> ShotCounts:
    """Sample measurement outcomes under the noise model.

    Deterministic for a given (seed, time_index); the same pair with an
    all-zero model reproduces noiseless sample_shots draws exactly.
    """
    if n_shots < 1:
        raise ValidationError(f"need at least one shot, got {n_shots}")
    check_width(circuit.width, max_width)
    qubits = circuit.measured_qubits
    if not qubits:
        raise ValidationError("circuit measures no qubits")
    if seed is None:
        seed = nm.seed
    p1, p2, p_ro = nm.effective_rates(run_fraction)
    meas_rng = rng.stream(seed, rng.MEASURE, time_index)

    sites = _gate_fault_sites(circuit, p1, p2) + _idle_fault_sites(circuit, nm)
    if not sites and p_ro == 0.0:
        state = run_circuit(circuit, max_width=max_width)
        return sample_shots(state, circuit.width, qubits, n_shots, meas_rng)

    if sites:
        fault_rng = rng.stream(seed, rng.FAULTS, time_index)
        patterns = _sample_patterns(sites, n_shots, fault_rng)
    else:
        patterns = {(): n_shots}

    total = np.zeros(1 << len(qubits), dtype=np.int64)
    clean_state = None
    for key in sorted(patterns):
        group = patterns[key]
        if key == ():
            if clean_state is None:
                clean_state = run_circuit(circuit, max_width=max_width)
            state = clean_state
        else:
            state = _evolve_with_faults(
                circuit, _pattern_faults(key, sites), max_width
            )
        dist = marginal_probabilities(state, circuit.width, qubits)
        dist = _readout_channel(dist, len(qubits), p_ro)
        dist = np.clip(dist, 0.0, None)
        total += meas_rng.multinomial(group, dist / dist.sum())
    hit = np.nonzero(total)[0]
    return ShotCounts(tuple(qubits), n_shots, hit.astype(np.uint64), total[hit])


def parse_noise_model(text: str, name: str = "<noise>") -> NoiseModel:
    """Read the key-per-line noise format (same shape as coupling maps)."""
    fields: dict = {}
    keys = {
        "P1": "p1", "P2": "p2", "PRO": "p_ro",
        "T2IDLE": "t2_idle", "DDSUPP": "dd_suppression", "DRIFT": "drift",
    }

    def fail(line_no: int, msg: str) -> None:
        raise ParseError(name, line_no, msg)

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head in keys:
            field = keys[head]
            if field in fields:
                fail(line_no, f"duplicate {head} line")
            try:
                (value,) = parts[1:]
                fields[field] = float(value)
            except ValueError:
                fail(line_no, f"{head} takes one number")
        elif head == "DUR":
            if "durations" in fields:
                fail(line_no, "duplicate DUR line")
            try:
                one, two, readout = parts[1:]
                fields["durations"] = (float(one), float(two), float(readout))
            except ValueError:
                fail(line_no, "DUR takes three durations in seconds")
        elif head == "SEED":
            if "seed" in fields:
                fail(line_no, "duplicate SEED line")
            try:
                (value,) = parts[1:]
                fields["seed"] = int(value)
            except ValueError:
                fail(line_no, "SEED takes one integer")
        else:
            fail(line_no, f"unknown directive {head!r}")
    try:
        return NoiseModel(**fields)
    except ValidationError as exc:
        raise ParseError(name, 1, str(exc)) from exc


def load_noise_model(path: str) -> NoiseModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read noise model {path}: {exc}") from exc
    return parse_noise_model(text, name=path)


def write_noise_model(path: str, nm: NoiseModel) -> None:
    lines = [
        f"P1 {nm.p1!r}",
        f"P2 {nm.p2!r}",
        f"PRO {nm.p_ro!r}",
        f"T2IDLE {nm.t2_idle!r}",
        f"DDSUPP {nm.dd_suppression!r}",
        f"DRIFT {nm.drift!r}",
        "DUR " + " ".join(repr(d) for d in nm.durations),
        f"SEED {nm.seed}",
    ]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def bundled_noise_path(name: str) -> str:
    """Filesystem path of a noise file shipped with the package."""
    from importlib.resources import files

    if not name.endswith(".noise"):
        name = name + ".noise"
    resource = files("qnmr") / "data" / name
    path = str(resource)
    if not os.path.exists(path):
        data_dir = files("qnmr") / "data"
        have = sorted(
            entry.name for entry in data_dir.iterdir()
            if entry.name.endswith(".noise")
        )
        raise ValidationError(
            f"no bundled noise model {name!r}; available: {', '.join(have)}"
        )
    return path
