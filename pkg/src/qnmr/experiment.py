"""Reproducible experiment configs and end-to-end acquisition runs.

A config is a ``key = value`` text file describing one simulated
acquisition: which spin system, at what field, which species to observe,
how many time points, how the circuits execute (exact expectations or
sampled shots under a noise model), which device target to transpile
for, and which corrections to apply. The same config drives simulation,
depth reporting, and the shot-budget protocol, so every artifact traces
back to one small file plus a seed.
"""

from __future__ import annotations

import dataclasses
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .circuits import Circuit, observable_circuit
from .engine import (
    DEFAULT_WIDTH_LIMIT,
    expectation_magnetization,
    run_circuit,
)
from .errors import ParseError, UsageError, CapabilityError
from .hamiltonian import PauliTermList, build_rotating_hamiltonian
from .mitigation import (
    analytic_confusion,
    mitigate_counts,
    quasi_magnetization,
    rescale_low_confidence,
    singleton_groups,
)
from .noise import NoiseModel, bundled_noise_path, load_noise_model, noisy_run
from .shots_protocol import randomized_time_ordering
from .spectrum import FidSeries, assemble_fid
from .spins import FieldConfig, SpinSystem, bundled_system_path, load_spin_system
from .transpile.coupling import CouplingMap, all_to_all_map, heavy_hex_map
from .transpile.pipeline import TranspileOptions, transpile

TARGETS = ("logical", "heavy-hex", "all-to-all")


@dataclass(frozen=True)
class ExperimentConfig:
    """One acquisition recipe; see the module docstring for the format."""

    system: str
    proton_mhz: float | None = None
    b0_tesla: float | None = None
    observed: str = ""
    points: int = 1
    sweep_hz: float = 2000.0
    shots: int | None = None
    noise: str | None = None
    target: str = "logical"
    mitigation: bool = False
    decouple: bool = False
    randomized: bool = False
    seed: int = 0
    label: str = "run"

    def __post_init__(self) -> None:
        if (self.proton_mhz is None) == (self.b0_tesla is None):
            raise UsageError(
                "exactly one of proton_mhz and b0_tesla must be given"
            )
        if self.points < 1:
            raise UsageError(f"points must be >= 1, got {self.points}")
        if not self.sweep_hz > 0:
            raise UsageError(f"sweep_hz must be positive, got {self.sweep_hz}")
        if self.shots is not None and self.shots < 1:
            raise UsageError(f"sampled mode needs shots >= 1, got {self.shots}")
        if self.target not in TARGETS:
            raise UsageError(
                f"target must be one of {', '.join(TARGETS)}, got {self.target!r}"
            )
        if self.mitigation and self.shots is None:
            raise UsageError("mitigation requires sampled mode")
        if self.noise is not None and self.shots is None:
            raise UsageError("a noise model requires sampled mode")
        if self.decouple and self.target == "logical":
            raise UsageError(
                "decoupling needs a device target (heavy-hex or all-to-all)"
            )

    @property
    def dwell_time(self) -> float:
        return 1.0 / self.sweep_hz

    def field(self) -> FieldConfig:
        if self.b0_tesla is not None:
            return FieldConfig(self.b0_tesla)
        return FieldConfig.from_proton_frequency_mhz(self.proton_mhz)

    def as_dict(self) -> dict:
        mode = "exact" if self.shots is None else f"sampled {self.shots}"
        out = {
            "system": self.system,
            "observed": self.observed,
            "points": self.points,
            "sweep_hz": self.sweep_hz,
            "mode": mode,
            "noise": self.noise or "none",
            "target": self.target,
            "mitigation": "on" if self.mitigation else "off",
            "decouple": "on" if self.decouple else "off",
            "randomized": "on" if self.randomized else "off",
            "seed": self.seed,
            "label": self.label,
        }
        if self.b0_tesla is not None:
            out["b0_tesla"] = self.b0_tesla
        else:
            out["proton_mhz"] = self.proton_mhz
        return out


_FLAGS = {"on": True, "off": False}


def parse_experiment_config(text: str, name: str = "<config>") -> ExperimentConfig:
    """Read a ``key = value`` config; unknown or repeated keys fail."""
    fields: dict = {}

    def fail(line_no: int, msg: str) -> None:
        raise ParseError(name, line_no, msg)

    def put(line_no: int, key: str, value) -> None:
        if key in fields:
            fail(line_no, f"duplicate key {key}")
        fields[key] = value

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            fail(line_no, "expected key = value")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if not value:
            fail(line_no, f"{key} has no value")
        try:
            if key in ("system", "observed", "label"):
                put(line_no, key, value)
            elif key in ("proton_mhz", "b0_tesla", "sweep_hz"):
                put(line_no, key, float(value))
            elif key in ("points", "seed"):
                put(line_no, key, int(value))
            elif key == "mode":
                parts = value.split()
                if parts[0] == "exact" and len(parts) == 1:
                    put(line_no, "shots", None)
                elif parts[0] == "sampled" and len(parts) == 2:
                    put(line_no, "shots", int(parts[1]))
                else:
                    fail(line_no, "mode must be 'exact' or 'sampled <shots>'")
            elif key == "noise":
                put(line_no, key, None if value == "none" else value)
            elif key == "target":
                put(line_no, key, value)
            elif key in ("mitigation", "decouple", "randomized"):
                if value not in _FLAGS:
                    fail(line_no, f"{key} must be 'on' or 'off'")
                put(line_no, key, _FLAGS[value])
            else:
                fail(line_no, f"unknown key {key!r}")
        except ValueError:
            fail(line_no, f"bad value for {key}: {value!r}")
    if "system" not in fields:
        raise ParseError(name, 1, "config needs a system line")
    if "shots" not in fields:
        raise ParseError(name, 1, "config needs a mode line")
    return ExperimentConfig(**fields)


def load_experiment_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    cfg = parse_experiment_config(text, name=path)
    if cfg.label == "run":
        stem = os.path.splitext(os.path.basename(path))[0]
        cfg = dataclasses.replace(cfg, label=stem)
    return cfg


def resolve_system_path(token: str, workspace: str) -> str:
    """A path relative to the workspace, or a bundled system name."""
    candidate = token if os.path.isabs(token) else os.path.join(workspace, token)
    if os.path.isfile(candidate):
        return candidate
    return bundled_system_path(token)


def resolve_noise_path(token: str, workspace: str) -> str:
    candidate = token if os.path.isabs(token) else os.path.join(workspace, token)
    if os.path.isfile(candidate):
        return candidate
    return bundled_noise_path(token)


@dataclass(frozen=True)
class ExperimentSetup:
    """Loaded inputs shared by the simulate, depth and protocol commands."""

    config: ExperimentConfig
    system: SpinSystem
    hamiltonian: PauliTermList
    observed: tuple[int, ...]
    reference_hz: float
    noise_model: NoiseModel
    coupling_map: CouplingMap | None
    system_path: str
    noise_path: str | None


def prepare_experiment(cfg: ExperimentConfig, workspace: str = ".") -> ExperimentSetup:
    system_path = resolve_system_path(cfg.system, workspace)
    system = load_spin_system(system_path)
    field = cfg.field()
    h = build_rotating_hamiltonian(system, field)
    if cfg.observed:
        observed = system.species_indices(cfg.observed)
    else:
        observed = tuple(range(system.n_spins))
    reference_hz = field.larmor_frequency_hz(system.isotope(observed[0]))
    noise_path = None
    nm = NoiseModel()
    if cfg.noise is not None:
        noise_path = resolve_noise_path(cfg.noise, workspace)
        nm = load_noise_model(noise_path)
    cmap = None
    if cfg.target == "heavy-hex":
        cmap = heavy_hex_map()
    elif cfg.target == "all-to-all":
        cmap = all_to_all_map(system.n_spins)
    if cmap is not None and cmap.n_physical < system.n_spins:
        raise CapabilityError(
            f"{system.n_spins} spins exceed the {cmap.n_physical}-qubit device"
        )
    return ExperimentSetup(
        cfg, system, h, observed, reference_hz, nm, cmap, system_path, noise_path
    )


def build_point_circuit(
    setup: ExperimentSetup, k: int, axis: str
) -> Circuit:
    """Acquisition circuit for time index k, transpiled per the target."""
    cfg = setup.config
    circuit = observable_circuit(
        setup.hamiltonian, k * cfg.dwell_time, axis, setup.observed
    )
    if setup.coupling_map is None:
        return circuit
    options = TranspileOptions(decouple=cfg.decouple, seed=cfg.seed)
    return transpile(circuit, setup.coupling_map, options)


def _estimate(setup: ExperimentSetup, circuit, time_index, run_fraction) -> float:
    cfg = setup.config
    if cfg.shots is None:
        state = run_circuit(circuit)
        return expectation_magnetization(state, circuit.measured_qubits, "Z")
    counts = noisy_run(
        circuit, setup.noise_model, cfg.shots,
        seed=cfg.seed, time_index=time_index, run_fraction=run_fraction,
    )
    if not cfg.mitigation:
        return counts.magnetization(counts.qubits)
    cm = analytic_confusion(
        setup.noise_model.p_ro, singleton_groups(counts.qubits)
    )
    quasi = mitigate_counts(counts, cm)
    quasi = rescale_low_confidence(quasi, 1.0 / cfg.shots)
    return quasi_magnetization(quasi, len(counts.qubits))


def _point_task(args) -> tuple[int, float, float, float]:
    setup, k, run_fraction = args
    started = time.perf_counter()
    parts = []
    for axis_index, axis in enumerate(("X", "Y")):
        circuit = build_point_circuit(setup, k, axis)
        parts.append(
            _estimate(setup, circuit, 2 * k + axis_index, run_fraction)
        )
    return k, parts[0], parts[1], time.perf_counter() - started


@dataclass(frozen=True)
class SimulationResult:
    """FID and provenance of one simulate run."""

    setup: ExperimentSetup
    fid: FidSeries
    acquisition_order: tuple[int, ...]
    per_point_seconds: tuple[float, ...]


def run_simulation(
    cfg: ExperimentConfig, workspace: str = ".", workers: int = 1
) -> SimulationResult:
    """Estimate the complex FID of a config, one circuit pair per point.

    Points fan out across a process pool when workers > 1; results are
    keyed by substream, so the FID is identical either way.
    """
    setup = prepare_experiment(cfg, workspace)
    if setup.system.n_spins > DEFAULT_WIDTH_LIMIT:
        raise CapabilityError(
            f"{setup.system.n_spins}-spin simulation needs a statevector "
            f"beyond the {DEFAULT_WIDTH_LIMIT}-qubit limit; depth-stats "
            f"reports circuit structure without simulating"
        )
    n = cfg.points
    if cfg.randomized:
        order = randomized_time_ordering(n, cfg.seed)
    else:
        order = tuple(range(n))
    position = {k: p for p, k in enumerate(order)}
    tasks = [
        (setup, k, position[k] / (n - 1) if n > 1 else 0.0) for k in range(n)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_point_task, tasks, chunksize=8))
    else:
        rows = [_point_task(t) for t in tasks]
    rows.sort()
    re = [r[1] for r in rows]
    im = [r[2] for r in rows]
    seconds = tuple(r[3] for r in rows)
    fid = assemble_fid(re, im, cfg.dwell_time, label=cfg.label)
    return SimulationResult(setup, fid, order, seconds)
