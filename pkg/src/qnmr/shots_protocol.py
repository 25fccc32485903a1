"""Shot-budget selection and drift-averaging acquisition order.

The budget sweep estimates the magnetization at a random sample of
acquisition times for every budget on a grid, mitigates readout, and
reports the mean squared error against the exact expectation. The
selected budget is the smallest one whose error is within a relative
margin of the best (largest-budget) error, the knee of the curve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .circuits import observable_circuit
from .engine import expectation_magnetization, run_circuit
from .errors import ValidationError
from .hamiltonian import PauliTermList
from .mitigation import mitigate_counts, quasi_magnetization, singleton_groups
from .mitigation import analytic_confusion
from .noise import NoiseModel, noisy_run

DEFAULT_SHOTS_GRID = tuple(range(100, 2001, 100))
DEFAULT_TIME_SAMPLES = 20


@dataclass(frozen=True)
class ShotBudgetCurve:
    """MSE against exact expectations for each candidate budget.

    point_mse[i][j] is the repeat-averaged squared error of budget
    grid[i] at sampled time index time_indices[j]; mse[i] is its mean
    over the sampled times.
    """

    grid: tuple[int, ...]
    mse: tuple[float, ...]
    selected: int
    epsilon: float
    time_indices: tuple[int, ...]
    point_mse: tuple[tuple[float, ...], ...] = ()


def randomized_time_ordering(n_points: int, seed: int) -> tuple[int, ...]:
    """Uniform, seed-deterministic permutation of the time indices."""
    if n_points < 1:
        raise ValidationError(f"need at least one time point, got {n_points}")
    order = rng.stream(seed, rng.ORDERING).permutation(n_points)
    return tuple(int(k) for k in order)


def select_budget(grid, mse, epsilon: float = 0.1) -> int:
    """Smallest budget whose MSE is within (1+epsilon) of the last one."""
    if len(grid) != len(mse) or not grid:
        raise ValidationError("grid and mse must be equal-length and nonempty")
    if epsilon < 0:
        raise ValidationError(f"epsilon must be nonnegative, got {epsilon}")
    floor = mse[-1] * (1.0 + epsilon)
    for n, value in zip(grid, mse):
        if value <= floor:
            return int(n)
    return int(grid[-1])


def shot_budget_sweep(
    h: PauliTermList,
    dwell_time: float,
    n_points: int,
    nm: NoiseModel,
    observed=None,
    grid=DEFAULT_SHOTS_GRID,
    time_samples: int = DEFAULT_TIME_SAMPLES,
    repeats: int = 3,
    seed: int = 0,
    epsilon: float = 0.1,
    max_width: int | None = None,
) -> ShotBudgetCurve:
    """MSE-versus-shots curve over a random sample of acquisition times.

    Each (budget, repeat, time, axis) combination draws from its own
    substream, so the curve is deterministic under the seed and
    independent of evaluation order.
    """
    grid = tuple(int(n) for n in grid)
    if not grid or any(n < 1 for n in grid):
        raise ValidationError("shots grid must be nonempty and positive")
    if list(grid) != sorted(grid):
        raise ValidationError("shots grid must be ascending")
    if dwell_time <= 0:
        raise ValidationError(f"dwell time must be positive, got {dwell_time}")
    if n_points < 1 or time_samples < 1 or repeats < 1:
        raise ValidationError("n_points, time_samples and repeats must be >= 1")
    observed = tuple(observed) if observed is not None else tuple(range(h.n_spins))

    picker = rng.stream(seed, rng.PROTOCOL)
    n_sample = min(time_samples, n_points)
    indices = tuple(
        int(k) for k in picker.choice(n_points, size=n_sample, replace=False)
    )

    # exact references and circuits, one pair per sampled time
    circuits = []
    exact = []
    for k in indices:
        t = k * dwell_time
        cx = observable_circuit(h, t, "X", observed)
        cy = observable_circuit(h, t, "Y", observed)
        mx = expectation_magnetization(
            run_circuit(cx, max_width=max_width), observed, "Z"
        )
        my = expectation_magnetization(
            run_circuit(cy, max_width=max_width), observed, "Z"
        )
        circuits.append((cx, cy))
        exact.append(complex(mx, my))

    cm = analytic_confusion(nm.p_ro, singleton_groups(observed))

    mse = []
    point_mse = []
    for n_index, n_shots in enumerate(grid):
        errors = np.zeros((repeats, n_sample))
        for repeat in range(repeats):
            for k_index, (pair, reference) in enumerate(zip(circuits, exact)):
                parts = []
                for axis_index, circuit in enumerate(pair):
                    draw = (
                        ((n_index * repeats + repeat) * n_sample + k_index) * 2
                        + axis_index
                    )
                    counts = noisy_run(
                        circuit, nm, n_shots,
                        seed=seed, time_index=draw, max_width=max_width,
                    )
                    quasi = mitigate_counts(counts, cm)
                    parts.append(quasi_magnetization(quasi, len(observed)))
                estimate = complex(parts[0], parts[1])
                errors[repeat, k_index] = abs(estimate - reference) ** 2
        point_mse.append(tuple(float(v) for v in errors.mean(axis=0)))
        mse.append(float(errors.mean()))

    selected = select_budget(grid, mse, epsilon)
    return ShotBudgetCurve(
        grid, tuple(mse), selected, epsilon, indices, tuple(point_mse)
    )


def drift_ordering_bias(
    h: PauliTermList,
    dwell_time: float,
    n_points: int,
    nm: NoiseModel,
    n_shots: int,
    repeats: int = 4,
    seed: int = 0,
    randomized: bool = True,
    observed=None,
    max_width: int | None = None,
) -> float:
    """Worst-case complex-magnetization bias across the run under drift.

    Acquisition position sets the drifted error rates; the measurement
    randomness per (repeat, time, axis) is identical for both orderings,
    so sequential and randomized runs differ only through where each
    time point lands in the run.
    """
    if n_points < 2:
        raise ValidationError("drift needs at least two time points")
    if dwell_time <= 0:
        raise ValidationError(f"dwell time must be positive, got {dwell_time}")
    observed = tuple(observed) if observed is not None else tuple(range(h.n_spins))

    circuits = []
    exact = []
    for k in range(n_points):
        t = k * dwell_time
        cx = observable_circuit(h, t, "X", observed)
        cy = observable_circuit(h, t, "Y", observed)
        mx = expectation_magnetization(
            run_circuit(cx, max_width=max_width), observed, "Z"
        )
        my = expectation_magnetization(
            run_circuit(cy, max_width=max_width), observed, "Z"
        )
        circuits.append((cx, cy))
        exact.append(complex(mx, my))

    estimates = np.zeros(n_points, dtype=complex)
    for repeat in range(repeats):
        if randomized:
            order = rng.stream(seed, rng.ORDERING, repeat).permutation(n_points)
        else:
            order = np.arange(n_points)
        for position, k in enumerate(int(i) for i in order):
            fraction = position / (n_points - 1)
            parts = []
            for axis_index, circuit in enumerate(circuits[k]):
                counts = noisy_run(
                    circuit, nm, n_shots,
                    seed=seed,
                    time_index=2 * (repeat * n_points + k) + axis_index,
                    run_fraction=fraction, max_width=max_width,
                )
                parts.append(counts.magnetization(observed))
            estimates[k] += complex(parts[0], parts[1])
    estimates /= repeats
    return float(np.abs(estimates - np.array(exact)).max())
