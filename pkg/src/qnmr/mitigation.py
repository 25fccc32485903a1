"""Readout-error mitigation with per-group confusion matrices.

Measured qubits are partitioned into small groups; each group gets a
column-stochastic confusion matrix, estimated from basis-state
calibration circuits or built analytically from the flip probability.
Inversion happens on the observed-outcome subspace: the confusion
matrix restricted to seen bitstrings, columns renormalized so no
probability leaks out of the subspace, then one linear solve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .circuits import Circuit
from .engine import ShotCounts
from .errors import MitigationError, ValidationError
from .gates import GateKind, gate
from .noise import NoiseModel, noisy_run

_MAX_GROUP = 4
_CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class ConfusionModel:
    """Partitioned readout-flip statistics.

    matrices[g][m, b] is the probability of reading outcome m when the
    group was prepared in basis state b; bit k of a group index belongs
    to groups[g][k].
    """

    groups: tuple[tuple[int, ...], ...]
    matrices: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if len(self.groups) != len(self.matrices):
            raise ValidationError("one matrix per group required")
        seen: set[int] = set()
        for group, matrix in zip(self.groups, self.matrices):
            if not 1 <= len(group) <= _MAX_GROUP:
                raise ValidationError(
                    f"group sizes must be 1..{_MAX_GROUP}, got {len(group)}"
                )
            if seen & set(group):
                raise ValidationError(f"group {group} overlaps another group")
            seen |= set(group)
            dim = 1 << len(group)
            if matrix.shape != (dim, dim):
                raise ValidationError(
                    f"matrix for group {group} must be {dim}x{dim}"
                )
            if np.any(matrix < -1e-12):
                raise ValidationError("confusion entries must be nonnegative")
            if np.abs(matrix.sum(axis=0) - 1.0).max() > 1e-9:
                raise ValidationError("confusion columns must sum to 1")

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for group in self.groups for q in group)


def singleton_groups(qubits) -> tuple[tuple[int, ...], ...]:
    """Default partition: every measured qubit alone."""
    return tuple((int(q),) for q in qubits)


def analytic_confusion(p_ro: float, groups) -> ConfusionModel:
    """Tensor-product confusion from a uniform flip probability."""
    if not 0.0 <= p_ro <= 1.0:
        raise ValidationError(f"p_ro must be in [0,1], got {p_ro}")
    one = np.array([[1.0 - p_ro, p_ro], [p_ro, 1.0 - p_ro]])
    matrices = []
    for group in groups:
        m = np.array([[1.0]])
        for _ in group:
            m = np.kron(one, m)
        matrices.append(m)
    return ConfusionModel(tuple(tuple(g) for g in groups), tuple(matrices))


def calibrate_confusion(
    nm: NoiseModel,
    groups,
    width: int,
    n_cal: int = 10_000,
    seed: int = 0,
    analytic: bool = False,
) -> ConfusionModel:
    """Estimate per-group confusion under the noise model.

    Each group runs one preparation circuit per basis state: X gates on
    the set bits, then measurement of the group. Calibration draws come
    from a dedicated substream, so they never collide with acquisition
    draws made under the same seed.
    """
    groups = tuple(tuple(int(q) for q in group) for group in groups)
    if analytic:
        return analytic_confusion(nm.p_ro, groups)
    if n_cal < 1:
        raise ValidationError(f"need at least one calibration shot, got {n_cal}")
    cal_seed = int(rng.stream(seed, rng.CALIBRATION).integers(1 << 63))
    matrices = []
    for g_index, group in enumerate(groups):
        if max(group) >= width:
            raise ValidationError(f"group {group} exceeds width {width}")
        dim = 1 << len(group)
        matrix = np.zeros((dim, dim))
        for basis in range(dim):
            gates = [
                gate(GateKind.PAULIX, q)
                for k, q in enumerate(group)
                if (basis >> k) & 1
            ]
            gates += [gate(GateKind.MEASURE, q) for q in group]
            circuit = Circuit(width, tuple(gates), measured_qubits=group)
            counts = noisy_run(
                circuit, nm, n_cal,
                seed=cal_seed, time_index=(g_index << len(group)) + basis,
            )
            for outcome, count in counts.as_dict().items():
                matrix[outcome, basis] = count / n_cal
        matrices.append(matrix)
    return ConfusionModel(groups, tuple(matrices))


def _group_subindices(cm: ConfusionModel, qubits, support):
    """Per group, each support outcome's index within that group."""
    out = []
    for group in cm.groups:
        positions = [qubits.index(q) for q in group]
        idx = np.zeros(len(support), dtype=np.int64)
        for k, p in enumerate(positions):
            idx |= ((support >> np.uint64(p)) & np.uint64(1)).astype(np.int64) << k
        out.append(idx)
    return out


def mitigate_distribution(
    probs: dict[int, float], qubits, cm: ConfusionModel
) -> dict[int, float]:
    """Solve readout errors out of an outcome distribution.

    probs maps outcomes to observed probabilities; bit p of an outcome
    belongs to qubits[p]. The result is over the same outcomes, sums to
    1, and may contain small negatives.
    """
    qubits = tuple(qubits)
    if set(cm.qubits) != set(qubits):
        raise ValidationError(
            "confusion groups must partition exactly the measured qubits"
        )
    if not probs:
        raise ValidationError("observed distribution is empty")
    support = np.array(sorted(probs), dtype=np.uint64)
    y = np.array([probs[int(o)] for o in support], dtype=float)

    matrix = np.ones((len(support), len(support)))
    for m, idx in zip(cm.matrices, _group_subindices(cm, qubits, support)):
        matrix *= m[idx[:, None], idx[None, :]]

    col = matrix.sum(axis=0)
    if np.any(col <= 0.0):
        raise MitigationError(
            "confusion restricted to the observed outcomes has an all-zero "
            "column; mitigation is not identifiable"
        )
    matrix /= col[None, :]

    condition = float(np.linalg.cond(matrix))
    if not np.isfinite(condition) or condition > _CONDITION_LIMIT:
        raise MitigationError(
            f"confusion matrix is ill-conditioned (condition number "
            f"{condition:.3e}); cannot invert reliably"
        )
    try:
        x = np.linalg.solve(matrix, y)
    except np.linalg.LinAlgError as exc:
        raise MitigationError(
            f"confusion solve failed (condition number {condition:.3e}): {exc}"
        ) from exc
    return {int(o): float(v) for o, v in zip(support, x)}


def mitigate_counts(counts: ShotCounts, cm: ConfusionModel) -> dict[int, float]:
    """Quasi-distribution of sampled counts with readout errors solved out."""
    probs = {
        int(o): int(c) / counts.n_shots
        for o, c in zip(counts.outcomes, counts.counts)
    }
    return mitigate_distribution(probs, counts.qubits, cm)


def rescale_low_confidence(quasi: dict[int, float], tau: float) -> dict[int, float]:
    """Clip negatives, damp small entries smoothly, renormalize.

    Entries below tau shrink by p/(p+tau), so the damping vanishes as
    the entry approaches the threshold and the result stays monotone.
    """
    if tau < 0:
        raise ValidationError(f"threshold must be nonnegative, got {tau}")
    damped = {}
    for outcome, value in quasi.items():
        p = max(float(value), 0.0)
        if 0.0 < p < tau:
            p *= p / (p + tau)
        damped[outcome] = p
    total = sum(damped.values())
    if total <= 0.0:
        raise MitigationError(
            "distribution is zero everywhere after clipping; nothing to rescale"
        )
    return {o: v / total for o, v in damped.items()}


def quasi_magnetization(quasi: dict[int, float], n_bits: int) -> float:
    """Sum of <Z>/2 over the measured bits of a (quasi-)distribution."""
    if n_bits < 1:
        raise ValidationError("need at least one measured bit")
    total = 0.0
    for outcome, weight in quasi.items():
        ones = bin(outcome & ((1 << n_bits) - 1)).count("1")
        total += weight * (n_bits - 2 * ones)
    return 0.5 * total
