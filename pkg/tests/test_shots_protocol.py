import math

import numpy as np
import pytest

from qnmr.errors import ValidationError
from qnmr.hamiltonian import PauliTermList
from qnmr.noise import NoiseModel
from qnmr.shots_protocol import (
    DEFAULT_SHOTS_GRID,
    DEFAULT_TIME_SAMPLES,
    ShotBudgetCurve,
    drift_ordering_bias,
    randomized_time_ordering,
    select_budget,
    shot_budget_sweep,
)

TOY = PauliTermList(
    4,
    tuple((k, 2 * math.pi * 30.0 * (k + 1)) for k in range(4)),
    ((0, 1, 2 * math.pi * 9.0), (1, 2, 2 * math.pi * -6.0), (2, 3, 2 * math.pi * 4.0)),
)

# equal offsets with uniform exchange keep the transverse signal at
# constant magnitude, so every acquisition position carries equal weight
STEADY = PauliTermList(
    4,
    tuple((k, 2 * math.pi * 150.0) for k in range(4)),
    tuple((i, j, 2 * math.pi * 11.0) for i in range(4) for j in range(i + 1, 4)),
)


def test_defaults_match_documented_protocol():
    assert DEFAULT_SHOTS_GRID == tuple(range(100, 2001, 100))
    assert DEFAULT_TIME_SAMPLES == 20


def test_ordering_of_one_point_is_identity():
    assert randomized_time_ordering(1, seed=12) == (0,)


def test_ordering_is_deterministic_per_seed():
    a = randomized_time_ordering(50, seed=3)
    assert a == randomized_time_ordering(50, seed=3)
    assert a != randomized_time_ordering(50, seed=4)


def test_ordering_is_a_permutation():
    order = randomized_time_ordering(37, seed=9)
    assert sorted(order) == list(range(37))


def test_ordering_positions_are_uniform_on_average():
    # element 0 should land anywhere; its mean position concentrates
    # around (K-1)/2 with standard error (K-1)/sqrt(12 * trials)
    positions = [
        randomized_time_ordering(16, seed=s).index(0) for s in range(400)
    ]
    assert abs(np.mean(positions) - 7.5) < 5 * 15 / math.sqrt(12 * 400)


def test_ordering_rejects_empty_run():
    with pytest.raises(ValidationError):
        randomized_time_ordering(0, seed=0)


def test_select_budget_flat_curve_takes_first():
    assert select_budget((100, 200, 300), (1.0, 1.0, 1.0)) == 100


def test_select_budget_decreasing_curve_takes_last():
    assert select_budget((100, 200, 300), (9.0, 3.0, 1.0)) == 300


def test_select_budget_finds_plateau_start():
    grid = (100, 200, 300, 400)
    mse = (10.0, 1.05, 1.02, 1.0)
    assert select_budget(grid, mse, epsilon=0.1) == 200


def test_select_budget_epsilon_zero_requires_reaching_floor():
    grid = (100, 200, 300)
    mse = (2.0, 1.5, 1.0)
    assert select_budget(grid, mse, epsilon=0.0) == 300
    assert select_budget(grid, mse, epsilon=0.5) == 200


def test_select_budget_validates_input():
    with pytest.raises(ValidationError):
        select_budget((100,), (1.0, 2.0))
    with pytest.raises(ValidationError):
        select_budget((), ())
    with pytest.raises(ValidationError):
        select_budget((100,), (1.0,), epsilon=-0.2)


def test_sweep_validates_arguments():
    nm = NoiseModel()
    with pytest.raises(ValidationError, match="ascending"):
        shot_budget_sweep(TOY, 1e-3, 8, nm, grid=(200, 100))
    with pytest.raises(ValidationError, match="positive"):
        shot_budget_sweep(TOY, 1e-3, 8, nm, grid=(0, 100))
    with pytest.raises(ValidationError, match="dwell"):
        shot_budget_sweep(TOY, 0.0, 8, nm)
    with pytest.raises(ValidationError):
        shot_budget_sweep(TOY, 1e-3, 8, nm, repeats=0)


def test_zero_noise_curve_scales_as_shot_noise():
    curve = shot_budget_sweep(
        TOY, 1e-3, 64, NoiseModel(), time_samples=20, repeats=3, seed=0
    )
    product = np.array(curve.grid) * np.array(curve.mse)
    assert 0.7 <= product[0] / product[-1] <= 1.3
    assert product.max() / product.min() <= 2.5
    assert curve.selected in curve.grid


def test_doubling_shots_halves_zero_noise_error():
    curve = shot_budget_sweep(
        TOY, 1e-3, 64, NoiseModel(), grid=(400, 800),
        time_samples=12, repeats=16, seed=0,
    )
    ratio = curve.mse[0] / curve.mse[1]
    assert 1.4 <= ratio <= 2.6


def test_noisy_sweep_is_deterministic():
    nm = NoiseModel(p1=2.07e-4, p2=1.93e-3, p_ro=7.81e-3)
    kwargs = dict(grid=tuple(range(100, 601, 100)), time_samples=6,
                  repeats=2, seed=1)
    a = shot_budget_sweep(TOY, 1e-3, 64, nm, **kwargs)
    b = shot_budget_sweep(TOY, 1e-3, 64, nm, **kwargs)
    assert a == b
    assert a.selected in a.grid
    assert len(a.time_indices) == 6
    assert a.epsilon == 0.1
    # noise on top of sampling can only raise the error floor
    quiet = shot_budget_sweep(TOY, 1e-3, 64, NoiseModel(), **kwargs)
    assert a.mse[-1] > quiet.mse[-1]


def test_sweep_samples_at_most_all_time_points():
    curve = shot_budget_sweep(
        TOY, 1e-3, 4, NoiseModel(), grid=(50, 100), time_samples=20, repeats=2
    )
    assert sorted(curve.time_indices) == [0, 1, 2, 3]


def test_per_point_errors_average_to_the_curve():
    curve = shot_budget_sweep(
        TOY, 1e-3, 16, NoiseModel(p_ro=0.01), grid=(100, 200),
        time_samples=5, repeats=2, seed=7,
    )
    assert len(curve.point_mse) == 2
    for row, total in zip(curve.point_mse, curve.mse):
        assert len(row) == len(curve.time_indices)
        assert np.mean(row) == pytest.approx(total, rel=1e-12)


def test_drift_study_validates_arguments():
    with pytest.raises(ValidationError):
        drift_ordering_bias(TOY, 1e-3, 1, NoiseModel(), 100)
    with pytest.raises(ValidationError):
        drift_ordering_bias(TOY, 0.0, 8, NoiseModel(), 100)


def test_orderings_agree_exactly_without_drift():
    # draws are paired per (repeat, time, axis), so with no drift the
    # acquisition position cannot influence anything
    nm = NoiseModel(p2=3e-3)
    kwargs = dict(n_shots=64, repeats=2, seed=3)
    randomized = drift_ordering_bias(TOY, 1e-3, 6, nm, randomized=True, **kwargs)
    sequential = drift_ordering_bias(TOY, 1e-3, 6, nm, randomized=False, **kwargs)
    assert randomized == sequential


def test_randomized_ordering_caps_drift_bias():
    nm = NoiseModel(p2=4e-3, drift=3.0)
    wins = 0
    for seed in range(10):
        randomized = drift_ordering_bias(
            STEADY, 5e-4, 24, nm, 256, repeats=3, seed=seed, randomized=True
        )
        sequential = drift_ordering_bias(
            STEADY, 5e-4, 24, nm, 256, repeats=3, seed=seed, randomized=False
        )
        wins += randomized < sequential
    assert wins >= 9
