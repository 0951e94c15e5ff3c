from __future__ import annotations

import math

import numpy as np
import pytest

from aptree.catalog import CATALOG
from aptree.exceptions import DomainError, UserError
from aptree.weights import (
    ConstantWeight,
    ExponentialWeight,
    PiecewiseWeight,
    PowerWeight,
    StepWeight,
    TabulatedWeight,
    TruncatedReciprocalWeight,
    evaluate,
)


def test_truncated_reciprocal_matches_hand_values():
    w = TruncatedReciprocalWeight(1.0)
    assert evaluate(w, 3.0) == pytest.approx(1 / 3)
    assert evaluate(w, 0.5) == 1.0
    assert evaluate(w, 0.0) == 1.0


def test_constant_weight_is_constant():
    assert evaluate(ConstantWeight(1.0), 17.5) == 1.0
    assert evaluate(ConstantWeight(2.5), 0.0) == 2.5


def test_step_weight_uses_right_closed_levels():
    w = StepWeight([2.0, 4.0, 8.0], tail="geometric", ratio=2.0)
    assert evaluate(w, 2.5) == 8.0
    assert evaluate(w, 0.0) == 2.0
    assert evaluate(w, 1.0) == 2.0
    assert evaluate(w, 1.0 + 1e-9) == 4.0
    # Past the table the geometric tail applies.
    assert evaluate(w, 3.5) == pytest.approx(16.0)
    assert evaluate(w, 5.5) == pytest.approx(64.0)


def test_step_weight_constant_tail_repeats_last_value():
    w = StepWeight([1.0, 3.0])
    assert evaluate(w, 10.0) == 3.0
    assert w.diverges_at_infinity


def test_tabulated_weight_interpolates():
    linear = TabulatedWeight([0.0, 1.0, 3.0], [1.0, 2.0, 4.0])
    assert evaluate(linear, 0.5) == pytest.approx(1.5)
    assert evaluate(linear, 2.0) == pytest.approx(3.0)
    assert evaluate(linear, 10.0) == pytest.approx(4.0)

    stepped = TabulatedWeight([0.0, 1.0, 3.0], [1.0, 2.0, 4.0], interpolation="constant")
    assert evaluate(stepped, 0.5) == pytest.approx(1.0)
    assert evaluate(stepped, 2.0) == pytest.approx(2.0)


def test_tabulated_geometric_tail_grows_per_unit():
    w = TabulatedWeight([0.0, 1.0], [1.0, 2.0], tail="geometric", ratio=3.0)
    assert evaluate(w, 3.0) == pytest.approx(2.0 * 9.0)


def test_power_and_exponential_values():
    assert evaluate(PowerWeight(2.0, shift=0.0), 3.0) == pytest.approx(9.0)
    assert evaluate(PowerWeight(-1.0, shift=1.0, scale=2.0), 1.0) == pytest.approx(1.0)
    assert evaluate(ExponentialWeight(base=2.0, rate=-1.0), 3.0) == pytest.approx(0.125)


def test_table_driven_weights_return_their_entries_exactly():
    step = StepWeight([2.0, 4.0, 8.0], tail="geometric", ratio=2.0)
    np.testing.assert_array_equal(step(np.array([0.5, 1.5, 2.5, 3.5, 5.5])), [2, 4, 8, 16, 64])

    stepped = TabulatedWeight([0.0, 1.0, 3.0], [0.1, 0.7, 0.3], interpolation="constant")
    assert [evaluate(stepped, t) for t in (0.0, 0.5, 2.0, 3.0)] == [0.1, 0.1, 0.7, 0.7]
    tail = TabulatedWeight([0.0, 1.0], [1.0, 2.0], tail="geometric", ratio=3.0)
    assert evaluate(tail, 3.0) == 18.0

    mixed = PiecewiseWeight([StepWeight([0.3, 0.7]), ConstantWeight(0.1)], [2.0])
    assert [evaluate(mixed, t) for t in (0.5, 1.5, 2.5)] == [0.3, 0.7, 0.1]


def test_piecewise_weight_switches_at_breakpoints():
    w = PiecewiseWeight([ConstantWeight(1.0), PowerWeight(1.0, shift=0.0)], [2.0])
    assert evaluate(w, 1.0) == 1.0
    assert evaluate(w, 2.0) == 1.0
    assert evaluate(w, 3.0) == pytest.approx(3.0)
    assert w.breakpoints(0.0, 5.0) == [2.0]
    assert w.breakpoints(2.0, 5.0) == []


def test_vectorized_evaluation_returns_arrays():
    w = TruncatedReciprocalWeight(2.0)
    values = w(np.array([1.0, 2.0, 4.0]))
    np.testing.assert_allclose(values, [1.0, 1.0, 0.5])


def test_negative_coordinates_are_rejected():
    with pytest.raises(DomainError):
        evaluate(ConstantWeight(1.0), -0.1)
    with pytest.raises(DomainError):
        PowerWeight(1.0).log_values([1.0, -2.0])


@pytest.mark.parametrize(
    "factory",
    [
        lambda: ConstantWeight(0.0),
        lambda: ConstantWeight(math.inf),
        lambda: PowerWeight(-1.0, shift=0.0),
        lambda: PowerWeight(-2.5, shift=0.0),
        lambda: PowerWeight(1.0, shift=-1.0),
        lambda: ExponentialWeight(base=-2.0),
        lambda: TruncatedReciprocalWeight(0.0),
        lambda: StepWeight([]),
        lambda: StepWeight([1.0, -1.0]),
        lambda: StepWeight([1.0], tail="geometric"),
        lambda: TabulatedWeight([0.0, 1.0], [1.0]),
        lambda: TabulatedWeight([1.0, 0.5], [1.0, 2.0]),
        lambda: TabulatedWeight([0.0, 1.0], [1.0, 0.0]),
        lambda: PiecewiseWeight([ConstantWeight(1.0)], [1.0]),
    ],
)
def test_invalid_weights_are_rejected(factory):
    with pytest.raises(UserError):
        factory()


def test_tail_certificates():
    assert ConstantWeight(1.0).diverges_at_infinity
    assert PowerWeight(-1.0, shift=1.0).diverges_at_infinity
    assert not PowerWeight(-2.0, shift=1.0).diverges_at_infinity
    assert not ExponentialWeight(rate=-1.0).diverges_at_infinity
    assert TruncatedReciprocalWeight().diverges_at_infinity
    assert not StepWeight([1.0], tail="geometric", ratio=0.5).diverges_at_infinity


def test_level_tail_describes_levelwise_weights():
    n0, log_w, log_ratio = ConstantWeight(2.0).level_tail()  # type: ignore[misc]
    assert n0 == 0
    assert log_w == pytest.approx(math.log(2.0))
    assert log_ratio == 0.0

    step = StepWeight([1.0, 4.0], tail="geometric", ratio=2.0)
    n0, log_w, log_ratio = step.level_tail()  # type: ignore[misc]
    assert n0 == 1
    assert log_w == pytest.approx(math.log(4.0))
    assert log_ratio == pytest.approx(math.log(2.0))
    assert PowerWeight(1.0).level_tail() is None


def test_describe_names_the_family():
    assert ConstantWeight(2.0).describe() == {"family": "constant", "value": 2.0}
    assert TruncatedReciprocalWeight(1.0).describe()["family"] == "truncated-reciprocal"
    assert "ratio" in StepWeight([1.0], tail="geometric", ratio=2.0).describe()
    assert "ratio" not in StepWeight([1.0]).describe()


@pytest.mark.parametrize("entry", CATALOG, ids=lambda e: e.name)
def test_catalog_weights_are_strictly_positive(entry):
    entry.lam.validate()
    entry.mu.validate()
