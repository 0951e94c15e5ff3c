from __future__ import annotations

import math

import numpy as np
import pytest

from aptree.exceptions import DomainError, SolverError, UserError
from aptree.geometry import RadialPoint, TreeSpace, level_index
from aptree.weights import ConstantWeight, ExponentialWeight, PowerWeight, StepWeight

ONE = ConstantWeight(1.0)


@pytest.fixture(scope="module")
def flat() -> TreeSpace:
    return TreeSpace(1, ONE, ONE)


@pytest.fixture(scope="module")
def exponential() -> TreeSpace:
    return TreeSpace(1, ExponentialWeight(), ONE)


@pytest.fixture(scope="module")
def stepped() -> TreeSpace:
    return TreeSpace(2, StepWeight([2.0, 1.0]), ONE)


def test_level_index():
    assert level_index(2.0) == 2
    assert level_index(2.1) == 3
    assert level_index(0.0) == 0
    with pytest.raises(DomainError):
        level_index(-1.0)


def test_radial_point():
    assert RadialPoint(2.5).level == 3
    with pytest.raises(DomainError):
        RadialPoint(-0.5)


def test_metric_from_root(flat, exponential, stepped):
    assert flat.metric_from_root(7.0) == pytest.approx(7.0)
    assert exponential.metric_from_root(1.0) == pytest.approx(math.e - 1, rel=1e-10)
    assert stepped.metric_from_root(1.5) == pytest.approx(2.5, rel=1e-12)
    assert flat.distance(2.0, 5.5) == pytest.approx(3.5)


def test_descendant_at(flat, exponential, stepped):
    assert flat.descendant_at(1.0, 2.0) == pytest.approx(3.0)
    assert exponential.descendant_at(0.0, math.e - 1) == pytest.approx(1.0, rel=1e-10)
    assert stepped.descendant_at(0.5, 1.5) == pytest.approx(1.5, rel=1e-10)
    assert flat.descendant_at(4.0, 0.0) == 4.0


def test_ancestor_at(flat, exponential):
    assert flat.ancestor_at(1.0, 5.0) == 0.0
    assert flat.ancestor_at(10.0, 4.0) == pytest.approx(6.0)
    expected = math.log((math.e + 1) / 2)
    assert exponential.ancestor_at(1.0, (math.e - 1) / 2) == pytest.approx(expected, rel=1e-9)


def test_negative_radius_is_rejected(flat):
    with pytest.raises(DomainError):
        flat.descendant_at(1.0, -1.0)
    with pytest.raises(DomainError):
        flat.ancestor_at(1.0, -1.0)
    with pytest.raises(DomainError):
        flat.metric_from_root(-1.0)


@pytest.mark.parametrize("lam", [ONE, ExponentialWeight(rate=0.1), StepWeight([2.0, 1.0, 3.0])])
def test_round_trip_and_composition(lam):
    space = TreeSpace(1, lam, ONE)
    rng = np.random.default_rng(3)
    for t, r1, r2 in rng.uniform(0.0, 20.0, size=(20, 3)):
        down = space.descendant_at(t, r1)
        assert space.ancestor_at(down, r1) == pytest.approx(t, rel=1e-9, abs=1e-9)
        twice = space.descendant_at(space.descendant_at(t, r1), r2)
        assert space.descendant_at(t, r1 + r2) == pytest.approx(twice, rel=1e-9)


def test_metric_is_strictly_increasing():
    space = TreeSpace(1, PowerWeight(0.5, shift=0.0), ONE)
    probes = np.geomspace(1e-3, 1e4, 60)
    values = [space.metric_from_root(t) for t in probes]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_far_points_past_the_cache():
    space = TreeSpace(1, PowerWeight(-0.5, shift=1.0), ONE)
    t = space.descendant_at(0.0, 1e9)
    assert space.metric_from_root(t) == pytest.approx(1e9, rel=1e-8)


def test_finite_diameter_is_rejected():
    with pytest.raises(UserError):
        TreeSpace(1, ExponentialWeight(rate=-1.0), ONE)
    with pytest.raises(UserError):
        TreeSpace(1, PowerWeight(-2.0, shift=1.0), ONE)


def test_probe_bound_is_enforced():
    # A slowly growing metric that passes the tail certificate but not a strict probe.
    with pytest.raises(UserError):
        TreeSpace(1, PowerWeight(-1.0, shift=1.0), ONE, probe_t=1e6, probe_bound=100.0)


def test_invalid_branching():
    with pytest.raises(UserError):
        TreeSpace(0, ONE, ONE)
    with pytest.raises(UserError):
        TreeSpace(2.5, ONE, ONE)  # type: ignore[arg-type]


def test_describe_records_the_diameter_contract(stepped):
    info = stepped.describe()
    assert info["K"] == 2
    assert info["lambda"]["family"] == "step"
    assert info["infinite_diameter"]["tail_certificate"] is True


def test_local_span_keeps_short_arcs_far_out(exponential):
    t, r = 31.62, 0.0562
    expected = r * math.exp(-t)
    assert exponential.local_span(t, r) == pytest.approx(expected, rel=1e-9)
    assert exponential.local_span(t, r, descending=True) == pytest.approx(expected, rel=1e-9)
    assert exponential.local_span(0.0, 1.0, descending=True) is None
    assert TreeSpace(1, ONE, ONE).local_span(4.0, 0.5) == 0.5


def test_radius_below_coordinate_resolution_is_an_error(exponential):
    with pytest.raises(SolverError):
        exponential.descendant_at(31.62, 0.0562)
    with pytest.raises(SolverError):
        exponential.ancestor_at(31.62, 0.0562)

