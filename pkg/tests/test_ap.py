from __future__ import annotations

import math

import numpy as np
import pytest

from aptree.ap import DEFAULT_FAR_C, ApParams, a1_value, ap_sup, ap_value, functional
from aptree.catalog import CATALOG, get_entry
from aptree.exceptions import UserError
from aptree.geometry import TreeSpace
from aptree.measures import halfball_measure
from aptree.settings import ScanDomain
from aptree.weights import ConstantWeight, PowerWeight, TruncatedReciprocalWeight

ONE = ConstantWeight(1.0)
SMALL_DOMAIN = ScanDomain(
    t_min=0.1,
    t_max=100.0,
    r_min=0.1,
    r_max=100.0,
    initial_t=(1.0, 10.0),
    initial_r=(1.0, 10.0),
    beta_min_exponent=-3,
    beta_max_exponent=2,
    points_per_decade=2,
    refinements=1,
)


@pytest.fixture(scope="module")
def lebesgue() -> TreeSpace:
    return TreeSpace(1, ONE, ONE)


@pytest.fixture(scope="module")
def truncated() -> TreeSpace:
    return TreeSpace(1, ONE, TruncatedReciprocalWeight(1.0))


@pytest.fixture(scope="module")
def quadratic() -> TreeSpace:
    return TreeSpace(1, ONE, PowerWeight(2.0, shift=0.0))


def test_params_validation():
    assert ApParams(p=2.0).mode == "full"
    assert ApParams(p=2.0, mode="far").c == DEFAULT_FAR_C
    ApParams(p=1.0, mode="far", c=0.5)
    with pytest.raises(UserError):
        ApParams(p=0.5)
    with pytest.raises(UserError):
        ApParams(p=math.inf)
    with pytest.raises(UserError):
        ApParams(p=2.0, mode="sideways")  # type: ignore[arg-type]
    with pytest.raises(UserError):
        ApParams(p=2.0, mode="far", c=0.0)


@pytest.mark.parametrize("t, r", [(5.0, 1.0), (3.0, 3.0), (0.5, 2.0), (0.0, 4.0)])
def test_constant_weights_give_one(lebesgue, t, r):
    assert ap_value(lebesgue, 2.0, t, r) == pytest.approx(1.0, rel=1e-9)
    assert ap_value(lebesgue, 3.5, t, r) == pytest.approx(1.0, rel=1e-9)
    assert a1_value(lebesgue, t, r) == pytest.approx(1.0, rel=1e-9)


def test_constant_weights_give_one_on_a_grid(lebesgue):
    for t in np.linspace(0.5, 50.0, 10):
        for r in t * np.linspace(0.05, 1.0, 10):
            assert abs(ap_value(lebesgue, 2.0, t, r) - 1.0) <= 1e-9
            assert abs(a1_value(lebesgue, t, r) - 1.0) <= 1e-9


def test_spot_values(truncated, quadratic):
    assert ap_value(truncated, 2.0, 10.0, 5.0) == pytest.approx(
        math.log(3.0) / 10 * 12.5, abs=1e-3
    )
    assert ap_value(quadratic, 2.0, 0.01, 1.0) == pytest.approx(
        4 / 3 * (1 / 0.01 - 1 / 1.01), abs=0.5
    )
    assert a1_value(truncated, 10.0, 5.0) == pytest.approx(math.log(3.0) / 10 * 15, rel=1e-6)


def test_a1_on_binary_tree_at_root():
    space = TreeSpace(2, ONE, ONE)
    # mu(F(0, 2)) / 2 = 3 and the ess sup of 2**-j(s) on (0, 1) is 1/2.
    assert a1_value(space, 0.0, 1.0) == pytest.approx(1.5)


def test_divergent_bracket_is_infinite(quadratic):
    assert ap_value(quadratic, 2.0, 0.0, 1.0) == math.inf


def test_invalid_arguments(lebesgue):
    with pytest.raises(UserError):
        ap_value(lebesgue, 1.0, 1.0, 1.0)
    with pytest.raises(UserError):
        ap_value(lebesgue, 2.0, -1.0, 1.0)
    with pytest.raises(UserError):
        a1_value(lebesgue, 1.0, 0.0)


@pytest.mark.parametrize(
    "name", ["example-4.2", "power-half", "shifted-power", "metric-exponential", "binary-uniform"]
)
def test_holder_floor(name):
    space = get_entry(name).build_space()
    rng = np.random.default_rng(11)
    for t, r in zip(rng.uniform(0.0, 20.0, 12), rng.uniform(0.05, 10.0, 12)):
        top = space.ancestor_at(t, r)
        floor = halfball_measure(space, top, 2 * r) / (2 * halfball_measure(space, t, r))
        value = ap_value(space, 2.0, t, r)
        assert value >= floor * (1 - 1e-8)
        assert floor >= 0.5 * (1 - 1e-12)


@pytest.mark.slow
def test_holder_floor_on_random_draws():
    spaces = [entry.build_space() for entry in CATALOG]
    rng = np.random.default_rng(2024)
    draws = 0
    for p in (1.5, 2.0, 4.0):
        picks = rng.integers(len(spaces), size=3334)
        ts = rng.uniform(0.0, 20.0, size=3334)
        rs = rng.uniform(0.05, 10.0, size=3334)
        for i, t, r in zip(picks, ts, rs):
            space = spaces[i]
            top = space.ancestor_at(t, r)
            floor = halfball_measure(space, top, 2 * r) / (2 * halfball_measure(space, t, r))
            assert ap_value(space, p, t, r) >= max(0.5, floor) * (1 - 1e-8)
            draws += 1
    assert draws >= 10_000


def test_invariant_under_scaling_mu():
    rng = np.random.default_rng(3)
    base = TreeSpace(1, ONE, PowerWeight(1.5, shift=1.0))
    for kappa in rng.uniform(0.01, 100.0, 4):
        scaled = TreeSpace(1, ONE, PowerWeight(1.5, shift=1.0, scale=kappa))
        for t, r in [(0.3, 1.0), (4.0, 2.5)]:
            assert ap_value(scaled, 2.5, t, r) == pytest.approx(ap_value(base, 2.5, t, r), rel=1e-8)


def test_functional_dispatches_on_p(truncated):
    assert functional(truncated, ApParams(p=1.0))(10.0, 5.0) == pytest.approx(
        a1_value(truncated, 10.0, 5.0)
    )
    assert functional(truncated, ApParams(p=2.0))(10.0, 5.0) == pytest.approx(
        ap_value(truncated, 2.0, 10.0, 5.0)
    )


def test_sup_of_constant_weights_is_one(lebesgue):
    for params in (ApParams(p=2.0), ApParams(p=2.0, mode="far"), ApParams(p=1.0)):
        estimate = ap_sup(lebesgue, params, SMALL_DOMAIN)
        assert estimate.estimate == pytest.approx(1.0, rel=1e-8)
        assert estimate.verdict == "bounded"
        assert estimate.kind == ("a1" if params.p == 1 else "ap")


def test_far_mode_respects_the_constraint(lebesgue):
    estimate = ap_sup(lebesgue, ApParams(p=2.0, mode="far", c=0.5), SMALL_DOMAIN)
    assert estimate.samples
    for cell in estimate.samples:
        assert cell.t > 0
        assert cell.r <= 0.5 * cell.t * (1 + 1e-9)


def test_quadratic_weight_diverges_toward_the_root(quadratic):
    estimate = ap_sup(quadratic, ApParams(p=2.0), SMALL_DOMAIN)
    assert estimate.verdict == "diverging"
    assert estimate.is_infinite
    assert estimate.argmax is not None
    assert estimate.argmax[0] == 0.0

    toward_root = [ap_value(quadratic, 2.0, t, 1.0) for t in (0.1, 0.01, 0.001)]
    assert toward_root == sorted(toward_root)
    assert toward_root[-1] > 10 * toward_root[0]


@pytest.mark.slow
def test_example_weight_is_bounded_for_a_small_far_constant(truncated):
    params = ApParams(p=2.0, mode="far", c=0.5)
    estimates = []
    for t_max in (1e3, 1e6):
        domain = ScanDomain(
            t_min=1.0,
            t_max=t_max,
            initial_t=(1.0, 1e3),
            beta_min_exponent=-8,
            beta_max_exponent=-1,
        )
        estimate = ap_sup(truncated, params, domain)
        assert estimate.verdict == "bounded"
        assert math.isfinite(estimate.estimate)
        estimates.append(estimate.estimate)
    assert estimates[1] == pytest.approx(estimates[0], rel=1e-2)
