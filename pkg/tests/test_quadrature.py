from __future__ import annotations

import math

import numpy as np
import pytest

from aptree.exceptions import DivergenceError, DomainError, UserError
from aptree.quadrature import (
    AccumulatedProfile,
    AffineProfile,
    ConstantProfile,
    Factor,
    IntegrandSpec,
    ess_extremum,
    integrate,
    integrate_log,
    integrate_log_span,
    integrate_product,
    span_for_integral,
    sublevel_intervals,
)
from aptree.weights import (
    ConstantWeight,
    ExponentialWeight,
    PowerWeight,
    StepWeight,
    TabulatedWeight,
    TruncatedReciprocalWeight,
)

ONE = ConstantWeight(1.0)


def test_binary_multiplicity_sums_levels():
    spec = IntegrandSpec.measure(ONE, branching=2, anchor_level=0)
    assert integrate(spec, 0.0, 2.0) == pytest.approx(6.0, rel=1e-12)


def test_identity_integrand_gives_length():
    assert integrate(IntegrandSpec.of(ONE), 1.0, 3.0) == pytest.approx(2.0, rel=1e-12)


def test_reciprocal_integrates_to_log():
    spec = IntegrandSpec.of(TruncatedReciprocalWeight(1.0))
    assert integrate(spec, 5.0, 15.0) == pytest.approx(math.log(3.0), rel=1e-10)


def test_integral_across_a_breakpoint():
    # min{1, 1/s} over [0, e] = 1 + 1
    spec = IntegrandSpec.of(TruncatedReciprocalWeight(1.0))
    assert integrate(spec, 0.0, math.e) == pytest.approx(2.0, rel=1e-10)


def test_step_weight_matches_multiplicity_form():
    step = IntegrandSpec.of(StepWeight([1.0], tail="geometric", ratio=2.0))
    counted = IntegrandSpec.measure(ONE, branching=2, anchor_level=1)
    expected = 0.7 + 2 + 4 + 8 + 16 + 32 + 64 + 0.7 * 128
    assert integrate(step, 0.3, 7.7) == pytest.approx(expected, rel=1e-9)
    assert integrate(counted, 0.3, 7.7) == pytest.approx(expected, rel=1e-9)


def test_many_levels_use_geometric_blocks():
    spec = IntegrandSpec.measure(ONE, branching=2, anchor_level=0)
    # sum_{n=1}^{100} 2**n
    expected = math.log(2.0**101 - 2.0)
    assert integrate_log(spec, 0.0, 100.0) == pytest.approx(expected, rel=1e-10)


def test_power_bracket_matches_closed_form():
    # (s**2)**(-1) on [1, 2]
    spec = IntegrandSpec(base=(Factor(PowerWeight(2.0, shift=0.0)),), power=-1.0)
    assert integrate(spec, 1.0, 2.0) == pytest.approx(0.5, rel=1e-10)


def test_non_integrable_power_diverges():
    spec = IntegrandSpec(base=(Factor(PowerWeight(2.0, shift=0.0)),), power=-1.0)
    assert integrate_log(spec, 0.0, 1.0) == math.inf
    with pytest.raises(DivergenceError):
        integrate(spec, 0.0, 1.0)


def test_singular_but_integrable_power():
    spec = IntegrandSpec.of(PowerWeight(-0.5, shift=0.0))
    assert integrate(spec, 0.0, 4.0) == pytest.approx(4.0, rel=1e-9)


def test_interval_validation():
    spec = IntegrandSpec.of(ONE)
    with pytest.raises(DomainError):
        integrate(spec, -1.0, 1.0)
    with pytest.raises(UserError):
        integrate(spec, 2.0, 1.0)
    assert integrate(spec, 1.0, 1.0) == 0.0


def test_ap_bracket_rejects_p_equal_one():
    with pytest.raises(UserError):
        IntegrandSpec.ap_bracket(ONE, ONE, 1, 0, 1.0)


def test_ess_extremum_examples():
    ratio = IntegrandSpec.a1_ratio(ONE, TruncatedReciprocalWeight(1.0), 1, 0)
    assert ess_extremum(ratio, 10.0, 15.0, "sup") == pytest.approx(15.0, rel=1e-9)
    assert ess_extremum(IntegrandSpec.of(ONE), 0.0, 3.0, "inf") == pytest.approx(1.0)
    counted = IntegrandSpec.measure(ONE, branching=2, anchor_level=1)
    assert ess_extremum(counted, 0.5, 2.5, "sup") == pytest.approx(4.0)
    assert ess_extremum(counted, 0.5, 2.5, "inf") == pytest.approx(1.0)


def test_ess_extremum_ignores_single_points():
    # The step value at the integer 1 belongs to level 0 and the open interval (1, 2) never sees it.
    step = IntegrandSpec.of(StepWeight([5.0, 1.0]))
    assert ess_extremum(step, 1.0, 2.0, "sup") == pytest.approx(1.0)


def test_ess_extremum_rejects_empty_interval():
    with pytest.raises(UserError):
        ess_extremum(IntegrandSpec.of(ONE), 1.0, 1.0, "sup")


SPECS = [
    IntegrandSpec.of(TruncatedReciprocalWeight(1.0)),
    IntegrandSpec.measure(ONE, branching=3, anchor_level=0),
    IntegrandSpec.ap_bracket(ONE, TruncatedReciprocalWeight(1.0), 1, 0, 2.0),
    IntegrandSpec.ap_bracket(ExponentialWeight(), ONE, 2, 1, 3.0),
    IntegrandSpec.of(TabulatedWeight([0.0, 1.0, 2.0, 4.0], [1.0, 2.0, 1.5, 3.0])),
    IntegrandSpec.of(PowerWeight(2.0, shift=1.0)),
]


@pytest.mark.parametrize("spec", SPECS)
def test_integral_is_additive(spec):
    rng = np.random.default_rng(7)
    for a, b, c in np.sort(rng.uniform(0.0, 6.0, size=(10, 3)), axis=1):
        whole = integrate(spec, a, c)
        split = integrate(spec, a, b) + integrate(spec, b, c)
        assert whole == pytest.approx(split, rel=1e-8)


@pytest.mark.parametrize("spec", SPECS)
def test_mean_value_sandwich(spec):
    rng = np.random.default_rng(11)
    for a, b in np.sort(rng.uniform(0.0, 6.0, size=(10, 2)), axis=1):
        if b - a < 1e-6:
            continue
        mean = integrate(spec, a, b) / (b - a)
        assert ess_extremum(spec, a, b, "sup") >= mean * (1 - 1e-8)
        assert ess_extremum(spec, a, b, "inf") <= mean * (1 + 1e-8)


@pytest.mark.parametrize("spec", SPECS)
def test_sup_is_monotone_in_the_interval(spec):
    inner = ess_extremum(spec, 1.5, 2.5, "sup")
    outer = ess_extremum(spec, 0.5, 4.5, "sup")
    assert outer >= inner * (1 - 1e-9)


def test_sublevel_intervals_closed_form():
    spec = IntegrandSpec.of(TruncatedReciprocalWeight(1.0))
    [(lo, hi)] = sublevel_intervals(spec, 0.0, 10.0, 0.5)
    assert lo == pytest.approx(2.0)
    assert hi == pytest.approx(10.0)
    assert sublevel_intervals(spec, 0.0, 10.0, 0.05) == []


def test_sublevel_intervals_of_a_step_weight():
    spec = IntegrandSpec.of(StepWeight([1.0, 3.0, 1.0, 3.0]))
    found = sublevel_intervals(spec, 0.0, 4.0, 2.0)
    assert found == [(0.0, 1.0), (2.0, 3.0)]


def test_accumulated_profile():
    profile = AccumulatedProfile(IntegrandSpec.of(ONE), 1.0, 5.0)
    assert profile(0.5) == 0.0
    assert profile(3.0) == pytest.approx(2.0)
    assert profile(9.0) == pytest.approx(4.0)
    assert profile.total == pytest.approx(4.0)
    assert profile.solve(1.5) == pytest.approx(2.5)
    with pytest.raises(UserError):
        profile.solve(4.0)


def test_accumulated_profile_on_a_support():
    profile = AccumulatedProfile(IntegrandSpec.of(ONE), 0.0, 4.0, support=[(1.0, 2.0), (3.0, 9.0)])
    assert profile(1.0) == 0.0
    assert profile(2.5) == pytest.approx(1.0)
    assert profile.total == pytest.approx(2.0)


def test_integrate_product():
    spec = IntegrandSpec.of(ONE)
    assert integrate_product(AffineProfile(0.0, 1.0), spec, 0.0, 2.0) == pytest.approx(2.0)
    assert integrate_product(ConstantProfile(3.0), spec, 0.0, 2.0) == pytest.approx(6.0)
    counted = IntegrandSpec.measure(ONE, branching=2, anchor_level=0)
    # s * 2**ceil(s) on [0, 2] = 2 * 1/2 + 4 * 3/2
    assert integrate_product(AffineProfile(0.0, 1.0), counted, 0.0, 2.0) == pytest.approx(7.0)


@pytest.mark.parametrize("descending", [False, True])
def test_span_integrals_below_the_resolution_of_the_start(descending):
    # Far out, e^s changes by a whole unit in the last place over spans of 1e-15.
    spec = IntegrandSpec.of(ExponentialWeight())
    a, length = 31.62, 1e-15
    assert a + length == a
    log_value = integrate_log_span(spec, a, length, descending=descending)
    assert log_value == pytest.approx(a + math.log(length), rel=1e-12)
    found = span_for_integral(spec, a, math.exp(a) * length, hint=length, descending=descending)
    assert found == pytest.approx(length, rel=1e-9)


def test_span_integral_of_a_power():
    spec = IntegrandSpec.of(PowerWeight(2.0, shift=0.0))
    for descending in (False, True):
        log_value = integrate_log_span(spec, 1e8, 1e-10, descending=descending)
        assert log_value == pytest.approx(math.log(1e6), rel=1e-12)


def test_span_above_a_vertex_counts_the_children():
    spec = IntegrandSpec.measure(ONE, branching=2, anchor_level=1)
    assert integrate_log_span(spec, 1.0, 1e-14) == pytest.approx(math.log(2e-14), rel=1e-12)
    below = integrate_log_span(spec, 1.0, 1e-14, descending=True)
    assert below == pytest.approx(math.log(1e-14), rel=1e-12)


def test_span_across_a_breakpoint_has_no_closed_form():
    spec = IntegrandSpec.of(TruncatedReciprocalWeight(1.0))
    assert integrate_log_span(spec, 1.0 - 1e-13, 1e-12) is None
    assert span_for_integral(spec, 1.0 - 1e-13, 1e-12, hint=1e-12) is None
