from __future__ import annotations

import math

import pytest

from aptree.admissibility import (
    COMMENTARY,
    check_certificate_budget,
    classify,
    converse_constant,
    doubling_ratio,
    doubling_sup,
    poincare_certificate,
    root_poincare_certificate,
    theorem_constants,
)
from aptree.ap import ApParams, ap_sup
from aptree.catalog import CATALOG, get_entry
from aptree.exceptions import BudgetExceeded, DomainError, UserError
from aptree.geometry import TreeSpace
from aptree.settings import DivergenceRule, ScanDomain, Tolerance
from aptree.weights import ConstantWeight

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
TREE_DOMAIN = ScanDomain(
    t_min=0.1,
    t_max=30.0,
    r_min=0.1,
    r_max=30.0,
    initial_t=(1.0, 10.0),
    initial_r=(1.0, 10.0),
    beta_min_exponent=-2,
    beta_max_exponent=1,
    points_per_decade=2,
    refinements=1,
)
SHORT_RULE = DivergenceRule(expansions=1)


@pytest.fixture(scope="module")
def lebesgue() -> TreeSpace:
    return TreeSpace(1, ONE, ONE)


@pytest.fixture(scope="module")
def binary() -> TreeSpace:
    return TreeSpace(2, ONE, ONE)


def test_theorem_constants():
    assert theorem_constants(1.0, 1.0) == (4.0, 8.0)
    doubling, poincare = theorem_constants(2.0, 1.0)
    assert doubling == pytest.approx(8.0)
    assert poincare == pytest.approx(2**8.5)
    assert theorem_constants(2.0, 3.0).doubling == pytest.approx(24.0)
    with pytest.raises(UserError):
        theorem_constants(2.0, 0.0)
    with pytest.raises(UserError):
        theorem_constants(2.0, math.inf)


def test_converse_constant():
    assert converse_constant(1.0, 1, 2.0, 1.0) == pytest.approx(64.0)
    assert converse_constant(2.0, 2, 1.0, 1.0) == pytest.approx(16.0)
    assert converse_constant(2.0, 1, 2.0, 3.0) == pytest.approx(4 * 2**9 * 9)
    with pytest.raises(UserError):
        converse_constant(2.0, 1, 0.5, 1.0)


def test_doubling_ratio_examples(lebesgue, binary):
    assert doubling_ratio(lebesgue, 10.0, 1.0) == pytest.approx(2.0)
    assert doubling_ratio(binary, 1.5, 0.5) == pytest.approx(3.0)
    example = get_entry("example-4.2").build_space()
    t = math.exp(5.0)
    expected = (1 + math.log(2 * t)) / math.log(3.0)
    assert doubling_ratio(example, t, t / 2) == pytest.approx(expected, rel=1e-8)
    assert expected == pytest.approx(6.09, abs=0.01)


def test_doubling_sup_of_lebesgue_measure(lebesgue):
    report = doubling_sup(lebesgue, SMALL_DOMAIN)
    assert report.kind == "doubling"
    assert report.estimate == pytest.approx(2.0)
    assert report.verdict == "bounded"


def test_doubling_sup_of_binary_tree_diverges(binary):
    report = doubling_sup(binary, TREE_DOMAIN, rule=SHORT_RULE)
    assert report.verdict == "diverging"
    assert report.growth_factors[-1] >= 10


def test_doubling_ratio_of_thin_balls_far_from_the_root():
    space = get_entry("metric-exponential").build_space()
    assert doubling_ratio(space, 31.62, 0.0562) == pytest.approx(2.0, rel=1e-9)


def test_doubling_sup_of_metric_exponential_is_lebesgue():
    # λ = μ = e^s is Lebesgue measure in arc length, so the doubling constant is 2 at every scale.
    space = get_entry("metric-exponential").build_space()
    report = doubling_sup(space, SMALL_DOMAIN)
    assert report.estimate == pytest.approx(2.0, rel=1e-6)
    assert report.verdict == "bounded"


def test_certificate_level_budget(lebesgue, binary):
    tight = Tolerance(max_certificate_levels=4)
    check_certificate_budget(binary, 1.0, 3.0, tight)
    with pytest.raises(BudgetExceeded):
        check_certificate_budget(binary, 1.0, 4.0, tight)
    check_certificate_budget(lebesgue, 1.0, 1e6, tight)
    with pytest.raises(BudgetExceeded):
        poincare_certificate(binary, 2.0, 1.0, 1e4)


def test_power_certificate_for_constant_weights(lebesgue):
    cert = poincare_certificate(lebesgue, 2.0, 10.0, 2.0)
    assert cert.case == "power"
    assert cert.implied_bound == pytest.approx(105 / 256, rel=1e-8)
    assert cert.lhs == pytest.approx(105 * 2.0 / 512, rel=1e-8)
    assert cert.rhs == pytest.approx(1.0, rel=1e-8)
    assert cert.mu_ball == pytest.approx(4.0)
    assert cert.mu_e1 == pytest.approx(2.0)
    assert cert.mu_e2 == pytest.approx(1.0)
    assert cert.within_far_regime
    assert not poincare_certificate(lebesgue, 2.0, 10.0, 9.0).within_far_regime


def test_sublevel_certificate_matches_power_profile(lebesgue):
    power = poincare_certificate(lebesgue, 2.0, 10.0, 2.0)
    sublevel = poincare_certificate(lebesgue, 1.0, 10.0, 2.0)
    assert sublevel.case == "sublevel"
    assert sublevel.m == pytest.approx(1.0)
    assert sublevel.epsilon == pytest.approx(0.01)
    assert sum(hi - lo for lo, hi in sublevel.sublevel_set) == pytest.approx(1.0)
    assert sublevel.lhs == pytest.approx(power.lhs, rel=1e-8)
    assert sublevel.u_mean == pytest.approx(power.u_mean, rel=1e-8)
    assert sublevel.implied_bound == pytest.approx(105 / 128, rel=1e-8)
    exported = sublevel.export()
    assert exported["a"] == pytest.approx(1.0)
    assert "b" not in exported


def test_certificate_on_a_binary_tree(binary):
    cert = poincare_certificate(binary, 2.0, 2.0, 1.0)
    assert cert.mu_e1 > 0
    assert cert.mu_e2 > 0
    assert 0 < cert.implied_bound < math.inf
    # The ball at the root of a branching tree still has the other subtrees as E1.
    assert poincare_certificate(binary, 2.0, 0.0, 1.0).mu_e1 == pytest.approx(1.0)


def test_certificate_rejects_bad_input(lebesgue):
    with pytest.raises(DomainError):
        poincare_certificate(lebesgue, 2.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        poincare_certificate(lebesgue, 2.0, 1.0, 0.0)
    with pytest.raises(UserError):
        poincare_certificate(lebesgue, 0.5, 1.0, 1.0)
    with pytest.raises(UserError):
        poincare_certificate(lebesgue, 1.0, 1.0, 1.0, eps_fraction=0.0)


@pytest.mark.parametrize("R", [0.5, 1.0, 7.0])
def test_root_certificate(lebesgue, R):
    cert = root_poincare_certificate(lebesgue, 2.0, R)
    assert cert.case == "root"
    assert cert.implied_bound == pytest.approx(9 * math.sqrt(2) / 64, rel=1e-8)
    assert cert.lhs == pytest.approx(9 * R / 64, rel=1e-8)
    assert cert.mu_e1 == 0.0


def test_root_certificate_needs_a_line(binary):
    with pytest.raises(UserError):
        root_poincare_certificate(binary, 2.0, 1.0)


def test_root_certificate_on_example_weight():
    example = get_entry("example-4.2").build_space()
    cert = root_poincare_certificate(example, 2.0, 10.0)
    assert 0 < cert.implied_bound < math.inf


def test_root_certificate_stabilizes_for_small_balls():
    space = get_entry("shifted-power").build_space()
    small = root_poincare_certificate(space, 2.0, 1e-4).implied_bound
    smaller = root_poincare_certificate(space, 2.0, 1e-5).implied_bound
    assert small == pytest.approx(smaller, rel=1e-3)
    assert small == pytest.approx(9 * math.sqrt(2) / 64, rel=1e-3)


def test_classify_lebesgue_measure(lebesgue):
    verdict = classify(lebesgue, 2.0, domain=SMALL_DOMAIN, certificate_sample=4, C_d=2.0, C_P=1.0)
    assert verdict.classification == "admissible"
    assert verdict.mode == "far"
    assert verdict.c == 8.0
    assert verdict.full_ap is not None
    assert verdict.c_a_estimate == pytest.approx(1.0, rel=1e-6)
    assert verdict.constants is not None
    assert verdict.constants.doubling == pytest.approx(8.0, rel=1e-6)
    assert verdict.consistency.doubling_ok is True
    assert verdict.consistency.certificates_ok is True
    assert verdict.certificates
    assert verdict.far_regime_certificates <= len(verdict.certificates)
    assert verdict.converse_bound == pytest.approx(converse_constant(2.0, 1, 2.0, 1.0))

    exported = verdict.export()
    assert exported["classification"] == "admissible"
    assert exported["commentary"] == list(COMMENTARY)
    assert exported["ap"]["heuristic"] is True


def test_classification_is_reproducible(lebesgue):
    first = classify(lebesgue, 2.0, domain=SMALL_DOMAIN, certificate_sample=3, seed=7)
    second = classify(lebesgue, 2.0, domain=SMALL_DOMAIN, certificate_sample=3, seed=7)
    assert [(c.t, c.r) for c in first.certificates] == [(c.t, c.r) for c in second.certificates]


@pytest.mark.slow
def test_classify_binary_tree(binary):
    verdict = classify(binary, 2.0, domain=TREE_DOMAIN, rule=SHORT_RULE)
    assert verdict.mode == "full"
    assert verdict.classification == "not-admissible"
    assert verdict.doubling_witnesses
    assert verdict.constants is None


@pytest.mark.slow
def test_classify_example_weight_in_the_theorem_regime():
    example = get_entry("example-4.2").build_space()
    verdict = classify(example, 2.0)
    assert verdict.classification == "not-admissible"
    assert verdict.ap.verdict == "diverging"


@pytest.mark.slow
def test_example_weight_is_not_doubling():
    example = get_entry("example-4.2").build_space()
    for exponent in (5.0, 10.0):
        t = math.exp(exponent)
        expected = (1 + math.log(2 * t)) / math.log(3.0)
        assert doubling_ratio(example, t, t / 2) == pytest.approx(expected, rel=1e-8)
    assert expected == pytest.approx(10.64, abs=0.01)

    domain = ScanDomain(points_per_decade=2, refinements=1)
    report = doubling_sup(example, domain)
    assert report.verdict == "diverging"
    assert report.estimate > 10.0


@pytest.mark.slow
def test_diverging_witnesses_respect_the_certificate_budget():
    space = get_entry("binary-exponential-decay").build_space()
    tight = Tolerance(max_certificate_levels=64)
    domain = ScanDomain(
        t_min=0.1,
        t_max=1e3,
        r_min=0.1,
        r_max=1e3,
        initial_t=(1.0, 10.0),
        initial_r=(1.0, 10.0),
        beta_min_exponent=-2,
        beta_max_exponent=1,
        points_per_decade=2,
        refinements=1,
    )
    verdict = classify(space, 2.0, domain=domain, tol=tight, rule=SHORT_RULE)
    assert verdict.classification == "not-admissible"
    assert verdict.doubling_witnesses
    for cert in verdict.certificates:
        check_certificate_budget(space, cert.t, cert.r, tight)


def _contradicts(classification: str, tag: str) -> bool:
    return {classification, tag} == {"admissible", "not-admissible"}


@pytest.mark.slow
@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 4.0])
@pytest.mark.parametrize("entry", CATALOG, ids=lambda e: e.name)
def test_catalog_classifications_agree_with_tags(entry, p):
    verdict = classify(
        entry.build_space(), p, domain=SMALL_DOMAIN, rule=SHORT_RULE, certificate_sample=4
    )
    assert not _contradicts(verdict.classification, entry.tags[0])
    if verdict.constants is not None:
        assert verdict.consistency.violations == []
    if entry.name in ("lebesgue-halfline", "binary-uniform"):
        assert verdict.classification == entry.tags[0]


@pytest.mark.slow
@pytest.mark.parametrize("entry", CATALOG, ids=lambda e: e.name)
def test_binary_tree_diverges_for_every_catalog_measure(entry):
    space = TreeSpace(2, ONE, entry.mu)
    estimate = ap_sup(space, ApParams(p=2.0), TREE_DOMAIN, rule=SHORT_RULE)
    assert estimate.verdict == "diverging"
    verdict = classify(space, 2.0, domain=TREE_DOMAIN, rule=SHORT_RULE, certificate_sample=4)
    assert verdict.classification == "not-admissible"


@pytest.mark.slow
def test_step_weight_with_bounded_jumps_is_admissible():
    verdict = classify(
        get_entry("step-bounded").build_space(),
        2.0,
        domain=SMALL_DOMAIN,
        rule=SHORT_RULE,
        certificate_sample=4,
    )
    assert verdict.ap.verdict == "bounded"
    assert verdict.classification == "admissible"
