"""Doubling scans, Poincaré certificates and the admissibility classifier.

A certificate evaluates both sides of the (1, p)-Poincaré inequality on one ball for one radial
test function u:

    lhs = mean over B of |u - u_B|,    rhs = r * (mean over B of g**p)**(1/p)

with g an upper gradient of u. Their ratio is a lower bound for the Poincaré constant. The test
function ramps up along the subtree T1 through the nearest vertex below the center, is constant
on the outer half of that subtree's part of the ball, and vanishes on the rest of the ball (E1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Literal, NamedTuple

import numpy as np

from ._config import resolve_tolerance
from .ap import DEFAULT_FAR_C, ApMode, ApParams, ap_sup
from .exceptions import (
    AptreeException,
    BudgetExceeded,
    DegenerateConstructionError,
    DomainError,
    UserError,
)
from .geometry import TreeSpace, level_index
from .logger import logger
from .measures import log_ball_measure
from .quadrature import (
    AccumulatedProfile,
    IntegrandSpec,
    ess_extremum,
    integrate,
    integrate_product,
    sublevel_intervals,
)
from .scan import CellValue, SupEstimate, SupremumScanner, json_float
from .settings import DivergenceRule, ScanDomain, Tolerance
from .tracing import certificate_span, classify_span

DoublingReport = SupEstimate

Classification = Literal["admissible", "not-admissible", "inconclusive"]
CertificateCase = Literal["sublevel", "power", "root"]

FAR_POINCARE_FRACTION = 0.8
DEFAULT_EPS_FRACTION = 0.01


def doubling_ratio(space: TreeSpace, t: float, r: float, tol: Tolerance | None = None) -> float:
    """μ(B(x, 2r)) / μ(B(x, r)) for |x| = t.

    NaN when the inner ball's measure vanishes numerically or both measures overflow; scans skip
    such cells.
    """
    inner = log_ball_measure(space, t, r, tol)
    if inner == -math.inf or math.isnan(inner):
        logger.debug(f"Ball at t={t:.6g}, r={r:.6g} has no resolvable measure")
        return math.nan
    with np.errstate(over="ignore", invalid="ignore"):
        return float(np.exp(log_ball_measure(space, t, 2.0 * r, tol) - inner))


def doubling_sup(
    space: TreeSpace,
    domain: ScanDomain | None = None,
    tol: Tolerance | None = None,
    rule: DivergenceRule | None = None,
    workers: int | None = None,
) -> DoublingReport:
    """Supremum scan of the doubling ratio over the full (t, r) grid."""
    scanner = SupremumScanner(
        lambda t, r: doubling_ratio(space, t, r, tol),
        space,
        kind="doubling",
        name="doubling_sup",
        domain=domain,
        rule=rule,
        workers=workers,
        mode="full",
    )
    return scanner.run()


@dataclass
class Certificate:
    """Both sides of a Poincaré inequality for one explicit test function on one ball."""

    p: float
    t: float
    r: float
    case: CertificateCase

    lhs: float
    """Mean oscillation of u over the ball."""

    rhs: float
    """r times the p-mean of the upper gradient over the ball."""

    mu_ball: float
    mu_e1: float
    """Mass of the part of the ball where u vanishes."""

    mu_e2: float
    """Mass of the part of the ball where u is at its plateau."""

    u_mean: float

    plateau: float
    """The plateau value: b for the power case, a for the sublevel case."""

    within_far_regime: bool
    """Whether r <= (4/5) d(0, x)."""

    m: float | None = None
    """Sublevel case: essential infimum of the density ratio on the ramp."""

    epsilon: float | None = None
    sublevel_set: list[tuple[float, float]] = field(default_factory=list)
    """Sublevel case: the radial intervals where the density ratio is below m + epsilon."""

    @property
    def implied_bound(self) -> float:
        """lhs / rhs, a lower bound for the Poincaré constant."""
        return self.lhs / self.rhs

    def export(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "p": self.p,
            "t": self.t,
            "r": self.r,
            "case": self.case,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "implied_bound": self.implied_bound,
            "mu_ball": self.mu_ball,
            "mu_e1": self.mu_e1,
            "mu_e2": self.mu_e2,
            "u_mean": self.u_mean,
            "within_far_regime": self.within_far_regime,
        }
        if self.case == "sublevel":
            out.update(
                m=self.m,
                epsilon=self.epsilon,
                sublevel_set=[list(i) for i in self.sublevel_set],
                a=self.plateau,
            )
        else:
            out["b"] = self.plateau
        return out


def _mean_oscillation(
    profile: AccumulatedProfile,
    weight: IntegrandSpec,
    start: float,
    ramp_end: float,
    mu_ball: float,
    mu_e1: float,
    mu_e2: float,
    tol: Tolerance,
) -> tuple[float, float]:
    """u_B and the mean of |u - u_B| over the ball, for u = 0 on E1, U on the ramp and the
    plateau value on E2.
    """
    plateau = profile.total
    ramp_mass = integrate(weight, start, ramp_end, tol)
    ramp_moment = integrate_product(profile, weight, start, ramp_end, tol)
    u_mean = (ramp_moment + plateau * mu_e2) / mu_ball

    # ∫|U - u_B| w = ∫(U - u_B) w + 2 ∫_{U < u_B} (u_B - U) w
    ramp_abs = ramp_moment - u_mean * ramp_mass
    if 0.0 < u_mean < plateau:
        crossing = profile.solve(u_mean)
        below_mass = integrate(weight, start, crossing, tol)
        below_moment = integrate_product(profile, weight, start, crossing, tol)
        ramp_abs += 2.0 * (u_mean * below_mass - below_moment)
    elif u_mean >= plateau:
        ramp_abs = -ramp_abs

    total = u_mean * mu_e1 + ramp_abs + abs(plateau - u_mean) * mu_e2
    return u_mean, total / mu_ball


def _finite_exp(name: str, log_value: float, t: float, r: float) -> float:
    if not log_value < 709.0:
        raise BudgetExceeded(f"{name} at t={t}, r={r} exceeds double precision")
    return math.exp(log_value)


def _tag(space: TreeSpace, t: float, r: float) -> bool:
    return r <= FAR_POINCARE_FRACTION * space.metric_from_root(t)


def check_certificate_budget(space: TreeSpace, t: float, r: float, tol: Tolerance) -> None:
    """Raises `BudgetExceeded` when B(x, r) spans more unit levels than the certificate budget.
    Only branching and per-level trees are checked; smooth lines integrate in closed form.
    """
    if space.K == 1 and not (space.lam.levelwise or space.mu.levelwise):
        return
    levels = level_index(space.descendant_at(t, r)) - math.floor(space.ancestor_at(t, r))
    if levels > tol.max_certificate_levels:
        raise BudgetExceeded(
            f"The ball at t={t:.6g}, r={r:.6g} spans {levels} levels, more than the budget of "
            f"{tol.max_certificate_levels}"
        )


def poincare_certificate(
    space: TreeSpace,
    p: float,
    t: float,
    r: float,
    eps_fraction: float = DEFAULT_EPS_FRACTION,
    tol: Tolerance | None = None,
) -> Certificate:
    """Builds the test-function certificate on B(x, r) for |x| = t.

    For p > 1 the ramp integrates (K**(j - j(x)) mu / lam)**(1/(1-p)) along the arc length up to
    x̲_{r/2}. For p = 1 it accumulates the arc length of the set where K**(j - j(x)) mu / lam is
    below m + eps, with m its essential infimum on the ramp and eps = eps_fraction * m.
    """
    tol = resolve_tolerance(tol)
    if p < 1:
        raise UserError(f"p must be >= 1, got {p}")
    if t < 0:
        raise DomainError(f"Radial coordinate must be non-negative, got {t}")
    if t == 0 and space.K == 1:
        raise DomainError(
            "With K = 1 the ball at the root has no part outside T1; use root_poincare_certificate"
        )
    if not r > 0:
        raise DomainError(f"Radius must be positive, got {r}")
    if not eps_fraction > 0:
        raise UserError(f"eps_fraction must be positive, got {eps_fraction}")
    check_certificate_budget(space, t, r, tol)

    case: CertificateCase = "sublevel" if p == 1 else "power"
    with certificate_span(p=p, t=t, r=r, case=case) as span:
        first_vertex = math.floor(t) + 1
        anchor = level_index(t)
        ramp_end = space.descendant_at(t, r / 2.0)
        ball_end = space.descendant_at(t, r)
        weight = IntegrandSpec.measure(space.mu, space.K, first_vertex)

        m: float | None = None
        epsilon: float | None = None
        sublevel: list[tuple[float, float]] = []
        if p == 1:
            ratio = IntegrandSpec.density_ratio(space.lam, space.mu, space.K, anchor)
            m = ess_extremum(ratio, t, ramp_end, "inf", tol)
            epsilon = eps_fraction * m
            sublevel = sublevel_intervals(ratio, t, ramp_end, m + epsilon, tol)
            profile = AccumulatedProfile(IntegrandSpec.of(space.lam), t, ramp_end, sublevel, tol)
        else:
            bracket = IntegrandSpec.ap_bracket(space.lam, space.mu, space.K, anchor, p)
            profile = AccumulatedProfile(bracket, t, ramp_end, tol=tol)

        mu_ball = _finite_exp("Ball measure", log_ball_measure(space, t, r, tol), t, r)
        mu_t1 = integrate(weight, t, ball_end, tol)
        mu_e2 = integrate(weight, ramp_end, ball_end, tol)
        if not math.isfinite(mu_t1):
            raise BudgetExceeded(f"Subtree measure at t={t}, r={r} exceeds double precision")
        mu_e1 = max(mu_ball - mu_t1, 0.0)
        if mu_e1 <= 0.0 and mu_e2 <= 0.0:
            raise DegenerateConstructionError(
                f"Both E1 and E2 are null at t={t}, r={r}: the certificate is vacuous"
            )

        u_mean, lhs = _mean_oscillation(profile, weight, t, ramp_end, mu_ball, mu_e1, mu_e2, tol)
        if p == 1:
            gradient_mass = sum(integrate(weight, lo, hi, tol) for lo, hi in sublevel)
            rhs = r * gradient_mass / mu_ball
        else:
            # ∫ g**p over the ramp, measured with T1's multiplicity, is the plateau value scaled
            # from j(x) to the first vertex below x.
            gradient_mass = profile.total * float(space.K) ** (anchor - first_vertex)
            rhs = r * (gradient_mass / mu_ball) ** (1.0 / p)

        certificate = Certificate(
            p=p,
            t=t,
            r=r,
            case=case,
            lhs=lhs,
            rhs=rhs,
            mu_ball=mu_ball,
            mu_e1=mu_e1,
            mu_e2=mu_e2,
            u_mean=u_mean,
            plateau=profile.total,
            within_far_regime=_tag(space, t, r),
            m=m,
            epsilon=epsilon,
            sublevel_set=sublevel,
        )
        span.span_data.implied_bound = certificate.implied_bound
    return certificate


def root_poincare_certificate(
    space: TreeSpace, p: float, R: float, tol: Tolerance | None = None
) -> Certificate:
    """The certificate on the root ball B(0, R) = [0, x_R) of a K = 1 tree.

    The profile ramps on [0, x_{R/2}] and is constant beyond, so no part of the ball has u = 0.
    For p = 1 the ramp is the arc length itself.
    """
    tol = resolve_tolerance(tol)
    if space.K != 1:
        raise UserError("root_poincare_certificate is for K = 1; use poincare_certificate at t = 0")
    if p < 1:
        raise UserError(f"p must be >= 1, got {p}")
    if not R > 0:
        raise DomainError(f"Radius must be positive, got {R}")
    check_certificate_budget(space, 0.0, R, tol)

    with certificate_span(p=p, t=0.0, r=R, case="root") as span:
        ramp_end = space.descendant_at(0.0, R / 2.0)
        ball_end = space.descendant_at(0.0, R)
        weight = IntegrandSpec.of(space.mu)
        if p == 1:
            profile = AccumulatedProfile(IntegrandSpec.of(space.lam), 0.0, ramp_end, tol=tol)
        else:
            bracket = IntegrandSpec.ap_bracket(space.lam, space.mu, 1, 0, p)
            profile = AccumulatedProfile(bracket, 0.0, ramp_end, tol=tol)

        mu_ball = integrate(weight, 0.0, ball_end, tol)
        mu_e2 = integrate(weight, ramp_end, ball_end, tol)
        u_mean, lhs = _mean_oscillation(profile, weight, 0.0, ramp_end, mu_ball, 0.0, mu_e2, tol)
        if p == 1:
            rhs = R * integrate(weight, 0.0, ramp_end, tol) / mu_ball
        else:
            rhs = R * (profile.total / mu_ball) ** (1.0 / p)

        certificate = Certificate(
            p=p,
            t=0.0,
            r=R,
            case="root",
            lhs=lhs,
            rhs=rhs,
            mu_ball=mu_ball,
            mu_e1=0.0,
            mu_e2=mu_e2,
            u_mean=u_mean,
            plateau=profile.total,
            within_far_regime=False,
        )
        span.span_data.implied_bound = certificate.implied_bound
    return certificate


class TheoremConstants(NamedTuple):
    doubling: float
    poincare: float


def theorem_constants(p: float, C_A: float) -> TheoremConstants:
    """Doubling and Poincaré constants implied by an Ap bound C_A."""
    if not C_A > 0 or not math.isfinite(C_A):
        raise UserError(f"C_A must be positive and finite, got {C_A}")
    if p < 1:
        raise UserError(f"p must be >= 1, got {p}")
    if p == 1:
        return TheoremConstants(4.0 * C_A, 8.0 * C_A)
    return TheoremConstants(
        C_A * 2.0 ** (p + 1.0),
        C_A ** (2.0 + 1.0 / p) * 2.0 ** (1.0 / p + 2.0 * p + 4.0),
    )


def converse_constant(p: float, K: int, C_d: float, C_P: float) -> float:
    """The Ap bound at half radius implied by doubling constant C_d and Poincaré constant C_P."""
    if p < 1:
        raise UserError(f"p must be >= 1, got {p}")
    if not (C_d >= 1 and C_P > 0):
        raise UserError(f"Need C_d >= 1 and C_P > 0, got C_d={C_d}, C_P={C_P}")
    if p == 1:
        return 2.0 * C_d**5 * C_P * K
    return 2.0**p * C_d ** (4.0 * p + 1.0) * C_P**p * float(K) ** p


COMMENTARY = (
    "Scan verdicts are heuristics: a finite grid can suggest but never prove that a supremum "
    "is finite.",
    "Doubling is derived from the Ap bound separately for pairs with d(0, x) >= r/16 and for "
    "balls close to the root.",
    "For K = 1, the far-from-root condition yields Poincaré inequalities directly only for "
    "r <= (4/5) d(0, x); larger balls are reached through the root ball.",
    "Certificates are lower bounds for the Poincaré constant; the Poincaré bound reported is "
    "the one implied by C_A.",
)


@dataclass
class Consistency:
    doubling_ok: bool | None = None
    certificates_ok: bool | None = None
    violations: list[str] = field(default_factory=list)
    skipped_reason: str | None = None

    def export(self) -> dict[str, Any]:
        return {
            "doubling_ok": self.doubling_ok,
            "certificates_ok": self.certificates_ok,
            "violations": self.violations,
            "skipped_reason": self.skipped_reason,
        }


@dataclass
class Verdict:
    classification: Classification
    p: float
    K: int
    mode: ApMode
    c: float | None
    ap: SupEstimate
    full_ap: SupEstimate | None = None
    """For K = 1, the full-mode scan that supplies C_A."""

    c_a_estimate: float | None = None
    constants: TheoremConstants | None = None
    constants_note: str | None = None
    doubling: DoublingReport | None = None
    certificates: list[Certificate] = field(default_factory=list)
    doubling_witnesses: list[CellValue] = field(default_factory=list)
    consistency: Consistency = field(default_factory=Consistency)
    converse_bound: float | None = None
    commentary: tuple[str, ...] = COMMENTARY

    @property
    def far_regime_certificates(self) -> int:
        return sum(c.within_far_regime for c in self.certificates)

    def export(self) -> dict[str, Any]:
        return {
            "classification": self.classification,
            "p": self.p,
            "K": self.K,
            "mode": self.mode,
            "c": self.c,
            "ap": self.ap.export(),
            "full_ap": self.full_ap.export() if self.full_ap else None,
            "c_a_estimate": json_float(self.c_a_estimate),
            "constants": self.constants._asdict() if self.constants else None,
            "constants_note": self.constants_note,
            "doubling": self.doubling.export() if self.doubling else None,
            "certificates": [c.export() for c in self.certificates],
            "far_regime_certificates": self.far_regime_certificates,
            "doubling_witnesses": [w.export() for w in self.doubling_witnesses],
            "consistency": self.consistency.export(),
            "converse_bound": self.converse_bound,
            "commentary": list(self.commentary),
        }


def _certificate_at(
    space: TreeSpace, p: float, t: float, r: float, tol: Tolerance
) -> Certificate | None:
    try:
        if t == 0 and space.K == 1:
            cert = root_poincare_certificate(space, p, r, tol)
        else:
            cert = poincare_certificate(space, p, t, r, tol=tol)
    except (AptreeException, ArithmeticError, ValueError) as e:
        logger.debug(f"No certificate at t={t:.6g}, r={r:.6g}: {e}")
        return None
    if not (math.isfinite(cert.lhs) and math.isfinite(cert.rhs) and cert.rhs > 0):
        return None
    return cert


def _sample_cells(ap: SupEstimate, count: int, seed: int) -> list[CellValue]:
    top = ap.top_cells(count)
    chosen = {(c.t, c.r) for c in top}
    rest = [c for c in ap.samples if (c.t, c.r) not in chosen]
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(rest), size=min(count, len(rest)), replace=False) if rest else []
    return top + [rest[int(i)] for i in sorted(picks)]


def _witness_cells(ap: SupEstimate) -> list[tuple[float, float]]:
    cells: list[tuple[float, float]] = []
    for step in ap.trace:
        if step.argmax is not None and step.argmax not in cells:
            cells.append(step.argmax)
    return cells


def classify(
    space: TreeSpace,
    p: float,
    mode: ApMode | None = None,
    c: float | None = None,
    domain: ScanDomain | None = None,
    tol: Tolerance | None = None,
    rule: DivergenceRule | None = None,
    seed: int = 0,
    certificate_sample: int = 32,
    workers: int | None = None,
    C_d: float | None = None,
    C_P: float | None = None,
) -> Verdict:
    """Classifies μ as p-admissible or not from a supremum scan of the Ap functional.

    The regime follows the branching number: the full condition for K >= 2, the far-from-root
    condition (c = 8) for K = 1. A bounded scan is backed by a doubling scan and by certificates
    at the highest and at randomly chosen cells; a diverging scan is backed by certificates and
    doubling ratios along the sequence of running argmaxes.
    """
    tol = resolve_tolerance(tol)
    rule = rule or DivergenceRule()
    if mode is None:
        mode = "full" if space.K >= 2 else "far"
    far_c = (c if c is not None else DEFAULT_FAR_C) if mode == "far" else None
    params = ApParams(p=p, mode=mode, c=far_c if far_c is not None else DEFAULT_FAR_C)

    with classify_span(p=p, branching=space.K, mode=mode) as span:
        ap = ap_sup(space, params, domain, tol, rule, workers)
        classification: Classification = "inconclusive"
        if ap.verdict == "bounded":
            classification = "admissible"
        elif ap.verdict == "diverging":
            classification = "not-admissible"
        verdict = Verdict(classification=classification, p=p, K=space.K, mode=mode, c=far_c, ap=ap)

        if C_d is not None and C_P is not None:
            verdict.converse_bound = converse_constant(p, space.K, C_d, C_P)

        if classification == "admissible":
            _back_bounded(verdict, space, domain, tol, rule, seed, certificate_sample, workers)
        elif classification == "not-admissible":
            _back_diverging(verdict, space, tol)
        span.span_data.classification = classification

    logger.info(f"Classified p={p}, K={space.K} in {mode} mode as {classification}")
    return verdict


def _back_bounded(
    verdict: Verdict,
    space: TreeSpace,
    domain: ScanDomain | None,
    tol: Tolerance,
    rule: DivergenceRule,
    seed: int,
    certificate_sample: int,
    workers: int | None,
) -> None:
    p = verdict.p
    source = verdict.ap
    if verdict.mode == "far":
        full = ap_sup(space, ApParams(p=p, mode="full"), domain, tol, rule, workers)
        verdict.full_ap = full
        source = full
    if source.verdict == "bounded" and math.isfinite(source.estimate):
        verdict.c_a_estimate = source.estimate
        verdict.constants = theorem_constants(p, source.estimate)
    else:
        verdict.constants_note = (
            "The full Ap scan is not bounded, so C_A and the constants derived from it are "
            "unavailable; admissibility rests on the far-from-root scan."
        )

    verdict.doubling = doubling_sup(space, domain, tol, rule, workers)
    cells = _sample_cells(verdict.ap, certificate_sample, seed)
    verdict.certificates = [
        cert for cell in cells if (cert := _certificate_at(space, p, cell.t, cell.r, tol))
    ]

    constants = verdict.constants
    consistency = verdict.consistency
    if constants is None:
        consistency.skipped_reason = verdict.constants_note
        return
    slack = 1.0 + rule.bounded_tolerance
    doubling = verdict.doubling
    if math.isnan(doubling.estimate):
        consistency.doubling_ok = None
    else:
        consistency.doubling_ok = doubling.estimate <= constants.doubling * slack
        if not consistency.doubling_ok:
            consistency.violations.append(
                f"doubling ratio {doubling.estimate:.6g} at {doubling.argmax} exceeds the bound "
                f"{constants.doubling:.6g}"
            )
    bad = [c for c in verdict.certificates if c.implied_bound > constants.poincare * slack]
    consistency.certificates_ok = not bad
    consistency.violations.extend(
        f"certificate at t={c.t:.6g}, r={c.r:.6g} implies {c.implied_bound:.6g} > "
        f"{constants.poincare:.6g}"
        for c in bad
    )


def _back_diverging(verdict: Verdict, space: TreeSpace, tol: Tolerance) -> None:
    for t, r in _witness_cells(verdict.ap):
        try:
            check_certificate_budget(space, t, 2.0 * r, tol)
        except AptreeException as e:
            logger.debug(f"No certificate at witness t={t:.6g}, r={r:.6g}: {e}")
        else:
            cert = _certificate_at(space, verdict.p, t, r, tol)
            if cert is not None:
                verdict.certificates.append(cert)
        try:
            ratio = doubling_ratio(space, t, r, tol)
        except (AptreeException, ArithmeticError, ValueError) as e:
            logger.debug(f"No doubling ratio at t={t:.6g}, r={r:.6g}: {e}")
            continue
        if not math.isnan(ratio):
            verdict.doubling_witnesses.append(CellValue(t, r, ratio))
