"""The Ap and A1 functionals and their suprema.

For a point x with |x| = t and a radius r,

    Ap(x, r) = P(x, r) * [(1/r) * ∫_[x, x̲_r] (K**(j - j(x)) mu / lam)**(1/(1-p)) ds]**(p-1)
    A1(x, r) = P(x, r) * ess sup_[x, x̲_r] lam / (K**(j - j(x)) mu)

with P(x, r) = mu(F(x̄^r, 2r)) / (2r).

Both are evaluated in log space. A non-integrable bracket makes Ap infinite, which is a value
and not an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .exceptions import UserError
from .geometry import TreeSpace, level_index
from .measures import log_halfball_measure
from .quadrature import IntegrandSpec, ess_extremum, integrate_log
from .scan import Evaluator, SupEstimate, SupremumScanner
from .settings import DivergenceRule, ScanDomain, Tolerance

ApMode = Literal["full", "far"]

DEFAULT_FAR_C = 8.0


@dataclass(frozen=True)
class ApParams:
    """Which supremum to estimate."""

    p: float
    """The exponent. p = 1 selects the A1 functional."""

    mode: ApMode = "full"
    """`full` scans every (x, r); `far` keeps only r <= c * d(0, x)."""

    c: float = DEFAULT_FAR_C
    """The far-regime constant. Values c <= 1 are allowed for exploration."""

    def __post_init__(self) -> None:
        if not self.p >= 1 or not math.isfinite(self.p):
            raise UserError(f"p must be a finite number >= 1, got {self.p}")
        if self.mode not in ("full", "far"):
            raise UserError(f"Unknown mode {self.mode!r}, expected 'full' or 'far'")
        if not self.c > 0:
            raise UserError(f"The far-regime constant must be positive, got {self.c}")


def _check(t: float, r: float) -> None:
    if t < 0:
        raise UserError(f"Radial coordinate must be non-negative, got {t}")
    if not r > 0:
        raise UserError(f"Radius must be positive, got {r}")


def _log_prefactor(space: TreeSpace, t: float, r: float, tol: Tolerance | None) -> float:
    """log of mu(F(x̄^r, 2r)) / (2r)."""
    top = space.ancestor_at(t, r)
    return log_halfball_measure(space, top, 2.0 * r, tol) - math.log(2.0 * r)


def log_ap_value(
    space: TreeSpace, p: float, t: float, r: float, tol: Tolerance | None = None
) -> float:
    _check(t, r)
    if not p > 1:
        raise UserError(f"ap_value needs p > 1, got {p}; use a1_value for p = 1")
    end = space.descendant_at(t, r)
    bracket = IntegrandSpec.ap_bracket(space.lam, space.mu, space.K, level_index(t), p)
    log_integral = integrate_log(bracket, t, end, tol)
    if log_integral == math.inf:
        return math.inf
    return _log_prefactor(space, t, r, tol) + (p - 1.0) * (log_integral - math.log(r))


def ap_value(space: TreeSpace, p: float, t: float, r: float, tol: Tolerance | None = None) -> float:
    """Ap(x, r) for |x| = t. Returns `inf` when the bracket integral diverges or overflows."""
    with np.errstate(over="ignore"):
        return float(np.exp(log_ap_value(space, p, t, r, tol)))


def a1_value(space: TreeSpace, t: float, r: float, tol: Tolerance | None = None) -> float:
    """A1(x, r) for |x| = t."""
    _check(t, r)
    end = space.descendant_at(t, r)
    ratio = IntegrandSpec.a1_ratio(space.lam, space.mu, space.K, level_index(t))
    sup = ess_extremum(ratio, t, end, "sup", tol)
    with np.errstate(over="ignore"):
        return float(np.exp(_log_prefactor(space, t, r, tol))) * sup


def functional(space: TreeSpace, params: ApParams, tol: Tolerance | None = None) -> Evaluator:
    """The (t, r) -> value function `ap_sup` maximizes."""
    if params.p == 1:
        return lambda t, r: a1_value(space, t, r, tol)
    return lambda t, r: ap_value(space, params.p, t, r, tol)


def ap_sup(
    space: TreeSpace,
    params: ApParams,
    domain: ScanDomain | None = None,
    tol: Tolerance | None = None,
    rule: DivergenceRule | None = None,
    workers: int | None = None,
) -> SupEstimate:
    """Estimates sup Ap(x, r) (or sup A1 for p = 1) over the mode's domain.

    Far mode drops the root and the absolute r grid, since every admissible radius is bounded by
    c * d(0, x).
    """
    far = params.mode == "far"
    scanner = SupremumScanner(
        functional(space, params, tol),
        space,
        kind="a1" if params.p == 1 else "ap",
        name="a1_sup" if params.p == 1 else "ap_sup",
        domain=domain,
        rule=rule,
        far_c=params.c if far else None,
        workers=workers,
        mode=params.mode,
        p=params.p,
    )
    return scanner.run()
