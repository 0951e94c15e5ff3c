from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np
from scipy.optimize import brentq

from ._config import resolve_tolerance
from .exceptions import DomainError, SolverError, UserError
from .logger import logger
from .quadrature import IntegrandSpec, integrate, span_for_integral
from .settings import Tolerance
from .weights import ConstantWeight, WeightFunction

_CACHE_EXPONENTS = range(-8, 51)
_MAX_DOUBLINGS = 64


def level_index(t: float) -> int:
    """j(t): the smallest integer j with j >= t."""
    if t < 0:
        raise DomainError(f"Radial coordinate must be non-negative, got {t}")
    return math.ceil(t)


@dataclass(frozen=True)
class RadialPoint:
    """A point of the tree reduced to its radial coordinate. Every quantity this package computes
    depends on points only through `t`.
    """

    t: float

    def __post_init__(self) -> None:
        if not self.t >= 0:
            raise DomainError(f"Radial coordinate must be non-negative, got {self.t}")

    @property
    def level(self) -> int:
        return level_index(self.t)


class TreeSpace:
    """The K-regular tree with metric density `lam` and measure density `mu`.

    Construction validates both weights and checks that the tree has infinite diameter: `lam`
    must certify a divergent tail, and the arc length at `probe_t` must exceed `probe_bound`.
    The cumulative arc length is cached on a geometric knot grid, so instances are immutable and
    safe to share between threads.
    """

    def __init__(
        self,
        K: int,
        lam: WeightFunction,
        mu: WeightFunction,
        tol: Tolerance | None = None,
        probe_t: float = 1e6,
        probe_bound: float = 1e3,
    ):
        if int(K) != K or K < 1:
            raise UserError(f"Branching number must be an integer >= 1, got {K}")
        lam.validate()
        mu.validate()
        if not lam.diverges_at_infinity:
            raise UserError(
                f"Metric density {lam.describe()} has an integrable tail: the tree would have "
                "finite diameter"
            )

        self.K = int(K)
        self.lam = lam
        self.mu = mu
        self.tol = resolve_tolerance(tol)
        self._arc = IntegrandSpec.of(lam)
        self._constant_lam = lam.value if isinstance(lam, ConstantWeight) else None
        self._knots, self._cumulative = self._build_cache()

        self.probe_t = probe_t
        self.probe_bound = probe_bound
        reached = self.metric_from_root(probe_t)
        if not reached > probe_bound:
            raise UserError(
                f"Arc length reaches only {reached:.6g} at t={probe_t}, expected more than "
                f"{probe_bound}: the tree would have finite diameter"
            )

    def _build_cache(self) -> tuple[list[float], list[float]]:
        knots = [0.0]
        cumulative = [0.0]
        for k in _CACHE_EXPONENTS:
            knot = 2.0**k
            value = cumulative[-1] + integrate(self._arc, knots[-1], knot, self.tol)
            if not math.isfinite(value):
                break
            knots.append(knot)
            cumulative.append(value)
        logger.debug(f"Arc-length cache: {len(knots)} knots up to t={knots[-1]:.3g}")
        return knots, cumulative

    def describe(self) -> dict[str, Any]:
        return {
            "K": self.K,
            "lambda": self.lam.describe(),
            "mu": self.mu.describe(),
            "infinite_diameter": {
                "tail_certificate": self.lam.diverges_at_infinity,
                "probe_t": self.probe_t,
                "probe_bound": self.probe_bound,
            },
        }

    def __repr__(self) -> str:
        return f"TreeSpace(K={self.K}, lam={self.lam!r}, mu={self.mu!r})"

    def metric_from_root(self, t: float) -> float:
        """Λ(t) = d(0, x) for any x with |x| = t."""
        if t < 0:
            raise DomainError(f"Radial coordinate must be non-negative, got {t}")
        if self._constant_lam is not None:
            return self._constant_lam * t
        i = bisect.bisect_right(self._knots, t) - 1
        return self._cumulative[i] + integrate(self._arc, self._knots[i], t, self.tol)

    def distance(self, t1: float, t2: float) -> float:
        """Distance between two points on a common geodesic ray from the root."""
        return abs(self.metric_from_root(t1) - self.metric_from_root(t2))

    def _bracket_past_cache(self, value: float) -> tuple[float, float, float]:
        lo, lo_value = self._knots[-1], self._cumulative[-1]
        for _ in range(_MAX_DOUBLINGS):
            hi = 2.0 * lo
            hi_value = lo_value + integrate(self._arc, lo, hi, self.tol)
            while not math.isfinite(hi_value) and hi - lo > self.tol.solver_xtol * hi:
                hi = 0.5 * (lo + hi)
                hi_value = lo_value + integrate(self._arc, lo, hi, self.tol)
            if hi_value >= value:
                return lo, hi, lo_value
            lo, lo_value = hi, hi_value
        raise SolverError(
            f"Could not bracket arc length {value:.6g}: reached {lo_value:.6g} at t={lo:.6g}. "
            "The metric density's tail may be mis-declared."
        )

    def _invert(self, value: float) -> float:
        """The unique T with Λ(T) = value."""
        if value <= 0.0:
            return 0.0
        if self._constant_lam is not None:
            return value / self._constant_lam

        i = bisect.bisect_right(self._cumulative, value) - 1
        if i >= len(self._knots) - 1:
            lo, hi, base = self._bracket_past_cache(value)
            logger.debug(f"Arc length {value:.6g} lies past the cache, bracket [{lo}, {hi}]")
        else:
            lo, hi, base = self._knots[i], self._knots[i + 1], self._cumulative[i]
        remaining = value - base
        if remaining <= 0.0:
            return lo

        if not self.lam.levelwise and not self.lam.breakpoints(lo, hi):
            form = self.lam.local_form(np.array([lo]), np.array([hi]))
            guess = form.inverse_integral(lo, remaining) if form is not None else None
            if guess is not None and lo <= guess <= hi * (1.0 + 1e-12):
                return min(guess, hi)

        def residual(s: float) -> float:
            return integrate(self._arc, lo, s, self.tol) - remaining

        try:
            return float(brentq(residual, lo, hi, xtol=self.tol.solver_xtol * max(1.0, lo)))
        except ValueError as e:
            raise SolverError(f"Arc-length inverse failed on [{lo}, {hi}]: {e}") from e

    def _initial_step(self, t: float, r: float) -> float | None:
        density = float(self.lam(t))
        if not 0.0 < density < math.inf:
            return None
        step = r / density
        return step if 0.0 < step < math.inf else None

    def _solve_local(self, residual: Callable[[float], float], lo: float, hi: float) -> float:
        try:
            return float(
                brentq(residual, lo, hi, xtol=self.tol.solver_xtol * (hi - lo) + 1e-300)
            )
        except ValueError as e:
            raise SolverError(f"Arc-length inverse failed on [{lo}, {hi}]: {e}") from e

    def _advance(self, t: float, r: float) -> float | None:
        """T with ∫_t^T λ = r, solved on a local bracket. `None` when no bracket is found within
        the doubling budget.
        """
        step = self._initial_step(t, r)
        if step is None:
            return None
        for _ in range(_MAX_DOUBLINGS):
            hi = t + step
            reached = integrate(self._arc, t, hi, self.tol)
            while not math.isfinite(reached) and hi - t > self.tol.solver_xtol * hi:
                hi = t + 0.5 * (hi - t)
                reached = integrate(self._arc, t, hi, self.tol)
            if reached >= r:
                break
            step *= 2.0
        else:
            return None

        if not self.lam.levelwise and not self.lam.breakpoints(t, hi):
            form = self.lam.local_form(np.array([t]), np.array([hi]))
            guess = form.inverse_integral(t, r) if form is not None else None
            if guess is not None and t <= guess <= hi * (1.0 + 1e-12):
                return min(guess, hi)

        return self._solve_local(lambda s: integrate(self._arc, t, s, self.tol) - r, t, hi)

    def _retreat(self, t: float, r: float) -> float | None:
        """t' with ∫_t'^t λ = r, for 0 < r < Λ(t). `None` when no bracket is found."""
        step = self._initial_step(t, r)
        if step is None:
            return None
        for _ in range(_MAX_DOUBLINGS):
            lo = max(0.0, t - step)
            if lo == 0.0 or integrate(self._arc, lo, t, self.tol) >= r:
                break
            step *= 2.0
        else:
            return None
        return self._solve_local(lambda s: integrate(self._arc, s, t, self.tol) - r, lo, t)

    def local_span(self, t: float, r: float, descending: bool = False) -> float | None:
        """Coordinate length of the arc of length r that starts at t and runs away from the root,
        or toward it when `descending`, computed without forming t ± span. `None` when one
        closed-form piece of the metric density does not cover the arc.
        """
        if self._constant_lam is not None:
            return r / self._constant_lam
        step = self._initial_step(t, r)
        if step is None:
            return None
        return span_for_integral(self._arc, t, r, step, descending)

    def descendant_at(self, t: float, r: float) -> float:
        """The radial coordinate of x̲_r: T with Λ(T) = Λ(t) + r.

        Radii below Λ(t) are solved as ∫_t^T λ = r, so a small ball far from the root does not
        vanish in the rounding of Λ(t). Raises `SolverError` when r is below the resolution of t.
        """
        if r < 0:
            raise DomainError(f"Radius must be non-negative, got {r}")
        if r == 0:
            return t
        end: float | None = None
        if self._constant_lam is not None:
            end = t + r / self._constant_lam
        else:
            base = self.metric_from_root(t)
            if r < base:
                span = self.local_span(t, r)
                end = t + span if span is not None else self._advance(t, r)
            if end is None:
                end = self._invert(base + r)
        if not end > t:
            raise SolverError(f"Radius {r:.6g} is below the resolution of t={t:.6g}")
        return end

    def ancestor_at(self, t: float, r: float) -> float:
        """The radial coordinate of x̄^r: t' with Λ(t') = max{0, Λ(t) - r}."""
        if r < 0:
            raise DomainError(f"Radius must be non-negative, got {r}")
        if r == 0:
            return t
        start: float | None
        if self._constant_lam is not None:
            start = max(0.0, t - r / self._constant_lam)
        else:
            base = self.metric_from_root(t)
            if r >= base:
                return 0.0
            span = self.local_span(t, r, descending=True)
            start = t - span if span is not None else self._retreat(t, r)
            if start is None:
                start = self._invert(base - r)
        if t > 0 and not start < t:
            raise SolverError(f"Radius {r:.6g} is below the resolution of t={t:.6g}")
        return start
