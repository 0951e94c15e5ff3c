"""Measures of half-balls, directed half-balls, geodesic segments and balls.

The half-ball F(x, r) below a point at radial coordinate t is the set of descendants within
distance r. Its measure is the radial integral of `K**(j(s) - j(t)) * mu(s)` over [t, T] with
T = descendant_at(t, r): the metric density cancels between the arc-length element and the
change of variables. A ball B(x, r) splits into the ancestor segment, the half-ball, one side
branch per vertex strictly between x̄^r and x, and the root's other children when r exceeds
d(0, x).

All measures are computed in log space. For K >= 2 the branch multiplicity overflows doubles
after roughly 1000 / log2(K) levels, in which case the linear-scale functions return `inf`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from ._config import resolve_tolerance
from .exceptions import BudgetExceeded, DomainError
from .geometry import TreeSpace, level_index
from .quadrature import (
    IntegrandSpec,
    RadialProfile,
    integrate_log,
    integrate_log_span,
    integrate_product,
)
from .settings import Tolerance

_NARROW_SPAN = 1e-6


def _log_sum(parts: list[float]) -> float:
    if math.inf in parts:
        return math.inf
    return float(logsumexp(parts))


def _exp(log_value: float) -> float:
    with np.errstate(over="ignore"):
        return float(np.exp(log_value))


def _check_radius(r: float) -> None:
    if not r > 0:
        raise DomainError(f"Radius must be positive, got {r}")


def _vertex_level(anchor_t: float) -> int:
    if anchor_t != int(anchor_t) or anchor_t < 0:
        raise DomainError(
            f"Edge-restricted descent needs a vertex anchor (an integer level), got {anchor_t}"
        )
    return int(anchor_t)


def branch_multiplicity(
    space: TreeSpace, anchor_t: float, s: float, restrict_to_first_edge: bool = False
) -> int:
    """The number of descendants of a point at `anchor_t` that sit at radial coordinate `s`.

    With `restrict_to_first_edge` the descent goes through one designated child edge of the
    vertex at `anchor_t`, which must then be an integer.
    """
    if not s > anchor_t:
        raise DomainError(f"Descendant coordinate {s} must exceed the anchor {anchor_t}")
    if restrict_to_first_edge:
        return space.K ** (level_index(s) - _vertex_level(anchor_t) - 1)
    return space.K ** (level_index(s) - level_index(anchor_t))


def _halfball_spec(space: TreeSpace, anchor_level: int) -> IntegrandSpec:
    return IntegrandSpec.measure(space.mu, space.K, anchor_level)


def _narrow_span(space: TreeSpace, t: float, r: float, descending: bool) -> float | None:
    """The coordinate span of a radius that is short against t, or `None` for radii the absolute
    coordinates resolve.
    """
    span = space.local_span(t, r, descending)
    if span is None or span > _NARROW_SPAN * max(t, 1.0):
        return None
    return span


def log_halfball_measure(
    space: TreeSpace, t: float, r: float, tol: Tolerance | None = None
) -> float:
    _check_radius(r)
    if t < 0:
        raise DomainError(f"Radial coordinate must be non-negative, got {t}")
    spec = _halfball_spec(space, level_index(t))
    up = _narrow_span(space, t, r, descending=False)
    if up is not None:
        narrow = integrate_log_span(spec, t, up)
        if narrow is not None:
            return narrow
    return integrate_log(spec, t, space.descendant_at(t, r), tol)


def halfball_measure(space: TreeSpace, t: float, r: float, tol: Tolerance | None = None) -> float:
    """μ(F(x, r)) for |x| = t."""
    return _exp(log_halfball_measure(space, t, r, tol))


def log_directed_halfball_measure(
    space: TreeSpace, vertex_n: int, r: float, tol: Tolerance | None = None
) -> float:
    n = _vertex_level(vertex_n)
    if r < 0:
        raise DomainError(f"Radius must be non-negative, got {r}")
    if r == 0:
        return -math.inf
    end = space.descendant_at(n, r)
    return integrate_log(_halfball_spec(space, n + 1), n, end, tol)


def directed_halfball_measure(
    space: TreeSpace, vertex_n: int, r: float, tol: Tolerance | None = None
) -> float:
    """Measure of the points reachable from vertex `vertex_n` through one child edge within
    distance `r`.
    """
    return _exp(log_directed_halfball_measure(space, vertex_n, r, tol))


def log_segment_mu(space: TreeSpace, a: float, b: float, tol: Tolerance | None = None) -> float:
    return integrate_log(IntegrandSpec.of(space.mu), a, b, tol)


def segment_mu(space: TreeSpace, a: float, b: float, tol: Tolerance | None = None) -> float:
    """Mass of a single geodesic segment between radial coordinates a <= b."""
    return _exp(log_segment_mu(space, a, b, tol))


@dataclass(frozen=True)
class SidePart:
    level: int
    """Vertex level n the side branches hang from."""

    residual: float
    """Radius left for the side branches, r - d(x, vertex)."""

    siblings: int
    """Number of side branches (K - 1)."""


@dataclass(frozen=True)
class BallDecomposition:
    """Pairwise disjoint pieces whose union is B(x, r)."""

    t: float
    r: float
    t_top: float
    """Radial coordinate of x̄^r; the ancestor segment is (t_top, t)."""

    sides: list[SidePart] = field(default_factory=list)
    """Side branches at vertices strictly between x̄^r and x, nearest to x first."""

    root_overflow: SidePart | None = None
    """The root's other children, present when r > d(0, x)."""


def decompose_ball(
    space: TreeSpace, t: float, r: float, tol: Tolerance | None = None
) -> BallDecomposition:
    tol = resolve_tolerance(tol)
    _check_radius(r)
    if t < 0:
        raise DomainError(f"Radial coordinate must be non-negative, got {t}")
    if t == 0:
        return BallDecomposition(t=t, r=r, t_top=0.0)

    t_top = space.ancestor_at(t, r)
    siblings = space.K - 1
    sides: list[SidePart] = []
    root_overflow = None
    if siblings > 0:
        first = math.floor(t_top) + 1
        last = math.ceil(t) - 1
        if last - first + 1 > tol.max_side_vertices:
            raise BudgetExceeded(
                f"Ball at t={t}, r={r} crosses {last - first + 1} vertices, budget "
                f"{tol.max_side_vertices}"
            )
        metric_t = space.metric_from_root(t)
        for n in range(last, first - 1, -1):
            residual = r - (metric_t - space.metric_from_root(n))
            if residual > 0:
                sides.append(SidePart(level=n, residual=residual, siblings=siblings))
        if metric_t < r:
            root_overflow = SidePart(level=0, residual=r - metric_t, siblings=siblings)
    return BallDecomposition(t=t, r=r, t_top=t_top, sides=sides, root_overflow=root_overflow)


def _log_narrow_ball_measure(space: TreeSpace, t: float, r: float) -> float | None:
    """μ(B(x, r)) for a ball too thin to cross a vertex: the ancestor segment plus the half-ball,
    both integrated over spans kept apart from t.
    """
    down = _narrow_span(space, t, r, descending=True)
    up = _narrow_span(space, t, r, descending=False)
    if down is None or up is None or not down < t:
        return None
    if space.K > 1 and math.ceil(t) - 1 > t - down:
        return None
    segment = integrate_log_span(IntegrandSpec.of(space.mu), t, down, descending=True)
    half = integrate_log_span(_halfball_spec(space, level_index(t)), t, up)
    if segment is None or half is None:
        return None
    return _log_sum([segment, half])


def log_ball_measure(space: TreeSpace, t: float, r: float, tol: Tolerance | None = None) -> float:
    if t > 0:
        _check_radius(r)
        narrow = _log_narrow_ball_measure(space, t, r)
        if narrow is not None:
            return narrow
    parts_of = decompose_ball(space, t, r, tol)
    if t == 0:
        return log_halfball_measure(space, 0.0, r, tol)

    parts = [
        log_segment_mu(space, parts_of.t_top, t, tol),
        log_halfball_measure(space, t, r, tol),
    ]
    extra = list(parts_of.sides)
    if parts_of.root_overflow is not None:
        extra.append(parts_of.root_overflow)
    for side in extra:
        parts.append(
            math.log(side.siblings)
            + log_directed_halfball_measure(space, side.level, side.residual, tol)
        )
    return _log_sum(parts)


def ball_measure(space: TreeSpace, t: float, r: float, tol: Tolerance | None = None) -> float:
    """μ(B(x, r)) for |x| = t."""
    return _exp(log_ball_measure(space, t, r, tol))


def integrate_profile_on_halfball(
    space: TreeSpace,
    profile: RadialProfile,
    anchor_t: float,
    r: float,
    restrict_to_first_edge: bool = False,
    tol: Tolerance | None = None,
) -> float:
    """∫ U(s) * multiplicity(s) * mu(s) ds over the (possibly edge-restricted) half-ball."""
    _check_radius(r)
    if restrict_to_first_edge:
        anchor_level = _vertex_level(anchor_t) + 1
    else:
        anchor_level = level_index(anchor_t)
    end = space.descendant_at(anchor_t, r)
    return integrate_product(profile, _halfball_spec(space, anchor_level), anchor_t, end, tol)
