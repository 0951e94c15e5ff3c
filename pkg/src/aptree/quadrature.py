"""Integration and essential extrema of radial integrands.

Every integrand has the shape

    (K**(j(s) - j0) * prod(w_i(s)**e_i))**q * prod(v_k(s)**f_k)

with j(s) = ceil(s). Integrals are split at declared breakpoints and, when the integrand jumps at
integers, at every level. Pieces with a closed-form `LocalForm` are summed exactly (vectorized
over levels, with geometric blocks for long runs of levels); the rest go to adaptive
Gauss-Kronrod quadrature. All sums are carried in log space so that branching multiplicities do
not overflow before the caller decides what to do with the result.
"""

from __future__ import annotations

import abc
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq, minimize_scalar
from scipy.special import logsumexp

from ._config import resolve_tolerance
from .exceptions import BudgetExceeded, DivergenceError, DomainError, NonConvergenceError, UserError
from .logger import logger
from .settings import Tolerance
from .weights import FloatArray, LocalForm, WeightFunction, log_expm1_abs

_LEVEL_CHUNK = 65536
_GRADING_STEPS = 30
_SPAN_WINDOW = 1e-12


@dataclass(frozen=True)
class Factor:
    weight: WeightFunction
    exponent: float = 1.0


@dataclass(frozen=True)
class Multiplicity:
    """Branch count K**(j(s) - anchor_level)."""

    branching: int
    anchor_level: int

    def log_values(self, s: FloatArray) -> FloatArray:
        return (np.ceil(s) - self.anchor_level) * math.log(self.branching)

    def log_on_pieces(self, lo: FloatArray, hi: FloatArray) -> FloatArray:
        return self.log_values(0.5 * (lo + hi))


@dataclass(frozen=True)
class IntegrandSpec:
    """An integrand over the radial coordinate, integrated against ds.

    Metric integrals are expressed by including lambda as an outer factor.
    """

    base: tuple[Factor, ...] = ()
    """Factors combined inside the power."""

    power: float = 1.0
    """Exponent applied to the base (and to the multiplicity)."""

    multiplicity: Multiplicity | None = None
    """Optional level multiplicity, raised to `power` together with the base."""

    outer: tuple[Factor, ...] = ()
    """Factors applied outside the power."""

    def __post_init__(self) -> None:
        if not math.isfinite(self.power):
            raise UserError(f"Integrand power must be finite, got {self.power}")
        if self.multiplicity is not None and self.multiplicity.branching == 1:
            object.__setattr__(self, "multiplicity", None)

    @classmethod
    def of(cls, weight: WeightFunction) -> IntegrandSpec:
        return cls(base=(Factor(weight),))

    @classmethod
    def measure(cls, mu: WeightFunction, branching: int, anchor_level: int) -> IntegrandSpec:
        """K**(j(s) - anchor_level) * mu(s): the radial density of a half-ball's measure."""
        return cls(base=(Factor(mu),), multiplicity=Multiplicity(branching, anchor_level))

    @classmethod
    def ap_bracket(
        cls,
        lam: WeightFunction,
        mu: WeightFunction,
        branching: int,
        anchor_level: int,
        p: float,
    ) -> IntegrandSpec:
        """(K**(j(s) - j0) * mu / lam)**(1/(1-p)) * lam, the metric integrand of the Ap bracket.

        The exponent is undefined at p = 1; that case is handled by essential extrema instead.
        """
        if p <= 1:
            raise UserError(f"The Ap bracket needs p > 1, got p={p}; use the A1 ratio for p = 1")
        return cls(
            base=(Factor(mu, 1.0), Factor(lam, -1.0)),
            power=1.0 / (1.0 - p),
            multiplicity=Multiplicity(branching, anchor_level),
            outer=(Factor(lam, 1.0),),
        )

    @classmethod
    def density_ratio(
        cls, lam: WeightFunction, mu: WeightFunction, branching: int, anchor_level: int
    ) -> IntegrandSpec:
        """K**(j(s) - j0) * mu / lam."""
        return cls(
            base=(Factor(mu, 1.0), Factor(lam, -1.0)),
            multiplicity=Multiplicity(branching, anchor_level),
        )

    @classmethod
    def a1_ratio(
        cls, lam: WeightFunction, mu: WeightFunction, branching: int, anchor_level: int
    ) -> IntegrandSpec:
        """lam / (K**(j(s) - j0) * mu)."""
        return cls(
            base=(Factor(mu, 1.0), Factor(lam, -1.0)),
            power=-1.0,
            multiplicity=Multiplicity(branching, anchor_level),
        )

    @property
    def factors(self) -> tuple[Factor, ...]:
        return self.base + self.outer

    @property
    def splits_levels(self) -> bool:
        return self.multiplicity is not None or any(f.weight.levelwise for f in self.factors)

    def breakpoints(self, a: float, b: float) -> list[float]:
        points: set[float] = set()
        for f in self.factors:
            points.update(f.weight.breakpoints(a, b))
        return sorted(points)

    def log_values(self, s: FloatArray | float) -> FloatArray:
        arr = np.asarray(s, dtype=float)
        inner = np.zeros_like(arr)
        for f in self.base:
            inner = inner + f.exponent * f.weight.log_values(arr)
        if self.multiplicity is not None:
            inner = inner + self.multiplicity.log_values(arr)
        out = self.power * inner
        for f in self.outer:
            out = out + f.exponent * f.weight.log_values(arr)
        return out

    def __call__(self, s: FloatArray | float) -> FloatArray:
        with np.errstate(over="ignore", under="ignore"):
            return np.exp(self.log_values(s))

    def local_form(self, lo: FloatArray, hi: FloatArray) -> LocalForm | None:
        form: LocalForm | None = LocalForm.constant(lo)
        for f in self.base:
            piece = f.weight.local_form(lo, hi)
            if piece is None or form is None:
                return None
            form = form * piece**f.exponent
        if form is None:
            return None
        if self.multiplicity is not None:
            form = form.scaled(self.multiplicity.log_on_pieces(lo, hi))
        form = form**self.power
        for f in self.outer:
            piece = f.weight.local_form(lo, hi)
            if piece is None:
                return None
            form = form * piece**f.exponent
            if form is None:
                return None
        return form

    def level_tail(self) -> tuple[int, float, float] | None:
        """`(n0, log_c, log_gamma)` when the integrand equals `exp(log_c + (n - n0) * log_gamma)`
        on every level (n, n+1] with n >= n0.
        """
        tails = []
        for f in self.factors:
            tail = f.weight.level_tail()
            if tail is None:
                return None
            tails.append(tail)
        n0 = max([t[0] for t in tails], default=0)

        def at(factors: Sequence[Factor], offset: int) -> tuple[float, float]:
            log_c = log_g = 0.0
            for f, (start, log_w, log_r) in zip(factors, tails[offset : offset + len(factors)]):
                log_c += f.exponent * (log_w + (n0 - start) * log_r)
                log_g += f.exponent * log_r
            return log_c, log_g

        inner_c, inner_g = at(self.base, 0)
        if self.multiplicity is not None:
            log_k = math.log(self.multiplicity.branching)
            inner_c += (n0 + 1 - self.multiplicity.anchor_level) * log_k
            inner_g += log_k
        outer_c, outer_g = at(self.outer, len(self.base))
        return n0, self.power * inner_c + outer_c, self.power * inner_g + outer_g


def _segments(spec: IntegrandSpec, a: float, b: float) -> Iterator[tuple[float, float]]:
    edges = [a, *spec.breakpoints(a, b), b]
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi > lo:
            yield lo, hi


def _level_chunks(
    lo: float, hi: float, tol: Tolerance
) -> Iterator[tuple[FloatArray, FloatArray]]:
    first = math.floor(lo)
    last = math.ceil(hi)
    if last - first > tol.max_levels:
        raise BudgetExceeded(
            f"Integral over [{lo}, {hi}] spans {last - first} levels, budget {tol.max_levels}"
        )
    for start in range(first, last, _LEVEL_CHUNK):
        n = np.arange(start, min(start + _LEVEL_CHUNK, last), dtype=float)
        piece_lo = np.maximum(n, lo)
        piece_hi = np.minimum(n + 1.0, hi)
        keep = piece_hi > piece_lo
        yield piece_lo[keep], piece_hi[keep]


def _log_sum(parts: Sequence[float]) -> float:
    if not parts:
        return -math.inf
    if any(p == math.inf for p in parts):
        return math.inf
    return float(logsumexp(parts))


def _log_geometric_sum(count: int, log_ratio: float) -> float:
    if log_ratio == 0.0:
        return math.log(count)
    return float(log_expm1_abs(count * log_ratio) - log_expm1_abs(log_ratio))


def _graded_pieces(
    f: Callable[[float], float], lo: float, hi: float
) -> list[tuple[float, float]]:
    """Subdivides geometrically toward endpoints where the integrand is singular."""
    edges = [lo, hi]
    length = hi - lo
    if not math.isfinite(f(lo)):
        edges.extend(lo + length * 2.0**-k for k in range(1, _GRADING_STEPS))
    if not math.isfinite(f(hi)):
        edges.extend(hi - length * 2.0**-k for k in range(1, _GRADING_STEPS))
    edges = sorted(set(edges))
    return list(zip(edges[:-1], edges[1:]))


def _quad(f: Callable[[float], float], lo: float, hi: float, tol: Tolerance) -> float:
    total = 0.0
    for a, b in _graded_pieces(f, lo, hi):
        out = quad(
            f, a, b, epsabs=tol.abs, epsrel=tol.rel, limit=tol.max_subdivisions, full_output=1
        )
        value, error = float(out[0]), float(out[1])
        if len(out) > 3 and error > tol.quad_acceptance * max(abs(value), tol.abs):
            raise NonConvergenceError(
                f"Quadrature on [{a}, {b}] stopped at error {error:.3g} for value {value:.6g}: "
                f"{out[3]}"
            )
        total += value
    return total


def _log_quad(spec: IntegrandSpec, lo: float, hi: float, tol: Tolerance) -> float:
    ref = float(spec.log_values(0.5 * (lo + hi)))
    if not math.isfinite(ref):
        ref = 0.0

    def f(s: float) -> float:
        with np.errstate(over="ignore", under="ignore"):
            return float(np.exp(spec.log_values(s) - ref))

    value = _quad(f, lo, hi, tol)
    if not value > 0.0:
        return -math.inf
    return ref + math.log(value)


def _log_levels_direct(spec: IntegrandSpec, lo: float, hi: float, tol: Tolerance) -> float:
    parts: list[float] = []
    quad_pieces = 0
    for piece_lo, piece_hi in _level_chunks(lo, hi, tol):
        if piece_lo.size == 0:
            continue
        form = spec.local_form(piece_lo, piece_hi)
        if form is not None and form.has_closed_form:
            part = float(logsumexp(form.log_integral(piece_lo, piece_hi)))
        else:
            quad_pieces += piece_lo.size
            if quad_pieces > tol.max_pieces:
                raise BudgetExceeded(
                    f"More than {tol.max_pieces} pieces of [{lo}, {hi}] need quadrature"
                )
            part = _log_sum([_log_quad(spec, a, b, tol) for a, b in zip(piece_lo, piece_hi)])
        if part == math.inf:
            return math.inf
        parts.append(part)
    return _log_sum(parts)


def _geometric_span(spec: IntegrandSpec, lo: float, hi: float) -> tuple[int, int, float, float]:
    """Full levels [start, end) inside [lo, hi] on which the integrand is geometric, with the
    level constant at `start` and the per-level log ratio. `end - start < 2` means none.
    """
    tail = spec.level_tail() if spec.splits_levels else None
    if tail is None:
        return 0, 0, 0.0, 0.0
    n0, log_c, log_g = tail
    start = max(n0, math.ceil(lo))
    end = math.floor(hi)
    return start, end, log_c + (start - n0) * log_g, log_g


def _log_segment(spec: IntegrandSpec, lo: float, hi: float, tol: Tolerance) -> float:
    if not spec.splits_levels:
        form = spec.local_form(np.array([lo]), np.array([hi]))
        if form is not None and form.has_closed_form:
            return float(form.log_integral(np.array([lo]), np.array([hi]))[0])
        return _log_quad(spec, lo, hi, tol)

    start, end, log_c, log_g = _geometric_span(spec, lo, hi)
    if end - start < 2:
        return _log_levels_direct(spec, lo, hi, tol)
    parts = [log_c + _log_geometric_sum(end - start, log_g)]
    if start > lo:
        parts.append(_log_levels_direct(spec, lo, start, tol))
    if hi > end:
        parts.append(_log_levels_direct(spec, end, hi, tol))
    return _log_sum(parts)


def _check_interval(a: float, b: float) -> None:
    if a < 0:
        raise DomainError(f"Integration interval must lie in [0, inf), got a={a}")
    if b < a:
        raise UserError(f"Integration interval is reversed: [{a}, {b}]")
    if not math.isfinite(b):
        raise UserError("Integration interval must be bounded")


def integrate_log(
    spec: IntegrandSpec, a: float, b: float, tol: Tolerance | None = None
) -> float:
    """Log of the integral of `spec` over [a, b]. Returns `+inf` when a closed-form piece is not
    integrable and `-inf` for an empty interval.
    """
    tol = resolve_tolerance(tol)
    _check_interval(a, b)
    parts = []
    for lo, hi in _segments(spec, a, b):
        part = _log_segment(spec, lo, hi, tol)
        if part == math.inf:
            return math.inf
        parts.append(part)
    return _log_sum(parts)


def integrate(spec: IntegrandSpec, a: float, b: float, tol: Tolerance | None = None) -> float:
    """The integral of `spec` over [a, b].

    Raises `DivergenceError` when a closed-form piece is not integrable. A finite integral that is
    too large for a double is returned as `inf`.
    """
    log_value = integrate_log(spec, a, b, tol)
    if log_value == math.inf:
        raise DivergenceError(f"Integral over [{a}, {b}] diverges")
    with np.errstate(over="ignore"):
        return float(np.exp(log_value))


def _span_form(
    spec: IntegrandSpec, a: float, hint: float, descending: bool
) -> tuple[LocalForm, float] | None:
    """The closed form of `spec` on a window of width at least `2 * hint` that starts at `a` (or
    ends there, when descending), mirrored about `a` in the descending case, with the window
    width. `None` when a breakpoint or a level boundary cuts the window.
    """
    width = max(2.0 * hint, _SPAN_WINDOW * max(a, 1.0))
    lo, hi = (a - width, a) if descending else (a, a + width)
    if lo < 0.0 or not hi > lo or spec.breakpoints(lo, hi):
        return None
    if spec.splits_levels and math.floor(lo) + 1 < hi:
        return None
    form = spec.local_form(np.array([lo]), np.array([hi]))
    if form is None or not form.has_closed_form:
        return None
    return (form.reflected(a) if descending else form), width


def integrate_log_span(
    spec: IntegrandSpec, a: float, length: float, descending: bool = False
) -> float | None:
    """Log of the integral of `spec` over [a, a + length], or over [a - length, a] when
    descending, for spans that may be below the resolution of `a`.

    Returns `None` unless one closed-form piece covers the span.
    """
    found = _span_form(spec, a, length, descending)
    if found is None or length > found[1]:
        return None
    form, _ = found
    return float(form.log_integral_span(np.array([a]), np.array([length]))[0])


def span_for_integral(
    spec: IntegrandSpec, a: float, target: float, hint: float, descending: bool = False
) -> float | None:
    """The length L with the integral of `spec` over [a, a + L] (or [a - L, a]) equal to
    `target`, without forming a ± L. `hint` is a first guess for L.

    Returns `None` unless one closed-form piece covers the span.
    """
    found = _span_form(spec, a, hint, descending)
    if found is None:
        return None
    form, width = found
    length = form.integral_offset(a, target)
    if length is None or not 0.0 < length <= width:
        return None
    return length


def _log_extreme_sampled(
    spec: IntegrandSpec, lo: float, hi: float, kind: Literal["sup", "inf"], tol: Tolerance
) -> float:
    sign = 1.0 if kind == "sup" else -1.0
    length = hi - lo
    nudge = 1e-12 * length
    interior = lo + length * (np.arange(tol.grid) + 0.5) / tol.grid
    s = np.concatenate([[lo + nudge], interior, [hi - nudge]])
    values = sign * spec.log_values(s)
    best = int(np.nanargmax(values))
    best_value = float(values[best])
    left = float(s[max(best - 1, 0)])
    right = float(s[min(best + 1, len(s) - 1)])
    if right > left and math.isfinite(best_value):
        res = minimize_scalar(
            lambda x: -sign * float(spec.log_values(x)),
            bounds=(left, right),
            method="bounded",
            options={"xatol": 1e-12 * max(1.0, abs(right))},
        )
        if res.success and -res.fun > best_value:
            best_value = float(-res.fun)
    return sign * best_value


def _log_extreme_direct(
    spec: IntegrandSpec, lo: float, hi: float, kind: Literal["sup", "inf"], tol: Tolerance
) -> float:
    pick = np.max if kind == "sup" else np.min
    chunks: Iterator[tuple[FloatArray, FloatArray]]
    if spec.splits_levels:
        chunks = _level_chunks(lo, hi, tol)
    else:
        chunks = iter([(np.array([lo]), np.array([hi]))])
    best: list[float] = []
    sampled = 0
    for piece_lo, piece_hi in chunks:
        if piece_lo.size == 0:
            continue
        form = spec.local_form(piece_lo, piece_hi)
        if form is not None and form.has_closed_form:
            ends = np.concatenate([form.log_values(piece_lo), form.log_values(piece_hi)])
            best.append(float(pick(ends)))
            continue
        sampled += piece_lo.size
        if sampled > tol.max_pieces:
            raise BudgetExceeded(f"More than {tol.max_pieces} pieces of [{lo}, {hi}] need sampling")
        best.extend(
            _log_extreme_sampled(spec, float(a), float(b), kind, tol)
            for a, b in zip(piece_lo, piece_hi)
        )
    return float(pick(best))


def ess_extremum(
    spec: IntegrandSpec,
    a: float,
    b: float,
    kind: Literal["sup", "inf"],
    tol: Tolerance | None = None,
) -> float:
    """Essential supremum or infimum of `spec` over (a, b).

    Closed-form pieces are monotone, so their extrema are endpoint limits. Other pieces are
    sampled at `tol.grid` points and refined around the best sample. Values at single abscissae
    never matter.
    """
    tol = resolve_tolerance(tol)
    _check_interval(a, b)
    if not a < b:
        raise UserError(f"Essential extrema need a < b, got ({a}, {b})")
    if kind not in ("sup", "inf"):
        raise UserError(f"Unknown extremum kind {kind!r}")

    pick = max if kind == "sup" else min
    candidates = []
    for lo, hi in _segments(spec, a, b):
        start, end, _, _ = _geometric_span(spec, lo, hi)
        if end - start >= 3:
            # Geometric runs are monotone: only their first and last level matter.
            ranges = [(lo, start + 1.0), (end - 1.0, hi)]
        else:
            ranges = [(lo, hi)]
        candidates.extend(_log_extreme_direct(spec, x, y, kind, tol) for x, y in ranges if y > x)
    with np.errstate(over="ignore"):
        return float(np.exp(pick(candidates)))


def _merge(intervals: list[tuple[float, float]]) -> list[tuple[float, float]]:
    merged: list[tuple[float, float]] = []
    for lo, hi in sorted(intervals):
        if merged and lo <= merged[-1][1] + 1e-14 * max(1.0, abs(lo)):
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def _pieces(spec: IntegrandSpec, a: float, b: float, tol: Tolerance) -> list[tuple[float, float]]:
    out: list[tuple[float, float]] = []
    for lo, hi in _segments(spec, a, b):
        if not spec.splits_levels:
            out.append((lo, hi))
            continue
        for piece_lo, piece_hi in _level_chunks(lo, hi, tol):
            out.extend(zip(piece_lo.tolist(), piece_hi.tolist()))
        if len(out) > tol.max_pieces:
            raise BudgetExceeded(f"[{a}, {b}] splits into more than {tol.max_pieces} pieces")
    return out


def sublevel_intervals(
    spec: IntegrandSpec, a: float, b: float, level: float, tol: Tolerance | None = None
) -> list[tuple[float, float]]:
    """The set {s in (a, b): spec(s) < level} as a sorted union of disjoint intervals."""
    tol = resolve_tolerance(tol)
    _check_interval(a, b)
    log_level = math.log(level) if level > 0 else -math.inf
    found: list[tuple[float, float]] = []
    for lo, hi in _pieces(spec, a, b, tol):
        form = spec.local_form(np.array([lo]), np.array([hi]))
        if form is not None and form.has_closed_form:
            v_lo = float(form.log_values(np.array([lo]))[0])
            v_hi = float(form.log_values(np.array([hi]))[0])
            if v_lo < log_level and v_hi < log_level:
                found.append((lo, hi))
            elif v_lo < log_level or v_hi < log_level:
                roots = form.solve(log_level)
                root = min(max(float(roots[0]), lo), hi) if roots is not None else lo
                found.append((lo, root) if v_lo < log_level else (root, hi))
            continue

        s = np.linspace(lo, hi, tol.grid + 1)
        below = spec.log_values(s) < log_level
        start = lo if below[0] else None
        for i in range(1, len(s)):
            if below[i] == below[i - 1]:
                continue
            x = brentq(
                lambda u: float(spec.log_values(u)) - log_level, float(s[i - 1]), float(s[i])
            )
            if below[i]:
                start = x
            elif start is not None:
                found.append((start, x))
                start = None
        if start is not None:
            found.append((start, hi))
    return [(lo, hi) for lo, hi in _merge(found) if hi > lo]


class RadialProfile(abc.ABC):
    """A monotone radial function U, used as the profile of a radial test function."""

    @abc.abstractmethod
    def __call__(self, s: float) -> float:
        pass

    def knots(self, a: float, b: float) -> list[float]:
        """Abscissae in (a, b) where the profile is not smooth."""
        return []

    def constant_on(self, lo: float, hi: float) -> float | None:
        """The constant value on [lo, hi], or `None` if the profile varies there."""
        return None


@dataclass(frozen=True)
class ConstantProfile(RadialProfile):
    value: float

    def __call__(self, s: float) -> float:
        return self.value

    def constant_on(self, lo: float, hi: float) -> float | None:
        return self.value


@dataclass(frozen=True)
class AffineProfile(RadialProfile):
    intercept: float
    slope: float

    def __call__(self, s: float) -> float:
        return self.intercept + self.slope * s

    def constant_on(self, lo: float, hi: float) -> float | None:
        return self.intercept + self.slope * lo if self.slope == 0.0 else None


class AccumulatedProfile(RadialProfile):
    """U(s) = integral of `spec` over [start, min(s, stop)] intersected with `support`.

    U vanishes below `start` and is constant past `stop`.
    """

    def __init__(
        self,
        spec: IntegrandSpec,
        start: float,
        stop: float,
        support: Sequence[tuple[float, float]] | None = None,
        tol: Tolerance | None = None,
    ):
        if stop < start:
            raise UserError(f"Profile interval is reversed: [{start}, {stop}]")
        self.spec = spec
        self.start = start
        self.stop = stop
        self.tol = resolve_tolerance(tol)
        self.support = (
            [(max(lo, start), min(hi, stop)) for lo, hi in support if hi > start and lo < stop]
            if support is not None
            else [(start, stop)]
        )
        edges = {start, stop}
        for lo, hi in self.support:
            edges.update((lo, hi))
        for lo, hi in _pieces(spec, start, stop, self.tol):
            edges.update((lo, hi))
        self._edges = np.array(sorted(edges))
        increments = [self._partial(lo, hi) for lo, hi in zip(self._edges[:-1], self._edges[1:])]
        self._cumulative = np.concatenate([[0.0], np.cumsum(increments)])

    @property
    def total(self) -> float:
        return float(self._cumulative[-1])

    def _in_support(self, lo: float, hi: float) -> bool:
        mid = 0.5 * (lo + hi)
        return any(a <= mid <= b for a, b in self.support)

    def _partial(self, lo: float, hi: float) -> float:
        if hi <= lo or not self._in_support(lo, hi):
            return 0.0
        return integrate(self.spec, lo, hi, self.tol)

    def __call__(self, s: float) -> float:
        if s <= self.start:
            return 0.0
        if s >= self.stop:
            return self.total
        i = int(np.searchsorted(self._edges, s, side="right")) - 1
        return float(self._cumulative[i]) + self._partial(float(self._edges[i]), s)

    def knots(self, a: float, b: float) -> list[float]:
        return [float(x) for x in self._edges if a < x < b]

    def constant_on(self, lo: float, hi: float) -> float | None:
        if hi <= self.start:
            return 0.0
        if lo >= self.stop:
            return self.total
        if not self._in_support(lo, hi):
            return self(lo)
        return None

    def solve(self, value: float) -> float:
        """The smallest s with U(s) = value, for 0 < value < total."""
        if not 0.0 < value < self.total:
            raise UserError(f"Profile level {value} is outside (0, {self.total})")
        i = int(np.searchsorted(self._cumulative, value, side="left"))
        lo, hi = float(self._edges[i - 1]), float(self._edges[i])
        return float(brentq(lambda s: self(s) - value, lo, hi, xtol=1e-14 * max(1.0, hi)))


def integrate_product(
    profile: RadialProfile,
    spec: IntegrandSpec,
    a: float,
    b: float,
    tol: Tolerance | None = None,
) -> float:
    """The integral of U(s) * spec(s) over [a, b]."""
    tol = resolve_tolerance(tol)
    _check_interval(a, b)
    edges = {a, b}
    for lo, hi in _pieces(spec, a, b, tol):
        edges.update((lo, hi))
    edges.update(profile.knots(a, b))
    ordered = sorted(edges)
    total = 0.0
    for lo, hi in zip(ordered[:-1], ordered[1:]):
        if hi <= lo:
            continue
        value = profile.constant_on(lo, hi)
        if value is not None:
            if value != 0.0:
                total += value * integrate(spec, lo, hi, tol)
            continue

        ref = float(spec.log_values(0.5 * (lo + hi)))
        ref = ref if math.isfinite(ref) else 0.0

        def f(s: float, ref: float = ref) -> float:
            with np.errstate(over="ignore", under="ignore"):
                return profile(s) * float(np.exp(spec.log_values(s) - ref))

        total += math.exp(ref) * _quad(f, lo, hi, tol)
    logger.debug(f"Profile integral over [{a}, {b}] = {total}")
    return total
