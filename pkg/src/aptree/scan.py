"""Grid search for suprema over (t, r).

A scan starts on an initial box of radial coordinates and radii, grows the box geometrically
toward the configured limits, then refines locally around the incumbent argmax. Radii come in
two families: relative cells r = beta * max(d(0, x), r_floor), which follow the rays r ~ d(0, x)
at every scale, and (in full mode) absolute cells on a log grid. The verdict compares the
running supremum across expansions and refinements; it is a heuristic, because no finite scan
can prove that a supremum is finite.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Literal

from ._config import get_default_workers
from .exceptions import AptreeException
from .geometry import TreeSpace
from .logger import logger
from .settings import DivergenceRule, ScanDomain
from .tracing import scan_span

ScanVerdict = Literal["bounded", "diverging", "inconclusive"]
ScanKind = Literal["ap", "a1", "doubling"]
Stage = Literal["initial", "expansion", "refinement"]

Cell = tuple[float, float]
Evaluator = Callable[[float, float], float]

_FAR_SLACK = 1.0 + 1e-12
_REFINE_OFFSETS = (-2, -1, 0, 1, 2)
_KNOT_LEVELS = 8
_KNOT_EPS = 1e-6


def json_float(value: float | None) -> float | None:
    """Non-finite floats have no JSON encoding; they are reported as null plus a flag."""
    if value is None or not math.isfinite(value):
        return None
    return value


@dataclass(frozen=True)
class CellValue:
    t: float
    r: float
    value: float

    def export(self) -> dict[str, Any]:
        return {
            "t": self.t,
            "r": self.r,
            "value": json_float(self.value),
            "value_is_infinite": self.value == math.inf,
        }


@dataclass(frozen=True)
class ScanStep:
    """One row of a scan's trace."""

    stage: Stage
    t_box: tuple[float, float]
    r_box: tuple[float, float] | None
    """Absolute r range; `None` when the scan uses relative cells only."""

    resolution: float
    """Grid points per decade in t at this stage."""

    running_sup: float
    argmax: Cell | None
    new_cells: int
    argmax_is_new: bool
    """Whether the argmax was first evaluated at this stage."""

    def export(self) -> dict[str, Any]:
        return {
            "stage": self.stage,
            "t_box": list(self.t_box),
            "r_box": list(self.r_box) if self.r_box else None,
            "resolution": self.resolution,
            "running_sup": json_float(self.running_sup),
            "running_sup_is_infinite": self.running_sup == math.inf,
            "argmax": list(self.argmax) if self.argmax else None,
            "new_cells": self.new_cells,
            "argmax_is_new": self.argmax_is_new,
        }


@dataclass
class SupEstimate:
    """The result of a supremum scan."""

    name: str
    kind: ScanKind
    estimate: float
    """The largest value seen, `inf` if some cell was infinite, `nan` if every cell failed."""

    argmax: Cell | None
    verdict: ScanVerdict
    reason: str
    """Which criterion produced the verdict."""

    growth_factors: list[float] = field(default_factory=list)
    """Ratio of consecutive running sups across the expansions."""

    trace: list[ScanStep] = field(default_factory=list)
    samples: list[CellValue] = field(default_factory=list)
    """Every successfully evaluated cell, in evaluation order."""

    cells: int = 0
    skipped: int = 0
    mode: str | None = None

    @property
    def is_infinite(self) -> bool:
        return self.estimate == math.inf

    def top_cells(self, n: int) -> list[CellValue]:
        """The `n` highest cells, ties broken by evaluation order."""
        order = sorted(range(len(self.samples)), key=lambda i: (-self.samples[i].value, i))
        return [self.samples[i] for i in order[:n]]

    def export(self, include_samples: bool = False) -> dict[str, Any]:
        out: dict[str, Any] = {
            "name": self.name,
            "kind": self.kind,
            "mode": self.mode,
            "estimate": json_float(self.estimate),
            "estimate_is_infinite": self.is_infinite,
            "argmax": list(self.argmax) if self.argmax else None,
            "verdict": self.verdict,
            "reason": self.reason,
            "heuristic": True,
            "growth_factors": [json_float(g) for g in self.growth_factors],
            "cells": self.cells,
            "skipped": self.skipped,
            "trace": [step.export() for step in self.trace],
        }
        if include_samples:
            out["samples"] = [s.export() for s in self.samples]
        return out


def log_grid(lo: float, hi: float, per_decade: float) -> list[float]:
    """Points 10**(k / per_decade) inside [lo, hi]. The grid is aligned across boxes, so growing
    a box only adds points.
    """
    first = math.ceil(per_decade * math.log10(lo) - 1e-9)
    last = math.floor(per_decade * math.log10(hi) + 1e-9)
    return [10.0 ** (k / per_decade) for k in range(first, last + 1)]


class SupremumScanner:
    """Estimates sup f(t, r) over a scan domain.

    Args:
        evaluate: The function to maximize. May return `inf`; exceptions and NaN skip the cell.
        space: The tree the cells live on; used to convert coordinates to distances.
        kind: The functional being scanned, for reports.
        name: A label for reports and spans.
        domain: Grid and growth parameters.
        rule: Thresholds for the verdict.
        far_c: When given, only cells with r <= far_c * d(0, x) are scanned.
        include_absolute_r: Whether to add the absolute r grid.
        include_root: Whether to scan cells centred at the root.
        workers: Threads used to evaluate cells.
    """

    def __init__(
        self,
        evaluate: Evaluator,
        space: TreeSpace,
        kind: ScanKind,
        name: str,
        domain: ScanDomain | None = None,
        rule: DivergenceRule | None = None,
        far_c: float | None = None,
        include_absolute_r: bool = True,
        include_root: bool = True,
        workers: int | None = None,
        mode: str | None = None,
        p: float | None = None,
    ):
        self.evaluate = evaluate
        self.space = space
        self.kind: ScanKind = kind
        self.name = name
        self.domain = domain or ScanDomain()
        self.rule = rule or DivergenceRule()
        self.far_c = far_c
        self.include_absolute_r = include_absolute_r and far_c is None
        self.include_root = include_root and far_c is None and self.domain.include_root
        self.workers = workers or get_default_workers()
        self.mode = mode
        self.p = p

        self._values: dict[Cell, float] = {}
        self._order: list[Cell] = []
        self._metric: dict[float, float] = {}
        self._skipped = 0

    def _distance(self, t: float) -> float:
        if t not in self._metric:
            self._metric[t] = self.space.metric_from_root(t)
        return self._metric[t]

    def _base(self, t: float) -> float:
        return max(self._distance(t), self.domain.r_floor)

    def _allowed(self, t: float, r: float) -> bool:
        if not (r > 0 and math.isfinite(r)):
            return False
        if self.far_c is not None:
            return r <= self.far_c * self._distance(t) * _FAR_SLACK
        return True

    def _beta_range(self, t: float) -> tuple[float, float]:
        d = self.domain
        base = self._base(t)
        return base * 2.0**d.beta_min_exponent, base * 2.0**d.beta_max_exponent

    def _in_domain(self, t: float, r: float) -> bool:
        """Whether (t, r) is a relative cell with beta in range or, in full mode, an absolute cell
        inside [r_min, r_max].
        """
        d = self.domain
        if t == 0.0:
            if not self.include_root:
                return False
        elif not d.t_min <= t <= d.t_max:
            return False
        lo, hi = self._beta_range(t)
        if lo / _FAR_SLACK <= r <= hi * _FAR_SLACK:
            return True
        return self.include_absolute_r and d.r_min <= r <= d.r_max

    def _axis(self, lo: float, hi: float, limits: tuple[float, float]) -> list[float]:
        """The aligned log grid on [lo, hi], plus whichever ends sit on the domain limits."""
        points = log_grid(lo, hi, self.domain.points_per_decade)
        for edge in (lo, hi):
            if edge in limits and not any(math.isclose(edge, x, rel_tol=1e-9) for x in points):
                points.append(edge)
        return sorted(points)

    def _box_cells(self, t_box: tuple[float, float], r_box: tuple[float, float]) -> list[Cell]:
        d = self.domain
        ts = self._axis(t_box[0], t_box[1], (d.t_min, d.t_max))
        if self.include_root:
            ts = [0.0, *ts]
        betas = [2.0**k for k in range(d.beta_min_exponent, d.beta_max_exponent + 1)]
        rs = self._axis(r_box[0], r_box[1], (d.r_min, d.r_max)) if self.include_absolute_r else []
        cells: list[Cell] = []
        for t in ts:
            base = self._base(t)
            for beta in betas:
                cells.append((t, beta * base))
            cells.extend((t, r) for r in rs)
        return [c for c in cells if self._allowed(*c)]

    def _knot_cells(self) -> list[Cell]:
        """Cells whose center or ball ends sit on the first levels and declared breakpoints.

        Values jump where a ball's center or ends cross a level or a breakpoint, so the supremum
        near the root sits on those vertices or next to them. Each vertex cell also gets its
        neighbours at relative offset `_KNOT_EPS` in t and r.
        """
        space = self.space
        limit = min(float(_KNOT_LEVELS), self.domain.t_max)
        knots = {0.0, *space.lam.breakpoints(0.0, limit), *space.mu.breakpoints(0.0, limit)}
        if space.K > 1 or space.lam.levelwise or space.mu.levelwise:
            knots.update(float(n) for n in range(1, int(limit) + 1))
        ordered = sorted(knots)

        vertices: list[Cell] = []
        for i, a in enumerate(ordered):
            for b in ordered[i + 1 :]:
                gap = self._distance(b) - self._distance(a)
                if not gap > 0:
                    continue
                vertices.extend([(a, gap), (b, gap)])
                try:
                    vertices.append((space.ancestor_at(b, 0.5 * gap), 0.5 * gap))
                except AptreeException as e:
                    logger.debug(f"{self.name}: no midpoint between knots {a} and {b}: {e}")

        cells: list[Cell] = []
        for t, r in vertices:
            cells.extend([(t, r), (t, r * (1.0 - _KNOT_EPS)), (t, r * (1.0 + _KNOT_EPS))])
            try:
                cells.append((space.descendant_at(t, _KNOT_EPS * r), r))
                if t > 0.0:
                    cells.append((space.ancestor_at(t, _KNOT_EPS * r), r))
            except AptreeException as e:
                logger.debug(f"{self.name}: no neighbours for knot cell ({t}, {r}): {e}")
        return [c for c in dict.fromkeys(cells) if self._allowed(*c) and self._in_domain(*c)]

    def _safe_evaluate(self, cell: Cell) -> float | None:
        t, r = cell
        try:
            value = float(self.evaluate(t, r))
        except (AptreeException, ArithmeticError, ValueError) as e:
            logger.debug(f"{self.name}: skipping cell t={t:.6g}, r={r:.6g}: {e}")
            return None
        if math.isnan(value):
            logger.debug(f"{self.name}: skipping cell t={t:.6g}, r={r:.6g}: value is NaN")
            return None
        return value

    def _run_cells(self, cells: Iterable[Cell]) -> int:
        """Evaluates the cells not seen before and returns how many were new."""
        fresh: list[Cell] = []
        seen: set[Cell] = set()
        for cell in cells:
            if cell not in self._values and cell not in seen:
                seen.add(cell)
                fresh.append(cell)
        if not fresh:
            return 0
        if self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                results = list(pool.map(self._safe_evaluate, fresh))
        else:
            results = [self._safe_evaluate(c) for c in fresh]
        for cell, value in zip(fresh, results):
            if value is None:
                self._skipped += 1
                continue
            self._values[cell] = value
            self._order.append(cell)
        return len(fresh)

    def _incumbent(self) -> tuple[float, Cell | None]:
        best, where = -math.inf, None
        for cell in self._order:
            value = self._values[cell]
            if value > best:
                best, where = value, cell
        return best, where

    def _record(
        self,
        steps: list[ScanStep],
        stage: Stage,
        t_box: tuple[float, float],
        r_box: tuple[float, float],
        resolution: float,
        before: set[Cell],
        new_cells: int,
    ) -> None:
        best, where = self._incumbent()
        steps.append(
            ScanStep(
                stage=stage,
                t_box=t_box,
                r_box=r_box if self.include_absolute_r else None,
                resolution=resolution,
                running_sup=best,
                argmax=where,
                new_cells=new_cells,
                argmax_is_new=where is not None and where not in before,
            )
        )
        logger.debug(f"{self.name}: {stage} t={t_box} sup={best:.6g} at {where}")

    def _refinement_cells(self, center: Cell, level: int) -> list[Cell]:
        """Neighbours of the incumbent on a finer grid, clamped to the scan domain."""
        d = self.domain
        t_star, r_star = center
        beta = r_star / self._base(t_star)
        lo, hi = self._beta_range(t_star)
        relative = lo / _FAR_SLACK <= r_star <= hi * _FAR_SLACK
        t_ratio = 10.0 ** (1.0 / (d.points_per_decade * 2**level))
        r_ratio = 2.0 ** (1.0 / 2**level)
        if t_star == 0.0:
            ts = [0.0]
        else:
            ts = [min(max(t_star * t_ratio**j, d.t_min), d.t_max) for j in _REFINE_OFFSETS]
        cells = []
        for t in sorted(set(ts)):
            base = self._base(t)
            if relative:
                r_lo, r_hi = self._beta_range(t)
            else:
                r_lo, r_hi = d.r_min, d.r_max
            for i in _REFINE_OFFSETS:
                cells.append((t, min(max(beta * base * r_ratio**i, r_lo), r_hi)))
        return [c for c in dict.fromkeys(cells) if self._allowed(*c) and self._in_domain(*c)]

    def _boxes(self) -> Iterable[tuple[tuple[float, float], tuple[float, float]]]:
        d = self.domain
        f = d.expansion_factor
        t_box = (max(d.initial_t[0], d.t_min), min(d.initial_t[1], d.t_max))
        r_box = (max(d.initial_r[0], d.r_min), min(d.initial_r[1], d.r_max))
        yield t_box, r_box
        while True:
            t_next = (max(t_box[0] / f, d.t_min), min(t_box[1] * f, d.t_max))
            r_next = (max(r_box[0] / f, d.r_min), min(r_box[1] * f, d.r_max))
            if self.include_absolute_r:
                grown = t_next != t_box or r_next != r_box
            else:
                grown = t_next != t_box
            if not grown:
                return
            t_box, r_box = t_next, r_next
            yield t_box, r_box

    def run(self) -> SupEstimate:
        with scan_span(
            name=self.name, kind=self.kind, mode=self.mode, p=self.p, c=self.far_c
        ) as span:
            result = self._scan()
            span.span_data.estimate = result.estimate
            span.span_data.verdict = result.verdict
            span.span_data.cells = result.cells
            span.span_data.skipped = result.skipped
        return result

    def _scan(self) -> SupEstimate:
        steps: list[ScanStep] = []
        resolution = float(self.domain.points_per_decade)
        t_box = r_box = (0.0, 0.0)
        for i, (t_box, r_box) in enumerate(self._boxes()):
            before = set(self._values)
            cells = self._box_cells(t_box, r_box)
            if i == 0:
                cells += self._knot_cells()
            new = self._run_cells(cells)
            self._record(
                steps, "initial" if i == 0 else "expansion", t_box, r_box, resolution, before, new
            )
            if steps[-1].running_sup == math.inf:
                break

        if steps[-1].running_sup < math.inf:
            for level in range(1, self.domain.refinements + 1):
                _, center = self._incumbent()
                if center is None:
                    break
                before = set(self._values)
                new = self._run_cells(self._refinement_cells(center, level))
                self._record(
                    steps, "refinement", t_box, r_box, resolution * 2**level, before, new
                )

        estimate, argmax = self._incumbent()
        if argmax is None:
            estimate = math.nan
        growth = _growth_factors([s for s in steps if s.stage != "refinement"])
        verdict, reason = decide_verdict(steps, growth, self.rule)
        if self._skipped:
            logger.warning(
                f"{self.name}: skipped {self._skipped} of {self._skipped + len(self._values)} "
                "cells (non-finite or failed evaluations)"
            )
        return SupEstimate(
            name=self.name,
            kind=self.kind,
            estimate=estimate,
            argmax=argmax,
            verdict=verdict,
            reason=reason,
            growth_factors=growth,
            trace=steps,
            samples=[CellValue(t, r, self._values[(t, r)]) for t, r in self._order],
            cells=len(self._values) + self._skipped,
            skipped=self._skipped,
            mode=self.mode,
        )


def _growth_factors(steps: Sequence[ScanStep]) -> list[float]:
    out = []
    for prev, cur in zip(steps[:-1], steps[1:]):
        a, b = prev.running_sup, cur.running_sup
        if a > 0 and math.isfinite(a):
            out.append(b / a)
        else:
            out.append(math.nan)
    return out


def decide_verdict(
    steps: Sequence[ScanStep], growth: Sequence[float], rule: DivergenceRule
) -> tuple[ScanVerdict, str]:
    """Applies the divergence heuristic to a scan trace."""
    if not steps or steps[-1].argmax is None:
        return "inconclusive", "no cell could be evaluated"
    final = steps[-1].running_sup
    if final == math.inf:
        return "diverging", f"infinite value at {steps[-1].argmax}"

    expansions = [s for s in steps if s.stage != "refinement"]
    window = rule.expansions
    if len(growth) >= window:
        recent = list(growth[-window:])
        if all(g >= rule.growth_factor for g in recent):
            return "diverging", (
                f"running sup grew by at least {rule.growth_factor}x over each of the last "
                f"{window} expansions"
            )
        sups = [s.running_sup for s in expansions[-window - 1 :]]
        increments = [b - a for a, b in zip(sups[:-1], sups[1:])]
        persistent = all(
            cur >= rule.persistence * prev for prev, cur in zip(increments[:-1], increments[1:])
        )
        in_new_shell = all(s.argmax_is_new for s in expansions[-window:])
        if all(g >= rule.drift_factor for g in recent) and in_new_shell and persistent:
            return "diverging", (
                f"running sup drifted upward by at least {rule.drift_factor}x per expansion over "
                f"the last {window} expansions, with the argmax in the new shell each time"
            )

    last_growth = growth[-1] if growth else 1.0
    if not last_growth < rule.drift_factor:
        return "inconclusive", f"last expansion still grew the sup by {last_growth:.4g}x"

    refinements = [s for s in steps if s.stage == "refinement"]
    if refinements:
        reference = steps[-len(refinements[-2:]) - 1].running_sup
        change = (final - reference) / final if final > 0 else 0.0
        if change >= rule.bounded_tolerance:
            return "inconclusive", f"refinement still moved the sup by {change:.3%}"
    return "bounded", "sup stable under expansion and refinement"
