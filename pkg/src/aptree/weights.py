"""Radial weight functions.

A weight is a positive function of the radial coordinate. Besides point evaluation every weight
declares its non-smooth abscissae and, on each smooth piece, a `LocalForm`: a closed-form
description of the form `c * (sign * (s + shift))**alpha * exp(rate * (s - anchor))`. Products and
powers of local forms stay local forms whenever their power parts share a base, which is what lets
the quadrature layer integrate and extremize the Ap integrands exactly for every built-in family.
"""

from __future__ import annotations

import abc
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any, Literal, Union

import numpy as np
import numpy.typing as npt

from .exceptions import DomainError, UserError

FloatArray = npt.NDArray[np.float64]
ArrayLike = Union[float, Sequence[float], FloatArray]

WeightKind = Literal["analytic-family", "step-per-level", "tabulated"]

_PROBE_GRID = np.geomspace(1e-6, 1e6, 241)


def log_expm1_abs(y: ArrayLike) -> FloatArray:
    """Returns log|exp(y) - 1| without overflow for large |y|."""
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        positive = y + np.log(-np.expm1(-np.abs(y)))
        negative = np.log(-np.expm1(np.minimum(y, 0.0)))
    return np.where(y > 0, positive, negative)


@dataclass(frozen=True)
class LocalForm:
    """`exp(log_coef) * (sign * (s + shift))**alpha * exp(rate * (s - anchor))` on a batch of
    pieces. `log_coef` and `anchor` hold one entry per piece; the other parameters are shared.
    """

    log_coef: FloatArray
    anchor: FloatArray
    alpha: float = 0.0
    shift: float = 0.0
    sign: float = 1.0
    rate: float = 0.0

    @classmethod
    def constant(cls, lo: FloatArray, log_value: ArrayLike = 0.0) -> LocalForm:
        log_coef = np.broadcast_to(np.asarray(log_value, dtype=float), lo.shape).astype(float)
        return cls(log_coef=log_coef, anchor=lo)

    @property
    def has_closed_form(self) -> bool:
        """Power and exponential parts never mix in a closed-form piece."""
        return self.alpha == 0.0 or self.rate == 0.0

    @property
    def is_constant(self) -> bool:
        return self.alpha == 0.0 and self.rate == 0.0

    def __mul__(self, other: LocalForm) -> LocalForm | None:
        if self.alpha != 0.0 and other.alpha != 0.0:
            if self.shift != other.shift or self.sign != other.sign:
                return None
        if self.alpha != 0.0:
            shift, sign = self.shift, self.sign
        else:
            shift, sign = other.shift, other.sign
        log_coef = self.log_coef + other.log_coef + other.rate * (self.anchor - other.anchor)
        return LocalForm(
            log_coef=log_coef,
            anchor=self.anchor,
            alpha=self.alpha + other.alpha,
            shift=shift,
            sign=sign,
            rate=self.rate + other.rate,
        )

    def __pow__(self, exponent: float) -> LocalForm:
        return LocalForm(
            log_coef=self.log_coef * exponent,
            anchor=self.anchor,
            alpha=self.alpha * exponent,
            shift=self.shift,
            sign=self.sign,
            rate=self.rate * exponent,
        )

    def scaled(self, log_factor: ArrayLike) -> LocalForm:
        return LocalForm(
            log_coef=self.log_coef + np.asarray(log_factor, dtype=float),
            anchor=self.anchor,
            alpha=self.alpha,
            shift=self.shift,
            sign=self.sign,
            rate=self.rate,
        )

    def log_values(self, s: FloatArray) -> FloatArray:
        out = self.log_coef + self.rate * (s - self.anchor)
        if self.alpha != 0.0:
            with np.errstate(divide="ignore", invalid="ignore"):
                out = out + self.alpha * np.log(self.sign * (s + self.shift))
        return out

    def reflected(self, at: float) -> LocalForm:
        """The form of s -> f(2 * at - s), which turns integrals ending at `at` into integrals
        starting there.
        """
        return LocalForm(
            log_coef=self.log_coef,
            anchor=2.0 * at - self.anchor,
            alpha=self.alpha,
            shift=-2.0 * at - self.shift,
            sign=-self.sign,
            rate=-self.rate,
        )

    def log_integral(self, lo: FloatArray, hi: FloatArray) -> FloatArray:
        """Log of the integral over each [lo, hi]. `+inf` marks a non-integrable endpoint."""
        return self.log_integral_span(lo, hi - lo)

    def log_integral_span(self, lo: FloatArray, length: FloatArray) -> FloatArray:
        """Log of the integral over each [lo, lo + length], with `length` kept apart from `lo` so
        that spans below the resolution of `lo` keep their digits.
        """
        if not self.has_closed_form:
            raise ValueError("LocalForm mixes power and exponential parts")

        base = self.log_coef + self.rate * (lo - self.anchor)
        if self.alpha == 0.0:
            with np.errstate(divide="ignore"):
                if self.rate == 0.0:
                    return base + np.log(length)
                return base + log_expm1_abs(self.rate * length) - math.log(abs(self.rate))

        exponent = self.alpha + 1.0
        b_lo = self.sign * (lo + self.shift)
        b_hi = b_lo + self.sign * length
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            log_ratio = np.log1p(self.sign * length / b_lo)
            if exponent == 0.0:
                tail = np.log(np.abs(log_ratio))
            else:
                tail = (
                    exponent * np.log(b_lo)
                    + log_expm1_abs(exponent * log_ratio)
                    - math.log(abs(exponent))
                )
            at_zero = b_lo <= 0.0
            if np.any(at_zero):
                if exponent > 0.0:
                    from_zero = exponent * np.log(b_hi) - math.log(exponent)
                else:
                    from_zero = np.full_like(b_hi, np.inf)
                tail = np.where(at_zero, from_zero, tail)
        return base + tail

    def solve(self, log_level: float) -> FloatArray | None:
        """Abscissae where the form equals `exp(log_level)`, per piece. `None` for constants and
        mixed forms.
        """
        if self.is_constant or not self.has_closed_form:
            return None
        with np.errstate(over="ignore", invalid="ignore"):
            if self.alpha == 0.0:
                return self.anchor + (log_level - self.log_coef) / self.rate
            return self.sign * np.exp((log_level - self.log_coef) / self.alpha) - self.shift

    def inverse_integral(self, lo: float, target: float) -> float | None:
        """The s > lo with integral over [lo, s] equal to `target`, for a single-piece form."""
        offset = self.integral_offset(lo, target)
        return None if offset is None else lo + offset

    def integral_offset(self, lo: float, target: float) -> float | None:
        """`s - lo` for the s of `inverse_integral`, computed without forming s."""
        if not self.has_closed_form:
            return None
        log_c = float(self.log_coef[0]) + self.rate * (lo - float(self.anchor[0]))
        if target <= 0.0:
            return 0.0
        log_scaled = math.log(target) - log_c
        try:
            scaled = math.exp(log_scaled)
        except OverflowError:
            return None
        if self.alpha == 0.0:
            if self.rate == 0.0:
                return scaled
            arg = self.rate * scaled
            if arg <= -1.0:
                return None
            return math.log1p(arg) / self.rate

        b_lo = self.sign * (lo + self.shift)
        exponent = self.alpha + 1.0
        if exponent == 0.0:
            if b_lo <= 0.0:
                return None
            try:
                return self.sign * b_lo * math.expm1(self.sign * scaled)
            except OverflowError:
                return None
        if b_lo <= 0.0:
            if exponent < 0.0:
                return None
            inner = max(b_lo, 0.0) ** exponent + self.sign * exponent * scaled
            if inner <= 0.0:
                return None
            return self.sign * (inner ** (1.0 / exponent) - b_lo)
        try:
            arg = self.sign * exponent * math.exp(log_scaled - exponent * math.log(b_lo))
            if arg <= -1.0:
                return None
            return self.sign * b_lo * math.expm1(math.log1p(arg) / exponent)
        except OverflowError:
            return None


class WeightFunction(abc.ABC):
    """A radial weight t -> w(t) > 0 on [0, inf).

    Subclasses describe their structure through `breakpoints`, `local_form` and, for weights that
    are constant on every level (n, n+1], `level_tail`. Instances are immutable.
    """

    kind: WeightKind = "analytic-family"

    levelwise: bool = False
    """True when the weight jumps at integer abscissae. Integers are then breakpoints without
    being listed by `breakpoints`.
    """

    def __call__(self, t: ArrayLike) -> Any:
        arr = np.asarray(t, dtype=float)
        if np.any(arr < 0):
            raise DomainError(f"Radial coordinate must be non-negative, got {np.min(arr)}")
        out = self._values(arr)
        return float(out) if out.ndim == 0 else out

    def log_values(self, t: ArrayLike) -> FloatArray:
        arr = np.asarray(t, dtype=float)
        if np.any(arr < 0):
            raise DomainError(f"Radial coordinate must be non-negative, got {np.min(arr)}")
        return self._log_values(arr)

    def _values(self, t: FloatArray) -> FloatArray:
        """Point values. Table-driven families override this to return their entries exactly."""
        with np.errstate(over="ignore", under="ignore"):
            return np.exp(self._log_values(t))

    @abc.abstractmethod
    def _log_values(self, t: FloatArray) -> FloatArray:
        pass

    def breakpoints(self, a: float, b: float) -> list[float]:
        """Declared non-smooth abscissae strictly inside (a, b), sorted."""
        return []

    @abc.abstractmethod
    def local_form(self, lo: FloatArray, hi: FloatArray) -> LocalForm | None:
        """The closed form on each piece [lo_i, hi_i].

        All pieces must lie between the same two consecutive breakpoints and, for levelwise
        weights, each piece must lie inside a single level.
        """
        pass

    def level_tail(self) -> tuple[int, float, float] | None:
        """`(n0, log_w, log_ratio)` when w equals `exp(log_w + (n - n0) * log_ratio)` on every
        level (n, n+1] with n >= n0. `None` when the weight is not constant on levels.
        """
        return None

    @property
    @abc.abstractmethod
    def diverges_at_infinity(self) -> bool:
        """Tail certificate: the integral of w over [0, inf) is infinite."""
        pass

    @abc.abstractmethod
    def describe(self) -> dict[str, Any]:
        pass

    def validate(self) -> None:
        """Checks strict positivity on a probe grid and at every declared breakpoint."""
        probes = np.concatenate([_PROBE_GRID, np.asarray(self.breakpoints(0.0, 1e6), dtype=float)])
        log_w = self.log_values(probes)
        bad = np.isnan(log_w) | np.isneginf(log_w)
        if np.any(bad):
            where = float(probes[np.argmax(bad)])
            raise UserError(f"Weight {self.describe()} is not strictly positive at t={where}")

    def __repr__(self) -> str:
        params = ", ".join(f"{k}={v!r}" for k, v in self.describe().items() if k != "family")
        return f"{type(self).__name__}({params})"


def evaluate(weight: WeightFunction, t: float) -> float:
    """Point evaluation with the right-closed convention: a step weight equals w_n on (n, n+1]."""
    if t < 0:
        raise DomainError(f"Radial coordinate must be non-negative, got {t}")
    return float(weight(t))


class ConstantWeight(WeightFunction):
    def __init__(self, value: float = 1.0):
        if not value > 0 or not math.isfinite(value):
            raise UserError(f"Constant weight must be positive and finite, got {value}")
        self.value = float(value)
        self._log_value = math.log(self.value)

    def _values(self, t: FloatArray) -> FloatArray:
        return np.full_like(t, self.value)

    def _log_values(self, t: FloatArray) -> FloatArray:
        return np.full_like(t, self._log_value)

    def local_form(self, lo: FloatArray, hi: FloatArray) -> LocalForm | None:
        return LocalForm.constant(lo, self._log_value)

    def level_tail(self) -> tuple[int, float, float] | None:
        return 0, self._log_value, 0.0

    @property
    def diverges_at_infinity(self) -> bool:
        return True

    def describe(self) -> dict[str, Any]:
        return {"family": "constant", "value": self.value}


class PowerWeight(WeightFunction):
    """`scale * (shift + t)**alpha`. A zero shift gives the pure power t**alpha, which is only
    locally integrable for alpha > -1.
    """

    def __init__(self, alpha: float, shift: float = 1.0, scale: float = 1.0):
        if shift < 0:
            raise UserError(f"Power weight shift must be non-negative, got {shift}")
        if shift == 0 and alpha <= -1:
            raise UserError(f"t**{alpha} is not locally integrable at 0 (needs alpha > -1)")
        if not scale > 0:
            raise UserError(f"Power weight scale must be positive, got {scale}")
        self.alpha = float(alpha)
        self.shift = float(shift)
        self.scale = float(scale)

    def _log_values(self, t: FloatArray) -> FloatArray:
        with np.errstate(divide="ignore"):
            log_base = np.log(t + self.shift)
        if self.alpha == 0.0:
            return np.full_like(t, math.log(self.scale))
        return math.log(self.scale) + self.alpha * log_base

    def local_form(self, lo: FloatArray, hi: FloatArray) -> LocalForm | None:
        form = LocalForm.constant(lo, math.log(self.scale))
        if self.alpha == 0.0:
            return form
        return LocalForm(
            log_coef=form.log_coef, anchor=lo, alpha=self.alpha, shift=self.shift, sign=1.0
        )

    @property
    def diverges_at_infinity(self) -> bool:
        return self.alpha >= -1

    def describe(self) -> dict[str, Any]:
        return {"family": "power", "alpha": self.alpha, "shift": self.shift, "scale": self.scale}


class ExponentialWeight(WeightFunction):
    """`scale * base**(rate * t)`."""

    def __init__(self, base: float = math.e, rate: float = 1.0, scale: float = 1.0):
        if not base > 0:
            raise UserError(f"Exponential weight base must be positive, got {base}")
        if not scale > 0:
            raise UserError(f"Exponential weight scale must be positive, got {scale}")
        self.base = float(base)
        self.rate = float(rate)
        self.scale = float(scale)
        self._kappa = self.rate * math.log(self.base)

    def _log_values(self, t: FloatArray) -> FloatArray:
        return math.log(self.scale) + self._kappa * t

    def local_form(self, lo: FloatArray, hi: FloatArray) -> LocalForm | None:
        return LocalForm(
            log_coef=math.log(self.scale) + self._kappa * lo, anchor=lo, rate=self._kappa
        )

    @property
    def diverges_at_infinity(self) -> bool:
        return self._kappa >= 0

    def describe(self) -> dict[str, Any]:
        return {"family": "exponential", "base": self.base, "rate": self.rate, "scale": self.scale}


class TruncatedReciprocalWeight(WeightFunction):
    """`min{1, cutoff / t}`."""

    def __init__(self, cutoff: float = 1.0):
        if not cutoff > 0:
            raise UserError(f"Truncation cutoff must be positive, got {cutoff}")
        self.cutoff = float(cutoff)

    def _log_values(self, t: FloatArray) -> FloatArray:
        with np.errstate(divide="ignore"):
            return np.minimum(0.0, math.log(self.cutoff) - np.log(t))

    def breakpoints(self, a: float, b: float) -> list[float]:
        return [self.cutoff] if a < self.cutoff < b else []

    def local_form(self, lo: FloatArray, hi: FloatArray) -> LocalForm | None:
        mid = 0.5 * (float(lo[0]) + float(hi[-1]))
        if mid <= self.cutoff:
            return LocalForm.constant(lo)
        return LocalForm(
            log_coef=np.full_like(lo, math.log(self.cutoff)), anchor=lo, alpha=-1.0, shift=0.0
        )

    @property
    def diverges_at_infinity(self) -> bool:
        return True

    def describe(self) -> dict[str, Any]:
        return {"family": "truncated-reciprocal", "cutoff": self.cutoff}


class PiecewiseWeight(WeightFunction):
    """Weight equal to `pieces[i]` on (breakpoints[i-1], breakpoints[i]]."""

    def __init__(self, pieces: Sequence[WeightFunction], breakpoints: Sequence[float]):
        if len(pieces) != len(breakpoints) + 1:
            raise UserError("A piecewise weight needs exactly one more piece than breakpoints")
        bps = np.asarray(breakpoints, dtype=float)
        if np.any(bps <= 0) or np.any(np.diff(bps) <= 0):
            raise UserError("Piecewise breakpoints must be positive and strictly increasing")
        self.pieces = tuple(pieces)
        self._bps = bps
        self.levelwise = any(p.levelwise for p in self.pieces)

    def _piece_index(self, t: FloatArray) -> npt.NDArray[np.intp]:
        return np.searchsorted(self._bps, t, side="left")

    def _dispatch(self, t: FloatArray, log: bool) -> FloatArray:
        idx = self._piece_index(t)
        out = np.empty_like(t)
        for i, piece in enumerate(self.pieces):
            mask = idx == i
            if np.any(mask):
                out[mask] = piece._log_values(t[mask]) if log else piece._values(t[mask])
        return out

    def _values(self, t: FloatArray) -> FloatArray:
        return self._dispatch(t, log=False)

    def _log_values(self, t: FloatArray) -> FloatArray:
        return self._dispatch(t, log=True)

    def _ranges(self) -> list[tuple[float, float]]:
        edges = [0.0, *self._bps.tolist(), math.inf]
        return list(zip(edges[:-1], edges[1:]))

    def breakpoints(self, a: float, b: float) -> list[float]:
        points = [float(x) for x in self._bps if a < x < b]
        for piece, (lo, hi) in zip(self.pieces, self._ranges()):
            points.extend(piece.breakpoints(max(a, lo), min(b, hi)))
        return sorted(set(points))

    def local_form(self, lo: FloatArray, hi: FloatArray) -> LocalForm | None:
        mid = 0.5 * (float(lo[0]) + float(hi[-1]))
        piece = self.pieces[int(np.searchsorted(self._bps, mid, side="left"))]
        return piece.local_form(lo, hi)

    def level_tail(self) -> tuple[int, float, float] | None:
        tail = self.pieces[-1].level_tail()
        if tail is None:
            return None
        n0, log_w, log_ratio = tail
        start = max(n0, math.ceil(float(self._bps[-1])))
        return start, log_w + (start - n0) * log_ratio, log_ratio

    @property
    def diverges_at_infinity(self) -> bool:
        return self.pieces[-1].diverges_at_infinity

    def describe(self) -> dict[str, Any]:
        return {
            "family": "piecewise",
            "pieces": [p.describe() for p in self.pieces],
            "breakpoints": self._bps.tolist(),
        }


TailRule = Literal["constant", "geometric"]


def _check_tail(tail: TailRule, ratio: float | None) -> float:
    if tail == "constant":
        return 1.0
    if tail == "geometric":
        if ratio is None or not ratio > 0:
            raise UserError("A geometric tail needs a positive ratio")
        return float(ratio)
    raise UserError(f"Unknown tail rule {tail!r}")


class StepWeight(WeightFunction):
    """`w(t) = values[n]` on (n, n+1], with `w(0) = values[0]`. Levels past the table follow the
    tail rule: the last value repeated, or multiplied by `ratio` per level.
    """

    kind: WeightKind = "step-per-level"
    levelwise = True

    def __init__(
        self, values: Sequence[float], tail: TailRule = "constant", ratio: float | None = None
    ):
        vals = np.asarray(values, dtype=float)
        if vals.size == 0 or np.any(~(vals > 0)) or not np.all(np.isfinite(vals)):
            raise UserError("Step values must be a non-empty sequence of positive numbers")
        self.values = tuple(vals.tolist())
        self.tail: TailRule = tail
        self.ratio = _check_tail(tail, ratio)
        self._log_table = np.log(vals)
        self._log_ratio = math.log(self.ratio)

    def _log_level(self, level: npt.NDArray[np.int64]) -> FloatArray:
        last = len(self.values) - 1
        inside = np.clip(level, 0, last)
        out = self._log_table[inside].astype(float)
        beyond = level > last
        if np.any(beyond):
            out = np.where(beyond, out + (level - last) * self._log_ratio, out)
        return out

    def _levels(self, t: FloatArray) -> npt.NDArray[np.int64]:
        return np.maximum(np.ceil(t) - 1, 0).astype(np.int64)

    def _values(self, t: FloatArray) -> FloatArray:
        level = self._levels(t)
        last = len(self.values) - 1
        table = np.asarray(self.values, dtype=float)
        out = table[np.clip(level, 0, last)]
        beyond = level > last
        if np.any(beyond):
            out = np.where(beyond, out * self.ratio ** (level - last).astype(float), out)
        return out

    def _log_values(self, t: FloatArray) -> FloatArray:
        return self._log_level(self._levels(t))

    def local_form(self, lo: FloatArray, hi: FloatArray) -> LocalForm | None:
        level = (np.ceil(0.5 * (lo + hi)) - 1).astype(np.int64)
        return LocalForm.constant(lo, self._log_level(np.maximum(level, 0)))

    def level_tail(self) -> tuple[int, float, float] | None:
        last = len(self.values) - 1
        return last, float(self._log_table[-1]), self._log_ratio

    @property
    def diverges_at_infinity(self) -> bool:
        return self.ratio >= 1.0

    def describe(self) -> dict[str, Any]:
        out: dict[str, Any] = {"family": "step", "values": list(self.values), "tail": self.tail}
        if self.tail == "geometric":
            out["ratio"] = self.ratio
        return out


class TabulatedWeight(WeightFunction):
    """Weight interpolated from (knot, value) pairs.

    Piecewise-constant tables take `values[i]` on (knots[i], knots[i+1]]; piecewise-linear tables
    interpolate. Below the first knot the first value applies. Past the last knot the tail rule
    applies, with a geometric tail growing by `ratio` per unit of t.
    """

    kind: WeightKind = "tabulated"

    def __init__(
        self,
        knots: Sequence[float],
        values: Sequence[float],
        interpolation: Literal["constant", "linear"] = "linear",
        tail: TailRule = "constant",
        ratio: float | None = None,
    ):
        k = np.asarray(knots, dtype=float)
        v = np.asarray(values, dtype=float)
        if k.size == 0 or k.shape != v.shape:
            raise UserError("Tabulated weights need matching, non-empty knot and value lists")
        if np.any(k < 0) or np.any(np.diff(k) <= 0):
            raise UserError("Knots must be non-negative and strictly increasing")
        if np.any(~(v > 0)) or not np.all(np.isfinite(v)):
            raise UserError("Tabulated values must be positive and finite")
        if interpolation not in ("constant", "linear"):
            raise UserError(f"Unknown interpolation rule {interpolation!r}")
        self.knots = k
        self.values = v
        self.interpolation = interpolation
        self.tail: TailRule = tail
        self.ratio = _check_tail(tail, ratio)
        self._log_ratio = math.log(self.ratio)

    def _values(self, t: FloatArray) -> FloatArray:
        k, v = self.knots, self.values
        if self.interpolation == "linear":
            inside = np.interp(t, k, v)
        else:
            inside = v[np.clip(np.searchsorted(k, t, side="left") - 1, 0, len(v) - 1)]
        with np.errstate(over="ignore"):
            tail = v[-1] * self.ratio ** np.maximum(t - k[-1], 0.0)
        return np.where(t > k[-1], tail, inside)

    def _log_values(self, t: FloatArray) -> FloatArray:
        k, v = self.knots, self.values
        if self.interpolation == "linear":
            inside = np.log(np.interp(t, k, v))
        else:
            idx = np.clip(np.searchsorted(k, t, side="left") - 1, 0, len(v) - 1)
            inside = np.log(v[idx])
        beyond = t > k[-1]
        tail = math.log(v[-1]) + (t - k[-1]) * self._log_ratio
        return np.where(beyond, tail, inside)

    def breakpoints(self, a: float, b: float) -> list[float]:
        return [float(x) for x in self.knots if a < x < b]

    def local_form(self, lo: FloatArray, hi: FloatArray) -> LocalForm | None:
        k, v = self.knots, self.values
        mid = 0.5 * (float(lo[0]) + float(hi[-1]))
        if mid > k[-1]:
            if self._log_ratio == 0.0:
                return LocalForm.constant(lo, math.log(v[-1]))
            return LocalForm(
                log_coef=math.log(v[-1]) + (lo - k[-1]) * self._log_ratio,
                anchor=lo,
                rate=self._log_ratio,
            )
        if mid < k[0]:
            return LocalForm.constant(lo, math.log(v[0]))
        i = int(np.searchsorted(k, mid, side="left")) - 1
        if self.interpolation == "constant":
            return LocalForm.constant(lo, math.log(v[max(i, 0)]))
        slope = (v[i + 1] - v[i]) / (k[i + 1] - k[i])
        if slope == 0.0:
            return LocalForm.constant(lo, math.log(v[i]))
        return LocalForm(
            log_coef=np.full_like(lo, math.log(abs(slope))),
            anchor=lo,
            alpha=1.0,
            shift=float(v[i] / slope - k[i]),
            sign=1.0 if slope > 0 else -1.0,
        )

    @property
    def diverges_at_infinity(self) -> bool:
        return self.ratio >= 1.0

    def describe(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "family": "tabulated",
            "knots": self.knots.tolist(),
            "values": self.values.tolist(),
            "interpolation": self.interpolation,
            "tail": self.tail,
        }
        if self.tail == "geometric":
            out["ratio"] = self.ratio
        return out
