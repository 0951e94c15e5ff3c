"""The JSON run document read by the command-line interface.

Sections mirror the numerical settings objects field by field. Every field of an override
section is optional; non-null values are laid over the defaults.
"""

from __future__ import annotations

import dataclasses
import json
import math
from pathlib import Path
from typing import Annotated, Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .catalog import get_entry
from .exceptions import UserError
from .geometry import TreeSpace
from .settings import DivergenceRule, ScanDomain, Tolerance
from .weights import (
    ConstantWeight,
    ExponentialWeight,
    PiecewiseWeight,
    PowerWeight,
    StepWeight,
    TabulatedWeight,
    TruncatedReciprocalWeight,
    WeightFunction,
)


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ConstantWeightConfig(_Section):
    family: Literal["constant"] = "constant"
    value: float = Field(default=1.0, gt=0, description="The constant value")

    def build(self) -> WeightFunction:
        return ConstantWeight(self.value)


class PowerWeightConfig(_Section):
    family: Literal["power"] = "power"
    alpha: float = Field(description="Exponent of (shift + s)")
    shift: float = Field(default=0.0, ge=0, description="Added to s before taking the power")
    scale: float = Field(default=1.0, gt=0)

    def build(self) -> WeightFunction:
        return PowerWeight(self.alpha, shift=self.shift, scale=self.scale)


class ExponentialWeightConfig(_Section):
    family: Literal["exponential"] = "exponential"
    base: float = Field(default=math.e, gt=0)
    rate: float = Field(default=1.0, description="The weight is scale * base**(rate * s)")
    scale: float = Field(default=1.0, gt=0)

    def build(self) -> WeightFunction:
        return ExponentialWeight(base=self.base, rate=self.rate, scale=self.scale)


class TruncatedReciprocalWeightConfig(_Section):
    family: Literal["truncated-reciprocal"] = "truncated-reciprocal"
    cutoff: float = Field(default=1.0, gt=0, description="The weight is min{1, cutoff / s}")

    def build(self) -> WeightFunction:
        return TruncatedReciprocalWeight(self.cutoff)


class StepWeightConfig(_Section):
    family: Literal["step"] = "step"
    values: list[float] = Field(min_length=1, description="Value on each level (n, n+1]")
    tail: Literal["constant", "geometric"] = "constant"
    ratio: Optional[float] = Field(default=None, description="Per-level factor past the table")

    def build(self) -> WeightFunction:
        return StepWeight(self.values, tail=self.tail, ratio=self.ratio)


class TabulatedWeightConfig(_Section):
    family: Literal["tabulated"] = "tabulated"
    knots: list[float] = Field(min_length=1)
    values: list[float] = Field(min_length=1)
    interpolation: Literal["constant", "linear"] = "linear"
    tail: Literal["constant", "geometric"] = "constant"
    ratio: Optional[float] = Field(default=None, description="Per-unit factor past the last knot")

    def build(self) -> WeightFunction:
        return TabulatedWeight(
            self.knots,
            self.values,
            interpolation=self.interpolation,
            tail=self.tail,
            ratio=self.ratio,
        )


class PiecewiseWeightConfig(_Section):
    family: Literal["piecewise"] = "piecewise"
    pieces: list[WeightConfig] = Field(min_length=1)
    breakpoints: list[float] = Field(default_factory=list)

    def build(self) -> WeightFunction:
        return PiecewiseWeight([piece.build() for piece in self.pieces], self.breakpoints)


WeightConfig = Annotated[
    Union[
        ConstantWeightConfig,
        PowerWeightConfig,
        ExponentialWeightConfig,
        TruncatedReciprocalWeightConfig,
        StepWeightConfig,
        TabulatedWeightConfig,
        PiecewiseWeightConfig,
    ],
    Field(discriminator="family"),
]

PiecewiseWeightConfig.model_rebuild()


class TreeConfig(_Section):
    """Either a catalog entry or an explicit (K, λ, μ) triple."""

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    catalog: Optional[str] = Field(default=None, description="Name of a built-in entry")
    K: Optional[int] = Field(default=None, ge=1, description="Branching number")
    lam: Optional[WeightConfig] = Field(default=None, alias="lambda")
    mu: Optional[WeightConfig] = None

    @model_validator(mode="after")
    def _one_source(self) -> TreeConfig:
        explicit = (self.K, self.lam, self.mu)
        if self.catalog is not None:
            if any(x is not None for x in explicit):
                raise ValueError("Give either `catalog` or `K`/`lambda`/`mu`, not both")
        elif any(x is None for x in explicit):
            raise ValueError("An explicit tree needs `K`, `lambda` and `mu`")
        return self

    def build(self, tol: Tolerance | None = None) -> TreeSpace:
        if self.catalog is not None:
            return get_entry(self.catalog).build_space(tol)
        assert self.K is not None and self.lam is not None and self.mu is not None
        return TreeSpace(self.K, self.lam.build(), self.mu.build(), tol=tol)


def _overlay(section: _Section, base: Any) -> Any:
    """Copies the non-null fields of `section` onto the dataclass `base`."""
    changes = {k: v for k, v in section.model_dump().items() if v is not None}
    try:
        return dataclasses.replace(base, **changes)
    except TypeError as e:
        raise UserError(f"Cannot apply {changes}: {e}") from e


class ScanDomainConfig(_Section):
    t_min: Optional[float] = Field(default=None, gt=0)
    t_max: Optional[float] = Field(default=None, gt=0)
    r_min: Optional[float] = Field(default=None, gt=0)
    r_max: Optional[float] = Field(default=None, gt=0)
    r_floor: Optional[float] = Field(default=None, gt=0)
    beta_min_exponent: Optional[int] = None
    beta_max_exponent: Optional[int] = None
    points_per_decade: Optional[int] = Field(default=None, ge=1)
    initial_t: Optional[tuple[float, float]] = None
    initial_r: Optional[tuple[float, float]] = None
    expansion_factor: Optional[float] = Field(default=None, gt=1)
    refinements: Optional[int] = Field(default=None, ge=0)
    include_root: Optional[bool] = None

    def resolve(self, base: ScanDomain | None = None) -> ScanDomain:
        result: ScanDomain = _overlay(self, base or ScanDomain())
        return result


class ToleranceConfig(_Section):
    rel: Optional[float] = Field(default=None, gt=0)
    abs: Optional[float] = Field(default=None, gt=0)
    grid: Optional[int] = Field(default=None, ge=2)
    max_subdivisions: Optional[int] = Field(default=None, ge=1)
    max_levels: Optional[int] = Field(default=None, ge=1)
    max_pieces: Optional[int] = Field(default=None, ge=1)
    max_side_vertices: Optional[int] = Field(default=None, ge=0)
    max_certificate_levels: Optional[int] = Field(default=None, ge=1)
    solver_xtol: Optional[float] = Field(default=None, gt=0)
    quad_acceptance: Optional[float] = Field(default=None, gt=0)

    def resolve(self, base: Tolerance | None = None) -> Tolerance:
        result: Tolerance = _overlay(self, base or Tolerance())
        return result


class DivergenceConfig(_Section):
    growth_factor: Optional[float] = Field(default=None, gt=1)
    expansions: Optional[int] = Field(default=None, ge=1)
    drift_factor: Optional[float] = Field(default=None, gt=1)
    persistence: Optional[float] = Field(default=None, gt=0, le=1)
    bounded_tolerance: Optional[float] = Field(default=None, gt=0)

    def resolve(self, base: DivergenceRule | None = None) -> DivergenceRule:
        result: DivergenceRule = _overlay(self, base or DivergenceRule())
        return result


class OutputConfig(_Section):
    report: Optional[Path] = Field(default=None, description="Where `analyze` writes its JSON")
    grid: Optional[Path] = Field(default=None, description="Where `scan` writes its CSV")
    trace: Optional[Path] = Field(default=None, description="JSONL file receiving spans")


class RunConfig(_Section):
    """One analysis run."""

    tree: TreeConfig
    p: float = Field(default=2.0, ge=1, description="The exponent; 1 selects the A1 functional")
    mode: Literal["auto", "full", "far"] = Field(
        default="auto", description="`auto` picks far-from-root for K = 1 and full otherwise"
    )
    c: Optional[float] = Field(default=None, gt=0, description="Far-from-root constant")
    scan: ScanDomainConfig = Field(default_factory=ScanDomainConfig)
    tolerance: ToleranceConfig = Field(default_factory=ToleranceConfig)
    divergence: DivergenceConfig = Field(default_factory=DivergenceConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    seed: int = Field(default=0, ge=0, description="Seed for the sampled certificates")
    certificate_sample: int = Field(default=32, ge=0)
    workers: Optional[int] = Field(default=None, ge=1)
    doubling_constant: Optional[float] = Field(default=None, gt=0)
    poincare_constant: Optional[float] = Field(default=None, gt=0)

    def resolved_mode(self, K: int) -> Literal["full", "far"]:
        if self.mode == "auto":
            return "far" if K == 1 else "full"
        return self.mode


def load_config(path: str | Path) -> RunConfig:
    """Reads and validates a run document. Raises `pydantic.ValidationError` when malformed."""
    text = Path(path).read_text(encoding="utf-8")
    return RunConfig.model_validate(json.loads(text))
