"""Built-in weight pairs with their provenance."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

from .exceptions import UserError
from .geometry import TreeSpace
from .settings import Tolerance
from .weights import (
    ConstantWeight,
    ExponentialWeight,
    PowerWeight,
    StepWeight,
    TabulatedWeight,
    TruncatedReciprocalWeight,
    WeightFunction,
)


@dataclass(frozen=True)
class CatalogEntry:
    """A named tree: branching number, metric density and measure density."""

    name: str
    description: str
    K: int
    lam: WeightFunction
    mu: WeightFunction

    provenance: str = "built-in"
    """Where the pair comes from, e.g. the worked example it reproduces."""

    tags: tuple[str, ...] = field(default_factory=tuple)

    def build_space(self, tol: Tolerance | None = None) -> TreeSpace:
        return TreeSpace(self.K, self.lam, self.mu, tol=tol)

    def describe(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "description": self.description,
            "provenance": self.provenance,
            "K": self.K,
            "lambda": self.lam.describe(),
            "mu": self.mu.describe(),
            "tags": list(self.tags),
        }


_ONE = ConstantWeight(1.0)


def power_family(alpha: float, K: int = 1, shift: float = 0.0) -> CatalogEntry:
    """The power(α) template: λ ≡ 1 and μ(s) = (shift + s)**α."""
    return CatalogEntry(
        name=f"power({alpha:g})",
        description=f"λ ≡ 1, μ(s) = (s + {shift:g})^{alpha:g}",
        K=K,
        lam=_ONE,
        mu=PowerWeight(alpha, shift=shift),
        provenance="power(α) family",
        tags=("template",),
    )


def example_halfball_bound(c: float) -> float:
    """Bound on μ(F(x̄^{βt}, 2βt)) for μ = min{1, 1/s}, K = 1, λ ≡ 1 and 0 < β <= c < 1."""
    if not 0 < c < 1:
        raise UserError(f"The half-ball bound needs 0 < c < 1, got {c}")
    return math.log((1.0 + c) / (1.0 - c))


CATALOG: tuple[CatalogEntry, ...] = (
    CatalogEntry(
        name="lebesgue-halfline",
        description="The half-line [0, inf) with Lebesgue measure",
        K=1,
        lam=_ONE,
        mu=_ONE,
        provenance="constant weights",
        tags=("admissible",),
    ),
    CatalogEntry(
        name="example-4.2",
        description="Far-from-root condition holds only for c < 1; μ is not doubling",
        K=1,
        lam=_ONE,
        mu=TruncatedReciprocalWeight(1.0),
        provenance="μ(x)=min{1, x⁻¹}",
        tags=("not-admissible",),
    ),
    CatalogEntry(
        name="power-half",
        description="μ(s) = s^(1/2)",
        K=1,
        lam=_ONE,
        mu=PowerWeight(0.5, shift=0.0),
        provenance="power(α) family",
        tags=("admissible",),
    ),
    CatalogEntry(
        name="power-two",
        description="μ(s) = s^2; the full Ap functional is infinite at the root",
        K=1,
        lam=_ONE,
        mu=PowerWeight(2.0, shift=0.0),
        provenance="power(α) family",
        tags=("admissible",),
    ),
    CatalogEntry(
        name="power-neg-half",
        description="μ(s) = s^(-1/2)",
        K=1,
        lam=_ONE,
        mu=PowerWeight(-0.5, shift=0.0),
        provenance="power(α) family",
        tags=("admissible",),
    ),
    CatalogEntry(
        name="shifted-power",
        description="μ(s) = (1 + s)^2",
        K=1,
        lam=_ONE,
        mu=PowerWeight(2.0, shift=1.0),
        provenance="power(α) family",
        tags=("admissible",),
    ),
    CatalogEntry(
        name="exponential-growth",
        description="μ(s) = e^s; balls far out are not doubling",
        K=1,
        lam=_ONE,
        mu=ExponentialWeight(),
        provenance="exponential family",
        tags=("not-admissible",),
    ),
    CatalogEntry(
        name="step-geometric",
        description="μ = 2^n on level (n, n+1]",
        K=1,
        lam=_ONE,
        mu=StepWeight([1.0], tail="geometric", ratio=2.0),
        provenance="per-level steps",
        tags=("not-admissible",),
    ),
    CatalogEntry(
        name="step-bounded",
        description="μ alternating between 1 and 2 on the first levels, then 1",
        K=1,
        lam=_ONE,
        mu=StepWeight([1.0, 2.0, 1.0, 2.0, 1.0]),
        provenance="per-level steps",
        tags=("admissible",),
    ),
    CatalogEntry(
        name="metric-exponential",
        description="λ = μ = e^s: Lebesgue measure in the arc-length coordinate",
        K=1,
        lam=ExponentialWeight(),
        mu=ExponentialWeight(),
        provenance="change of metric",
        tags=("admissible",),
    ),
    CatalogEntry(
        name="tabulated-linear",
        description="μ interpolated linearly through (0, 1), (1, 2), (2, 1.5), (4, 3)",
        K=1,
        lam=_ONE,
        mu=TabulatedWeight([0.0, 1.0, 2.0, 4.0], [1.0, 2.0, 1.5, 3.0]),
        provenance="tabulated weights",
        tags=("admissible",),
    ),
    CatalogEntry(
        name="binary-uniform",
        description="The binary tree with unit edges and unit density",
        K=2,
        lam=_ONE,
        mu=_ONE,
        provenance="constant weights",
        tags=("not-admissible",),
    ),
    CatalogEntry(
        name="binary-exponential-decay",
        description="K = 2 with μ(s) = 2^(-s), so every level carries the same mass",
        K=2,
        lam=_ONE,
        mu=ExponentialWeight(base=2.0, rate=-1.0),
        provenance="exponential family",
        tags=("not-admissible",),
    ),
    CatalogEntry(
        name="ternary-uniform",
        description="The ternary tree with unit edges and unit density",
        K=3,
        lam=_ONE,
        mu=_ONE,
        provenance="constant weights",
        tags=("not-admissible",),
    ),
)

_BY_NAME = {entry.name: entry for entry in CATALOG}


def get_entry(name: str) -> CatalogEntry:
    """Looks an entry up by name. `power(<alpha>)` builds a member of the power family."""
    if name in _BY_NAME:
        return _BY_NAME[name]
    if name.startswith("power(") and name.endswith(")"):
        try:
            alpha = float(name[len("power(") : -1])
        except ValueError:
            raise UserError(f"Cannot parse the exponent in {name!r}") from None
        return power_family(alpha)
    known = ", ".join(sorted(_BY_NAME))
    raise UserError(f"Unknown catalog entry {name!r}; known entries: {known}, power(<alpha>)")


def listing() -> list[dict[str, Any]]:
    """Every built-in entry plus the power(α) template."""
    rows = [entry.describe() for entry in CATALOG]
    rows.append(
        {
            "name": "power(α)",
            "description": "λ ≡ 1, μ(s) = s^α for α > -1; use power(<alpha>) to select",
            "provenance": "power(α) family",
            "K": 1,
            "tags": ["template"],
        }
    )
    return rows
