from __future__ import annotations

from dataclasses import dataclass

from .exceptions import UserError


@dataclass(frozen=True)
class Tolerance:
    """Numerical tolerances and work budgets shared by quadrature, root finding and the measure
    engine.
    """

    rel: float = 1e-10
    """Relative error target for adaptive quadrature."""

    abs: float = 1e-13
    """Absolute error target for adaptive quadrature."""

    grid: int = 64
    """Samples per smooth piece when an essential extremum has no closed form."""

    max_subdivisions: int = 200
    """Subdivision limit passed to the adaptive quadrature routine for each smooth piece."""

    max_levels: int = 1 << 24
    """Maximum number of unit levels summed one by one in a single integral."""

    max_pieces: int = 4096
    """Maximum number of smooth pieces that may fall back to adaptive quadrature in a single
    integral.
    """

    max_side_vertices: int = 4096
    """Maximum number of ancestor vertices whose side branches are summed in a ball measure."""

    max_certificate_levels: int = 512
    """Maximum number of unit levels a Poincaré certificate or witness may span on a branching or
    per-level tree. Larger balls raise `BudgetExceeded`.
    """

    solver_xtol: float = 1e-13
    """Relative abscissa tolerance of the arc-length inverse."""

    quad_acceptance: float = 1e-7
    """Relative error below which a quadrature result that missed `rel` is still accepted."""

    def __post_init__(self) -> None:
        if self.rel <= 0 or self.abs <= 0:
            raise UserError("Quadrature tolerances must be positive")
        if self.grid < 2:
            raise UserError("Tolerance.grid must be at least 2")
        if self.max_certificate_levels < 1:
            raise UserError("Tolerance.max_certificate_levels must be at least 1")


@dataclass(frozen=True)
class ScanDomain:
    """The (t, r) region a supremum scan covers and how it grows.

    Radii are generated two ways. Relative cells use r = beta * max(d(0, x), r_floor) with beta a
    power of two, so rays r ~ d(0, x) are covered at every scale. Absolute cells use a log-spaced
    r grid and are only added in full mode.
    """

    t_min: float = 1e-3
    """Smallest positive radial coordinate scanned."""

    t_max: float = 1e6
    """Largest radial coordinate scanned."""

    r_min: float = 1e-3
    """Smallest absolute radius."""

    r_max: float = 1e6
    """Largest absolute radius."""

    r_floor: float = 1e-3
    """Floor applied to d(0, x) before scaling by beta, so that cells near the root get radii."""

    beta_min_exponent: int = -20
    """Smallest k in beta = 2**k."""

    beta_max_exponent: int = 5
    """Largest k in beta = 2**k."""

    points_per_decade: int = 4
    """Resolution of the log-spaced t and absolute r grids."""

    initial_t: tuple[float, float] = (0.1, 100.0)
    """The t range of the first box. The box then grows toward [t_min, t_max]."""

    initial_r: tuple[float, float] = (0.1, 100.0)
    """The absolute r range of the first box. The box then grows toward [r_min, r_max]."""

    expansion_factor: float = 10.0
    """Factor by which every side of the box grows per expansion."""

    refinements: int = 2
    """Number of local refinement rounds around the incumbent argmax."""

    include_root: bool = True
    """Whether full-mode scans include cells centred at the root."""

    def __post_init__(self) -> None:
        if not 0 < self.t_min < self.t_max:
            raise UserError("ScanDomain needs 0 < t_min < t_max")
        if not 0 < self.r_min < self.r_max:
            raise UserError("ScanDomain needs 0 < r_min < r_max")
        if self.r_floor <= 0:
            raise UserError("ScanDomain.r_floor must be positive")
        if self.beta_min_exponent > self.beta_max_exponent:
            raise UserError("ScanDomain beta exponents are reversed")
        if self.points_per_decade < 1:
            raise UserError("ScanDomain.points_per_decade must be at least 1")
        if self.expansion_factor <= 1:
            raise UserError("ScanDomain.expansion_factor must exceed 1")
        if self.refinements < 0:
            raise UserError("ScanDomain.refinements must be non-negative")


@dataclass(frozen=True)
class DivergenceRule:
    """Thresholds of the divergence heuristic. A finite scan can never prove that a supremum is
    finite, so the verdict is always a heuristic and reports say so.
    """

    growth_factor: float = 10.0
    """Per-expansion growth that counts as geometric divergence."""

    expansions: int = 3
    """How many of the most recent expansions must show growth."""

    drift_factor: float = 1.05
    """Minimum per-expansion growth for the drift criterion, which catches logarithmic growth."""

    persistence: float = 0.5
    """Under the drift criterion, each additive increment must be at least this fraction of the
    previous one.
    """

    bounded_tolerance: float = 0.01
    """Relative change across the last two refinements below which a scan is called bounded."""

    def __post_init__(self) -> None:
        if self.growth_factor <= 1 or self.drift_factor <= 1:
            raise UserError("Growth thresholds must exceed 1")
        if self.expansions < 1:
            raise UserError("DivergenceRule.expansions must be at least 1")
        if not 0 < self.persistence <= 1:
            raise UserError("DivergenceRule.persistence must lie in (0, 1]")
        if self.bounded_tolerance <= 0:
            raise UserError("DivergenceRule.bounded_tolerance must be positive")
