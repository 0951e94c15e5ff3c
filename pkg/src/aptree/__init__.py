from __future__ import annotations

import logging
import sys

from . import _config
from .admissibility import (
    Certificate,
    Classification,
    Consistency,
    DoublingReport,
    TheoremConstants,
    Verdict,
    classify,
    converse_constant,
    doubling_ratio,
    doubling_sup,
    poincare_certificate,
    root_poincare_certificate,
    theorem_constants,
)
from .ap import ApParams, a1_value, ap_sup, ap_value
from .catalog import CATALOG, CatalogEntry, example_halfball_bound, get_entry, power_family
from .config import RunConfig, load_config
from .exceptions import (
    AptreeException,
    BudgetExceeded,
    DegenerateConstructionError,
    DivergenceError,
    DomainError,
    NonConvergenceError,
    SolverError,
    UserError,
)
from .geometry import RadialPoint, TreeSpace, level_index
from .measures import (
    ball_measure,
    branch_multiplicity,
    decompose_ball,
    directed_halfball_measure,
    halfball_measure,
    integrate_profile_on_halfball,
    segment_mu,
)
from .oracle import (
    DiscreteTree,
    build_discrete_tree,
    discrete_ap_value,
    discrete_ball_measure,
    discrete_halfball_measure,
)
from .quadrature import IntegrandSpec, ess_extremum, integrate, sublevel_intervals
from .scan import CellValue, ScanStep, SupEstimate, SupremumScanner
from .settings import DivergenceRule, ScanDomain, Tolerance
from .tracing import (
    add_trace_processor,
    set_trace_processors,
    set_tracing_disabled,
    trace,
)
from .weights import (
    ConstantWeight,
    ExponentialWeight,
    PiecewiseWeight,
    PowerWeight,
    StepWeight,
    TabulatedWeight,
    TruncatedReciprocalWeight,
    WeightFunction,
    evaluate,
)


def set_default_tolerance(tolerance: Tolerance) -> None:
    """Set the tolerance every operation uses when it is not given one explicitly."""
    _config.set_default_tolerance(tolerance)


def set_default_workers(workers: int | None) -> None:
    """Set the number of threads scans evaluate cells with. `None` defers to the
    APTREE_NUM_THREADS environment variable, which defaults to 1.
    """
    _config.set_default_workers(workers)


def enable_verbose_stdout_logging():
    """Enables verbose logging to stdout. This is useful for debugging."""
    logger = logging.getLogger("aptree")
    logger.setLevel(logging.DEBUG)
    logger.addHandler(logging.StreamHandler(sys.stdout))


__all__ = [
    "TreeSpace",
    "RadialPoint",
    "level_index",
    "WeightFunction",
    "ConstantWeight",
    "PowerWeight",
    "ExponentialWeight",
    "TruncatedReciprocalWeight",
    "PiecewiseWeight",
    "StepWeight",
    "TabulatedWeight",
    "evaluate",
    "IntegrandSpec",
    "integrate",
    "ess_extremum",
    "sublevel_intervals",
    "branch_multiplicity",
    "halfball_measure",
    "directed_halfball_measure",
    "segment_mu",
    "decompose_ball",
    "ball_measure",
    "integrate_profile_on_halfball",
    "ApParams",
    "ap_value",
    "a1_value",
    "ap_sup",
    "SupremumScanner",
    "SupEstimate",
    "CellValue",
    "ScanStep",
    "doubling_ratio",
    "doubling_sup",
    "DoublingReport",
    "Certificate",
    "poincare_certificate",
    "root_poincare_certificate",
    "TheoremConstants",
    "theorem_constants",
    "converse_constant",
    "Classification",
    "Consistency",
    "Verdict",
    "classify",
    "DiscreteTree",
    "build_discrete_tree",
    "discrete_ball_measure",
    "discrete_halfball_measure",
    "discrete_ap_value",
    "CATALOG",
    "CatalogEntry",
    "get_entry",
    "power_family",
    "example_halfball_bound",
    "RunConfig",
    "load_config",
    "Tolerance",
    "ScanDomain",
    "DivergenceRule",
    "AptreeException",
    "UserError",
    "DomainError",
    "NonConvergenceError",
    "DivergenceError",
    "SolverError",
    "DegenerateConstructionError",
    "BudgetExceeded",
    "add_trace_processor",
    "set_trace_processors",
    "set_tracing_disabled",
    "trace",
    "set_default_tolerance",
    "set_default_workers",
    "enable_verbose_stdout_logging",
]
