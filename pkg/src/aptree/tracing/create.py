from __future__ import annotations

from typing import Any

from .logger import logger
from .setup import GLOBAL_TRACE_PROVIDER
from .span_data import CertificateSpanData, ClassifySpanData, CustomSpanData, ScanSpanData
from .spans import Span
from .traces import Trace


def trace(
    workflow_name: str,
    trace_id: str | None = None,
    metadata: dict[str, Any] | None = None,
    disabled: bool = False,
) -> Trace:
    """
    Create a new trace. The trace is not started automatically; use it as a context manager
    (`with trace(...):`) or call `trace.start()` and `trace.finish()` yourself.

    Args:
        workflow_name: The name of the workflow, e.g. "analyze" or "catalog-sweep".
        trace_id: The ID of the trace. Optional; generated when omitted.
        metadata: Optional dictionary attached to the exported trace, e.g. the tree descriptor.
        disabled: If True, a trace is returned but nothing is recorded.

    Returns:
        The newly created trace.
    """
    if GLOBAL_TRACE_PROVIDER.get_current_trace():
        logger.warning("A trace is already active; nesting traces is probably a mistake.")

    return GLOBAL_TRACE_PROVIDER.create_trace(
        name=workflow_name, trace_id=trace_id, metadata=metadata, disabled=disabled
    )


def get_current_trace() -> Trace | None:
    """Returns the currently active trace, if present."""
    return GLOBAL_TRACE_PROVIDER.get_current_trace()


def get_current_span() -> Span[Any] | None:
    """Returns the currently active span, if present."""
    return GLOBAL_TRACE_PROVIDER.get_current_span()


def scan_span(
    name: str,
    kind: str,
    mode: str | None = None,
    p: float | None = None,
    c: float | None = None,
    parent: Trace | Span[Any] | None = None,
    disabled: bool = False,
) -> Span[ScanSpanData]:
    """Create a span for a supremum scan. The scanner fills in the estimate, verdict and cell
    counts before the span finishes.

    Args:
        name: A label for the scan, e.g. "ap_sup".
        kind: The scanned functional: "ap", "a1" or "doubling".
        mode: "full" or "far" for Ap scans.
        p: The exponent, for Ap scans.
        c: The far-regime constant, for far scans.
        parent: The parent span or trace. Defaults to the current span or trace.
        disabled: If True, a span is returned but nothing is recorded.

    Returns:
        The newly created scan span.
    """
    return GLOBAL_TRACE_PROVIDER.create_span(
        span_data=ScanSpanData(name=name, kind=kind, mode=mode, p=p, c=c),
        parent=parent,
        disabled=disabled,
    )


def certificate_span(
    p: float,
    t: float,
    r: float,
    case: str,
    parent: Trace | Span[Any] | None = None,
    disabled: bool = False,
) -> Span[CertificateSpanData]:
    """Create a span for one Poincaré certificate.

    Args:
        p: The exponent.
        t: Radial coordinate of the ball's center.
        r: Radius of the ball.
        case: "sublevel" (p = 1), "power" (p > 1) or "root".
        parent: The parent span or trace. Defaults to the current span or trace.
        disabled: If True, a span is returned but nothing is recorded.

    Returns:
        The newly created certificate span.
    """
    return GLOBAL_TRACE_PROVIDER.create_span(
        span_data=CertificateSpanData(p=p, t=t, r=r, case=case),
        parent=parent,
        disabled=disabled,
    )


def classify_span(
    p: float,
    branching: int,
    mode: str,
    parent: Trace | Span[Any] | None = None,
    disabled: bool = False,
) -> Span[ClassifySpanData]:
    """Create a span covering a full classification, including its scans and certificates."""
    return GLOBAL_TRACE_PROVIDER.create_span(
        span_data=ClassifySpanData(p=p, branching=branching, mode=mode),
        parent=parent,
        disabled=disabled,
    )


def custom_span(
    name: str,
    data: dict[str, Any] | None = None,
    parent: Trace | Span[Any] | None = None,
    disabled: bool = False,
) -> Span[CustomSpanData]:
    """Create a span with arbitrary data.

    Args:
        name: The name of the span.
        data: Arbitrary structured data to attach to the span.
        parent: The parent span or trace. Defaults to the current span or trace.
        disabled: If True, a span is returned but nothing is recorded.

    Returns:
        The newly created custom span.
    """
    return GLOBAL_TRACE_PROVIDER.create_span(
        span_data=CustomSpanData(name=name, data=data or {}),
        parent=parent,
        disabled=disabled,
    )
