"""Context-local bookkeeping of the active trace and span.

Scans fan cell evaluations out to worker threads; those threads start with an empty context,
so spans are only opened from the thread that owns the scan.
"""

from __future__ import annotations

import contextvars
from typing import TYPE_CHECKING, Any

from .logger import logger

if TYPE_CHECKING:
    from .spans import Span
    from .traces import Trace

SpanToken = contextvars.Token["Span[Any] | None"]
TraceToken = contextvars.Token["Trace | None"]

_active_span: contextvars.ContextVar[Span[Any] | None] = contextvars.ContextVar(
    "aptree_active_span", default=None
)
_active_trace: contextvars.ContextVar[Trace | None] = contextvars.ContextVar(
    "aptree_active_trace", default=None
)


class Scope:
    @classmethod
    def current_span(cls) -> Span[Any] | None:
        return _active_span.get()

    @classmethod
    def push_span(cls, span: Span[Any] | None) -> SpanToken:
        return _active_span.set(span)

    @classmethod
    def pop_span(cls, token: SpanToken) -> None:
        _active_span.reset(token)

    @classmethod
    def current_trace(cls) -> Trace | None:
        return _active_trace.get()

    @classmethod
    def push_trace(cls, trace: Trace | None) -> TraceToken:
        logger.debug(f"Entering trace {trace.trace_id if trace else None}")
        return _active_trace.set(trace)

    @classmethod
    def pop_trace(cls, token: TraceToken) -> None:
        logger.debug("Leaving trace")
        _active_trace.reset(token)
