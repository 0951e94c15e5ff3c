from __future__ import annotations

import threading
from typing import Any, Literal

from aptree.tracing import Span, Trace, TracingProcessor

RecordedEvent = Literal["trace_start", "trace_end", "span_start", "span_end"]


class RecordingProcessor(TracingProcessor):
    """Keeps every trace and finished span in memory so tests can inspect what an analysis
    recorded.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._spans: list[Span[Any]] = []
        self._traces: list[Trace] = []
        self._events: list[RecordedEvent] = []

    def on_trace_start(self, trace: Trace) -> None:
        with self._lock:
            self._traces.append(trace)
            self._events.append("trace_start")

    def on_trace_end(self, trace: Trace) -> None:
        with self._lock:
            self._events.append("trace_end")

    def on_span_start(self, span: Span[Any]) -> None:
        with self._lock:
            self._events.append("span_start")

    def on_span_end(self, span: Span[Any]) -> None:
        with self._lock:
            self._events.append("span_end")
            self._spans.append(span)

    def spans(self, span_type: str | None = None) -> list[Span[Any]]:
        """Finished spans in start order, optionally only those of one data type."""
        with self._lock:
            found = [s for s in self._spans if span_type is None or s.span_data.type == span_type]
        return sorted(found, key=lambda s: s.started_at or "")

    def traces(self) -> list[Trace]:
        with self._lock:
            return list(self._traces)

    def events(self) -> list[RecordedEvent]:
        with self._lock:
            return list(self._events)

    def clear(self) -> None:
        with self._lock:
            self._spans.clear()
            self._traces.clear()
            self._events.clear()


SPAN_PROCESSOR_TESTING = RecordingProcessor()


def fetch_ordered_spans(span_type: str | None = None) -> list[Span[Any]]:
    return SPAN_PROCESSOR_TESTING.spans(span_type)


def fetch_traces() -> list[Trace]:
    return SPAN_PROCESSOR_TESTING.traces()


def fetch_events() -> list[RecordedEvent]:
    return SPAN_PROCESSOR_TESTING.events()
