from __future__ import annotations

import threading
from typing import Any

from .. import _debug
from . import util
from .logger import logger
from .processor_interface import TracingProcessor
from .scope import Scope
from .spans import NoOpSpan, Span, SpanImpl, TSpanData
from .traces import NoOpTrace, Trace, TraceImpl


class SynchronousMultiTracingProcessor(TracingProcessor):
    """Fans every event out to the registered processors, in registration order."""

    def __init__(self) -> None:
        # A tuple is swapped in whole, so iteration never sees a half-updated list.
        self._processors: tuple[TracingProcessor, ...] = ()
        self._lock = threading.Lock()

    def add_tracing_processor(self, tracing_processor: TracingProcessor) -> None:
        with self._lock:
            self._processors += (tracing_processor,)

    def set_processors(self, processors: list[TracingProcessor]) -> None:
        with self._lock:
            self._processors = tuple(processors)

    def on_trace_start(self, trace: Trace) -> None:
        for processor in self._processors:
            processor.on_trace_start(trace)

    def on_trace_end(self, trace: Trace) -> None:
        for processor in self._processors:
            processor.on_trace_end(trace)

    def on_span_start(self, span: Span[Any]) -> None:
        for processor in self._processors:
            processor.on_span_start(span)

    def on_span_end(self, span: Span[Any]) -> None:
        for processor in self._processors:
            processor.on_span_end(span)

    def shutdown(self) -> None:
        for processor in self._processors:
            logger.debug(f"Shutting down trace processor {processor}")
            processor.shutdown()

    def force_flush(self) -> None:
        for processor in self._processors:
            processor.force_flush()


class TraceProvider:
    """Creates traces and spans and routes their events to the registered processors.

    Starts with no processors, so tracing costs nothing until a caller registers one.
    `APTREE_DISABLE_TRACING=1` turns every trace and span into a no-op.
    """

    def __init__(self) -> None:
        self._multi_processor = SynchronousMultiTracingProcessor()
        self._disabled = _debug.DISABLE_TRACING

    def register_processor(self, processor: TracingProcessor) -> None:
        self._multi_processor.add_tracing_processor(processor)

    def set_processors(self, processors: list[TracingProcessor]) -> None:
        self._multi_processor.set_processors(processors)

    def get_current_trace(self) -> Trace | None:
        return Scope.current_trace()

    def get_current_span(self) -> Span[Any] | None:
        return Scope.current_span()

    def set_disabled(self, disabled: bool) -> None:
        self._disabled = disabled

    def create_trace(
        self,
        name: str,
        trace_id: str | None = None,
        metadata: dict[str, Any] | None = None,
        disabled: bool = False,
    ) -> Trace:
        if self._disabled or disabled:
            logger.debug(f"Tracing is disabled, not creating trace {name}")
            return NoOpTrace()

        trace_id = trace_id or util.gen_trace_id()
        logger.debug(f"Creating trace {name} with id {trace_id}")
        return TraceImpl(
            name=name, trace_id=trace_id, metadata=metadata, processor=self._multi_processor
        )

    def create_span(
        self,
        span_data: TSpanData,
        span_id: str | None = None,
        parent: Trace | Span[Any] | None = None,
        disabled: bool = False,
    ) -> Span[TSpanData]:
        if self._disabled or disabled:
            return NoOpSpan(span_data)

        if parent is None:
            current_trace = Scope.current_trace()
            current_span = Scope.current_span()
            if current_trace is None:
                # Library calls outside a trace are normal; they are simply not recorded.
                logger.debug(f"No active trace, {span_data.type} span is a no-op")
                return NoOpSpan(span_data)
            if isinstance(current_trace, NoOpTrace) or isinstance(current_span, NoOpSpan):
                return NoOpSpan(span_data)
            trace_id = current_trace.trace_id
            parent_id = current_span.span_id if current_span else None
        elif isinstance(parent, Trace):
            if isinstance(parent, NoOpTrace):
                return NoOpSpan(span_data)
            trace_id = parent.trace_id
            parent_id = None
        else:
            if isinstance(parent, NoOpSpan):
                return NoOpSpan(span_data)
            trace_id = parent.trace_id
            parent_id = parent.span_id

        return SpanImpl(
            trace_id=trace_id,
            span_id=span_id,
            parent_id=parent_id,
            processor=self._multi_processor,
            span_data=span_data,
        )

    def shutdown(self) -> None:
        try:
            self._multi_processor.shutdown()
        except Exception as e:
            logger.error(f"Error shutting down trace provider: {e}")


GLOBAL_TRACE_PROVIDER = TraceProvider()
