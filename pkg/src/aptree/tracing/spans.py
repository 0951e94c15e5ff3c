from __future__ import annotations

import abc
from typing import Any, Generic, TypeVar

from typing_extensions import TypedDict

from . import util
from .logger import logger
from .processor_interface import TracingProcessor
from .scope import Scope, SpanToken
from .span_data import SpanData

TSpanData = TypeVar("TSpanData", bound=SpanData)


class SpanError(TypedDict):
    message: str
    data: dict[str, Any] | None


class Span(abc.ABC, Generic[TSpanData]):
    """A timed unit of work inside a trace. Use it as a context manager: entering starts the span
    and makes it current, leaving finishes it. An exception escaping the block is recorded as the
    span's error and then re-raised.
    """

    def __init__(self, span_data: TSpanData):
        self._span_data = span_data
        self._token: SpanToken | None = None
        self._error: SpanError | None = None

    @property
    @abc.abstractmethod
    def trace_id(self) -> str:
        pass

    @property
    @abc.abstractmethod
    def span_id(self) -> str:
        pass

    @property
    @abc.abstractmethod
    def parent_id(self) -> str | None:
        pass

    @property
    def span_data(self) -> TSpanData:
        return self._span_data

    @abc.abstractmethod
    def start(self, mark_as_current: bool = False) -> None:
        pass

    @abc.abstractmethod
    def finish(self, reset_current: bool = False) -> None:
        pass

    @abc.abstractmethod
    def export(self) -> dict[str, Any] | None:
        pass

    def set_error(self, error: SpanError) -> None:
        self._error = error

    @property
    def error(self) -> SpanError | None:
        return self._error

    def _enter_scope(self) -> None:
        self._token = Scope.push_span(self)

    def _leave_scope(self) -> None:
        if self._token is not None:
            Scope.pop_span(self._token)
            self._token = None

    def __enter__(self) -> Span[TSpanData]:
        self.start(mark_as_current=True)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if exc_val is not None and exc_type is not GeneratorExit:
            self.set_error({"message": f"{exc_type.__name__}: {exc_val}", "data": None})
        self.finish(reset_current=exc_type is not GeneratorExit)


class NoOpSpan(Span[TSpanData]):
    """Returned when tracing is disabled or no trace is active. Nothing is recorded."""

    @property
    def trace_id(self) -> str:
        return "no-op"

    @property
    def span_id(self) -> str:
        return "no-op"

    @property
    def parent_id(self) -> str | None:
        return None

    def start(self, mark_as_current: bool = False) -> None:
        if mark_as_current:
            self._enter_scope()

    def finish(self, reset_current: bool = False) -> None:
        if reset_current:
            self._leave_scope()

    def set_error(self, error: SpanError) -> None:
        pass

    def export(self) -> dict[str, Any] | None:
        return None


class SpanImpl(Span[TSpanData]):
    def __init__(
        self,
        trace_id: str,
        span_id: str | None,
        parent_id: str | None,
        processor: TracingProcessor,
        span_data: TSpanData,
    ):
        super().__init__(span_data)
        self._trace_id = trace_id
        self._span_id = span_id or util.gen_span_id()
        self._parent_id = parent_id
        self._processor = processor
        self.started_at: str | None = None
        self.ended_at: str | None = None
        self._clock_start: float | None = None
        self.elapsed: float | None = None
        """Wall-clock seconds between start and finish."""

    @property
    def trace_id(self) -> str:
        return self._trace_id

    @property
    def span_id(self) -> str:
        return self._span_id

    @property
    def parent_id(self) -> str | None:
        return self._parent_id

    def start(self, mark_as_current: bool = False) -> None:
        if self.started_at is not None:
            logger.warning(f"Span {self.span_id} already started")
            return
        self.started_at = util.time_iso()
        self._clock_start = util.monotonic()
        self._processor.on_span_start(self)
        if mark_as_current:
            self._enter_scope()

    def finish(self, reset_current: bool = False) -> None:
        if self.ended_at is not None:
            logger.warning(f"Span {self.span_id} already finished")
            return
        self.ended_at = util.time_iso()
        if self._clock_start is not None:
            self.elapsed = util.monotonic() - self._clock_start
        self._processor.on_span_end(self)
        if reset_current:
            self._leave_scope()

    def export(self) -> dict[str, Any] | None:
        return {
            "object": "trace.span",
            "id": self.span_id,
            "trace_id": self.trace_id,
            "parent_id": self.parent_id,
            "started_at": self.started_at,
            "ended_at": self.ended_at,
            "elapsed_s": self.elapsed,
            "span_data": self.span_data.export(),
            "error": self.error,
        }
