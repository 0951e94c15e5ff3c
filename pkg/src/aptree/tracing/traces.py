from __future__ import annotations

import abc
from typing import Any

from . import util
from .logger import logger
from .processor_interface import TracingProcessor
from .scope import Scope, TraceToken


class Trace(abc.ABC):
    """The root of a tree of spans, one per analysis workflow (an `analyze` run, a test, ...)."""

    def __init__(self) -> None:
        self._token: TraceToken | None = None
        self._started = False

    @property
    @abc.abstractmethod
    def trace_id(self) -> str:
        pass

    @property
    @abc.abstractmethod
    def name(self) -> str:
        """The workflow name."""
        pass

    @abc.abstractmethod
    def export(self) -> dict[str, Any] | None:
        pass

    def _on_start(self) -> None:
        """Hook for subclasses; runs once."""

    def _on_finish(self) -> None:
        """Hook for subclasses; runs once, after a start."""

    def start(self, mark_as_current: bool = False) -> None:
        if self._started:
            return
        self._started = True
        self._on_start()
        if mark_as_current:
            self._token = Scope.push_trace(self)

    def finish(self, reset_current: bool = False) -> None:
        if not self._started:
            return
        self._on_finish()
        if reset_current and self._token is not None:
            Scope.pop_trace(self._token)
            self._token = None

    def __enter__(self) -> Trace:
        if self._started:
            if self._token is None:
                logger.error(f"Trace {self.trace_id} was started outside a `with` block")
            return self
        self.start(mark_as_current=True)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.finish(reset_current=exc_type is not GeneratorExit)


class NoOpTrace(Trace):
    @property
    def trace_id(self) -> str:
        return "no-op"

    @property
    def name(self) -> str:
        return "no-op"

    def export(self) -> dict[str, Any] | None:
        return None


class TraceImpl(Trace):
    def __init__(
        self,
        name: str,
        trace_id: str | None,
        metadata: dict[str, Any] | None,
        processor: TracingProcessor,
    ):
        super().__init__()
        self._name = name
        self._trace_id = trace_id or util.gen_trace_id()
        self.metadata = metadata
        self._processor = processor

    @property
    def trace_id(self) -> str:
        return self._trace_id

    @property
    def name(self) -> str:
        return self._name

    def _on_start(self) -> None:
        self._processor.on_trace_start(self)

    def _on_finish(self) -> None:
        self._processor.on_trace_end(self)

    def export(self) -> dict[str, Any] | None:
        return {
            "object": "trace",
            "id": self.trace_id,
            "workflow_name": self.name,
            "metadata": self.metadata,
        }
