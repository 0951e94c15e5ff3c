from __future__ import annotations

import abc
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .spans import Span
    from .traces import Trace


class TracingProcessor(abc.ABC):
    """Receives lifecycle events for traces and spans. Implementations must not raise."""

    @abc.abstractmethod
    def on_trace_start(self, trace: Trace) -> None:
        pass

    @abc.abstractmethod
    def on_trace_end(self, trace: Trace) -> None:
        pass

    @abc.abstractmethod
    def on_span_start(self, span: Span[Any]) -> None:
        pass

    @abc.abstractmethod
    def on_span_end(self, span: Span[Any]) -> None:
        """Called when a span finishes, after its result fields have been filled in."""
        pass

    def shutdown(self) -> None:
        """Called at interpreter exit."""

    def force_flush(self) -> None:
        """Writes out anything buffered."""


class TracingExporter(abc.ABC):
    """Writes finished traces and spans somewhere."""

    @abc.abstractmethod
    def export(self, items: list[Trace | Span[Any]]) -> None:
        """Exports a batch of traces and spans.

        Args:
            items: The finished items, in completion order.
        """
        pass
