from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Any, TextIO

from .logger import logger
from .processor_interface import TracingExporter, TracingProcessor
from .spans import Span
from .traces import Trace


class ConsoleSpanExporter(TracingExporter):
    """Prints one line per finished trace or span."""

    def export(self, items: list[Trace | Span[Any]]) -> None:
        for item in items:
            if isinstance(item, Trace):
                print(f"[aptree trace] {item.trace_id} {item.name}")
            else:
                print(f"[aptree span] {json.dumps(item.export(), default=str)}")


class JsonlFileExporter(TracingExporter):
    """Appends one JSON object per finished trace or span to a file."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._handle: TextIO | None = None

    def _file(self) -> TextIO:
        if self._handle is None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._handle = self.path.open("a", encoding="utf-8")
        return self._handle

    def export(self, items: list[Trace | Span[Any]]) -> None:
        with self._lock:
            handle = self._file()
            for item in items:
                payload = item.export()
                if payload is not None:
                    handle.write(json.dumps(payload, default=str) + "\n")
            handle.flush()

    def close(self) -> None:
        with self._lock:
            if self._handle is not None:
                self._handle.close()
                self._handle = None


class SimpleSpanProcessor(TracingProcessor):
    """Exports every span as it finishes and every trace as it ends, on the calling thread.

    Analyses emit a few dozen spans, so there is nothing to batch.
    """

    def __init__(self, exporter: TracingExporter):
        self._exporter = exporter

    def on_trace_start(self, trace: Trace) -> None:
        pass

    def on_trace_end(self, trace: Trace) -> None:
        self._safe_export([trace])

    def on_span_start(self, span: Span[Any]) -> None:
        pass

    def on_span_end(self, span: Span[Any]) -> None:
        self._safe_export([span])

    def _safe_export(self, items: list[Trace | Span[Any]]) -> None:
        try:
            self._exporter.export(items)
        except Exception as e:
            logger.error(f"Trace exporter {type(self._exporter).__name__} failed: {e}")

    def shutdown(self) -> None:
        if isinstance(self._exporter, JsonlFileExporter):
            self._exporter.close()
