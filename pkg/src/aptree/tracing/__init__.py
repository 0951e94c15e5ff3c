import atexit

from .create import (
    certificate_span,
    classify_span,
    custom_span,
    get_current_span,
    get_current_trace,
    scan_span,
    trace,
)
from .processor_interface import TracingExporter, TracingProcessor
from .processors import ConsoleSpanExporter, JsonlFileExporter, SimpleSpanProcessor
from .setup import GLOBAL_TRACE_PROVIDER
from .span_data import (
    CertificateSpanData,
    ClassifySpanData,
    CustomSpanData,
    ScanSpanData,
    SpanData,
)
from .spans import Span, SpanError
from .traces import Trace
from .util import gen_span_id, gen_trace_id

__all__ = [
    "add_trace_processor",
    "certificate_span",
    "classify_span",
    "custom_span",
    "get_current_span",
    "get_current_trace",
    "scan_span",
    "set_trace_processors",
    "set_tracing_disabled",
    "trace",
    "Trace",
    "Span",
    "SpanError",
    "SpanData",
    "CertificateSpanData",
    "ClassifySpanData",
    "CustomSpanData",
    "ScanSpanData",
    "TracingProcessor",
    "TracingExporter",
    "ConsoleSpanExporter",
    "JsonlFileExporter",
    "SimpleSpanProcessor",
    "gen_trace_id",
    "gen_span_id",
]


def add_trace_processor(span_processor: TracingProcessor) -> None:
    """Adds a trace processor. It receives every trace and span from then on."""
    GLOBAL_TRACE_PROVIDER.register_processor(span_processor)


def set_trace_processors(processors: list[TracingProcessor]) -> None:
    """Replaces the registered trace processors."""
    GLOBAL_TRACE_PROVIDER.set_processors(processors)


def set_tracing_disabled(disabled: bool) -> None:
    """Globally enables or disables tracing."""
    GLOBAL_TRACE_PROVIDER.set_disabled(disabled)


atexit.register(GLOBAL_TRACE_PROVIDER.shutdown)
