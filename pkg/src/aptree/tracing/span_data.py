from __future__ import annotations

import abc
import math
from typing import Any


def _number(value: float | None) -> float | str | None:
    """JSON-safe rendering of a float: non-finite values become strings."""
    if value is None or math.isfinite(value):
        return value
    return str(value)


class SpanData(abc.ABC):
    @abc.abstractmethod
    def export(self) -> dict[str, Any]:
        pass

    @property
    @abc.abstractmethod
    def type(self) -> str:
        pass


class ScanSpanData(SpanData):
    """A supremum scan. The result fields are filled in when the scan finishes."""

    __slots__ = ("name", "kind", "mode", "p", "c", "estimate", "verdict", "cells", "skipped")

    def __init__(
        self,
        name: str,
        kind: str,
        mode: str | None = None,
        p: float | None = None,
        c: float | None = None,
    ):
        self.name = name
        self.kind = kind
        self.mode = mode
        self.p = p
        self.c = c
        self.estimate: float | None = None
        self.verdict: str | None = None
        self.cells: int | None = None
        self.skipped: int | None = None

    @property
    def type(self) -> str:
        return "scan"

    def export(self) -> dict[str, Any]:
        return {
            "type": self.type,
            "name": self.name,
            "kind": self.kind,
            "mode": self.mode,
            "p": self.p,
            "c": self.c,
            "estimate": _number(self.estimate),
            "verdict": self.verdict,
            "cells": self.cells,
            "skipped": self.skipped,
        }


class CertificateSpanData(SpanData):
    __slots__ = ("p", "t", "r", "case", "implied_bound")

    def __init__(self, p: float, t: float, r: float, case: str):
        self.p = p
        self.t = t
        self.r = r
        self.case = case
        self.implied_bound: float | None = None

    @property
    def type(self) -> str:
        return "certificate"

    def export(self) -> dict[str, Any]:
        return {
            "type": self.type,
            "p": self.p,
            "t": self.t,
            "r": self.r,
            "case": self.case,
            "implied_bound": _number(self.implied_bound),
        }


class ClassifySpanData(SpanData):
    __slots__ = ("p", "branching", "mode", "classification")

    def __init__(self, p: float, branching: int, mode: str):
        self.p = p
        self.branching = branching
        self.mode = mode
        self.classification: str | None = None

    @property
    def type(self) -> str:
        return "classify"

    def export(self) -> dict[str, Any]:
        return {
            "type": self.type,
            "p": self.p,
            "K": self.branching,
            "mode": self.mode,
            "classification": self.classification,
        }


class CustomSpanData(SpanData):
    __slots__ = ("name", "data")

    def __init__(self, name: str, data: dict[str, Any]):
        self.name = name
        self.data = data

    @property
    def type(self) -> str:
        return "custom"

    def export(self) -> dict[str, Any]:
        return {"type": self.type, "name": self.name, "data": self.data}
