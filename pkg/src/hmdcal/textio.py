"""Helpers for the line-oriented text artifact formats.

All persistent artifacts (optical systems, datasets, models, reports,
scenes) are plain text: one logical field per line, the first token naming
the field. Floats are serialized with 17 significant digits, which
round-trips IEEE-754 doubles exactly, so rereading a file reproduces the
original values bit for bit.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np

from .errors import IntegrityError
from .geometry import ChartedPlane


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def fmt_seq(xs) -> str:
    return " ".join(fmt(x) for x in np.asarray(xs, dtype=np.float64).ravel())


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def file_sha256(path: str | Path) -> str:
    return sha256_hex(Path(path).read_bytes())


def split_fields(text: str) -> list[list[str]]:
    """Tokenized non-empty, non-comment lines."""
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        out.append(line.split())
    return out


class FieldReader:
    """Sequential reader over tokenized lines with light schema checks."""

    def __init__(self, text: str):
        self.lines = split_fields(text)
        self.pos = 0

    def peek(self) -> list[str] | None:
        return self.lines[self.pos] if self.pos < len(self.lines) else None

    def next(self) -> list[str]:
        if self.pos >= len(self.lines):
            raise IntegrityError("unexpected end of file")
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def expect(self, key: str) -> list[str]:
        line = self.next()
        if line[0] != key:
            raise IntegrityError(f"expected field '{key}', found '{line[0]}'")
        return line[1:]

    def floats(self, key: str, n: int | None = None) -> np.ndarray:
        vals = np.array([float(t) for t in self.expect(key)], dtype=np.float64)
        if n is not None and vals.size != n:
            raise IntegrityError(f"field '{key}' expects {n} values, found {vals.size}")
        return vals
