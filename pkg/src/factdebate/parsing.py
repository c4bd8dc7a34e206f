"""Extraction of structured values from free-form model completions.

Models are asked for a JSON object or array but routinely wrap it in prose,
use Python literals (True/False, single quotes), or double the braces. The
scanners here try each balanced candidate span in order of its opening
position, skipping over quoted strings, and parse JSON first and a Python
literal second.
"""

from __future__ import annotations

import ast
import json
from typing import Any, Iterator

_PAIRS = {"{": "}", "[": "]"}


def _span_end(text: str, start: int, opener: str) -> int | None:
    """End index (exclusive) of the balanced span opening at ``start``.

    Quoted strings (single or double, with backslash escapes) are opaque to
    the bracket count, so braces inside opinion text do not break the scan.
    Returns None when the span never closes.
    """
    closer = _PAIRS[opener]
    depth = 0
    quote: str | None = None
    escaped = False
    for i in range(start, len(text)):
        ch = text[i]
        if quote is not None:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == quote:
                quote = None
            continue
        if ch in "\"'":
            quote = ch
        elif ch == opener:
            depth += 1
        elif ch == closer:
            depth -= 1
            if depth == 0:
                return i + 1
    return None


def candidate_spans(text: str, opener: str) -> Iterator[str]:
    """Balanced spans for every opener position, earliest opener first."""
    for start, ch in enumerate(text):
        if ch != opener:
            continue
        end = _span_end(text, start, opener)
        if end is not None:
            yield text[start:end]


def _try_parse(span: str) -> Any:
    try:
        return json.loads(span)
    except (json.JSONDecodeError, ValueError):
        pass
    try:
        return ast.literal_eval(span)
    except (ValueError, SyntaxError, MemoryError, RecursionError):
        return None


def first_object(text: str) -> dict[str, Any] | None:
    """The first parseable brace-delimited object in ``text``, or None.

    Tolerates arbitrary prefix/suffix noise, including stray braces: a
    candidate is tried from every opening brace until one parses. A span
    wrapped in doubled braces (``{{...}}``) is unwrapped for a second
    attempt.
    """
    for span in candidate_spans(text, "{"):
        value = _try_parse(span)
        if value is None and span.startswith("{{") and span.endswith("}}"):
            value = _try_parse(span[1:-1])
        if isinstance(value, dict):
            return value
    return None


def first_array(text: str) -> list[Any] | None:
    """The first parseable bracket-delimited array in ``text``, or None."""
    for span in candidate_spans(text, "["):
        value = _try_parse(span)
        if isinstance(value, list):
            return value
    return None
