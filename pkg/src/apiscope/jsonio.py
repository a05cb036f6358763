"""Strict UTF-8 JSON input/output shared by every stage.

All artifacts are rendered through :func:`dumps` so that identical data
always produces identical bytes; downstream determinism checks rely on it.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable

from .errors import ParseError, SchemaError


def read_json(path: str | Path) -> Any:
    """Parse a JSON document, reporting line/column on malformed input."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"{path}: {err.msg}", err.lineno, err.colno) from err


def dumps(obj: Any) -> str:
    """Render with a fixed layout: 2-space indent, no ASCII escaping, trailing newline."""
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def write_json(path: str | Path, obj: Any) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def check_keys(obj: Any, required: Iterable[str], optional: Iterable[str], where: str) -> dict:
    """Require a JSON object with exactly the given keys; unknown keys are rejected."""
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object")
    for key in required:
        if key not in obj:
            raise SchemaError(f"{where}: missing key '{key}'")
    allowed = set(required) | set(optional)
    for key in obj:
        if key not in allowed:
            raise SchemaError(f"{where}: unknown key '{key}'")
    return obj
