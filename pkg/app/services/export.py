"""Serialisation of results to JSON, CSV and text."""
import csv
import io
import json
import math
import sys
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import structlog
from pydantic import BaseModel

logger = structlog.get_logger()

SCHEMA_VERSION = 1
TEXT_DIGITS = 12


def to_payload(value: Any) -> Any:
    """JSON-ready structure; complex numbers become {"re": ..., "im": ...}"""
    if isinstance(value, BaseModel):
        return to_payload(value.model_dump())
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): to_payload(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_payload(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def complex_from_payload(data: Dict[str, float]) -> complex:
    return complex(data["re"], data["im"])


def render_json(command: str, payload: Dict[str, Any]) -> str:
    document = {"schema_version": SCHEMA_VERSION, "command": command}
    document.update(to_payload(payload))
    return json.dumps(document, indent=2) + "\n"


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], comment: Optional[str] = None) -> str:
    buffer = io.StringIO()
    if comment:
        buffer.write(f"# {comment}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buffer.getvalue()


def _csv_cell(value: Any) -> Any:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, bool):
        return "true" if value else "false"
    return value


def format_real(value: float, digits: int = TEXT_DIGITS) -> str:
    return f"{value:.{digits}f}"


def format_complex(value: complex, digits: int = TEXT_DIGITS) -> str:
    return f"{value.real:.{digits}f}{value.imag:+.{digits}f}i"


def render_text(lines: List[str]) -> str:
    return "\n".join(lines) + "\n"


def write_output(text: str, path: Optional[str] = None):
    """Write once to the given path, or to stdout"""
    if path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
        logger.info("Output written", path=str(target), bytes=len(text))
    else:
        sys.stdout.write(text)
