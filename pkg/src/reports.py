"""
Report envelopes, JSON/CSV rendering and schema validation
"""

import csv
import io
import json
import logging
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import jsonschema

from src import __version__

logger = logging.getLogger(__name__)

SCHEMA_ID = "cfkit/1"
SCHEMA_PATH = Path(__file__).resolve().parent.parent / "schemas" / "report.schema.json"


def build_report(command: str, config: Dict[str, Any], result: Dict[str, Any]) -> Dict[str, Any]:
    return {
        "schema": SCHEMA_ID,
        "version": __version__,
        "command": command,
        "status": "ok",
        "config": config,
        "result": result,
    }


def error_report(command: Optional[str], error: Exception, exit_code: int) -> Dict[str, Any]:
    details: Dict[str, Any] = {
        "type": type(error).__name__,
        "message": str(error),
        "exit_code": exit_code,
    }
    for attr in ("index", "position"):
        value = getattr(error, attr, None)
        if value is not None:
            details[attr] = value
    return {
        "schema": SCHEMA_ID,
        "version": __version__,
        "command": command or "",
        "status": "error",
        "error": details,
    }


def render_json(report: Dict[str, Any]) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False)


def render_csv(rows: Sequence[Dict[str, Any]], columns: List[str]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


@lru_cache(maxsize=1)
def load_schema() -> Dict[str, Any]:
    with open(SCHEMA_PATH, "r", encoding="utf-8") as f:
        return json.load(f)


def validate_report(report: Dict[str, Any]) -> None:
    """Raise jsonschema.ValidationError when the report does not match the published schema"""
    jsonschema.validate(instance=report, schema=load_schema())
