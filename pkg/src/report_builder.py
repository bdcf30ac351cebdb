"""JSON report envelopes and the golden dimension file."""

from __future__ import annotations

import json
import logging
import os
import sys
from typing import Dict, List, Optional

from config import settings
from src.errors import UsageError

logger = logging.getLogger(__name__)


def envelope(command: str, field: str, seed: Optional[int], payload: dict) -> dict:
    """Wrap a payload with the metadata every report carries"""
    report = {
        "tool": settings.TOOL_NAME,
        "version": settings.TOOL_VERSION,
        "basis_ordering": settings.BASIS_ORDERING,
        "packing_layout": settings.PACKING_LAYOUT,
        "command": command,
        "field": field,
        "seed": seed,
    }
    report.update(payload)
    return report


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def write_report(report: dict, output_path: Optional[str] = None) -> None:
    """Write the JSON report to a file, or to stdout when no path is given"""
    text = dumps(report)
    if output_path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(output_path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(output_path, "w", encoding="utf-8") as f:
        f.write(text)
    logger.info("Saved report to: %s", output_path)


# -- golden file -------------------------------------------------------------

def golden_key(algebra: str, field: str, mode: str) -> str:
    return f"{algebra}|{field}|{mode}"


def load_golden(path: str) -> Dict[str, int]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read golden file {path}: {e}")
    dims = data.get("dimensions", data)
    return {str(k): int(v) for k, v in dims.items()}


def compare_golden(golden: Dict[str, int], computed: Dict[str, int]) -> dict:
    """Drift of computed dimensions against the golden map.

    Keys the golden file does not record are listed as unrecorded, not drift.
    """
    drift: List[dict] = []
    unrecorded: List[str] = []
    for key, dim in computed.items():
        if key not in golden:
            unrecorded.append(key)
        elif golden[key] != dim:
            drift.append({"key": key, "expected": golden[key], "computed": dim})
    return {"ok": not drift, "drift": drift, "unrecorded": unrecorded}


def write_golden(path: str, dims: Dict[str, int]) -> None:
    report = {
        "tool": settings.TOOL_NAME,
        "version": settings.TOOL_VERSION,
        "basis_ordering": settings.BASIS_ORDERING,
        "packing_layout": settings.PACKING_LAYOUT,
        "dimensions": dims,
    }
    write_report(report, path)
