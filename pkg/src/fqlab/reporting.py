"""Machine-readable experiment reports.

One JSON document per run, with fixed key order and floats printed at 12
significant digits, so identical configurations reproduce byte-identical
payloads.  The aggregator turns a directory of reports into one TSV
summary, one section per command.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, InvariantError

TOOL_VERSION = "0.1.0"


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise InvariantError(f"non-finite value {x} in a report")
    return format(x, ".12g")


def canonical_json(obj) -> str:
    """Deterministic JSON: dict insertion order, 12-significant-digit floats."""
    parts: list[str] = []
    _write(obj, parts)
    return "".join(parts)


def _write(obj, parts: list[str]) -> None:
    if isinstance(obj, dict):
        parts.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if not isinstance(k, str):
                raise ConfigError(f"report keys must be strings, got {k!r}")
            if i:
                parts.append(", ")
            parts.append(json.dumps(k))
            parts.append(": ")
            _write(v, parts)
        parts.append("}")
    elif isinstance(obj, (list, tuple)):
        parts.append("[")
        for i, v in enumerate(obj):
            if i:
                parts.append(", ")
            _write(v, parts)
        parts.append("]")
    elif isinstance(obj, np.ndarray):
        _write(obj.tolist(), parts)
    elif isinstance(obj, bool) or isinstance(obj, np.bool_):
        parts.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        parts.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        parts.append(_fmt_float(float(obj)))
    elif isinstance(obj, str):
        parts.append(json.dumps(obj))
    elif obj is None:
        parts.append("null")
    else:
        raise ConfigError(f"cannot serialize {type(obj).__name__} into a report")


@dataclass
class ExperimentReport:
    """A full run record; wall time is the only non-reproducible field."""

    command: str
    config: dict
    seed: int | None
    results: dict
    wall_time_ms: int

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "tool_version": TOOL_VERSION,
            "results": self.results,
            "wall_time_ms": self.wall_time_ms,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


def _scalar(v) -> str | None:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return _fmt_float(v)
    if isinstance(v, str):
        return v
    return None


def aggregate_reports(run_dir) -> str:
    """TSV summary of every *.json report in a directory.

    One section per command, columns are the union of that command's
    scalar result fields, rows sorted by (q, file name).  Tabs separate
    fields, lines end with a newline.
    """
    run_dir = Path(run_dir)
    if not run_dir.is_dir():
        raise ConfigError(f"{run_dir} is not a directory")
    groups: dict[str, list[tuple[str, dict]]] = {}
    for path in sorted(run_dir.glob("*.json")):
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path.name}: not valid JSON: {exc}") from None
        if not isinstance(doc, dict) or "command" not in doc or "results" not in doc:
            raise ConfigError(f"{path.name}: not a report document")
        groups.setdefault(doc["command"], []).append((path.name, doc["results"]))
    lines = ["# fqlab report"]
    if not groups:
        lines.append("file\tcommand")
    for command in sorted(groups):
        rows = groups[command]
        columns: list[str] = []
        for _, results in rows:
            for key, value in results.items():
                if _scalar(value) is not None and key not in columns:
                    columns.append(key)
        lines.append(f"# {command}")
        lines.append("\t".join(["file"] + columns))
        def sort_key(item):
            name, results = item
            q = results.get("q")
            return (q if isinstance(q, (int, float)) else math.inf, name)
        for name, results in sorted(rows, key=sort_key):
            cells = [name]
            for col in columns:
                v = results.get(col)
                s = _scalar(v)
                cells.append(s if s is not None else "")
            lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"
