"""Deterministic report emission: JSON verdicts, CSV tables, text summary.

All floats are rounded to 12 significant digits before serialization and
keys are sorted, so two runs on identical inputs produce byte-identical
artifacts.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

__all__ = ["round_sig", "emit_report"]

PRECISION = 12


def round_sig(x: float, digits: int = PRECISION) -> float:
    """Round to ``digits`` significant decimal digits."""
    if not math.isfinite(x):
        return x
    return float(f"{x:.{digits}g}")


def _canonical(obj):
    if isinstance(obj, float):
        return round_sig(obj)
    if isinstance(obj, dict):
        return {str(k): _canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    return obj


def _format_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.{PRECISION}g}"
    return str(value)


def emit_report(results: dict, output_dir) -> list[Path]:
    """Write report.json, one CSV per table, and a plain-text summary.

    ``results`` may carry three optional keys:

    - "report":  arbitrary JSON-serializable mapping -> report.json
    - "tables":  {name: (header, rows)}              -> <name>.csv
    - "summary": list of lines                        -> summary.txt
    """
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    report_path = out / "report.json"
    payload = _canonical(results.get("report", {}))
    report_path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    written.append(report_path)

    for name, (header, rows) in sorted(results.get("tables", {}).items()):
        table_path = out / f"{name}.csv"
        with open(table_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(list(header))
            for row in rows:
                writer.writerow([_format_cell(v) for v in row])
        written.append(table_path)

    summary_path = out / "summary.txt"
    lines = list(results.get("summary", []))
    summary_path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    written.append(summary_path)
    return written
