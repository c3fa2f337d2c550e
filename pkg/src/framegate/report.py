"""Run reports: deterministic JSON artifacts and small human tables.

Reports round every float to six significant digits and keep a stable key
order, so re-running the same analysis on the same model yields byte-identical
files. Wall-clock timings would break that, so they are opt-in and excluded
by default.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional, Union

from . import __version__
from .design import GateReport
from .model import FrameModel
from .modelio import model_to_dict


def round6(value: Any) -> Any:
    """Recursively round floats to 6 significant digits for stable output."""
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return float(f"{value:.6g}")
    if isinstance(value, Mapping):
        return {k: round6(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round6(v) for v in value]
    return value


def model_digest(model: FrameModel) -> str:
    canonical = json.dumps(model_to_dict(model), sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()


@dataclass(frozen=True)
class RunReport:
    command: str
    model_name: str
    digest: str
    results: Mapping[str, Any]
    timings: Optional[Mapping[str, float]] = None
    tool: str = "framegate"
    version: str = field(default=__version__)

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "tool": self.tool,
            "version": self.version,
            "command": self.command,
            "model": {"name": self.model_name, "digest": self.digest},
            "results": round6(self.results),
        }
        if self.timings is not None:
            data["timings"] = round6(dict(self.timings))
        return data


def emit_report(report: RunReport, path: Optional[Union[str, Path]] = None) -> str:
    text = json.dumps(report.to_dict(), indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def format_gate_table(report: GateReport) -> str:
    """One line per gate row, plus a verdict."""
    lines = []
    for r in report.rows:
        flag = "PASS" if r.passed else "FAIL"
        lines.append(
            f"[{flag}] {r.name:<32s} {r.result:>12.6g} {r.units:<9s} "
            f"(target {'>=' if r.sense == 'min' else '<='} {r.target:g}, "
            f"margin {r.deviation_pct:+.2f}%)")
    lines.append(f"gate: {'PASS' if report.passed else 'FAIL'} "
                 f"({len(report.rows) - len(report.failing)}/{len(report.rows)} rows)")
    return "\n".join(lines)


def write_gate_csv(report: GateReport, path: Union[str, Path]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "target", "result", "units", "sense",
                         "deviation_pct", "passed"])
        for r in report.rows:
            writer.writerow([r.name, f"{r.target:.6g}", f"{r.result:.6g}", r.units,
                             r.sense, f"{r.deviation_pct:.6g}", r.passed])
