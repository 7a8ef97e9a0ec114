"""Deterministic report files: JSON, CSV, and a digest manifest.

Reports must be byte-identical for identical (config, seed) runs, so floats
are written with 17 significant digits (round-trip exact for IEEE doubles),
JSON keys are sorted, and nothing except the manifest run id carries a
timestamp.  Non-finite floats (possible in summaries, e.g. an exceedance
ratio at a zero-hit cell) are encoded as the strings "inf"/"-inf"/"nan"
because JSON has no literal for them.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .experiments import TheoremReport

try:
    from importlib.metadata import PackageNotFoundError, version

    _VERSION = version("hardedge")
except PackageNotFoundError:  # pragma: no cover - source tree without install
    _VERSION = "0+unknown"

__all__ = ["Manifest", "render_csv", "render_json", "write_report", "file_digest", "run_id_for"]


def _plain(value):
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, (dict,)):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def _cell(value) -> str:
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def render_csv(report: TheoremReport) -> str:
    lines = [",".join(report.columns)]
    for row in report.rows:
        lines.append(",".join(_cell(row[c]) for c in report.columns))
    return "\n".join(lines) + "\n"


def render_json(report: TheoremReport) -> str:
    payload = {
        "theorem": report.theorem,
        "passed": report.passed,
        "config": _plain(report.config),
        "columns": list(report.columns),
        "rows": [_plain(row) for row in report.rows],
        "summary": _plain(report.summary),
        "failures": list(report.failures),
    }
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def run_id_for(config: dict, when: float | None = None) -> str:
    stamp = time.strftime("%Y%m%dT%H%M%SZ", time.gmtime(when))
    blob = json.dumps(_plain(config), sort_keys=True).encode()
    return f"{stamp}-{hashlib.sha256(blob).hexdigest()[:12]}"


@dataclass(frozen=True)
class Manifest:
    """Run identity plus sha256 digests of the artifacts it produced."""

    run_id: str
    tool: str
    version: str
    config: dict
    artifacts: dict

    def render(self) -> str:
        payload = {
            "run_id": self.run_id,
            "tool": self.tool,
            "version": self.version,
            "config": _plain(self.config),
            "artifacts": self.artifacts,
        }
        return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_report(report: TheoremReport, outdir, name: str | None = None) -> dict:
    """Write {name}.json, {name}.csv, and manifest.json under outdir.

    Returns {"json": path, "csv": path, "manifest": path}.  The manifest is
    rewritten per call; multi-report runs merge by calling with the same
    outdir and letting the caller collect digests instead.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    base = name if name is not None else report.theorem
    json_path = outdir / f"{base}.json"
    csv_path = outdir / f"{base}.csv"
    json_path.write_text(render_json(report), encoding="utf-8")
    csv_path.write_text(render_csv(report), encoding="utf-8")
    manifest = Manifest(
        run_id=run_id_for(report.config),
        tool="hardedge",
        version=_VERSION,
        config=report.config,
        artifacts={
            json_path.name: file_digest(json_path),
            csv_path.name: file_digest(csv_path),
        },
    )
    manifest_path = outdir / "manifest.json"
    manifest_path.write_text(manifest.render(), encoding="utf-8")
    return {"json": json_path, "csv": csv_path, "manifest": manifest_path}
