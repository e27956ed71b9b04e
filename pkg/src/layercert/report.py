"""Run reports: schema-versioned JSON plus CSV plot data.

The JSON is byte-stable for a fixed config and seed: keys are sorted,
floats use repr, and per-stage wall-clock goes to a timings.csv sidecar
instead of the report so reruns diff clean. Disabled stages are absent
from the JSON, not null.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .config import RunConfig, config_to_ini

SCHEMA_ID = "layercert-report/1"


@dataclass
class RunReport:
    """Everything one pipeline run produced.

    stage_results maps stage name to a JSON-ready summary dict; a stage
    appears in exactly one of stage_results/stage_errors. tables maps CSV
    basename to (header, rows) for the plot-data files; timings are kept
    apart so the JSON stays deterministic.
    """

    config: RunConfig
    schema_id: str = SCHEMA_ID
    stage_results: dict = field(default_factory=dict)
    stage_errors: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    attachments: dict = field(default_factory=dict)  # name -> JSON-ready dict
    timings: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.stage_errors

    def to_json(self) -> str:
        body = {
            "schema": self.schema_id,
            "config": {
                "surface": self.config.surface_name,
                "surface_params": {k: list(v) if isinstance(v, tuple) else v
                                   for k, v in self.config.surface_params.items()},
                "a": self.config.a,
                "curvature_budget": self.config.curvature_budget,
                "stages": list(self.config.stages),
                "requested_stages": list(self.config.requested_stages),
                "added_stages": list(self.config.added_stages),
                "seed": self.config.seed,
                "quad_refine": self.config.quad_refine,
                "mesh": {k: list(v) if isinstance(v, tuple) else v
                         for k, v in self.config.mesh.items()},
                "tolerances": dict(self.config.tolerances),
                "ini": config_to_ini(self.config),
            },
            "stages": self.stage_results,
            "errors": self.stage_errors,
        }
        return json.dumps(body, sort_keys=True, indent=2) + "\n"


def _write_text(path: str, text: str):
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"writing {path}: {exc}") from exc


def _csv_text(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            repr(float(x)) if isinstance(x, float) else str(x) for x in row))
    return "\n".join(lines) + "\n"


def emit(report: RunReport, outdir: str) -> list:
    """Write report.json, timings.csv, and every stage table; return paths."""
    try:
        os.makedirs(outdir, exist_ok=True)
    except OSError as exc:
        raise OSError(f"creating {outdir}: {exc}") from exc
    paths = []

    path = os.path.join(outdir, "report.json")
    _write_text(path, report.to_json())
    paths.append(path)

    path = os.path.join(outdir, "timings.csv")
    rows = [(name, f"{report.timings[name]:.6f}") for name in report.timings]
    _write_text(path, _csv_text(("stage", "seconds"), rows))
    paths.append(path)

    for name in sorted(report.tables):
        header, rows = report.tables[name]
        path = os.path.join(outdir, f"{name}.csv")
        _write_text(path, _csv_text(header, rows))
        paths.append(path)

    for name in sorted(report.attachments):
        path = os.path.join(outdir, f"{name}.json")
        _write_text(path, json.dumps(report.attachments[name],
                                     sort_keys=True, indent=2) + "\n")
        paths.append(path)
    return paths
