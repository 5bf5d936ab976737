"""Write a study report to disk: per-table CSVs, summary JSON, plot data.

All output is deterministic: rows and keys are sorted, floats use
``repr`` (shortest round-trip form), NaN/inf become ``null`` in JSON and
empty cells in CSV, and nothing time-dependent is recorded.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .data_model import Method
from .ingest import IngestReport
from .models import model_to_dict
from .study import (
    StudyReport,
    iter_dispersion,
    model_averages,
    per_dmu_means,
    scale_efficiencies,
    trends,
)

TABLE_COLUMNS = ("dmu", "score", "rank", "status")
BOOTSTRAP_COLUMNS = ("original_score", "bias", "ci_lower", "ci_upper")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else ""
    return str(value)


def _clean(obj):
    """Recursively replace non-finite floats with None for strict JSON."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dump_json(obj, path: Path) -> None:
    text = json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")


def write_table(table, path: Path) -> None:
    extra = BOOTSTRAP_COLUMNS if table.key.method is Method.BOOTSTRAP else ()
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TABLE_COLUMNS + extra)
        for row in table.rows:
            w.writerow(
                [row.dmu.code, _cell(row.score), _cell(row.rank), row.status.value]
                + [_cell(row.extra.get(c)) for c in extra]
            )


def summary(report: StudyReport, ingest: IngestReport | None = None) -> dict:
    plan = report.plan
    disp = [
        {"model": m, "rts": r.value, "method": meth.value, "dmu": code, **stats}
        for (m, r, meth), per_dmu in iter_dispersion(report)
        for code, stats in per_dmu.items()
    ]
    out = {
        "plan": {
            "models": [model_to_dict(s) for s in plan.specs],
            "years": list(plan.years),
            "rts": [r.value for r in plan.rts_set],
            "methods": [m.value for m in plan.methods],
            "bootstrap": {
                "replications": plan.bootstrap.replications,
                "seed": plan.bootstrap.seed,
                "bandwidth_rule": plan.bootstrap.bandwidth_rule,
                "confidence_level": plan.bootstrap.confidence_level,
            },
            "weights": {"kind": plan.weights.kind.value, "w_pan": plan.weights.w_pan, "w_ciu": plan.weights.w_ciu},
            "unity_tolerance": plan.unity_tolerance,
            "trend_r2": plan.trend_r2,
        },
        "tables": len(report.tables),
        "expected_tables": plan.n_cells,
        "failed_cells": [
            {"model": k.model, "year": k.year, "rts": k.rts.value, "method": k.method.value, "reason": v}
            for k, v in sorted(report.failed.items(), key=lambda kv: kv[0].filename)
        ],
        "dropped_dmus": sorted(
            {
                (k.model, k.year, str(d.dmu), d.factor, d.reason)
                for k, t in report.tables.items()
                for d in t.dropped
            }
        ),
        "model_averages": model_averages(report),
        "scale_efficiency": scale_efficiencies(report),
        "dispersion": disp,
        "trends": trends(report),
        "outliers": report.outlier_report.to_dict() if report.outlier_report else None,
        "notes": list(report.notes),
    }
    out["dropped_dmus"] = [
        {"model": m, "year": y, "dmu": c, "factor": f, "reason": r} for m, y, c, f, r in out["dropped_dmus"]
    ]
    if ingest is not None:
        out["ingest"] = {k: v for k, v in ingest.to_dict().items() if k != "dropped"}
    return out


def _write_rows(path: Path, header, rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_cell(r[h]) for h in header])


def write_report(report: StudyReport, out_dir: str | Path, ingest: IngestReport | None = None) -> Path:
    """Write every artifact of ``report`` under ``out_dir`` and return it."""
    out = Path(out_dir)
    tables_dir = out / "tables"
    tables_dir.mkdir(parents=True, exist_ok=True)
    for key in sorted(report.tables, key=lambda k: k.filename):
        write_table(report.tables[key], tables_dir / key.filename)
    dump_json(summary(report, ingest), out / "summary.json")
    if ingest is not None:
        dump_json(ingest.to_dict(), out / "ingest_report.json")

    box = []
    for key in sorted(report.tables, key=lambda k: k.filename):
        for row in report.tables[key].rows:
            if math.isfinite(row.score):
                box.append(
                    {
                        "model": key.model,
                        "rts": key.rts.value,
                        "method": key.method.value,
                        "dmu": row.dmu.code,
                        "year": key.year,
                        "score": row.score,
                    }
                )
    box.sort(key=lambda r: (r["model"], r["rts"], r["method"], r["dmu"], r["year"]))
    _write_rows(out / "boxplot_data.csv", ("model", "rts", "method", "dmu", "year", "score"), box)
    _write_rows(
        out / "map_data.csv",
        ("model", "rts", "dmu", "display_name", "mean_score", "n_years"),
        per_dmu_means(report),
    )
    return out

