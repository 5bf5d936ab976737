"""CSV panel ingestion, the data-quality year cut, and descriptive statistics."""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .composites import PAN_EUROPEAN_WEIGHT
from .data_model import DmuId, DmuYearRecord, Panel, validate_record
from .errors import EmptyPanel, InvalidRecord, SchemaMismatch, UnreadableFile, YearAbsent

COLUMNS = (
    "ansp_code",
    "ansp_name",
    "year",
    "atco_hours",
    "non_atco_share",
    "acc_count",
    "tower_count",
    "flight_hours",
    "airport_movements",
    "er_unit_cost",
    "tnl_unit_cost",
)
_OPTIONAL = {"er_unit_cost", "tnl_unit_cost"}

DEFAULT_MIN_YEAR = 2008


@dataclass(frozen=True)
class IngestOptions:
    min_year: int = DEFAULT_MIN_YEAR
    drop_invalid: bool = True
    strict: bool = False

    def __post_init__(self):
        if self.min_year < 1900:
            raise ValueError("min_year must be >= 1900")


@dataclass
class IngestReport:
    source: str
    source_rows: int = 0
    kept_rows: int = 0
    min_year: int = DEFAULT_MIN_YEAR
    dropped: list[dict] = field(default_factory=list)
    dmus_per_year: dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "source_rows": self.source_rows,
            "kept_rows": self.kept_rows,
            "dropped_rows": len(self.dropped),
            "min_year": self.min_year,
            "dropped": self.dropped,
            "dmus_per_year": {str(k): v for k, v in sorted(self.dmus_per_year.items())},
        }


def _number(text: str, name: str, integer: bool = False):
    text = text.strip()
    try:
        if integer:
            value = float(text)
            if not value.is_integer():
                raise ValueError
            return int(value)
        return float(text)
    except ValueError:
        raise ValueError(f"{name} not a number: {text!r}") from None


def _parse_row(raw: dict) -> DmuYearRecord:
    # short rows come back with None for the missing cells
    row = {k: (v or "") for k, v in raw.items() if k is not None}
    costs = {}
    for name in _OPTIONAL:
        text = row.get(name, "").strip()
        costs[name] = _number(text, name) if text else None
    return DmuYearRecord(
        dmu=DmuId(row["ansp_code"].strip(), row["ansp_name"].strip()),
        year=_number(row["year"], "year", integer=True),
        atco_hours=_number(row["atco_hours"], "atco_hours"),
        non_atco_share=_number(row["non_atco_share"], "non_atco_share"),
        acc_count=_number(row["acc_count"], "acc_count", integer=True),
        tower_count=_number(row["tower_count"], "tower_count", integer=True),
        flight_hours=_number(row["flight_hours"], "flight_hours"),
        airport_movements=_number(row["airport_movements"], "airport_movements"),
        **costs,
    )


def load_panel(path: str | Path, opts: IngestOptions = IngestOptions()) -> tuple[Panel, IngestReport]:
    """Read a panel CSV, dropping pre-``min_year``, invalid, and duplicate rows.

    Every source row is either kept or listed in ``report.dropped`` with its
    line number and reasons. With ``strict`` the first bad row raises
    :class:`InvalidRecord`; with ``drop_invalid=False`` all bad rows are
    collected and raised together. Rows that are merely out of the year
    window are always dropped quietly.
    """
    path = Path(path)
    report = IngestReport(source=str(path), min_year=opts.min_year)
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise UnreadableFile(f"cannot open {path}: {exc}") from exc
    with fh:
        try:
            reader = csv.DictReader(fh)
            header = reader.fieldnames
            if header is None:
                raise SchemaMismatch(f"{path} has no header")
            missing = [c for c in COLUMNS if c not in [h.strip() for h in header]]
            if missing:
                raise SchemaMismatch(f"{path} lacks required column(s): {', '.join(missing)}")
            reader.fieldnames = [h.strip() for h in header]
            rows = list(reader)
        except UnicodeDecodeError as exc:
            raise UnreadableFile(f"{path} is not UTF-8: {exc}") from exc
        except csv.Error as exc:
            raise UnreadableFile(f"{path}: {exc}") from exc

    report.source_rows = len(rows)
    kept: dict[tuple[str, int], DmuYearRecord] = {}
    invalid = []
    for lineno, row in enumerate(rows, start=2):
        code = (row.get("ansp_code") or "").strip()
        entry = {"line": lineno, "dmu": code, "year": (row.get("year") or "").strip()}
        try:
            rec = _parse_row(row)
            reasons = validate_record(rec)
        except ValueError as exc:
            rec, reasons = None, [str(exc)]
        if rec is not None and not reasons:
            if rec.year < opts.min_year:
                report.dropped.append({**entry, "reasons": [f"year before {opts.min_year}"]})
                continue
            key = (rec.dmu.code, rec.year)
            if key in kept:
                report.dropped.append({**entry, "reasons": ["duplicate (dmu, year)"]})
                continue
            kept[key] = rec
            continue
        if opts.strict:
            raise InvalidRecord(f"line {lineno}: {'; '.join(reasons)}")
        report.dropped.append({**entry, "reasons": reasons})
        invalid.append(f"line {lineno}: {'; '.join(reasons)}")

    if invalid and not opts.drop_invalid:
        raise InvalidRecord("; ".join(invalid))
    if not kept:
        raise EmptyPanel(f"no usable rows in {path} from {opts.min_year} on")
    panel = Panel.from_records(kept.values())
    report.kept_rows = len(panel)
    report.dmus_per_year = dict(Counter(r.year for r in panel.records))
    return panel, report


# Table-style indicators; cfh uses the pan-European weight
INDICATORS = (
    "atco_hours",
    "non_atco_share",
    "acc_count",
    "tower_count",
    "flight_hours",
    "airport_movements",
    "cfh",
)


@dataclass(frozen=True)
class IndicatorStats:
    indicator: str
    n: int
    min: float
    median: float
    q3: float
    max: float
    stddev: float
    degenerate: bool = False


def summarize(values) -> dict:
    """Order statistics with type-7 (linear) quartiles and sample stddev."""
    v = np.asarray(values, dtype=float)
    q1, med, q3 = np.percentile(v, [25, 50, 75], method="linear")
    degenerate = v.size < 2
    return {
        "min": float(v.min()),
        "q1": float(q1),
        "median": float(med),
        "q3": float(q3),
        "max": float(v.max()),
        "stddev": 0.0 if degenerate else float(np.std(v, ddof=1)),
        "degenerate": degenerate,
    }


def descriptive_stats(panel: Panel, year: int, w: float = PAN_EUROPEAN_WEIGHT) -> list[IndicatorStats]:
    recs = panel.year_records(year)
    if not recs:
        raise YearAbsent(f"year {year} not in panel")
    rows = []
    for name in INDICATORS:
        if name == "cfh":
            values = [r.flight_hours + w * r.airport_movements for r in recs]
        else:
            values = [float(getattr(r, name)) for r in recs]
        s = summarize(values)
        rows.append(
            IndicatorStats(name, len(values), s["min"], s["median"], s["q3"], s["max"], s["stddev"], s["degenerate"])
        )
    return rows


def format_stats(rows: list[IndicatorStats]) -> str:
    head = f"{'Indicator':<20}{'Min':>14}{'Median':>14}{'3rd Q':>14}{'Max':>14}{'Std.Dev.':>14}"
    lines = [head, "-" * len(head)]
    for r in rows:
        sd = "n/a" if r.degenerate else f"{r.stddev:,.2f}"
        lines.append(f"{r.indicator:<20}{r.min:>14,.2f}{r.median:>14,.2f}{r.q3:>14,.2f}{r.max:>14,.2f}{sd:>14}")
    return "\n".join(lines)

