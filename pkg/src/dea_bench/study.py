"""Cross-product study: models x years x returns to scale x DEA method.

Each grid cell yields one result table (or a recorded failure). On top of
the tables the report carries rankings, per-DMU dispersion across years,
trend-versus-fluctuation checks, per-model averages, scale efficiencies and
the super-efficiency outlier screen.
"""

from __future__ import annotations

import logging
import math
import zlib
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from . import outliers
from .bootstrap import CAVEAT, BootstrapConfig, bootstrap_dea
from .composites import WeightScheme
from .data_model import DeaResult, DmuId, FactorMatrix, Method, ModelSpec, Panel, RTS, Status
from .engine import DeaConfig, run_all
from .errors import DeaBenchError, InsufficientYears
from .ingest import summarize
from .models import materialize

log = logging.getLogger(__name__)

TREND_R2 = 0.6


@dataclass(frozen=True)
class StudyPlan:
    specs: tuple[ModelSpec, ...]
    years: tuple[int, ...]
    rts_set: tuple[RTS, ...] = (RTS.CRS, RTS.VRS)
    methods: tuple[Method, ...] = (Method.RADIAL, Method.SUPER, Method.SBM, Method.BOOTSTRAP)
    bootstrap: BootstrapConfig = BootstrapConfig()
    weights: WeightScheme = WeightScheme()
    unity_tolerance: float = 1e-6
    two_stage_slacks: bool = True
    trend_r2: float = TREND_R2
    outlier_threshold: float = outliers.DEFAULT_THRESHOLD
    min_hit_share: float = outliers.DEFAULT_MIN_HIT_SHARE

    def __post_init__(self):
        object.__setattr__(self, "specs", tuple(self.specs))
        object.__setattr__(self, "years", tuple(int(y) for y in self.years))
        object.__setattr__(self, "rts_set", tuple(RTS(r) for r in self.rts_set))
        object.__setattr__(self, "methods", tuple(Method(m) for m in self.methods))
        if not (self.specs and self.years and self.rts_set and self.methods):
            raise ValueError("models, years, RTS set and methods must all be non-empty")
        names = [s.name for s in self.specs]
        if len(set(names)) != len(names):
            raise ValueError("model names must be unique within a plan")

    @property
    def n_cells(self) -> int:
        return len(self.specs) * len(self.years) * len(self.rts_set) * len(self.methods)


class CellKey(NamedTuple):
    model: str
    year: int
    rts: RTS
    method: Method

    @property
    def filename(self) -> str:
        return f"{self.model}_{self.year}_{self.rts.value}_{self.method.value}.csv"


@dataclass(frozen=True)
class TableRow:
    dmu: DmuId
    score: float
    status: Status
    rank: int | None = None
    extra: Mapping[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class ResultTable:
    key: CellKey
    rows: tuple[TableRow, ...]
    dropped: tuple = ()

    def scores(self) -> dict[str, float]:
        return {r.dmu.code: r.score for r in self.rows if r.status is Status.OPTIMAL}


@dataclass(frozen=True)
class TrendResult:
    kind: str  # "Trend" or "Fluctuation"
    slope: float
    r_squared: float
    zero_spread: bool = False


@dataclass
class StudyReport:
    plan: StudyPlan
    tables: dict[CellKey, ResultTable] = field(default_factory=dict)
    failed: dict[CellKey, str] = field(default_factory=dict)
    outlier_report: outliers.OutlierReport | None = None
    notes: list[str] = field(default_factory=list)

    def table(self, model: str, year: int, rts, method) -> ResultTable:
        return self.tables[CellKey(model, year, RTS(rts), Method(method))]


def cell_seed(master: int, key: CellKey) -> int:
    """Per-cell bootstrap seed, independent of the order cells are computed in."""
    tag = zlib.crc32(f"{key.model}|{key.year}|{key.rts.value}".encode())
    seq = np.random.SeedSequence([master, tag])
    return int(seq.generate_state(1, np.uint64)[0])


def dense_rank(scores: Sequence[float], tol: float = 1e-6) -> list[int | None]:
    """Dense ranks, best (highest) first; NaN gets no rank, +inf ranks first.

    Scores within ``tol`` of the previous distinct value share its rank.
    """
    order = sorted(
        (i for i, s in enumerate(scores) if not math.isnan(s)),
        key=lambda i: -scores[i],
    )
    ranks: list[int | None] = [None] * len(scores)
    current, anchor = 0, None
    for i in order:
        s = scores[i]
        if anchor is None or not (s == anchor or abs(s - anchor) <= tol):
            current += 1
            anchor = s
        ranks[i] = current
    return ranks


def rank(table: Sequence[DeaResult], unity_tolerance: float = 1e-6) -> dict[DmuId, int]:
    """Dense ranking of a result table, descending by score.

    VRS-infeasible super-efficiency results rank ahead of every finite
    score (no other unit can envelop them); failed results are unranked.
    """
    scores = []
    for r in table:
        if r.status is Status.OPTIMAL:
            scores.append(r.score)
        elif r.status is Status.INFEASIBLE and r.method is Method.SUPER:
            scores.append(math.inf)
        else:
            scores.append(math.nan)
    ranks = dense_rank(scores, unity_tolerance)
    return {r.dmu: k for r, k in zip(table, ranks) if k is not None}


def trend_check(scores_by_year: Mapping[int, float] | Sequence[float], r2_threshold: float = TREND_R2) -> TrendResult:
    """Least-squares line through a score series; ``Trend`` when R^2 clears the bar."""
    if isinstance(scores_by_year, Mapping):
        items = sorted(scores_by_year.items())
        x = np.array([k for k, _ in items], dtype=float)
        y = np.array([v for _, v in items], dtype=float)
    else:
        y = np.asarray(scores_by_year, dtype=float)
        x = np.arange(y.size, dtype=float)
    if y.size < 3:
        raise InsufficientYears("trend check needs at least three years")
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    slope = float(xc @ yc) / sxx
    if syy <= 1e-24:
        return TrendResult("Fluctuation", 0.0, math.nan, zero_spread=True)
    r2 = float(xc @ yc) ** 2 / (sxx * syy)
    return TrendResult("Trend" if r2 >= r2_threshold else "Fluctuation", slope, r2)


def _series(report: StudyReport, model: str, rts: RTS, method: Method) -> dict[str, dict[int, float]]:
    out: dict[str, dict[int, float]] = defaultdict(dict)
    for key, table in report.tables.items():
        if key.model == model and key.rts is rts and key.method is method:
            for code, s in table.scores().items():
                out[code][key.year] = s
    return out


def dispersion(report: StudyReport, model: str, rts, method) -> dict[str, dict]:
    """Per-DMU five-number summary, IQR and stddev of scores across years."""
    rts, method = RTS(rts), Method(method)
    years = {k.year for k in report.tables if k.model == model and k.rts is rts and k.method is method}
    if len(years) < 2:
        raise InsufficientYears(f"{model}/{rts.value}/{method.value} covers {len(years)} year(s)")
    out = {}
    for code, by_year in sorted(_series(report, model, rts, method).items()):
        if len(by_year) < 2:
            continue
        s = summarize(list(by_year.values()))
        s.pop("degenerate")
        s["iqr"] = s["q3"] - s["q1"]
        s["n_years"] = len(by_year)
        out[code] = s
    return out


def model_averages(report: StudyReport) -> list[dict]:
    """Mean radial score per model and RTS.

    ``mean_all`` averages every optimal DMU-year; ``mean_shared`` keeps only
    DMU-years present in every model's table for that year and RTS, so
    models with different exclusions are compared on the same population.
    """
    radial = {k: t for k, t in report.tables.items() if k.method is Method.RADIAL}
    rows = []
    for rts in report.plan.rts_set:
        shared: dict[int, set] = {}
        for year in report.plan.years:
            sets = [
                set(radial[k].scores())
                for k in radial
                if k.rts is rts and k.year == year
            ]
            if len(sets) == len(report.plan.specs):
                shared[year] = set.intersection(*sets) if sets else set()
        for spec in report.plan.specs:
            all_scores, shared_scores = [], []
            for k, t in radial.items():
                if k.model != spec.name or k.rts is not rts:
                    continue
                sc = t.scores()
                all_scores.extend(sc.values())
                common = shared.get(k.year, set())
                shared_scores.extend(v for c, v in sc.items() if c in common)
            if not all_scores:
                continue
            rows.append(
                {
                    "model": spec.name,
                    "rts": rts.value,
                    "mean_all": float(np.mean(all_scores)),
                    "n_all": len(all_scores),
                    "mean_shared": float(np.mean(shared_scores)) if shared_scores else None,
                    "n_shared": len(shared_scores),
                }
            )
    return rows


def trends(report: StudyReport) -> list[dict]:
    out = []
    for key in sorted({(k.model, k.rts, k.method) for k in report.tables}, key=lambda t: (t[0], t[1].value, t[2].value)):
        model, rts, method = key
        for code, by_year in sorted(_series(report, model, rts, method).items()):
            if len(by_year) < 3:
                continue
            t = trend_check(by_year, report.plan.trend_r2)
            out.append(
                {
                    "model": model,
                    "rts": rts.value,
                    "method": method.value,
                    "dmu": code,
                    "kind": t.kind,
                    "slope": t.slope,
                    "r_squared": t.r_squared,
                    "zero_spread": t.zero_spread,
                }
            )
    return out


def _rows_from_results(results: Sequence[DeaResult], tol: float) -> tuple[TableRow, ...]:
    ranks = rank(results, tol)
    return tuple(TableRow(r.dmu, r.score, r.status, ranks.get(r.dmu)) for r in results)


def _bootstrap_rows(fm: FactorMatrix, cfg: DeaConfig, bcfg: BootstrapConfig, tol: float) -> tuple[TableRow, ...]:
    res = bootstrap_dea(fm, cfg, bcfg)
    scores = [r.bias_corrected_score for r in res]
    ranks = dense_rank(scores, tol)
    rows = []
    for r, k in zip(res, ranks):
        ok = math.isfinite(r.bias_corrected_score)
        rows.append(
            TableRow(
                r.dmu,
                r.bias_corrected_score,
                Status.OPTIMAL if ok else Status.FAILED,
                k,
                {
                    "original_score": r.original_score,
                    "bias": r.bias,
                    "ci_lower": r.ci_lower,
                    "ci_upper": r.ci_upper,
                },
            )
        )
    return tuple(rows)


def _run_cell(fm: FactorMatrix, key: CellKey, plan: StudyPlan) -> ResultTable:
    cfg = DeaConfig(
        key.rts,
        Method.RADIAL if key.method is Method.BOOTSTRAP else key.method,
        plan.unity_tolerance,
        plan.two_stage_slacks,
    )
    if key.method is Method.BOOTSTRAP:
        bcfg = BootstrapConfig(
            plan.bootstrap.replications,
            cell_seed(plan.bootstrap.seed, key),
            plan.bootstrap.bandwidth_rule,
            plan.bootstrap.confidence_level,
        )
        rows = _bootstrap_rows(fm, cfg, bcfg, plan.unity_tolerance)
    else:
        if key.method is Method.SUPER and fm.n_dmu < 2:
            raise DeaBenchError("super-efficiency needs at least two DMUs")
        rows = _rows_from_results(run_all(fm, cfg), plan.unity_tolerance)
    return ResultTable(key, rows, fm.dropped)


def run_study(panel: Panel, plan: StudyPlan) -> StudyReport:
    """Compute every cell of ``plan``; failures are recorded, never raised."""
    report = StudyReport(plan)
    for spec in plan.specs:
        if spec.factor_warning:
            report.notes.append(
                f"model {spec.name} uses {spec.n_factors} factors; more than four inflates the efficient set"
            )
        for year in plan.years:
            try:
                fm = materialize(panel, spec, year, plan.weights)
                fm_error = None
            except DeaBenchError as exc:
                fm, fm_error = None, str(exc)
            for rts in plan.rts_set:
                for method in plan.methods:
                    key = CellKey(spec.name, year, rts, method)
                    if fm is None:
                        report.failed[key] = fm_error
                        continue
                    try:
                        report.tables[key] = _run_cell(fm, key, plan)
                    except DeaBenchError as exc:
                        log.warning("cell %s failed: %s", key.filename, exc)
                        report.failed[key] = f"{type(exc).__name__}: {exc}"
    if Method.BOOTSTRAP in plan.methods:
        report.notes.append(CAVEAT)
    if Method.SUPER in plan.methods:
        report.outlier_report = _screen_from_tables(report)
    return report


def _screen_from_tables(report: StudyReport) -> outliers.OutlierReport:
    plan = report.plan
    rep = outliers.OutlierReport(plan.outlier_threshold, plan.min_hit_share)
    for key in sorted(report.tables, key=lambda k: (k.model, k.year, k.rts.value)):
        if key.method is not Method.SUPER:
            continue
        for row in report.tables[key].rows:
            score = math.inf if row.status is Status.INFEASIBLE else row.score
            rep.cells.append(outliers.ScreenCell(key.model, key.year, key.rts.value, row.dmu.code, score, row.status.value))
    for key, reason in report.failed.items():
        if key.method is Method.SUPER:
            rep.failed.append({"model": key.model, "year": key.year, "rts": key.rts.value, "reason": reason})
    rep.flagged, rep.hit_share = outliers.flag(rep.cells, plan.outlier_threshold, plan.min_hit_share)
    return rep


def scale_efficiencies(report: StudyReport) -> list[dict]:
    """CRS/VRS radial score ratio per model, year and DMU where both exist."""
    out = []
    for key, crs_t in sorted(report.tables.items(), key=lambda kv: (kv[0].model, kv[0].year)):
        if key.method is not Method.RADIAL or key.rts is not RTS.CRS:
            continue
        vrs_key = key._replace(rts=RTS.VRS)
        if vrs_key not in report.tables:
            continue
        vrs_scores = report.tables[vrs_key].scores()
        for code, c in crs_t.scores().items():
            v = vrs_scores.get(code)
            if v:
                out.append({"model": key.model, "year": key.year, "dmu": code, "scale_efficiency": c / v})
    return out


def per_dmu_means(report: StudyReport, method: Method = Method.RADIAL) -> list[dict]:
    names = {}
    acc: dict[tuple, list] = defaultdict(list)
    for key, t in report.tables.items():
        if key.method is not method:
            continue
        for r in t.rows:
            if r.status is Status.OPTIMAL:
                acc[(key.model, key.rts.value, r.dmu.code)].append(r.score)
                names[r.dmu.code] = r.dmu.display_name
    return [
        {
            "model": m,
            "rts": rts,
            "dmu": code,
            "display_name": names[code],
            "mean_score": float(np.mean(v)),
            "n_years": len(v),
        }
        for (m, rts, code), v in sorted(acc.items())
    ]


def iter_dispersion(report: StudyReport) -> Iterable[tuple[tuple, dict]]:
    combos = sorted({(k.model, k.rts, k.method) for k in report.tables}, key=lambda t: (t[0], t[1].value, t[2].value))
    for model, rts, method in combos:
        try:
            yield (model, rts, method), dispersion(report, model, rts, method)
        except InsufficientYears:
            continue
