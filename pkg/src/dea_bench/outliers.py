"""Super-efficiency screening for dominant, non-comparable units."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .composites import WeightScheme
from .data_model import Method, ModelSpec, Panel, RTS, Status
from .engine import DeaConfig, run_all
from .errors import DeaBenchError
from .models import materialize

DEFAULT_THRESHOLD = 1.5
DEFAULT_MIN_HIT_SHARE = 0.5


@dataclass(frozen=True)
class ScreenCell:
    model: str
    year: int
    rts: str
    dmu: str
    score: float  # +inf when the VRS program is infeasible
    status: str


@dataclass
class OutlierReport:
    threshold: float
    min_hit_share: float
    cells: list[ScreenCell] = field(default_factory=list)
    flagged: list[str] = field(default_factory=list)
    hit_share: dict[str, float] = field(default_factory=dict)
    failed: list[dict] = field(default_factory=list)

    @property
    def rule(self) -> str:
        return (
            f"flag a DMU when super-efficiency > {self.threshold:g} (or VRS-infeasible) "
            f"in at least {self.min_hit_share:.0%} of the runs it takes part in"
        )

    def max_score(self, exclude: Iterable[str] = ()) -> float:
        skip = set(exclude)
        vals = [c.score for c in self.cells if c.dmu not in skip and c.status == Status.OPTIMAL.value]
        return max(vals) if vals else math.nan

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "min_hit_share": self.min_hit_share,
            "rule": self.rule,
            "flagged": list(self.flagged),
            "hit_share": {k: self.hit_share[k] for k in sorted(self.hit_share)},
            "cells": [
                {
                    "model": c.model,
                    "year": c.year,
                    "rts": c.rts,
                    "dmu": c.dmu,
                    "score": c.score if math.isfinite(c.score) else None,
                    "status": c.status,
                }
                for c in self.cells
            ],
            "failed": list(self.failed),
        }

    def to_text(self) -> str:
        best: dict[str, float] = defaultdict(lambda: -math.inf)
        for c in self.cells:
            best[c.dmu] = max(best[c.dmu], c.score)
        lines = [self.rule, "", f"{'DMU':<10}{'hit share':>10}{'max score':>12}  flag"]
        for dmu in sorted(self.hit_share, key=lambda d: (-self.hit_share[d], d)):
            top = best[dmu]
            top_s = "infeasible" if math.isinf(top) else f"{top:.3f}"
            mark = "*" if dmu in self.flagged else ""
            lines.append(f"{dmu:<10}{self.hit_share[dmu]:>10.2f}{top_s:>12}  {mark}")
        if self.failed:
            lines.append("")
            lines.append(f"{len(self.failed)} cell(s) failed")
        return "\n".join(lines)


def flag(cells: Sequence[ScreenCell], threshold: float, min_hit_share: float) -> tuple[list[str], dict[str, float]]:
    runs: dict[str, int] = defaultdict(int)
    hits: dict[str, int] = defaultdict(int)
    for c in cells:
        if c.status == Status.FAILED.value:
            continue
        runs[c.dmu] += 1
        if c.score > threshold:
            hits[c.dmu] += 1
    share = {d: hits[d] / runs[d] for d in runs}
    flagged = sorted(d for d, s in share.items() if hits[d] and s >= min_hit_share)
    return flagged, share


def cell_from_result(model: str, year: int, rts: RTS, result) -> ScreenCell:
    if result.status is Status.INFEASIBLE:
        score = math.inf
    else:
        score = result.score
    return ScreenCell(model, year, rts.value, result.dmu.code, score, result.status.value)


def screen(
    panel: Panel,
    specs: Sequence[ModelSpec],
    years: Sequence[int],
    threshold: float = DEFAULT_THRESHOLD,
    min_hit_share: float = DEFAULT_MIN_HIT_SHARE,
    weights: WeightScheme = WeightScheme(),
    rts_set: Sequence[RTS] = (RTS.CRS, RTS.VRS),
) -> OutlierReport:
    """Run super-efficiency over every (model, year, RTS) and flag outliers.

    The report is advisory: exclusion only happens by listing the flagged
    codes in a model's ``excluded_dmus``.
    """
    if not specs:
        raise ValueError("screen needs at least one model")
    if not threshold > 1:
        raise ValueError("threshold must exceed 1")
    if not 0 < min_hit_share <= 1:
        raise ValueError("min_hit_share must lie in (0, 1]")
    report = OutlierReport(threshold, min_hit_share)
    for spec in specs:
        for year in years:
            try:
                fm = materialize(panel, spec, year, weights)
            except DeaBenchError as exc:
                report.failed.append({"model": spec.name, "year": year, "reason": str(exc)})
                continue
            if fm.n_dmu < 2:
                report.failed.append({"model": spec.name, "year": year, "reason": "fewer than two DMUs"})
                continue
            for rts in rts_set:
                cfg = DeaConfig(RTS(rts), Method.SUPER, two_stage_slacks=False)
                for res in run_all(fm, cfg):
                    report.cells.append(cell_from_result(spec.name, year, RTS(rts), res))
    report.flagged, report.hit_share = flag(report.cells, threshold, min_hit_share)
    return report
