"""Synthetic provider panels for tests, demos and structural reproduction.

Units share a constant-returns Cobb-Douglas technology; each has a fixed
inefficiency level plus a year-specific output shock. Optionally one unit is
planted as a dominant outlier: a copy of the largest frontier unit with
every DEA input halved and the same outputs.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

import numpy as np

from .data_model import DmuId, DmuYearRecord, Panel
from .ingest import COLUMNS


def make_panel(
    n_dmus: int = 30,
    years: Sequence[int] = tuple(range(2008, 2019)),
    seed: int = 0,
    planted: str | None = None,
    volatility: float = 0.05,
    mix_volatility: float = 0.0,
) -> Panel:
    """Generate a valid panel.

    ``planted`` names the code of a dominant unit to add (for example
    ``"MUAC"``); ``volatility`` is the standard deviation of the log output
    shock per unit-year; ``mix_volatility`` perturbs each unit's output mix
    from year to year, which moves slacks far more than radial scores.
    """
    rng = np.random.default_rng(seed)
    size = np.exp(rng.uniform(-1.2, 1.2, n_dmus))
    # unit 0 is the largest provider and sits on the frontier; the rest are
    # strictly inside. Being output-maximal, it is the one unit whose VRS
    # super-efficiency is infeasible, and the planted copy shares that role.
    size[0] = 1.4 * size[1:].max() if n_dmus > 1 else size[0]
    eff = np.concatenate([[1.0], rng.uniform(0.55, 0.98, n_dmus - 1)])
    # staff share tracks size so every unit has a similar input mix; otherwise
    # the largest unit looks super-efficient under CRS purely by extrapolation
    share = np.clip(0.12 * size * rng.uniform(0.9, 1.1, n_dmus), 0.02, 0.95)
    accs = 2 * np.maximum(1, np.round(size)).astype(int)
    towers = 2 * np.maximum(1, np.round(4 * size * rng.uniform(0.5, 1.5, n_dmus))).astype(int)
    er_cost = rng.uniform(60.0, 120.0, n_dmus)
    ratio = rng.uniform(0.15, 0.4, n_dmus)
    terminal_mix = rng.uniform(0.6, 1.0, n_dmus)
    terminal_mix[0] = 0.8
    records = []
    for t, year in enumerate(years):
        growth = 1.0 + 0.02 * t
        for i in range(n_dmus):
            noise = 1.0 if i == 0 else rng.uniform(0.9, 1.1)
            atco = 1.0e5 * size[i] * growth * noise
            ciu_proxy = accs[i] + 0.27 * towers[i]
            # Cobb-Douglas index of the three inputs, exponents summing to 1
            index = (atco / 1e5) ** 0.6 * (10 * share[i]) ** 0.1 * ciu_proxy ** 0.3
            shock = 1.0 if i == 0 else np.exp(rng.normal(0.0, volatility))
            cfh = 2.0e5 * index * eff[i] * min(shock, 1.0 / eff[i])
            mix = terminal_mix[i]
            if i and mix_volatility:
                mix = float(np.clip(mix * np.exp(rng.normal(0.0, mix_volatility)), 0.05, 3.0))
            movements = cfh * mix / (1.0 + 0.27 * mix) / 0.9
            flight_hours = cfh - 0.27 * movements
            records.append(
                DmuYearRecord(
                    DmuId(f"D{i:02d}", f"Provider {i:02d}"),
                    int(year),
                    float(atco),
                    float(share[i]),
                    int(accs[i]),
                    int(towers[i]),
                    float(flight_hours),
                    float(movements),
                    float(er_cost[i]),
                    float(er_cost[i] * ratio[i]),
                )
            )
    if planted:
        base = [r for r in records if r.dmu.code == "D00"]
        for r in base:
            records.append(
                DmuYearRecord(
                    DmuId(planted, f"{planted} (planted)"),
                    r.year,
                    r.atco_hours / 2,
                    r.non_atco_share / 2,
                    r.acc_count // 2,
                    r.tower_count // 2,
                    r.flight_hours,
                    r.airport_movements,
                    r.er_unit_cost,
                    r.tnl_unit_cost,
                )
            )
    return Panel.from_records(records)


def write_csv(panel: Panel, path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(COLUMNS)
        for r in panel.records:
            w.writerow(
                [
                    r.dmu.code,
                    r.dmu.display_name,
                    r.year,
                    repr(r.atco_hours),
                    repr(r.non_atco_share),
                    r.acc_count,
                    r.tower_count,
                    repr(r.flight_hours),
                    repr(r.airport_movements),
                    "" if r.er_unit_cost is None else repr(r.er_unit_cost),
                    "" if r.tnl_unit_cost is None else repr(r.tnl_unit_cost),
                ]
            )
