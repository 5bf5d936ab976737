import math

import pytest

from dea_bench.data_model import RTS
from dea_bench.models import builtin_model
from dea_bench.outliers import ScreenCell, flag, screen
from dea_bench.synthetic import make_panel

SPECS = [builtin_model(n) for n in ("1A", "2A", "3A")]
YEARS = range(2008, 2013)


@pytest.fixture(scope="module")
def planted():
    return make_panel(20, YEARS, seed=4, planted="MUAC")


@pytest.fixture(scope="module")
def plain():
    return make_panel(20, YEARS, seed=4)


def _cell(dmu, score, status="Optimal"):
    return ScreenCell("m", 2010, "CRS", dmu, score, status)


def test_flag_rule():
    cells = [_cell("A", 2.0), _cell("A", 1.2), _cell("B", 1.6), _cell("B", 1.1), _cell("B", 1.0), _cell("C", 0.4)]
    flagged, share = flag(cells, 1.5, 0.5)
    assert flagged == ["A"]
    assert share["B"] == pytest.approx(1 / 3)


def test_infeasible_counts_as_hit_and_failed_is_skipped():
    cells = [_cell("A", math.inf, "Infeasible"), _cell("A", math.nan, "Failed")]
    flagged, share = flag(cells, 1.5, 1.0)
    assert flagged == ["A"] and share["A"] == 1.0


def test_planted_unit_flagged(planted):
    rep = screen(planted, SPECS, YEARS)
    assert rep.flagged == ["MUAC"]
    assert rep.max_score() == pytest.approx(2.0, abs=1e-6)
    assert rep.max_score(exclude=["MUAC"]) < 2.0
    text = rep.to_text()
    assert "MUAC" in text and "*" in text
    d = rep.to_dict()
    assert d["flagged"] == ["MUAC"] and all(c["score"] is None or c["score"] > 0 for c in d["cells"])


def test_plain_panel_has_no_outlier(plain):
    assert screen(plain, SPECS, YEARS, rts_set=[RTS.CRS]).flagged == []


def test_threshold_monotone(planted):
    sizes = [len(screen(planted, SPECS[:1], YEARS, threshold=t).flagged) for t in (1.2, 1.5, 3.0, 10.0)]
    assert sizes == sorted(sizes, reverse=True)
    assert sizes[-1] == 0


def test_argument_checks(planted):
    with pytest.raises(ValueError):
        screen(planted, [], YEARS)
    with pytest.raises(ValueError):
        screen(planted, SPECS, YEARS, threshold=1.0)
    with pytest.raises(ValueError):
        screen(planted, SPECS, YEARS, min_hit_share=0.0)


def test_missing_year_reported(planted):
    rep = screen(planted, SPECS[:1], [2008, 1990])
    assert rep.failed and rep.failed[0]["year"] == 1990
