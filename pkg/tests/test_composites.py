import numpy as np
import pytest
from hypothesis import given, strategies as st

from dea_bench.composites import (
    PAN_EUROPEAN_WEIGHT,
    WeightKind,
    WeightScheme,
    cfh,
    ciu,
    individual_weight,
    record_cfh_i,
    record_ciu_i,
)
from dea_bench.data_model import DmuId, DmuYearRecord
from dea_bench.errors import MissingCosts, NegativeInput
from dea_bench.models import factor_value


def _rec(**kw):
    base = dict(
        dmu=DmuId("X", "X"),
        year=2010,
        atco_hours=1000.0,
        non_atco_share=0.3,
        acc_count=2,
        tower_count=10,
        flight_hours=500.0,
        airport_movements=200.0,
        er_unit_cost=100.0,
        tnl_unit_cost=27.0,
    )
    base.update(kw)
    return DmuYearRecord(**base)


def test_cfh_reference_value():
    assert cfh(100, 100, 0.27) == 127


def test_cfh_without_movements():
    assert cfh(412.5, 0, 0.27) == 412.5


def test_ciu_value():
    assert ciu(3, 10, 0.5) == 8.0


def test_negative_rejected():
    with pytest.raises(NegativeInput):
        cfh(-1, 0, 0.27)
    with pytest.raises(NegativeInput):
        ciu(1, -2, 0.27)
    with pytest.raises(NegativeInput):
        cfh(1, 1, 0.0)


def test_individual_weight():
    assert individual_weight(100.0, 27.0) == 0.27
    with pytest.raises(MissingCosts):
        individual_weight(None, 27.0)
    with pytest.raises(NegativeInput):
        individual_weight(0.0, 1.0)


def test_record_composites():
    r = _rec()
    assert record_cfh_i(r) == 500.0 + 0.27 * 200.0
    assert record_ciu_i(r) == 2 + 0.27 * 10


def test_en_route_only_needs_no_costs():
    r = _rec(airport_movements=0.0, tower_count=0, er_unit_cost=None, tnl_unit_cost=None)
    assert record_cfh_i(r) == 500.0
    assert record_ciu_i(r) == 2.0


def test_missing_costs_raise():
    with pytest.raises(MissingCosts):
        record_cfh_i(_rec(er_unit_cost=None, tnl_unit_cost=None))


def test_uniform_costs_match_single_weight_bitwise():
    pan = WeightScheme()
    ind = WeightScheme(WeightKind.INDIVIDUAL)
    rng = np.random.default_rng(0)
    for _ in range(200):
        r = _rec(
            flight_hours=float(rng.uniform(1, 1e6)),
            airport_movements=float(rng.uniform(0, 1e6)),
            acc_count=int(rng.integers(1, 8)),
            tower_count=int(rng.integers(0, 40)),
        )
        for f in ("cfh", "ciu"):
            assert factor_value(r, f, pan) == factor_value(r, f, ind)
            assert factor_value(r, f, pan) == factor_value(r, f + "_i", pan)


def test_weight_scheme_validation():
    assert WeightScheme().ciu_weight == PAN_EUROPEAN_WEIGHT
    assert WeightScheme(w_ciu=0.5).ciu_weight == 0.5
    with pytest.raises(ValueError):
        WeightScheme(w_pan=0.0)
    with pytest.raises(ValueError):
        WeightScheme(w_ciu=-1.0)


@given(st.floats(0, 1e7), st.floats(0, 1e7), st.floats(1e-3, 10))
def test_cfh_monotone_in_weight(f, a, w):
    assert cfh(f, a, w) >= f
    assert cfh(f, a, 2 * w) >= cfh(f, a, w)
