import json

import pytest

from dea_bench.composites import WeightKind, WeightScheme
from dea_bench.data_model import DmuId, DmuYearRecord, ModelSpec, Panel, RTS
from dea_bench.errors import EmptyPanel, MissingFactorData, UnknownFactor, UnknownModel, YearAbsent
from dea_bench.models import (
    BUILTIN_NAMES,
    OUTLIER_CODE,
    builtin_model,
    load_models,
    materialize,
    model_from_dict,
    model_to_dict,
)


def _rec(code, year=2010, costs=True, **kw):
    base = dict(
        atco_hours=100.0,
        non_atco_share=0.3,
        acc_count=2,
        tower_count=4,
        flight_hours=50.0,
        airport_movements=20.0,
    )
    base.update(kw)
    er, tnl = (100.0, 30.0) if costs else (None, None)
    return DmuYearRecord(DmuId(code, code), year, **base, er_unit_cost=er, tnl_unit_cost=tnl)


@pytest.fixture
def panel():
    return Panel.from_records(
        [
            _rec("B"),
            _rec("A", atco_hours=200.0),
            _rec(OUTLIER_CODE, airport_movements=0.0, tower_count=0, costs=False),
            _rec("C", costs=False),
        ]
    )


def test_builtin_shapes():
    m1 = builtin_model("1A")
    assert m1.input_factors == ("atco_hours", "non_atco_share", "ciu")
    assert m1.output_factors == ("flight_hours", "airport_movements")
    assert builtin_model("2B").output_factors == ("cfh",)
    assert builtin_model("3A").input_factors[-1] == "ciu_i"
    assert builtin_model("3A").output_factors == ("cfh_i",)
    for name in BUILTIN_NAMES:
        spec = builtin_model(name)
        assert (OUTLIER_CODE in spec.excluded_dmus) == name.endswith("B")
    assert builtin_model("1A").factor_warning
    assert not builtin_model("2A").factor_warning
    assert builtin_model("1A", "VRS").rts is RTS.VRS


def test_unknown_names():
    with pytest.raises(UnknownModel):
        builtin_model("4A")
    with pytest.raises(UnknownFactor):
        model_from_dict({"name": "x", "inputs": ["staff"], "outputs": ["cfh"]})


def test_dict_roundtrip(tmp_path):
    spec = ModelSpec("custom", ("atco_hours",), ("cfh", "flight_hours"), frozenset({"Q"}), RTS.VRS)
    assert model_from_dict(model_to_dict(spec)) == spec
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"models": [model_to_dict(spec), "1B"]}))
    loaded = load_models(path)
    assert loaded == [spec, builtin_model("1B")]
    assert load_models(model_to_dict(spec)) == [spec]


def test_materialize_rows_and_drops(panel):
    fm = materialize(panel, builtin_model("1A"), 2010)
    assert [d.code for d in fm.dmu_order] == ["A", "B", "C", OUTLIER_CODE]
    assert fm.inputs[0, 0] == 200.0
    assert fm.inputs[1, 2] == pytest.approx(2 + 0.27 * 4)
    fm3 = materialize(panel, builtin_model("3A"), 2010)
    # C lacks unit costs; the en-route-only unit needs none
    assert [d.code for d in fm3.dmu_order] == ["A", "B", OUTLIER_CODE]
    assert [(d.dmu, d.reason) for d in fm3.dropped] == [("C", "missing unit costs")]
    assert fm3.inputs[0, 2] == pytest.approx(2 + 0.3 * 4)
    with pytest.raises(MissingFactorData):
        materialize(panel, builtin_model("3A"), 2010, strict=True)


def test_materialize_exclusion(panel):
    fm = materialize(panel, builtin_model("2B"), 2010)
    assert OUTLIER_CODE not in [d.code for d in fm.dmu_order]


def test_individual_scheme_applies_to_plain_composites(panel):
    ind = WeightScheme(WeightKind.INDIVIDUAL)
    fm = materialize(panel, builtin_model("2A"), 2010, ind)
    assert "C" not in [d.code for d in fm.dmu_order]
    assert fm.outputs[0, 0] == pytest.approx(50 + 0.3 * 20)


def test_zero_input_dropped():
    panel = Panel.from_records([_rec("A"), _rec("Z", non_atco_share=0.0)])
    fm = materialize(panel, builtin_model("2A"), 2010)
    assert [d.code for d in fm.dmu_order] == ["A"]
    assert fm.dropped[0].reason == "zero input"


def test_year_and_empty_errors(panel):
    with pytest.raises(YearAbsent):
        materialize(panel, builtin_model("1A"), 2011)
    only = Panel.from_records([_rec(OUTLIER_CODE)])
    with pytest.raises(EmptyPanel):
        materialize(only, builtin_model("1B"), 2010)
