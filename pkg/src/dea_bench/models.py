"""Named factor models and their materialization into factor matrices."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

from . import composites
from .composites import WeightKind, WeightScheme
from .data_model import (
    FACTOR_VOCABULARY,
    DmuYearRecord,
    DroppedDmu,
    FactorMatrix,
    ModelSpec,
    Panel,
    RTS,
)
from .errors import EmptyPanel, MissingCosts, MissingFactorData, UnknownFactor, UnknownModel, YearAbsent

OUTLIER_CODE = "MUAC"

_STAFF = ("atco_hours", "non_atco_share")
_BUILTIN = {
    "1": (_STAFF + ("ciu",), ("flight_hours", "airport_movements")),
    "2": (_STAFF + ("ciu",), ("cfh",)),
    "3": (_STAFF + ("ciu_i",), ("cfh_i",)),
}
BUILTIN_NAMES = ("1A", "1B", "2A", "2B", "3A", "3B")


def builtin_model(name: str, rts: RTS | str = RTS.CRS) -> ModelSpec:
    """Return one of the six reference models.

    ``A`` variants keep every provider; ``B`` variants exclude the
    en-route-only outlier (code ``MUAC``).
    """
    if name not in BUILTIN_NAMES:
        raise UnknownModel(f"unknown model {name!r}; expected one of {', '.join(BUILTIN_NAMES)}")
    inputs, outputs = _BUILTIN[name[0]]
    excluded = frozenset({OUTLIER_CODE}) if name[1] == "B" else frozenset()
    return ModelSpec(name, inputs, outputs, excluded, RTS(rts))


def check_factors(spec: ModelSpec) -> None:
    for f in spec.input_factors + spec.output_factors:
        if f not in FACTOR_VOCABULARY:
            raise UnknownFactor(f"factor {f!r} is not selectable; choose from {', '.join(FACTOR_VOCABULARY)}")


def model_from_dict(d: Mapping[str, Any]) -> ModelSpec:
    spec = ModelSpec(
        name=str(d["name"]),
        input_factors=tuple(d["inputs"]),
        output_factors=tuple(d["outputs"]),
        excluded_dmus=frozenset(d.get("excluded_dmus", ())),
        rts=RTS(str(d.get("rts", "CRS")).upper()),
    )
    check_factors(spec)
    return spec


def model_to_dict(spec: ModelSpec) -> dict:
    return {
        "name": spec.name,
        "inputs": list(spec.input_factors),
        "outputs": list(spec.output_factors),
        "excluded_dmus": sorted(spec.excluded_dmus),
        "rts": spec.rts.value,
    }


def load_models(source: str | Path | Mapping | list) -> list[ModelSpec]:
    """Read custom models from a JSON file or an already-parsed object.

    Accepts a single model object, a list of them, or ``{"models": [...]}``.
    Entries that are plain strings name builtin models.
    """
    if isinstance(source, (str, Path)):
        data = json.loads(Path(source).read_text(encoding="utf-8"))
    else:
        data = source
    if isinstance(data, Mapping) and "models" in data:
        data = data["models"]
    if isinstance(data, Mapping):
        data = [data]
    return [builtin_model(d) if isinstance(d, str) else model_from_dict(d) for d in data]


def factor_value(rec: DmuYearRecord, factor: str, weights: WeightScheme) -> float:
    """Value of one selectable factor for one record."""
    individual = weights.kind is WeightKind.INDIVIDUAL
    try:
        if factor == "cfh":
            if individual:
                return composites.record_cfh_i(rec)
            return composites.cfh(rec.flight_hours, rec.airport_movements, weights.w_pan)
        if factor == "ciu":
            if individual:
                return composites.record_ciu_i(rec)
            return composites.ciu(rec.acc_count, rec.tower_count, weights.ciu_weight)
        if factor == "cfh_i":
            return composites.record_cfh_i(rec)
        if factor == "ciu_i":
            return composites.record_ciu_i(rec)
    except MissingCosts:
        raise MissingFactorData(rec.dmu.code, factor, "missing unit costs") from None
    if factor not in FACTOR_VOCABULARY:
        raise UnknownFactor(f"factor {factor!r} is not selectable")
    return float(getattr(rec, factor))


def materialize(
    panel: Panel,
    spec: ModelSpec,
    year: int,
    weights: WeightScheme = WeightScheme(),
    strict: bool = False,
) -> FactorMatrix:
    """Build the factor matrix of ``spec`` for ``year``.

    Providers lacking a selected factor, with a zero selected input, or with
    no positive output are dropped and listed in ``FactorMatrix.dropped``;
    with ``strict`` the first such provider raises
    :class:`MissingFactorData` instead.
    """
    check_factors(spec)
    records = sorted(
        (r for r in panel.records if r.year == year),
        key=lambda r: r.dmu.code,
    )
    if not records:
        raise YearAbsent(f"year {year} not in panel")
    dmus, xs, ys, dropped = [], [], [], []
    for rec in records:
        if rec.dmu.code in spec.excluded_dmus:
            continue
        try:
            x = [factor_value(rec, f, weights) for f in spec.input_factors]
            y = [factor_value(rec, f, weights) for f in spec.output_factors]
            zero_in = [f for f, v in zip(spec.input_factors, x) if v <= 0]
            if zero_in:
                raise MissingFactorData(rec.dmu.code, zero_in[0], "zero input")
            if not any(v > 0 for v in y):
                raise MissingFactorData(rec.dmu.code, ",".join(spec.output_factors), "no positive output")
        except MissingFactorData as exc:
            if strict:
                raise
            dropped.append(DroppedDmu(exc.dmu, exc.factor, exc.reason))
            continue
        dmus.append(rec.dmu)
        xs.append(x)
        ys.append(y)
    if not dmus:
        raise EmptyPanel(f"no DMU left for model {spec.name} in {year}")
    return FactorMatrix(
        tuple(dmus),
        xs,
        ys,
        spec.input_factors,
        spec.output_factors,
        year=year,
        model=spec.name,
        dropped=tuple(dropped),
    )

