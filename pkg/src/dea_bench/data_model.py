"""Domain types shared across the package.

Everything here is immutable once built. Records carry raw operational
quantities per provider and year; a :class:`FactorMatrix` is one year of a
panel materialized against a :class:`ModelSpec`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

import numpy as np


class RTS(str, Enum):
    CRS = "CRS"
    VRS = "VRS"


class Method(str, Enum):
    RADIAL = "Radial"
    SUPER = "SuperEfficiency"
    SBM = "SBM"
    BOOTSTRAP = "Bootstrap"


class Status(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    FAILED = "Failed"


# Factors a model may select. Unit costs are deliberately absent: they feed
# the individual weights only and can never become DEA factors.
FACTOR_VOCABULARY = (
    "atco_hours",
    "non_atco_share",
    "ciu",
    "ciu_i",
    "flight_hours",
    "airport_movements",
    "cfh",
    "cfh_i",
)

MAX_RECOMMENDED_FACTORS = 4


@dataclass(frozen=True, order=True)
class DmuId:
    code: str
    display_name: str = field(default="", compare=False)

    def __str__(self) -> str:
        return self.code


@dataclass(frozen=True)
class DmuYearRecord:
    dmu: DmuId
    year: int
    atco_hours: float
    non_atco_share: float
    acc_count: int
    tower_count: int
    flight_hours: float
    airport_movements: float
    er_unit_cost: float | None = None
    tnl_unit_cost: float | None = None

    @property
    def has_unit_costs(self) -> bool:
        return self.er_unit_cost is not None and self.tnl_unit_cost is not None


_QUANTITY_FIELDS = (
    "atco_hours",
    "non_atco_share",
    "acc_count",
    "tower_count",
    "flight_hours",
    "airport_movements",
)


def validate_record(rec: DmuYearRecord) -> list[str]:
    """Return the list of invariant violations of ``rec`` (empty if valid)."""
    violations = []
    if not rec.dmu.code:
        violations.append("code empty")
    for name in _QUANTITY_FIELDS:
        value = getattr(rec, name)
        if value is None or not math.isfinite(value):
            violations.append(f"{name} not finite")
        elif value < 0:
            violations.append(f"{name} negative")
    for name in ("acc_count", "tower_count"):
        value = getattr(rec, name)
        if isinstance(value, float) and math.isfinite(value) and not value.is_integer():
            violations.append(f"{name} not an integer")
    share = rec.non_atco_share
    if share is not None and math.isfinite(share) and share > 1:
        violations.append("non_atco_share above 1")
    if (rec.er_unit_cost is None) != (rec.tnl_unit_cost is None):
        violations.append("unit costs must be paired")
    for name in ("er_unit_cost", "tnl_unit_cost"):
        value = getattr(rec, name)
        if value is not None and not (math.isfinite(value) and value > 0):
            violations.append(f"{name} not positive")
    return violations


@dataclass(frozen=True)
class Panel:
    """Validated per-provider, per-year records.

    Use :meth:`from_records` to build one; it enforces uniqueness of
    ``(dmu, year)`` and record validity.
    """

    records: tuple[DmuYearRecord, ...]

    def __post_init__(self):
        if not self.records:
            raise ValueError("panel is empty")
        seen = set()
        for rec in self.records:
            key = (rec.dmu.code, rec.year)
            if key in seen:
                raise ValueError(f"duplicate record for {key}")
            seen.add(key)
            bad = validate_record(rec)
            if bad:
                raise ValueError(f"invalid record {key}: {'; '.join(bad)}")

    @classmethod
    def from_records(cls, records: Iterable[DmuYearRecord]) -> "Panel":
        ordered = sorted(records, key=lambda r: (r.year, r.dmu.code))
        return cls(tuple(ordered))

    @property
    def years(self) -> list[int]:
        return sorted({r.year for r in self.records})

    @property
    def dmus(self) -> list[DmuId]:
        return sorted({r.dmu for r in self.records})

    def year_records(self, year: int) -> list[DmuYearRecord]:
        return [r for r in self.records if r.year == year]

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class ModelSpec:
    name: str
    input_factors: tuple[str, ...]
    output_factors: tuple[str, ...]
    excluded_dmus: frozenset[str] = frozenset()
    rts: RTS = RTS.CRS

    def __post_init__(self):
        object.__setattr__(self, "input_factors", tuple(self.input_factors))
        object.__setattr__(self, "output_factors", tuple(self.output_factors))
        object.__setattr__(self, "excluded_dmus", frozenset(self.excluded_dmus))
        object.__setattr__(self, "rts", RTS(self.rts))
        if not self.input_factors or not self.output_factors:
            raise ValueError("a model needs at least one input and one output")
        if set(self.input_factors) & set(self.output_factors):
            raise ValueError("input and output factors overlap")
        if len(set(self.input_factors)) != len(self.input_factors) or len(
            set(self.output_factors)
        ) != len(self.output_factors):
            raise ValueError("duplicate factor in model")

    @property
    def n_factors(self) -> int:
        return len(self.input_factors) + len(self.output_factors)

    @property
    def factor_warning(self) -> bool:
        """True when the model uses more factors than recommended."""
        return self.n_factors > MAX_RECOMMENDED_FACTORS


@dataclass(frozen=True)
class DroppedDmu:
    dmu: str
    factor: str
    reason: str


@dataclass(frozen=True, eq=False)
class FactorMatrix:
    """Input/output matrices for one model and one year, rows in ``dmu_order``."""

    dmu_order: tuple[DmuId, ...]
    inputs: np.ndarray
    outputs: np.ndarray
    input_names: tuple[str, ...]
    output_names: tuple[str, ...]
    year: int | None = None
    model: str | None = None
    dropped: tuple[DroppedDmu, ...] = ()

    def __post_init__(self):
        x = np.array(self.inputs, dtype=float, ndmin=2)
        y = np.array(self.outputs, dtype=float, ndmin=2)
        n = len(self.dmu_order)
        if x.shape[0] != n or y.shape[0] != n:
            raise ValueError("matrix rows must match dmu_order")
        if n < 1:
            raise ValueError("factor matrix has no DMUs")
        if x.shape[1] != len(self.input_names) or y.shape[1] != len(self.output_names):
            raise ValueError("factor names do not match matrix columns")
        if x.shape[1] < 1 or y.shape[1] < 1:
            raise ValueError("need at least one input and one output")
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise ValueError("factor values must be finite")
        if (x < 0).any() or (y < 0).any():
            raise ValueError("factor values must be non-negative")
        if not (x > 0).any(axis=1).all():
            raise ValueError("every DMU needs a strictly positive input")
        if not (y > 0).any(axis=1).all():
            raise ValueError("every DMU needs a strictly positive output")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "inputs", x)
        object.__setattr__(self, "outputs", y)
        object.__setattr__(self, "dmu_order", tuple(self.dmu_order))

    @property
    def n_dmu(self) -> int:
        return len(self.dmu_order)

    def index(self, code: str) -> int:
        for i, d in enumerate(self.dmu_order):
            if d.code == code:
                return i
        raise KeyError(code)

    def without(self, codes: Iterable[str]) -> "FactorMatrix":
        drop = set(codes)
        keep = [i for i, d in enumerate(self.dmu_order) if d.code not in drop]
        return FactorMatrix(
            tuple(self.dmu_order[i] for i in keep),
            self.inputs[keep],
            self.outputs[keep],
            self.input_names,
            self.output_names,
            year=self.year,
            model=self.model,
            dropped=self.dropped,
        )


@dataclass(frozen=True)
class DeaResult:
    dmu: DmuId
    score: float
    lambdas: Mapping[DmuId, float]
    input_slacks: tuple[float, ...]
    output_slacks: tuple[float, ...]
    status: Status = Status.OPTIMAL
    method: Method = Method.RADIAL
    rts: RTS = RTS.CRS
    message: str = ""

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL

    @property
    def peers(self) -> dict[DmuId, float]:
        return {d: v for d, v in self.lambdas.items() if v > 1e-9}
