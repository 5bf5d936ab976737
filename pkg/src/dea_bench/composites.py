"""Composite output (CFH) and composite infrastructure input (CIU).

Both combine an en-route quantity with a terminal quantity through the
terminal/en-route unit-cost ratio ``w``::

    cfh = flight_hours + w * airport_movements
    ciu = acc_count + w * tower_count

The weight is either one pan-European value (0.27 by default) or each
provider's own ratio ``tnl_unit_cost / er_unit_cost``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .data_model import DmuYearRecord
from .errors import MissingCosts, NegativeInput

PAN_EUROPEAN_WEIGHT = 0.27


class WeightKind(str, Enum):
    PAN_EUROPEAN = "PanEuropean"
    INDIVIDUAL = "Individual"


@dataclass(frozen=True)
class WeightScheme:
    """How composite factors are weighted.

    ``w_pan`` weights CFH under the pan-European scheme; ``w_ciu`` weights
    CIU and falls back to ``w_pan`` when unset. With ``kind`` set to
    ``Individual`` the plain ``cfh``/``ciu`` factors switch to per-provider
    weights as well; the ``cfh_i``/``ciu_i`` factors are individual always.
    """

    kind: WeightKind = WeightKind.PAN_EUROPEAN
    w_pan: float = PAN_EUROPEAN_WEIGHT
    w_ciu: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", WeightKind(self.kind))
        if not (math.isfinite(self.w_pan) and self.w_pan > 0):
            raise ValueError("w_pan must be positive")
        if self.w_ciu is not None and not (math.isfinite(self.w_ciu) and self.w_ciu > 0):
            raise ValueError("w_ciu must be positive")

    @property
    def ciu_weight(self) -> float:
        return self.w_pan if self.w_ciu is None else self.w_ciu


def _check_nonneg(**values):
    for name, v in values.items():
        if v < 0:
            raise NegativeInput(f"{name} must be non-negative, got {v}")


def cfh(f: float, a: float, w: float) -> float:
    """Composite flight hours from flight hours ``f`` and movements ``a``."""
    _check_nonneg(f=f, a=a)
    if not w > 0:
        raise NegativeInput(f"weight must be positive, got {w}")
    return f + w * a


def ciu(acc_count: float, tower_count: float, w: float) -> float:
    """Composite infrastructure units from ACC and tower counts."""
    _check_nonneg(acc_count=acc_count, tower_count=tower_count)
    if not w > 0:
        raise NegativeInput(f"weight must be positive, got {w}")
    return acc_count + w * tower_count


def individual_weight(er_unit_cost: float | None, tnl_unit_cost: float | None) -> float:
    """Provider-specific terminal/en-route unit-cost ratio."""
    if er_unit_cost is None or tnl_unit_cost is None:
        raise MissingCosts("individual weight needs both unit costs")
    if not (er_unit_cost > 0 and tnl_unit_cost > 0):
        raise NegativeInput("unit costs must be positive")
    return tnl_unit_cost / er_unit_cost


def record_cfh_i(rec: DmuYearRecord) -> float:
    # en-route-only units have no terminal unit cost; the weight multiplies 0
    if rec.airport_movements == 0:
        return cfh(rec.flight_hours, 0.0, 1.0)
    return cfh(
        rec.flight_hours,
        rec.airport_movements,
        individual_weight(rec.er_unit_cost, rec.tnl_unit_cost),
    )


def record_ciu_i(rec: DmuYearRecord) -> float:
    if rec.tower_count == 0:
        return ciu(rec.acc_count, 0, 1.0)
    return ciu(rec.acc_count, rec.tower_count, individual_weight(rec.er_unit_cost, rec.tnl_unit_cost))
