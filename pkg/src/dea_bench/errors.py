"""Exception hierarchy for dea_bench."""


class DeaBenchError(Exception):
    """Base class for all package errors."""


class UnreadableFile(DeaBenchError):
    pass


class SchemaMismatch(DeaBenchError):
    pass


class EmptyPanel(DeaBenchError):
    pass


class InvalidRecord(DeaBenchError):
    """Raised in strict ingestion when a row violates a record invariant."""


class YearAbsent(DeaBenchError):
    pass


class NumericalFailure(DeaBenchError):
    """Simplex hit its iteration cap or a pivot broke down."""


class SolverFailure(DeaBenchError):
    pass


class NegativeInput(DeaBenchError, ValueError):
    pass


class MissingCosts(DeaBenchError):
    pass


class UnknownModel(DeaBenchError, KeyError):
    pass


class UnknownFactor(DeaBenchError, KeyError):
    pass


class MissingFactorData(DeaBenchError):
    def __init__(self, dmu, factor, reason):
        super().__init__(f"{dmu}: factor {factor!r} unavailable ({reason})")
        self.dmu = dmu
        self.factor = factor
        self.reason = reason


class ZeroOutputUnsupported(DeaBenchError):
    pass


class MismatchedInputs(DeaBenchError, ValueError):
    pass


class DegenerateSample(DeaBenchError):
    """All efficiency scores identical; the kernel bandwidth collapses to zero."""


class InsufficientYears(DeaBenchError):
    pass
