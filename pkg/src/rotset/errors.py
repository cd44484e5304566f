"""Exception hierarchy.

Every domain error carries the name of the operation that raised it and a
``details`` mapping, so the CLI can serialise failures as structured JSON.
"""


class RotsetError(Exception):
    """Base class for all domain errors raised by this package."""

    operation = None

    def __init__(self, message, operation=None, **details):
        super().__init__(message)
        if operation is not None:
            self.operation = operation
        self.details = details

    def to_dict(self):
        return {
            "error": type(self).__name__,
            "operation": self.operation,
            "message": str(self),
            "details": {k: _jsonable(v) for k, v in self.details.items()},
        }


def _jsonable(value):
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    try:
        return float(value)
    except (TypeError, ValueError):
        return str(value)


class DimensionMismatch(RotsetError, ValueError):
    pass


class StrandedSymbol(RotsetError, ValueError):
    pass


class StateBudgetExceeded(RotsetError):
    pass


class CycleBudgetExceeded(RotsetError):
    pass


class BudgetExceeded(RotsetError):
    pass


class TableBudgetExceeded(RotsetError):
    pass


class StageOverflow(RotsetError):
    pass


class InsufficientPrefix(RotsetError, ValueError):
    pass


class UnresolvablePotential(RotsetError):
    pass


class DepthMismatch(RotsetError, ValueError):
    pass


class MissingWord(RotsetError, ValueError):
    pass


class InadmissibleKey(RotsetError, ValueError):
    pass


class BadDimension(RotsetError, ValueError):
    pass


class BadSpec(RotsetError, ValueError):
    pass


class NoConvergence(RotsetError):
    pass


class NotInterior(RotsetError):
    pass


class NewtonStalled(RotsetError):
    pass


class EmptyCounts(RotsetError):
    pass


class NonConvex(RotsetError, ValueError):
    pass


class DegenerateCurve(RotsetError, ValueError):
    pass
