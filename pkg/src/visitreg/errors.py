"""Exception hierarchy shared across the package."""


class VisitRegError(Exception):
    """Base class for every error raised by visitreg."""


class ConfigurationError(VisitRegError, ValueError):
    """Invalid parameters, unknown names or mismatched inputs."""


class NumericError(VisitRegError):
    """A computation cannot proceed on the given numbers."""


class DegenerateSeriesError(NumericError):
    pass


class DegenerateResidualsError(NumericError):
    pass


class InsufficientObservationsError(NumericError):
    pass


class SingularDesignError(NumericError):
    pass


class DomainError(NumericError, ValueError):
    """Argument outside the domain of a distribution function."""


class DatasetParseError(VisitRegError):
    def __init__(self, message: str, line: int | None = None, column: str | None = None):
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class DuplicateRowError(DatasetParseError):
    pass


class DatasetValidationError(VisitRegError):
    """Dataset breaks additivity or consistency invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations[:10])
        more = len(self.violations) - 10
        if more > 0:
            lines += f"; ... {more} more"
        super().__init__(f"dataset failed validation: {lines}")
