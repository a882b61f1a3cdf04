"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map failures onto its
documented process exit codes without a lookup table.
"""


class TailGofError(Exception):
    exit_code = 1


class ConfigError(TailGofError, ValueError):
    exit_code = 2


class DataError(TailGofError, ValueError):
    exit_code = 3


class DomainError(TailGofError, ValueError):
    """Argument outside the domain of a function (e.g. a non-positive coordinate)."""

    exit_code = 3


class DegenerateSampleError(DataError):
    pass


class GridCoverageError(TailGofError, ValueError):
    exit_code = 2


class NumericalError(TailGofError, ArithmeticError):
    exit_code = 4


class BoundaryEstimateError(NumericalError):
    pass


class SingularInformationError(NumericalError):
    pass


class BenchmarkMismatchError(TailGofError):
    exit_code = 5
