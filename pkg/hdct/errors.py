"""
Errors

Everything the library raises on purpose derives from HdctError. Each
class knows which module raised it and which exit code the command line
reports for it, so the command layer never has to guess.

"""


class HdctError(Exception):
    """
    Base error. `module` names the raising module for provenance.
    """

    exit_code = 1
    module = "hdct"

    def __init__(self, message="", module=None):
        super().__init__(message)
        if module:
            self.module = module

    def __str__(self):
        return f"{self.module}: {super().__str__()}"


# -------------------------------------------------------------
# Input and validation errors (exit code 2)
# -------------------------------------------------------------


class InputError(HdctError):
    exit_code = 2


class NonPositiveEntry(InputError):
    module = "core"

    def __init__(self, row, col, value=None, module=None):
        self.row = row
        self.col = col
        self.value = value
        super().__init__(
            f"non-positive entry {value!r} at row {row}, col {col}", module
        )


class NonFiniteEntry(InputError):
    module = "core"

    def __init__(self, row, col, module=None):
        self.row = row
        self.col = col
        super().__init__(f"non-finite entry at row {row}, col {col}", module)


class RowSumViolation(InputError):
    module = "core"

    def __init__(self, row, total, module=None):
        self.row = row
        self.total = total
        super().__init__(f"row {row} sums to {total!r}, expected 1", module)


class ShapeError(InputError):
    module = "core"


class DimensionMismatch(InputError):
    module = "estimators"


class TooFewSamples(InputError):
    module = "estimators"


class NonCenteredMu0(InputError):
    module = "stattests"


class DomainError(InputError, ValueError):
    module = "nulldist"


class ParseError(InputError):
    module = "cli"

    def __init__(self, row, col, detail="", module=None):
        self.row = row
        self.col = col
        message = f"cannot parse cell at row {row}, col {col}"
        if detail:
            message += f" ({detail})"
        super().__init__(message, module)


class GroupError(InputError):
    module = "cli"


# -------------------------------------------------------------
# Numerical failures (exit code 3)
# -------------------------------------------------------------


class NumericalError(HdctError):
    exit_code = 3


class DegenerateVariance(NumericalError):
    module = "estimators"

    def __init__(self, column, variance, module=None):
        self.column = column
        self.variance = variance
        super().__init__(
            f"column {column} has degenerate variance {variance!r}", module
        )


class NegativeVarianceEstimate(NumericalError):
    module = "stattests"


class SingularSystem(NumericalError):
    module = "datagen"


class NotPSD(NumericalError):
    module = "datagen"


class NonSymmetric(NumericalError):
    module = "datagen"


class NonPositiveDiagonal(NumericalError):
    module = "stattests"


# -------------------------------------------------------------
# Configuration errors (exit code 4)
# -------------------------------------------------------------


class ConfigError(HdctError):
    exit_code = 4
    module = "sim"


class ReplicationError(HdctError):
    """
    A replication failed. Carries the replication index and stream id so
    the failing dataset can be regenerated on its own.
    """

    module = "sim"

    def __init__(self, index, stream_id, cause):
        self.index = index
        self.stream_id = stream_id
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", 1)
        super().__init__(
            f"replication {index} (stream {stream_id}) failed: {cause}"
        )
