"""Exception hierarchy.

Every error carries a short ``code`` string; scenario reports use it as the
task verdict when an operation raises.
"""

from __future__ import annotations


class LndkitError(Exception):
    code = "ERROR"


class PolySyntaxError(LndkitError, ValueError):
    """Malformed polynomial or derivation text. ``offset`` is a byte offset."""

    code = "SYNTAX_ERROR"

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class VariableRangeError(PolySyntaxError):
    code = "VARIABLE_OUT_OF_RANGE"


class NvarsMismatchError(LndkitError, ValueError):
    code = "NVARS_MISMATCH"


class ZeroInputError(LndkitError, ValueError):
    code = "ZERO_INPUT"


class PreconditionError(LndkitError, ValueError):
    code = "PRECONDITION_FAILED"


class NotLocallyFiniteError(LndkitError):
    code = "NOT_LOCALLY_FINITE_ON_SEEDS"


class LiftInconsistentError(LndkitError):
    code = "LIFT_INCONSISTENT"


class LadderDivergesError(LndkitError):
    code = "LADDER_DIVERGES"


class NotExponentiableError(LndkitError):
    code = "NOT_EXPONENTIABLE"


class NonInvertibleError(LndkitError):
    code = "NON_INVERTIBLE"


class CapTooSmallError(LndkitError):
    code = "CAP_TOO_SMALL"


class UnsupportedRankError(LndkitError, ValueError):
    code = "UNSUPPORTED_RANK"


class ScenarioError(LndkitError):
    code = "SCHEMA_ERROR"
