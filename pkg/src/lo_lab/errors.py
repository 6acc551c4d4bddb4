"""Exception types shared across the lab.

The CLI maps each class to a process exit status, so every failure that can
reach a user falls into exactly one of these buckets.
"""


class LabError(Exception):
    """Base class for all lab errors."""

    kind = "error"


class ValidationError(LabError, ValueError):
    """Input violates an operation's precondition."""

    kind = "validation"


class CapacityError(LabError):
    """Instance is too large for the requested backend or scan."""

    kind = "capacity"


class NotApplicable(ValidationError):
    """The check is vacuous for this input size (e.g. n < 100 for the dual bound)."""

    kind = "not_applicable"


class InvariantViolation(LabError):
    """A verified mathematical claim failed on a concrete instance."""

    kind = "invariant"
