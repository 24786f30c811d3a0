"""Exception hierarchy with stable machine-readable error codes.

The ``code`` attribute of each class is what the CLI embeds in error
reports, so renaming a code is a breaking change.
"""


class DomconeError(Exception):
    """Base class for all library errors."""

    code = "error"


class InputError(DomconeError):
    """Invalid user input: bad file, bad value, failed type invariant."""

    code = "input"


class InvalidMatrixError(InputError):
    code = "invalid-matrix"


class InvalidBodyError(InputError):
    code = "invalid-body"


class DimensionMismatchError(InputError):
    code = "dimension-mismatch"


class PreconditionError(InputError):
    """An operation's stated precondition failed."""

    code = "precondition"


class NumericalFailureError(DomconeError):
    """A numerical routine failed to converge; carries the offending input."""

    code = "numerical-failure"

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload


class NonProperSetError(DomconeError):
    """A membership oracle looks empty or total along a probed line."""

    code = "non-proper-set"

    def __init__(self, message, reason=""):
        super().__init__(message)
        self.reason = reason  # "empty-line" or "full-line"


class ApertureInconsistencyError(DomconeError):
    """The two aperture computation paths disagree beyond tolerance."""

    code = "aperture-inconsistent"
