"""Exception hierarchy shared by all modules."""


class NilflatError(Exception):
    """Base class for every error raised by this package."""


class InputError(NilflatError, ValueError):
    """Malformed or inconsistent input (dimension mismatch, bad file, ...)."""


class RejectedError(NilflatError):
    """A mathematical precondition failed; ``witness`` names where."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotInConeError(RejectedError):
    """The 3-vector does not have isotropic support."""


class StructureError(RejectedError):
    """A (para-)complex structure or a field built from it is invalid."""


class ConsistencyError(NilflatError, AssertionError):
    """Two independent computations of the same identity disagree.

    Never expected for valid input; signals a conventions bug.
    """
