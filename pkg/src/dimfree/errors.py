"""Exception types shared across the library."""


class InputError(ValueError):
    """Invalid user-supplied data: bad vectors, out-of-range parameters."""


class PreconditionError(InputError):
    """A documented mathematical hypothesis of an operation does not hold."""


class CapacityError(RuntimeError):
    """An exact enumeration would exceed the configured capacity."""

    def __init__(self, message, count=None):
        super().__init__(message)
        self.count = count


class BoundMissError(RuntimeError):
    """A randomized search exhausted its budget without meeting its bound."""

    def __init__(self, message, achieved=None, bound=None):
        super().__init__(message)
        self.achieved = achieved
        self.bound = bound


class TheoremViolationError(BoundMissError):
    """An exhaustive search failed a guarantee that should always hold."""


class CertificationError(BoundMissError):
    """A certified distance interval excludes the required bound."""

    def __init__(self, message, part=None, interval=None, bound=None):
        super().__init__(message, achieved=None, bound=bound)
        self.part = part
        self.interval = interval


class IndeterminateError(RuntimeError):
    """A solver stopped before it could certify either outcome."""
