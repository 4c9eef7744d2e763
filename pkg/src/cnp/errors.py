"""Exception hierarchy shared by the interpreter, the parser and the search code."""


class CNError(Exception):
    """Base class for every error raised by this package."""


class NetworkError(CNError, LookupError):
    """A subnet, node or arrow lookup failed."""


class ConfigurationError(CNError, ValueError):
    """Control options or problem parameters break their invariants."""


class SetupError(CNError):
    """A program cannot be started: invalid network or unregistered primitives."""


class PrimitiveError(CNError):
    """A primitive raised instead of succeeding or failing."""


class InternalConsistencyError(CNError, AssertionError):
    """Bookkeeping that should be impossible to break was broken."""


class ParseFailure(CNError):
    """Source text did not yield a valid network; ``errors`` holds every located problem."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(str(e) for e in self.errors))
