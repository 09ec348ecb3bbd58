"""Exception types raised across the package."""


class InvalidArgumentError(ValueError):
    """An argument lies outside the documented domain of an operation."""


class CFLViolationError(ValueError):
    """A time step would be taken with a Courant number of magnitude above one."""


class IncompatibleDiscretizationError(ValueError):
    """Two objects were built on different meshes or time steps."""


class DegenerateNormError(ZeroDivisionError):
    """A relative error was requested against a reference of zero norm."""


class StoreParseError(ValueError):
    """A trajectory file could not be parsed."""


class StoreIntegrityError(ValueError):
    """A trajectory file parsed but its payload does not match its header."""


class SnapshotNotFoundError(KeyError):
    """A snapshot lookup ran against an empty store."""
