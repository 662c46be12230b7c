"""Exception hierarchy shared by all modules."""


class NamiError(ValueError):
    """Base class for invalid-input errors raised by this package."""


class GraphError(NamiError):
    """Malformed graph: cycle, duplicate edge, unknown variable, bad index."""


class InvalidTrailError(NamiError):
    pass


class OverlapError(NamiError):
    pass


class CapExceededError(NamiError):
    pass


class UniverseMismatchError(NamiError):
    pass


class AlreadyMarkedError(NamiError):
    pass


class DuplicateVariableError(NamiError):
    pass


class EmptyLatentsError(NamiError):
    pass


class InvalidPartitionError(NamiError):
    pass


class InvalidOrderError(NamiError):
    pass


class InvalidInverseError(NamiError):
    """A latent variable is a parent of an observed one."""


class NotAnIMapError(NamiError):
    pass


class FactorError(NamiError):
    """Inconsistent factor shapes or scopes."""


class SupportError(NamiError):
    def __init__(self, message, assignment=None):
        super().__init__(message)
        self.assignment = assignment


class MaskSpecError(NamiError):
    pass
