"""Exception hierarchy shared by every module.

Operation-level failures derive from :class:`HierError`; the CLI echoes the
class name verbatim and exits with status 3.  :class:`NumericContractViolation`
signals that a produced object broke its own invariants (an internal bug,
exit status 2).
"""


class HierError(Exception):
    """Base class for operation-level errors."""


class StructureMismatch(HierError):
    pass


class NotNormalized(HierError):
    pass


class IndexOutOfRange(HierError):
    pass


class DimensionMismatch(HierError):
    pass


class PathInvalid(HierError):
    pass


class DuplicateSibling(HierError):
    pass


class ZeroProbability(HierError):
    pass


class NotAdmissible(HierError):
    pass


class GridMismatch(HierError):
    pass


class NonpositiveCpsi(HierError):
    pass


class ZeroSignal(HierError):
    pass


class OracleTooLarge(HierError):
    pass


class InvalidApparatus(HierError):
    pass


class NumericContractViolation(Exception):
    """A result failed the invariants it is supposed to satisfy."""
