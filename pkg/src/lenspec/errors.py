"""Typed errors raised by the library."""


class LengthSpaceError(Exception):
    """Base class for all lenspec errors."""


class SpaceMismatchError(LengthSpaceError):
    """Point representation does not match the space variant."""


class InvalidSpaceError(LengthSpaceError):
    """Space construction data violates an invariant."""


class CutLocusError(LengthSpaceError):
    """Direction is ambiguous: the target lies at the cut locus."""


class AmbiguousSegmentError(LengthSpaceError):
    """A minimizing segment is not unique and no witness was supplied."""


class EnumerationCapError(LengthSpaceError):
    """Walk enumeration exceeded the configured cap."""


class SystoleUndefinedError(LengthSpaceError):
    """The graph has no cycles, so the systole is undefined."""


class UnsupportedOperationError(LengthSpaceError):
    """The operation is not available for this space variant."""
