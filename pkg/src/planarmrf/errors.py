"""Exception types shared across the package.

The CLI maps InputError (and subclasses) to exit code 2 and everything
else to exit code 1, so raising the right class here is part of the
contract, not cosmetics.
"""


class PlanarMRFError(Exception):
    """Base class for all package errors."""


class InputError(PlanarMRFError):
    """Invalid user-supplied data or parameters (CLI exit code 2)."""


class InvalidInstanceError(InputError):
    """An MRF instance failed validation."""


class InvalidAssignmentError(InputError):
    """A label vector has the wrong length or out-of-range entries."""


class ConnectivityError(InputError):
    """A graph operation required a connected graph and got one that is not.

    Carries `vertex`, one vertex unreachable from the requested root.
    """

    def __init__(self, message, vertex=None):
        super().__init__(message)
        self.vertex = vertex


class TooLargeError(InputError):
    """Exhaustive enumeration was asked for above its size cap."""


class ParseError(InputError):
    """A file could not be parsed. Carries `offset`, a byte position."""

    def __init__(self, message, offset=None):
        super().__init__(message)
        self.offset = offset


class DecompositionError(PlanarMRFError):
    """A decomposition is structurally unusable for the given graph."""


class BuildError(DecompositionError):
    """A decomposition builder could not meet its width contract.

    Carries `width`, the width actually achieved.
    """

    def __init__(self, message, width=None):
        super().__init__(message)
        self.width = width


class WidthCapError(PlanarMRFError):
    """The exact solver refused a decomposition wider than its cap.

    Carries `width` (the offending boundary or merge size) and `cap`.
    """

    def __init__(self, message, width=None, cap=None):
        super().__init__(message)
        self.width = width
        self.cap = cap


class MemoryBudgetError(PlanarMRFError):
    """A dynamic-programming table would exceed the byte budget."""


class SeedOrderError(PlanarMRFError):
    """Boundary seeding referenced a component that is not solved yet."""
