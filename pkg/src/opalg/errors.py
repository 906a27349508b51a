"""Exception types shared across the package."""


class OpalgError(Exception):
    """Base class for all package errors."""


class InvalidMatrix(OpalgError, ValueError):
    """Matrix input with non-finite entries or bad shape."""


class NotSquare(OpalgError, ValueError):
    pass


class NotHermitian(OpalgError, ValueError):
    pass


class DimensionMismatch(OpalgError, ValueError):
    pass


class ZeroMatrix(OpalgError, ValueError):
    pass


class ProfileMismatch(OpalgError, ValueError):
    """Block elements over incompatible size profiles."""


class FormMismatch(OpalgError, ValueError):
    """Element not of the structured form an operation requires."""


class IndexOutOfExplicitRange(OpalgError, ValueError):
    pass


class EntriesNotInAlgebra(OpalgError, ValueError):
    pass


class NotStarClosed(OpalgError, ValueError):
    pass


class EmptyRetention(OpalgError, ValueError):
    pass


class DecompositionError(OpalgError, RuntimeError):
    """Block decomposition inconsistent (dimension counts, centrality)."""


class ElementOutsideX(OpalgError, ValueError):
    """Vector does not describe an element of the correspondence."""


class CutoffTooSmall(OpalgError, ValueError):
    pass


class BadSymbol(OpalgError, ValueError):
    """Tensor polynomial refers to an invalid algebra or module element."""


class BadVertexSet(OpalgError, ValueError):
    pass


class ConvergenceError(OpalgError, RuntimeError):
    pass


class ParseError(OpalgError, ValueError):
    """Scenario file failed to parse; message carries the position."""


class ValidationError(OpalgError, ValueError):
    """Scenario payload does not match its kind's schema."""


class ComputeError(OpalgError, RuntimeError):
    """Scenario dispatch failed inside a module; carries module context."""
