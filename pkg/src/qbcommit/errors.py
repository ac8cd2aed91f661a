"""Exception types shared across the package."""


class CommitmentError(Exception):
    """Base class for errors raised by this package."""


class SpectralDecompositionError(CommitmentError):
    """An eigenvalue or singular value routine failed to converge."""


class ProtocolValidationError(CommitmentError):
    """A protocol failed validation; carries the offending report."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ProtocolFileError(CommitmentError):
    """A protocol or scan-config file could not be parsed."""


class BracketInversionError(CommitmentError):
    """A certified lower bound exceeded its upper bound beyond tolerance.

    This signals a solver bug, not a property of the protocol, and aborts
    the report instead of emitting an inconsistent bracket.
    """
