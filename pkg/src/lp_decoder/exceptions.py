# -*- coding: utf-8 -*-
"""
Defines exceptions for the LP decoder.
"""


class LPDecoderError(Exception):
    """
    Base class for all errors raised by the decoder.
    """
    pass


class AlistFormatError(LPDecoderError):
    """
    Raised when an alist document cannot be parsed.
    """
    def __init__(self, message, line=None):
        if line is not None:
            message = 'line {}: {}'.format(line, message)
        super(AlistFormatError, self).__init__(message)
        self.line = line


class DimensionError(LPDecoderError, ValueError):
    """
    Raised when vector or matrix dimensions do not agree.
    """
    pass


class DimensionGuardError(LPDecoderError):
    """
    Raised when an exhaustive routine would blow up.
    """
    pass


class DegreeGuardError(LPDecoderError):
    """
    Raised when a check is too large for odd-subset enumeration.
    """
    pass


class InfeasibleLPError(LPDecoderError):
    """
    Raised when a linear program has no feasible point.
    """
    pass


class UnboundedError(LPDecoderError):
    """
    Raised when an affine-scaling direction never hits the boundary.
    """
    pass


class FormulationError(LPDecoderError):
    """
    Raised when the decoding embedding has no strictly interior start.
    """
    pass


class InnerSolverError(LPDecoderError):
    """
    Raised when the normal-equation solve breaks down.
    """
    pass


class NotPositiveDefiniteError(InnerSolverError):
    """
    Raised when the normal-equation operator stops being positive definite.
    """
    pass


class GaBPDivergenceError(LPDecoderError):
    """
    Raised when Gaussian belief propagation produces non-finite messages.
    """
    pass


class ConfigError(LPDecoderError, ValueError):
    """
    Raised for invalid solver settings.
    """
    pass


class ChannelError(LPDecoderError, ValueError):
    """
    Raised for invalid channel specifications.
    """
    pass


class CodeNotFoundError(LPDecoderError):
    """
    Raised when a named code is not found.
    """
    pass
