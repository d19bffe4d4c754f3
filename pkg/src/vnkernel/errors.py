from __future__ import annotations


class VnKernelError(Exception):
    """Base class for all errors raised by the package."""

    code = "error"


class InsufficientDomain(VnKernelError):
    """A local evaluation needs values outside the known domain."""

    code = "insufficient_domain"


class MalformedComponent(VnKernelError):
    """A connected component of the support does not have the expected shape."""

    code = "malformed_component"


class NoIsomorphism(VnKernelError):
    """A restricted rule graph does not match its model quotient graph."""

    code = "no_isomorphism"


class InconsistentInput(VnKernelError):
    """A partial configuration violates the subgroup invariance constraints."""

    code = "inconsistent_input"


class SearchBoundExceeded(VnKernelError):
    """A bounded search stopped with live candidates remaining."""

    code = "search_bound_exceeded"


class InvalidParameters(VnKernelError, ValueError):
    code = "invalid_parameters"
