"""Exceptions raised by tdsp-reduce."""


class TdspError(Exception):
    """Base class of every error raised by this package."""


class DomainError(TdspError, ValueError):
    """An argument lies outside the domain of an operation."""


class StructuralError(TdspError, ValueError):
    """A function, graph, decomposition or plan is malformed."""

    def __init__(self, message, assumption=None):
        super().__init__(message)
        self.assumption = assumption

    def __str__(self):
        message = super().__str__()
        if self.assumption:
            return f"{self.assumption}: {message}"
        return message


class ParseError(StructuralError):
    """A graph or decomposition file could not be parsed."""

    def __init__(self, message, lineno=None, source="<input>"):
        super().__init__(message)
        self.lineno = lineno
        self.source = source

    def __str__(self):
        message = super().__str__()
        if self.lineno is None:
            return f"{self.source}: {message}"
        return f"{self.source}:{self.lineno}: {message}"


class SizeGuardError(TdspError):
    """An exponential oracle was asked for an instance above its limit."""


class FifoViolationError(TdspError):
    """An edge arrives before it departs."""

    def __init__(self, message, edge_key=None, direction=None):
        super().__init__(message)
        self.edge_key = edge_key
        self.direction = direction


class VerificationError(TdspError, AssertionError):
    """A reduction result disagrees with an oracle."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class ConfigError(TdspError, ValueError):
    """Invalid experiment configuration."""
