"""Shared exception types."""


class DomainError(ValueError):
    """Input lies outside the mathematical domain of the operation."""


class SingularGramError(RuntimeError):
    """Gram matrix numerically singular (points too close or |lambda| -> 1)."""


class ResourceCapError(RuntimeError):
    """Requested truncation exceeds the desk-scale resource cap."""
