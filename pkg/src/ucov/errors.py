"""Exception types shared across the package."""


class UcovError(Exception):
    """Base class for all package errors."""


class DomainError(UcovError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ResourceLimitError(UcovError, MemoryError):
    """An instance exceeds the configured memory or size budget."""


class InvariantViolation(UcovError, AssertionError):
    """A structural property that must hold was found violated.

    These are never silenced: they indicate either a bug or a
    counterexample to a theorem being checked.
    """


class IncompleteCertificate(UcovError, RuntimeError):
    """A computation that requires a complete certificate was handed an incomplete one."""
