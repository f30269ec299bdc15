"""Unitary groups U3(q), their Hermitian geometry, and exact covering numbers."""

__version__ = "0.1.0"
