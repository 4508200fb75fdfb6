"""Numerical toolkit for Schramm-Loewner evolution and related lattice models."""

from .errors import DomainError, NumericError, UnzipError

__version__ = "0.1.0"

__all__ = ["DomainError", "NumericError", "UnzipError", "__version__"]
