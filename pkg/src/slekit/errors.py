"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class NumericError(ArithmeticError):
    """A numerical procedure failed to reach its accuracy target."""


class UnzipError(DomainError):
    """Driving-function extraction failed at a specific polyline vertex.

    ``index`` is the position in the input polyline where the mapped path
    left the open upper half-plane (usually a self-intersection).
    """

    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


class PointAtInfinity(ArithmeticError):
    """A Moebius map sent a finite point to infinity."""
