# src/utils/errors.py

class IndexTransformError(Exception):
    """Base class for every numerical failure raised by this package"""


class PoleError(IndexTransformError, ValueError):
    """A gamma or Pochhammer argument hits a pole"""


class DomainError(IndexTransformError, ValueError):
    """Argument outside the domain of the function"""


class ParameterError(IndexTransformError, ValueError):
    """Order mu or contour parameters outside the admissible window"""


class StripError(ParameterError):
    """Mellin abscissa outside the declared strip of convergence"""


class ConfigError(IndexTransformError, ValueError):
    """Invalid run configuration or malformed input file"""


class SeriesNonConvergenceError(IndexTransformError):
    """Series exhausted max_terms before reaching rel_tol"""

    def __init__(self, message: str, partial_sum=None, terms: int = 0):
        super().__init__(message)
        self.partial_sum = partial_sum
        self.terms = terms


class QuadratureError(IndexTransformError):
    """Quadrature failed to converge or produced a non-finite value"""


class ContourError(QuadratureError):
    """Vertical-line quadrature failed its tail or finiteness checks"""


class CapabilityError(IndexTransformError):
    """Request lies outside what double precision can deliver"""


class HypothesisWarning(UserWarning):
    """An input violates a hypothesis under which a formula converges"""
