"""
Exception hierarchy for the hyperbolic lab.

Every error raised by the library derives from HyperLabError. Input and
precondition failures also derive from ValueError so callers that only
know the standard library can still catch them.
"""
from typing import Any, List, Optional


class HyperLabError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(HyperLabError, ValueError):
    """Vectors or matrices of incompatible sizes were combined."""


class UnsupportedDimension(HyperLabError, ValueError):
    """An operation was requested in a dimension it does not support."""


class NotOnHyperboloid(HyperLabError, ValueError):
    """A point expected on H fails |x·x + 1| <= tol or has x0 <= 0."""


class NotFutureTimelike(HyperLabError, ValueError):
    """A vector expected in the future timelike cone is not."""


class NotLorentz(HyperLabError, ValueError):
    """A matrix does not preserve the Lorentzian form within tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class NotFuturePreserving(HyperLabError, ValueError):
    """A Lorentz matrix swaps the future and past cones."""


class UnclassifiableWithinTolerance(HyperLabError):
    """The spectrum of an isometry sits inside the tolerance band."""


class NotLoxodromic(HyperLabError, ValueError):
    """An operation needing a loxodromic isometry received something else."""


class DegenerateAxis(HyperLabError, ValueError):
    """Requested axis endpoints are proportional or not null."""


class CoincidentPoints(HyperLabError, ValueError):
    """Two points that must be distinct coincide within tolerance."""


class DegenerateBasePoint(HyperLabError, ValueError):
    """A base point lies on an excluded locus for the requested construction."""


class BasePointFixed(HyperLabError, ValueError):
    """The Dirichlet base point is fixed by a non-identity group element."""

    def __init__(self, message: str, word: Optional[str] = None):
        super().__init__(message)
        self.word = word


class NotIncident(HyperLabError, ValueError):
    """A point is not on every hyperplane it was claimed to lie on."""


class EnumerationBudgetExceeded(HyperLabError):
    """Word enumeration produced more elements than the configured cap."""


class HalfspaceCapExceeded(HyperLabError):
    """A cone was requested with more half-spaces than the configured cap."""


class CombinatorialCapExceeded(HyperLabError):
    """A combinatorial enumeration exceeded its configured cap."""


class NotConverged(HyperLabError):
    """A Dirichlet domain did not stabilise before the maximum word length."""

    def __init__(self, message: str, domain: Any = None):
        super().__init__(message)
        self.domain = domain


class NotPure(HyperLabError, ValueError):
    """A complex has a maximal face whose dimension is not the top dimension."""


class AxiomViolation(HyperLabError, ValueError):
    """A complex breaks the composition or uniqueness axioms for morphisms."""

    def __init__(self, message: str, pairs: Optional[List[Any]] = None):
        super().__init__(message)
        self.pairs = pairs or []


class InclusionAmbiguity(HyperLabError):
    """A face matched more than one face of a neighbouring tile."""

    def __init__(self, message: str, pairs: Optional[List[Any]] = None):
        super().__init__(message)
        self.pairs = pairs or []


class ElementDoesNotPreserveComplex(HyperLabError):
    """A group element maps a face to something that is not a face."""


class InvalidDefinition(HyperLabError, ValueError):
    """A group or complex definition failed validation."""

    def __init__(self, message: str, errors: Optional[List[str]] = None):
        super().__init__(message)
        self.errors = errors or []
