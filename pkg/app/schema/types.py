"""
Hyperbolic Lab Schema Types

This file defines the enumerations shared across the geometry, domain and
complex modules: causal classes of vectors, isometry kinds, the case tags
of the two-element singular locus, tuple-singularity verdicts and the
kinds of parasitic records.
"""
from enum import Enum

# -----------------------------------------------------------------------------
# Vector Types
# -----------------------------------------------------------------------------

class CausalClass(str, Enum):
    TIMELIKE_FUTURE = "TimelikeFuture"
    TIMELIKE_PAST = "TimelikePast"
    NULL_FUTURE = "NullFuture"
    NULL_PAST = "NullPast"
    SPACELIKE = "Spacelike"
    ZERO = "Zero"

    @property
    def is_timelike(self) -> bool:
        return self in (CausalClass.TIMELIKE_FUTURE, CausalClass.TIMELIKE_PAST)

    @property
    def is_null(self) -> bool:
        return self in (CausalClass.NULL_FUTURE, CausalClass.NULL_PAST)

    @property
    def is_future_causal(self) -> bool:
        return self in (CausalClass.TIMELIKE_FUTURE, CausalClass.NULL_FUTURE)

# -----------------------------------------------------------------------------
# Isometry Types
# -----------------------------------------------------------------------------

class IsometryKind(str, Enum):
    IDENTITY = "Identity"
    ELLIPTIC_CARTAN = "EllipticCartan"
    ELLIPTIC_OTHER = "EllipticOther"
    PARABOLIC = "Parabolic"
    HYPERBOLIC = "Hyperbolic"
    STRICTLY_LOXODROMIC = "StrictlyLoxodromic"

    @property
    def is_elliptic(self) -> bool:
        return self in (IsometryKind.ELLIPTIC_CARTAN, IsometryKind.ELLIPTIC_OTHER)

    @property
    def is_loxodromic(self) -> bool:
        return self in (IsometryKind.HYPERBOLIC, IsometryKind.STRICTLY_LOXODROMIC)

# -----------------------------------------------------------------------------
# Bisector Verdicts
# -----------------------------------------------------------------------------

class SigmaCase(str, Enum):
    FIXED_BY_A1 = "FixedByA1"
    FIXED_BY_A2 = "FixedByA2"
    FIXED_BY_QUOTIENT = "FixedByQuotient"       # A2^-1 A1 x = x
    COMMON_NULL_EIGENVECTOR = "CommonNullEigenvector"
    NOT_IN_SIGMA = "NotInSigma"


class SingularityStatus(str, Enum):
    SINGULAR_WITH_CONFIDENCE = "SingularWithConfidence"
    NONSINGULAR = "Nonsingular"

# -----------------------------------------------------------------------------
# Domain and Complex Verdicts
# -----------------------------------------------------------------------------

class FaceVerdict(str, Enum):
    SIMPLE = "simple"
    WEAKLY_SIMPLE = "weakly_simple"             # correct count, dependent normals
    EXCESS = "excess"                           # more bisectors than the codimension
    DEFICIENT = "deficient"
    IDEAL = "ideal"                             # excluded from verdicts


class IdealKind(str, Enum):
    IDEAL_VERTEX = "ideal_vertex"               # every extreme ray is null
    UNBOUNDED = "unbounded"                     # meets H and reaches the sphere at infinity


class ParasiticKind(str, Enum):
    PRIMARY = "Primary"
    SECONDARY = "Secondary"
