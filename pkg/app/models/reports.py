"""
Report models returned by audits, domain checks, scans and experiments.

Every report is a pydantic model so it can be dumped to JSON by the CLI and
returned by the service unchanged.
"""
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from app.schema.types import (
    FaceVerdict,
    IdealKind,
    ParasiticKind,
    SigmaCase,
    SingularityStatus,
)

SCHEMA_VERSION = '1.0'

Vector = List[float]


# -----------------------------------------------------------------------------
# Group diagnostics
# -----------------------------------------------------------------------------

class EllipticFinding(BaseModel):
    word: str
    kind: str
    is_cartan: bool
    fixed_point: Optional[Vector] = None


class ClassKReport(BaseModel):
    """Every enumerated elliptic element with its Cartan verdict"""
    passed: bool
    max_len: int
    element_count: int
    elliptic_findings: List[EllipticFinding] = Field(default_factory=list)

    @property
    def witnesses(self) -> List[str]:
        return [f.word for f in self.elliptic_findings if not f.is_cartan]


class SharedEndpointViolation(BaseModel):
    first: str
    second: str
    shared: Vector


class ElementaryReport(BaseModel):
    elementary: bool
    common_fixed_points: List[Vector] = Field(default_factory=list)
    invariant_axes: List[List[Vector]] = Field(default_factory=list)
    center_words: List[str] = Field(default_factory=list)
    class_k_passed: bool
    center_consistent: bool
    shared_endpoint_violations: List[SharedEndpointViolation] = Field(default_factory=list)


class DiscretenessReport(BaseModel):
    """Minimal displacement over enumerated non-identity elements; never a proof"""
    max_len: int
    probe: Vector
    min_matrix_distance: Optional[float] = None
    min_matrix_word: Optional[str] = None
    min_displacement: Optional[float] = None
    min_displacement_word: Optional[str] = None
    threshold: float
    warning: bool = False


# -----------------------------------------------------------------------------
# Bisector verdicts
# -----------------------------------------------------------------------------

class SingularityReport(BaseModel):
    status: SingularityStatus
    mode: str = 'numeric'
    trials: int
    seed: Optional[int] = None
    witness: Optional[Vector] = None
    max_rank_seen: int
    tuple_size: int
    failure_probability_bound: Optional[float] = None
    note: str = ''


class SigmaReport(BaseModel):
    case: SigmaCase
    rank: int
    verified: bool = True


# -----------------------------------------------------------------------------
# Domains
# -----------------------------------------------------------------------------

class ContributorRecord(BaseModel):
    word: str
    normal: Vector
    matrix: Optional[List[Vector]] = None


class FaceLatticeRecord(BaseModel):
    index: int
    dim: int
    active: List[int]
    rays: List[int]
    meets_hyperbolic: bool
    witness: Optional[Vector] = None


class ConvergenceRecord(BaseModel):
    word_length: int
    stable_windows: int
    converged: bool
    exhausted: bool = False
    element_count: int = 0


class DomainReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    dimension: int
    base: Vector
    contributors: List[ContributorRecord]
    rays: List[Vector]
    lineality: List[Vector] = Field(default_factory=list)
    faces: List[FaceLatticeRecord]
    convergence: ConvergenceRecord
    degenerate: bool = False
    simplicity: Optional['SimplicityReport'] = None


class FaceRecord(BaseModel):
    face_index: int
    dim: int
    codim: int
    count: int
    words: List[str]
    transversal: bool
    verdict: FaceVerdict


class CartanFinding(BaseModel):
    word: str
    fixed_point: Vector
    in_domain: bool
    face_index: Optional[int] = None
    face_dim: Optional[int] = None


class SimplicityReport(BaseModel):
    faces: List[FaceRecord] = Field(default_factory=list)
    simple: bool
    weakly_simple: bool
    cartan_findings: List[CartanFinding] = Field(default_factory=list)
    ideal_face_count: int = 0


class PairingRecord(BaseModel):
    facet_word: str
    partner_word: Optional[str] = None
    pairing_word: str
    verified: bool
    max_violation: float = 0.0


class IdealFaceRecord(BaseModel):
    face_index: int
    dim: int
    kind: IdealKind


# -----------------------------------------------------------------------------
# Complexes
# -----------------------------------------------------------------------------

class QuotientReport(BaseModel):
    valid: bool
    violations: List[Dict[str, Any]] = Field(default_factory=list)
    free_on_facets: bool
    unmapped: Dict[str, List[str]] = Field(default_factory=dict)


class ParasiticEntry(BaseModel):
    kind: ParasiticKind
    host: str
    members: List[str]
    fixed_point: Optional[Vector] = None
    basis: List[List[Any]]
    exact: bool
    orbit: List[Dict[str, Any]] = Field(default_factory=list)
    misses_hyperbolic: Optional[bool] = None


class ParasiticReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    primary: List[ParasiticEntry] = Field(default_factory=list)
    secondary: List[ParasiticEntry] = Field(default_factory=list)


class CartanAssumptionFinding(BaseModel):
    element: str
    face: Optional[str] = None
    fixed_point: Optional[Vector] = None
    violations: List[str] = Field(default_factory=list)


class AssumptionReport(BaseModel):
    passed: bool
    findings: List[CartanAssumptionFinding] = Field(default_factory=list)


# -----------------------------------------------------------------------------
# Scans and experiments
# -----------------------------------------------------------------------------

class ScanWitness(BaseModel):
    x: Vector
    value: Optional[float] = None
    words: Optional[List[str]] = None
    certificate: Dict[str, Any] = Field(default_factory=dict)


class ScanReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    kind: str
    trials: int
    hits: int
    witnesses: List[ScanWitness] = Field(default_factory=list)
    seed: int
    duration_ms: float
    details: Dict[str, Any] = Field(default_factory=dict)


class Example2Report(BaseModel):
    t: float
    base: Vector
    checks: Dict[str, bool]
    contributor_words: List[str]
    geodesic_samples: List[Vector] = Field(default_factory=list)
    intersection_count: Optional[int] = None
    weakly_simple: Optional[bool] = None
    passed: bool


class CyclicReport(BaseModel):
    converged: bool
    simple: Optional[bool] = None
    weakly_simple: Optional[bool] = None
    facet_count: int = 0
    vertex_count: int = 0
    edge_count: int = 0
    failures: List[FaceRecord] = Field(default_factory=list)


class GlideReport(BaseModel):
    converged: bool
    facet_words: List[str] = Field(default_factory=list)
    vertex_count: int = 0
    vertex_axis_distances: List[float] = Field(default_factory=list)
    cycle_lengths: List[int] = Field(default_factory=list)
    perp_max_error: float = 0.0
    checks: Dict[str, bool] = Field(default_factory=dict)
    simple: Optional[bool] = None
    passed: bool = False


DomainReport.model_rebuild()
