"""
Input schemas for groups and complexes, and request/response models of the service.
"""
from typing import List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from app.models.reports import SCHEMA_VERSION, Vector

RationalPair = List[int]


class GeneratorDefinition(BaseModel):
    label: str = Field(..., min_length=1)
    matrix: List[List[float]]

    @field_validator('matrix')
    def validate_square(cls, v):
        if not v or any(len(row) != len(v) for row in v):
            raise ValueError('Generator matrix must be square and non-empty')
        return v


class GroupDefinition(BaseModel):
    """A finitely generated group in O(dim, 1), with an optional base point"""
    schema_version: str = SCHEMA_VERSION
    name: Optional[str] = None
    dim: int = Field(..., ge=2)
    generators: List[GeneratorDefinition] = Field(..., min_length=1)
    base: Optional[Vector] = None

    @model_validator(mode='after')
    def validate_sizes(self):
        size = self.dim + 1
        for gen in self.generators:
            if len(gen.matrix) != size:
                raise ValueError(f"Generator {gen.label} is {len(gen.matrix)}x{len(gen.matrix)}, expected {size}x{size}")
        if self.base is not None and len(self.base) != size:
            raise ValueError(f"Base point has {len(self.base)} coordinates, expected {size}")
        return self


class FaceDefinition(BaseModel):
    id: str = Field(..., min_length=1)
    dim: int = Field(..., ge=0)
    rays: Optional[List[List[float]]] = None
    exact_rays: Optional[List[List[RationalPair]]] = Field(
        default=None, description='Rays as rows of [numerator, denominator] pairs'
    )
    lineality: Optional[List[List[float]]] = None

    @field_validator('exact_rays')
    def validate_pairs(cls, v):
        if v is None:
            return v
        for row in v:
            for pair in row:
                if len(pair) != 2 or pair[1] == 0:
                    raise ValueError(f'Exact entries are [numerator, denominator] with a non-zero denominator, got {pair}')
        return v


class MorphismDefinition(BaseModel):
    source: str
    target: str
    matrix: Optional[List[List[float]]] = None


class CartanDatum(BaseModel):
    """A face carrying the fixed point of a Cartan involution"""
    face: str
    fixed_point: Vector


class ComplexDefinition(BaseModel):
    """A polyhedral complex: faces, incidence morphisms and an optional core"""
    schema_version: str = SCHEMA_VERSION
    name: Optional[str] = None
    faces: List[FaceDefinition] = Field(..., min_length=1)
    morphisms: List[MorphismDefinition] = Field(default_factory=list)
    core: Optional[List[str]] = None
    cartan: List[CartanDatum] = Field(default_factory=list)


# -----------------------------------------------------------------------------
# Service requests and responses
# -----------------------------------------------------------------------------

class ClassifyRequest(BaseModel):
    group: GroupDefinition


class DomainRequest(BaseModel):
    group: GroupDefinition
    base: Optional[Vector] = None
    len_max: Optional[int] = Field(default=None, ge=1)


class Example2Request(BaseModel):
    t: float = Field(default=1.0, gt=0)
    base: Optional[Vector] = None


class IsometryRecord(BaseModel):
    label: str
    kind: str
    orientation_preserving: bool
    translation_length: Optional[float] = None
    rotation_angle: Optional[float] = None
    eigenvalue: Optional[float] = None
    reflection: bool = False
    axis: Optional[List[Vector]] = None
    fixed_point: Optional[Vector] = None


class ClassifyResponse(BaseModel):
    schema_version: str = SCHEMA_VERSION
    generators: List[IsometryRecord]
