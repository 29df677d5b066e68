"""
Validation and loading of group and complex definitions.

Definitions are parsed into pydantic models, then checked for the
properties the numeric code relies on before any matrix is built.
"""
import json
import logging
from pathlib import Path
from typing import Any, List, Optional, Union

import numpy as np
import sympy

from app.complexes.complex import ComplexFace, Morphism, PolyComplex
from app.errors import HyperLabError, InvalidDefinition
from app.geometry.isometry import validate
from app.geometry.lorentz import is_on_H
from app.groups.group import GeneratedGroup
from app.models.models import ComplexDefinition, GroupDefinition
from app.models.reports import DomainReport

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class ValidationResult:
    """Result of a definition validation check."""
    def __init__(self, is_valid: bool, errors: List[str] = None):
        """
        Initialize a validation result.

        Args:
            is_valid: Whether the validation passed
            errors: List of error messages if validation failed
        """
        self.is_valid = is_valid
        self.errors = errors or []

    def add_error(self, error: str):
        """
        Add an error to the validation result.

        Args:
            error: Error message to add
        """
        self.errors.append(error)
        self.is_valid = False

    def __bool__(self):
        """Allow using ValidationResult in boolean context."""
        return self.is_valid


def validate_group_definition(definition: GroupDefinition, tol: float = 1e-9) -> ValidationResult:
    """
    Check that every generator is a future-preserving Lorentz matrix and the base point is on H.

    Args:
        definition: Parsed group definition
        tol: Relative Lorentz residual bound

    Returns:
        ValidationResult with validation status and any errors
    """
    result = ValidationResult(True)

    labels = [gen.label for gen in definition.generators]
    duplicates = sorted({label for label in labels if labels.count(label) > 1})
    if duplicates:
        result.add_error(f"Duplicate generator labels: {', '.join(duplicates)}")

    for gen in definition.generators:
        try:
            validate(np.asarray(gen.matrix, dtype=float), tol=tol, label=gen.label)
        except HyperLabError as e:
            result.add_error(f"Generator {gen.label}: {str(e)}")

    if definition.base is not None and not is_on_H(definition.base, max(tol, 1e-9)):
        result.add_error(f"Base point {definition.base} is not on the hyperboloid")
    return result


def validate_complex_definition(definition: ComplexDefinition) -> ValidationResult:
    """
    Check face ids, ray sizes and the faces named by morphisms, the core and Cartan data.

    Composition and uniqueness of morphisms are checked when the complex is built.
    """
    result = ValidationResult(True)

    ids = [face.id for face in definition.faces]
    duplicates = sorted({fid for fid in ids if ids.count(fid) > 1})
    if duplicates:
        result.add_error(f"Duplicate face ids: {', '.join(duplicates)}")
    dims = {face.id: face.dim for face in definition.faces}

    sizes = set()
    for face in definition.faces:
        for name, rows in (('rays', face.rays), ('exact_rays', face.exact_rays), ('lineality', face.lineality)):
            if rows is None:
                continue
            lengths = {len(row) for row in rows}
            if len(lengths) > 1:
                result.add_error(f"Face {face.id}: {name} rows have mixed lengths {sorted(lengths)}")
            sizes |= lengths
    if len(sizes) > 1:
        result.add_error(f"Faces live in spaces of different sizes {sorted(sizes)}")

    for m in definition.morphisms:
        missing = [fid for fid in (m.source, m.target) if fid not in dims]
        if missing:
            result.add_error(f"Morphism {m.source} -> {m.target} names unknown faces {missing}")
        elif dims[m.source] >= dims[m.target]:
            result.add_error(f"Morphism {m.source} -> {m.target} does not lower dimension")

    for fid in definition.core or []:
        if fid not in dims:
            result.add_error(f"Core face {fid} is not a face")
    for datum in definition.cartan:
        if datum.face not in dims:
            result.add_error(f"Cartan datum names unknown face {datum.face}")
        elif sizes and len(datum.fixed_point) not in sizes:
            result.add_error(f"Cartan fixed point on {datum.face} has {len(datum.fixed_point)} coordinates")
    return result


# -----------------------------------------------------------------------------
# Builders and loaders
# -----------------------------------------------------------------------------

def load_json(path: PathLike) -> Any:
    """
    Read a JSON document.

    Raises:
        FileNotFoundError: If the path does not exist
        json.JSONDecodeError: If the file is not valid JSON
    """
    with open(path, 'r', encoding='utf-8') as f:
        return json.load(f)


def _array(rows: Optional[List[List[float]]]) -> Optional[np.ndarray]:
    return np.asarray(rows, dtype=float) if rows is not None else None


def build_group(definition: GroupDefinition, tol: float = 1e-9) -> GeneratedGroup:
    """
    Raises:
        InvalidDefinition: If the definition fails validate_group_definition
    """
    result = validate_group_definition(definition, tol)
    if not result:
        raise InvalidDefinition(f"Invalid group definition: {result.errors[0]}", errors=result.errors)
    return GeneratedGroup.from_definition(definition, tol=tol)


def build_complex(definition: ComplexDefinition) -> PolyComplex:
    """
    Raises:
        InvalidDefinition: If the definition fails validate_complex_definition
        AxiomViolation: If the morphisms break the complex axioms
    """
    result = validate_complex_definition(definition)
    if not result:
        raise InvalidDefinition(f"Invalid complex definition: {result.errors[0]}", errors=result.errors)
    faces = []
    for face in definition.faces:
        exact = None
        if face.exact_rays is not None:
            exact = sympy.Matrix([[sympy.Rational(num, den) for num, den in row] for row in face.exact_rays])
        faces.append(ComplexFace(id=face.id, dim=face.dim, rays=_array(face.rays), exact_rays=exact,
                                 lineality=_array(face.lineality)))
    morphisms = [Morphism(m.source, m.target, _array(m.matrix)) for m in definition.morphisms]
    return PolyComplex(faces, morphisms, core=definition.core)


def load_group_definition(path: PathLike) -> GroupDefinition:
    return GroupDefinition.model_validate(load_json(path))


def load_group(path: PathLike, tol: float = 1e-9) -> GeneratedGroup:
    """Parse, validate and build the group stored at path."""
    group = build_group(load_group_definition(path), tol)
    logger.debug(f"Loaded {group} from {path}")
    return group


def load_complex_definition(path: PathLike) -> ComplexDefinition:
    return ComplexDefinition.model_validate(load_json(path))


def load_complex(path: PathLike) -> PolyComplex:
    """Parse, validate and build the complex stored at path."""
    return build_complex(load_complex_definition(path))


def load_domain_report(path: PathLike) -> DomainReport:
    return DomainReport.model_validate(load_json(path))
