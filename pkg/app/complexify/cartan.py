"""
Check the fixed-point structure Cartan involutions must have on a complex.

Every non-free involution θ must be a Cartan involution whose fixed point
p lies in exactly three faces: one θ-invariant face of codimension one and
the two facets it separates. On each invariant face containing p the
fixed set of θ in the span splits as the point p and the hyperplane
Span ∩ p^⊥, and that hyperplane misses the hyperbolic part of the face.
"""
import logging
from typing import List, Optional, Sequence, Union

import numpy as np
from scipy.linalg import null_space

from app.complexes.complex import PolyComplex
from app.complexes.local import cone_contains
from app.complexify.parasitic import face_float_rays, section_generators
from app.complexify.subspace import ProjectiveSubspace, intersect_subspaces, lorentz_annihilator
from app.domain.cone import face_meets_hyperbolic
from app.errors import HyperLabError
from app.geometry.isometry import Isometry, classify, validate
from app.geometry.lorentz import causal_class
from app.models.reports import AssumptionReport, CartanAssumptionFinding
from app.schema.types import IsometryKind

logger = logging.getLogger(__name__)


def _label(element, i: int) -> str:
    if isinstance(element, Isometry) and element.label:
        return element.label
    return getattr(element, 'word', None) or f'theta{i}'


def _invariant(theta: np.ndarray, rays: np.ndarray, tol: float) -> bool:
    return cone_contains(rays, None, rays @ theta.T, tol)


def _eigenspace(theta: np.ndarray, span: ProjectiveSubspace, sign: int, tol: float) -> ProjectiveSubspace:
    kernel = null_space(theta - sign * np.eye(theta.shape[0]), rcond=tol)
    eigen = ProjectiveSubspace(theta.shape[0], False, frame=kernel)
    return intersect_subspaces([span.as_float(), eigen], tol=tol)


def _check_element(C: PolyComplex, theta: np.ndarray, label: str, tol: float) -> Optional[CartanAssumptionFinding]:
    """None for a free element, else a finding that lists any violations."""
    size = theta.shape[0]
    if np.max(np.abs(theta - np.eye(size))) <= tol:
        return None
    rays = {fid: face_float_rays(face) for fid, face in C.faces.items() if face.has_geometry}
    invariant = {fid for fid, r in rays.items() if r.size and _invariant(theta, r, tol)}
    try:
        kind = classify(validate(theta, tol), tol)
    except HyperLabError as e:
        return CartanAssumptionFinding(element=label, violations=[f"not a valid isometry: {str(e)}"])
    if not kind.kind.is_elliptic and not invariant:
        return None

    finding = CartanAssumptionFinding(element=label)
    if np.max(np.abs(theta @ theta - np.eye(size))) > tol * max(1.0, float(np.max(np.abs(theta)))):
        finding.violations.append("θ² is not the identity")
    if kind.kind != IsometryKind.ELLIPTIC_CARTAN:
        finding.violations.append(f"fixed set in H is not a single point ({kind.kind.value})")
        return finding

    p = kind.fixed_point.coords
    finding.fixed_point = p.tolist()
    containing = sorted(fid for fid, r in rays.items() if r.size and cone_contains(r, None, p.reshape(1, -1), tol))
    dims = sorted(C.faces[fid].dim for fid in containing)
    if dims != [C.n - 1, C.n, C.n]:
        finding.violations.append(f"fixed point lies in faces of dimensions {dims}, expected [{C.n - 1}, {C.n}, {C.n}]")
    ridge = [fid for fid in containing if C.faces[fid].dim == C.n - 1]
    if len(ridge) == 1:
        finding.face = ridge[0]
        if ridge[0] not in invariant:
            finding.violations.append(f"face {ridge[0]} containing the fixed point is not invariant")

    polar = lorentz_annihilator(p, exact=False)
    for fid in containing:
        if fid not in invariant:
            continue
        span = ProjectiveSubspace.from_vectors(rays[fid], exact=False)
        plus = _eigenspace(theta, span, 1, tol)
        minus = _eigenspace(theta, span, -1, tol)
        if plus.dim != 1 or not causal_class(plus.float_basis()[:, 0], tol).is_timelike:
            finding.violations.append(f"fixed set in the span of {fid} is not a single timelike point")
        if not minus.equals(intersect_subspaces([span, polar], tol=tol)):
            finding.violations.append(f"(-1)-eigenspace in the span of {fid} is not the polar hyperplane of p")
        if face_meets_hyperbolic(section_generators(rays[fid], p, tol), tol):
            finding.violations.append(f"polar hyperplane of p meets the hyperbolic part of {fid}")
    return finding


def assumption_cartan_check(C: PolyComplex, elements: Sequence[Union[Isometry, np.ndarray]],
                            tol: float = 1e-7) -> AssumptionReport:
    """
    Check every non-free element against the Cartan fixed-point structure.

    An element is free when it has no fixed point in H and leaves no face
    invariant; free elements pass vacuously.

    Args:
        C: Complex with geometry
        elements: Involutions of the acting group
        tol: Tolerance for invariance, eigenspaces and classification

    Returns:
        AssumptionReport; passed iff no finding carries a violation
    """
    findings: List[CartanAssumptionFinding] = []
    for i, element in enumerate(elements):
        theta = np.asarray(element.matrix if hasattr(element, 'matrix') else element, dtype=float)
        finding = _check_element(C, theta, _label(element, i), tol)
        if finding is None:
            continue
        findings.append(finding)
        if finding.violations:
            logger.warning(f"Element {finding.element} breaks the Cartan assumption: {finding.violations}")
    return AssumptionReport(passed=all(not f.violations for f in findings), findings=findings)
