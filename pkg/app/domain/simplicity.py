"""
Simplicity verdicts for Dirichlet tilings.

A codimension-k face of D_x meeting H is simple when exactly k bisectors
Bis(x, γx) with enumerated γ contain it and their normals are independent.
The tiling is weakly simple when every codimension-2 face lies on exactly
two bisectors and every facet on one.
"""
import logging
from typing import List, Optional

from app.domain.dirichlet import DirichletDomain
from app.domain.pairings import ideal_faces
from app.errors import NotConverged, NotIncident
from app.geometry.bisector import transversal_at
from app.geometry.isometry import classify, is_cartan_involution
from app.groups.group import GeneratedGroup
from app.models.reports import CartanFinding, FaceRecord, SimplicityReport
from app.schema.types import FaceVerdict, IdealKind

logger = logging.getLogger(__name__)


def _verdict(count: int, codim: int, transversal: bool) -> FaceVerdict:
    if count > codim:
        return FaceVerdict.EXCESS
    if count < codim:
        return FaceVerdict.DEFICIENT
    return FaceVerdict.SIMPLE if transversal else FaceVerdict.WEAKLY_SIMPLE


def cartan_findings(D: DirichletDomain, tol: float = 1e-9, incidence_tol: float = 1e-7) -> List[CartanFinding]:
    """Fixed points of enumerated Cartan involutions located in the face lattice of D."""
    findings: List[CartanFinding] = []
    for element in D.elements:
        if element.is_identity or not is_cartan_involution(element.isometry(), tol):
            continue
        p = classify(element.isometry(), tol).fixed_point.coords
        face = D.polyhedron.face_of_point(p, incidence_tol)
        findings.append(CartanFinding(word=element.word, fixed_point=p.tolist(), in_domain=face is not None,
                                      face_index=face.index if face is not None else None,
                                      face_dim=face.dim if face is not None else None))
    return findings


def simplicity_check(D: DirichletDomain, G: Optional[GeneratedGroup] = None, incidence_tol: float = 1e-7,
                     tol: float = 1e-9) -> SimplicityReport:
    """
    Count bisectors through every face of D meeting H.

    Args:
        D: Converged Dirichlet domain
        G: The group; accepted for symmetry with compute_domain, the
            enumerated elements stored on D are used for counting
        incidence_tol: Relative tolerance for a face lying in a bisector
        tol: Linear tolerance

    Returns:
        SimplicityReport with one record per non-ideal face of codimension >= 1

    Raises:
        NotConverged: If D did not converge
    """
    if not D.converged:
        raise NotConverged("Simplicity needs a converged domain", domain=D)

    cone = D.polyhedron
    base = D.base.coords
    excluded = {r.face_index for r in ideal_faces(D) if r.kind == IdealKind.IDEAL_VERTEX}
    normals = [(el.word, base - el.matrix @ base) for el in D.elements if not el.is_identity]

    records: List[FaceRecord] = []
    for face in cone.hyperbolic_faces():
        codim = cone.codim(face)
        if codim < 1:
            continue
        if face.index in excluded:
            records.append(FaceRecord(face_index=face.index, dim=face.dim, codim=codim, count=0, words=[],
                                      transversal=False, verdict=FaceVerdict.IDEAL))
            continue
        through = [(w, n) for w, n in normals if cone.contains_face_in(face, n, incidence_tol)]
        try:
            transversal = bool(through) and transversal_at(face.witness, [n for _, n in through], incidence_tol)
        except NotIncident:
            transversal = False
        verdict = _verdict(len(through), codim, transversal)
        records.append(FaceRecord(face_index=face.index, dim=face.dim, codim=codim, count=len(through),
                                  words=[w for w, _ in through], transversal=transversal, verdict=verdict))
        if verdict != FaceVerdict.SIMPLE:
            logger.debug(f"Face {face.index} (codim {codim}) lies on {len(through)} bisectors: {verdict.value}")

    counted = [r for r in records if r.verdict != FaceVerdict.IDEAL]
    simple = all(r.verdict == FaceVerdict.SIMPLE for r in counted)
    weakly_simple = all(r.count == 2 for r in counted if r.codim == 2) and \
        all(r.count == 1 for r in counted if r.codim == 1)
    if not weakly_simple:
        bad = [r.face_index for r in counted if r.codim in (1, 2) and r.count != r.codim]
        logger.info(f"Tiling is not weakly simple at faces {bad}")
    return SimplicityReport(faces=records, simple=simple, weakly_simple=weakly_simple,
                            cartan_findings=cartan_findings(D, tol, incidence_tol),
                            ideal_face_count=len(excluded))
