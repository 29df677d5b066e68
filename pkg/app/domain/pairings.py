"""
Side pairings, ridge cycles and ideal faces of a Dirichlet domain.
"""
import logging
from typing import Dict, List, Optional

import numpy as np

from app.domain.cone import Face
from app.domain.dirichlet import Contributor, DirichletDomain
from app.geometry.lorentz import lorentz_form
from app.models.reports import IdealFaceRecord, PairingRecord
from app.schema.types import IdealKind

logger = logging.getLogger(__name__)

NULL_TOL = 1e-7


def _inverse(M: np.ndarray) -> np.ndarray:
    J = lorentz_form(M.shape[0])
    return J @ M.T @ J


def _find_contributor(D: DirichletDomain, M: np.ndarray, tol: float = 1e-7) -> Optional[Contributor]:
    scale = max(1.0, float(np.max(np.abs(M))))
    for c in D.contributors:
        if np.max(np.abs(c.element.matrix - M)) <= tol * scale:
            return c
    return None


def _causal_points(D: DirichletDomain, face: Face) -> List[np.ndarray]:
    """Witness and future causal rays of a face: the part of it that lives in the closure of H."""
    J = lorentz_form(D.polyhedron.size)
    points = [r for r in D.polyhedron.face_rays(face) if float(r @ J @ r) <= NULL_TOL]
    if face.witness is not None:
        points.append(face.witness)
    return points


def side_pairings(D: DirichletDomain, tol: float = 1e-7) -> List[PairingRecord]:
    """
    Pair the facet on Bis(x, γx) with the facet on Bis(x, γ⁻¹x) through γ⁻¹.

    Each pairing is verified by mapping the facet witness and its causal
    rays by γ⁻¹ and checking they land in D on the partner bisector.
    """
    records: List[PairingRecord] = []
    for contributor in D.contributors:
        inverse = _inverse(contributor.element.matrix)
        partner = _find_contributor(D, inverse)
        pairing_word = partner.word if partner is not None else f'({contributor.word})^-1'
        facet = D.facet(contributor)
        if partner is None or facet is None:
            logger.warning(f"Facet {contributor.word} has no partner facet among the contributors")
            records.append(PairingRecord(facet_word=contributor.word, pairing_word=pairing_word, verified=False))
            continue

        normal = partner.halfspace.normal.coords
        J = lorentz_form(normal.size)
        worst = 0.0
        for p in _causal_points(D, facet):
            image = inverse @ p
            image = image / np.linalg.norm(image)
            on_partner = abs(float(image @ J @ normal)) / np.linalg.norm(normal)
            outside = max(0.0, -float(np.min(D.polyhedron.rows @ image)))
            worst = max(worst, on_partner, outside)
        verified = worst <= tol
        if not verified:
            logger.warning(f"Pairing of facet {contributor.word} by {pairing_word} is off by {worst:.3e}")
        records.append(PairingRecord(facet_word=contributor.word, partner_word=partner.word,
                                     pairing_word=pairing_word, verified=verified, max_violation=worst))
    return records


def ridge_cycles(D: DirichletDomain, pairings: Optional[List[PairingRecord]] = None) -> List[List[int]]:
    """
    Cycles of codimension-2 faces meeting H under the side pairings.

    Two ridges are in one cycle when a pairing element maps one onto the
    other; for a polygon in the plane these are the vertex cycles.

    Returns:
        Face index lists, one per cycle, each sorted
    """
    pairings = pairings if pairings is not None else side_pairings(D)
    cone = D.polyhedron
    ridges = cone.hyperbolic_faces(codim=2)
    parent: Dict[int, int] = {f.index: f.index for f in ridges}

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    verified = {p.facet_word for p in pairings if p.verified}
    for row, contributor in enumerate(D.contributors):
        if contributor.word not in verified:
            continue
        inverse = _inverse(contributor.element.matrix)
        for ridge in ridges:
            if row not in ridge.active or ridge.witness is None:
                continue
            image = cone.face_of_point(inverse @ ridge.witness)
            if image is not None and image.index in parent and image.dim == ridge.dim:
                parent[find(ridge.index)] = find(image.index)

    cycles: Dict[int, List[int]] = {}
    for f in ridges:
        cycles.setdefault(find(f.index), []).append(f.index)
    return sorted((sorted(c) for c in cycles.values()), key=lambda c: c[0])


def ideal_faces(D: DirichletDomain, tol: float = NULL_TOL) -> List[IdealFaceRecord]:
    """
    Faces reaching the sphere at infinity.

    A face all of whose extreme rays are null is ideal; a face meeting H
    that also has a non-timelike ray or a lineality direction is unbounded.
    """
    cone = D.polyhedron
    J = lorentz_form(cone.size)
    records: List[IdealFaceRecord] = []
    for face in cone.faces:
        rays = cone.face_rays(face)
        if len(rays) == 0:
            continue
        norms = [float(r @ J @ r) for r in rays]
        if all(abs(q) <= tol for q in norms) and cone.lineality_dim == 0:
            records.append(IdealFaceRecord(face_index=face.index, dim=face.dim, kind=IdealKind.IDEAL_VERTEX))
        elif face.meets_hyperbolic and (any(q > -tol for q in norms) or cone.lineality_dim):
            records.append(IdealFaceRecord(face_index=face.index, dim=face.dim, kind=IdealKind.UNBOUNDED))
    return records
