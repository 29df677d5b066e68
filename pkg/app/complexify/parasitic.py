"""
Parasitic intersections of face spans.

For a face c and sub-faces c1..ck, I = ∩ F_{c,ci}(Span ci) inside Span c is
primary parasitic when it is not the image of the span of a face c0 lying
below every ci. A Cartan fixed point p on a face c cuts each proper sub-face
span in a secondary parasitic subspace Span e ∩ p^⊥. Saturation pushes
records along every morphism and pulls them back along every inclusion.
"""
import logging
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.complexes.complex import ComplexFace, PolyComplex
from app.complexify.cache import IntersectionCache
from app.complexify.subspace import (
    ProjectiveSubspace,
    intersect_subspaces,
    lorentz_annihilator,
    span_of_face,
)
from app.domain.cone import face_meets_hyperbolic
from app.errors import CombinatorialCapExceeded
from app.geometry.lorentz import check_on_H, lorentz_form
from app.models.reports import ParasiticEntry, ParasiticReport
from app.schema.types import ParasiticKind

logger = logging.getLogger(__name__)

TUPLE_BUDGET = 200_000
ORBIT_BUDGET = 10_000


@dataclass
class ParasiticRecord:
    """
    A parasitic subspace of 𝒫_host.

    members is the defining tuple of sub-faces for primary records and the
    single cut sub-face for secondary ones. The orbit lists every (face,
    subspace) reached by saturation, starting with (host, subspace).
    """
    kind: ParasiticKind
    host: str
    members: Tuple[str, ...]
    subspace: ProjectiveSubspace
    fixed_point: Optional[Tuple[float, ...]] = None
    misses_hyperbolic: Optional[bool] = None
    orbit: List[Tuple[str, ProjectiveSubspace]] = field(default_factory=list)

    def to_entry(self) -> ParasiticEntry:
        return ParasiticEntry(
            kind=self.kind,
            host=self.host,
            members=list(self.members),
            fixed_point=list(self.fixed_point) if self.fixed_point is not None else None,
            basis=self.subspace.to_serializable(),
            exact=self.subspace.exact,
            orbit=[{'face': fid, 'basis': s.to_serializable()} for fid, s in self.orbit],
            misses_hyperbolic=self.misses_hyperbolic,
        )


def parasitic_report(primary: Sequence[ParasiticRecord],
                     secondary: Sequence[ParasiticRecord] = ()) -> ParasiticReport:
    return ParasiticReport(primary=[r.to_entry() for r in primary],
                           secondary=[r.to_entry() for r in secondary])


def face_spans(C: PolyComplex, exact: bool = True) -> Dict[str, ProjectiveSubspace]:
    """
    Span of every face.

    Raises:
        ValueError: If some face carries no rays
    """
    missing = sorted(fid for fid, face in C.faces.items() if not face.has_geometry)
    if missing:
        raise ValueError(f"Faces without geometry cannot be spanned: {missing[:5]}")
    return {fid: span_of_face(face, exact=None if exact else False) for fid, face in C.faces.items()}


def _image_in(C: PolyComplex, spans: Dict[str, ProjectiveSubspace], source: str, target: str) -> ProjectiveSubspace:
    """F_{target,source}(𝒫_source) inside 𝒫_target."""
    if source == target:
        return spans[source]
    return spans[source].image(C.morphism(source, target).matrix)


def _realized(C: PolyComplex, members: Tuple[str, ...], I: ProjectiveSubspace,
              images: Dict[str, ProjectiveSubspace]) -> bool:
    """Some c0 lying below (or equal to) every member has image I in the host."""
    candidates = set.intersection(*({m} | C.subfaces(m) for m in members))
    return any(images[c0].equals(I) for c0 in candidates)


def primary_parasitic(C: PolyComplex, tuple_cap: int = 4, exact: bool = True,
                      spans: Optional[Dict[str, ProjectiveSubspace]] = None,
                      cache: Optional[IntersectionCache] = None,
                      max_tuples: int = TUPLE_BUDGET) -> List[ParasiticRecord]:
    """
    Enumerate primary parasitic intersections.

    Tuples of 2..tuple_cap distinct sub-faces of every host are visited in
    lexicographic order; a zero running intersection prunes every
    extension. Records are deduplicated per host by subspace, keeping the
    first defining tuple, and sorted by host then canonical key.

    Args:
        C: Complex whose faces all carry rays
        tuple_cap: Largest tuple size
        exact: Use rational arithmetic when the faces carry exact rays
        spans: Precomputed face spans
        cache: Intersection cache; the module default when omitted
        max_tuples: Budget on evaluated tuples

    Returns:
        Primary ParasiticRecords

    Raises:
        CombinatorialCapExceeded: If more than max_tuples tuples are evaluated
    """
    spans = spans if spans is not None else face_spans(C, exact)
    records: List[ParasiticRecord] = []
    evaluated = 0

    for host in sorted(C.faces):
        subs = sorted(C.subfaces(host))
        if len(subs) < 2:
            continue
        images = {s: _image_in(C, spans, s, host) for s in subs}
        found: List[ParasiticRecord] = []
        stack: List[Tuple[int, Tuple[str, ...], Optional[ProjectiveSubspace]]] = [(0, (), None)]
        while stack:
            start, chosen, current = stack.pop()
            # reversed so the lexicographically smallest extension is popped first
            for i in reversed(range(start, len(subs))):
                s = subs[i]
                I = images[s] if current is None else intersect_subspaces([current, images[s]], cache=cache)
                evaluated += 1
                if evaluated > max_tuples:
                    raise CombinatorialCapExceeded(f"More than {max_tuples} sub-face tuples evaluated")
                if I.is_zero:
                    continue
                members = chosen + (s,)
                if len(members) < tuple_cap:
                    stack.append((i + 1, members, I))
                if len(members) >= 2:
                    found.append(ParasiticRecord(ParasiticKind.PRIMARY, host, members, I))

        kept: List[ParasiticRecord] = []
        for record in sorted(found, key=lambda r: r.members):
            if any(k.subspace.equals(record.subspace) for k in kept):
                continue
            if not _realized(C, record.members, record.subspace, images):
                kept.append(record)
        records.extend(sorted(kept, key=lambda r: r.subspace.key))
        if kept:
            logger.debug(f"Face {host}: {len(kept)} primary parasitic subspaces")

    logger.info(f"Primary parasitic enumeration: {len(records)} records from {evaluated} tuples")
    return records


# -----------------------------------------------------------------------------
# Secondary records
# -----------------------------------------------------------------------------

def face_float_rays(face: ComplexFace) -> np.ndarray:
    """Float generators of the face cone, lineality included in both directions."""
    if face.rays is not None:
        rays = np.asarray(face.rays, dtype=float)
    elif face.exact_rays is not None:
        rays = np.array(face.exact_rays.tolist(), dtype=float)
    else:
        return np.zeros((0, 0))
    if face.lineality is not None and len(face.lineality):
        lineality = np.asarray(face.lineality, dtype=float)
        rays = np.vstack([rays, lineality, -lineality])
    return rays


def section_generators(rays: np.ndarray, p: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Generators of cone(rays) ∩ p^⊥."""
    if rays.size == 0:
        return rays
    values = rays @ lorentz_form(len(p)) @ p
    scale = max(1.0, float(np.max(np.abs(values))))
    generators = [r for r, v in zip(rays, values) if abs(v) <= tol * scale]
    positive = [(r, v) for r, v in zip(rays, values) if v > tol * scale]
    negative = [(r, v) for r, v in zip(rays, values) if v < -tol * scale]
    generators += [vi * rj - vj * ri for ri, vi in positive for rj, vj in negative]
    if not generators:
        return np.zeros((0, len(p)))
    return np.array(generators)


def secondary_parasitic(C: PolyComplex, cartan_data: Sequence[Tuple[str, Sequence[float]]], exact: bool = True,
                        spans: Optional[Dict[str, ProjectiveSubspace]] = None,
                        cache: Optional[IntersectionCache] = None, tol: float = 1e-9) -> List[ParasiticRecord]:
    """
    Cut every proper sub-face span of each listed face by p^⊥.

    Args:
        C: Complex with geometry
        cartan_data: (face id, fixed point p) pairs, p on H
        exact: Rational arithmetic when both the face and p are rational
        spans: Precomputed face spans
        cache: Intersection cache
        tol: Tolerance for p on H and for the hyperbolic test

    Returns:
        Secondary ParasiticRecords, each flagged with whether the cut
        misses the hyperbolic part of the sub-face

    Raises:
        NotOnHyperboloid: If some p is not on H
    """
    spans = spans if spans is not None else face_spans(C, exact)
    records: List[ParasiticRecord] = []
    for host, p in cartan_data:
        p_float = check_on_H(np.array([float(v) for v in p]), tol, name=f'fixed point on {host}')
        polar = lorentz_annihilator(list(p), exact=None if exact else False)
        if not spans[host].as_float().contains_vector(p_float, 1e-7):
            logger.warning(f"Fixed point {p_float.tolist()} is not in the span of face {host}")

        kept: List[ParasiticRecord] = []
        for e in sorted(C.subfaces(host)):
            Q = intersect_subspaces([_image_in(C, spans, e, host), polar], cache=cache)
            if Q.is_zero or any(k.subspace.equals(Q) for k in kept):
                continue
            section = section_generators(face_float_rays(C.faces[e]), p_float, tol)
            misses = not face_meets_hyperbolic(section, tol)
            kept.append(ParasiticRecord(ParasiticKind.SECONDARY, host, (e,), Q,
                                        fixed_point=tuple(p_float.tolist()), misses_hyperbolic=misses))
        records.extend(kept)
        logger.debug(f"Face {host}: {len(kept)} secondary parasitic subspaces")
    return records


# -----------------------------------------------------------------------------
# Saturation
# -----------------------------------------------------------------------------

def saturate(records: Sequence[ParasiticRecord], C: PolyComplex,
             spans: Optional[Dict[str, ProjectiveSubspace]] = None, exact: bool = True,
             cache: Optional[IntersectionCache] = None, max_orbit: int = ORBIT_BUDGET) -> List[ParasiticRecord]:
    """
    Close each record under morphism images and inclusion pullbacks.

    From (c, V) the orbit reaches (c', F_{c',c}(V)) for every coface c' and
    (e, F_{c,e}^{-1}(V) ∩ 𝒫_e) for every sub-face e, dropping zero
    subspaces. Orbits restart from (host, subspace), so saturating twice
    gives the same orbits.

    Raises:
        CombinatorialCapExceeded: If an orbit grows beyond max_orbit entries
    """
    spans = spans if spans is not None else face_spans(C, exact)
    saturated = []
    for record in records:
        orbit: List[Tuple[str, ProjectiveSubspace]] = [(record.host, record.subspace)]
        queue = deque(orbit)
        while queue:
            fid, V = queue.popleft()
            moves = [(g, V.image(C.morphism(fid, g).matrix)) for g in sorted(C.cofaces(fid))]
            for e in sorted(C.subfaces(fid)):
                pulled = V.preimage(C.morphism(e, fid).matrix)
                moves.append((e, intersect_subspaces([pulled, spans[e]], cache=cache)))
            for target, W in moves:
                if W.is_zero or any(f == target and U.equals(W) for f, U in orbit):
                    continue
                orbit.append((target, W))
                queue.append((target, W))
                if len(orbit) > max_orbit:
                    raise CombinatorialCapExceeded(f"Orbit of the record on {record.host} exceeds {max_orbit}")
        orbit.sort(key=lambda item: (item[0], repr(item[1].key)))
        saturated.append(replace(record, orbit=orbit))
    return saturated
