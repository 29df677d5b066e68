"""
Finite pieces of a Dirichlet tiling as complexes, and group actions on them.

The local complex around D_x uses the tiles γD_x for γ = t·w with t the
identity or a contributor and |w| <= radius_words. Two tile faces are the
same face of the tiling when a bisector through the face relates them.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import nnls

from app.complexes.complex import ComplexFace, Morphism, PolyComplex
from app.domain.dirichlet import DirichletDomain
from app.errors import ElementDoesNotPreserveComplex, InclusionAmbiguity, NotConverged
from app.geometry.isometry import Isometry
from app.groups.group import IDENTITY_WORD, GeneratedGroup, enumerate_elements
from app.models.reports import QuotientReport

logger = logging.getLogger(__name__)

TileFace = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class Tile:
    word: str
    matrix: np.ndarray


class LocalComplex(PolyComplex):
    """A PolyComplex that remembers the tiles and tile faces behind each face."""

    def __init__(self, faces, morphisms, core, tiles: List[Tile], members: Dict[str, List[TileFace]],
                 domain: DirichletDomain, tol: float = 1e-7):
        super().__init__(faces, morphisms, core=core, tol=tol)
        self.tiles = tiles
        self.members = members
        self.domain = domain
        self._class_of: Dict[TileFace, str] = {m: fid for fid, ms in members.items() for m in ms}

    def tile_index(self, M: np.ndarray) -> Optional[int]:
        return _find_tile(self.tiles, M)

    def class_of(self, member: TileFace) -> Optional[str]:
        return self._class_of.get(member)


def _find_tile(tiles: Sequence[Tile], M: np.ndarray, tol: float = 1e-7) -> Optional[int]:
    scale = max(1.0, float(np.max(np.abs(M))))
    for i, tile in enumerate(tiles):
        if np.max(np.abs(tile.matrix - M)) <= tol * scale:
            return i
    return None


def _tile_elements(D: DirichletDomain, G: GeneratedGroup, radius_words: int) -> List[Tile]:
    if radius_words >= 1:
        ball = [(el.word, el.matrix) for el in enumerate_elements(G, radius_words)]
    else:
        ball = [(IDENTITY_WORD, np.eye(G.size))]
    starts = [(IDENTITY_WORD, np.eye(G.size))] + [(c.word, c.element.matrix) for c in D.contributors]
    tiles: List[Tile] = []
    for t_word, t in starts:
        for w_word, w in ball:
            M = t @ w
            if _find_tile(tiles, M) is not None:
                continue
            words = [part for part in (t_word, w_word) if part != IDENTITY_WORD]
            tiles.append(Tile('*'.join(words) or IDENTITY_WORD, M))
    return tiles


def build_local_dirichlet_complex(D: DirichletDomain, G: GeneratedGroup, radius_words: int = 2,
                                  tol: float = 1e-7) -> LocalComplex:
    """
    The tiles near D_x and their faces meeting H, glued along shared faces.

    Face (t, f) is glued to (t·δ, f') whenever f lies on Bis(x, δx) and
    δ⁻¹ maps the relative interior of f into the relative interior of f'.
    Morphisms are the inclusions inside each tile, with identity matrices.
    Core faces are the faces of D_x itself.

    Raises:
        NotConverged: If D did not converge
        InclusionAmbiguity: If a glued face changes dimension or leaves D_x
    """
    if not D.converged:
        raise NotConverged("Local complexes need a converged domain", domain=D)
    cone = D.polyhedron
    base = D.base.coords
    faces = cone.hyperbolic_faces()
    by_index = {f.index: f for f in faces}
    tiles = _tile_elements(D, G, radius_words)

    gluings: Dict[int, List[Tuple[np.ndarray, int]]] = {}
    ambiguous = []
    for f in faces:
        gluings[f.index] = []
        for el in D.elements:
            if el.is_identity or not cone.contains_face_in(f, base - el.matrix @ base, tol):
                continue
            image = cone.face_of_point(np.linalg.solve(el.matrix, f.witness), tol)
            if image is None or image.dim != f.dim or image.index not in by_index:
                ambiguous.append((el.word, f.index))
                continue
            gluings[f.index].append((el.matrix, image.index))
    if ambiguous:
        raise InclusionAmbiguity(f"Faces could not be matched across tiles: {ambiguous[:5]}", pairs=ambiguous)

    parent: Dict[TileFace, TileFace] = {(t, f.index): (t, f.index) for t in range(len(tiles)) for f in faces}

    def find(a: TileFace) -> TileFace:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for t, tile in enumerate(tiles):
        for f in faces:
            for delta, f_image in gluings[f.index]:
                other = _find_tile(tiles, tile.matrix @ delta)
                if other is not None:
                    a, b = find((t, f.index)), find((other, f_image))
                    if a != b:
                        parent[max(a, b)] = min(a, b)

    members: Dict[str, List[TileFace]] = {}
    for key in sorted(parent):
        root = find(key)
        members.setdefault(f'{tiles[root[0]].word}:{root[1]}', []).append(key)

    complex_faces = []
    class_of: Dict[TileFace, str] = {}
    for fid, ms in members.items():
        t, fi = ms[0]
        face = by_index[fi]
        matrix = tiles[t].matrix
        rays = cone.face_rays(face) @ matrix.T
        lineality = cone.lineality.T @ matrix.T if cone.lineality_dim else None
        complex_faces.append(ComplexFace(id=fid, dim=face.dim - 1, rays=rays, lineality=lineality,
                                         handle=(tiles[t].word, fi)))
        for m in ms:
            class_of[m] = fid

    inclusions = [(g.index, f.index) for f in faces for g in faces
                  if g.dim < f.dim and set(g.rays) <= set(f.rays)]
    pairs = {(class_of[(t, g)], class_of[(t, f)]) for t in range(len(tiles)) for g, f in inclusions}
    morphisms = [Morphism(s, d) for s, d in sorted(pairs)]
    core = {class_of[(0, f.index)] for f in faces}
    logger.info(f"Local complex: {len(tiles)} tiles, {len(complex_faces)} faces, {len(morphisms)} incidences")
    return LocalComplex(complex_faces, morphisms, core, tiles, members, D, tol=tol)


# -----------------------------------------------------------------------------
# Group actions
# -----------------------------------------------------------------------------

@dataclass
class ComplexAction:
    """Face permutation per element label, with faces whose image is not in the complex."""
    table: Dict[str, Dict[str, str]] = field(default_factory=dict)
    unmapped: Dict[str, List[str]] = field(default_factory=dict)
    identities: List[str] = field(default_factory=list)


def cone_contains(generators: np.ndarray, lineality: Optional[np.ndarray], points: np.ndarray,
                   tol: float) -> bool:
    columns = [generators.T]
    if lineality is not None and len(lineality):
        columns += [lineality.T, -lineality.T]
    basis = np.hstack(columns)
    for p in points:
        _, residual = nnls(basis, p)
        if residual > tol * max(1.0, float(np.linalg.norm(p))):
            return False
    return True


def _label(element, i: int) -> str:
    if isinstance(element, Isometry):
        return element.label or f'g{i}'
    if hasattr(element, 'word'):
        return element.word
    return f'g{i}'


def _matrix_of(element) -> np.ndarray:
    return np.asarray(element.matrix if hasattr(element, 'matrix') else element, dtype=float)


def group_action_on_complex(C: PolyComplex, elements: Sequence[Union[Isometry, np.ndarray]],
                            strict: bool = False, tol: float = 1e-7) -> ComplexAction:
    """
    Permutation table of faces under each element.

    For local complexes the image of tile face (t, f) under g is (g·t, f)
    when g·t is a tile; otherwise faces are matched by mapping their rays
    and testing containment in a face of the same dimension.

    Raises:
        ElementDoesNotPreserveComplex: If strict and some face has no image
    """
    action = ComplexAction()
    for i, element in enumerate(elements):
        label = _label(element, i)
        M = _matrix_of(element)
        if np.max(np.abs(M - np.eye(M.shape[0]))) <= tol:
            action.identities.append(label)
        table: Dict[str, str] = {}
        missing: List[str] = []
        for fid, face in C.faces.items():
            image = _image_in_local(C, M, fid) if isinstance(C, LocalComplex) else _image_by_geometry(C, M, fid, tol)
            if image is None:
                missing.append(fid)
            else:
                table[fid] = image
        action.table[label] = table
        if missing:
            action.unmapped[label] = missing
            if strict:
                raise ElementDoesNotPreserveComplex(f"{label} maps {missing[:5]} outside the complex")
    return action


def _image_in_local(C: LocalComplex, M: np.ndarray, fid: str) -> Optional[str]:
    for t, fi in C.members[fid]:
        target = C.tile_index(M @ C.tiles[t].matrix)
        if target is not None:
            return C.class_of((target, fi))
    return None


def _float_rays(face: ComplexFace) -> Optional[np.ndarray]:
    if face.rays is not None:
        return face.rays
    if face.exact_rays is not None:
        return np.array(face.exact_rays.tolist(), dtype=float)
    return None


def _image_by_geometry(C: PolyComplex, M: np.ndarray, fid: str, tol: float) -> Optional[str]:
    face = C.faces[fid]
    rays = _float_rays(face)
    if rays is None:
        return fid if np.allclose(M, np.eye(M.shape[0])) else None
    image = rays @ M.T
    for other_id in C.faces_of_dim(face.dim):
        other = C.faces[other_id]
        other_rays = _float_rays(other)
        if other_rays is not None and cone_contains(other_rays, other.lineality, image, tol):
            return other_id
    return None


def quotient_check(C: PolyComplex, action: ComplexAction) -> QuotientReport:
    """
    Whether dividing C by the action keeps at most one morphism per pair.

    A violation is a non-identity element γ and a morphism s → d with
    γ(s) ≠ s and γ(s) → d also a morphism: s and γ(s) become one class
    and the quotient carries two morphisms from it into d.
    """
    violations = []
    free_on_facets = True
    for label, table in action.table.items():
        if label in action.identities:
            continue
        for s, d in sorted(C.morphisms):
            image = table.get(s)
            if image is not None and image != s and (image, d) in C.morphisms:
                violations.append({'element': label, 'face': s, 'image': image, 'coface': d})
        for fid in C.facets:
            if table.get(fid) == fid:
                free_on_facets = False
    if violations:
        logger.warning(f"Quotient would break morphism uniqueness: {violations[:3]}")
    return QuotientReport(valid=not violations, violations=violations, free_on_facets=free_on_facets,
                          unmapped=action.unmapped)
