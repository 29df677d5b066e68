"""
Polyhedral complexes as small categories: faces are objects and every
incidence c ≤ c' is a morphism c → c' carrying an isometry matrix.

Faces may carry geometry (float rays, exact rational rays, lineality) but
nothing here needs it; the combinatorial operations run on ids alone.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np
import sympy

from app.errors import AxiomViolation

logger = logging.getLogger(__name__)

MORPHISM_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class ComplexFace:
    """
    A face of a complex.

    Attributes:
        id: Unique face id
        dim: Hyperbolic dimension
        rays: Float rays as rows, if geometric
        exact_rays: Rational rays as rows of a sympy Matrix, if exact
        lineality: Lineality directions as rows
        handle: Back-reference into the structure the face was built from
    """
    id: str
    dim: int
    rays: Optional[np.ndarray] = None
    exact_rays: Optional[sympy.Matrix] = None
    lineality: Optional[np.ndarray] = None
    handle: Any = None

    @property
    def has_geometry(self) -> bool:
        return self.rays is not None or self.exact_rays is not None


@dataclass(frozen=True, eq=False)
class Morphism:
    source: str
    target: str
    matrix: Any = None

    @property
    def is_identity(self) -> bool:
        return self.matrix is None


def _as_float(M, size: int) -> np.ndarray:
    if M is None:
        return np.eye(size)
    if isinstance(M, sympy.MatrixBase):
        return np.array(M.tolist(), dtype=float)
    return np.asarray(M, dtype=float)


def _matrices_agree(A, B, tol: float) -> bool:
    if A is None and B is None:
        return True
    if isinstance(A, sympy.MatrixBase) and isinstance(B, sympy.MatrixBase):
        return (A - B).is_zero_matrix
    size = (A if A is not None else B).shape[0]
    a, b = _as_float(A, size), _as_float(B, size)
    return bool(np.max(np.abs(a - b)) <= tol * max(1.0, float(np.max(np.abs(a)))))


def _compose(outer, inner):
    """Matrix of outer ∘ inner; None stands for the identity."""
    if outer is None:
        return inner
    if inner is None:
        return outer
    if isinstance(outer, sympy.MatrixBase) and isinstance(inner, sympy.MatrixBase):
        return outer * inner
    return _as_float(outer, outer.shape[0]) @ _as_float(inner, inner.shape[0])


class PolyComplex:
    """
    A complex whose incidences are closed under composition with at most
    one morphism per ordered pair of faces.

    Args:
        faces: Face records
        morphisms: Morphisms source → target (source a proper sub-face of target)
        core: Face ids at which local predicates are evaluated; all faces by default
        tol: Tolerance for comparing float morphism matrices

    Raises:
        AxiomViolation: On duplicate face ids, a repeated or conflicting
            morphism, a morphism that does not lower dimension, or an
            unknown face id
    """

    def __init__(self, faces: Sequence[ComplexFace], morphisms: Sequence[Morphism] = (),
                 core: Optional[Iterable[str]] = None, tol: float = MORPHISM_TOL):
        self.tol = tol
        self.faces: Dict[str, ComplexFace] = {}
        for face in faces:
            if face.id in self.faces:
                raise AxiomViolation(f"Duplicate face id {face.id!r}", pairs=[(face.id, face.id)])
            self.faces[face.id] = face

        self.morphisms: Dict[Tuple[str, str], Morphism] = {}
        duplicates = []
        for m in morphisms:
            if m.source not in self.faces or m.target not in self.faces:
                raise AxiomViolation(f"Morphism {m.source} → {m.target} names an unknown face",
                                     pairs=[(m.source, m.target)])
            if self.faces[m.source].dim >= self.faces[m.target].dim:
                raise AxiomViolation(f"Morphism {m.source} → {m.target} does not lower dimension",
                                     pairs=[(m.source, m.target)])
            if (m.source, m.target) in self.morphisms:
                duplicates.append((m.source, m.target))
                continue
            self.morphisms[(m.source, m.target)] = m
        if duplicates:
            raise AxiomViolation(f"More than one morphism for pairs {duplicates}", pairs=duplicates)
        self._close()
        self._up: Dict[str, Set[str]] = {fid: set() for fid in self.faces}
        self._down: Dict[str, Set[str]] = {fid: set() for fid in self.faces}
        for s, t in self.morphisms:
            self._up[s].add(t)
            self._down[t].add(s)

        self.n = max((f.dim for f in self.faces.values()), default=-1)
        self.core: FrozenSet[str] = frozenset(core) if core is not None else frozenset(self.faces)

    def _close(self):
        """Add composites until closed; a composite that disagrees with a given morphism is a violation."""
        conflicts = []
        changed = True
        while changed:
            changed = False
            by_source: Dict[str, List[Morphism]] = {}
            for m in self.morphisms.values():
                by_source.setdefault(m.source, []).append(m)
            for first in list(self.morphisms.values()):
                for second in by_source.get(first.target, []):
                    key = (first.source, second.target)
                    composite = _compose(second.matrix, first.matrix)
                    existing = self.morphisms.get(key)
                    if existing is None:
                        self.morphisms[key] = Morphism(key[0], key[1], composite)
                        changed = True
                    elif not _matrices_agree(existing.matrix, composite, self.tol) and key not in conflicts:
                        conflicts.append(key)
        if conflicts:
            raise AxiomViolation(f"Composite morphisms disagree for pairs {conflicts}", pairs=conflicts)

    # -------------------------------------------------------------------------

    def __contains__(self, face_id: str) -> bool:
        return face_id in self.faces

    def __len__(self) -> int:
        return len(self.faces)

    def face(self, face_id: str) -> ComplexFace:
        return self.faces[face_id]

    @property
    def facets(self) -> List[str]:
        return sorted(fid for fid, f in self.faces.items() if f.dim == self.n)

    def faces_of_dim(self, dim: int) -> List[str]:
        return sorted(fid for fid, f in self.faces.items() if f.dim == dim)

    def cofaces(self, face_id: str) -> Set[str]:
        """Faces c' with a morphism face_id → c'."""
        return set(self._up[face_id])

    def subfaces(self, face_id: str) -> Set[str]:
        """Faces c' with a morphism c' → face_id."""
        return set(self._down[face_id])

    def morphism(self, source: str, target: str) -> Optional[Morphism]:
        return self.morphisms.get((source, target))

    def incident(self, a: str, b: str) -> bool:
        return (a, b) in self.morphisms or (b, a) in self.morphisms

    def incident_facets(self, face_id: str) -> List[str]:
        if self.faces[face_id].dim == self.n:
            return [face_id]
        return sorted(t for t in self._up[face_id] if self.faces[t].dim == self.n)

    def is_pure(self) -> bool:
        return all(self.incident_facets(fid) for fid in self.faces)

    def subcomplex(self, face_ids: Iterable[str], core: Optional[Iterable[str]] = None) -> 'PolyComplex':
        """Full subcategory on the given faces."""
        keep = set(face_ids)
        faces = [self.faces[fid] for fid in sorted(keep)]
        morphisms = [m for (s, t), m in self.morphisms.items() if s in keep and t in keep]
        kept_core = keep & set(core if core is not None else self.core)
        return PolyComplex(faces, morphisms, core=kept_core, tol=self.tol)

    def __repr__(self) -> str:
        return f"PolyComplex(n={self.n}, faces={len(self.faces)}, morphisms={len(self.morphisms)})"


# -----------------------------------------------------------------------------
# Derived constructions
# -----------------------------------------------------------------------------

def residue(C: PolyComplex, face_id: str) -> PolyComplex:
    """
    Res(c): the face together with every face it is incident to.

    Raises:
        KeyError: If the face does not exist
    """
    if face_id not in C:
        raise KeyError(f"Unknown face {face_id!r}")
    return C.subcomplex({face_id} | C.cofaces(face_id))


def skeleton(C: PolyComplex, k: int) -> PolyComplex:
    """Faces of dimension at most k."""
    return C.subcomplex(fid for fid, f in C.faces.items() if f.dim <= k)


def difference_complex(C: PolyComplex, B: PolyComplex) -> PolyComplex:
    """
    C - B: every face of C minus the faces of B, with incidences restricted.

    Combinatorially a face c^B of the difference is c with the images of the
    faces of B removed, so exactly the faces of B disappear.
    """
    return C.subcomplex(fid for fid in C.faces if fid not in B)


def derived_complex(C: PolyComplex) -> PolyComplex:
    """C' = C - C^(n-3)."""
    return difference_complex(C, skeleton(C, C.n - 3))


def face_poset(C: PolyComplex) -> nx.DiGraph:
    """The poset of faces as a transitively closed DiGraph with an edge c → c' for c < c'."""
    graph = nx.DiGraph()
    for fid, face in C.faces.items():
        graph.add_node(fid, dim=face.dim)
    graph.add_edges_from(C.morphisms.keys())
    return graph
