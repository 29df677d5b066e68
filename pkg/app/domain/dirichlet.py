"""
Dirichlet fundamental domains D_x = {p : d(p, x) <= d(p, γx) for all γ}.

Half-spaces are gathered over word-length epochs. Each epoch drops new
half-spaces already implied by the current cone, recomputes the face
lattice, discards facets that never meet the timelike cone and compares the
surviving contributor words with the previous epoch.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

from app.domain.cone import ConePolyhedron, Face, face_lattice
from app.errors import EnumerationBudgetExceeded
from app.geometry.bisector import HalfSpace, dirichlet_halfspace
from app.geometry.lorentz import LorentzVec, VectorLike, check_on_H
from app.groups.group import GeneratedGroup, GroupElement
from app.models.reports import ContributorRecord, ConvergenceRecord, DomainReport, FaceLatticeRecord

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Contributor:
    element: GroupElement
    halfspace: HalfSpace

    @property
    def word(self) -> str:
        return self.element.word


@dataclass(frozen=True)
class Convergence:
    word_length: int
    stable_windows: int
    converged: bool
    exhausted: bool = False
    element_count: int = 0


@dataclass(frozen=True, eq=False)
class DirichletDomain:
    """
    A Dirichlet domain as a cone. Contributor i carries constraint row i of
    the polyhedron; every enumerated element is kept for incidence counts.
    """
    base: LorentzVec
    contributors: Tuple[Contributor, ...]
    polyhedron: ConePolyhedron
    convergence: Convergence
    elements: Tuple[GroupElement, ...]

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def converged(self) -> bool:
        return self.convergence.converged

    @property
    def words(self) -> List[str]:
        return [c.word for c in self.contributors]

    def contributor(self, word: str) -> Optional[Contributor]:
        return next((c for c in self.contributors if c.word == word), None)

    def facet(self, contributor: Contributor) -> Optional[Face]:
        return self.polyhedron.facet_of_row(self.contributors.index(contributor))

    def face_words(self, face: Face) -> List[str]:
        """Contributors whose bisector carries the face."""
        return [self.contributors[i].word for i in sorted(face.active) if i < len(self.contributors)]

    def hyperbolic_faces(self, codim: Optional[int] = None) -> List[Face]:
        return self.polyhedron.hyperbolic_faces(codim)

    def hyperbolic_vertices(self) -> List[Face]:
        """Faces of dimension 1 meeting the timelike cone, i.e. vertices inside H."""
        return [f for f in self.polyhedron.faces_of_dim(1) if f.meets_hyperbolic]

    def contains(self, p: VectorLike, tol: float = 1e-9) -> bool:
        return self.polyhedron.contains(p, tol)

    def to_report(self) -> DomainReport:
        cone = self.polyhedron
        return DomainReport(
            dimension=self.n,
            base=self.base.to_list(),
            contributors=[ContributorRecord(word=c.word, normal=c.halfspace.normal.to_list(),
                                            matrix=c.element.matrix.tolist()) for c in self.contributors],
            rays=cone.rays.tolist(),
            lineality=cone.lineality.T.tolist(),
            faces=[FaceLatticeRecord(index=f.index, dim=f.dim, active=sorted(f.active), rays=list(f.rays),
                                     meets_hyperbolic=f.meets_hyperbolic,
                                     witness=f.witness.tolist() if f.witness is not None else None)
                   for f in cone.faces],
            convergence=ConvergenceRecord(word_length=self.convergence.word_length,
                                          stable_windows=self.convergence.stable_windows,
                                          converged=self.convergence.converged,
                                          exhausted=self.convergence.exhausted,
                                          element_count=self.convergence.element_count),
            degenerate=cone.degenerate,
        )


def _prune(pool: List[Contributor], lattice_kwargs: dict) -> Tuple[ConePolyhedron, List[Contributor]]:
    """Keep the contributors whose rows define facets meeting the timelike cone."""
    cone = face_lattice([c.halfspace for c in pool], **lattice_kwargs)
    keep = []
    for i in sorted(cone.facet_rows):
        if i >= len(pool):
            continue
        facet = cone.facet_of_row(i)
        if facet is not None and facet.meets_hyperbolic:
            keep.append(pool[i])
    if len(keep) != len(pool):
        cone = face_lattice([c.halfspace for c in keep], **lattice_kwargs)
    return cone, keep


def compute_domain(G: GeneratedGroup, x: VectorLike, len_start: int = 1, len_max: int = 12,
                   stability_window: int = 2, tol: float = 1e-9, dedup_tol: float = 1e-9,
                   element_cap: int = 200_000, halfspace_cap: int = 256, hyperbolic_tol: float = 1e-9,
                   kkt_subset_cap: int = 12, sample_points: int = 1000) -> DirichletDomain:
    """
    Dirichlet domain of G at x, grown by word length until stable.

    Args:
        G: Generated group
        x: Base point on H
        len_start: First word length considered
        len_max: Last word length considered
        stability_window: Unchanged epochs needed to declare convergence
        tol: Tolerance for the base point and double description
        dedup_tol: Element deduplication tolerance
        element_cap: Enumeration budget
        halfspace_cap: Largest half-space pool passed to the face lattice
        hyperbolic_tol: Margin for faces meeting the timelike cone
        kkt_subset_cap: Ray subset cap for the timelike test
        sample_points: Fallback samples for the timelike test

    Returns:
        DirichletDomain; if len_max is reached first, convergence.converged is
        False and face counts must not be trusted

    Raises:
        NotOnHyperboloid: If x is off H
        BasePointFixed: If an enumerated non-identity element fixes x
        HalfspaceCapExceeded: If an epoch leaves too many candidate half-spaces
    """
    if len_start < 1 or len_max < len_start:
        raise ValueError(f"Need 1 <= len_start <= len_max, got {len_start}, {len_max}")
    if stability_window < 1:
        raise ValueError(f"stability_window must be >= 1, got {stability_window}")
    base = check_on_H(x, tol, 'base point')
    lattice_kwargs = dict(tol=tol, halfspace_cap=halfspace_cap, hyperbolic_tol=hyperbolic_tol,
                          kkt_subset_cap=kkt_subset_cap, sample_points=sample_points)

    enumerator = G.element_table(0, dedup_tol, element_cap)
    active: List[Contributor] = []
    cone: Optional[ConePolyhedron] = None
    previous: Optional[frozenset] = None
    stable = 0
    converged = False
    target = len_start
    while True:
        try:
            new_elements = enumerator.extend_to(target)
        except EnumerationBudgetExceeded as e:
            if cone is None:
                raise
            logger.warning(f"Stopping domain growth: {str(e)}")
            break
        fresh = [Contributor(el, dirichlet_halfspace(base, el.matrix, tol, word=el.word)) for el in new_elements]
        if cone is not None:
            fresh = [c for c in fresh if not cone.implies(c.halfspace)]
        if fresh or cone is None:
            cone, active = _prune(active + fresh, lattice_kwargs)
        words = frozenset(c.word for c in active)
        logger.info(f"Epoch at word length {enumerator.length}: {len(fresh)} new half-spaces, "
                    f"{len(active)} contributors")

        if enumerator.exhausted:
            converged = True
            break
        stable = stable + 1 if words == previous else 0
        previous = words
        if stable >= stability_window:
            converged = True
            break
        if target >= len_max:
            break
        target += 1

    if not converged:
        logger.warning(f"Dirichlet domain did not stabilise by word length {enumerator.length}; "
                       f"face counts are unreliable")
    word_length = max(el.length for el in enumerator.elements) if enumerator.exhausted else enumerator.length
    convergence = Convergence(word_length=word_length, stable_windows=stable, converged=converged,
                              exhausted=enumerator.exhausted, element_count=len(enumerator.elements))
    return DirichletDomain(base=LorentzVec(base), contributors=tuple(active), polyhedron=cone,
                           convergence=convergence, elements=tuple(enumerator.elements))

