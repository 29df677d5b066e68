"""
Nerves of pure complexes and the simplicity predicates built on them.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Set

import networkx as nx

from app.complexes.complex import PolyComplex, derived_complex, residue
from app.errors import NotPure

logger = logging.getLogger(__name__)

Simplex = FrozenSet[str]


@dataclass
class Nerve:
    """
    Simplicial complex with one vertex per facet.

    A set of k+1 facets is a k-simplex when some face of dimension n-k is
    incident to all of them; duals lists those faces. Simplices that are
    present only because the complex is closed under subsets have no dual.
    """
    vertices: List[str]
    simplices: Set[Simplex] = field(default_factory=set)
    duals: Dict[Simplex, List[str]] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def simplices_of_dim(self, k: int) -> List[Simplex]:
        return sorted((s for s in self.simplices if len(s) == k + 1), key=sorted)

    def hasse(self) -> nx.DiGraph:
        """Covering relation of the simplices, each node labelled by its size."""
        graph = nx.DiGraph()
        for s in self.simplices:
            graph.add_node(s, size=len(s))
        for s in self.simplices:
            for v in s:
                smaller = s - {v}
                if smaller in self.simplices:
                    graph.add_edge(smaller, s)
        return graph


def nerve(C: PolyComplex) -> Nerve:
    """
    Nerve of a pure complex.

    Raises:
        NotPure: If some face lies in no facet
    """
    unsupported = [fid for fid in C.faces if not C.incident_facets(fid)]
    if unsupported:
        raise NotPure(f"Faces {sorted(unsupported)[:5]} are not contained in any {C.n}-dimensional facet")

    result = Nerve(vertices=C.facets)
    for fid, face in C.faces.items():
        k = C.n - face.dim
        facets = C.incident_facets(fid)
        if len(facets) < k + 1:
            continue
        for chosen in itertools.combinations(facets, k + 1):
            s = frozenset(chosen)
            result.duals.setdefault(s, []).append(fid)
    closure: Set[Simplex] = set()
    for s in result.duals:
        for size in range(1, len(s) + 1):
            closure.update(frozenset(sub) for sub in itertools.combinations(sorted(s), size))
    result.simplices = closure
    for s in closure:
        result.duals.setdefault(s, [])
    return result


def _simplex_hasse(m: int) -> nx.DiGraph:
    """Covering relation of all nonempty faces of the m-simplex."""
    labels = [str(i) for i in range(m + 1)]
    simplex_nerve = Nerve(vertices=labels)
    simplex_nerve.simplices = {frozenset(c) for size in range(1, m + 2)
                               for c in itertools.combinations(labels, size)}
    return simplex_nerve.hasse()


def residue_is_simplex(C: PolyComplex, face_id: str) -> bool:
    """True iff Nerve(Res(c)) is the full simplex on the n - dim(c) + 1 facets at c, with distinct duals."""
    m = C.n - C.faces[face_id].dim
    N = nerve(residue(C, face_id))
    if len(N.vertices) != m + 1:
        return False
    for s in N.simplices:
        duals = N.duals.get(s, [])
        if len(duals) != 1 or C.faces[duals[0]].dim != C.n - (len(s) - 1):
            return False
    return nx.is_isomorphic(N.hasse(), _simplex_hasse(m),
                            node_match=lambda a, b: a['size'] == b['size'])


def is_simple(C: PolyComplex) -> bool:
    """Every core face has the residue nerve of a simplex."""
    for fid in sorted(C.core):
        if not residue_is_simplex(C, fid):
            logger.debug(f"Residue of {fid} is not a simplex")
            return False
    return True


def is_weakly_simple(C: PolyComplex) -> bool:
    """
    On C', every core face of dimension n-2 lies in exactly 3 facets and
    every core face of dimension n-1 in exactly 2.
    """
    derived = derived_complex(C)
    for fid in sorted(derived.core):
        dim = derived.faces[fid].dim
        expected = {C.n - 2: 3, C.n - 1: 2}.get(dim)
        if expected is None:
            continue
        count = len(derived.incident_facets(fid))
        if count != expected:
            logger.debug(f"Face {fid} of dimension {dim} lies in {count} facets, expected {expected}")
            return False
    return True
