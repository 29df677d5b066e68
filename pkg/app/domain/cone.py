"""
Polyhedral cones of R^{n,1} given by half-spaces, and their face lattices.

A cone is stored as its lineality space L plus the extreme rays of the
pointed cone left in the Lorentz-orthogonal complement of L. The constraint
x0 >= 0 is always appended as the last row, so every cone lives in the
future half-space. The apex {0} is not listed as a face.
"""
import itertools
import logging
from dataclasses import dataclass
from math import comb
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import minimize

from app.errors import HalfspaceCapExceeded
from app.geometry.bisector import HalfSpace
from app.geometry.lorentz import VectorLike, _coords, lorentz_form

logger = logging.getLogger(__name__)

SPLIT_TOL = 1e-9
HYPERBOLIC_TOL = 1e-9
KKT_SUBSET_BUDGET = 20_000


@dataclass(frozen=True)
class Face:
    """A face of a cone: its incident rays, active rows and whether it meets the timelike cone."""
    index: int
    dim: int
    rays: Tuple[int, ...]
    active: FrozenSet[int]
    meets_hyperbolic: bool
    witness: Optional[np.ndarray] = None


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _rank(vectors: np.ndarray, tol: float = 1e-9) -> int:
    if vectors.size == 0:
        return 0
    s = np.linalg.svd(vectors, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, float(s[0]))))


# -----------------------------------------------------------------------------
# Minimum of the Lorentzian form over a cone of rays
# -----------------------------------------------------------------------------

def _stationary_point(G: np.ndarray) -> Optional[np.ndarray]:
    """Interior stationary point of c^T G c on the simplex {c >= 0, sum c = 1}, if any."""
    k = G.shape[0]
    K = np.zeros((k + 1, k + 1))
    K[:k, :k] = 2 * G
    K[:k, k] = 1.0
    K[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol, *_ = np.linalg.lstsq(K, rhs, rcond=None)
    if np.max(np.abs(K @ sol - rhs)) > 1e-9:
        return None
    c = sol[:k]
    if np.any(c < -1e-12):
        return None
    return np.clip(c, 0.0, None)


def minimize_lorentz_form(rays: np.ndarray, subset_cap: int = 12, sample_points: int = 1000,
                          seed: int = 0, stop_below: Optional[float] = None) -> Tuple[float, np.ndarray]:
    """
    Minimum of the Lorentzian form over the convex hull of unit rays.

    Stationary points are enumerated over ray subsets of size at most
    min(rank, subset_cap); that is exact because the form is quadratic and,
    by Carathéodory, a timelike vector of the cone is a combination of at
    most rank rays. Larger problems fall back to SLSQP plus Dirichlet
    samples.

    Args:
        rays: Ray vectors (rows)
        subset_cap: Largest subset size in the stationary-point search
        sample_points: Dirichlet samples for the fallback
        seed: Seed of the fallback samples
        stop_below: Return as soon as a value below this is found

    Returns:
        (minimum value, minimizing vector)
    """
    R = np.array([_unit(r) for r in rays])
    J = lorentz_form(R.shape[1])
    G = R @ J @ R.T
    diag = np.diag(G)
    best_i = int(np.argmin(diag))
    best_value, best_c = float(diag[best_i]), np.eye(len(R))[best_i]
    centroid = np.full(len(R), 1.0 / len(R))
    if float(centroid @ G @ centroid) < best_value:
        best_value, best_c = float(centroid @ G @ centroid), centroid
    if stop_below is not None and best_value < stop_below:
        return best_value, best_c @ R

    max_size = min(_rank(R), subset_cap, len(R))
    subset_count = sum(comb(len(R), s) for s in range(2, max_size + 1))
    if subset_count <= KKT_SUBSET_BUDGET:
        for size in range(2, max_size + 1):
            for subset in itertools.combinations(range(len(R)), size):
                idx = list(subset)
                c = _stationary_point(G[np.ix_(idx, idx)])
                if c is None:
                    continue
                value = float(c @ G[np.ix_(idx, idx)] @ c)
                if value < best_value:
                    best_value = value
                    best_c = np.zeros(len(R))
                    best_c[idx] = c
                    if stop_below is not None and best_value < stop_below:
                        return best_value, best_c @ R
    else:
        logger.debug(f"{subset_count} ray subsets; using SLSQP with {sample_points} samples")
        rng = np.random.default_rng(seed)
        if sample_points:
            samples = rng.dirichlet(np.ones(len(R)), size=sample_points)
            values = np.einsum('ij,jk,ik->i', samples, G, samples)
            i = int(np.argmin(values))
            if values[i] < best_value:
                best_value, best_c = float(values[i]), samples[i]
        result = minimize(lambda c: c @ G @ c, np.full(len(R), 1.0 / len(R)), jac=lambda c: 2 * G @ c,
                          method='SLSQP', bounds=[(0.0, 1.0)] * len(R),
                          constraints=[{'type': 'eq', 'fun': lambda c: np.sum(c) - 1.0}])
        if result.success and result.fun < best_value:
            best_value, best_c = float(result.fun), np.clip(result.x, 0.0, None)
    return best_value, best_c @ R


def face_meets_hyperbolic(rays: Union[np.ndarray, Sequence[VectorLike]], tol: float = HYPERBOLIC_TOL,
                          subset_cap: int = 12, sample_points: int = 1000) -> bool:
    """
    True iff the cone spanned by the rays contains a future timelike vector.

    A face spanned by a single null ray touches only the sphere at infinity;
    two null rays with negative product span a timelike sum.
    """
    arr = np.array([_coords(r) for r in rays]) if len(rays) else np.zeros((0, 0))
    if arr.size == 0:
        return False
    value, _ = minimize_lorentz_form(arr, subset_cap, sample_points, stop_below=-tol)
    return value < -tol


def hyperbolic_witness(rays: np.ndarray, tol: float = HYPERBOLIC_TOL, subset_cap: int = 12,
                       sample_points: int = 1000) -> Optional[np.ndarray]:
    """
    A point of H in the relative interior of the cone spanned by the rays.

    A timelike point of the cone is pushed toward the centroid until it sits
    in the relative interior while staying timelike.
    """
    if rays.size == 0:
        return None
    value, y = minimize_lorentz_form(rays, subset_cap, sample_points, stop_below=-tol)
    if value >= -tol:
        return None
    J = lorentz_form(rays.shape[1])
    centroid = np.mean([_unit(r) for r in rays], axis=0)
    eps = 1.0
    for _ in range(60):
        w = y + eps * centroid
        q = float(w @ J @ w)
        if q < -tol * float(w @ w):
            return w / np.sqrt(-q)
        eps /= 2
    return y / np.sqrt(-float(y @ J @ y))


# -----------------------------------------------------------------------------
# Double description
# -----------------------------------------------------------------------------

def _double_description(A: np.ndarray, tol: float) -> List[np.ndarray]:
    """
    Extreme rays of the pointed cone {y : A y >= 0}; A must have full column rank.

    Starts from a simplicial cone on d independent rows and inserts the
    remaining rows one at a time, combining adjacent positive and negative
    rays with the combinatorial adjacency test.
    """
    m, d = A.shape
    basis_rows: List[int] = []
    for i in range(m):
        if _rank(A[basis_rows + [i]], 1e-10) == len(basis_rows) + 1:
            basis_rows.append(i)
            if len(basis_rows) == d:
                break
    inverse = np.linalg.inv(A[basis_rows])
    rays = [_unit(inverse[:, j]) for j in range(d)]
    zeros = [frozenset(basis_rows[i] for i in range(d) if i != j) for j in range(d)]

    for i in range(m):
        if i in basis_rows:
            continue
        a = A[i]
        values = [float(a @ r) for r in rays]
        positive = [j for j, v in enumerate(values) if v > tol]
        negative = [j for j, v in enumerate(values) if v < -tol]
        if not negative:
            zeros = [z | {i} if abs(values[j]) <= tol else z for j, z in enumerate(zeros)]
            continue
        new_rays: List[np.ndarray] = []
        new_zeros: List[FrozenSet[int]] = []
        for j, r in enumerate(rays):
            if values[j] > tol:
                new_rays.append(r)
                new_zeros.append(zeros[j])
            elif values[j] >= -tol:
                new_rays.append(r)
                new_zeros.append(zeros[j] | {i})
        for p in positive:
            for q in negative:
                common = zeros[p] & zeros[q]
                if len(common) < d - 2:
                    continue
                if any(k != p and k != q and common <= zeros[k] for k in range(len(rays))):
                    continue
                new_rays.append(_unit(values[p] * rays[q] - values[q] * rays[p]))
                new_zeros.append(common | {i})
        rays, zeros = new_rays, new_zeros

    unique: List[np.ndarray] = []
    for r in rays:
        if not any(np.max(np.abs(r - u)) <= 1e-9 for u in unique):
            unique.append(r)
    return unique


# -----------------------------------------------------------------------------
# Cone polyhedron
# -----------------------------------------------------------------------------

class ConePolyhedron:
    """
    Cone {p : p·n_i >= 0 for every half-space, p0 >= 0} with its face lattice.

    Attributes:
        halfspaces: The input half-spaces, in order
        rows: Unit constraint covectors; row len(halfspaces) is p0 >= 0
        lineality: Orthonormal basis (columns) of the lineality space
        rays: Unit extreme rays of the pointed part, one per row
        zero_sets: Rows tight at each ray
        faces: Faces sorted by decreasing dimension; faces[0] is the whole cone
        facet_rows: Rows defining facets (first row of each duplicate group)
        degenerate: True when the cone is not full-dimensional
    """

    def __init__(self, halfspaces: Sequence[HalfSpace], tol: float = SPLIT_TOL,
                 hyperbolic_tol: float = HYPERBOLIC_TOL, subset_cap: int = 12, sample_points: int = 1000):
        if not halfspaces:
            raise ValueError("A cone needs at least one half-space")
        self.halfspaces = list(halfspaces)
        self.size = self.halfspaces[0].normal.coords.size
        self.tol = tol
        self.hyperbolic_tol = hyperbolic_tol
        self.subset_cap = subset_cap
        self.sample_points = sample_points
        self.future_row = len(self.halfspaces)

        covectors = [_unit(h.covector) for h in self.halfspaces]
        future = np.zeros(self.size)
        future[0] = 1.0
        self.rows = np.array(covectors + [future])
        self.aliases = self._duplicate_rows()

        self.lineality = null_space(self.rows, rcond=1e-9)
        complement = null_space(self.lineality.T) if self.lineality.shape[1] else np.eye(self.size)
        reduced = self.rows @ complement
        if complement.shape[1] == 0:
            self.rays = np.zeros((0, self.size))
        else:
            pointed = _double_description(reduced, tol)
            self.rays = np.array([_unit(complement @ y) for y in pointed]) if pointed \
                else np.zeros((0, self.size))
        self.zero_sets: List[FrozenSet[int]] = [
            frozenset(int(i) for i in np.flatnonzero(np.abs(self.rows @ r) <= 10 * tol))
            for r in self.rays
        ]
        self.lineality_dim = self.lineality.shape[1]
        self.dim = _rank(self.rays) + self.lineality_dim
        self.degenerate = self.dim < self.size
        self.faces: List[Face] = []
        self.facet_rows: List[int] = []
        self._build_faces()

    def _duplicate_rows(self) -> Dict[int, int]:
        aliases: Dict[int, int] = {}
        for i in range(len(self.rows)):
            for j in range(i):
                if j not in aliases and np.max(np.abs(self.rows[i] - self.rows[j])) <= 1e-9:
                    aliases[i] = j
                    break
        return aliases

    def _ray_set_dim(self, ray_set: FrozenSet[int]) -> int:
        return _rank(self.rays[sorted(ray_set)]) + self.lineality_dim if ray_set else self.lineality_dim

    def _active(self, ray_set: FrozenSet[int]) -> FrozenSet[int]:
        if not ray_set:
            return frozenset(range(len(self.rows)))
        return frozenset.intersection(*(self.zero_sets[r] for r in ray_set))

    def _build_faces(self):
        all_rays = frozenset(range(len(self.rays)))
        facet_sets: Dict[FrozenSet[int], int] = {}
        for i in range(len(self.rows)):
            if i in self.aliases:
                continue
            ray_set = frozenset(r for r in all_rays if i in self.zero_sets[r])
            if self._ray_set_dim(ray_set) == self.dim - 1 and ray_set not in facet_sets:
                facet_sets[ray_set] = i
                self.facet_rows.append(i)

        found = set(facet_sets)
        frontier = list(facet_sets)
        while frontier:
            fresh = []
            for F in frontier:
                for H in facet_sets:
                    meet = F & H
                    if meet and meet not in found:
                        found.add(meet)
                        fresh.append(meet)
            frontier = fresh
        found.add(all_rays)
        if self.lineality_dim:
            found.add(frozenset())

        records = []
        for ray_set in found:
            records.append((self._ray_set_dim(ray_set), tuple(sorted(ray_set))))
        records.sort(key=lambda rec: (-rec[0], rec[1]))
        for index, (dim, ray_tuple) in enumerate(records):
            ray_set = frozenset(ray_tuple)
            ray_array = self.rays[list(ray_tuple)] if ray_tuple else np.zeros((0, self.size))
            witness = hyperbolic_witness(ray_array, self.hyperbolic_tol, self.subset_cap,
                                         self.sample_points) if ray_tuple else None
            self.faces.append(Face(index=index, dim=dim, rays=ray_tuple, active=self._active(ray_set),
                                   meets_hyperbolic=witness is not None, witness=witness))
        logger.debug(f"Cone in R^{self.size}: {len(self.rays)} rays, lineality {self.lineality_dim}, "
                     f"{len(self.faces)} faces")

    # -------------------------------------------------------------------------

    @property
    def top(self) -> Face:
        return self.faces[0]

    def face_rays(self, face: Face) -> np.ndarray:
        return self.rays[list(face.rays)] if face.rays else np.zeros((0, self.size))

    def codim(self, face: Face) -> int:
        return self.size - face.dim

    def faces_of_dim(self, dim: int) -> List[Face]:
        return [f for f in self.faces if f.dim == dim]

    def hyperbolic_faces(self, codim: Optional[int] = None) -> List[Face]:
        return [f for f in self.faces if f.meets_hyperbolic and (codim is None or self.codim(f) == codim)]

    def facet_of_row(self, row: int) -> Optional[Face]:
        """The facet carried by a constraint row, if that row defines one."""
        row = self.aliases.get(row, row)
        if row not in self.facet_rows:
            return None
        ray_set = tuple(r for r in range(len(self.rays)) if row in self.zero_sets[r])
        for face in self.faces:
            if face.rays == ray_set and face.dim == self.dim - 1:
                return face
        return None

    def redundant_rows(self) -> List[int]:
        return [i for i in range(len(self.halfspaces)) if i not in self.facet_rows]

    def contains(self, p: VectorLike, tol: float = 1e-9) -> bool:
        arr = _coords(p)
        return bool(np.all(self.rows @ arr >= -tol * np.linalg.norm(arr)))

    def implies(self, halfspace: HalfSpace, tol: float = 1e-9) -> bool:
        """True iff every point of the cone already satisfies the half-space."""
        c = _unit(halfspace.covector)
        if self.lineality_dim and np.max(np.abs(c @ self.lineality)) > tol:
            return False
        return bool(np.all(self.rays @ c >= -tol)) if len(self.rays) else True

    def face_of_point(self, p: VectorLike, tol: float = 1e-7) -> Optional[Face]:
        """Smallest face containing p, or None if p is outside the cone."""
        arr = _unit(_coords(p))
        values = self.rows @ arr
        if np.any(values < -tol):
            return None
        tight = {int(i) for i in np.flatnonzero(np.abs(values) <= tol)}
        ray_set = tuple(r for r in range(len(self.rays)) if tight <= self.zero_sets[r])
        return next((f for f in self.faces if f.rays == ray_set), None)

    def contains_face_in(self, face: Face, normal: VectorLike, tol: float = 1e-7) -> bool:
        """True iff the face lies in normal^⊥ within the relative incidence tolerance."""
        n = _coords(normal)
        J = lorentz_form(self.size)
        scale = np.linalg.norm(n)
        vectors = list(self.face_rays(face)) + list(self.lineality.T)
        return all(abs(float(v @ J @ n)) <= tol * np.linalg.norm(v) * scale for v in vectors)


def face_lattice(halfspaces: Sequence[HalfSpace], tol: float = SPLIT_TOL, halfspace_cap: int = 256,
                 hyperbolic_tol: float = HYPERBOLIC_TOL, kkt_subset_cap: int = 12,
                 sample_points: int = 1000) -> ConePolyhedron:
    """
    Extreme rays and face lattice of the cone cut out by the half-spaces and p0 >= 0.

    Args:
        halfspaces: Half-spaces {p : p·n >= 0}
        tol: Splitting tolerance for double description on unit vectors
        halfspace_cap: Maximum number of half-spaces accepted
        hyperbolic_tol: Margin for a face to meet the timelike cone
        kkt_subset_cap: Largest ray subset in the stationary-point search
        sample_points: Samples for the fallback minimization

    Returns:
        ConePolyhedron; a cone that is not full-dimensional is flagged degenerate

    Raises:
        HalfspaceCapExceeded: If more than halfspace_cap half-spaces are given
    """
    if len(halfspaces) > halfspace_cap:
        raise HalfspaceCapExceeded(f"{len(halfspaces)} half-spaces exceed the cap of {halfspace_cap}")
    cone = ConePolyhedron(halfspaces, tol, hyperbolic_tol, kkt_subset_cap, sample_points)
    if cone.degenerate:
        logger.info(f"Cone is not full-dimensional (dim {cone.dim} in R^{cone.size})")
    return cone
