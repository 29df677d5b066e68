"""
Projective subspaces of RP^n as linear subspaces of R^{n+1}.

Exact subspaces store the reduced row echelon form of a spanning set over
the rationals, which is also their canonical key: two exact subspaces are
equal iff their keys are. Float subspaces store an orthonormal basis and
compare by rank.
"""
import logging
import numbers
from fractions import Fraction
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from scipy.linalg import null_space, orth
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from app.complexes.complex import ComplexFace
from app.complexify.cache import IntersectionCache
from app.errors import DimensionMismatch
from app.geometry.bisector import RANK_TOL, to_rational_matrix
from app.geometry.lorentz import lorentz_form

logger = logging.getLogger(__name__)

ExactRows = Tuple[Tuple[Fraction, ...], ...]

_default_cache = IntersectionCache()


def default_cache() -> IntersectionCache:
    return _default_cache


# -----------------------------------------------------------------------------
# Exact helpers
# -----------------------------------------------------------------------------

def _fraction_rows(M) -> List[List[Fraction]]:
    """Rows of a matrix as Fractions; floats go through sympy's rational reconstruction."""
    if isinstance(M, sympy.MatrixBase) or isinstance(M, np.ndarray) and M.dtype.kind == 'f':
        M = to_rational_matrix(M).tolist()
    rows = []
    for row in M:
        new_row = []
        for entry in row:
            if isinstance(entry, Fraction):
                new_row.append(entry)
            elif isinstance(entry, sympy.Rational):
                new_row.append(Fraction(int(entry.p), int(entry.q)))
            elif isinstance(entry, float):
                r = sympy.nsimplify(entry, rational=True)
                new_row.append(Fraction(int(r.p), int(r.q)))
            else:
                new_row.append(Fraction(entry))
        rows.append(new_row)
    return rows


def _rref(rows: Sequence[Sequence[Fraction]], size: int) -> Tuple[ExactRows, Tuple[int, ...]]:
    """Nonzero rows of the reduced row echelon form, and the pivot columns."""
    if not rows:
        return (), ()
    dm = DomainMatrix([[QQ(v.numerator, v.denominator) for v in row] for row in rows], (len(rows), size), QQ)
    reduced, pivots = dm.rref()
    entries = reduced.to_Matrix().tolist()
    canonical = tuple(tuple(Fraction(int(e.p), int(e.q)) for e in entries[i]) for i in range(len(pivots)))
    return canonical, tuple(pivots)


def _nullspace(rows: ExactRows, pivots: Sequence[int], size: int) -> List[List[Fraction]]:
    """Vectors v with R v = 0 for R in reduced row echelon form."""
    basis = []
    for free in (j for j in range(size) if j not in pivots):
        v = [Fraction(0)] * size
        v[free] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -rows[i][free]
        basis.append(v)
    return basis


def _apply(M: List[List[Fraction]], v: Sequence[Fraction]) -> List[Fraction]:
    return [sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in M]


# -----------------------------------------------------------------------------
# Subspaces
# -----------------------------------------------------------------------------

class ProjectiveSubspace:
    """
    A linear subspace of R^size; its projectivization has dimension dim - 1.

    Build with from_vectors or from_columns rather than the constructor.
    """

    def __init__(self, size: int, exact: bool, rows: ExactRows = (), pivots: Tuple[int, ...] = (),
                 frame: Optional[np.ndarray] = None):
        self.size = size
        self.exact = exact
        self._rows = rows
        self._pivots = pivots
        self._frame = frame if frame is not None else np.zeros((size, 0))

    @classmethod
    def from_vectors(cls, vectors: Sequence[Sequence[Any]], size: Optional[int] = None, exact: bool = True,
                     tol: float = RANK_TOL) -> 'ProjectiveSubspace':
        """Span of the given vectors (rows)."""
        if size is None:
            if not len(vectors):
                raise DimensionMismatch("The ambient size of an empty span must be given")
            size = len(vectors[0])
        if any(len(v) != size for v in vectors):
            raise DimensionMismatch(f"Vectors of different sizes in a span of R^{size}")
        if exact:
            rows, pivots = _rref(_fraction_rows(vectors), size)
            return cls(size, True, rows=rows, pivots=pivots)
        arr = np.asarray(vectors, dtype=float).reshape(-1, size)
        frame = orth(arr.T, rcond=tol) if arr.size else np.zeros((size, 0))
        return cls(size, False, frame=frame)

    @classmethod
    def from_columns(cls, M, exact: bool = True, tol: float = RANK_TOL) -> 'ProjectiveSubspace':
        if isinstance(M, sympy.MatrixBase):
            return cls.from_vectors(M.T.tolist(), size=M.shape[0], exact=exact, tol=tol)
        arr = np.asarray(M)
        return cls.from_vectors(arr.T.tolist() if exact else arr.T, size=arr.shape[0], exact=exact, tol=tol)

    @classmethod
    def zero(cls, size: int, exact: bool = True) -> 'ProjectiveSubspace':
        return cls(size, exact)

    @classmethod
    def whole(cls, size: int, exact: bool = True) -> 'ProjectiveSubspace':
        return cls.from_vectors(np.eye(size, dtype=int).tolist(), size=size, exact=exact)

    # -------------------------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self._rows) if self.exact else self._frame.shape[1]

    @property
    def projective_dim(self) -> int:
        return self.dim - 1

    @property
    def is_zero(self) -> bool:
        return self.dim == 0

    @property
    def basis(self):
        """Columns spanning the subspace: a sympy Matrix when exact, else an orthonormal array."""
        if self.exact:
            if not self._rows:
                return sympy.zeros(self.size, 0)
            return sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row]
                                 for row in self._rows]).T
        return self._frame

    def float_basis(self) -> np.ndarray:
        if self.exact:
            return np.array([[float(v) for v in row] for row in self._rows], dtype=float).reshape(-1, self.size).T
        return self._frame

    @property
    def key(self) -> Tuple:
        """Canonical form; equal exact subspaces have equal keys."""
        if self.exact:
            return ('exact', self.size, self._rows)
        projector = self._frame @ self._frame.T
        return ('float', self.size, tuple(np.round(projector, 8).ravel().tolist()))

    def as_float(self) -> 'ProjectiveSubspace':
        if not self.exact:
            return self
        return ProjectiveSubspace.from_vectors(self.float_basis().T, size=self.size, exact=False)

    def _annihilator_exact(self) -> List[List[Fraction]]:
        return _nullspace(self._rows, self._pivots, self.size)

    def _annihilator_float(self, tol: float = RANK_TOL) -> np.ndarray:
        if self.is_zero:
            return np.eye(self.size)
        return null_space(self._frame.T, rcond=tol).T

    # -------------------------------------------------------------------------

    def contains_vector(self, v: Sequence[Any], tol: float = RANK_TOL) -> bool:
        if len(v) != self.size:
            raise DimensionMismatch(f"Vector of length {len(v)} tested against a subspace of R^{self.size}")
        if self.exact:
            rows, _ = _rref(list(self._rows) + _fraction_rows([list(v)]), self.size)
            return len(rows) == self.dim
        x = np.asarray(v, dtype=float)
        residual = x - self._frame @ (self._frame.T @ x)
        return bool(np.linalg.norm(residual) <= tol * max(1.0, float(np.linalg.norm(x))))

    def contains(self, other: 'ProjectiveSubspace', tol: float = RANK_TOL) -> bool:
        """True iff other ⊂ self."""
        self._check_size(other)
        if self.exact and other.exact:
            rows, _ = _rref(list(self._rows) + list(other._rows), self.size)
            return len(rows) == self.dim
        mine, theirs = self.as_float(), other.as_float()
        return all(mine.contains_vector(c, tol) for c in theirs._frame.T)

    def equals(self, other: 'ProjectiveSubspace', tol: float = RANK_TOL) -> bool:
        self._check_size(other)
        if self.exact and other.exact:
            return self._rows == other._rows
        return self.dim == other.dim and self.contains(other, tol)

    def intersect(self, other: 'ProjectiveSubspace', cache: Optional[IntersectionCache] = None) -> 'ProjectiveSubspace':
        return intersect_subspaces([self, other], cache=cache)

    def image(self, M, tol: float = RANK_TOL) -> 'ProjectiveSubspace':
        """M(V); M None is the identity."""
        if M is None:
            return self
        if self.exact:
            matrix = _fraction_rows(M)
            return ProjectiveSubspace.from_vectors([_apply(matrix, row) for row in self._rows],
                                                   size=self.size, exact=True)
        arr = _float_matrix(M)
        return ProjectiveSubspace.from_vectors((arr @ self._frame).T, size=self.size, exact=False, tol=tol)

    def preimage(self, M, tol: float = RANK_TOL) -> 'ProjectiveSubspace':
        """{y : M y ∈ V}; M None is the identity."""
        if M is None:
            return self
        if self.exact:
            matrix = _fraction_rows(M)
            transposed = [list(col) for col in zip(*matrix)]
            constraints = [_apply(transposed, a) for a in self._annihilator_exact()]
            rows, pivots = _rref(constraints, self.size)
            return ProjectiveSubspace.from_vectors(_nullspace(rows, pivots, self.size) if constraints
                                                   else np.eye(self.size, dtype=int).tolist(),
                                                   size=self.size, exact=True)
        constraints = self._annihilator_float(tol) @ _float_matrix(M)
        frame = null_space(constraints, rcond=tol) if constraints.size else np.eye(self.size)
        return ProjectiveSubspace(self.size, False, frame=frame)

    def to_serializable(self) -> List[List[Any]]:
        """Basis vectors as rows; exact entries as [numerator, denominator] pairs."""
        if self.exact:
            return [[[v.numerator, v.denominator] for v in row] for row in self._rows]
        return self._frame.T.tolist()

    def _check_size(self, other: 'ProjectiveSubspace'):
        if other.size != self.size:
            raise DimensionMismatch(f"Subspaces of R^{self.size} and R^{other.size} cannot be compared")

    def __repr__(self) -> str:
        return f"ProjectiveSubspace(size={self.size}, dim={self.dim}, exact={self.exact})"


def _float_matrix(M) -> np.ndarray:
    if isinstance(M, sympy.MatrixBase):
        return np.array(M.tolist(), dtype=float)
    if isinstance(M, (list, tuple)):
        return np.array([[float(v) for v in row] for row in M], dtype=float)
    return np.asarray(M, dtype=float)


# -----------------------------------------------------------------------------
# Operations
# -----------------------------------------------------------------------------

def intersect_subspaces(subspaces: Sequence[ProjectiveSubspace], cache: Optional[IntersectionCache] = None,
                        tol: float = RANK_TOL) -> ProjectiveSubspace:
    """
    Intersection as the nullspace of the stacked annihilators.

    Exact when every input is exact. Results are memoized in the cache by
    the canonical keys of the inputs.

    Raises:
        ValueError: If the list is empty
        DimensionMismatch: If the ambient sizes differ
    """
    if not subspaces:
        raise ValueError("Cannot intersect an empty list of subspaces")
    size = subspaces[0].size
    if any(s.size != size for s in subspaces):
        raise DimensionMismatch("Subspaces of different ambient sizes")
    exact = all(s.exact for s in subspaces)
    if not exact:
        subspaces = [s.as_float() for s in subspaces]
    if len(subspaces) == 1:
        return subspaces[0]

    cache = cache if cache is not None else _default_cache
    keys = [s.key for s in subspaces]
    cached = cache.get(keys)
    if cached is not None:
        return cached

    if exact:
        constraints = [a for s in subspaces for a in s._annihilator_exact()]
        if constraints:
            rows, pivots = _rref(constraints, size)
            result = ProjectiveSubspace.from_vectors(_nullspace(rows, pivots, size), size=size, exact=True)
        else:
            result = ProjectiveSubspace.whole(size)
    else:
        stacked = np.vstack([s._annihilator_float(tol) for s in subspaces] + [np.zeros((0, size))])
        frame = null_space(stacked, rcond=tol) if stacked.shape[0] else np.eye(size)
        result = ProjectiveSubspace(size, False, frame=frame)
    cache.set(keys, result)
    return result


def lorentz_annihilator(p: Sequence[Any], exact: Optional[bool] = None) -> ProjectiveSubspace:
    """
    p^⊥ = {y : y·p = 0} for the Lorentzian form.

    Exact when p has rational entries, unless exact is given.
    """
    if exact is None:
        exact = all(isinstance(v, (numbers.Rational, sympy.Rational)) for v in p)
    size = len(p)
    if exact:
        (row,) = _fraction_rows([list(p)])
        row[0] = -row[0]
        rows, pivots = _rref([row], size)
        return ProjectiveSubspace.from_vectors(_nullspace(rows, pivots, size), size=size, exact=True)
    covector = lorentz_form(size) @ np.asarray(p, dtype=float)
    return ProjectiveSubspace(size, False, frame=null_space(covector.reshape(1, -1)))


def span_of_face(face: ComplexFace, exact: Optional[bool] = None, tol: float = RANK_TOL) -> ProjectiveSubspace:
    """
    Span(c): the column space of the face's rays and lineality.

    Exact rays give an exact span unless exact=False; float rays give a
    float span.

    Raises:
        ValueError: If the face has no rays
    """
    lineality = [] if face.lineality is None else list(np.asarray(face.lineality))
    if face.exact_rays is not None and exact is not False:
        vectors = face.exact_rays.tolist() + [v.tolist() for v in lineality]
        size = face.exact_rays.shape[1]
        exact = True
    elif face.has_geometry:
        rays = face.rays if face.rays is not None else np.array(face.exact_rays.tolist(), dtype=float)
        vectors = list(np.asarray(rays, dtype=float)) + lineality
        size = np.asarray(rays).shape[1]
        exact = False
    else:
        raise ValueError(f"Face {face.id!r} has no rays to span")
    if not len(vectors):
        raise ValueError(f"Face {face.id!r} has no rays to span")
    return ProjectiveSubspace.from_vectors(vectors, size=size, exact=exact, tol=tol)
