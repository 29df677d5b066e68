"""
Bisectors, Dirichlet half-spaces and the rank maps B_A(x).

For a tuple A = (A1, ..., Ak) and a point x the columns of B_A(x) are the
vectors Ai x - x. The tuple is singular when these columns are dependent at
every x; because every k×k minor is a polynomial in x, a single full-rank
sample certifies non-singularity.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Union

import numpy as np
import sympy
from scipy.linalg import null_space

from app.errors import (
    BasePointFixed,
    CoincidentPoints,
    DimensionMismatch,
    NotFutureTimelike,
    NotIncident,
)
from app.geometry.isometry import Isometry
from app.geometry.lorentz import (
    DEFAULT_TOL,
    LorentzVec,
    VectorLike,
    _coords,
    causal_class,
    check_on_H,
    hyperbolic_distance,
    lorentz_form,
    minkowski_dot,
    random_points_on_H,
)
from app.models.reports import SigmaReport, SingularityReport
from app.schema.types import SigmaCase, SingularityStatus

logger = logging.getLogger(__name__)

RANK_TOL = 1e-8
INCIDENCE_TOL = 1e-7
FIXED_DISTANCE_TOL = 1e-7

MatrixLike = Union[Isometry, np.ndarray, Sequence[Sequence[float]]]


def _matrix(A) -> np.ndarray:
    if isinstance(A, Isometry):
        return A.matrix
    if hasattr(A, 'matrix'):
        return np.asarray(A.matrix, dtype=float)
    return np.asarray(A, dtype=float)


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """The linear hyperplane normal^⊥; it meets H iff the normal is spacelike."""
    normal: LorentzVec

    @property
    def meets_H(self) -> bool:
        return minkowski_dot(self.normal, self.normal) > 0

    def value(self, p: VectorLike) -> float:
        return minkowski_dot(p, self.normal)

    def contains(self, p: VectorLike, tol: float = INCIDENCE_TOL) -> bool:
        arr = _coords(p)
        return abs(self.value(arr)) <= tol * np.linalg.norm(arr) * np.linalg.norm(self.normal.coords)

    def same_as(self, other: 'Hyperplane', tol: float = INCIDENCE_TOL) -> bool:
        a = self.normal.coords / np.linalg.norm(self.normal.coords)
        b = other.normal.coords / np.linalg.norm(other.normal.coords)
        return min(np.linalg.norm(a - b), np.linalg.norm(a + b)) <= tol


@dataclass(frozen=True, eq=False)
class HalfSpace:
    """The closed side {p : p·normal >= 0}, optionally tagged with the word that produced it."""
    normal: LorentzVec
    word: Optional[str] = None

    @property
    def covector(self) -> np.ndarray:
        """Row c with c @ p = p·normal."""
        return lorentz_form(self.normal.coords.size) @ self.normal.coords

    @property
    def boundary(self) -> Hyperplane:
        return Hyperplane(self.normal)

    def value(self, p: VectorLike) -> float:
        return minkowski_dot(p, self.normal)

    def contains(self, p: VectorLike, tol: float = DEFAULT_TOL) -> bool:
        arr = _coords(p)
        return self.value(arr) >= -tol * np.linalg.norm(arr) * np.linalg.norm(self.normal.coords)


def bisector(x: VectorLike, y: VectorLike, tol: float = DEFAULT_TOL) -> Hyperplane:
    """
    Bisector of two points of H, with normal x - y.

    Raises:
        NotOnHyperboloid: If either point is off H
        CoincidentPoints: If x = y within tol
    """
    a = check_on_H(x, tol, 'x')
    b = check_on_H(y, tol, 'y')
    if np.max(np.abs(a - b)) <= tol * max(1.0, np.max(np.abs(a))):
        raise CoincidentPoints("Bisector of coincident points is undefined")
    return Hyperplane(LorentzVec(a - b))


def dirichlet_halfspace(x: VectorLike, gamma: MatrixLike, tol: float = DEFAULT_TOL,
                        word: Optional[str] = None) -> HalfSpace:
    """
    Half-space {p : p·(x - γx) >= 0} of points at least as close to x as to γx.

    Raises:
        BasePointFixed: If γ fixes x within FIXED_DISTANCE_TOL
    """
    base = check_on_H(x, tol, 'base point')
    M = _matrix(gamma)
    image = M @ base
    label = word or getattr(gamma, 'label', None) or getattr(gamma, 'word', None)
    if hyperbolic_distance(base, image / np.sqrt(max(-minkowski_dot(image, image), 1e-300)), tol=1e-6) \
            <= FIXED_DISTANCE_TOL:
        raise BasePointFixed(f"Base point is fixed by {label or 'a group element'}", word=label)
    return HalfSpace(LorentzVec(base - image), word=label)


@dataclass(frozen=True, eq=False)
class BMap:
    """Columns Ai x - x, with the magnitude scale of the products Ai x."""
    columns: np.ndarray
    scale: float

    @property
    def k(self) -> int:
        return self.columns.shape[1]


def b_map(As: Sequence[MatrixLike], x: VectorLike) -> BMap:
    """
    Build B_A(x).

    Raises:
        ValueError: Unless 1 <= k <= n + 1
        DimensionMismatch: If a matrix and x have different sizes
    """
    arr = _coords(x)
    if not 1 <= len(As) <= arr.size:
        raise ValueError(f"Tuple size must be between 1 and {arr.size}, got {len(As)}")
    columns = []
    scale = 0.0
    for A in As:
        M = _matrix(A)
        if M.shape != (arr.size, arr.size):
            raise DimensionMismatch(f"Matrix of shape {M.shape} applied to vector of size {arr.size}")
        image = M @ arr
        scale = max(scale, float(np.linalg.norm(image)), float(np.linalg.norm(arr)))
        columns.append(image - arr)
    return BMap(columns=np.column_stack(columns), scale=scale)


def numeric_rank(B: Union[BMap, np.ndarray], tol: float = RANK_TOL, use_scale: bool = False) -> int:
    """
    Count singular values above tol·sigma_1.

    With use_scale the threshold is tol·max(sigma_1, scale), where scale is
    the largest |Ai x| recorded by b_map. Columns Ai x - x that are all
    round-off near a common fixed point then count as rank 0.
    """
    if isinstance(B, BMap):
        columns, scale = B.columns, B.scale
    else:
        columns = np.asarray(B, dtype=float)
        scale = 0.0
    if columns.size == 0:
        return 0
    s = np.linalg.svd(columns, compute_uv=False)
    threshold = tol * (max(float(s[0]), scale) if use_scale else float(s[0]))
    return int(np.sum(s > threshold))


def to_rational_matrix(M) -> sympy.Matrix:
    """Exact rational copy of a matrix given as sympy, Fraction, int, str or float entries."""
    if isinstance(M, sympy.MatrixBase):
        return sympy.Matrix(M).applyfunc(sympy.nsimplify)
    rows = M.tolist() if isinstance(M, np.ndarray) else M
    converted = []
    for row in rows:
        new_row = []
        for entry in row:
            if isinstance(entry, Fraction):
                new_row.append(sympy.Rational(entry.numerator, entry.denominator))
            elif isinstance(entry, float):
                new_row.append(sympy.nsimplify(entry, rational=True))
            else:
                new_row.append(sympy.Rational(entry))
        converted.append(new_row)
    return sympy.Matrix(converted)


def _exact_singularity(As: Sequence, points: int, entry_bits: int, seed: int) -> SingularityReport:
    mats = [to_rational_matrix(A) for A in As]
    size = mats[0].shape[0]
    k = len(mats)
    rng = np.random.default_rng(seed)
    bound = 2 ** entry_bits
    max_rank = 0
    for _ in range(points):
        x = sympy.Matrix([int(v) for v in rng.integers(-bound, bound + 1, size=size)])
        B = sympy.Matrix.hstack(*[M * x - x for M in mats])
        rank = B.rank()
        max_rank = max(max_rank, rank)
        if rank == k:
            return SingularityReport(
                status=SingularityStatus.NONSINGULAR, mode='exact', trials=points, seed=seed,
                witness=[float(v) for v in x], max_rank_seen=rank, tuple_size=k,
                note='Exact full rank at a rational point certifies non-singularity',
            )
    # Each k×k minor has degree k in x; a nonzero minor vanishes at a uniform
    # point of [-2^b, 2^b]^(n+1) with probability at most k / (2^(b+1) + 1).
    per_point = k / (2 * bound + 1)
    return SingularityReport(
        status=SingularityStatus.SINGULAR_WITH_CONFIDENCE, mode='exact', trials=points, seed=seed,
        max_rank_seen=max_rank, tuple_size=k, failure_probability_bound=per_point ** points,
        note='All k×k minors vanished at every sampled rational point',
    )


def is_singular_tuple(As: Sequence, trials: int = 64, seed: int = 0, tol: float = RANK_TOL,
                      klein_radius: float = 0.95, exact: bool = False, exact_points: int = 8,
                      entry_bits: int = 16) -> SingularityReport:
    """
    Decide whether B_A(x) is rank deficient for every x.

    Numeric mode samples points of H uniformly in a Klein ball and stops at the
    first full-rank sample. Exact mode evaluates B_A at random integer points
    in rational arithmetic; inputs must be rational matrices (any basis, the
    Lorentzian form plays no role in the rank).

    Args:
        As: Tuple of matrices or isometries
        trials: Number of numeric samples
        seed: Seed recorded in the report
        tol: Relative rank tolerance
        klein_radius: Radius of the sampling ball in the Klein chart
        exact: Use rational arithmetic
        exact_points: Number of rational evaluation points
        entry_bits: Integer coordinates are drawn from [-2^bits, 2^bits]

    Returns:
        SingularityReport with a witness for the Nonsingular verdict
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if exact:
        return _exact_singularity(As, exact_points, entry_bits, seed)

    mats = [_matrix(A) for A in As]
    k = len(mats)
    n = mats[0].shape[0] - 1
    rng = np.random.default_rng(seed)
    max_rank = 0
    for x in random_points_on_H(rng, n, trials, klein_radius):
        rank = numeric_rank(b_map(mats, x), tol)
        max_rank = max(max_rank, rank)
        if rank == k:
            return SingularityReport(
                status=SingularityStatus.NONSINGULAR, trials=trials, seed=seed, witness=x.tolist(),
                max_rank_seen=rank, tuple_size=k, note='Full numeric rank at the witness',
            )
    logger.info(f"Tuple of size {k} rank deficient at all {trials} samples (max rank {max_rank})")
    return SingularityReport(
        status=SingularityStatus.SINGULAR_WITH_CONFIDENCE, trials=trials, seed=seed,
        max_rank_seen=max_rank, tuple_size=k,
        note='Rank deficient at every sample; the deficiency locus is algebraic, so a '
             'proper locus is missed by random samples with probability zero',
    )


def _moved(M: np.ndarray, x: np.ndarray, tol: float) -> float:
    return float(np.linalg.norm(M @ x - x)) / max(1.0, float(np.linalg.norm(x)))


def sigma_classify(A1: MatrixLike, A2: MatrixLike, x: VectorLike, tol: float = DEFAULT_TOL,
                   rank_tol: float = RANK_TOL) -> SigmaReport:
    """
    Locate a future causal x relative to the locus where B1 x, B2 x are dependent.

    Cases are tested in order: A1 x = x, A2 x = x, A1 x = A2 x, then a common
    null eigenvector. NotInSigma means rank(B1 x, B2 x) = 2. A deficient rank
    with none of the first three cases is tagged as a common eigenvector and
    marked verified only when x is null and both images are parallel to x.

    Raises:
        NotFutureTimelike: If x is not future causal
    """
    arr = _coords(x)
    if not causal_class(arr, tol).is_future_causal:
        raise NotFutureTimelike(f"sigma_classify needs a future causal vector, got {arr}")
    M1, M2 = _matrix(A1), _matrix(A2)
    B = b_map([M1, M2], arr)
    rank = numeric_rank(B, rank_tol)
    fixed_tol = max(tol, 1e-12) * 10
    if _moved(M1, arr, tol) <= fixed_tol:
        return SigmaReport(case=SigmaCase.FIXED_BY_A1, rank=rank)
    if _moved(M2, arr, tol) <= fixed_tol:
        return SigmaReport(case=SigmaCase.FIXED_BY_A2, rank=rank)
    if float(np.linalg.norm(M1 @ arr - M2 @ arr)) / max(1.0, float(np.linalg.norm(arr))) <= fixed_tol:
        return SigmaReport(case=SigmaCase.FIXED_BY_QUOTIENT, rank=rank)
    if rank == 2:
        return SigmaReport(case=SigmaCase.NOT_IN_SIGMA, rank=rank)
    verified = causal_class(arr, 1e-7).is_null and all(
        numeric_rank(np.column_stack([arr, M @ arr]), rank_tol) == 1 for M in (M1, M2)
    )
    if not verified:
        logger.warning(f"Rank-deficient pair at {arr} is not a certified common null eigenvector")
    return SigmaReport(case=SigmaCase.COMMON_NULL_EIGENVECTOR, rank=rank, verified=verified)


def transversal_at(y: VectorLike, normals: Sequence[VectorLike], tol: float = INCIDENCE_TOL,
                   rank_tol: float = RANK_TOL) -> bool:
    """
    True iff the hyperplanes through y with the given normals meet transversally.

    Raises:
        NotIncident: If y is not on every hyperplane
    """
    arr = _coords(y)
    rows = [_coords(n) for n in normals]
    for i, normal in enumerate(rows):
        if abs(minkowski_dot(arr, normal)) > tol * np.linalg.norm(arr) * np.linalg.norm(normal):
            raise NotIncident(f"Point is not on hyperplane {i} (value {minkowski_dot(arr, normal):.3e})")
    return numeric_rank(np.column_stack(rows), rank_tol) == len(rows)


def q_p_locus(A: MatrixLike, p: VectorLike, tol: float = DEFAULT_TOL) -> Hyperplane:
    """
    Hyperplane of base points x for which p lies on Bis(Ax, x).

    Since p·(Ax - x) = (A^-1 p - p)·x, the normal is A^-1 p - p.

    Raises:
        BasePointFixed: If A fixes p
    """
    point = check_on_H(p, tol, 'p')
    M = _matrix(A)
    J = lorentz_form(M.shape[0])
    pulled = J @ M.T @ J @ point
    if np.max(np.abs(pulled - point)) <= 1e-9 * max(1.0, np.max(np.abs(point))):
        raise BasePointFixed("The isometry fixes p; every base point is on the locus")
    return Hyperplane(LorentzVec(pulled - point))


def bisector_intersection(normals: Sequence[VectorLike]) -> np.ndarray:
    """Orthonormal basis (columns) of the common intersection of the hyperplanes normal^⊥."""
    rows = [_coords(n) for n in normals]
    J = lorentz_form(rows[0].size)
    return null_space(np.vstack([J @ r for r in rows]), rcond=1e-10)


def subspace_meets_hyperbolic(basis: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True iff the span of the columns contains a timelike vector."""
    if basis.size == 0:
        return False
    J = lorentz_form(basis.shape[0])
    gram = basis.T @ J @ basis
    return bool(np.linalg.eigvalsh((gram + gram.T) / 2)[0] < -tol)
