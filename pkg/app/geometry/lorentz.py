"""
Lorentzian linear algebra of R^{n,1}.

The ambient form is diag(-1, 1, ..., 1) with index 0 timelike. H is the
upper sheet {x : x·x = -1, x0 > 0} of the two-sheeted hyperboloid and the
Klein chart sends H to the open unit ball.
"""
import logging
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from app.errors import (
    DimensionMismatch,
    NotFutureTimelike,
    NotOnHyperboloid,
    UnsupportedDimension,
)
from app.schema.types import CausalClass

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LorentzVec:
    """
    A vector of R^{n,1}, n >= 2.

    The coordinates are copied into a read-only float array at construction
    so a LorentzVec can be shared freely.
    """
    coords: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coords, dtype=float).reshape(-1)
        if arr.size < 3:
            raise UnsupportedDimension(f"Lorentz vectors need at least 3 coordinates, got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"Lorentz vector has non-finite entries: {arr}")
        arr.flags.writeable = False
        object.__setattr__(self, 'coords', arr)

    @property
    def n(self) -> int:
        """Dimension of the hyperbolic space this vector lives over."""
        return self.coords.size - 1

    def __len__(self) -> int:
        return self.coords.size

    def __getitem__(self, i):
        return self.coords[i]

    def __array__(self, dtype=None, copy=None):
        return np.array(self.coords, dtype=dtype)

    def __add__(self, other: 'VectorLike') -> 'LorentzVec':
        return LorentzVec(self.coords + _coords(other))

    def __sub__(self, other: 'VectorLike') -> 'LorentzVec':
        return LorentzVec(self.coords - _coords(other))

    def __mul__(self, scalar: float) -> 'LorentzVec':
        return LorentzVec(self.coords * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> 'LorentzVec':
        return LorentzVec(self.coords / float(scalar))

    def __neg__(self) -> 'LorentzVec':
        return LorentzVec(-self.coords)

    def isclose(self, other: 'VectorLike', tol: float = DEFAULT_TOL) -> bool:
        other_arr = _coords(other)
        return other_arr.shape == self.coords.shape and bool(np.max(np.abs(self.coords - other_arr)) <= tol)

    def to_list(self):
        return [float(c) for c in self.coords]

    def __repr__(self) -> str:
        inner = ', '.join(f'{c:.6g}' for c in self.coords)
        return f'LorentzVec({inner})'


VectorLike = Union[LorentzVec, Sequence[float], np.ndarray]


def _coords(v: VectorLike) -> np.ndarray:
    if isinstance(v, LorentzVec):
        return v.coords
    return np.asarray(v, dtype=float).reshape(-1)


def lorentz_form(size: int) -> np.ndarray:
    """Gram matrix J = diag(-1, 1, ..., 1) of size `size`."""
    J = np.eye(size)
    J[0, 0] = -1.0
    return J


def minkowski_dot(u: VectorLike, v: VectorLike) -> float:
    """
    Lorentzian inner product -u0 v0 + sum_{i>=1} ui vi.

    Raises:
        DimensionMismatch: If the vectors have different lengths
    """
    a, b = _coords(u), _coords(v)
    if a.shape != b.shape:
        raise DimensionMismatch(f"Cannot pair vectors of sizes {a.size} and {b.size}")
    return float(a[1:] @ b[1:] - a[0] * b[0])


def lorentz_norm_sq(v: VectorLike) -> float:
    return minkowski_dot(v, v)


def causal_class(v: VectorLike, tol: float = DEFAULT_TOL) -> CausalClass:
    """
    Classify a vector by the sign of v·v and of v0.

    A vector with Euclidean norm at most tol is Zero. Otherwise v is null when
    |v·v| <= tol·|v|^2, and timelike or spacelike by the sign of v·v.
    """
    arr = _coords(v)
    scale = float(arr @ arr)
    if np.sqrt(scale) <= tol:
        return CausalClass.ZERO
    q = minkowski_dot(arr, arr)
    if abs(q) <= tol * scale:
        return CausalClass.NULL_FUTURE if arr[0] > 0 else CausalClass.NULL_PAST
    if q > 0:
        return CausalClass.SPACELIKE
    return CausalClass.TIMELIKE_FUTURE if arr[0] > 0 else CausalClass.TIMELIKE_PAST


def normalize_to_H(v: VectorLike, tol: float = DEFAULT_TOL) -> LorentzVec:
    """
    Scale a future timelike vector onto H.

    Raises:
        NotFutureTimelike: If v is not future timelike
    """
    arr = _coords(v)
    if causal_class(arr, tol) is not CausalClass.TIMELIKE_FUTURE:
        raise NotFutureTimelike(f"Cannot normalize {arr} onto H: not future timelike")
    return LorentzVec(arr / np.sqrt(-minkowski_dot(arr, arr)))


def is_on_H(x: VectorLike, tol: float = DEFAULT_TOL) -> bool:
    """True if |x·x + 1| <= tol·max(1, x0^2) and x0 > 0."""
    arr = _coords(x)
    if arr[0] <= 0:
        return False
    return abs(minkowski_dot(arr, arr) + 1.0) <= tol * max(1.0, arr[0] ** 2)


def check_on_H(x: VectorLike, tol: float = DEFAULT_TOL, name: str = 'point') -> np.ndarray:
    """Return the coordinates of x, raising NotOnHyperboloid when x is off H."""
    arr = _coords(x)
    if not is_on_H(arr, tol):
        raise NotOnHyperboloid(
            f"{name} {arr} is not on H (x·x = {minkowski_dot(arr, arr):.3e})"
        )
    return arr


def hyperbolic_distance(x: VectorLike, y: VectorLike, tol: float = DEFAULT_TOL) -> float:
    """
    Hyperbolic distance between two points of H.

    Uses (x - y)·(x - y) = 4 sinh^2(d/2), which stays accurate at small
    distances where acosh(-x·y) loses digits.

    Raises:
        NotOnHyperboloid: If either point is off H
        DimensionMismatch: If the points live in different dimensions
    """
    a = check_on_H(x, tol, 'x')
    b = check_on_H(y, tol, 'y')
    if a.shape != b.shape:
        raise DimensionMismatch(f"Points of sizes {a.size} and {b.size}")
    q = minkowski_dot(a - b, a - b)
    return float(2.0 * np.arcsinh(np.sqrt(max(q, 0.0)) / 2.0))


def klein_project(v: VectorLike, tol: float = DEFAULT_TOL) -> np.ndarray:
    """
    Affine Klein chart (v1/v0, ..., vn/v0).

    Raises:
        NotFutureTimelike: If v0 <= tol
    """
    arr = _coords(v)
    if arr[0] <= tol:
        raise NotFutureTimelike(f"Klein projection needs v0 > {tol}, got {arr[0]}")
    return arr[1:] / arr[0]


def point_from_klein(k: Sequence[float]) -> LorentzVec:
    """Lift a point of the open unit ball to H."""
    k = np.asarray(k, dtype=float).reshape(-1)
    r2 = float(k @ k)
    if r2 >= 1.0:
        raise NotOnHyperboloid(f"Klein point {k} is not inside the unit ball")
    return LorentzVec(np.concatenate(([1.0], k)) / np.sqrt(1.0 - r2))


def null_basis_change(n: int = 3) -> Tuple[np.ndarray, np.ndarray]:
    """
    Basis change between standard coordinates and the null basis of R^{3,1}.

    The null basis is e1 = (e0 + e1std)/sqrt 2, e2 = (e0 - e1std)/sqrt 2,
    e3, e4 unchanged, so e1·e2 = -1. Columns of P are the null basis vectors
    in standard coordinates; P is its own inverse.

    Returns:
        (P, P_inv) with standard = P @ null

    Raises:
        UnsupportedDimension: If n != 3
    """
    if n != 3:
        raise UnsupportedDimension(f"The null basis change is defined for n = 3, got n = {n}")
    s = 1.0 / np.sqrt(2.0)
    P = np.array([
        [s, s, 0.0, 0.0],
        [s, -s, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])
    return P, P.copy()


def random_points_on_H(rng: np.random.Generator, n: int, count: int,
                       klein_radius: float = 0.95) -> np.ndarray:
    """
    Sample points of H uniformly from a Euclidean ball in the Klein chart.

    Args:
        rng: Seeded numpy generator
        n: Hyperbolic dimension
        count: Number of samples
        klein_radius: Radius of the Klein ball, strictly below 1

    Returns:
        Array of shape (count, n + 1), one point per row
    """
    directions = rng.standard_normal((count, n))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = klein_radius * rng.random(count) ** (1.0 / n)
    k = directions * radii[:, None]
    scale = 1.0 / np.sqrt(1.0 - np.sum(k * k, axis=1))
    return np.hstack([scale[:, None], k * scale[:, None]])


def affine_combination_holds(u: VectorLike, v: VectorLike, w: VectorLike,
                             s: float, t: float, tol: float = DEFAULT_TOL) -> bool:
    """
    Decide whether s·u + t·v = (s + t)·w for points u, v, w of H.

    With st != 0 and s + t != 0 this only happens when u = v = w.
    """
    a, b, c = _coords(u), _coords(v), _coords(w)
    residual = s * a + t * b - (s + t) * c
    scale = max(1.0, abs(s) * np.abs(a).max(), abs(t) * np.abs(b).max())
    return bool(np.max(np.abs(residual)) <= tol * scale)
