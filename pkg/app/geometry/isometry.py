"""
Validated elements of O(n,1)↑ and their classification.

Classification follows the spectrum: an isometry is loxodromic when it has
an eigenvalue off the unit circle, elliptic when its +1-eigenspace contains
a timelike vector, and parabolic when the only fixed directions are null.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import null_space

from app.errors import (
    DegenerateAxis,
    DimensionMismatch,
    NotFuturePreserving,
    NotLorentz,
    NotLoxodromic,
    UnclassifiableWithinTolerance,
    UnsupportedDimension,
)
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
    normalize_to_H,
)
from app.schema.types import CausalClass, IsometryKind

logger = logging.getLogger(__name__)

# Singular values of M - I below FIXED_RTOL·max(1, |M|) count as fixed directions.
FIXED_RTOL = 1e-7
# Spectral radius band: log rho must exceed this to call an isometry loxodromic.
LOXODROMIC_BAND = 1e-4


def relative_residual(matrix: np.ndarray) -> float:
    """max|MᵀJM - J| scaled by max(1, |M|max^2)."""
    J = lorentz_form(matrix.shape[0])
    defect = np.max(np.abs(matrix.T @ J @ matrix - J))
    return float(defect / max(1.0, np.max(np.abs(matrix)) ** 2))


@dataclass(frozen=True, eq=False)
class Isometry:
    """An element of O(n,1)↑ with its Lorentz-orthogonality defect."""
    matrix: np.ndarray
    residual: float = 0.0
    label: Optional[str] = None

    def __post_init__(self):
        arr = np.array(self.matrix, dtype=float)
        arr.flags.writeable = False
        object.__setattr__(self, 'matrix', arr)

    @classmethod
    def unchecked(cls, matrix: np.ndarray, label: Optional[str] = None) -> 'Isometry':
        """Wrap a product of validated isometries without re-validating."""
        return cls(matrix=matrix, residual=relative_residual(np.asarray(matrix, dtype=float)), label=label)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.matrix.shape[0] - 1

    def inverse(self) -> 'Isometry':
        """Exact inverse J Mᵀ J."""
        J = lorentz_form(self.size)
        label = None if self.label is None else _invert_label(self.label)
        return Isometry(matrix=J @ self.matrix.T @ J, residual=self.residual, label=label)

    def __matmul__(self, other: 'Isometry') -> 'Isometry':
        if self.size != other.size:
            raise DimensionMismatch(f"Cannot compose isometries of sizes {self.size} and {other.size}")
        label = None
        if self.label is not None and other.label is not None:
            label = f'{self.label}*{other.label}'
        return Isometry.unchecked(self.matrix @ other.matrix, label)

    def power(self, k: int) -> 'Isometry':
        base = self.matrix if k >= 0 else self.inverse().matrix
        return Isometry.unchecked(np.linalg.matrix_power(base, abs(k)),
                                  None if self.label is None else f'{self.label}^{k}')

    def apply(self, v: VectorLike) -> LorentzVec:
        arr = _coords(v)
        if arr.size != self.size:
            raise DimensionMismatch(f"Isometry of size {self.size} applied to vector of size {arr.size}")
        return LorentzVec(self.matrix @ arr)

    def to_dict(self):
        return {'label': self.label, 'matrix': self.matrix.tolist()}


def _invert_label(label: str) -> str:
    parts = label.split('*')
    inverted = []
    for part in reversed(parts):
        inverted.append(part[:-3] if part.endswith('^-1') else f'{part}^-1')
    return '*'.join(inverted)


@dataclass(frozen=True)
class IsometryClass:
    """Classification record of an isometry."""
    kind: IsometryKind
    orientation_preserving: bool
    axis: Optional[Tuple[LorentzVec, LorentzVec]] = None
    eigenvalue: Optional[float] = None
    translation_length: Optional[float] = None
    rotation_angle: Optional[float] = None
    reflection: bool = False
    fixed_point: Optional[LorentzVec] = None


@dataclass(frozen=True)
class AxisData:
    e_plus: LorentzVec
    e_minus: LorentzVec
    eigenvalue: float
    translation_length: float
    axis_point: LorentzVec
    verified: bool


def validate(M, tol: float = DEFAULT_TOL, label: Optional[str] = None) -> Isometry:
    """
    Validate a matrix as an element of O(n,1)↑.

    Args:
        M: Square matrix of size n + 1 with n >= 2
        tol: Bound on the relative residual |MᵀJM - J|max / max(1, |M|max^2)
        label: Optional word or name

    Returns:
        Isometry carrying the measured residual

    Raises:
        DimensionMismatch: If M is not square of size >= 3
        NotLorentz: If the residual exceeds tol
        NotFuturePreserving: If M swaps the future and past cones
    """
    arr = np.asarray(M, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 3:
        raise DimensionMismatch(f"Expected a square matrix of size >= 3, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NotLorentz(f"Matrix {label or ''} has non-finite entries", residual=float('inf'))
    residual = relative_residual(arr)
    if residual > tol:
        raise NotLorentz(f"Matrix {label or ''} is not Lorentz: residual {residual:.3e} > {tol:.1e}",
                         residual=residual)
    if arr[0, 0] <= 0:
        raise NotFuturePreserving(f"Matrix {label or ''} maps the future cone to the past cone")
    return Isometry(matrix=arr, residual=residual, label=label)


def fixed_subspace(M: np.ndarray, rtol: float = FIXED_RTOL) -> np.ndarray:
    """Orthonormal basis (columns) of the +1-eigenspace of M."""
    arr = np.asarray(M, dtype=float)
    _, s, vt = np.linalg.svd(arr - np.eye(arr.shape[0]))
    threshold = rtol * max(1.0, np.max(np.abs(arr)))
    return vt[s <= threshold].T


def _perp_frame(e_plus: np.ndarray, e_minus: np.ndarray) -> np.ndarray:
    """J-orthonormal basis (columns) of the Lorentz complement of span(e_plus, e_minus)."""
    J = lorentz_form(e_plus.size)
    N = null_space(np.vstack([J @ e_plus, J @ e_minus]))
    G = N.T @ J @ N
    w, V = np.linalg.eigh((G + G.T) / 2)
    return N @ V @ np.diag(1.0 / np.sqrt(w)) @ V.T


def _is_identity(M: np.ndarray, tol: float) -> bool:
    return float(np.max(np.abs(M - np.eye(M.shape[0])))) <= tol * max(1.0, np.max(np.abs(M)))


def classify(A: Isometry, tol: float = DEFAULT_TOL) -> IsometryClass:
    """
    Classify an isometry.

    Loxodromic elements are recognised by log of the spectral radius above
    max(1e-4, 100·tol); the restriction to the normal bundle of the axis
    then separates hyperbolic from strictly loxodromic elements. Elliptic
    and parabolic elements are read off the +1-eigenspace.

    Raises:
        UnclassifiableWithinTolerance: If the spectrum sits in the tolerance band
            and no fixed direction can be certified
    """
    M = A.matrix
    orientation = bool(np.linalg.det(M) > 0)
    if _is_identity(M, max(tol, 1e-12)):
        return IsometryClass(kind=IsometryKind.IDENTITY, orientation_preserving=True)

    w, V = np.linalg.eig(M)
    moduli = np.abs(w)
    log_rho = float(np.log(np.max(moduli)))
    band = max(LOXODROMIC_BAND, 100.0 * tol)

    if log_rho > band:
        return _classify_loxodromic(M, w, V, orientation, tol)

    F = fixed_subspace(M)
    if F.shape[1] > 0:
        J = lorentz_form(M.shape[0])
        gram = F.T @ J @ F
        evals, evecs = np.linalg.eigh((gram + gram.T) / 2)
        if evals[0] < -1e-10:
            squared = M @ M
            cartan = F.shape[1] == 1 and _is_identity(squared, max(tol, 1e-10) * 10)
            fixed = F @ evecs[:, 0]
            if fixed[0] < 0:
                fixed = -fixed
            return IsometryClass(
                kind=IsometryKind.ELLIPTIC_CARTAN if cartan else IsometryKind.ELLIPTIC_OTHER,
                orientation_preserving=orientation,
                fixed_point=normalize_to_H(fixed) if cartan else None,
            )
        if evals[0] <= 1e-10:
            return IsometryClass(kind=IsometryKind.PARABOLIC, orientation_preserving=orientation)

    raise UnclassifiableWithinTolerance(
        f"Isometry {A.label or ''} has spectral radius exp({log_rho:.2e}) inside the band "
        f"{band:.1e} and no certified fixed direction"
    )


def _classify_loxodromic(M: np.ndarray, w: np.ndarray, V: np.ndarray,
                         orientation: bool, tol: float) -> IsometryClass:
    moduli = np.abs(w)
    i_plus, i_minus = int(np.argmax(moduli)), int(np.argmin(moduli))
    e_plus = np.real(V[:, i_plus])
    e_minus = np.real(V[:, i_minus])
    e_plus, e_minus = e_plus / e_plus[0], e_minus / e_minus[0]
    eigenvalue = float(np.real(w[i_plus]))

    U = _perp_frame(e_plus, e_minus)
    J = lorentz_form(M.shape[0])
    R = U.T @ J @ M @ U
    reflection = bool(np.linalg.det(R) < 0)
    angles = np.abs(np.angle(np.linalg.eigvals(R)))
    angle = float(np.max(angles)) if angles.size else 0.0
    angle_tol = max(1e-7, 100.0 * tol)
    hyperbolic = not reflection and float(np.max(np.abs(R - np.eye(R.shape[0])))) <= angle_tol

    return IsometryClass(
        kind=IsometryKind.HYPERBOLIC if hyperbolic else IsometryKind.STRICTLY_LOXODROMIC,
        orientation_preserving=orientation,
        axis=(LorentzVec(e_plus), LorentzVec(e_minus)),
        eigenvalue=eigenvalue,
        translation_length=float(np.log(eigenvalue)),
        rotation_angle=0.0 if hyperbolic else angle,
        reflection=reflection,
    )


def is_cartan_involution(A: Isometry, tol: float = DEFAULT_TOL) -> bool:
    """True iff A² = I and the +1-eigenspace is a single timelike line."""
    M = A.matrix
    if _is_identity(M, max(tol, 1e-12)):
        return False
    if not _is_identity(M @ M, max(tol, 1e-10) * 10):
        return False
    F = fixed_subspace(M)
    if F.shape[1] != 1:
        return False
    return causal_class(F[:, 0], tol).is_timelike


def axis_and_dynamics(A: Isometry, tol: float = DEFAULT_TOL) -> AxisData:
    """
    Null eigenvectors and translation length of a loxodromic isometry.

    e_plus carries the eigenvalue lambda > 1, both endpoints are scaled to
    0-coordinate 1, and the translation length log(lambda) is checked against
    d(p, Ap) at the axis point p = normalize(e_plus + e_minus).

    Raises:
        NotLoxodromic: If A is not loxodromic
    """
    info = classify(A, tol)
    if not info.kind.is_loxodromic:
        raise NotLoxodromic(f"Isometry {A.label or ''} is {info.kind.value}, not loxodromic")
    e_plus, e_minus = info.axis
    p = normalize_to_H(e_plus.coords + e_minus.coords)
    displacement = hyperbolic_distance(p, A.matrix @ p.coords, tol=1e-6)
    verified = abs(displacement - info.translation_length) <= 1e-6 * max(1.0, info.translation_length)
    if not verified:
        logger.warning(f"Axis displacement {displacement} differs from log eigenvalue "
                       f"{info.translation_length} for {A.label or 'isometry'}")
    return AxisData(e_plus=e_plus, e_minus=e_minus, eigenvalue=info.eigenvalue,
                    translation_length=info.translation_length, axis_point=p, verified=verified)


def make_cartan(p: VectorLike, tol: float = DEFAULT_TOL, label: Optional[str] = None) -> Isometry:
    """
    Cartan involution with fixed point p: v -> -v - 2(v·p)p.

    Raises:
        NotOnHyperboloid: If p is off H
    """
    arr = check_on_H(p, tol, 'fixed point')
    size = arr.size
    M = -np.eye(size) - 2.0 * np.outer(arr, lorentz_form(size) @ arr)
    return validate(M, tol=max(tol, 1e-8), label=label)


def make_hyperbolic_from_cartans(p: VectorLike, q: VectorLike, tol: float = DEFAULT_TOL,
                                 label: Optional[str] = None) -> Isometry:
    """Composition J_q J_p: translation by 2·d(p, q) along the geodesic through p and q."""
    product = make_cartan(q, tol).matrix @ make_cartan(p, tol).matrix
    return validate(product, tol=max(tol, 1e-8), label=label)


def _axis_frame(e_plus: VectorLike, e_minus: VectorLike, tol: float) -> np.ndarray:
    """Columns f0, ..., fn with f0 ± f1 along e_plus, e_minus and FᵀJF = J."""
    ep, em = _coords(e_plus), _coords(e_minus)
    if ep.shape != em.shape:
        raise DimensionMismatch(f"Axis endpoints of sizes {ep.size} and {em.size}")
    for name, e in (('e_plus', ep), ('e_minus', em)):
        if not causal_class(e, 1e-7).is_null:
            raise DegenerateAxis(f"{name} = {e} is not a null vector")
    ep = ep if ep[0] > 0 else -ep
    em = em if em[0] > 0 else -em
    pairing = minkowski_dot(ep, em)
    if pairing >= -tol * np.linalg.norm(ep) * np.linalg.norm(em):
        raise DegenerateAxis("Axis endpoints are proportional")
    a = ep / np.sqrt(-2.0 * pairing)
    b = em / np.sqrt(-2.0 * pairing)
    frame = [a + b, a - b]
    size = ep.size
    for i in range(size):
        v = np.zeros(size)
        v[i] = 1.0
        for f in frame:
            v = v - minkowski_dot(v, f) / minkowski_dot(f, f) * f
        norm = minkowski_dot(v, v)
        if norm > 1e-6:
            frame.append(v / np.sqrt(norm))
        if len(frame) == size:
            break
    return np.column_stack(frame)


def make_loxodromic(e_plus: VectorLike, e_minus: VectorLike, length: float, angle: float = 0.0,
                    orientation_reversing: bool = False, tol: float = DEFAULT_TOL,
                    label: Optional[str] = None) -> Isometry:
    """
    Loxodromic isometry with attracting endpoint e_plus.

    Translates by `length` along the axis, rotates the first normal plane by
    `angle` and, when orientation_reversing, reflects the last normal
    direction. In H^2 only angle 0 is meaningful; angle pi there is read as
    the reflection.

    Raises:
        DegenerateAxis: If the endpoints are not null or are proportional
        ValueError: If length <= 0 or the angle is unsupported in H^2
    """
    if length <= 0:
        raise ValueError(f"Translation length must be positive, got {length}")
    F = _axis_frame(e_plus, e_minus, tol)
    size = F.shape[0]
    C = np.eye(size)
    C[:2, :2] = [[np.cosh(length), np.sinh(length)], [np.sinh(length), np.cosh(length)]]
    if size == 3:
        if np.isclose(angle, np.pi):
            orientation_reversing = True
        elif not np.isclose(angle, 0.0):
            raise ValueError(f"Rotation angle {angle} is not available in H^2")
    elif not np.isclose(angle, 0.0):
        c, s = np.cos(angle), np.sin(angle)
        C[2:4, 2:4] = [[c, -s], [s, c]]
    if orientation_reversing:
        C[-1, :] = -C[-1, :]
    J = lorentz_form(size)
    F_inv = J @ F.T @ J
    return validate(F @ C @ F_inv, tol=max(tol, 1e-8), label=label)


def make_glide_reflection(e_plus: VectorLike, e_minus: VectorLike, length: float,
                          mirror_pole: Optional[VectorLike] = None, tol: float = DEFAULT_TOL,
                          label: Optional[str] = None) -> Isometry:
    """
    Translation along the axis composed with the reflection in a mirror containing it.

    Args:
        e_plus, e_minus: Null endpoints of the axis
        length: Translation length
        mirror_pole: Spacelike pole m of the mirror m^⊥; must be J-orthogonal to
            the axis. Defaults to the last vector of the axis frame.

    Raises:
        DegenerateAxis: If the mirror does not contain the axis
    """
    boost = make_loxodromic(e_plus, e_minus, length, 0.0, tol=tol)
    F = _axis_frame(e_plus, e_minus, tol)
    m = F[:, -1] if mirror_pole is None else _coords(mirror_pole)
    mm = minkowski_dot(m, m)
    if mm <= tol:
        raise DegenerateAxis("Mirror pole must be spacelike")
    for e in (F[:, 0] + F[:, 1], F[:, 0] - F[:, 1]):
        if abs(minkowski_dot(m, e)) > 1e-7 * np.linalg.norm(m) * np.linalg.norm(e):
            raise DegenerateAxis("Mirror does not contain the axis")
    size = m.size
    reflection = np.eye(size) - 2.0 * np.outer(m, lorentz_form(size) @ m) / mm
    return validate(boost.matrix @ reflection, tol=max(tol, 1e-8), label=label)


def invariant_plane_pole(A: Isometry, tol: float = DEFAULT_TOL) -> LorentzVec:
    """
    Pole p of the invariant plane of an orientation-reversing loxodromic of H^3.

    A fixes p and reverses orientation on the plane p^⊥, which contains the axis.

    Raises:
        NotLoxodromic: If A is not an orientation-reversing loxodromic
        UnsupportedDimension: Unless n = 3
    """
    if A.n != 3:
        raise UnsupportedDimension(f"Invariant plane poles are defined in H^3, got n = {A.n}")
    info = classify(A, tol)
    if not info.kind.is_loxodromic or not info.reflection:
        raise NotLoxodromic(f"Isometry {A.label or ''} is not an orientation-reversing loxodromic")
    e_plus, e_minus = info.axis
    U = _perp_frame(e_plus.coords, e_minus.coords)
    J = lorentz_form(A.size)
    R = U.T @ J @ A.matrix @ U
    w, V = np.linalg.eig(R)
    idx = int(np.argmin(np.abs(w - 1.0)))
    p = U @ np.real(V[:, idx])
    return LorentzVec(p / np.sqrt(minkowski_dot(p, p)))


def boost(t: float, size: int = 4, plane: Sequence[int] = (0, 1)) -> np.ndarray:
    """Boost matrix B(t) in the (e0, e_plane[1]) plane."""
    M = np.eye(size)
    i, j = plane
    M[i, i] = M[j, j] = np.cosh(t)
    M[i, j] = M[j, i] = np.sinh(t)
    return M


def rotation(theta: float, size: int = 4, plane: Sequence[int] = (2, 3)) -> np.ndarray:
    """Rotation by theta in a spacelike coordinate plane."""
    M = np.eye(size)
    i, j = plane
    c, s = np.cos(theta), np.sin(theta)
    M[i, i] = M[j, j] = c
    M[i, j], M[j, i] = -s, s
    return M
