"""
Dirichlet tilings of cyclic groups ⟨A⟩ acting on H³.

For an orientation-preserving loxodromic A the tiling is simple at every
base point. For a glide reflection A with invariant plane P the bisectors
Bis(x, Aᵏx) are all orthogonal to P and agree with Bis(x_P, Aᵏx_P), where
x_P is the projection of x to P. The domain is then bounded by the bisectors
of A^±1 and A^±2, and its three edges cross P at points y, z, w equidistant
from the axis L and forming a single cycle under the side pairings.
"""
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import null_space

from app.domain.dirichlet import DirichletDomain, compute_domain
from app.domain.pairings import ridge_cycles
from app.domain.simplicity import simplicity_check
from app.errors import NotConverged, NotLoxodromic
from app.geometry.isometry import (
    Isometry,
    classify,
    invariant_plane_pole,
    make_glide_reflection,
    make_loxodromic,
    validate,
)
from app.geometry.lorentz import VectorLike, check_on_H, lorentz_form, minkowski_dot
from app.groups.group import GeneratedGroup
from app.models.reports import CyclicReport, GlideReport
from app.schema.types import FaceVerdict

logger = logging.getLogger(__name__)

GLIDE_WORDS = {'A', 'A^-1', 'A*A', 'A^-1*A^-1'}


def _random_endpoints(rng: np.random.Generator, n: int, min_separation: float = 0.2) -> Tuple[np.ndarray, np.ndarray]:
    while True:
        u, v = rng.standard_normal((2, n))
        u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
        if np.linalg.norm(u - v) >= min_separation:
            return np.concatenate(([1.0], u)), np.concatenate(([1.0], v))


def random_loxodromic(rng: np.random.Generator, n: int = 3, length_range: Tuple[float, float] = (0.3, 2.0),
                      angle: Optional[float] = None, label: str = 'A') -> Isometry:
    """
    An orientation-preserving loxodromic with a random axis.

    The rotation angle is uniform on [0, π) in H³ unless given; in H² it is 0.
    """
    e_plus, e_minus = _random_endpoints(rng, n)
    length = rng.uniform(*length_range)
    if angle is None:
        angle = rng.uniform(0.0, np.pi) if n == 3 else 0.0
    return make_loxodromic(e_plus, e_minus, length, angle, label=label)


def random_glide_reflection(rng: np.random.Generator, length_range: Tuple[float, float] = (0.3, 2.0),
                            label: str = 'A') -> Isometry:
    """A glide reflection of H³ with a random axis and a random mirror through it."""
    e_plus, e_minus = _random_endpoints(rng, 3)
    J = lorentz_form(4)
    normal_plane = null_space(np.vstack([J @ e_plus, J @ e_minus]))
    pole = normal_plane @ rng.standard_normal(2)
    return make_glide_reflection(e_plus, e_minus, rng.uniform(*length_range), mirror_pole=pole, label=label)


def distance_to_axis(y: VectorLike, e_plus: VectorLike, e_minus: VectorLike) -> float:
    """
    Hyperbolic distance from y on H to the geodesic with null endpoints e_plus, e_minus.

    sinh d is the Lorentz length of the component of y orthogonal to the
    axis plane, computed in a basis of that orthogonal complement.
    """
    arr = np.asarray(y, dtype=float)
    J = lorentz_form(arr.size)
    N = null_space(np.vstack([J @ np.asarray(e_plus, dtype=float), J @ np.asarray(e_minus, dtype=float)]))
    gram = N.T @ J @ N
    c = N.T @ J @ arr
    return float(np.arcsinh(np.sqrt(max(0.0, float(c @ np.linalg.solve(gram, c))))))


def _cyclic_domain(A: Isometry, x: VectorLike, tol: float, len_max: int) -> Tuple[GeneratedGroup, DirichletDomain]:
    G = GeneratedGroup([Isometry(A.matrix, A.residual, 'A')])
    D = compute_domain(G, x, tol=tol, len_max=len_max)
    if not D.converged:
        raise NotConverged(f"Domain of the cyclic group did not stabilise by word length {len_max}", domain=D)
    return G, D


def cyclic_simplicity_experiment(A, x: VectorLike, tol: float = 1e-9, incidence_tol: float = 1e-7,
                                 len_max: int = 12) -> CyclicReport:
    """
    Simplicity verdicts for the Dirichlet tiling of ⟨A⟩ at x.

    Args:
        A: Loxodromic isometry (or matrix)
        x: Base point on H
        tol: Linear tolerance
        incidence_tol: Relative tolerance for faces lying in bisectors
        len_max: Word length budget

    Raises:
        NotLoxodromic: If A is not loxodromic
        NotConverged: If the domain does not stabilise
    """
    A = A if isinstance(A, Isometry) else validate(A, label='A')
    if not classify(A, tol).kind.is_loxodromic:
        raise NotLoxodromic("The cyclic experiment needs a loxodromic generator")
    G, D = _cyclic_domain(A, x, tol, len_max)
    report = simplicity_check(D, G, incidence_tol=incidence_tol, tol=tol)
    by_codim: Dict[int, int] = {}
    for record in report.faces:
        by_codim[record.codim] = by_codim.get(record.codim, 0) + 1
    failures = [r for r in report.faces if r.verdict not in (FaceVerdict.SIMPLE, FaceVerdict.IDEAL)]
    if failures:
        logger.warning(f"Cyclic tiling is not simple at faces {[r.face_index for r in failures]}")
    return CyclicReport(converged=True, simple=report.simple, weakly_simple=report.weakly_simple,
                        facet_count=by_codim.get(1, 0), edge_count=by_codim.get(D.n - 1, 0),
                        vertex_count=by_codim.get(D.n, 0), failures=failures)


def _perpendicularity(A: np.ndarray, x: np.ndarray, p: np.ndarray) -> float:
    """Worst violation of the bisectors of A^±1, A^±2 being orthogonal to P and equal to those at x_P."""
    J = lorentz_form(x.size)
    projected = x - minkowski_dot(x, p) * p
    x_P = projected / np.sqrt(-minkowski_dot(projected, projected))
    worst = 0.0
    for k in (-2, -1, 1, 2):
        M = np.linalg.matrix_power(A, k)
        n = x - M @ x
        n_P = x_P - M @ x_P
        through_pole = abs(float(n @ J @ p)) / (np.linalg.norm(n) * np.linalg.norm(p))
        u, v = n / np.linalg.norm(n), n_P / np.linalg.norm(n_P)
        worst = max(worst, through_pole, min(np.linalg.norm(u - v), np.linalg.norm(u + v)))
    return worst


def _vertex_on_plane(normals: Sequence[np.ndarray], p: np.ndarray) -> Optional[np.ndarray]:
    """The point of P on every listed bisector, if the intersection is a point of H."""
    J = lorentz_form(p.size)
    kernel = null_space(np.vstack([J @ n for n in normals] + [J @ p]))
    if kernel.shape[1] != 1:
        return None
    v = kernel[:, 0]
    norm = minkowski_dot(v, v)
    if norm >= 0:
        return None
    v = v if v[0] > 0 else -v
    return v / np.sqrt(-norm)


def glide_domain_verify(A, x: VectorLike, tol: float = 1e-9, incidence_tol: float = 1e-7,
                        len_max: int = 12) -> GlideReport:
    """
    Verify the structure of the Dirichlet domain of a glide reflection.

    Checks:
        perpendicular: bisectors of A^±1, A^±2 contain the pole of P and equal those at x_P
        four_facets: the contributors are A, A⁻¹, A², A⁻²
        three_vertices: three edges meet H, each crossing P at one point
        equal_axis_distance: those points are equidistant from the axis
        vertex_cycle: the edges form one cycle of length 3

    Args:
        A: Orientation-reversing loxodromic of H³
        x: Base point on H
        tol: Tolerance on the perpendicularity and distance equalities
        incidence_tol: Relative tolerance for faces lying in bisectors
        len_max: Word length budget

    Raises:
        NotLoxodromic: If A is not a glide reflection
        UnsupportedDimension: Unless n = 3
        NotConverged: If the domain does not stabilise
    """
    A = A if isinstance(A, Isometry) else validate(A, label='A')
    info = classify(A, tol)
    pole = invariant_plane_pole(A, tol).coords
    e_plus, e_minus = (e.coords for e in info.axis)
    base = check_on_H(x, name='base point')
    G, D = _cyclic_domain(A, base, tol, len_max)

    perp_error = _perpendicularity(A.matrix, base, pole)
    checks: Dict[str, bool] = {
        'perpendicular': perp_error <= tol,
        'four_facets': set(D.words) == GLIDE_WORDS,
    }

    distances: List[float] = []
    ridges = D.hyperbolic_faces(codim=2)
    for ridge in ridges:
        normals = [D.contributor(w).halfspace.normal.coords for w in D.face_words(ridge)]
        vertex = _vertex_on_plane(normals, pole)
        if vertex is None:
            logger.warning(f"Edge {ridge.index} on {D.face_words(ridge)} does not cross the invariant plane")
            continue
        distances.append(distance_to_axis(vertex, e_plus, e_minus))
    checks['three_vertices'] = len(ridges) == 3 and len(distances) == 3
    checks['equal_axis_distance'] = bool(distances) and max(distances) - min(distances) <= tol

    cycle_lengths = sorted(len(c) for c in ridge_cycles(D))
    checks['vertex_cycle'] = cycle_lengths == [3]
    report = simplicity_check(D, G, incidence_tol=incidence_tol, tol=tol)

    passed = all(checks.values()) and report.simple
    if not passed:
        logger.warning(f"Glide domain checks failed: {[k for k, ok in checks.items() if not ok]}, "
                       f"simple={report.simple}")
    return GlideReport(converged=True, facet_words=sorted(D.words), vertex_count=len(distances),
                       vertex_axis_distances=distances, cycle_lengths=cycle_lengths, perp_max_error=perp_error,
                       checks=checks, simple=report.simple, passed=passed)
