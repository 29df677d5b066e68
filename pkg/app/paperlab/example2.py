"""
The abelian group ⟨A, R⟩: a boost A along L and the rotation R by π around L.

For x off L the Dirichlet domain is bounded by Bis(x, Ax), Bis(x, A⁻¹x)
and Bis(x, Rx). The geodesic Bis(x, Ax) ∩ Bis(x, Rx) lies on the boundary
of the domain and also on Bis(x, RAx), so three bisectors meet along a
codimension-2 face and the tiling is not weakly simple.
"""
import logging
from typing import Dict, List, Optional, Sequence

import numpy as np

from app.domain.dirichlet import compute_domain
from app.domain.simplicity import simplicity_check
from app.errors import DegenerateBasePoint, NotConverged
from app.geometry.bisector import bisector_intersection, subspace_meets_hyperbolic
from app.geometry.isometry import boost
from app.geometry.lorentz import check_on_H, hyperbolic_distance, lorentz_form
from app.groups.diagnostics import class_K_audit
from app.groups.group import GeneratedGroup
from app.models.reports import Example2Report

logger = logging.getLogger(__name__)

ROTATION = np.diag([1.0, 1.0, -1.0, -1.0])
CONTRIBUTOR_WORDS = {'A', 'A^-1', 'R'}


def example2_group(t: float = 1.0) -> GeneratedGroup:
    """⟨A, R⟩ with A the boost of length t along the e0e1 axis."""
    if t <= 0:
        raise ValueError(f"Boost length must be positive, got {t}")
    return GeneratedGroup([('A', boost(t)), ('R', ROTATION)])


def default_base_point() -> np.ndarray:
    """A point off the axis, lifted to H from its spatial part (0, sinh 1/2, 0.1)."""
    spatial = np.array([0.0, np.sinh(0.5), 0.1])
    return np.concatenate(([np.sqrt(1.0 + spatial @ spatial)], spatial))


def _geodesic_frame(basis: np.ndarray):
    """A unit timelike u and a unit spacelike w spanning a Lorentzian 2-plane."""
    J = lorentz_form(basis.shape[0])
    gram = basis.T @ J @ basis
    values, vectors = np.linalg.eigh((gram + gram.T) / 2)
    u = basis @ vectors[:, 0] / np.sqrt(-values[0])
    w = basis @ vectors[:, 1] / np.sqrt(values[1])
    return (u if u[0] > 0 else -u), w


def _on_hyperplane(y: np.ndarray, normal: np.ndarray, tol: float) -> bool:
    value = abs(float(y @ lorentz_form(y.size) @ normal))
    return value <= tol * np.linalg.norm(y) * np.linalg.norm(normal)


def example2_verify(t: float = 1.0, x: Optional[Sequence[float]] = None, tol: float = 1e-9,
                    incidence_tol: float = 1e-7, samples: int = 9, len_max: int = 8) -> Example2Report:
    """
    Verify the boundary geodesic of the ⟨A, R⟩ domain.

    Checks:
        three_bisectors: the contributors are exactly A, A⁻¹ and R
        geodesic: the normals of A, R and RA span a plane whose complement meets H
        on_boundary: sampled points of the geodesic lie in D_x on Bis(x, Ax) and Bis(x, Rx)
        equidistant: each sample is equally far from x, Ax and RAx
        rotation_not_cartan: class K fails with R as a witness

    Args:
        t: Boost length
        x: Base point on H; defaults to default_base_point()
        tol: Tolerance on the distance equalities
        incidence_tol: Relative tolerance for incidence and containment
        samples: Number of geodesic samples
        len_max: Word length budget for the domain

    Raises:
        NotOnHyperboloid: If x is off H
        DegenerateBasePoint: If x lies on the axis, where R fixes it
        NotConverged: If the domain does not stabilise
    """
    G = example2_group(t)
    base = check_on_H(default_base_point() if x is None else x, name='base point')
    if np.hypot(base[2], base[3]) <= 1e-9 * base[0]:
        raise DegenerateBasePoint(f"Base point {base.tolist()} lies on the axis of A; R fixes it")

    D = compute_domain(G, base, len_max=len_max)
    if not D.converged:
        raise NotConverged("Domain of ⟨A, R⟩ did not stabilise", domain=D)

    A, R = G.word_matrix('A'), G.word_matrix('R')
    RA = R @ A
    normals = [base - M @ base for M in (A, R, RA)]
    basis = bisector_intersection(normals)
    checks: Dict[str, bool] = {
        'three_bisectors': set(D.words) == CONTRIBUTOR_WORDS,
        'geodesic': basis.shape[1] == 2 and subspace_meets_hyperbolic(basis),
    }

    points: List[np.ndarray] = []
    if checks['geodesic']:
        u, w = _geodesic_frame(basis)
        points = [np.cosh(s) * u + np.sinh(s) * w for s in np.linspace(-2.0, 2.0, samples)]
    checks['on_boundary'] = bool(points) and all(
        D.contains(y, incidence_tol)
        and _on_hyperplane(y, normals[0], incidence_tol) and _on_hyperplane(y, normals[1], incidence_tol)
        for y in points
    )
    equidistant = True
    for y in points:
        distances = [hyperbolic_distance(y, base), hyperbolic_distance(y, A @ base),
                     hyperbolic_distance(y, RA @ base)]
        equidistant &= max(distances) - min(distances) <= tol * max(1.0, max(distances))
    checks['equidistant'] = bool(points) and equidistant
    audit = class_K_audit(G, max_len=2)
    checks['rotation_not_cartan'] = not audit.passed and 'R' in audit.witnesses

    report = simplicity_check(D, G, incidence_tol=incidence_tol)
    on_geodesic = [r for r in report.faces if r.codim == 2 and {'A', 'R'} <= set(r.words)]
    count = max((r.count for r in on_geodesic), default=None)
    failed = [name for name, ok in checks.items() if not ok]
    if failed:
        logger.warning(f"Example 2 checks failed at t={t}: {failed}")
    logger.info(f"Example 2 at t={t}: {len(on_geodesic)} boundary geodesics, bisector count {count}")
    return Example2Report(t=t, base=base.tolist(), checks=checks, contributor_words=sorted(D.words),
                          geodesic_samples=[y.tolist() for y in points], intersection_count=count,
                          weakly_simple=report.weakly_simple, passed=not failed)
