"""
The singular triple (A⁻¹, A², A³) of a strictly loxodromic A with rotation angle π.

In the null basis A = diag(λ, 1/λ, -1, -1). The triple is rank deficient at
every point because A² = A⁻¹·A³, so the three bisectors through x always
share a codimension-2 subspace. That subspace is a hyperbolic geodesic
exactly where the Gram determinant of the first two columns of B(x) is
positive, the open set U_λ sampled by example1_scan.
"""
import logging
import time
import uuid
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator

from app.errors import NotFutureTimelike, NotIncident
from app.geometry.bisector import (
    b_map,
    bisector_intersection,
    numeric_rank,
    subspace_meets_hyperbolic,
    transversal_at,
)
from app.geometry.isometry import Isometry, validate
from app.geometry.lorentz import lorentz_form, null_basis_change, random_points_on_H
from app.models.reports import ScanReport, ScanWitness
from app.utils.tracer import ScanTracer

logger = logging.getLogger(__name__)

SLICES = ('plane', 'general')


class Example1Config(BaseModel):
    """Inputs of the Example 1 scan"""
    lam: float = Field(default=2.0, gt=1.0, description='Eigenvalue of A on its attracting null direction')
    basis: Literal['null', 'standard'] = 'null'
    budget: int = Field(default=10_000, ge=1, description='Samples per slice')
    seed: int = 0

    @field_validator('lam')
    def validate_lam(cls, v):
        if not np.isfinite(v):
            raise ValueError(f'lambda must be finite, got {v}')
        return v


def _check_lambda(lam: float) -> None:
    if not lam > 1.0:
        raise ValueError(f"lambda must be > 1, got {lam}")


def example1_matrices(lam: float) -> Tuple[Isometry, Isometry, Isometry, Isometry]:
    """
    A, A⁻¹, A² and A³ in standard coordinates.

    Raises:
        ValueError: If lam <= 1
    """
    _check_lambda(lam)
    P, P_inv = null_basis_change(3)
    powers = []
    for k, label in ((1, 'A'), (-1, 'A^-1'), (2, 'A^2'), (3, 'A^3')):
        diagonal = np.diag([lam ** k, lam ** -k, (-1.0) ** k, (-1.0) ** k])
        powers.append(validate(P @ diagonal @ P_inv, label=label))
    return tuple(powers)


def example1_mu_nu(lam: float) -> Tuple[float, float]:
    """(μ, ν) = (λ-1)(λ²-1)·(1 ± λ⁻³)."""
    _check_lambda(lam)
    common = (lam - 1.0) * (lam ** 2 - 1.0)
    return common * (1.0 + lam ** -3), common * (1.0 - lam ** -3)


def _null_point(x: Sequence[float]) -> np.ndarray:
    """Check that x, in null coordinates, lies in the future timelike cone."""
    arr = np.asarray(x, dtype=float).reshape(-1)
    if arr.size != 4:
        raise ValueError(f"Null-coordinate points have 4 entries, got {arr.size}")
    norm = -2.0 * arr[0] * arr[1] + arr[2] ** 2 + arr[3] ** 2
    if norm >= 0 or arr[0] + arr[1] <= 0:
        raise NotFutureTimelike(f"Point {arr.tolist()} is not future timelike (norm {norm:.3e})")
    return arr


def example1_b_matrix_null(lam: float, x: Sequence[float]) -> np.ndarray:
    """
    B(x) in null coordinates, columns A⁻¹x - x, A²x - x, A³x - x.

    The two bottom rows are x3·[-2, 0, -2] and x4·[-2, 0, -2].
    """
    _check_lambda(lam)
    x1, x2, x3, x4 = _null_point(x)
    return np.array([
        [(1.0 / lam - 1.0) * x1, (lam ** 2 - 1.0) * x1, (lam ** 3 - 1.0) * x1],
        [(lam - 1.0) * x2, (lam ** -2 - 1.0) * x2, (lam ** -3 - 1.0) * x2],
        [-2.0 * x3, 0.0, -2.0 * x3],
        [-2.0 * x4, 0.0, -2.0 * x4],
    ])


def _det_gram_closed(lam: float, X: np.ndarray) -> np.ndarray:
    """Closed form on rows of null coordinates; x3² is read as x3² + x4²."""
    _, nu = example1_mu_nu(lam)
    x12 = X[:, 0] * X[:, 1]
    s = X[:, 2] ** 2 + X[:, 3] ** 2
    return -nu ** 2 * x12 ** 2 + 8.0 * (lam ** 2 - 1.0) ** 2 * lam ** -2 * x12 * s


def example1_det_gram(lam: float, x: Sequence[float]) -> float:
    """
    det Gr(x) = -ν²x1²x2² + 8(λ²-1)²λ⁻²x1x2(x3² + x4²) for the columns A⁻¹x - x and A²x - x.

    Args:
        lam: λ > 1
        x: Future timelike vector in null coordinates

    Raises:
        ValueError: If lam <= 1
        NotFutureTimelike: If x is not future timelike
    """
    _check_lambda(lam)
    arr = _null_point(x)
    return float(_det_gram_closed(lam, arr.reshape(1, -1))[0])


def example1_det_gram_oracle(lam: float, x: Sequence[float]) -> float:
    """The same determinant from the Gram matrix of the two columns, computed in standard coordinates."""
    arr = _null_point(x)
    P, _ = null_basis_change(3)
    _, A_inv, A2, _ = example1_matrices(lam)
    x_std = P @ arr
    columns = np.column_stack([A_inv.matrix @ x_std - x_std, A2.matrix @ x_std - x_std])
    gram = columns.T @ lorentz_form(4) @ columns
    return float(np.linalg.det(gram))


def certify_hit(lam: float, x_std: np.ndarray, tol: float = 1e-8) -> dict:
    """
    Check that the three bisectors through x share a geodesic.

    Returns:
        Certificate with the rank of B(x), the dimension of the common
        intersection, whether it meets H, a point on it and whether the
        bisectors are transversal there
    """
    _, A_inv, A2, A3 = example1_matrices(lam)
    mats = [A_inv.matrix, A2.matrix, A3.matrix]
    rank = numeric_rank(b_map(mats, x_std), tol)
    normals = [x_std - M @ x_std for M in mats]
    basis = bisector_intersection(normals)
    meets = subspace_meets_hyperbolic(basis)
    certificate = {'rank': rank, 'intersection_dim': int(basis.shape[1]), 'meets_hyperbolic': meets}
    if meets:
        J = lorentz_form(4)
        gram = basis.T @ J @ basis
        w, V = np.linalg.eigh((gram + gram.T) / 2)
        y = basis @ V[:, 0]
        y = (y if y[0] > 0 else -y) / np.sqrt(-w[0])
        certificate['point'] = y.tolist()
        try:
            certificate['transversal'] = transversal_at(y, normals)
        except NotIncident as e:
            logger.warning(f"Intersection point is off a bisector: {str(e)}")
            certificate['transversal'] = None
    certificate['certified'] = (rank == 2 and certificate['intersection_dim'] == 2 and meets
                                and certificate.get('transversal') is False)
    return certificate


def _slice_samples(rng: np.random.Generator, name: str, count: int, klein_radius: float) -> np.ndarray:
    if name == 'plane':
        points = random_points_on_H(rng, 2, count, klein_radius)
        return np.hstack([points, np.zeros((count, 1))])
    return random_points_on_H(rng, 3, count, klein_radius)


def example1_scan(lam: float, budget: int = 10_000, seed: int = 0, klein_radius: float = 0.95,
                  slices: Sequence[str] = SLICES, max_witnesses: int = 3, tol: float = 1e-8,
                  tracer: Optional[ScanTracer] = None) -> ScanReport:
    """
    Sample U_λ = {x ∈ H : det Gr(x) > 0}.

    The 'plane' slice samples H² ⊂ H³ (x4 = 0), the 'general' slice all of
    H³. Each slice gets its own seeded stream and `budget` samples. The first
    max_witnesses hits of each slice are certified with certify_hit.

    Args:
        lam: λ > 1
        budget: Samples per slice
        seed: Seed of both streams
        klein_radius: Sampling radius in the Klein chart
        slices: Subset of ('plane', 'general')
        max_witnesses: Certified witnesses kept per slice
        tol: Rank tolerance for certification
        tracer: Optional JSON-lines tracer

    Returns:
        ScanReport with witnesses in standard coordinates; the closed-form
        determinant is the witness value
    """
    _check_lambda(lam)
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    unknown = set(slices) - set(SLICES)
    if unknown:
        raise ValueError(f"Unknown slices {sorted(unknown)}; expected a subset of {SLICES}")

    scan_id = str(uuid.uuid4())
    if tracer:
        tracer.trace_scan(scan_id, 'example1', {'lambda': lam, 'budget': budget, 'seed': seed, 'slices': list(slices)})
    start = time.perf_counter()

    P, P_inv = null_basis_change(3)
    streams = np.random.SeedSequence(seed).spawn(len(SLICES))
    witnesses: List[ScanWitness] = []
    per_slice = {}
    hits = 0
    for name, stream in zip(SLICES, streams):
        if name not in slices:
            continue
        X_std = _slice_samples(np.random.default_rng(stream), name, budget, klein_radius)
        X_null = X_std @ P_inv.T
        values = _det_gram_closed(lam, X_null)
        hit_idx = np.flatnonzero(values > 0)
        hits += len(hit_idx)
        certified = 0
        for i in hit_idx[:max_witnesses]:
            certificate = certify_hit(lam, X_std[i], tol)
            certificate.update({'slice': name, 'sample': int(i), 'x_null': X_null[i].tolist()})
            certified += bool(certificate['certified'])
            witnesses.append(ScanWitness(x=X_std[i].tolist(), value=float(values[i]),
                                         words=['A^-1', 'A^2', 'A^3'], certificate=certificate))
        per_slice[name] = {'trials': budget, 'hits': int(len(hit_idx)), 'certified': certified}
        logger.info(f"Example 1 slice {name} at lambda={lam}: {len(hit_idx)}/{budget} hits, "
                    f"{certified} certified")

    mu, nu = example1_mu_nu(lam)
    duration_ms = (time.perf_counter() - start) * 1000
    report = ScanReport(kind='example1', trials=budget * len(per_slice), hits=hits, witnesses=witnesses,
                        seed=seed, duration_ms=duration_ms,
                        details={'lambda': lam, 'mu': mu, 'nu': nu, 'klein_radius': klein_radius,
                                 'slices': per_slice})
    if tracer:
        tracer.trace_results(scan_id, report.trials, hits, duration_ms, witnesses)
    return report


def reverify_example1(report: ScanReport, rel_tol: float = 1e-9, tol: float = 1e-8) -> List[str]:
    """
    Re-check every witness of a loaded Example 1 report.

    Returns:
        Problems found, empty when every witness holds up
    """
    problems: List[str] = []
    if report.kind != 'example1':
        return [f"Report kind is {report.kind!r}, not 'example1'"]
    if report.hits > report.trials:
        problems.append(f"{report.hits} hits exceed {report.trials} trials")
    lam = float(report.details.get('lambda', 0.0))
    if not lam > 1.0:
        return problems + [f"Report carries no valid lambda ({lam})"]

    _, P_inv = null_basis_change(3)
    for i, witness in enumerate(report.witnesses):
        x_null = P_inv @ np.asarray(witness.x, dtype=float)
        value = example1_det_gram(lam, x_null)
        if value <= 0:
            problems.append(f"Witness {i}: det Gr = {value:.6e} is not positive")
        if witness.value is not None and abs(value - witness.value) > rel_tol * max(1.0, abs(value)):
            problems.append(f"Witness {i}: stored value {witness.value} differs from {value}")
        certificate = certify_hit(lam, np.asarray(witness.x, dtype=float), tol)
        if not certificate['certified']:
            problems.append(f"Witness {i}: bisector intersection is not a geodesic ({certificate})")
    return problems
