"""
Audits on enumerated group elements: class-K membership, elementary-group
and center witnesses, shared axis endpoints and a discreteness heuristic.

None of these certify anything about the infinite group; they report what
the enumerated ball of words shows.
"""
import logging
from typing import List, Optional, Sequence

import numpy as np

from app.errors import UnclassifiableWithinTolerance
from app.geometry.isometry import classify, fixed_subspace, is_cartan_involution
from app.geometry.lorentz import (
    VectorLike,
    check_on_H,
    hyperbolic_distance,
    lorentz_form,
)
from app.groups.group import GeneratedGroup, GroupElement, enumerate_elements
from app.models.models import ClassifyResponse, IsometryRecord
from app.models.reports import (
    ClassKReport,
    DiscretenessReport,
    ElementaryReport,
    EllipticFinding,
    SharedEndpointViolation,
)

logger = logging.getLogger(__name__)


def _safe_classify(element: GroupElement, tol: float):
    try:
        return classify(element.isometry(), tol)
    except UnclassifiableWithinTolerance:
        logger.debug(f"Element {element.word} is unclassifiable within tolerance")
        return None


def class_K_audit(G: GeneratedGroup, max_len: int = 4, tol: float = 1e-9,
                  elements: Optional[Sequence[GroupElement]] = None) -> ClassKReport:
    """
    List every enumerated elliptic element with its Cartan verdict.

    The audit passes iff every elliptic element found is a Cartan involution.
    """
    elements = list(elements) if elements is not None else enumerate_elements(G, max_len)
    findings: List[EllipticFinding] = []
    for element in elements:
        if element.is_identity:
            continue
        info = _safe_classify(element, tol)
        if info is None or not info.kind.is_elliptic:
            continue
        cartan = is_cartan_involution(element.isometry(), tol)
        findings.append(EllipticFinding(
            word=element.word,
            kind=info.kind.value,
            is_cartan=cartan,
            fixed_point=info.fixed_point.to_list() if info.fixed_point is not None else None,
        ))
    passed = all(f.is_cartan for f in findings)
    if not passed:
        logger.warning(f"Class K audit failed: non-Cartan elliptics "
                       f"{[f.word for f in findings if not f.is_cartan]}")
    return ClassKReport(passed=passed, max_len=max_len, element_count=len(elements),
                        elliptic_findings=findings)


def _projectively_fixed(M: np.ndarray, v: np.ndarray, tol: float) -> bool:
    w = M @ v
    scale = float(v @ w) / float(v @ v)
    return scale > 0 and np.linalg.norm(w - scale * v) <= tol * np.linalg.norm(w)


def _same_direction(u: np.ndarray, v: np.ndarray, tol: float) -> bool:
    u = u / np.linalg.norm(u)
    v = v / np.linalg.norm(v)
    return min(np.linalg.norm(u - v), np.linalg.norm(u + v)) <= tol


def _fixed_candidates(elements: Sequence[GroupElement], tol: float):
    """Null and timelike directions fixed by individual elements."""
    J = None
    points: List[np.ndarray] = []
    axes: List[tuple] = []
    for element in elements:
        if element.is_identity:
            continue
        info = _safe_classify(element, tol)
        if info is None:
            continue
        if info.kind.is_loxodromic:
            e_plus, e_minus = info.axis
            points.extend([e_plus.coords, e_minus.coords])
            axes.append((e_plus.coords, e_minus.coords))
        else:
            F = fixed_subspace(element.matrix)
            if J is None:
                J = lorentz_form(element.matrix.shape[0])
            if F.shape[1] == 0:
                continue
            gram = F.T @ J @ F
            evals, evecs = np.linalg.eigh((gram + gram.T) / 2)
            for value, vec in zip(evals, evecs.T):
                if value <= 1e-10:
                    v = F @ vec
                    points.append(v if v[0] > 0 else -v)
    return points, axes


def common_axis_report(elements: Sequence[GroupElement], tol: float = 1e-9,
                       direction_tol: float = 1e-7) -> List[SharedEndpointViolation]:
    """Pairs of loxodromics sharing exactly one endpoint (discrete groups share both)."""
    loxodromics = []
    for element in elements:
        if element.is_identity:
            continue
        info = _safe_classify(element, tol)
        if info is not None and info.kind.is_loxodromic:
            loxodromics.append((element.word, info.axis[0].coords, info.axis[1].coords))
    violations: List[SharedEndpointViolation] = []
    for i in range(len(loxodromics)):
        w1, a1, b1 = loxodromics[i]
        for j in range(i + 1, len(loxodromics)):
            w2, a2, b2 = loxodromics[j]
            for shared in (a1, b1):
                other = b1 if shared is a1 else a1
                if any(_same_direction(shared, e, direction_tol) for e in (a2, b2)):
                    if not any(_same_direction(other, e, direction_tol) for e in (a2, b2)):
                        violations.append(SharedEndpointViolation(first=w1, second=w2,
                                                                  shared=shared.tolist()))
    return violations


def elementary_and_center_diagnostics(G: GeneratedGroup, max_len: int = 3,
                                      tol: float = 1e-9) -> ElementaryReport:
    """
    Elementary-group and center witnesses on enumerated elements.

    A common fixed point of all generators in the closed ball, or an axis
    preserved by every generator, marks the group as elementary. Center
    witnesses are non-identity elements commuting with every generator. The
    report checks that a class-K group with neither kind of elementary
    witness has no center witness.
    """
    elements = enumerate_elements(G, max_len)
    generators = [letter.matrix for letter in G.letters]
    candidates, axes = _fixed_candidates(elements, tol)

    common: List[np.ndarray] = []
    for v in candidates:
        if all(_projectively_fixed(M, v, 1e-7) for M in generators):
            if not any(_same_direction(v, c, 1e-7) for c in common):
                common.append(v / v[0] if abs(v[0]) > tol else v)

    invariant_axes: List[List[list]] = []
    for a, b in axes:
        preserved = True
        for M in generators:
            ma, mb = M @ a, M @ b
            straight = _same_direction(ma, a, 1e-7) and _same_direction(mb, b, 1e-7)
            swapped = _same_direction(ma, b, 1e-7) and _same_direction(mb, a, 1e-7)
            if not (straight or swapped):
                preserved = False
                break
        if preserved and not any(_same_direction(a, np.array(x[0]), 1e-7) or
                                 _same_direction(a, np.array(x[1]), 1e-7) for x in invariant_axes):
            invariant_axes.append([a.tolist(), b.tolist()])

    center: List[str] = []
    for element in elements:
        if element.is_identity:
            continue
        M = element.matrix
        scale = max(1.0, float(np.max(np.abs(M))))
        if all(np.max(np.abs(M @ g - g @ M)) <= 1e-8 * scale * max(1.0, np.max(np.abs(g)))
               for g in generators):
            center.append(element.word)

    audit = class_K_audit(G, max_len, tol, elements=elements)
    elementary = bool(common) or bool(invariant_axes)
    center_consistent = not (audit.passed and not elementary and center)
    if not center_consistent:
        logger.warning(f"Nonelementary class K group shows center witnesses {center}")
    return ElementaryReport(
        elementary=elementary,
        common_fixed_points=[c.tolist() for c in common],
        invariant_axes=invariant_axes,
        center_words=center,
        class_k_passed=audit.passed,
        center_consistent=center_consistent,
        shared_endpoint_violations=common_axis_report(elements, tol),
    )


def discreteness_heuristic(G: GeneratedGroup, max_len: int = 4, probe: Optional[VectorLike] = None,
                           threshold: float = 1e-2) -> DiscretenessReport:
    """
    Minimal matrix distance |γ - I|max and minimal displacement d(probe, γ probe).

    A warning is logged and flagged when either minimum is positive but below
    the threshold. The heuristic never asserts discreteness.
    """
    size = G.size
    if probe is None:
        probe_arr = np.zeros(size)
        probe_arr[0] = 1.0
    else:
        probe_arr = check_on_H(probe, name='probe')
    report = DiscretenessReport(max_len=max_len, probe=probe_arr.tolist(), threshold=threshold)
    for element in enumerate_elements(G, max_len):
        if element.is_identity:
            continue
        distance = float(np.max(np.abs(element.matrix - np.eye(size))))
        if report.min_matrix_distance is None or distance < report.min_matrix_distance:
            report.min_matrix_distance = distance
            report.min_matrix_word = element.word
        y = element.matrix @ probe_arr
        displacement = hyperbolic_distance(probe_arr, y / np.sqrt(-(y[1:] @ y[1:] - y[0] ** 2)), tol=1e-6)
        if report.min_displacement is None or displacement < report.min_displacement:
            report.min_displacement = displacement
            report.min_displacement_word = element.word

    small = [v for v in (report.min_matrix_distance, report.min_displacement)
             if v is not None and 1e-12 < v < threshold]
    if small:
        report.warning = True
        logger.warning(f"Group elements move the probe or identity by less than {threshold}: "
                       f"matrix {report.min_matrix_distance}, displacement {report.min_displacement}; "
                       f"the group may not be discrete")
    return report


def classify_generators(G: GeneratedGroup, tol: float = 1e-9) -> ClassifyResponse:
    """
    Classification record of every generator of G.

    Raises:
        UnclassifiableWithinTolerance: If a generator sits in the tolerance band
    """
    records = []
    for gen in G.generators:
        info = classify(gen, tol)
        records.append(IsometryRecord(
            label=gen.label,
            kind=info.kind.value,
            orientation_preserving=info.orientation_preserving,
            translation_length=info.translation_length,
            rotation_angle=info.rotation_angle,
            eigenvalue=info.eigenvalue,
            reflection=info.reflection,
            axis=[e.to_list() for e in info.axis] if info.axis else None,
            fixed_point=info.fixed_point.to_list() if info.fixed_point is not None else None,
        ))
    return ClassifyResponse(generators=records)
