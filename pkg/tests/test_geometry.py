import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from app.errors import (
    BasePointFixed,
    CoincidentPoints,
    DegenerateAxis,
    DimensionMismatch,
    NotFuturePreserving,
    NotLorentz,
    NotOnHyperboloid,
    UnsupportedDimension,
)
from app.domain.dirichlet import compute_domain
from app.geometry.bisector import (
    BMap,
    b_map,
    bisector,
    dirichlet_halfspace,
    is_singular_tuple,
    numeric_rank,
    q_p_locus,
    sigma_classify,
    transversal_at,
)
from app.geometry.isometry import (
    axis_and_dynamics,
    boost,
    classify,
    invariant_plane_pole,
    is_cartan_involution,
    make_cartan,
    make_glide_reflection,
    make_hyperbolic_from_cartans,
    make_loxodromic,
    rotation,
    validate,
)
from app.geometry.lorentz import (
    LorentzVec,
    affine_combination_holds,
    causal_class,
    hyperbolic_distance,
    is_on_H,
    klein_project,
    lorentz_form,
    minkowski_dot,
    normalize_to_H,
    null_basis_change,
    point_from_klein,
    random_points_on_H,
)
from app.groups.diagnostics import class_K_audit
from app.groups.group import GeneratedGroup, enumerate_elements, orbit
from app.paperlab.cyclic import random_glide_reflection
from app.paperlab.example1 import example1_matrices
from app.schema.types import CausalClass, IsometryKind, SigmaCase, SingularityStatus

coordinate = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)
vector4 = st.lists(coordinate, min_size=4, max_size=4)
klein3 = st.lists(st.floats(min_value=-0.5, max_value=0.5, allow_nan=False), min_size=3, max_size=3)
weight = st.tuples(st.floats(min_value=0.1, max_value=10), st.sampled_from([-1.0, 1.0])).map(lambda p: p[0] * p[1])


# -----------------------------------------------------------------------------
# Lorentz space
# -----------------------------------------------------------------------------

def test_lorentz_vec_needs_three_coordinates():
    with pytest.raises(UnsupportedDimension):
        LorentzVec([1.0, 0.0])


def test_lorentz_vec_is_read_only():
    v = LorentzVec([1.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        v.coords[0] = 2.0


def test_minkowski_dot_rejects_mismatched_sizes():
    with pytest.raises(DimensionMismatch):
        minkowski_dot([1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0])


@given(vector4, vector4, vector4, coordinate)
@settings(max_examples=100, deadline=None)
def test_minkowski_dot_is_symmetric_and_bilinear(u, v, w, s):
    u, v, w = np.array(u), np.array(v), np.array(w)
    assert minkowski_dot(u, v) == pytest.approx(minkowski_dot(v, u))
    expected = s * minkowski_dot(u, w) + minkowski_dot(v, w)
    assert minkowski_dot(s * u + v, w) == pytest.approx(expected, abs=1e-9 * (1 + abs(expected)) + 1e-6)


@pytest.mark.parametrize('v, expected', [
    ([2.0, 1.0, 0.0, 0.0], CausalClass.TIMELIKE_FUTURE),
    ([-2.0, 1.0, 0.0, 0.0], CausalClass.TIMELIKE_PAST),
    ([1.0, 1.0, 0.0, 0.0], CausalClass.NULL_FUTURE),
    ([-1.0, 0.0, 1.0, 0.0], CausalClass.NULL_PAST),
    ([0.0, 1.0, 0.0, 0.0], CausalClass.SPACELIKE),
    ([0.0, 0.0, 0.0, 0.0], CausalClass.ZERO),
])
def test_causal_class(v, expected):
    assert causal_class(v) is expected


def test_normalize_to_H_scales_by_lorentz_length():
    x = normalize_to_H([2.0, 1.0, 0.0, 0.0])
    assert np.allclose(x.coords, np.array([2.0, 1.0, 0.0, 0.0]) / np.sqrt(3.0))
    assert is_on_H(x)


def test_distance_matches_closed_form(origin4):
    assert hyperbolic_distance([np.cosh(1.0), np.sinh(1.0), 0.0, 0.0], origin4) == pytest.approx(1.0)
    assert hyperbolic_distance([np.cosh(2.0), 0.0, np.sinh(2.0), 0.0], origin4) == pytest.approx(2.0)
    assert hyperbolic_distance(origin4, origin4) == 0.0


def test_distance_rejects_points_off_H(origin4):
    with pytest.raises(NotOnHyperboloid):
        hyperbolic_distance([2.0, 0.0, 0.0, 0.0], origin4)


@given(klein3, klein3, klein3)
@settings(max_examples=100, deadline=None)
def test_distance_triangle_inequality(a, b, c):
    x, y, z = point_from_klein(a), point_from_klein(b), point_from_klein(c)
    assert hyperbolic_distance(x, z) <= hyperbolic_distance(x, y) + hyperbolic_distance(y, z) + 1e-9


@given(klein3, klein3, st.floats(min_value=-2, max_value=2), st.floats(min_value=0, max_value=2 * np.pi))
@settings(max_examples=50, deadline=None)
def test_distance_is_invariant_under_isometries(a, b, t, theta):
    M = boost(t) @ rotation(theta)
    x, y = point_from_klein(a), point_from_klein(b)
    moved = hyperbolic_distance(M @ x.coords, M @ y.coords, tol=1e-7)
    assert moved == pytest.approx(hyperbolic_distance(x, y), abs=1e-7)


@given(klein3, st.floats(min_value=0.01, max_value=100))
@settings(max_examples=50, deadline=None)
def test_klein_projection_ignores_positive_scale(a, s):
    x = point_from_klein(a)
    assert np.allclose(klein_project(s * x.coords), a, atol=1e-12)


def test_point_from_klein_rejects_the_boundary():
    with pytest.raises(NotOnHyperboloid):
        point_from_klein([0.6, 0.8, 0.0])


def test_random_points_lie_on_H(rng):
    points = random_points_on_H(rng, 3, 200, klein_radius=0.95)
    assert points.shape == (200, 4)
    assert all(is_on_H(p) for p in points)
    assert np.all(np.linalg.norm(points[:, 1:] / points[:, :1], axis=1) <= 0.95)


def test_null_basis_change_is_an_involution():
    P, P_inv = null_basis_change(3)
    assert np.allclose(P @ P_inv, np.eye(4))
    e1, e2 = P[:, 0], P[:, 1]
    assert minkowski_dot(e1, e2) == pytest.approx(-1.0)
    assert minkowski_dot(e1, e1) == pytest.approx(0.0)
    with pytest.raises(UnsupportedDimension):
        null_basis_change(2)


@given(klein3, klein3, klein3, weight, weight)
@settings(max_examples=200, deadline=None)
def test_affine_combination_of_distinct_points_fails(a, b, c, s, t):
    assume(abs(s + t) >= 0.1)
    pts = [np.array(p) for p in (a, b, c)]
    assume(min(np.linalg.norm(p - q) for i, p in enumerate(pts) for q in pts[i + 1:]) > 0.05)
    u, v, w = (point_from_klein(p) for p in (a, b, c))
    assert not affine_combination_holds(u, v, w, s, t)


@given(klein3, weight, weight)
@settings(max_examples=50, deadline=None)
def test_affine_combination_of_equal_points_holds(a, s, t):
    assume(abs(s + t) >= 0.1)
    u = point_from_klein(a)
    assert affine_combination_holds(u, u, u, s, t)


# -----------------------------------------------------------------------------
# Isometries
# -----------------------------------------------------------------------------

def test_validate_rejects_non_lorentz_and_time_reversing():
    with pytest.raises(NotLorentz):
        validate(np.diag([2.0, 1.0, 1.0]))
    with pytest.raises(NotFuturePreserving):
        validate(-np.eye(4))
    with pytest.raises(DimensionMismatch):
        validate(np.eye(2))


def test_inverse_and_power_labels():
    A = validate(boost(0.5), label='a')
    assert np.allclose((A @ A.inverse()).matrix, np.eye(4))
    assert A.inverse().label == 'a^-1'
    assert A.power(3).label == 'a^3'
    assert np.allclose(A.power(-2).matrix, boost(-1.0))


def test_boost_is_hyperbolic():
    info = classify(validate(boost(1.0)))
    assert info.kind is IsometryKind.HYPERBOLIC
    assert info.eigenvalue == pytest.approx(np.e)
    assert info.translation_length == pytest.approx(1.0)
    assert info.rotation_angle == 0.0
    assert info.orientation_preserving
    e_plus, e_minus = info.axis
    assert np.allclose(e_plus.coords, [1.0, 1.0, 0.0, 0.0])
    assert np.allclose(e_minus.coords, [1.0, -1.0, 0.0, 0.0])


def test_screw_motion_is_strictly_loxodromic():
    info = classify(validate(boost(1.0) @ rotation(np.pi / 3)))
    assert info.kind is IsometryKind.STRICTLY_LOXODROMIC
    assert info.rotation_angle == pytest.approx(np.pi / 3)
    assert info.translation_length == pytest.approx(1.0)


def test_elliptic_kinds():
    cartan = classify(validate(np.diag([1.0, -1.0, -1.0, -1.0])))
    assert cartan.kind is IsometryKind.ELLIPTIC_CARTAN
    assert np.allclose(cartan.fixed_point.coords, [1.0, 0.0, 0.0, 0.0])

    half_turn = validate(np.diag([1.0, 1.0, -1.0, -1.0]))
    assert classify(half_turn).kind is IsometryKind.ELLIPTIC_OTHER
    assert not is_cartan_involution(half_turn)
    assert is_cartan_involution(validate(np.diag([1.0, -1.0, -1.0, -1.0])))


def test_parabolic():
    M = np.array([[1.5, 1.0, -0.5], [1.0, 1.0, -1.0], [0.5, 1.0, 0.5]])
    assert classify(validate(M)).kind is IsometryKind.PARABOLIC


def test_identity():
    assert classify(validate(np.eye(3))).kind is IsometryKind.IDENTITY


def test_axis_and_dynamics_is_verified():
    data = axis_and_dynamics(validate(boost(0.7) @ rotation(1.0)))
    assert data.verified
    assert data.translation_length == pytest.approx(0.7)
    assert is_on_H(data.axis_point)


def test_make_cartan_fixes_its_point():
    p = point_from_klein([0.2, -0.1, 0.3])
    theta = make_cartan(p)
    assert is_cartan_involution(theta)
    assert np.allclose(theta.matrix @ p.coords, p.coords)
    assert np.allclose(theta.matrix @ theta.matrix, np.eye(4))


def test_product_of_cartans_translates_twice_the_distance(origin4):
    q = point_from_klein([np.tanh(0.5), 0.0, 0.0])
    info = classify(make_hyperbolic_from_cartans(origin4, q))
    assert info.kind is IsometryKind.HYPERBOLIC
    assert info.translation_length == pytest.approx(2 * hyperbolic_distance(origin4, q))


def test_make_loxodromic_matches_requested_dynamics():
    A = make_loxodromic([1.0, 0.0, 1.0, 0.0], [1.0, 0.0, -1.0, 0.0], 1.3, angle=0.7)
    info = classify(A)
    assert info.kind is IsometryKind.STRICTLY_LOXODROMIC
    assert info.translation_length == pytest.approx(1.3)
    assert info.rotation_angle == pytest.approx(0.7)
    assert np.allclose(info.axis[0].coords, [1.0, 0.0, 1.0, 0.0])


def test_make_loxodromic_rejects_bad_input():
    with pytest.raises(ValueError):
        make_loxodromic([1.0, 1.0, 0.0], [1.0, -1.0, 0.0], 0.0)
    with pytest.raises(ValueError):
        make_loxodromic([1.0, 1.0, 0.0], [1.0, -1.0, 0.0], 1.0, angle=0.5)
    with pytest.raises(DegenerateAxis):
        make_loxodromic([1.0, 1.0, 0.0], [2.0, 2.0, 0.0], 1.0)


def test_glide_reflection_reverses_orientation():
    A = make_glide_reflection([1.0, 1.0, 0.0, 0.0], [1.0, -1.0, 0.0, 0.0], 1.0, mirror_pole=[0.0, 0.0, 0.0, 1.0])
    info = classify(A)
    assert info.kind.is_loxodromic
    assert info.reflection
    assert not info.orientation_preserving
    pole = invariant_plane_pole(A)
    assert abs(pole[2]) == pytest.approx(1.0)


# -----------------------------------------------------------------------------
# Bisectors
# -----------------------------------------------------------------------------

def test_bisector_is_equidistant(origin3):
    y = point_from_klein([0.4, 0.1])
    plane = bisector(origin3, y)
    assert plane.meets_H
    with pytest.raises(CoincidentPoints):
        bisector(origin3, origin3)


def test_dirichlet_halfspace_contains_the_base(origin3):
    hs = dirichlet_halfspace(origin3, boost(1.0, size=3), word='a')
    assert hs.contains(origin3)
    assert not hs.contains(boost(1.0, size=3) @ origin3)
    with pytest.raises(BasePointFixed):
        dirichlet_halfspace(origin3, np.diag([1.0, -1.0, -1.0]), word='J')


def test_b_map_size_limits(origin4):
    with pytest.raises(ValueError):
        b_map([np.eye(4)] * 5, origin4)
    with pytest.raises(ValueError):
        b_map([], origin4)


def test_singular_triple_of_a_rotating_loxodromic():
    A, A_inv, A2, A3 = example1_matrices(2.0)
    singular = is_singular_tuple([A_inv, A2, A3], trials=64)
    assert singular.status is SingularityStatus.SINGULAR_WITH_CONFIDENCE
    assert singular.max_rank_seen <= 2

    regular = is_singular_tuple([A, A2, A.power(4)], trials=64)
    assert regular.status is SingularityStatus.NONSINGULAR
    assert numeric_rank(b_map([A, A2, A.power(4)], regular.witness)) == 3


def test_exact_singularity_bound():
    report = is_singular_tuple([np.eye(3), np.eye(3)], exact=True, exact_points=4, entry_bits=8)
    assert report.status is SingularityStatus.SINGULAR_WITH_CONFIDENCE
    assert report.mode == 'exact'
    assert 0 < report.failure_probability_bound < 1

    swap = [[1, 0, 0], [0, 0, 1], [0, 1, 0]]
    flip = [[1, 0, 0], [0, -1, 0], [0, 0, 1]]
    assert is_singular_tuple([swap, flip], exact=True).status is SingularityStatus.NONSINGULAR


def test_sigma_cases(origin4):
    a, b = boost(1.0), boost(2.0)
    turn = rotation(0.4)
    assert sigma_classify(turn, a, origin4).case is SigmaCase.FIXED_BY_A1
    assert sigma_classify(a, turn, origin4).case is SigmaCase.FIXED_BY_A2
    assert sigma_classify(a, a, origin4).case is SigmaCase.FIXED_BY_QUOTIENT
    assert sigma_classify(a, b, origin4).case is SigmaCase.NOT_IN_SIGMA

    report = sigma_classify(a, b, [1.0, 1.0, 0.0, 0.0])
    assert report.case is SigmaCase.COMMON_NULL_EIGENVECTOR
    assert report.verified
    assert report.rank == 1


def test_transversal_at(origin3):
    normals = [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    assert transversal_at(origin3, normals)
    assert not transversal_at(origin3, [[0.0, 1.0, 0.0], [0.0, 2.0, 0.0]])


def test_q_p_locus_is_equidistance_locus(origin3):
    A = boost(1.0, size=3)
    locus = q_p_locus(A, origin3)
    x = point_from_klein([-np.tanh(0.5), 0.3])
    assert locus.contains(x.coords)
    assert hyperbolic_distance(origin3, x) == pytest.approx(hyperbolic_distance(origin3, A @ x.coords))
    with pytest.raises(BasePointFixed):
        q_p_locus(make_cartan(origin3), origin3)


def test_numeric_rank_is_relative_to_the_largest_singular_value():
    tiny = BMap(columns=np.array([[1e-12, 0.0], [0.0, 1e-12], [0.0, 0.0]]), scale=1.0)
    assert numeric_rank(tiny) == 2
    assert numeric_rank(tiny, use_scale=True) == 0
    assert numeric_rank(np.array([[1.0, 0.0], [0.0, 1e-10], [0.0, 0.0]])) == 1
    assert numeric_rank(np.zeros((3, 2))) == 0


# -----------------------------------------------------------------------------
# Equivariance and structural properties
# -----------------------------------------------------------------------------

boost_length = st.floats(min_value=-1, max_value=1, allow_nan=False)
angle = st.floats(min_value=0, max_value=2 * np.pi, allow_nan=False)
klein2 = st.lists(st.floats(min_value=-0.6, max_value=0.6, allow_nan=False), min_size=2, max_size=2)


def _schottky() -> GeneratedGroup:
    return GeneratedGroup([('a', boost(3.0, size=3, plane=(0, 1))), ('b', boost(3.0, size=3, plane=(0, 2)))])


def _conjugator3(t: float, theta: float) -> np.ndarray:
    return boost(t, size=3, plane=(0, 1)) @ rotation(theta, size=3, plane=(1, 2))


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


@given(boost_length, angle)
@settings(max_examples=10, deadline=None)
def test_domain_commutes_with_conjugation(t, theta):
    G = _schottky()
    g = _conjugator3(t, theta)
    x = np.array([1.0, 0.0, 0.0])
    D = compute_domain(G, x, len_max=6)
    D_g = compute_domain(G.conjugate(g), g @ x, len_max=6)
    assert D.converged and D_g.converged
    assert set(D_g.words) == set(D.words)
    for c in D.contributors:
        moved = g @ c.halfspace.normal.coords
        assert np.allclose(_unit(D_g.contributor(c.word).halfspace.normal.coords), _unit(moved), atol=1e-8)


@given(boost_length, angle, klein2)
@settings(max_examples=25, deadline=None)
def test_orbit_commutes_with_conjugation(t, theta, k):
    G = _schottky()
    g = _conjugator3(t, theta)
    x = point_from_klein(k).coords
    points = {el.word: y.coords for el, y in orbit(G, x, 3)}
    conjugated = {el.word: y.coords for el, y in orbit(G.conjugate(g), g @ x, 3)}
    assert conjugated.keys() == points.keys()
    for word, y in points.items():
        expected = g @ y
        assert np.allclose(conjugated[word], expected, rtol=1e-8, atol=1e-8 * np.max(np.abs(expected)))


@given(st.sampled_from(['singular', 'regular']), klein3, boost_length, angle)
@settings(max_examples=50, deadline=None)
def test_rank_is_invariant_under_a_common_isometry(triple, k, t, theta):
    A, A_inv, A2, A3 = example1_matrices(2.0)
    As = [A_inv.matrix, A2.matrix, A3.matrix] if triple == 'singular' else [A.matrix, A2.matrix, A.power(4).matrix]
    x = point_from_klein(k).coords
    B = b_map(As, x)
    s = np.linalg.svd(B.columns, compute_uv=False)
    s = s / s[0]
    assume(all(v > 1e-5 or v < 1e-11 for v in s))

    g = boost(t) @ rotation(theta, plane=(1, 2))
    g_inv = np.linalg.inv(g)
    moved = b_map([g @ M @ g_inv for M in As], g @ x)
    assert numeric_rank(moved) == numeric_rank(B)


@given(st.floats(min_value=0.5, max_value=3.0), st.floats(min_value=0.5, max_value=3.0), angle)
@settings(max_examples=15, deadline=None)
def test_enumerated_elements_are_closed_under_inverses(t1, t2, theta):
    turn = rotation(theta, size=3, plane=(1, 2))
    G = GeneratedGroup([('a', boost(t1, size=3)), ('b', turn @ boost(t2, size=3) @ turn.T)])
    J = lorentz_form(3)
    elements = enumerate_elements(G, 3)
    matrices = [el.matrix for el in elements]
    for el in elements:
        inverse = J @ el.matrix.T @ J
        scale = max(1.0, float(np.max(np.abs(inverse))))
        assert any(np.max(np.abs(M - inverse)) <= 1e-8 * scale for M in matrices), el.word


@given(klein3)
@settings(max_examples=30, deadline=None)
def test_group_of_one_cartan_involution_is_class_k(k):
    p = point_from_klein(k)
    audit = class_K_audit(GeneratedGroup([make_cartan(p, label='J')]), max_len=3)
    assert audit.passed
    assert len(audit.elliptic_findings) == 1
    assert audit.elliptic_findings[0].is_cartan


@given(st.floats(min_value=1.5, max_value=4.0), klein3)
@settings(max_examples=50, deadline=None)
def test_sigma_loci_of_a_singular_triple_coincide(lam, k):
    _, A_inv, A2, A3 = example1_matrices(lam)
    null_axis = [np.array([1.0, 1.0, 0.0, 0.0]), np.array([1.0, -1.0, 0.0, 0.0])]
    for x in [point_from_klein(k).coords] + null_axis:
        first = sigma_classify(A_inv, A2, x).case is not SigmaCase.NOT_IN_SIGMA
        second = sigma_classify(A2, A3, x).case is not SigmaCase.NOT_IN_SIGMA
        assert first == second
    # the axis endpoints are null eigenvectors of every power of A
    assert all(sigma_classify(A_inv, A2, e).case is SigmaCase.COMMON_NULL_EIGENVECTOR for e in null_axis)


@pytest.mark.slow
@given(st.integers(min_value=1, max_value=3), st.lists(klein2, min_size=20, max_size=20))
@settings(max_examples=5, deadline=None)
def test_domain_shrinks_as_words_grow(length, samples):
    G = GeneratedGroup([('a', boost(1.2, size=3, plane=(0, 1))), ('b', boost(1.5, size=3, plane=(0, 2)))])
    x = np.array([1.0, 0.0, 0.0])
    shorter = compute_domain(G, x, len_start=length, len_max=length, stability_window=10)
    longer = compute_domain(G, x, len_start=length + 1, len_max=length + 1, stability_window=10)
    for k in samples:
        p = point_from_klein(k).coords
        if longer.contains(p):
            assert shorter.contains(p)


@given(st.integers(min_value=0, max_value=2 ** 32 - 1), klein3)
@settings(max_examples=30, deadline=None)
def test_glide_reflection_bisectors_are_orthogonal_to_the_invariant_plane(seed, k):
    A = random_glide_reflection(np.random.default_rng(seed))
    p = invariant_plane_pole(A).coords
    x = point_from_klein(k).coords
    projected = x - minkowski_dot(x, p) * p
    x_P = projected / np.sqrt(-minkowski_dot(projected, projected))
    for n in (-3, -2, -1, 1, 2, 3):
        M = np.linalg.matrix_power(A.matrix, n)
        normal = x - M @ x
        assert abs(minkowski_dot(normal, p)) <= 1e-8 * np.linalg.norm(normal) * np.linalg.norm(p)
        u, v = _unit(normal), _unit(x_P - M @ x_P)
        assert min(np.linalg.norm(u - v), np.linalg.norm(u + v)) <= 1e-7
