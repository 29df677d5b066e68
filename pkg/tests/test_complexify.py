import itertools
from fractions import Fraction

import numpy as np
import pytest
import sympy

from app.complexes.complex import ComplexFace
from app.complexify.cache import IntersectionCache
from app.complexify.cartan import assumption_cartan_check
from app.complexify.parasitic import (
    face_spans,
    parasitic_report,
    primary_parasitic,
    saturate,
    secondary_parasitic,
)
from app.complexify.subspace import ProjectiveSubspace, intersect_subspaces, lorentz_annihilator, span_of_face
from app.errors import CombinatorialCapExceeded, DimensionMismatch
from app.geometry.isometry import boost
from app.schema.types import ParasiticKind
from app.schema.validation import load_complex, load_complex_definition


def _rref_key(vectors):
    """Canonical rows of a rational span, computed independently with sympy."""
    reduced, pivots = sympy.Matrix(vectors).rref()
    return tuple(tuple(Fraction(int(v.p), int(v.q)) for v in reduced.row(i)) for i in range(len(pivots)))


def _intersection(spans):
    """Basis rows of the intersection of row spans, via annihilators."""
    constraints = []
    for rows in spans:
        constraints += [list(v) for v in sympy.Matrix(rows).nullspace()]
    if not constraints:
        return spans[0]
    return [list(v) for v in sympy.Matrix(constraints).nullspace()]


def brute_force_primary(C, tuple_cap):
    spans = {fid: face.exact_rays.tolist() for fid, face in C.faces.items()}
    keys = {fid: _rref_key(rows) for fid, rows in spans.items()}
    found = set()
    for host in C.faces:
        subs = sorted(C.subfaces(host))
        for size in range(2, tuple_cap + 1):
            for members in itertools.combinations(subs, size):
                basis = _intersection([spans[m] for m in members])
                if not basis:
                    continue
                key = _rref_key(basis)
                below = set.intersection(*({m} | C.subfaces(m) for m in members))
                if any(keys[c0] == key for c0 in below):
                    continue
                found.add((host, key))
    return found


# -----------------------------------------------------------------------------
# Subspaces and the intersection cache
# -----------------------------------------------------------------------------

def test_exact_spans_are_canonical():
    U = ProjectiveSubspace.from_vectors([[1, 0, 0], [1, 1, 0]])
    V = ProjectiveSubspace.from_vectors([[0, 2, 0], [3, 0, 0], [1, 1, 0]])
    assert U.dim == 2
    assert U.equals(V)
    assert U.key == V.key
    assert U.contains_vector([5, -7, 0])
    assert not U.contains_vector([0, 0, 1])


def test_float_and_exact_agree():
    exact = ProjectiveSubspace.from_vectors([[1, 0, 0], [0, 1, 1]])
    approx = ProjectiveSubspace.from_vectors([[1.0, 0.0, 0.0], [0.0, 1.0, 1.0]], exact=False)
    assert approx.equals(exact.as_float())
    assert approx.contains(exact)


def test_lorentz_annihilator():
    polar = lorentz_annihilator([1, 0, 0])
    assert polar.exact
    assert polar.equals(ProjectiveSubspace.from_vectors([[0, 1, 0], [0, 0, 1]]))
    tilted = lorentz_annihilator([2.0, 1.0, 0.0])
    assert not tilted.exact
    assert tilted.contains_vector([1.0, 2.0, 0.0])


def test_image_and_preimage():
    line = ProjectiveSubspace.from_vectors([[1, 1, 0]])
    flip = [[1, 0, 0], [0, -1, 0], [0, 0, 1]]
    assert line.image(flip).equals(ProjectiveSubspace.from_vectors([[1, -1, 0]]))
    assert line.preimage(flip).equals(ProjectiveSubspace.from_vectors([[1, -1, 0]]))
    assert line.image(None) is line


def test_span_of_face(cube_complex):
    square = cube_complex.faces['f+00']
    span = span_of_face(square)
    assert span.exact
    assert span.dim == 3
    assert span.contains_vector([2, 1, 0, 0])
    approx = span_of_face(square, exact=False)
    assert not approx.exact
    assert approx.equals(span.as_float())
    with pytest.raises(ValueError):
        span_of_face(ComplexFace('v', 0))


def test_intersection_errors():
    with pytest.raises(ValueError):
        intersect_subspaces([])
    with pytest.raises(DimensionMismatch):
        intersect_subspaces([ProjectiveSubspace.whole(3), ProjectiveSubspace.whole(4)])


def test_intersections_are_cached_in_any_order():
    cache = IntersectionCache()
    U = ProjectiveSubspace.from_vectors([[1, 0, 0], [0, 1, 0]])
    V = ProjectiveSubspace.from_vectors([[0, 1, 0], [0, 0, 1]])
    first = intersect_subspaces([U, V], cache=cache)
    assert first.equals(ProjectiveSubspace.from_vectors([[0, 1, 0]]))
    assert cache.misses == 1
    second = intersect_subspaces([V, U], cache=cache)
    assert second is first
    assert cache.hits == 1
    assert len(cache) == 1


def test_cache_eviction():
    cache = IntersectionCache(max_size=1)
    cache.set(['a', 'b'], 1)
    cache.set(['c'], 2)
    assert len(cache) == 1
    assert cache.get(['b', 'a']) is None
    assert cache.get(['c']) == 2
    cache.clear()
    assert len(cache) == 0
    assert cache.misses == 0


# -----------------------------------------------------------------------------
# Parasitic records
# -----------------------------------------------------------------------------

def test_cube_primary_records(cube_complex):
    records = primary_parasitic(cube_complex, tuple_cap=3, cache=IntersectionCache())
    assert len(records) == 18
    assert sum(r.host == 'f000' for r in records) == 6
    for square in ('f+00', 'f-00', 'f0+0', 'f0-0', 'f00+', 'f00-'):
        assert sum(r.host == square for r in records) == 2
    assert all(r.kind == ParasiticKind.PRIMARY and r.subspace.exact for r in records)


def test_cube_primary_records_match_brute_force(cube_complex):
    records = primary_parasitic(cube_complex, tuple_cap=3, cache=IntersectionCache())
    assert {(r.host, r.subspace.key[2]) for r in records} == brute_force_primary(cube_complex, 3)


def test_primary_float_mode_counts(cube_complex):
    records = primary_parasitic(cube_complex, tuple_cap=3, exact=False, cache=IntersectionCache())
    assert len(records) == 18
    assert not any(r.subspace.exact for r in records)


def test_primary_tuple_budget(cube_complex):
    with pytest.raises(CombinatorialCapExceeded):
        primary_parasitic(cube_complex, tuple_cap=3, max_tuples=50, cache=IntersectionCache())


def test_two_triangles_have_no_primary_records(fixtures_dir):
    C = load_complex(fixtures_dir / 'two_triangles.json')
    assert primary_parasitic(C, tuple_cap=4) == []


def test_faces_without_geometry_have_no_spans(make_book):
    with pytest.raises(ValueError):
        face_spans(make_book(2))


def test_saturation_of_a_square_record(cube_complex):
    records = primary_parasitic(cube_complex, tuple_cap=3, cache=IntersectionCache())
    vertical = ProjectiveSubspace.from_vectors([[0, 0, 0, 1]])
    (record,) = [r for r in records if r.host == 'f+00' and r.subspace.equals(vertical)]
    (saturated,) = saturate([record], cube_complex)
    assert {fid for fid, _ in saturated.orbit} == {
        'f000', 'f+00', 'f-00', 'f0+0', 'f0-0', 'f++0', 'f+-0', 'f-+0', 'f--0',
    }
    assert all(V.equals(vertical) for _, V in saturated.orbit)
    (again,) = saturate([saturated], cube_complex)
    assert [fid for fid, _ in again.orbit] == [fid for fid, _ in saturated.orbit]


def test_secondary_records_on_cartan_triangles(fixtures_dir):
    path = fixtures_dir / 'cartan_triangles.json'
    C = load_complex(path)
    cartan = [(d.face, d.fixed_point) for d in load_complex_definition(path).cartan]
    records = secondary_parasitic(C, cartan)
    assert sorted(r.members[0] for r in records) == ['ab', 'ac', 'bc']
    assert all(r.kind == ParasiticKind.SECONDARY for r in records)
    assert all(r.misses_hyperbolic for r in records)

    report = parasitic_report([], records)
    assert len(report.secondary) == 3
    assert report.secondary[0].host == 'T1'
    assert report.secondary[0].fixed_point == [1.0, 0.0, 0.0]


# -----------------------------------------------------------------------------
# Cartan assumption
# -----------------------------------------------------------------------------

def test_half_turn_swapping_triangles_is_cartan(fixtures_dir):
    C = load_complex(fixtures_dir / 'cartan_triangles.json')
    report = assumption_cartan_check(C, [np.diag([1.0, -1.0, -1.0])])
    assert report.passed
    (finding,) = report.findings
    assert finding.face == 'ab'
    assert finding.fixed_point == pytest.approx([1.0, 0.0, 0.0])


def test_rotation_about_a_line_breaks_the_assumption(cube_complex):
    report = assumption_cartan_check(cube_complex, [np.diag([1.0, 1.0, -1.0, -1.0])])
    assert not report.passed
    assert report.findings[0].violations


def test_free_elements_pass(cube_complex):
    report = assumption_cartan_check(cube_complex, [boost(1.0)])
    assert report.passed
    assert report.findings == []
