import numpy as np
import pytest

from app.domain.cone import face_lattice, face_meets_hyperbolic
from app.domain.dirichlet import compute_domain
from app.domain.pairings import ideal_faces, ridge_cycles, side_pairings
from app.domain.simplicity import simplicity_check
from app.errors import BasePointFixed, HalfspaceCapExceeded, NotConverged, UnsupportedDimension
from app.geometry.bisector import dirichlet_halfspace
from app.geometry.isometry import boost
from app.geometry.lorentz import klein_project, point_from_klein
from app.groups.group import GeneratedGroup
from app.paperlab.plotting import parse_plane, section_polygon
from app.schema.types import FaceVerdict, IdealKind


@pytest.fixture
def boost_domain(boost_group, origin3):
    return compute_domain(boost_group, origin3, len_max=6)


def test_face_meets_hyperbolic():
    assert face_meets_hyperbolic([[1.0, 1.0, 0.0], [1.0, -1.0, 0.0]])
    assert not face_meets_hyperbolic([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    assert face_meets_hyperbolic([[1.0, 0.0, 0.0]])


def test_face_lattice_of_one_halfspace(origin3):
    h = dirichlet_halfspace(origin3, boost(1.0, size=3))
    cone = face_lattice([h])
    assert not cone.degenerate
    assert 0 in cone.facet_rows
    assert cone.redundant_rows() == []
    assert cone.contains(origin3)
    assert not cone.contains(boost(1.0, size=3) @ origin3)


def test_face_lattice_cap(origin3):
    halfspaces = [dirichlet_halfspace(origin3, boost(t, size=3)) for t in (1.0, 2.0, 3.0)]
    with pytest.raises(HalfspaceCapExceeded):
        face_lattice(halfspaces, halfspace_cap=2)


def test_redundant_halfspaces_are_detected(origin3):
    halfspaces = [dirichlet_halfspace(origin3, boost(t, size=3)) for t in (1.0, 2.0)]
    cone = face_lattice(halfspaces)
    assert cone.redundant_rows() == [1]
    assert cone.implies(halfspaces[1])


def test_boost_domain_is_a_strip(boost_domain):
    assert boost_domain.converged
    assert sorted(boost_domain.words) == ['a', 'a^-1']
    half_width = np.tanh(0.5)
    assert boost_domain.contains(point_from_klein([half_width * 0.99, 0.8]))
    assert not boost_domain.contains(point_from_klein([half_width * 1.05, 0.0]))


def test_boost_domain_simplicity(boost_domain, boost_group):
    report = simplicity_check(boost_domain, boost_group)
    assert report.simple
    assert report.weakly_simple
    facets = [r for r in report.faces if r.codim == 1]
    assert len(facets) == 2
    assert all(r.count == 1 and r.verdict == FaceVerdict.SIMPLE for r in facets)


def test_boost_domain_pairings(boost_domain):
    pairings = side_pairings(boost_domain)
    assert len(pairings) == 2
    assert all(p.verified for p in pairings)
    assert {(p.facet_word, p.partner_word) for p in pairings} == {('a', 'a^-1'), ('a^-1', 'a')}
    assert ridge_cycles(boost_domain, pairings) == []


def test_boost_domain_facets_are_unbounded(boost_domain):
    records = ideal_faces(boost_domain)
    assert records
    assert all(r.kind == IdealKind.UNBOUNDED for r in records)


def test_base_point_fixed_by_involution(origin3):
    G = GeneratedGroup([('J', np.diag([1.0, -1.0, -1.0]))])
    with pytest.raises(BasePointFixed):
        compute_domain(G, origin3)

    D = compute_domain(G, point_from_klein([0.3, 0.0]))
    assert D.converged
    assert D.convergence.exhausted
    assert D.words == ['J']


def test_schottky_domain(schottky_group, origin3):
    D = compute_domain(schottky_group, origin3, len_max=6)
    assert D.converged
    assert {'a', 'a^-1', 'b', 'b^-1'} <= set(D.words)
    report = D.to_report()
    assert report.dimension == 2
    assert report.convergence.converged
    assert len(report.contributors) == len(D.words)


def test_unconverged_domain_blocks_simplicity(schottky_group, origin3):
    D = compute_domain(schottky_group, origin3, len_max=1, stability_window=3)
    assert not D.converged
    with pytest.raises(NotConverged):
        simplicity_check(D)


def test_compute_domain_rejects_bad_lengths(boost_group, origin3):
    with pytest.raises(ValueError):
        compute_domain(boost_group, origin3, len_start=0)
    with pytest.raises(ValueError):
        compute_domain(boost_group, origin3, len_start=4, len_max=2)


def test_section_polygon_of_boost_domain(boost_domain):
    vertices, words = section_polygon(boost_domain.to_report())
    assert np.all(np.abs(vertices[:, 0]) <= np.tanh(0.5) + 1e-7)
    assert {w for w in words if w is not None} == {'a', 'a^-1'}
    assert klein_project(boost_domain.base) == pytest.approx([0.0, 0.0])


@pytest.mark.parametrize('spec, n, expected', [
    (None, 2, None),
    ('k2=0.5', 2, None),
    (None, 3, (3, 0.0)),
    ('k1 = -0.25', 3, (1, -0.25)),
])
def test_parse_plane(spec, n, expected):
    assert parse_plane(spec, n) == expected


def test_parse_plane_errors():
    with pytest.raises(ValueError):
        parse_plane('z=1', 3)
    with pytest.raises(ValueError):
        parse_plane('k4=0', 3)
    with pytest.raises(ValueError):
        parse_plane('k1=1.5', 3)
    with pytest.raises(UnsupportedDimension):
        parse_plane(None, 4)
