import networkx as nx
import numpy as np
import pytest

from app.complexes.complex import (
    ComplexFace,
    Morphism,
    PolyComplex,
    derived_complex,
    difference_complex,
    face_poset,
    residue,
    skeleton,
)
from app.complexes.local import (
    build_local_dirichlet_complex,
    cone_contains,
    group_action_on_complex,
    quotient_check,
)
from app.complexes.nerve import is_simple, is_weakly_simple, nerve
from app.domain.dirichlet import compute_domain
from app.errors import AxiomViolation, ElementDoesNotPreserveComplex, NotConverged, NotPure
from app.geometry.isometry import boost
from app.schema.validation import load_complex

SWAP = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]])


@pytest.fixture
def two_triangles(fixtures_dir):
    return load_complex(fixtures_dir / 'two_triangles.json')


def test_cube_closure(cube_complex):
    assert cube_complex.n == 3
    assert cube_complex.facets == ['f000']
    assert len(cube_complex) == 27
    # every incidence of the face lattice, not only the covering ones
    assert len(cube_complex.morphisms) == 98
    assert cube_complex.incident('f+++', 'f000')
    assert not cube_complex.incident('f+++', 'f---')
    assert cube_complex.is_pure()


def test_cube_constructions(cube_complex):
    assert len(skeleton(cube_complex, 1)) == 20
    assert len(derived_complex(cube_complex)) == 19
    assert len(residue(cube_complex, 'f+++')) == 8
    assert len(residue(cube_complex, 'f000')) == 1
    with pytest.raises(KeyError):
        residue(cube_complex, 'nope')


def test_face_poset(cube_complex):
    poset = face_poset(cube_complex)
    assert poset.number_of_nodes() == 27
    assert poset.number_of_edges() == 98
    assert nx.is_directed_acyclic_graph(poset)
    assert poset.nodes['f+0-']['dim'] == 1


def test_duplicate_face_ids():
    with pytest.raises(AxiomViolation):
        PolyComplex([ComplexFace('v', 0), ComplexFace('v', 0)])


def test_morphisms_must_lower_dimension():
    with pytest.raises(AxiomViolation):
        PolyComplex([ComplexFace('e', 1), ComplexFace('f', 1)], [Morphism('e', 'f')])
    with pytest.raises(AxiomViolation):
        PolyComplex([ComplexFace('v', 0)], [Morphism('v', 'w')])


def test_conflicting_composites(fixtures_dir):
    with pytest.raises(AxiomViolation) as exc_info:
        load_complex(fixtures_dir / 'axiom2_violation.json')
    assert ('v', 't') in exc_info.value.pairs


def test_nerve_of_two_triangles(two_triangles):
    N = nerve(two_triangles)
    assert N.vertices == ['T1', 'T2']
    assert N.dim == 1
    assert N.duals[frozenset({'T1', 'T2'})] == ['e23']


def test_nerve_needs_pure_complex():
    C = PolyComplex([ComplexFace('v', 0), ComplexFace('e', 1), ComplexFace('t', 2)], [Morphism('v', 'e')])
    with pytest.raises(NotPure):
        nerve(C)


def test_two_triangles_are_simple(two_triangles):
    assert is_simple(two_triangles)
    assert is_weakly_simple(two_triangles)


@pytest.mark.parametrize('pages, simple', [(2, True), (3, False)])
def test_books(make_book, pages, simple):
    book = make_book(pages)
    assert is_simple(book) is simple
    assert is_weakly_simple(book) is simple


def test_cone_contains():
    rays = np.array([[1.0, 1.0, 0.0], [1.0, -1.0, 0.0]])
    assert cone_contains(rays, None, np.array([[1.0, 0.0, 0.0]]), 1e-9)
    assert not cone_contains(rays, None, np.array([[1.0, 0.0, 0.5]]), 1e-9)
    assert cone_contains(rays, np.array([[0.0, 0.0, 1.0]]), np.array([[1.0, 0.0, -0.5]]), 1e-9)


def test_swap_action_on_two_triangles(two_triangles):
    action = group_action_on_complex(two_triangles, [SWAP])
    table = action.table['g0']
    assert table['v2'] == 'v3'
    assert table['e12'] == 'e13'
    assert table['T1'] == 'T1'
    report = quotient_check(two_triangles, action)
    assert not report.valid
    assert not report.free_on_facets
    # SWAP fixes T1 and moves v2 onto v3, both vertices of T1
    assert {'element': 'g0', 'face': 'v2', 'image': 'v3', 'coface': 'T1'} in report.violations
    assert {'element': 'g0', 'face': 'e12', 'image': 'e13', 'coface': 'T1'} in report.violations
    assert not any(v['coface'] == 'T2' and v['face'] == 'e23' for v in report.violations)


def test_strict_action_rejects_escaping_faces(two_triangles):
    with pytest.raises(ElementDoesNotPreserveComplex):
        group_action_on_complex(two_triangles, [boost(1.0, size=3)], strict=True)


def test_local_complex_around_boost_domain(boost_group, origin3):
    D = compute_domain(boost_group, origin3, len_max=6)
    local = build_local_dirichlet_complex(D, boost_group, radius_words=2)
    assert local.n == 2
    assert len(local.core) == 3
    assert is_simple(local)
    assert local.is_pure()

    a = D.contributor('a').element.matrix
    report = quotient_check(local, group_action_on_complex(local, [a @ a]))
    assert report.valid
    assert report.free_on_facets


def test_generator_moving_a_wall_within_its_tile_breaks_the_quotient(boost_group, origin3):
    D = compute_domain(boost_group, origin3, len_max=6)
    local = build_local_dirichlet_complex(D, boost_group, radius_words=2)
    report = quotient_check(local, group_action_on_complex(local, [D.contributor('a').element]))
    assert not report.valid
    assert report.free_on_facets
    assert all(local.faces[v['face']].dim == 1 and local.faces[v['coface']].dim == 2 for v in report.violations)


def test_local_complex_needs_convergence(schottky_group, origin3):
    D = compute_domain(schottky_group, origin3, len_max=1, stability_window=3)
    with pytest.raises(NotConverged):
        build_local_dirichlet_complex(D, schottky_group)


def test_difference_complex_drops_exactly_the_removed_faces(cube_complex):
    vertices = skeleton(cube_complex, 0)
    rest = difference_complex(cube_complex, vertices)
    assert len(rest) == 19
    assert not any(fid in rest for fid in vertices.faces)
    assert all(rest.faces[s].dim > 0 for s, _ in rest.morphisms)
