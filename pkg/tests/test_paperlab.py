import numpy as np
import pytest
from pydantic import ValidationError

from app.errors import DegenerateBasePoint, NotFutureTimelike, NotLoxodromic
from app.geometry.isometry import boost, make_cartan
from app.geometry.lorentz import point_from_klein
from app.groups.group import GeneratedGroup, enumerate_elements
from app.paperlab.cyclic import (
    GLIDE_WORDS,
    cyclic_simplicity_experiment,
    distance_to_axis,
    glide_domain_verify,
    random_glide_reflection,
    random_loxodromic,
)
from app.paperlab.example1 import (
    Example1Config,
    example1_b_matrix_null,
    example1_det_gram,
    example1_det_gram_oracle,
    example1_matrices,
    example1_mu_nu,
    example1_scan,
    reverify_example1,
)
from app.paperlab.example2 import example2_group, example2_verify
from app.paperlab.genericity import CyclicScreen, genericity_scan

X_NULL = [1.0, 1.0, 1.0, 0.0]


# -----------------------------------------------------------------------------
# Singular triple of a rotating loxodromic
# -----------------------------------------------------------------------------

def test_mu_nu():
    mu, nu = example1_mu_nu(2.0)
    assert mu == pytest.approx(3.375)
    assert nu == pytest.approx(2.625)


def test_det_gram_closed_form():
    assert example1_det_gram(2.0, X_NULL) == pytest.approx(11.109375)


@pytest.mark.parametrize('lam', [1.2, 2.0, 3.5])
@pytest.mark.parametrize('x', [X_NULL, [2.0, 0.5, 0.3, 0.4], [0.7, 3.0, -0.5, 1.2]])
def test_det_gram_matches_gram_matrix(lam, x):
    assert example1_det_gram(lam, x) == pytest.approx(example1_det_gram_oracle(lam, x), rel=1e-8, abs=1e-9)


def test_b_matrix_is_rank_deficient():
    B = example1_b_matrix_null(2.0, [2.0, 0.5, 0.3, 0.4])
    assert B.shape == (4, 3)
    assert np.linalg.matrix_rank(B) == 2


def test_triple_relation():
    A, A_inv, A2, A3 = example1_matrices(2.0)
    assert np.allclose(A_inv.matrix @ A3.matrix, A2.matrix)
    assert np.allclose(A.matrix @ A_inv.matrix, np.eye(4))


def test_example1_input_errors():
    with pytest.raises(ValueError):
        example1_mu_nu(1.0)
    with pytest.raises(NotFutureTimelike):
        example1_det_gram(2.0, [1.0, 1.0, 2.0, 0.0])
    with pytest.raises(ValueError):
        example1_scan(2.0, budget=0)
    with pytest.raises(ValueError):
        example1_scan(2.0, slices=['diagonal'])
    with pytest.raises(ValidationError):
        Example1Config(lam=0.5)


@pytest.mark.slow
@pytest.mark.parametrize('lam', [1.2, 1.8, 2.4])
def test_example1_scan_finds_certified_witnesses(lam):
    report = example1_scan(lam, budget=2000, seed=3)
    assert report.hits > 0
    assert report.witnesses
    assert all(w.certificate['certified'] for w in report.witnesses)
    assert reverify_example1(report) == []


def test_example1_scan_is_reproducible():
    first = example1_scan(2.0, budget=300, seed=11)
    second = example1_scan(2.0, budget=300, seed=11)
    assert first.hits == second.hits
    assert [w.x for w in first.witnesses] == [w.x for w in second.witnesses]
    assert first.trials == 600


def test_reverify_rejects_foreign_reports():
    report = example1_scan(2.0, budget=50, seed=1)
    report.kind = 'genericity'
    assert reverify_example1(report)


# -----------------------------------------------------------------------------
# Boundary geodesic of ⟨A, R⟩
# -----------------------------------------------------------------------------

def test_example2_verify():
    report = example2_verify()
    assert report.passed
    assert report.contributor_words == ['A', 'A^-1', 'R']
    assert report.intersection_count == 3
    assert report.weakly_simple is False
    assert len(report.geodesic_samples) == 9


def test_example2_rejects_base_points_on_the_axis():
    with pytest.raises(DegenerateBasePoint):
        example2_verify(x=boost(0.5) @ np.array([1.0, 0.0, 0.0, 0.0]))


# -----------------------------------------------------------------------------
# Genericity
# -----------------------------------------------------------------------------

def test_cyclic_screen():
    elements = [e for e in enumerate_elements(example2_group(), 2) if not e.is_identity]
    by_word = {e.word: e.matrix for e in elements}
    screen = CyclicScreen(elements, max_power=6)
    assert screen.is_cyclic([by_word['A'], by_word['A*A'], by_word['A^-1']])
    assert not screen.is_cyclic([by_word['A'], by_word['R'], by_word['A*R']])


def test_genericity_of_free_group(schottky_group):
    report = genericity_scan(schottky_group, max_len=2, triples_budget=40, seed=5, cartan_points=10)
    assert report.trials == 40
    assert report.hits == 0
    assert report.details['full_rank_fraction'] == 1.0
    assert report.details['cartan_passed']


def test_genericity_cartan_clause(origin3):
    G = GeneratedGroup([make_cartan(origin3, label='J'), ('a', boost(2.0, size=3))])
    report = genericity_scan(G, max_len=2, triples_budget=20, seed=2, cartan_points=20)
    assert report.details['class_k_passed']
    assert report.details['cartan_passed']
    assert report.details['cartan']


def test_genericity_of_abelian_group_finds_deficient_triples():
    report = genericity_scan(example2_group(), max_len=2, triples_budget=50, seed=0, cartan_points=10)
    assert report.hits > 0
    assert report.details['cyclic_screened'] > 0
    assert not report.details['class_k_passed']


def test_genericity_budgets():
    with pytest.raises(ValueError):
        genericity_scan(example2_group(), triples_budget=0)


# -----------------------------------------------------------------------------
# Cyclic and glide-reflection domains
# -----------------------------------------------------------------------------

def test_distance_to_axis(origin3):
    e_plus, e_minus = np.array([1.0, 1.0, 0.0]), np.array([1.0, -1.0, 0.0])
    assert distance_to_axis(origin3, e_plus, e_minus) == pytest.approx(0.0, abs=1e-12)
    y = point_from_klein([0.0, np.tanh(0.7)])
    assert distance_to_axis(y, e_plus, e_minus) == pytest.approx(0.7)


def test_cyclic_experiment_needs_loxodromic():
    with pytest.raises(NotLoxodromic):
        cyclic_simplicity_experiment(np.diag([1.0, 1.0, -1.0, -1.0]), point_from_klein([0.2, 0.1, 0.0]))


@pytest.mark.slow
def test_random_cyclic_tiling_is_simple(rng, origin4):
    A = random_loxodromic(rng, n=3)
    report = cyclic_simplicity_experiment(A, origin4)
    assert report.converged
    assert report.simple
    assert report.failures == []
    assert report.facet_count >= 2


@pytest.mark.slow
def test_glide_reflection_domain(rng, origin4):
    A = random_glide_reflection(rng)
    report = glide_domain_verify(A, origin4)
    assert report.converged
    assert report.checks['perpendicular']
    assert report.checks['four_facets']
    assert set(report.facet_words) == GLIDE_WORDS
