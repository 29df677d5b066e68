import itertools
from pathlib import Path

import numpy as np
import pytest
import sympy

from app.complexes.complex import ComplexFace, Morphism, PolyComplex
from app.geometry.isometry import boost
from app.groups.group import GeneratedGroup

FIXTURES_DIR = Path(__file__).parent / 'fixtures'


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def origin3() -> np.ndarray:
    return np.array([1.0, 0.0, 0.0])


@pytest.fixture
def origin4() -> np.ndarray:
    return np.array([1.0, 0.0, 0.0, 0.0])


@pytest.fixture
def boost_group() -> GeneratedGroup:
    """Cyclic group of a boost of length 1 in H²."""
    return GeneratedGroup([('a', boost(1.0, size=3))])


@pytest.fixture
def schottky_group() -> GeneratedGroup:
    """Two boosts of length 3 along perpendicular axes of H²."""
    return GeneratedGroup([('a', boost(3.0, size=3, plane=(0, 1))), ('b', boost(3.0, size=3, plane=(0, 2)))])


def _cube_vertex(signs) -> list:
    return [sympy.Integer(1)] + [sympy.Rational(s, 2) for s in signs]


def build_cube_complex() -> PolyComplex:
    """
    The Klein cube with vertices (1, ±1/2, ±1/2, ±1/2) and all its faces.

    A face is a pattern over {+, -, 0}; 0 marks a free coordinate, so the
    dimension is the number of zeros. Only covering incidences are given.
    """
    faces = []
    patterns = [''.join(p) for p in itertools.product('+-0', repeat=3)]
    for pattern in patterns:
        choices = [(1, -1) if c == '0' else ((1,) if c == '+' else (-1,)) for c in pattern]
        vertices = [_cube_vertex(signs) for signs in itertools.product(*choices)]
        faces.append(ComplexFace(id=f'f{pattern}', dim=pattern.count('0'), exact_rays=sympy.Matrix(vertices)))

    morphisms = []
    for pattern in patterns:
        for i, c in enumerate(pattern):
            if c != '0':
                continue
            for sign in '+-':
                below = pattern[:i] + sign + pattern[i + 1:]
                morphisms.append(Morphism(f'f{below}', f'f{pattern}'))
    return PolyComplex(faces, morphisms)


@pytest.fixture
def cube_complex() -> PolyComplex:
    return build_cube_complex()


def build_book_complex(pages: int) -> PolyComplex:
    """Triangles t0..t{pages-1} sharing the edge 'spine', without geometry."""
    faces = [ComplexFace('p', 0), ComplexFace('q', 0), ComplexFace('spine', 1)]
    morphisms = [Morphism('p', 'spine'), Morphism('q', 'spine')]
    for i in range(pages):
        r, t = f'r{i}', f't{i}'
        faces += [ComplexFace(r, 0), ComplexFace(f'pr{i}', 1), ComplexFace(f'qr{i}', 1), ComplexFace(t, 2)]
        morphisms += [
            Morphism('p', f'pr{i}'), Morphism(r, f'pr{i}'),
            Morphism('q', f'qr{i}'), Morphism(r, f'qr{i}'),
            Morphism('spine', t), Morphism(f'pr{i}', t), Morphism(f'qr{i}', t),
        ]
    return PolyComplex(faces, morphisms, core=['spine'])


@pytest.fixture
def make_book():
    return build_book_complex
