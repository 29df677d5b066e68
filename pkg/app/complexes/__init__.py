"""
Complexes Package

Polyhedral complexes given by faces and incidence morphisms, their nerves,
and the local tiling complexes built around Dirichlet domains.
"""

from app.complexes.complex import ComplexFace, Morphism, PolyComplex, derived_complex, residue, skeleton
from app.complexes.nerve import Nerve, is_simple, is_weakly_simple, nerve
from app.complexes.local import build_local_dirichlet_complex, group_action_on_complex, quotient_check

__all__ = [
    'ComplexFace',
    'Morphism',
    'PolyComplex',
    'derived_complex',
    'residue',
    'skeleton',
    'Nerve',
    'is_simple',
    'is_weakly_simple',
    'nerve',
    'build_local_dirichlet_complex',
    'group_action_on_complex',
    'quotient_check',
]
