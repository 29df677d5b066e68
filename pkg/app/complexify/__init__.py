"""
Projective spans of faces and their parasitic intersections.
"""
from app.complexify.cache import IntersectionCache
from app.complexify.cartan import assumption_cartan_check
from app.complexify.parasitic import (
    ParasiticRecord,
    parasitic_report,
    primary_parasitic,
    saturate,
    secondary_parasitic,
)
from app.complexify.subspace import ProjectiveSubspace, intersect_subspaces, lorentz_annihilator, span_of_face

__all__ = [
    'IntersectionCache',
    'ParasiticRecord',
    'ProjectiveSubspace',
    'assumption_cartan_check',
    'intersect_subspaces',
    'lorentz_annihilator',
    'parasitic_report',
    'primary_parasitic',
    'saturate',
    'secondary_parasitic',
    'span_of_face',
]
