"""
Geometry Package

Lorentzian linear algebra, isometries of the hyperboloid model and the
bisectors and rank maps built from them.
"""

from app.geometry.lorentz import LorentzVec, minkowski_dot, normalize_to_H, hyperbolic_distance
from app.geometry.isometry import Isometry, classify, validate
from app.geometry.bisector import HalfSpace, Hyperplane, bisector, dirichlet_halfspace

__all__ = [
    'LorentzVec',
    'minkowski_dot',
    'normalize_to_H',
    'hyperbolic_distance',
    'Isometry',
    'classify',
    'validate',
    'HalfSpace',
    'Hyperplane',
    'bisector',
    'dirichlet_halfspace',
]
