"""
Paperlab Package

Reproducible experiments on Dirichlet tilings: the singular bisector triple
of a rotating loxodromic, the boundary geodesic of ⟨A, R⟩, cyclic and
glide-reflection domains, the genericity scan and Klein-disk pictures.
"""

from app.paperlab.cyclic import (
    cyclic_simplicity_experiment,
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
from app.paperlab.example2 import example2_verify
from app.paperlab.genericity import genericity_scan

__all__ = [
    'cyclic_simplicity_experiment',
    'glide_domain_verify',
    'random_glide_reflection',
    'random_loxodromic',
    'Example1Config',
    'example1_b_matrix_null',
    'example1_det_gram',
    'example1_det_gram_oracle',
    'example1_matrices',
    'example1_mu_nu',
    'example1_scan',
    'reverify_example1',
    'example2_verify',
    'genericity_scan',
]
