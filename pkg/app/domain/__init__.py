from app.domain.cone import ConePolyhedron, face_lattice, face_meets_hyperbolic
from app.domain.dirichlet import DirichletDomain, compute_domain

__all__ = ['ConePolyhedron', 'face_lattice', 'face_meets_hyperbolic', 'DirichletDomain', 'compute_domain']
