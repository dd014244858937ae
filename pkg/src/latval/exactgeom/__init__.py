"""Exact rational geometry: linear algebra, double description and polytopes."""

from .dd import dd_generators
from .linalg import Rat, integer_kernel, nullspace, primitive, rank, rref, to_rat
from .polytope import (
    AmbientDimTooLarge,
    EmptyFace,
    EmptyInput,
    Face,
    GeometryError,
    NotLatticePolytope,
    Polytope,
    convex_hull,
    face_lattice,
    from_halfspaces,
    intersection,
    lattice_basis_of_span,
    relint_contains,
)

__all__ = [
    "AmbientDimTooLarge", "EmptyFace", "EmptyInput", "Face", "GeometryError",
    "NotLatticePolytope", "Polytope", "Rat", "convex_hull", "dd_generators", "face_lattice",
    "from_halfspaces", "integer_kernel", "intersection", "lattice_basis_of_span", "nullspace",
    "primitive", "rank", "relint_contains", "rref", "to_rat",
]
