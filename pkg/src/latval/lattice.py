"""Lattice points of dilates and lattice determinants of faces.

Points are enumerated in the intrinsic lattice frame of aff(P): a box of
integer coordinates is filtered by the facet inequalities, and the set of
tight facets of each point identifies the face whose relative interior
contains it.
"""

from dataclasses import dataclass, field
from math import isqrt, sqrt

import numpy as np

from .exactgeom import EmptyFace, Face, Polytope

# numpy int64 is exact while the bounding box stays far below 2**62
_INT_LIMIT = 2 ** 40


@dataclass(frozen=True)
class LatticeDet:
    """det(F) stored through its exact square, the Gram determinant."""

    squared: int

    @property
    def value(self):
        r = isqrt(self.squared)
        return r if r * r == self.squared else sqrt(self.squared)

    def __float__(self):
        return float(self.value)


@dataclass
class LatticePointSet:
    """Lattice points of nP, each tagged with the face of P whose dilate holds it in its relint."""

    polytope: Polytope
    dilate: int
    points: np.ndarray
    face_index: np.ndarray
    counts: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.points)

    @property
    def by_face(self):
        out = {}
        for F in self.polytope.faces:
            out[F] = [tuple(int(c) for c in p) for p in self.points[self.face_index == F.index]]
        return out

    def count_by_dim(self):
        out = {}
        for F in self.polytope.faces:
            out[F.dim] = out.get(F.dim, 0) + self.counts.get(F.index, 0)
        return out

    @property
    def interior_count(self):
        return self.counts.get(self.polytope.top_face.index, 0)


def lattice_determinant(F):
    """det(F): covolume of Z^d intersected with the direction space of aff(F)."""
    if isinstance(F, Polytope):
        return LatticeDet(F.lattice_det_squared)
    if F is None or not F.vertex_set:
        raise EmptyFace("lattice determinant of the empty face")
    basis = F.affine_basis
    if not basis:
        return LatticeDet(1)
    from .exactgeom.linalg import gram_det
    return LatticeDet(gram_det(basis))


def _grid(lo, hi):
    axes = [np.arange(a, b + 1, dtype=np.int64) for a, b in zip(lo, hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _tight_face_map(P):
    return {F.facet_set: F.index for F in P.faces}


def enumerate_points(P, n, with_points=True):
    """All lattice points of nP, tagged by face; n = 0 gives the single origin point."""
    n = int(n)
    if n < 0:
        raise ValueError("dilation factor must be non-negative")
    d = P.ambient_dim
    if n == 0:
        pts = np.zeros((1, d), dtype=np.int64)
        idx = np.array([P.top_face.index if P.dim == 0 else -1])
        # the zero dilate is a single point; it is its own relative interior
        return LatticePointSet(P, 0, pts, idx, {int(idx[0]): 1})
    origin, basis, _ = P.frame
    k = len(basis)
    cs = P.intrinsic_vertices
    if k == 0:
        pts = np.array([[n * c for c in origin]], dtype=np.int64)
        return LatticePointSet(P, n, pts, np.array([P.top_face.index]), {P.top_face.index: 1})
    lo = [n * min(c[i] for c in cs) for i in range(k)]
    hi = [n * max(c[i] for c in cs) for i in range(k)]
    if max(abs(x) for x in lo + hi) > _INT_LIMIT:
        raise OverflowError("dilate too large for exact enumeration")
    grid = _grid(lo, hi)
    fac = P.intrinsic_facets
    A = np.array([a for a, _ in fac], dtype=np.int64).reshape(len(fac), k)
    b = np.array([n * bb for _, bb in fac], dtype=np.int64)
    s = grid @ A.T
    inside = np.all(s <= b, axis=1)
    grid, s = grid[inside], s[inside]
    tight = s == b
    fmap = _tight_face_map(P)
    uniq, inv = np.unique(tight, axis=0, return_inverse=True)
    inv = np.asarray(inv).ravel()
    codes = np.array([fmap[frozenset(np.flatnonzero(row).tolist())] for row in uniq], dtype=np.int64)
    face_idx = codes[inv] if len(grid) else np.zeros(0, dtype=np.int64)
    counts = {}
    for f, c in zip(*np.unique(face_idx, return_counts=True)):
        counts[int(f)] = int(c)
    if with_points:
        B = np.array(basis, dtype=np.int64)
        pts = grid @ B + n * np.array(origin, dtype=np.int64)
        order = np.lexsort(pts.T[::-1])
        pts, face_idx = pts[order], face_idx[order]
    else:
        pts = np.zeros((0, d), dtype=np.int64)
    return LatticePointSet(P, n, pts, face_idx, counts)


def relint_counts(P, n):
    """Map face index -> number of lattice points in relint(nF)."""
    return enumerate_points(P, n, with_points=False).counts


def count_points(P, n=1):
    return sum(relint_counts(P, n).values())


def interior_count(P, n=1):
    """Lattice points in relint(nP), computed by a separate strict-inequality filter."""
    n = int(n)
    origin, basis, _ = P.frame
    k = len(basis)
    if n == 0 or k == 0:
        return 1
    cs = P.intrinsic_vertices
    lo = [n * min(c[i] for c in cs) for i in range(k)]
    hi = [n * max(c[i] for c in cs) for i in range(k)]
    grid = _grid(lo, hi)
    fac = P.intrinsic_facets
    A = np.array([a for a, _ in fac], dtype=np.int64).reshape(len(fac), k)
    b = np.array([n * bb for _, bb in fac], dtype=np.int64)
    return int(np.count_nonzero(np.all(grid @ A.T < b, axis=1)))


__all__ = ["LatticeDet", "LatticePointSet", "count_points", "enumerate_points",
           "interior_count", "lattice_determinant", "relint_counts", "Face"]
