"""Lattice polytopes with exact V- and H-representations and face lattices."""

from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import factorial, isqrt, sqrt

from .dd import dd_generators
from .linalg import det, dot, gram_det, integer_kernel, nullspace, primitive, rank, solve, sub, to_rat

MAX_DIM = 6


class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class EmptyInput(GeometryError):
    pass


class AmbientDimTooLarge(GeometryError):
    pass


class NotLatticePolytope(GeometryError):
    pass


class EmptyFace(GeometryError):
    pass


def _affine_rank(points):
    if len(points) <= 1:
        return 0
    p0 = points[0]
    return rank([sub(p, p0) for p in points[1:]])


class Face:
    """A nonempty face of a polytope, identified by the indices of its vertices."""

    def __init__(self, polytope, index, vertex_set, facet_set, dim):
        self.polytope = polytope
        self.index = index
        self.vertex_set = vertex_set
        self.facet_set = facet_set
        self.dim = dim

    def __repr__(self):
        return f"Face(dim={self.dim}, vertices={sorted(self.vertex_set)})"

    def __eq__(self, other):
        return (isinstance(other, Face) and other.polytope is self.polytope
                and other.vertex_set == self.vertex_set)

    def __hash__(self):
        return hash((id(self.polytope), self.vertex_set))

    @property
    def vertices(self):
        return [self.polytope.vertices[i] for i in sorted(self.vertex_set)]

    @cached_property
    def affine_basis(self):
        """Integer lattice basis of Z^d intersected with the direction space of aff(F)."""
        return lattice_basis_of_span([sub(v, self.vertices[0]) for v in self.vertices[1:]],
                                     self.polytope.ambient_dim)

    @cached_property
    def as_polytope(self):
        if self.vertex_set == frozenset(range(len(self.polytope.vertices))):
            return self.polytope
        return convex_hull(self.vertices)

    def contains(self, x):
        return self.polytope.contains(x) and all(
            dot(self.polytope.facets[j][0], x) == self.polytope.facets[j][1] for j in self.facet_set)

    def relint_contains(self, x):
        """True iff x lies in the relative interior of the face."""
        x = [to_rat(c) for c in x]
        P = self.polytope
        if not all(dot(a, x) == b for a, b in P.equalities):
            return False
        for j, (a, b) in enumerate(P.facets):
            s = dot(a, x)
            if j in self.facet_set:
                if s != b:
                    return False
            elif s >= b:
                return False
        return True

    @cached_property
    def barycenter(self):
        vs = self.vertices
        return tuple(Fraction(sum(c), len(vs)) for c in zip(*vs))


def lattice_basis_of_span(vectors, d):
    """Lattice basis of Z^d intersected with the rational span of ``vectors``."""
    vectors = [v for v in vectors if any(v)]
    if not vectors:
        return []
    if rank(vectors) == d:
        return [tuple(int(i == j) for j in range(d)) for i in range(d)]
    perp = nullspace(vectors, d)
    return integer_kernel(perp, d)


class Polytope:
    """A lattice polytope conv(vertices) in Z^d.

    Facets are stored as integer pairs ``(a, b)`` meaning a . x <= b, and the
    affine hull as integer equalities ``(c, e)`` meaning c . x = e.
    """

    def __init__(self, vertices, facets, equalities):
        self.vertices = [tuple(v) for v in vertices]
        self.facets = [(tuple(a), b) for a, b in facets]
        self.equalities = [(tuple(c), e) for c, e in equalities]
        self.ambient_dim = len(self.vertices[0])
        self.dim = self.ambient_dim - len(self.equalities)

    def __repr__(self):
        return f"Polytope(dim={self.dim}, ambient_dim={self.ambient_dim}, vertices={self.vertices})"

    def __eq__(self, other):
        return isinstance(other, Polytope) and sorted(self.vertices) == sorted(other.vertices)

    def __hash__(self):
        return hash(tuple(sorted(self.vertices)))

    @property
    def is_full_dim(self):
        return self.dim == self.ambient_dim

    def contains(self, x):
        x = [to_rat(c) for c in x]
        return (all(dot(c, x) == e for c, e in self.equalities)
                and all(dot(a, x) <= b for a, b in self.facets))

    def relint_contains(self, x):
        return self.top_face.relint_contains(x)

    def translate(self, t):
        t = tuple(int(c) for c in t)
        return Polytope([tuple(a + b for a, b in zip(v, t)) for v in self.vertices],
                        [(a, b + dot(a, t)) for a, b in self.facets],
                        [(c, e + dot(c, t)) for c, e in self.equalities])

    def dilate(self, n):
        n = int(n)
        if n < 1:
            raise ValueError("dilation factor must be positive")
        return Polytope([tuple(n * c for c in v) for v in self.vertices],
                        [(a, n * b) for a, b in self.facets],
                        [(c, n * e) for c, e in self.equalities])

    @cached_property
    def faces(self):
        """All nonempty faces, sorted by dimension then vertex indices."""
        nv = len(self.vertices)
        facet_vs = [frozenset(i for i, v in enumerate(self.vertices) if dot(a, v) == b)
                    for a, b in self.facets]
        full = frozenset(range(nv))
        found = {full}
        frontier = [full]
        while frontier:
            nxt = []
            for s in frontier:
                for fv in facet_vs:
                    t = s & fv
                    if t and t != s and t not in found:
                        found.add(t)
                        nxt.append(t)
            frontier = nxt
        records = []
        for s in found:
            pts = [self.vertices[i] for i in sorted(s)]
            fs = frozenset(j for j, fv in enumerate(facet_vs) if s <= fv)
            records.append((_affine_rank(pts), tuple(sorted(s)), s, fs))
        records.sort(key=lambda r: (r[0], r[1]))
        return [Face(self, i, s, fs, dim) for i, (dim, _, s, fs) in enumerate(records)]

    def faces_of_dim(self, k):
        return [F for F in self.faces if F.dim == k]

    @property
    def face_lattice(self):
        return face_lattice(self)

    @cached_property
    def top_face(self):
        return self.faces[-1]

    @cached_property
    def f_vector(self):
        return tuple(len(self.faces_of_dim(k)) for k in range(self.dim + 1))

    def subfaces(self, F):
        """Faces of P contained in F (including F)."""
        return [G for G in self.faces if G.vertex_set <= F.vertex_set]

    def face_by_vertices(self, vertex_set):
        vertex_set = frozenset(vertex_set)
        for F in self.faces:
            if F.vertex_set == vertex_set:
                return F
        raise KeyError("not a face")

    @cached_property
    def frame(self):
        """Intrinsic lattice frame ``(origin, basis, gram)`` of aff(P).

        Points of aff(P) and Z^d are exactly origin + c . basis with c in Z^k.
        ``gram`` is the integer det(B B^T); det(P) = sqrt(gram).
        """
        origin = self.vertices[0]
        basis = self.top_face.affine_basis
        return origin, basis, gram_det(basis)

    def intrinsic_coords(self, x):
        """Integer coordinates of a lattice point of aff(P) in the intrinsic frame."""
        origin, basis, _ = self.frame
        k = len(basis)
        if k == 0:
            return ()
        diff = sub(x, origin)
        g = [[dot(u, v) for v in basis] for u in basis]
        rhs = [dot(diff, u) for u in basis]
        c = solve(g, rhs)
        return tuple(int(ci) for ci in c)

    @cached_property
    def intrinsic_vertices(self):
        return [self.intrinsic_coords(v) for v in self.vertices]

    @cached_property
    def intrinsic_facets(self):
        """Facets rewritten in intrinsic coordinates as (a B^T, b - a . origin)."""
        origin, basis, _ = self.frame
        return [(tuple(dot(a, u) for u in basis), b - dot(a, origin)) for a, b in self.facets]

    @cached_property
    def lattice_det_squared(self):
        return self.frame[2]

    @cached_property
    def lattice_det(self):
        g = self.lattice_det_squared
        r = isqrt(g)
        return r if r * r == g else sqrt(g)

    def _triangulate(self, F):
        """Pulling triangulation of face F as tuples of vertex indices."""
        if F.dim == 0:
            return [tuple(sorted(F.vertex_set))]
        v = min(F.vertex_set)
        out = []
        for G in self.faces:
            if G.dim == F.dim - 1 and G.vertex_set < F.vertex_set and v not in G.vertex_set:
                for s in self._triangulate(G):
                    out.append((v,) + s)
        return out

    @cached_property
    def relative_volume(self):
        """Volume of P in its own lattice normalization, |P| / det(P), exact."""
        if self.dim == 0:
            return Fraction(1)
        cs = self.intrinsic_vertices
        total = 0
        for simplex in self._triangulate(self.top_face):
            c0 = cs[simplex[0]]
            total += abs(det([list(sub(cs[i], c0)) for i in simplex[1:]]))
        return Fraction(total, factorial(self.dim))

    @cached_property
    def volume(self):
        """Intrinsic Euclidean volume |P|; exact Fraction when det(P) is an integer."""
        return self.relative_volume * self.lattice_det

    # construction helpers
    @classmethod
    def from_json(cls, obj):
        from ..io import polytope_from_obj
        return polytope_from_obj(obj)

    def to_json(self):
        return {"dim": self.ambient_dim, "vertices": [list(v) for v in self.vertices]}


def face_lattice(P):
    """Faces grouped by dimension: a list whose j-th entry holds the j-faces."""
    return [P.faces_of_dim(j) for j in range(P.dim + 1)]


def relint_contains(F, x):
    return F.relint_contains(x)


def convex_hull(points):
    """Convex hull of integer points, with facets, equalities and vertices."""
    pts = [tuple(int(c) if not isinstance(c, Fraction) else c for c in p) for p in points]
    if not pts:
        raise EmptyInput("convex_hull needs at least one point")
    d = len(pts[0])
    if any(len(p) != d for p in pts):
        raise GeometryError("points have inconsistent dimensions")
    if d == 0:
        raise GeometryError("ambient dimension must be positive")
    if d > MAX_DIM:
        raise AmbientDimTooLarge(f"ambient dimension {d} exceeds the supported maximum {MAX_DIM}")
    for p in pts:
        for c in p:
            if isinstance(c, Fraction) and c.denominator != 1:
                raise NotLatticePolytope(f"point {p} is not a lattice point")
    pts = sorted(set(tuple(int(c) for c in p) for p in pts))
    return _hull_from_points(pts)


def _hull_from_points(pts):
    d = len(pts[0])
    homog = [(1,) + p for p in pts]
    rays, lin = dd_generators(homog, d + 1)
    facets = []
    for a in rays:
        normal = tuple(-x for x in a[1:])
        facets.append((normal, a[0]))
    equalities = [(tuple(l[1:]), -l[0]) for l in lin]
    # drop inequalities that are tight nowhere (the empty face of a point)
    facets = [(a, b) for a, b in facets if any(dot(a, p) == b for p in pts)]
    eq_rows = [c for c, _ in equalities]
    vertices = []
    for p in pts:
        tight = [a for a, b in facets if dot(a, p) == b]
        if rank(tight + eq_rows, d) == d:
            vertices.append(p)
    facets = sorted(set(facets))
    return Polytope(vertices, facets, equalities)


def from_halfspaces(ineqs, equalities=(), ambient_dim=None, require_lattice=True):
    """Polytope {x : a . x <= b, c . x = e}; returns None when empty.

    Raises ``GeometryError`` when the set is unbounded and
    ``NotLatticePolytope`` when a vertex is not integral.
    """
    ineqs = [(tuple(to_rat(x) for x in a), to_rat(b)) for a, b in ineqs]
    equalities = [(tuple(to_rat(x) for x in c), to_rat(e)) for c, e in equalities]
    if ambient_dim is None:
        ambient_dim = len((ineqs or equalities)[0][0])
    d = ambient_dim
    rows = [(Fraction(1),) + (Fraction(0),) * d]
    rows += [(b,) + tuple(-x for x in a) for a, b in ineqs]
    for c, e in equalities:
        rows.append((-e,) + c)
        rows.append((e,) + tuple(-x for x in c))
    rays, lin = dd_generators(rows, d + 1)
    if lin:
        raise GeometryError("halfspace system is unbounded")
    verts = []
    for r in rays:
        if r[0] == 0:
            raise GeometryError("halfspace system is unbounded")
        v = tuple(Fraction(x, r[0]) for x in r[1:])
        if require_lattice and any(c.denominator != 1 for c in v):
            raise NotLatticePolytope(f"vertex {v} is not integral")
        verts.append(v)
    if not verts:
        return None
    if require_lattice:
        return convex_hull([tuple(int(c) for c in v) for v in verts])
    return verts


def intersection(P, Q):
    """P intersected with Q as a lattice polytope (None if empty)."""
    ineqs = [(a, b) for a, b in P.facets] + [(a, b) for a, b in Q.facets]
    eqs = list(P.equalities) + list(Q.equalities)
    return from_halfspaces(ineqs, eqs, P.ambient_dim)


def is_simplex(P):
    return len(P.vertices) == P.dim + 1


def simplex_faces(P):
    """Vertex-index subsets of a simplex; matches the face lattice."""
    n = len(P.vertices)
    return [frozenset(c) for k in range(1, n + 1) for c in combinations(range(n), k)]


__all__ = [
    "AmbientDimTooLarge", "EmptyFace", "EmptyInput", "Face", "GeometryError",
    "NotLatticePolytope", "Polytope", "convex_hull", "face_lattice", "from_halfspaces",
    "intersection", "lattice_basis_of_span", "primitive", "relint_contains",
]
