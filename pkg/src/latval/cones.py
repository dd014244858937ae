"""Polyhedral cones: double-description conversions, faces, polarity, Moreau projection.

A cone C is stored in both forms. The generator form is a lineality basis L
plus extreme rays lying in L^perp (so rays are canonical). The halfspace
form is a set of facet normals ``a`` with a . x <= 0 plus equalities
``c . x = 0`` cutting out lin C.
"""

from fractions import Fraction
from functools import cached_property

import numpy as np

from .exactgeom import GeometryError
from .exactgeom.dd import dd_generators
from .exactgeom.linalg import dot, nullspace, primitive, rank, rref, solve, to_rat


class DegenerateProjection(ArithmeticError):
    """The projection lies on the relative boundary of a face (a measure-zero event)."""


def _canon_subspace(vectors, d):
    """Canonical integer basis (primitive rows of the RREF) of a span."""
    vectors = [v for v in vectors if any(v)]
    if not vectors:
        return ()
    red, _ = rref(vectors, d)
    return tuple(primitive(r) for r in red)


class ConeFace:
    """A face of a cone: its extreme rays, the facets containing it and its dimension."""

    def __init__(self, cone, index, ray_set, facet_set, dim):
        self.cone = cone
        self.index = index
        self.ray_set = ray_set
        self.facet_set = facet_set
        self.dim = dim

    def __repr__(self):
        return f"ConeFace(dim={self.dim}, rays={sorted(self.ray_set)})"

    @property
    def rays(self):
        return [self.cone.rays[i] for i in sorted(self.ray_set)]

    @cached_property
    def as_cone(self):
        return Cone.from_generators(self.rays, self.cone.lineality, self.cone.ambient_dim)

    @cached_property
    def normal_cone(self):
        """N_F(C): positive hull of the facet normals at F plus the orthogonal complement of lin C."""
        C = self.cone
        return Cone.from_generators([C.facets[j] for j in sorted(self.facet_set)],
                                    C.equalities, C.ambient_dim)

    def relint_contains(self, x):
        C = self.cone
        x = [to_rat(c) for c in x]
        if not all(dot(e, x) == 0 for e in C.equalities):
            return False
        for j, a in enumerate(C.facets):
            s = dot(a, x)
            if j in self.facet_set:
                if s != 0:
                    return False
            elif s >= 0:
                return False
        return True


class Cone:
    """Polyhedral cone in R^d, immutable after construction."""

    def __init__(self, ambient_dim, rays, lineality, facets, equalities):
        self.ambient_dim = int(ambient_dim)
        self.rays = tuple(tuple(r) for r in rays)
        self.lineality = _canon_subspace(lineality, self.ambient_dim)
        self.facets = tuple(tuple(a) for a in facets)
        self.equalities = _canon_subspace(equalities, self.ambient_dim)

    # construction
    @classmethod
    def from_generators(cls, generators, lineality=(), ambient_dim=None):
        gens = [tuple(to_rat(x) for x in g) for g in generators]
        lin = [tuple(to_rat(x) for x in g) for g in lineality]
        if ambient_dim is None:
            if not gens and not lin:
                raise GeometryError("ambient dimension required for an empty generator list")
            ambient_dim = len((gens or lin)[0])
        d = ambient_dim
        rows = [g for g in gens if any(g)] + lin + [tuple(-x for x in v) for v in lin]
        if not rows:
            return cls.zero(d)
        # dual cone {a : a . g >= 0}; its rays are the negated facet normals
        drays, dlin = dd_generators(rows, d)
        facets = [tuple(-x for x in a) for a in drays]
        return cls._from_h(facets, dlin, d)

    @classmethod
    def from_inequalities(cls, facets, equalities=(), ambient_dim=None):
        """The cone {x : a . x <= 0 for a in facets, c . x = 0 for c in equalities}."""
        facets = [tuple(to_rat(x) for x in a) for a in facets]
        equalities = [tuple(to_rat(x) for x in c) for c in equalities]
        if ambient_dim is None:
            ambient_dim = len((facets or equalities)[0])
        d = ambient_dim
        rows = [tuple(-x for x in a) for a in facets]
        rows += equalities + [tuple(-x for x in c) for c in equalities]
        rays, lin = dd_generators(rows, d)
        return cls.from_generators(rays, lin, d)

    @classmethod
    def _from_h(cls, facets, equalities, d):
        rows = [tuple(-x for x in a) for a in facets]
        rows += [tuple(c) for c in equalities] + [tuple(-x for x in c) for c in equalities]
        rays, lin = dd_generators(rows, d)
        facets = sorted(set(primitive(a) for a in facets if any(a)))
        # keep only irredundant facet normals: each must be tight on a face of codim 1
        eqs = _canon_subspace(equalities, d)
        dim = d - len(eqs)
        keep = []
        for a in facets:
            tight = [r for r in rays if dot(a, r) == 0]
            if rank(tight + [list(v) for v in lin], d) == dim - 1 and any(dot(a, r) != 0 for r in rays):
                keep.append(a)
        return cls(d, rays, lin, keep, eqs)

    @classmethod
    def zero(cls, d):
        return cls(d, (), (), (), [tuple(int(i == j) for j in range(d)) for i in range(d)])

    @classmethod
    def full(cls, d):
        return cls(d, (), [tuple(int(i == j) for j in range(d)) for i in range(d)], (), ())

    @classmethod
    def subspace(cls, basis, d=None):
        d = d or len(basis[0])
        return cls.from_generators((), basis, d)

    # basic properties
    @property
    def lineality_dim(self):
        return len(self.lineality)

    @property
    def dim(self):
        return self.ambient_dim - len(self.equalities)

    @property
    def generators(self):
        """Generators of C as a positive hull: rays plus both signs of the lineality basis."""
        return list(self.rays) + list(self.lineality) + [tuple(-x for x in v) for v in self.lineality]

    @property
    def facet_normals(self):
        return list(self.facets)

    @property
    def is_pointed(self):
        return self.lineality_dim == 0

    @property
    def is_linear_subspace(self):
        return not self.rays

    @property
    def is_zero(self):
        return self.dim == 0

    @property
    def is_full(self):
        return self.lineality_dim == self.ambient_dim

    def key(self):
        return (self.ambient_dim, tuple(sorted(self.rays)), self.lineality)

    def __eq__(self, other):
        return isinstance(other, Cone) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return (f"Cone(d={self.ambient_dim}, dim={self.dim}, rays={list(self.rays)}, "
                f"lineality={list(self.lineality)})")

    def contains(self, x):
        x = [to_rat(c) for c in x]
        return all(dot(e, x) == 0 for e in self.equalities) and all(dot(a, x) <= 0 for a in self.facets)

    def contains_cone(self, other):
        return all(self.contains(g) for g in other.generators)

    def polar(self):
        """C° = {v : <w, v> <= 0 for all w in C}."""
        return Cone.from_generators(self.facets, self.equalities, self.ambient_dim)

    def intersect(self, other):
        return Cone.from_inequalities(list(self.facets) + list(other.facets),
                                      list(self.equalities) + list(other.equalities),
                                      self.ambient_dim)

    def embed(self, extra=1):
        """The same cone inside R^(d+extra), padding coordinates with zeros."""
        pad = (0,) * extra
        return Cone.from_generators([tuple(g) + pad for g in self.rays],
                                    [tuple(v) + pad for v in self.lineality],
                                    self.ambient_dim + extra)

    def pointed_part(self):
        """C intersected with the orthogonal complement of its lineality space."""
        return Cone.from_generators(self.rays, (), self.ambient_dim)

    # faces
    @cached_property
    def faces(self):
        """All faces, sorted by dimension; the lineality space is the minimal face."""
        nr = len(self.rays)
        lin_rank = self.lineality_dim
        if not self.facets:
            return [ConeFace(self, 0, frozenset(range(nr)), frozenset(), self.dim)]
        ray_sets = [frozenset(i for i, r in enumerate(self.rays) if dot(a, r) == 0) for a in self.facets]
        full = frozenset(range(nr))
        found = {full}
        frontier = [full]
        while frontier:
            nxt = []
            for s in frontier:
                for rs in ray_sets:
                    t = s & rs
                    if t != s and t not in found:
                        found.add(t)
                        nxt.append(t)
            frontier = nxt
        records = []
        for s in found:
            rays = [self.rays[i] for i in sorted(s)]
            dim = lin_rank + (rank(rays) if rays else 0)
            fs = frozenset(j for j, rs in enumerate(ray_sets) if s <= rs)
            records.append((dim, tuple(sorted(s)), s, fs))
        records.sort(key=lambda r: (r[0], r[1]))
        return [ConeFace(self, i, s, fs, dim) for i, (dim, _, s, fs) in enumerate(records)]

    def faces_of_dim(self, k):
        return [F for F in self.faces if F.dim == k]

    @property
    def f_vector(self):
        return {k: len(self.faces_of_dim(k)) for k in range(self.dim + 1)}

    @cached_property
    def projection_plan(self):
        return _ProjectionPlan(self)

    # float views for Monte Carlo
    @cached_property
    def float_rays(self):
        r = np.array([[float(x) for x in g] for g in self.rays], dtype=float).reshape(-1, self.ambient_dim)
        if len(r):
            r /= np.linalg.norm(r, axis=1, keepdims=True)
        return r

    @cached_property
    def float_lineality(self):
        """Orthonormal basis (rows) of the lineality space."""
        if not self.lineality:
            return np.zeros((0, self.ambient_dim))
        m = np.array([[float(x) for x in v] for v in self.lineality]).T
        q, _ = np.linalg.qr(m)
        return q.T

    @cached_property
    def float_facets(self):
        f = np.array([[float(x) for x in a] for a in self.facets], dtype=float).reshape(-1, self.ambient_dim)
        if len(f):
            f /= np.linalg.norm(f, axis=1, keepdims=True)
        return f

    @cached_property
    def span_basis(self):
        """Orthonormal basis (rows) of lin C."""
        gens = list(self.rays) + list(self.lineality)
        if not gens:
            return np.zeros((0, self.ambient_dim))
        m = np.array([[float(x) for x in g] for g in gens]).T
        u, s, _ = np.linalg.svd(m, full_matrices=False)
        r = int(np.sum(s > 1e-10 * s[0]))
        return u[:, :r].T

    def to_json(self):
        return {"dim": self.ambient_dim, "rays": [list(map(_jsonable, g)) for g in self.rays],
                "lineality": [list(map(_jsonable, g)) for g in self.lineality]}


def _jsonable(x):
    x = Fraction(x)
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# tangent and normal cones of polytopes

def tangent_cone(P, F):
    """T_F(P) = pos(P - v) for v in relint F, from the facets containing F."""
    return Cone.from_inequalities([P.facets[j][0] for j in sorted(F.facet_set)],
                                  [c for c, _ in P.equalities], P.ambient_dim)


def tangent_cone_at(P, v):
    """pos(P - v) built directly from generators; v any point of P."""
    v = [to_rat(c) for c in v]
    gens = [tuple(Fraction(a) - b for a, b in zip(w, v)) for w in P.vertices]
    return Cone.from_generators(gens, (), P.ambient_dim)


def normal_cone(P, F):
    """N_F(P), the polar of the tangent cone."""
    return tangent_cone(P, F).polar()


def euler_check(C):
    """Alternating face count sum over the faces of C."""
    return sum((-1) ** F.dim for F in C.faces)


# Moreau projection

def _project_onto_span(vectors, x, d):
    """Orthogonal projection of x onto span(vectors), exact."""
    vs = [list(v) for v in vectors if any(v)]
    if not vs:
        return tuple(Fraction(0) for _ in range(d))
    red, _ = rref(vs, d)
    basis = [list(r) for r in red]
    g = [[dot(u, w) for w in basis] for u in basis]
    c = solve(g, [dot(u, x) for u in basis])
    return tuple(sum(ci * b[j] for ci, b in zip(c, basis)) for j in range(d))


def moreau_project(C, x, strict=True):
    """Moreau decomposition x = p + q with p = proj_C(x), q = proj_{C°}(x).

    Returns ``(p, q, face)`` where ``face`` is the face of C with p in its
    relative interior. With ``strict`` set, raises ``DegenerateProjection``
    when q is on the relative boundary of the normal cone of that face.
    """
    d = C.ambient_dim
    x = tuple(to_rat(c) for c in x)
    for F in C.faces:
        p = _project_onto_span(F.rays + list(C.lineality), x, d)
        if not F.relint_contains(p):
            continue
        q = tuple(a - b for a, b in zip(x, p))
        vals = [dot(g, q) for i, g in enumerate(C.rays) if i not in F.ray_set]
        if any(v > 0 for v in vals):
            continue
        if any(dot(l, q) != 0 for l in C.lineality):
            continue
        if strict and any(v == 0 for v in vals):
            raise DegenerateProjection(f"projection of {x} is not generic")
        return p, q, F
    raise AssertionError("no face accepted the projection")  # pragma: no cover


class _ProjectionPlan:
    """Float data for classifying many Moreau projections at once."""

    def __init__(self, C):
        self.cone = C
        self.faces = C.faces
        d = C.ambient_dim
        self.projectors, self.facet_rows, self.ray_rows, self.dims = [], [], [], []
        fr = C.float_rays
        ff = C.float_facets
        for F in self.faces:
            gens = [C.rays[i] for i in sorted(F.ray_set)] + list(C.lineality)
            if gens:
                m = np.array([[float(x) for x in g] for g in gens]).T
                u, s, _ = np.linalg.svd(m, full_matrices=False)
                r = int(np.sum(s > 1e-10 * s[0]))
                q = u[:, :r]
                self.projectors.append(q @ q.T)
            else:
                self.projectors.append(np.zeros((d, d)))
            self.facet_rows.append(ff[[j for j in range(len(C.facets)) if j not in F.facet_set]])
            self.ray_rows.append(fr[[i for i in range(len(C.rays)) if i not in F.ray_set]])
            self.dims.append(F.dim)

    def classify(self, x, tol=1e-10):
        """Face index for each row of x, or -1 for samples too close to a face boundary."""
        n = len(x)
        out = np.full(n, -1, dtype=np.int64)
        hits = np.zeros(n, dtype=np.int64)
        norms = np.linalg.norm(x, axis=1)
        for i, proj in enumerate(self.projectors):
            p = x @ proj
            q = x - p
            ok = np.ones(n, dtype=bool)
            if len(self.facet_rows[i]):
                ok &= np.max(p @ self.facet_rows[i].T, axis=1) < -tol * norms
            if len(self.ray_rows[i]):
                ok &= np.max(q @ self.ray_rows[i].T, axis=1) < -tol * norms
            out[ok] = i
            hits += ok
        out[hits != 1] = -1
        return out


__all__ = ["Cone", "ConeFace", "DegenerateProjection", "euler_check", "moreau_project",
           "normal_cone", "tangent_cone", "tangent_cone_at"]
