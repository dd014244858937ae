"""The valuation families L, A, A_k, G_k and the intrinsic volumes V_k.

Every angle that enters these valuations depends only on the face of P in
whose relative interior a lattice point lies. Each family is therefore
reduced to one weight per face, and a value on the dilate nP is the dot
product of those weights with the relative-interior lattice counts of nP.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _mc
from .angles import (
    conic_intrinsic_volumes,
    exact_intrinsic_volumes,
    exact_solid_angle,
    modified_grassmann_angle,
    solid_angle,
)
from .cones import Cone, tangent_cone
from .exactgeom import convex_hull, intersection
from .lattice import enumerate_points, interior_count, relint_counts

FAMILIES = ("L", "N", "A", "Ak", "Gk")


@dataclass
class ValuationValue:
    """A valuation evaluated on a dilate: exact rational/float, or estimate with stderr."""

    kind: str
    k: int | None
    dilate: int
    value: object
    stderr: float = 0.0
    exact: bool = True

    def __float__(self):
        return float(self.value)

    def to_dict(self):
        v = self.value
        if isinstance(v, Fraction):
            v = f"{v.numerator}/{v.denominator}"
        elif isinstance(v, int):
            v = str(v)
        return {"kind": self.kind, "k": self.k, "dilate": self.dilate, "value": v,
                "stderr": self.stderr, "exact": self.exact}


@dataclass
class FaceWeights:
    """Per-face angle weights of a valuation, grouped by the estimate they came from.

    ``weight[i]`` is the value attached to every lattice point in relint of
    face i. ``groups`` lists (face indices, coefficient, stderr) triples for
    the independent Monte Carlo estimates the weights are built from.
    """

    polytope: object
    kind: str
    k: int | None
    weight: list
    groups: list
    exact: bool

    def evaluate(self, n):
        n = int(n)
        P = self.polytope
        if n == 0:
            return self._at_zero()
        counts = relint_counts(P, n)
        return self.combine(counts, n)

    def combine(self, counts, n):
        value = sum(self.weight[f] * c for f, c in counts.items())
        var = 0.0
        for faces, coef, se in self.groups:
            m = sum(counts.get(f, 0) * c for f, c in zip(faces, coef))
            var += (m * se) ** 2
        return ValuationValue(self.kind, self.k, n, value, math.sqrt(var), self.exact)

    def _at_zero(self):
        # 0·P is a single lattice point
        point = convex_hull([(0,) * self.polytope.ambient_dim])
        return face_weights(point, self.kind, self.k).combine({0: 1}, 0)

    def values_and_cov(self, nodes):
        """Values at the given dilates and their joint covariance matrix."""
        counts = [relint_counts(self.polytope, n) if n else None for n in nodes]
        vals = [self.combine(c, n) if n else self._at_zero() for c, n in zip(counts, nodes)]
        sens = np.zeros((len(nodes), len(self.groups)))
        for i, c in enumerate(counts):
            if c is None:
                continue
            for j, (faces, coef, _) in enumerate(self.groups):
                sens[i, j] = sum(c.get(f, 0) * x for f, x in zip(faces, coef))
        var = np.array([se ** 2 for _, _, se in self.groups])
        cov = (sens * var) @ sens.T if len(self.groups) else np.zeros((len(nodes), len(nodes)))
        return vals, cov


class NeedsSampling(ValueError):
    """Raised under method="exact" when some angle has no closed form."""


def _seed_for(seed, *key):
    return _mc.tag_of((int(seed),) + key)


class _AngleSource:
    """Memoized angle estimates keyed by cone, so equal cones share one estimate."""

    def __init__(self, method, n_samples, seed):
        if method not in ("auto", "mc", "exact"):
            raise ValueError(f"unknown method {method!r}")
        self.method, self.n, self.seed = method, n_samples, seed
        self.cache = {}

    def _get(self, key, fn):
        if key not in self.cache:
            self.cache[key] = fn()
        return self.cache[key]

    def alpha(self, C):
        def fn():
            val = exact_solid_angle(C)
            if val is not None and self.method != "mc":
                return val, 0.0, True
            if self.method == "exact":
                raise NeedsSampling("solid angle above dimension three needs sampling")
            a = solid_angle(C, self.n, _seed_for(self.seed, "alpha", C.key()), method=self.method)
            return a.value, a.stderr, a.exact
        return self._get(("alpha", C.key()), fn)

    def upsilon(self, C, k):
        def fn():
            ex = exact_intrinsic_volumes(C)
            if ex is not None and self.method != "mc":
                return list(ex), [0.0] * len(ex), True
            if ex is not None and C.is_linear_subspace:
                return list(ex), [0.0] * len(ex), True
            if self.method == "exact":
                raise NeedsSampling("intrinsic volumes need sampling for this cone")
            u = conic_intrinsic_volumes(C, self.n, _seed_for(self.seed, "ups", C.key()), method="projection")
            return [e.value for e in u.v], [e.stderr for e in u.v], False
        vals, ses, ex = self._get(("ups", C.key()), fn)
        return vals[k], ses[k], ex

    def alpha_k(self, C, k):
        def fn():
            if self.method != "mc":
                ex = exact_intrinsic_volumes(C)
                if ex is not None:
                    return min(1.0, sum(ex[k + 1:])), 0.0, True
                if self.method == "exact":
                    raise NeedsSampling("modified Grassmann angle needs sampling for this cone")
            a = modified_grassmann_angle(C, k, self.n, _seed_for(self.seed, "alphak", k, C.key()))
            return a.value, a.stderr, a.exact
        return self._get(("alphak", k, C.key()), fn)


def face_weights(P, kind, k=None, n_samples=_mc.DEFAULT_SAMPLES, seed=0, method="auto"):
    """Per-face weights of a valuation family on P.

    ``kind`` is "L" (det-weighted count), "N" (plain lattice count), "A",
    "Ak" or "Gk". ``method`` is "auto" (exact angles where available),
    "mc" (sample every angle that is not trivially known) or "exact".
    """
    if kind not in FAMILIES:
        raise ValueError(f"unknown valuation family {kind!r}")
    d = P.ambient_dim
    if kind in ("Ak", "Gk") and (k is None or not 0 <= k <= d):
        raise ValueError(f"k must lie in 0..{d}")
    faces = P.faces
    src = _AngleSource(method, n_samples, seed)
    weight = [0.0] * len(faces)
    groups = {}
    exact = True

    def add_group(key, f, coef, se):
        faces_, coefs, _ = groups.setdefault(key, ([], [], se))
        faces_.append(f)
        coefs.append(coef)

    if kind == "N":
        return FaceWeights(P, kind, None, [1] * len(faces), [], True)
    if kind == "L":
        det = P.lattice_det
        return FaceWeights(P, kind, None, [det] * len(faces), [], True)
    if kind == "A":
        if not P.is_full_dim:
            return FaceWeights(P, kind, None, [0.0] * len(faces), [], True)
        for F in faces:
            T = tangent_cone(P, F)
            v, se, ex = src.alpha(T)
            weight[F.index] = v
            exact &= ex
            if se:
                add_group(("alpha", T.key()), F.index, 1.0, se)
    elif kind == "Gk":
        for F in faces:
            T = tangent_cone(P, F)
            v, se, ex = src.alpha_k(T, k)
            weight[F.index] = v
            exact &= ex
            if se:
                add_group(("alphak", T.key()), F.index, 1.0, se)
    else:
        # A_k: weight(F) = Σ over k-faces G ⊇ F of det(G) υ_k(T_G P) α(T_F G)
        for G in P.faces_of_dim(k):
            detG = float(G.as_polytope.lattice_det) if G.dim else 1.0
            TG = tangent_cone(P, G)
            u, use, uex = src.upsilon(TG, k)
            exact &= uex
            Gp = G.as_polytope
            for F in P.subfaces(G):
                if G.dim == 0:
                    a, ase, aex = 1.0, 0.0, True
                    TF = None
                else:
                    FF = Gp.face_by_vertices(Gp.vertices.index(P.vertices[i]) for i in F.vertex_set)
                    TF = tangent_cone(Gp, FF)
                    a, ase, aex = src.alpha(TF)
                exact &= aex
                weight[F.index] += detG * u * a
                if use:
                    add_group(("ups", TG.key()), F.index, detG * a, use)
                if ase:
                    add_group(("alpha", TF.key()), F.index, detG * u, ase)
    grp = [(tuple(f), tuple(c), se) for f, c, se in groups.values()]
    return FaceWeights(P, kind, k, weight, grp, exact)


def _evaluate(P, kind, k, n, n_samples, seed, method):
    return face_weights(P, kind, k, n_samples, seed, method).evaluate(n)


def eval_L(P, n=1):
    """L(nP) = det(P)·|nP ∩ Z^d|, exact."""
    n = int(n)
    count = sum(relint_counts(P, n).values()) if n else 1
    det = P.lattice_det if n else 1
    value = det * count if isinstance(det, int) else float(det) * count
    return ValuationValue("L", None, n, value, 0.0, True)


def eval_count(P, n=1):
    n = int(n)
    count = sum(relint_counts(P, n).values()) if n else 1
    return ValuationValue("N", None, n, count, 0.0, True)


def eval_A(P, n=1, n_samples=_mc.DEFAULT_SAMPLES, seed=0, method="auto"):
    """Solid-angle valuation A(nP); zero for lower-dimensional P."""
    return _evaluate(P, "A", None, n, n_samples, seed, method)


def eval_Ak(P, k, n=1, n_samples=_mc.DEFAULT_SAMPLES, seed=0, method="auto"):
    """k-th discrete intrinsic volume A_k(nP)."""
    return _evaluate(P, "Ak", k, n, n_samples, seed, method)


def eval_Gk(P, k, n=1, n_samples=_mc.DEFAULT_SAMPLES, seed=0, method="auto"):
    """k-th Grassmann angle valuation G_k(nP)."""
    return _evaluate(P, "Gk", k, n, n_samples, seed, method)


def eval_Vk(P, k, n_samples=_mc.DEFAULT_SAMPLES, seed=0, method="auto"):
    """Intrinsic volume V_k(P) = Σ over k-faces of υ_k(T_F P)·|F|."""
    src = _AngleSource(method, n_samples, seed)
    value, var, exact = 0.0, 0.0, True
    for F in P.faces_of_dim(k):
        vol = float(F.as_polytope.volume)
        u, se, ex = src.upsilon(tangent_cone(P, F), k)
        value += u * vol
        var += (se * vol) ** 2
        exact &= ex
    return ValuationValue("V", k, 1, value, math.sqrt(var), exact)


def evaluate(P, family, n=1, k=None, n_samples=_mc.DEFAULT_SAMPLES, seed=0, method="auto"):
    family = {"G": "Gk", "Gk": "Gk", "Ak": "Ak", "A_k": "Ak", "G_k": "Gk"}.get(family, family)
    if family == "L":
        return eval_L(P, n)
    if family == "N":
        return eval_count(P, n)
    if family == "V":
        return eval_Vk(P, k, n_samples, seed, method)
    return _evaluate(P, family, k, n, n_samples, seed, method)


def relint_valuation(family, simplex, k=None, n=1, n_samples=_mc.DEFAULT_SAMPLES, seed=0, method="auto"):
    """φ(relint nΔ) = Σ_F (-1)^{dim Δ - dim F} φ(nF) over the nonempty faces of Δ.

    For ``family="L"`` the plain lattice count is used, so the result is the
    number of lattice points in the relative interior of nΔ.
    """
    if family == "L":
        family = "N"
    total, var, exact = 0.0, 0.0, True
    dim = simplex.dim
    for F in simplex.faces:
        v = evaluate(F.as_polytope, family, n, k, n_samples, _seed_for(seed, "face", F.index), method)
        total += (-1) ** (dim - F.dim) * v.value
        var += v.stderr ** 2
        exact &= v.exact
    return ValuationValue(f"relint-{family}", k, n, total, math.sqrt(var), exact)


@dataclass
class AxiomResidual:
    family: str
    k: int | None
    residual: float
    stderr: float
    exact: bool

    @property
    def tolerance(self):
        from .angles import EXACT_FLOOR
        return 0.0 if self.family in ("L", "N") else max(4 * self.stderr, EXACT_FLOOR)

    @property
    def passed(self):
        return abs(self.residual) <= self.tolerance


def check_valuation_axiom(family, P, Q, k=None, n_samples=_mc.DEFAULT_SAMPLES, seed=0, method="auto"):
    """Residual of φ(P∪Q) + φ(P∩Q) - φ(P) - φ(Q) for a convex union P∪Q.

    For ``family="L"`` the lattice count is used and the residual is exact.
    """
    union = convex_hull(list(P.vertices) + list(Q.vertices))
    inter = intersection(P, Q)
    if inter is None:
        raise ValueError("P and Q must intersect")
    if family == "L":
        family = "N"
    vals = [evaluate(X, family, 1, k, n_samples, _seed_for(seed, i), method)
            for i, X in enumerate((union, inter, P, Q))]
    if family == "N":
        res = vals[0].value + vals[1].value - vals[2].value - vals[3].value
        return AxiomResidual("L", k, res, 0.0, True)
    res = vals[0].value + vals[1].value - vals[2].value - vals[3].value
    se = math.sqrt(sum(v.stderr ** 2 for v in vals))
    return AxiomResidual(family, k, float(res), se, all(v.exact for v in vals))


def is_convex_union(P, Q):
    """True when P ∪ Q is convex (checked through volumes inside the common hull)."""
    union = convex_hull(list(P.vertices) + list(Q.vertices))
    inter = intersection(P, Q)
    if inter is None or union.dim != P.dim or P.dim != Q.dim:
        return False
    return union.relative_volume * union.lattice_det == (
        P.volume + Q.volume - (inter.volume if inter.dim == P.dim else 0))


def split_polytope(P, normal, offset):
    """Split P by the lattice hyperplane normal . x = offset into two lattice pieces."""
    from .exactgeom import from_halfspaces
    normal = tuple(normal)
    neg = tuple(-c for c in normal)
    ineq = list(P.facets)
    eqs = list(P.equalities)
    lo = from_halfspaces(ineq + [(normal, offset)], eqs, P.ambient_dim)
    hi = from_halfspaces(ineq + [(neg, -offset)], eqs, P.ambient_dim)
    return lo, hi


def theorem_relint_grassmann(simplex, k, n_samples=_mc.DEFAULT_SAMPLES, seed=0, method="auto"):
    """G_k(relint Δ) through Grassmann angles of boundary tangent cones:

    (-1)^{dim Δ + k + 1}·½·Σ_v (γ_k - γ_{k+1})(T_v Δ) over boundary lattice
    points v, plus the interior lattice count when k < dim Δ.
    """
    from .angles import grassmann_angle
    dim = simplex.dim
    counts = relint_counts(simplex, 1)
    total, var = 0.0, 0.0
    for F in simplex.faces:
        c = counts.get(F.index, 0)
        if F.dim == dim or not c:
            continue
        T = tangent_cone(simplex, F)
        m = "crofton" if method != "mc" and exact_intrinsic_volumes(T) is not None else "mc"
        g0 = grassmann_angle(T, k, n_samples, _seed_for(seed, "g", F.index, k), m)
        g1 = grassmann_angle(T, k + 1, n_samples, _seed_for(seed, "g", F.index, k + 1), m)
        total += c * (g0.value - g1.value)
        var += c * c * (g0.stderr ** 2 + g1.stderr ** 2)
    value = (-1) ** (dim + k + 1) * 0.5 * total
    se = 0.5 * math.sqrt(var)
    if k < dim:
        value += interior_count(simplex, 1)
    return ValuationValue("relint-Gk-formula", k, 1, value, se, se == 0)


__all__ = [
    "FaceWeights", "NeedsSampling", "ValuationValue", "check_valuation_axiom", "eval_A", "eval_Ak", "eval_Gk",
    "eval_L", "eval_Vk", "eval_count", "evaluate", "face_weights", "is_convex_union",
    "relint_valuation", "split_polytope", "theorem_relint_grassmann",
]
