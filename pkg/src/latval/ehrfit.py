"""Polynomial fits of valuations on dilates, h* transforms and reciprocity checks."""

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

import numpy as np

from . import _mc
from .exactgeom.linalg import inverse, solve
from .lattice import interior_count
from .report import Claim, numeric_claim
from .valuations import eval_count, eval_L, eval_Vk, face_weights

SE_FLOOR = 1e-12  # weight floor for nodes whose value carries no sampling error


class InconsistentValues(ValueError):
    """Values at the verification nodes disagree with the fitted polynomial."""


class IllConditioned(ValueError):
    """The nodes do not determine the coefficients stably."""


@dataclass
class FittedPolynomial:
    """Coefficients c_0..c_r in the monomial basis, with optional h* coordinates.

    Exact fits hold Fractions and zero covariance; statistical fits hold
    floats and the coefficient covariance matrix.
    """

    coeffs: list
    exact: bool
    cov: np.ndarray = field(default=None, repr=False)
    basis: str = "monomial"
    hstar: list | None = None
    hstar_cov: np.ndarray | None = field(default=None, repr=False)
    family: str | None = None
    k: int | None = None

    def __post_init__(self):
        if self.cov is None:
            self.cov = np.zeros((len(self.coeffs), len(self.coeffs)))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def stderr(self):
        return [float(np.sqrt(max(self.cov[i, i], 0.0))) for i in range(len(self.coeffs))]

    @property
    def hstar_stderr(self):
        if self.hstar_cov is None:
            return None
        return [float(np.sqrt(max(self.hstar_cov[i, i], 0.0))) for i in range(len(self.hstar))]

    def __call__(self, t):
        acc = Fraction(0) if self.exact else 0.0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def to_dict(self):
        def enc(c):
            return f"{c.numerator}/{c.denominator}" if isinstance(c, Fraction) else float(c)
        out = {"family": self.family, "k": self.k, "degree": self.degree, "basis": self.basis}
        if self.exact:
            out["coeffs"] = [enc(c) for c in self.coeffs]
        else:
            out["coeffs"] = [{"value": float(c), "stderr": s} for c, s in zip(self.coeffs, self.stderr)]
        if self.hstar is not None:
            if self.exact:
                out["hstar"] = [enc(c) for c in self.hstar]
            else:
                out["hstar"] = [{"value": float(c), "stderr": s} for c, s in zip(self.hstar, self.hstar_stderr)]
        return out


def fit_exact(values, degree):
    """Exact interpolation of (n, value) pairs by a polynomial of the given degree.

    The first degree+1 distinct nodes determine the polynomial; every further
    node must agree exactly, otherwise ``InconsistentValues`` is raised.
    """
    pts = [(int(n), Fraction(v)) for n, v in values]
    nodes = [n for n, _ in pts]
    if len(set(nodes)) != len(nodes):
        raise ValueError("nodes must be distinct")
    r = int(degree)
    if len(pts) < r + 1:
        raise ValueError(f"need at least {r + 1} nodes for degree {r}")
    base = pts[:r + 1]
    coeffs = list(solve([[Fraction(n) ** i for i in range(r + 1)] for n, _ in base], [v for _, v in base]))
    p = FittedPolynomial(coeffs, True)
    for n, v in pts[r + 1:]:
        if p(n) != v:
            raise InconsistentValues(f"value at n={n} is {v}, polynomial gives {p(n)}")
    return p


def fit_statistical(values, degree, cov=None):
    """Weighted least-squares fit of (n, value, stderr) triples.

    When ``cov`` (the full covariance of the values) is given, coefficient
    errors are propagated through it; otherwise the values are taken as
    independent with the given standard errors.
    """
    nodes = np.array([float(v[0]) for v in values])
    y = np.array([float(v[1]) for v in values])
    se = np.array([float(v[2]) for v in values])
    r = int(degree)
    if len(set(nodes.tolist())) < r + 1:
        raise IllConditioned(f"need at least {r + 1} distinct nodes for degree {r}")
    if np.any(se < 0):
        raise ValueError("standard errors must be non-negative")
    x = np.vander(nodes, r + 1, increasing=True)
    w = 1.0 / np.maximum(se, SE_FLOOR) ** 2
    # rescale so that exact nodes (all at the floor) do not overflow the normal equations
    w = w / w.max()
    xtwx = x.T @ (x * w[:, None])
    if np.linalg.cond(xtwx) > 1e14:
        raise IllConditioned("normal equations are numerically singular")
    est = np.linalg.solve(xtwx, x.T * w)
    coeffs = est @ y
    sigma = np.asarray(cov, dtype=float) if cov is not None else np.diag(se ** 2)
    ccov = est @ sigma @ est.T
    return FittedPolynomial([float(c) for c in coeffs], False, ccov)


def _binomial_poly(shift, r):
    """Monomial coefficients of C(t + shift, r) as a polynomial in t."""
    poly = [Fraction(1)]
    for m in range(r):
        # multiply by (t + shift - m)
        a = shift - m
        nxt = [Fraction(0)] * (len(poly) + 1)
        for i, c in enumerate(poly):
            nxt[i] += a * c
            nxt[i + 1] += c
        poly = nxt
    return [c / factorial(r) for c in poly]


def hstar_matrix(r):
    """M with monomial coefficients = M · h*, for p(t) = Σ_j h*_j C(t + r - j, r)."""
    cols = [_binomial_poly(r - j, r) for j in range(r + 1)]
    return [[cols[j][i] for j in range(r + 1)] for i in range(r + 1)]


def to_hstar(p, degree=None):
    """Attach the h* coordinates of p in the basis C(t+r-j, r), j = 0..r."""
    r = p.degree if degree is None else int(degree)
    coeffs = list(p.coeffs) + [0] * (r + 1 - len(p.coeffs))
    if len(coeffs) > r + 1:
        raise ValueError("degree lower than the polynomial degree")
    minv = inverse(hstar_matrix(r))
    if p.exact:
        h = [sum(minv[i][j] * Fraction(coeffs[j]) for j in range(r + 1)) for i in range(r + 1)]
        hcov = np.zeros((r + 1, r + 1))
    else:
        mf = np.array([[float(x) for x in row] for row in minv])
        h = list(mf @ np.array(coeffs, dtype=float))
        cov = np.zeros((r + 1, r + 1))
        cov[:len(p.coeffs), :len(p.coeffs)] = p.cov
        hcov = mf @ cov @ mf.T
    return FittedPolynomial(coeffs, p.exact, _pad(p.cov, r + 1), "binomial", h, hcov, p.family, p.k)


def from_hstar(h, exact=True):
    """Monomial coefficients of Σ_j h_j C(t + r - j, r)."""
    r = len(h) - 1
    m = hstar_matrix(r)
    if exact:
        return [sum(m[i][j] * Fraction(h[j]) for j in range(r + 1)) for i in range(r + 1)]
    mf = np.array([[float(x) for x in row] for row in m])
    return list(mf @ np.array(h, dtype=float))


def _pad(cov, n):
    out = np.zeros((n, n))
    k = min(n, cov.shape[0])
    out[:k, :k] = cov[:k, :k]
    return out


# fitting valuations of a polytope

def fit_family(P, family, k=None, n_samples=_mc.DEFAULT_SAMPLES, seed=0, method="auto", nodes=None):
    """Fit the polynomial n -> φ(nP) for φ in {L, N, A, Ak, Gk}.

    L and N are fitted exactly on n = 0..r plus two check nodes; the angle
    families are fitted by weighted least squares on n = 1..r+3 with the
    full covariance of the per-face estimates.
    """
    r = k if family == "Ak" else P.dim
    if family in ("L", "N"):
        nodes = list(nodes) if nodes is not None else list(range(r + 3))
        ev = eval_L if family == "L" else eval_count
        vals = [(n, ev(P, n).value) for n in nodes]
        if any(isinstance(v, float) for _, v in vals):
            # det(P) irrational: fit the count and scale
            cnt = fit_exact([(n, eval_count(P, n).value) for n in nodes], r)
            det = float(P.lattice_det)
            out = FittedPolynomial([float(c) * det for c in cnt.coeffs], False, family=family)
            return out
        p = fit_exact(vals, r)
        p.family = family
        return p
    nodes = list(nodes) if nodes is not None else list(range(1, r + 4))
    fw = face_weights(P, family, k, n_samples, seed, method)
    vals, cov = fw.values_and_cov(nodes)
    p = fit_statistical([(n, float(v.value), v.stderr) for n, v in zip(nodes, vals)], r, cov)
    p.family, p.k = family, k
    return p


# reciprocity and leading coefficients

def check_reciprocity(p, family, P, dilates=(1, 2, 3), k=None):
    """Claims for the reciprocity law of a fitted polynomial.

    L (or N): p(-n) = (-1)^{dim P} times the interior lattice count of nP,
    the latter enumerated independently. A and A_k: coefficients of the
    wrong parity vanish (A has the parity of dim P, A_k that of k).
    """
    claims = []
    if family in ("L", "N"):
        scale = P.lattice_det if family == "L" else 1
        for n in dilates:
            expected = (-1) ** P.dim * scale * interior_count(P, n)
            observed = p(-n)
            if p.exact:
                ok = observed == expected
                claims.append(Claim(f"L(-{n}) equals signed interior count of {n}P",
                                    "Ehrhart-Macdonald reciprocity", expected, observed, 0.0, ok,
                                    "independent computation"))
            else:
                claims.append(numeric_claim(f"L(-{n}) equals signed interior count of {n}P",
                                            "Ehrhart-Macdonald reciprocity", float(expected), float(observed),
                                            basis="independent computation"))
        return claims
    parity = P.dim % 2 if family == "A" else (k % 2)
    for i, (c, s) in enumerate(zip(p.coeffs, p.stderr)):
        if i % 2 != parity:
            claims.append(numeric_claim(f"coefficient of t^{i} vanishes", "parity of the solid-angle polynomials",
                                        0.0, float(c), s))
    return claims


def leading_coefficients_report(P, n_samples=_mc.DEFAULT_SAMPLES, seed=0, method="auto", families=("L", "A", "Ak", "Gk")):
    """Compare fitted leading coefficients with independently computed volumes."""
    claims = []
    vol = float(P.volume)
    dim = P.dim
    if "L" in families:
        L = fit_family(P, "L")
        claims.append(numeric_claim("leading coefficient of L equals |P|", "Ehrhart leading coefficient",
                                    vol, float(L.coeffs[dim]), basis="independent computation"))
        if dim >= 1:
            half = sum(F.as_polytope.relative_volume for F in P.faces_of_dim(dim - 1)) / 2
            expected = half * P.lattice_det if isinstance(P.lattice_det, int) else float(half) * P.lattice_det
            claims.append(numeric_claim("second coefficient of L is half the facet relative volumes",
                                        "Ehrhart second coefficient", float(expected), float(L.coeffs[dim - 1]),
                                        basis="independent computation"))
        N = fit_family(P, "N")
        claims.append(Claim("constant term of the lattice-point polynomial is 1", "Ehrhart constant term",
                            1, N.coeffs[0], 0.0, N.coeffs[0] == 1))
    if "A" in families and P.is_full_dim:
        A = fit_family(P, "A", None, n_samples, seed, method)
        claims.append(numeric_claim("leading coefficient of A equals |P|", "solid-angle leading coefficient",
                                    vol, A.coeffs[dim], A.stderr[dim], basis="independent computation"))
    if "Ak" in families:
        for k in range(1, dim + 1):
            Ak = fit_family(P, "Ak", k, n_samples, seed, method)
            V = eval_Vk(P, k, n_samples, seed, method)
            se = float(np.hypot(Ak.stderr[k], V.stderr))
            claims.append(numeric_claim(f"leading coefficient of A_{k} equals V_{k}",
                                        "discrete intrinsic volume leading coefficient",
                                        V.value, Ak.coeffs[k], se, basis="independent computation"))
    if "Gk" in families and P.is_full_dim:
        for k in range(P.ambient_dim):
            G = fit_family(P, "Gk", k, n_samples, seed, method)
            claims.append(numeric_claim(f"leading coefficient of G_{k} equals |P|",
                                        "Grassmann valuation leading coefficient",
                                        vol, G.coeffs[dim], G.stderr[dim], basis="independent computation"))
    return claims


__all__ = [
    "FittedPolynomial", "IllConditioned", "InconsistentValues", "check_reciprocity", "fit_exact",
    "fit_family", "fit_statistical", "from_hstar", "hstar_matrix", "leading_coefficients_report", "to_hstar",
]
