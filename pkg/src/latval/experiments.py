"""End-to-end experiments: Reeve tetrahedra, negativity witnesses, the positivity scan,
the Gaussian image identity and the cone identity suite."""

import itertools
import math
import time
from fractions import Fraction

import numpy as np

from . import _mc
from .angles import (
    EXACT_FLOOR,
    conic_intrinsic_volumes,
    exact_intrinsic_volumes,
    exact_solid_angle,
    gamma_vector,
    alpha_vector,
    modified_grassmann_angle,
    solid_angle,
    verify_alpha_brianchon_gram,
    verify_brianchon_gram,
    verify_connection,
    verify_crofton_classical,
    verify_crofton_new,
    verify_gauss_bonnet,
    verify_grunbaum_faces,
    verify_grunbaum_polytope,
)
from .cones import Cone, tangent_cone
from .ehrfit import fit_family, to_hstar
from .exactgeom import convex_hull
from .fixtures import cube, reeve, simplex
from .lattice import interior_count, relint_counts
from .report import Claim, ExperimentReport, numeric_claim
from .valuations import relint_valuation, theorem_relint_grassmann


class NoWitnessFound(RuntimeError):
    """The witness search space held no simplex with the required properties."""


def reeve_vertex_angle_sum(h):
    """S(Δ_h): the sum of the solid angles at the four vertices, from closed-form 3D angles."""
    P = reeve(h)
    return sum(exact_solid_angle(tangent_cone(P, F)) for F in P.faces_of_dim(0))


def run_reeve(h, samples=_mc.DEFAULT_SAMPLES, seed=0):
    """Fit L, A, G_0, G_1, G_2, G_3 of Δ_h and compare with the closed forms."""
    t0 = time.perf_counter()
    h = int(h)
    if h < 1:
        raise ValueError("h must be at least 1")
    P = reeve(h)
    rep = ExperimentReport("reeve", {"h": h, "samples": samples, "seed": seed})
    S = reeve_vertex_angle_sum(h)
    rep.extra["S"] = S
    anchor_l = "Ehrhart polynomial of the Reeve tetrahedron"
    L = fit_family(P, "L")
    expected_l = [Fraction(1), Fraction(12 - h, 6), Fraction(1), Fraction(h, 6)]
    rep.add(Claim("L coefficients (c0..c3) equal 1, 2-h/6, 1, h/6", anchor_l, expected_l, L.coeffs,
                  0.0, list(L.coeffs) == expected_l))
    hs = to_hstar(L).hstar
    rep.extra["L_hstar"] = hs
    rep.add(Claim("h* of L equals (1, 0, h-1, 0)", anchor_l, [1, 0, h - 1, 0], hs, 0.0,
                  list(hs) == [1, 0, h - 1, 0], "independent computation"))
    rep.add(Claim("vertex solid-angle sum S is below 1/2", "vertex angle sum of the Reeve tetrahedron",
                  "< 1/2", S, 0.0, S < 0.5))

    A = fit_family(P, "A")
    expected_a = [0.0, S - h / 6, 0.0, h / 6]
    for i in range(4):
        rep.add(numeric_claim(f"A coefficient c{i}", "solid-angle polynomial of the Reeve tetrahedron",
                              expected_a[i], A.coeffs[i], A.stderr[i]))
    G = {k: fit_family(P, "Gk", k) for k in (0, 2, 3)}
    for i in range(4):
        rep.add(numeric_claim(f"G_0 coefficient c{i} equals that of L - 1", "G_0 = L - 1",
                              float(L.coeffs[i]) - (1 if i == 0 else 0), G[0].coeffs[i], G[0].stderr[i]))
        rep.add(numeric_claim(f"G_2 coefficient c{i} equals that of A", "G_{d-1} = A",
                              A.coeffs[i], G[2].coeffs[i], math.hypot(G[2].stderr[i], A.stderr[i])))
        rep.add(numeric_claim(f"G_3 coefficient c{i} vanishes", "G_d = 0", 0.0, G[3].coeffs[i], G[3].stderr[i]))

    G1 = fit_family(P, "Gk", 1, samples, seed, method="mc")
    rep.extra["G1_coeffs"] = [{"value": c, "stderr": s} for c, s in zip(G1.coeffs, G1.stderr)]
    expected_g1 = [0.0, S - h / 6, 1.0, h / 6]
    for i in range(4):
        rep.add(numeric_claim(f"G_1 coefficient c{i} (sampled angles)", "G_1 polynomial of the Reeve tetrahedron",
                              expected_g1[i], G1.coeffs[i], G1.stderr[i]))
    G1x = fit_family(P, "Gk", 1)
    for i in range(4):
        rep.add(numeric_claim(f"G_1 coefficient c{i} (exact angles)", "G_1 polynomial of the Reeve tetrahedron",
                              expected_g1[i], G1x.coeffs[i], G1x.stderr[i]))
    if h >= 3:
        rep.add(numeric_claim("linear coefficient of A is negative", "negative linear coefficient for h >= 3",
                              "< 0", A.coeffs[1], A.stderr[1], sign="negative"))
        rep.add(numeric_claim("linear coefficient of G_1 is negative (sampled angles)",
                              "negative linear coefficient for h >= 3", "< 0", G1.coeffs[1], G1.stderr[1],
                              sign="negative"))
    rep.runtime = time.perf_counter() - t0
    return rep


def _relint_lattice_free(D):
    return interior_count(D, 1) == 0


def run_negativity_witness(d, k, samples=_mc.DEFAULT_SAMPLES, seed=0, method="auto", box=2):
    """Find a simplex Δ_0 in {0..box}^d with dim Δ_0 ≡ k (mod 2), no relative-interior
    lattice points and G_k(relint Δ_0) < 0, and report the value."""
    t0 = time.perf_counter()
    d, k = int(d), int(k)
    if not 0 <= k <= d - 2:
        raise ValueError("need 0 <= k <= d-2")
    rep = ExperimentReport("negativity-witness", {"d": d, "k": k, "samples": samples, "seed": seed})
    dims = [r for r in range(d, k + 1, -1) if (r - k) % 2 == 0]
    grid = sorted(itertools.product(range(box + 1), repeat=d))
    found = None
    for r in dims:
        for combo in itertools.combinations(grid, r + 1):
            D = convex_hull(list(combo))
            if D.dim != r or len(D.vertices) != r + 1 or not _relint_lattice_free(D):
                continue
            val = relint_valuation("Gk", D, k, 1, samples, seed, method)
            if val.value < -max(3 * val.stderr, EXACT_FLOOR):
                found = (D, val)
                break
        if found:
            break
    if not found:
        raise NoWitnessFound(f"no witness for d={d}, k={k} in the box {{0..{box}}}^{d}")
    D, val = found
    rep.extra["simplex"] = [list(v) for v in D.vertices]
    rep.extra["dim"] = D.dim
    rep.add(numeric_claim(f"G_{k}(relint Δ_0) is negative", "Grassmann valuations are not combinatorially positive",
                          "< 0", val.value, val.stderr, sign="negative", basis="independent computation"))
    formula = theorem_relint_grassmann(D, k, samples, seed + 1, method)
    se = math.hypot(val.stderr, formula.stderr)
    rep.add(numeric_claim("alternating face sum equals the Grassmann-angle formula",
                          "relative-interior formula for G_k", formula.value, val.value, se))
    lrel = relint_valuation("L", D)
    rep.add(Claim("lattice points in relint Δ_0", "L(relint Δ_0) = 0", 0, lrel.value, 0.0, lrel.value == 0,
                  "independent computation"))
    if d == 2 and k == 0 and sorted(D.vertices) == [(0, 0), (0, 1), (1, 0)]:
        rep.add(Claim("unit triangle gives G_0(relint) = -1", "Grassmann valuations are not combinatorially positive",
                      -1, val.value, 1e-12, abs(val.value + 1) <= 1e-12, "independent computation"))
    rep.runtime = time.perf_counter() - t0
    return rep


def random_simplex(rng, d, r, box=2):
    """A random lattice r-simplex with vertices in {0..box}^d."""
    while True:
        pts = [tuple(int(x) for x in rng.integers(0, box + 1, d)) for _ in range(r + 1)]
        D = convex_hull(pts)
        if D.dim == r and len(D.vertices) == r + 1:
            return D


def intrinsic_angle_sum(P):
    """det(P)·Σ_{v ∈ P ∩ Z^d} α(T_v P) with angles taken inside aff P (closed forms, dim P ≤ 3)."""
    if P.dim == 0:
        return 1.0
    if P.dim > 3:
        raise ValueError("closed-form angles need dim P <= 3")
    total = 0.0
    for idx, c in relint_counts(P, 1).items():
        F = P.faces[idx]
        total += c * (1.0 if F.dim == P.dim else exact_solid_angle(tangent_cone(P, F)))
    return float(P.lattice_det) * total


def run_conjecture_scan(max_dim=3, trials=20, samples=_mc.DEFAULT_SAMPLES, seed=0, method="auto"):
    """A_k(relint Δ) over random small lattice simplices Δ.

    Rows below -3 se with k >= 1 are listed as counterexample candidates for
    the positivity of A_k; k = 0 is listed separately since A_0 is identically 1
    and A_0(relint Δ) = (-1)^{dim Δ}. Claims check the computed values against
    independent closed forms: (-1)^{dim Δ} for k = 0, -½ Σ_facets A(G) for
    k = dim Δ - 1 and A(Δ) for k = dim Δ, with A taken inside the affine hull.
    """
    t0 = time.perf_counter()
    rng = _mc.child_rng(seed, "scan")
    rep = ExperimentReport("conjecture-scan", {"max_dim": max_dim, "trials": trials,
                                               "samples": samples, "seed": seed})
    rows, candidates, k0 = [], [], []
    for t in range(trials):
        d = int(rng.integers(2, max_dim + 1))
        r = int(rng.integers(1, d + 1))
        D = random_simplex(rng, d, r)
        for k in range(0, r + 1):
            v = relint_valuation("Ak", D, k, 1, samples, _mc.tag_of((seed, t, k)), method)
            row = {"trial": t, "d": d, "dim": r, "k": k, "simplex": [list(p) for p in D.vertices],
                   "value": v.value, "stderr": v.stderr}
            rows.append(row)
            negative = v.value < -max(3 * v.stderr, EXACT_FLOOR)
            if k == 0:
                if negative:
                    k0.append(row)
                rep.add(numeric_claim(f"trial {t}: A_0(relint Δ) = (-1)^{r}", "A_0 is identically 1",
                                      (-1) ** r, v.value, v.stderr, basis="independent computation"))
                continue
            if negative:
                candidates.append(row)
            if r > 3:
                continue
            if k == r - 1:
                expect = -0.5 * sum(intrinsic_angle_sum(G.as_polytope) for G in D.faces_of_dim(r - 1))
                rep.add(numeric_claim(f"trial {t}: A_{k}(relint Δ) = -1/2 Σ_facets A(G)",
                                      "A_{r-1} on an r-simplex", expect, v.value, v.stderr,
                                      basis="independent computation"))
            elif k == r:
                rep.add(numeric_claim(f"trial {t}: A_{k}(relint Δ) = A(Δ) inside aff Δ",
                                      "A_r on an r-simplex", intrinsic_angle_sum(D), v.value, v.stderr,
                                      basis="independent computation"))
    rep.extra["rows"] = rows
    rep.extra["counterexample_candidates"] = candidates
    rep.extra["k0_negative"] = k0
    rep.extra["positivity"] = "counterexample candidates found" if candidates else "no negative value found"
    rep.runtime = time.perf_counter() - t0
    return rep


def _upsilon_top_of_image(images, lin_images, k, n_samples, seed):
    """υ_k of the cone pos(images) + lin(lin_images) in R^k: its solid angle if full-dimensional, else 0."""
    gens = np.concatenate([images, lin_images, -lin_images]) if len(lin_images) else images
    if k == 1:
        g = gens[:, 0]
        pos, neg = np.any(g > 0), np.any(g < 0)
        return 1.0 if pos and neg else (0.5 if pos or neg else 0.0)
    if k == 2:
        if np.linalg.matrix_rank(gens) < 2:
            return 0.0
        ang = np.sort(np.arctan2(gens[:, 1], gens[:, 0]))
        gaps = np.diff(np.concatenate([ang, ang[:1] + 2 * np.pi]))
        g = gaps.max()
        return 1.0 if g <= math.pi else (2 * math.pi - g) / (2 * math.pi)
    rat = [tuple(Fraction(float(x)).limit_denominator(10 ** 12) for x in row) for row in images]
    lrat = [tuple(Fraction(float(x)).limit_denominator(10 ** 12) for x in row) for row in lin_images]
    C = Cone.from_generators(rat, lrat, k)
    if C.dim < k:
        return 0.0
    return solid_angle(C, n_samples, seed).value


def run_gauss_image(C, k, trials=10_000, samples=_mc.DEFAULT_SAMPLES, seed=0):
    """Mean of υ_k(AC) over Gaussian k x d matrices A, against α_{k-1}(C)."""
    t0 = time.perf_counter()
    d = C.ambient_dim
    k = int(k)
    if not 1 <= k <= d:
        raise ValueError(f"k must lie in 1..{d}")
    rep = ExperimentReport("gauss-image", {"cone": C.to_json(), "k": k, "trials": trials,
                                           "samples": samples, "seed": seed})
    rng = _mc.child_rng(seed, "gauss-image", k)
    rays = np.array([[float(x) for x in g] for g in C.rays]).reshape(-1, d)
    lin = np.array([[float(x) for x in g] for g in C.lineality]).reshape(-1, d)
    vals = np.empty(trials)
    for t in range(trials):
        A = rng.standard_normal((k, d))
        vals[t] = _upsilon_top_of_image(rays @ A.T, lin @ A.T, k, samples, _mc.tag_of((seed, t)))
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    ex = exact_intrinsic_volumes(C)
    if ex is not None:
        target, tse = sum(ex[k:]), 0.0
    else:
        a = modified_grassmann_angle(C, k - 1, samples, _mc.tag_of((seed, "target")))
        target, tse = a.value, a.stderr
    rep.extra["mean"] = mean
    rep.extra["stderr"] = se
    anchor = "Gaussian image: E υ_k(AC) = α_{k-1}(C)"
    if C.is_linear_subspace:
        expect = 1.0 if C.dim >= k else 0.0
        rep.add(Claim("every trial gives υ_k(AC) exactly 0 or 1 as predicted", anchor, expect, mean, 0.0,
                      bool(np.all(vals == expect)) and target == expect))
    else:
        rep.add(numeric_claim("mean of υ_k(AC) equals α_{k-1}(C)", anchor, target, mean,
                              math.hypot(se, tse), sigmas=4.0))
    rep.runtime = time.perf_counter() - t0
    return rep


# identity suite

def random_cones(count=20, max_dim=4, seed=0):
    """A deterministic mix of random cones: pointed, with lineality, and linear subspaces."""
    rng = _mc.child_rng(seed, "cones")
    out = []
    while len(out) < count:
        i = len(out)
        d = int(rng.integers(2, max_dim + 1))
        vec = lambda: tuple(int(x) for x in rng.integers(-3, 4, d))
        if i % 5 == 4:
            basis = [vec() for _ in range(int(rng.integers(1, d + 1)))]
            C = Cone.from_generators((), basis, d)
        elif i % 5 == 3:
            C = Cone.from_generators([vec() for _ in range(int(rng.integers(1, 4)))], [vec()], d)
        else:
            C = Cone.from_generators([vec() for _ in range(int(rng.integers(1, 6)))], (), d)
        if C.is_zero or len(C.rays) > 6:
            continue
        out.append(C)
    return out


def check_cone_identities(C, samples=_mc.DEFAULT_SAMPLES, seed=0):
    """Every cone identity for one cone, each with its own independent estimates."""
    d = C.ambient_dim
    ups = conic_intrinsic_volumes(C, samples, _mc.tag_of((seed, "ups")), method="projection")
    gammas = gamma_vector(C, samples, _mc.tag_of((seed, "gamma")))
    alphas = alpha_vector(C, samples, _mc.tag_of((seed, "alpha")))
    checks = [verify_gauss_bonnet(C, ups=ups)]
    for k in range(d + 1):
        checks.append(verify_crofton_classical(C, k, ups=ups, gammas=gammas))
        checks.append(verify_crofton_new(C, k, ups=ups, alphas=alphas))
        checks.append(verify_grunbaum_faces(C, k, samples, _mc.tag_of((seed, "faces")), ups=ups))
    for k in range(d):
        checks.append(verify_connection(C, k, alphas=alphas, gammas=gammas))
    return checks


def default_suite_polytopes():
    return [cube(2), reeve(2), simplex(3)]


def check_polytope_identities(P, samples=_mc.DEFAULT_SAMPLES, seed=0, method="mc"):
    d = P.ambient_dim
    checks = [verify_brianchon_gram(P, samples, seed, method)]
    for k in range(d + 1):
        checks.append(verify_alpha_brianchon_gram(P, k, samples, _mc.tag_of((seed, "bg", k)), method))
    for k in range(1, d):
        checks.append(verify_grunbaum_polytope(P, k, samples, _mc.tag_of((seed, "gp", k)), method))
    return checks


def run_identity_suite(n_cones=20, samples=_mc.DEFAULT_SAMPLES, seed=0, polytopes=None, max_dim=4):
    """Cone identities on random cones plus polytope identities on a few fixtures."""
    t0 = time.perf_counter()
    rep = ExperimentReport("identities", {"cones": n_cones, "samples": samples, "seed": seed})
    table = []
    for i, C in enumerate(random_cones(n_cones, max_dim, seed)):
        for chk in check_cone_identities(C, samples, _mc.tag_of((seed, i))):
            table.append({"object": f"cone {i}", **chk.to_dict()})
    polys = default_suite_polytopes() if polytopes is None else polytopes
    for j, P in enumerate(polys):
        for chk in check_polytope_identities(P, samples, _mc.tag_of((seed, "P", j))):
            table.append({"object": f"polytope {j}", **chk.to_dict()})
    rep.extra["table"] = table
    families = sorted({row["name"].split(" ")[0] for row in table})
    for fam in families:
        rows = [r for r in table if r["name"].split(" ")[0] == fam]
        bad = [r for r in rows if not r["passed"]]
        worst = max((abs(r["residual"]) / r["tolerance"] for r in rows if not r["skipped"]), default=0.0)
        rep.add(Claim(f"{fam}: all {len(rows)} checks within 4 se", fam, 0, len(bad), 1.0, not bad,
                      "independent computation", worst))
    rep.runtime = time.perf_counter() - t0
    return rep


__all__ = [
    "NoWitnessFound", "check_cone_identities", "default_suite_polytopes", "check_polytope_identities", "random_cones",
    "intrinsic_angle_sum", "reeve_vertex_angle_sum", "run_conjecture_scan", "run_gauss_image", "run_identity_suite",
    "run_negativity_witness", "run_reeve",
]
