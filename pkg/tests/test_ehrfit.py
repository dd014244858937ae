from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from latval.ehrfit import (
    FittedPolynomial,
    IllConditioned,
    InconsistentValues,
    check_reciprocity,
    fit_exact,
    fit_family,
    fit_statistical,
    from_hstar,
    leading_coefficients_report,
    to_hstar,
)
from latval.exactgeom import convex_hull
from latval.fixtures import cube, reeve, simplex


def test_exact_fit_recovers_a_polynomial():
    vals = [(n, 3 * n ** 2 - n + 2) for n in range(6)]
    p = fit_exact(vals, 2)
    assert p.coeffs == [2, -1, 3] and p.exact
    assert p(Fraction(1, 2)) == Fraction(3, 4) - Fraction(1, 2) + 2


def test_exact_fit_rejects_inconsistent_values():
    with pytest.raises(InconsistentValues):
        fit_exact([(0, 1), (1, 2), (2, 3), (3, 5)], 1)


def test_statistical_fit():
    rng = np.random.default_rng(0)
    nodes = range(1, 7)
    vals = [(n, 0.5 * n ** 3 - 0.3 * n + rng.normal(0, 1e-3), 1e-3) for n in nodes]
    p = fit_statistical(vals, 3)
    for c, t, s in zip(p.coeffs, [0, -0.3, 0, 0.5], p.stderr):
        assert abs(c - t) <= 5 * s
    with pytest.raises(IllConditioned):
        fit_statistical([(1, 1.0, 0.1), (1, 1.0, 0.1), (1, 1.0, 0.1)], 2)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=1, max_size=5))
def test_hstar_round_trip(h):
    coeffs = from_hstar(h)
    p = to_hstar(FittedPolynomial(coeffs, True))
    assert p.hstar == [Fraction(x) for x in h]


def test_known_hstar_vectors():
    assert to_hstar(fit_family(cube(3), "L")).hstar == [1, 4, 1, 0]
    assert to_hstar(fit_family(simplex(3), "L")).hstar == [1, 0, 0, 0]
    for h in (1, 2, 5, 20):
        assert to_hstar(fit_family(reeve(h), "L")).hstar == [1, 0, h - 1, 0]


@pytest.mark.parametrize("h", [1, 5, 20])
def test_reeve_ehrhart_polynomial(h):
    p = fit_family(reeve(h), "L")
    assert p.coeffs == [1, 2 - Fraction(h, 6), 1, Fraction(h, 6)]


def test_irrational_det_gives_float_fit():
    seg = convex_hull([(0, 0), (1, 2)])
    p = fit_family(seg, "L")
    assert not p.exact
    assert p.coeffs == pytest.approx([5 ** 0.5, 5 ** 0.5])


FIXTURES = [cube(2), cube(3), simplex(3), reeve(4), convex_hull([(0, 0, 0), (2, 0, 0), (0, 3, 0), (1, 1, 2)])]


@pytest.mark.parametrize("P", FIXTURES, ids=lambda P: str(P.f_vector))
def test_reciprocity(P):
    p = fit_family(P, "N")
    claims = check_reciprocity(p, "N", P, (1, 2, 3))
    assert len(claims) == 3 and all(c.passed for c in claims)


def test_parity_of_solid_angle_polynomials():
    P = reeve(3)
    A = fit_family(P, "A")
    assert all(c.passed for c in check_reciprocity(A, "A", P))
    for k in (1, 2, 3):
        Ak = fit_family(P, "Ak", k)
        assert Ak.degree == k
        assert all(c.passed for c in check_reciprocity(Ak, "Ak", P, k=k))


def test_leading_coefficients():
    claims = leading_coefficients_report(reeve(2))
    assert claims and all(c.passed for c in claims)


def test_statistical_family_fit_carries_errors():
    p = fit_family(reeve(3), "Gk", 1, 20_000, seed=2, method="mc")
    assert not p.exact and p.cov.shape == (4, 4)
    assert all(s > 0 for s in p.stderr[:2])
    d = p.to_dict()
    assert set(d["coeffs"][0]) == {"value", "stderr"}
