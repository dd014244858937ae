import math

import pytest
from hypothesis import given, settings, strategies as st

from latval.exactgeom import convex_hull
from latval.fixtures import cube, reeve, simplex
from latval.lattice import count_points, interior_count
from latval.valuations import (
    NeedsSampling,
    check_valuation_axiom,
    eval_A,
    eval_Ak,
    eval_Gk,
    eval_L,
    eval_Vk,
    evaluate,
    is_convex_union,
    relint_valuation,
    split_polytope,
    theorem_relint_grassmann,
)

N = 30_000
points3 = st.lists(st.tuples(*[st.integers(0, 2)] * 3), min_size=4, max_size=7)


def test_discrete_volume_is_det_weighted():
    seg = convex_hull([(0, 0), (1, 2)])
    assert eval_L(seg, 2).value == pytest.approx(3 * math.sqrt(5))
    assert eval_L(cube(3), 2).value == 27


def test_square_values():
    sq = cube(2)
    for n in (1, 2, 5):
        assert eval_A(sq, n).value == pytest.approx(n * n)
        assert eval_Ak(sq, 1, n).value == pytest.approx(2 * n)
        assert eval_Ak(sq, 0, n).value == pytest.approx(1)


def test_cube_intrinsic_limits():
    for d in (2, 3):
        for k in range(1, d + 1):
            assert eval_Ak(cube(d), k, 16).value / 16 ** k == pytest.approx(math.comb(d, k))
            assert eval_Vk(cube(d), k).value == pytest.approx(math.comb(d, k))


def test_intrinsic_volume_of_a_triangle():
    tri = convex_hull([(0, 0), (3, 0), (0, 4)])
    assert eval_Vk(tri, 1).value == pytest.approx(6)  # half the perimeter
    assert eval_Vk(tri, 2).value == pytest.approx(6)


@settings(max_examples=12, deadline=None)
@given(points3)
def test_grassmann_chain_on_random_polytopes(pts):
    P = convex_hull(pts)
    if not P.is_full_dim:
        return
    for n in (1, 2):
        assert eval_Gk(P, 0, n).value == pytest.approx(count_points(P, n) - 1)
        assert eval_Gk(P, 2, n).value == pytest.approx(eval_A(P, n).value)
        assert eval_Gk(P, 3, n).value == pytest.approx(0, abs=1e-12)
        g = [eval_Gk(P, k, n).value for k in range(4)]
        assert all(a >= b - 1e-12 for a, b in zip(g, g[1:]))


def test_sampled_and_exact_angles_agree():
    P = reeve(2)
    ex = eval_Gk(P, 1, 2)
    mc = eval_Gk(P, 1, 2, N, seed=3, method="mc")
    assert ex.exact and not mc.exact
    assert abs(ex.value - mc.value) <= 4 * mc.stderr


def test_exact_method_refuses_to_sample():
    with pytest.raises(NeedsSampling):
        eval_A(simplex(4), 1, method="exact")


def test_det_weighted_volume_is_not_a_valuation():
    # the diagonal splits the unit square into two triangles meeting in a segment of det sqrt 2
    P = convex_hull([(0, 0), (1, 0), (1, 1)])
    Q = convex_hull([(0, 0), (0, 1), (1, 1)])
    union, inter = cube(2), convex_hull([(0, 0), (1, 1)])
    residual = eval_L(union).value + eval_L(inter).value - eval_L(P).value - eval_L(Q).value
    assert residual == pytest.approx(2 * math.sqrt(2) - 2)
    assert check_valuation_axiom("L", P, Q).residual == 0


SPLITS = [
    (cube(2), (1, 1), 1),
    (cube(3).dilate(2), (1, 0, 0), 1),
    (cube(3).dilate(2), (1, 1, 0), 2),
    (reeve(3).dilate(2), (1, -1, 0), 0),
    (simplex(3).dilate(2), (1, -1, 0), 0),
]


@pytest.mark.parametrize("P,normal,offset", SPLITS)
def test_valuation_axiom_on_splits(P, normal, offset):
    lo, hi = split_polytope(P, normal, offset)
    assert is_convex_union(lo, hi)
    assert check_valuation_axiom("L", lo, hi).residual == 0
    for fam, k in (("A", None), ("Ak", 1), ("Ak", 2), ("Gk", 1)):
        r = check_valuation_axiom(fam, lo, hi, k)
        assert r.passed, (fam, k, r)


def test_relint_sums():
    tri = convex_hull([(0, 0), (1, 0), (0, 1)])
    assert relint_valuation("Gk", tri, 0).value == pytest.approx(-1)
    assert relint_valuation("L", tri).value == 0
    tet = simplex(3)
    alt = relint_valuation("Gk", tet, 1)
    assert alt.value < 0
    assert theorem_relint_grassmann(tet, 1).value == pytest.approx(alt.value)
    big = simplex(3).dilate(4)
    assert relint_valuation("L", big).value == interior_count(simplex(3), 4)
    for k in (0, 1):
        assert theorem_relint_grassmann(big, k).value == pytest.approx(relint_valuation("Gk", big, k).value)


def test_A0_relint_is_signed_one():
    for d in (1, 2, 3):
        assert relint_valuation("Ak", simplex(d), 0).value == pytest.approx((-1) ** d)


def test_evaluate_dispatch():
    assert evaluate(cube(2), "N", 3).value == 16
    assert evaluate(cube(2), "G_k", 1, 0).value == pytest.approx(3)
    with pytest.raises(ValueError):
        evaluate(cube(2), "Ak", 1, 5)
