from fractions import Fraction
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from latval.exactgeom import (
    AmbientDimTooLarge,
    EmptyInput,
    NotLatticePolytope,
    convex_hull,
    from_halfspaces,
    integer_kernel,
    intersection,
    nullspace,
    rank,
    rref,
)
from latval.exactgeom.linalg import det, dot, inverse, lll_reduce, solve
from latval.fixtures import cube, reeve, simplex

points = st.lists(st.tuples(*[st.integers(-3, 3)] * 3), min_size=1, max_size=9)


def test_rank_and_nullspace_agree_with_numpy():
    rng = np.random.default_rng(0)
    for _ in range(30):
        a = rng.integers(-3, 4, (3, 5))
        a[2] = a[0] + 2 * a[1]
        rows = [tuple(int(x) for x in r) for r in a]
        assert rank(rows) == np.linalg.matrix_rank(a) == 2
        ns = nullspace(rows, 5)
        assert len(ns) == 3
        for v in ns:
            assert all(dot(r, v) == 0 for r in rows)


def test_det_inverse_solve():
    a = [[2, 1, 0], [1, 3, 1], [0, 1, 4]]
    assert det(a) == round(np.linalg.det(np.array(a)))
    inv = inverse(a)
    prod = [[sum(Fraction(a[i][k]) * inv[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
    assert prod == [[int(i == j) for j in range(3)] for i in range(3)]
    assert list(solve(a, [1, 2, 3])) == [sum(inv[i][j] * b for j, b in enumerate([1, 2, 3])) for i in range(3)]


def test_rref_pivots():
    red, piv = rref([(0, 2, 4), (1, 1, 1)], 3)
    assert piv == [0, 1]
    assert red[0][0] == 1 and red[1][1] == 1


def test_integer_kernel_is_a_lattice_basis():
    # kernel of (1, 2, 3) in Z^3 has determinant sqrt(1 + 4 + 9) as a lattice
    ker = integer_kernel([(1, 2, 3)], 3)
    assert len(ker) == 2
    assert all(dot((1, 2, 3), v) == 0 for v in ker)
    g = [[dot(u, w) for w in ker] for u in ker]
    assert det(g) == 14


def test_lll_keeps_the_lattice():
    b = [(1, 0, 0), (7, 1, 0), (13, 5, 1)]
    red = lll_reduce(b)
    assert abs(det(red)) == 1
    assert max(max(abs(x) for x in v) for v in red) <= 1


def test_cube_and_simplex_face_counts():
    assert cube(2).f_vector == (4, 4, 1)
    assert cube(3).f_vector == (8, 12, 6, 1)
    assert simplex(4).f_vector == (5, 10, 10, 5, 1)
    assert reeve(5).f_vector == (4, 6, 4, 1)


def test_six_cube_hull():
    P = cube(6)
    assert len(P.vertices) == 64 and len(P.facets) == 12


def test_dimension_cap():
    with pytest.raises(AmbientDimTooLarge):
        convex_hull([tuple([0] * 7), tuple([1] * 7)])


def test_bad_inputs():
    with pytest.raises(EmptyInput):
        convex_hull([])
    with pytest.raises(NotLatticePolytope):
        convex_hull([(Fraction(1, 2), 0), (1, 1)])


def test_point_polytope():
    P = convex_hull([(2, 3), (2, 3)])
    assert P.dim == 0 and P.f_vector == (1,)
    assert P.volume == 1


def test_lower_dimensional_segment():
    P = convex_hull([(0, 0), (3, 6)])
    assert P.dim == 1 and not P.is_full_dim
    assert P.lattice_det_squared == 5
    assert P.relative_volume == 3
    assert abs(P.volume - 3 * 5 ** 0.5) < 1e-12


def test_volumes():
    assert cube(3).volume == 1
    assert simplex(3).volume == Fraction(1, 6)
    assert reeve(7).volume == Fraction(7, 6)
    tri = convex_hull([(0, 0, 0), (1, 0, 0), (0, 1, 0)])
    assert tri.dim == 2 and tri.volume == Fraction(1, 2)


def test_halfspaces_and_intersection():
    P = from_halfspaces([((1, 0), 2), ((-1, 0), 0), ((0, 1), 2), ((0, -1), 0), ((1, 1), 3)], (), 2)
    assert sorted(P.vertices) == [(0, 0), (0, 2), (1, 2), (2, 0), (2, 1)]
    Q = convex_hull([(1, 1), (3, 1), (1, 3), (3, 3)])
    I = intersection(P, Q)
    assert sorted(I.vertices) == [(1, 1), (1, 2), (2, 1)]
    assert from_halfspaces([((1, 0), -1), ((-1, 0), 0), ((0, 1), 1), ((0, -1), 0)], (), 2) is None


def test_json_round_trip():
    P = reeve(3)
    assert type(P).from_json(P.to_json()) == P


@settings(max_examples=40, deadline=None)
@given(points)
def test_hull_invariants(pts):
    P = convex_hull(pts)
    # every input point satisfies the H-description; vertices are among the inputs
    for p in pts:
        assert P.contains(p)
    assert set(P.vertices) <= set(pts)
    # Euler relation of the face lattice, including P itself
    assert sum((-1) ** i * f for i, f in enumerate(P.f_vector)) == 1
    # each facet is spanned by its tight vertices
    for F in P.faces_of_dim(P.dim - 1) if P.dim else []:
        assert len(F.vertex_set) >= P.dim


_H = 0.05
_GRID = np.stack(np.meshgrid(*[np.arange(-3, 3, _H) + _H / 2] * 3, indexing="ij"), -1).reshape(-1, 3)


@settings(max_examples=30, deadline=None)
@given(points)
def test_hull_volume_matches_grid_count(pts):
    P = convex_hull(pts)
    if not P.is_full_dim:
        return
    a = np.array([[float(x) for x in f] for f, _ in P.facets])
    b = np.array([float(c) for _, c in P.facets])
    approx = np.all(_GRID @ a.T <= b + 1e-12, axis=1).sum() * _H ** 3
    assert abs(approx - float(P.volume)) <= 0.12 * float(P.volume)
