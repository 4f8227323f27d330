import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from invpack.hypgeom import DiskMobius, HyperbolicCircle, apply_mobius_circle, hyp_distance, hyp_to_euc_circle
from invpack.mesh import build_triangulation, hex_disk_triangulation, star_polygon
from invpack.metrics import (
    EUCLIDEAN,
    HYPERBOLIC,
    DegenerateFaceError,
    curvature,
    delaunay_h_sums_pe,
    edge_lengths_e,
    edge_lengths_h,
    euclidean_length,
    face_angles,
    hyperbolic_length,
    is_weighted_delaunay_edge,
    is_weighted_delaunay_packing,
    layout_quads_ph,
    power_center,
    quad_circles_ph,
    quad_index,
    triangle_angles,
)

mpmath.mp.dps = 40


def mp_length(eta, ri, rj):
    ri, rj, eta = mpmath.mpf(ri), mpmath.mpf(rj), mpmath.mpf(eta)
    return float(mpmath.acosh(mpmath.cosh(ri) * mpmath.cosh(rj) + eta * mpmath.sinh(ri) * mpmath.sinh(rj)))


def test_hyperbolic_length_value():
    assert hyperbolic_length(0.0, 1.0, 1.0) == pytest.approx(1.513374006596504, abs=1e-15)


@pytest.mark.parametrize("eta, ri, rj", [
    (0.0, 1.0, 1.0), (1.0, 0.3, 2.0), (-0.99, 1e-4, 1e-4), (-0.999999, 0.5, 0.5), (5.0, 1e-6, 3.0),
])
def test_hyperbolic_length_matches_mpmath(eta, ri, rj):
    assert hyperbolic_length(eta, ri, rj) == pytest.approx(mp_length(eta, ri, rj), rel=1e-12)


def test_euclidean_length():
    assert euclidean_length(1.0, 1.0, 2.0) == pytest.approx(3.0)
    assert euclidean_length(0.0, 3.0, 4.0) == pytest.approx(5.0)


def test_hyperbolic_equilateral_angle():
    a = triangle_angles((1.0, 1.0, 1.0), HYPERBOLIC)
    ref = float(mpmath.acos(mpmath.cosh(1) / (1 + mpmath.cosh(1))))
    assert a[0] == pytest.approx(ref, abs=1e-14)
    assert math.cos(a[0]) == pytest.approx(0.6067761335170363, abs=1e-14)


def test_angle_sums():
    rng = np.random.default_rng(0)
    for _ in range(100):
        a, b = rng.uniform(0.1, 2.0, 2)
        c = rng.uniform(abs(a - b) + 1e-3, a + b - 1e-3)
        assert sum(triangle_angles((a, b, c), EUCLIDEAN)) == pytest.approx(math.pi, abs=1e-12)
        assert sum(triangle_angles((a, b, c), HYPERBOLIC)) < math.pi


def test_euclidean_law_of_cosines():
    a = triangle_angles((3.0, 4.0, 5.0), EUCLIDEAN)
    assert a[2] == pytest.approx(math.pi / 2)
    assert a[0] == pytest.approx(math.atan2(3, 4))


def test_degenerate_triangle_rejected():
    with pytest.raises(DegenerateFaceError):
        triangle_angles((1.0, 1.0, 2.0), EUCLIDEAN)
    with pytest.raises(DegenerateFaceError):
        triangle_angles((1.0, 1.0, 2.0 + 1e-15), HYPERBOLIC)
    with pytest.raises(DegenerateFaceError):
        triangle_angles((1.0, 1.0, float("nan")), EUCLIDEAN)


def test_flat_hexagon_curvature():
    T = star_polygon(6)
    L = edge_lengths_e(T, 1.0, np.ones(7))
    K = curvature(T, face_angles(T, L, EUCLIDEAN))
    assert abs(K[0]) < 1e-14
    assert np.allclose(K[1:], math.pi - 2 * math.pi / 3)


def test_hyperbolic_curvature_positive_for_equal_radii_hexagon():
    T = star_polygon(6)
    K = curvature(T, face_angles(T, edge_lengths_h(T, 1.0, np.full(7, 0.5)), HYPERBOLIC))
    assert K[0] > 0


def test_curvature_accepts_dict():
    T = star_polygon(3)
    ang = face_angles(T, edge_lengths_e(T, 1.0, np.ones(4)), EUCLIDEAN)
    table = {(f, T.faces[f][k]): ang[f, k] for f in range(T.n_faces) for k in range(3)}
    assert np.allclose(curvature(T, ang), curvature(T, table))


# -- power centre ----------------------------------------------------------------------

def test_power_center_example():
    g = power_center([0j, 4 + 0j, 4j], [1.0, 1.0, 3.0])
    assert abs(g.center - (2 + 1j)) < 1e-14
    assert g.power == pytest.approx(4.0)
    assert g.face_circle().radius == pytest.approx(2.0)


def test_power_center_brute_force_grid():
    rng = np.random.default_rng(5)
    for _ in range(20):
        p = rng.uniform(-1, 1, 3) + 1j * rng.uniform(-1, 1, 3)
        R = rng.uniform(0.05, 0.4, 3)
        try:
            g = power_center(p, R)
        except DegenerateFaceError:
            continue
        if abs(g.center) > 3:
            continue
        # grid search for the point of equal power
        xs = np.linspace(g.center.real - 0.05, g.center.real + 0.05, 201)
        ys = np.linspace(g.center.imag - 0.05, g.center.imag + 0.05, 201)
        X, Y = np.meshgrid(xs, ys)
        Z = X + 1j * Y
        pw = [np.abs(Z - p[k]) ** 2 - R[k] ** 2 for k in range(3)]
        spread = np.abs(pw[0] - pw[1]) + np.abs(pw[0] - pw[2])
        best = Z.flat[np.argmin(spread)]
        assert abs(best - g.center) <= 0.5e-3 * math.sqrt(2) + 1e-12
        assert max(g.powers) - min(g.powers) < 1e-12


def test_virtual_face_has_no_circle():
    g = power_center([0j, 1 + 0j, 0.5 + 0.8j], [0.9, 0.9, 0.9])
    assert g.virtual and g.face_circle() is None


def test_power_center_collinear():
    with pytest.raises(DegenerateFaceError):
        power_center([0j, 1 + 0j, 2 + 0j], [0.1, 0.1, 0.1])


# -- weighted Delaunay -----------------------------------------------------------

def incircle_exact(a, b, c, d):
    """Classical incircle determinant in exact rational arithmetic (> 0: d inside, abc ccw)."""
    rows = []
    for p in (a, b, c):
        dx, dy = Fraction(p[0]) - Fraction(d[0]), Fraction(p[1]) - Fraction(d[1])
        rows.append((dx, dy, dx * dx + dy * dy))
    (a1, a2, a3), (b1, b2, b3), (c1, c2, c3) = rows
    return a1 * (b2 * c3 - b3 * c2) - a2 * (b1 * c3 - b3 * c1) + a3 * (b1 * c2 - b2 * c1)


def orient_exact(a, b, c):
    return (Fraction(b[0]) - a[0]) * (Fraction(c[1]) - a[1]) - (Fraction(b[1]) - a[1]) * (Fraction(c[0]) - a[0])


def test_equal_radii_reduce_to_incircle():
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 300:
        pts = [tuple(int(x) for x in rng.integers(-20, 21, 2)) for _ in range(4)]
        a, b, c, d = pts
        if orient_exact(a, b, c) <= 0 or orient_exact(a, b, d) >= 0:
            continue
        R = float(rng.uniform(0.01, 1.0))
        z = [complex(*p) for p in pts]
        res = is_weighted_delaunay_edge(*z, R, R, R, R, tol=0.0 if incircle_exact(a, b, c, d) else 1e-9)
        assert res.passed == (incircle_exact(a, b, c, d) <= 0)
        checked += 1


def test_delaunay_edge_detects_point_inside():
    res = is_weighted_delaunay_edge(-1 + 0j, 1 + 0j, 2j, -0.1j, 0.01, 0.01, 0.01, 0.01)
    assert not res.passed and res.power_gap < 0
    res = is_weighted_delaunay_edge(-1 + 0j, 1 + 0j, 2j, -2j, 0.01, 0.01, 0.01, 0.01)
    assert res.passed and res.power_gap > 0


def test_h_sum_sign_matches_power_gap():
    rng = np.random.default_rng(3)
    for _ in range(500):
        p1, p2 = 0j, 1 + 0j
        p3 = complex(rng.uniform(-0.5, 1.5), rng.uniform(0.2, 1.5))
        p4 = complex(rng.uniform(-0.5, 1.5), -rng.uniform(0.2, 1.5))
        R = rng.uniform(0.01, 0.5, 4)
        res = is_weighted_delaunay_edge(p1, p2, p3, p4, *R)
        if abs(res.h_sum) > 1e-9:
            assert (res.h_sum > 0) == (res.power_gap > 0)


def test_same_side_quad_rejected():
    with pytest.raises(DegenerateFaceError):
        is_weighted_delaunay_edge(0j, 1 + 0j, 1j, 0.5 + 0.5j, 0.1, 0.1, 0.1, 0.1)


def test_tangency_hex_packing_is_delaunay():
    T = hex_disk_triangulation(2)
    assert is_weighted_delaunay_packing(T, 1.0, np.ones(T.n_vertices), EUCLIDEAN).ok
    assert is_weighted_delaunay_packing(T, 1.0, np.full(T.n_vertices, 0.3), HYPERBOLIC).ok


def test_pe_h_sums_match_direct_predicate():
    T = hex_disk_triangulation(1)
    rng = np.random.default_rng(4)
    R = rng.uniform(0.5, 1.5, T.n_vertices)
    q, hs = delaunay_h_sums_pe(T, 1.0, R)
    L = edge_lengths_e(T, 1.0, R)
    for row, h in zip(q, hs):
        e, v1, v2, v3, v4 = (int(x) for x in row)
        # rebuild the quad by hand
        l12 = L[T.edge_id(v1, v2)]
        def place(va, sign):
            a, b = L[T.edge_id(v1, va)], L[T.edge_id(v2, va)]
            x = (l12 ** 2 + a ** 2 - b ** 2) / (2 * l12)
            return complex(x, sign * math.sqrt(a * a - x * x))
        res = is_weighted_delaunay_edge(0j, l12 + 0j, place(v3, 1), place(v4, -1),
                                        *(R[T.index[v]] for v in (v1, v2, v3, v4)))
        assert res.h_sum == pytest.approx(h, abs=1e-12)


def test_ph_quad_layout_reproduces_lengths():
    T = hex_disk_triangulation(1)
    r = np.random.default_rng(6).uniform(0.1, 0.6, T.n_vertices)
    L = edge_lengths_h(T, 1.0, r)
    q, centers = layout_quads_ph(T, 1.0, r)
    for row, c in zip(q, centers):
        v = [int(x) for x in row[1:]]
        for a, b in ((0, 1), (0, 2), (1, 2), (0, 3), (1, 3)):
            assert hyp_distance(c[a], c[b]) == pytest.approx(L[T.edge_id(v[a], v[b])], rel=1e-10)


def test_ph_predicate_is_mobius_invariant():
    T = star_polygon(5)
    rng = np.random.default_rng(7)
    r = rng.uniform(0.05, 0.5, T.n_vertices)
    eta = rng.uniform(0.0, 1.0, T.n_edges)
    rep = is_weighted_delaunay_packing(T, eta, r, HYPERBOLIC)
    m = DiskMobius(0.4 - 0.3j, 1.1)
    for e, h in zip(rep.edges, rep.h_sums):
        circles = [apply_mobius_circle(m, C) for C in quad_circles_ph(T, eta, r, e)]
        res = is_weighted_delaunay_edge(*(C.center for C in circles), *(C.radius for C in circles))
        if abs(h) > 1e-8:
            assert res.passed == (h > 0)


def test_quad_index_cached():
    T = hex_disk_triangulation(2)
    assert quad_index(T) is quad_index(T)
    assert len(quad_index(T).table) == len(T.interior_edges())


def test_boundary_only_triangulation_has_empty_report():
    T = build_triangulation([(0, 1, 2)])
    rep = is_weighted_delaunay_packing(T, 1.0, np.ones(3), EUCLIDEAN)
    assert rep.ok and rep.edges == []


def test_hyperbolic_circle_conversion_used_by_ph():
    C = hyp_to_euc_circle(HyperbolicCircle(0.5 + 0j, 0.2))
    assert C.inside_disk()
