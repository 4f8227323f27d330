import itertools

import numpy as np
import pytest

from invpack.mesh import (
    TriangulationError,
    build_triangulation,
    check_regular_weight,
    check_structure_condition,
    edge_key,
    hex_disk_triangulation,
    hex_lattice_positions,
    star_polygon,
    validate_weights,
)


def test_single_triangle():
    T = build_triangulation([(0, 1, 2)])
    assert T.n_edges == 3
    assert T.boundary == {0, 1, 2}
    assert T.interior == ()


def test_star_polygon_counts():
    T = star_polygon(6)
    assert (T.n_vertices, T.n_faces, T.n_edges) == (7, 6, 12)
    assert T.interior == (0,)
    assert T.neighbors(0) == [1, 2, 3, 4, 5, 6]


def test_star_polygon_too_small():
    with pytest.raises(ValueError):
        star_polygon(2)


@pytest.mark.parametrize("rings", [1, 2, 3, 4])
def test_hex_counts_match_closed_forms(rings):
    T = hex_disk_triangulation(rings)
    n = rings
    assert T.n_vertices == 3 * n * n + 3 * n + 1
    assert T.n_faces == 6 * n * n
    assert T.n_edges == 9 * n * n + 3 * n
    assert len(T.interior) == 3 * n * n - 3 * n + 1
    assert T.n_vertices - T.n_edges + T.n_faces == 1


@pytest.mark.parametrize("rings", [1, 2, 3])
def test_hex_faces_match_brute_force_enumeration(rings):
    # every triple of lattice points at mutual distance 1 is a face
    pos = hex_lattice_positions(rings)
    brute = {frozenset(t) for t in itertools.combinations(range(len(pos)), 3)
             if all(abs(abs(pos[a] - pos[b]) - 1.0) < 1e-9 for a, b in itertools.combinations(t, 2))}
    T = hex_disk_triangulation(rings)
    assert {frozenset(f) for f in T.faces} == brute


def test_hex_faces_counterclockwise():
    T = hex_disk_triangulation(3)
    pos = hex_lattice_positions(3)
    for a, b, c in T.faces:
        assert ((pos[b] - pos[a]).conjugate() * (pos[c] - pos[a])).imag > 0


@pytest.mark.parametrize("faces, match", [
    ([(0, 1)], "not a triple"),
    ([(0, 1, 1)], "repeats"),
    ([(0, 1, 2), (2, 1, 0)], "duplicate"),
    ([(0, 1, 2), (0, 1, 3)], "not consistently oriented"),
    ([(0, 1, 2), (3, 4, 5)], "disconnected"),
    ([(0, 1, -2)], "negative"),
    ([], "no faces"),
])
def test_invalid_face_lists(faces, match):
    with pytest.raises(TriangulationError, match=match):
        build_triangulation(faces)


def test_edge_with_three_faces_rejected():
    with pytest.raises(TriangulationError):
        build_triangulation([(0, 1, 2), (1, 0, 3), (0, 1, 4)])


def test_edge_array_accepts_mapping_and_scalar():
    T = star_polygon(3)
    m = {e: 0.5 for e in T.edges}
    assert np.allclose(T.edge_array(m), 0.5)
    assert np.allclose(T.edge_array(0.25), 0.25)
    with pytest.raises(KeyError):
        T.edge_array({(0, 1): 1.0})
    with pytest.raises(ValueError):
        T.edge_array(np.zeros(2))


def test_face_edge_array_is_opposite_edge():
    T = hex_disk_triangulation(2)
    for f, (a, b, c) in enumerate(T.faces):
        assert T.edges[T.face_edge_array[f, 0]] == edge_key(b, c)
        assert T.edges[T.face_edge_array[f, 2]] == edge_key(a, b)


def test_validate_weights_rejects_minus_one():
    T = star_polygon(3)
    with pytest.raises(ValueError, match="eta must exceed -1"):
        validate_weights(T, -1.0)
    assert validate_weights(T, -0.999).shape == (T.n_edges,)


def test_structure_condition():
    T = build_triangulation([(0, 1, 2)])
    assert check_structure_condition(T, {(0, 1): -0.5, (1, 2): 1.0, (0, 2): 1.0})
    # -0.5 + 0.6 * 0.6 < 0
    rep = check_structure_condition(T, {(0, 1): -0.5, (1, 2): 0.6, (0, 2): 0.6})
    assert not rep and rep.offending == [(0, 1, 2)]


def _two_faces(eta12, eta13, eta23, eta14, eta24):
    T = build_triangulation([(1, 2, 3), (2, 1, 4)])
    eta = {(1, 2): eta12, (1, 3): eta13, (2, 3): eta23, (1, 4): eta14, (2, 4): eta24}
    return T, eta


def test_regular_gate_rejects_exceptional_configuration():
    T, eta = _two_faces(1.0, 0.0, 0.0, 0.0, 0.0)
    rep = check_regular_weight(T, eta)
    assert not rep and rep.offending == [(1, 2)]
    T, eta = _two_faces(0.999, 0.0, 0.0, 0.0, 0.0)
    assert check_regular_weight(T, eta)


def test_regular_gate_needs_both_sides():
    T, eta = _two_faces(1.0, 0.3, -0.3, 0.2, 0.5)
    assert check_regular_weight(T, eta)
    T, eta = _two_faces(1.0, 0.3, -0.3, 0.2, -0.2)
    assert not check_regular_weight(T, eta)


def test_boundary_edges_not_tested_for_regularity():
    T = build_triangulation([(0, 1, 2)])
    assert check_regular_weight(T, {(0, 1): 1.0, (1, 2): 0.0, (0, 2): 0.0})
