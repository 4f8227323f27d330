import math
import re

import numpy as np
import pytest

from invpack.io import DocumentError, PackingDocument, loads
from invpack.mesh import star_polygon
from invpack.metrics import HYPERBOLIC, edge_lengths_h
from invpack.solver import SolveConfig, layout_in_disk, solve_prescribed_curvature
from invpack.svg import SCALE, RenderOptions, _geodesic_path, _xy, count_elements, render_svg


@pytest.fixture(scope="module")
def hex_star_doc():
    T = star_polygon(6)
    rep = solve_prescribed_curvature(T, 1.0, SolveConfig(0.0, 0.3, HYPERBOLIC))
    lay = layout_in_disk(T, edge_lengths_h(T, 1.0, rep.radii))
    return PackingDocument.from_packing(T, 1.0, rep.radii, HYPERBOLIC, lay.positions)


def euclidean_triangle(radii, layout):
    text = """{"version": "invpack/1", "geometry": "euclidean", "vertices": [0, 1, 2],
    "faces": [[0, 1, 2]], "eta": {"0-1": 1, "1-2": 1, "0-2": 1},
    "radii_euc": {"0": %r, "1": %r, "2": %r},
    "layout": {"0": %s, "1": %s, "2": %s}}""" % (*radii, *(f"[{z.real}, {z.imag}]" for z in layout))
    return loads(text)


def test_hex_star_element_counts(hex_star_doc):
    counts = count_elements(render_svg(hex_star_doc))
    assert counts == {"vertex_circles": 7, "crossing_circles": 0, "edges": 12,
                      "face_circles": 0, "disk_boundary": 1}
    with_faces = count_elements(render_svg(hex_star_doc, RenderOptions(face_circles=True)))
    assert with_faces["face_circles"] == 6


def test_render_is_deterministic(hex_star_doc):
    opts = RenderOptions(edges="chord", face_circles=True, labels=True)
    assert render_svg(hex_star_doc, opts).encode() == render_svg(hex_star_doc, opts).encode()


def test_tangent_circles_drawn_touching(hex_star_doc):
    svg = render_svg(hex_star_doc)
    circ = {int(m[0]): (float(m[1]), float(m[2]), float(m[3])) for m in re.findall(
        r'data-vertex="(\d+)" cx="([-\d.]+)" cy="([-\d.]+)" r="([-\d.]+)"', svg)}
    for i, j in hex_star_doc.T.edges:
        (x1, y1, r1), (x2, y2, r2) = circ[i], circ[j]
        assert math.hypot(x1 - x2, y1 - y2) == pytest.approx(r1 + r2, abs=5e-3)


def test_crossing_circle_is_marked_and_clipped():
    doc = euclidean_triangle((0.1, 0.1, 0.4), [0j, 0.2 + 0j, 0.1 + 0.7j])
    svg = render_svg(doc)
    counts = count_elements(svg)
    assert counts["crossing_circles"] == 1 and counts["vertex_circles"] == 3
    line = next(l for l in svg.splitlines() if "crossing" in l)
    assert 'data-vertex="2"' in line and 'clip-path="url(#disk)"' in line


def test_virtual_face_circle_is_omitted():
    # three deeply overlapping circles have no real orthogonal circle
    doc = euclidean_triangle((0.3, 0.3, 0.3), [0j, 0.1 + 0j, 0.05 + 0.08j])
    assert count_elements(render_svg(doc, RenderOptions(face_circles=True)))["face_circles"] == 0


def test_missing_layout_raises(hex_star_doc):
    doc = PackingDocument.from_packing(hex_star_doc.T, 1.0, hex_star_doc.radii(), HYPERBOLIC)
    with pytest.raises(DocumentError):
        render_svg(doc)


def test_bad_edge_style():
    with pytest.raises(ValueError):
        RenderOptions(edges="spline")


def _svg_arc_centre(x1, y1, x2, y2, r, large, sweep):
    """Centre of an SVG elliptical arc with rx = ry = r, following the SVG endpoint conversion."""
    xp, yp = (x1 - x2) / 2, (y1 - y2) / 2
    rad = max(r * r - xp * xp - yp * yp, 0.0) / (xp * xp + yp * yp)
    coef = math.sqrt(rad) * (-1 if large == sweep else 1)
    return coef * yp + (x1 + x2) / 2, -coef * xp + (y1 + y2) / 2


def test_geodesic_arc_is_orthogonal_to_the_boundary():
    rng = np.random.default_rng(5)
    for _ in range(200):
        p, q = (complex(*rng.uniform(-0.6, 0.6, 2)) for _ in range(2))
        if abs((p.conjugate() * q).imag) < 1e-3:
            continue
        # independent solve: Re(conj(c) z) = (1 + |z|^2) / 2 for z = p, q
        A = np.array([[p.real, p.imag], [q.real, q.imag]])
        c = complex(*np.linalg.solve(A, [(1 + abs(p) ** 2) / 2, (1 + abs(q) ** 2) / 2]))
        R = math.sqrt(abs(c) ** 2 - 1)
        d = _geodesic_path(p, q)
        m = re.fullmatch(r"M (\S+) (\S+) A (\S+) \S+ 0 (\d) (\d) (\S+) (\S+)", d)
        assert m, d
        x1, y1, r, large, sweep, x2, y2 = m.groups()
        assert (x1, y1) == _xy(p) and (x2, y2) == _xy(q)
        assert float(r) == pytest.approx(SCALE * R, abs=1e-3)
        cx, cy = _svg_arc_centre(float(x1), float(y1), float(x2), float(y2), float(r), int(large), int(sweep))
        centre = complex((cx - 500) / SCALE, (500 - cy) / SCALE)
        assert abs(centre - c) < 1e-3 * max(1.0, R)


def test_geodesic_through_origin_is_straight():
    assert " L " in _geodesic_path(0.3 + 0.3j, -0.2 - 0.2j)
