"""Packing metrics: edge lengths, angles, curvature, power centres and the
weighted Delaunay predicate.

All per-edge and per-vertex data are arrays aligned with a
:class:`~invpack.mesh.Triangulation`. Geometry is one of ``"euclidean"`` or
``"hyperbolic"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hypgeom import EuclideanCircle, HyperbolicCircle, hyp_to_euc_circle, inversive_distance_euc
from .mesh import Triangulation

EUCLIDEAN = "euclidean"
HYPERBOLIC = "hyperbolic"
GEOMETRIES = (EUCLIDEAN, HYPERBOLIC)

DEGENERATE_TOL = 1e-12
DELAUNAY_TOL = 1e-9


class DegenerateFaceError(ValueError):
    def __init__(self, face, message: str = "degenerate triangle"):
        super().__init__(f"{message} (face {face})")
        self.face = face


def check_geometry(geometry: str) -> str:
    if geometry not in GEOMETRIES:
        raise ValueError(f"geometry must be one of {GEOMETRIES}, got {geometry!r}")
    return geometry


# -- edge lengths --------------------------------------------------------------

def hyperbolic_length(eta, ri, rj):
    """arccosh(cosh ri cosh rj + eta sinh ri sinh rj), cancellation-free.

    The argument minus one is 2 sinh^2((ri - rj)/2) + (1 + eta) sinh ri sinh rj.
    """
    eta, ri, rj = np.asarray(eta, float), np.asarray(ri, float), np.asarray(rj, float)
    t = 2.0 * np.sinh((ri - rj) / 2.0) ** 2 + (1.0 + eta) * np.sinh(ri) * np.sinh(rj)
    if np.any(t <= 0):
        raise ArithmeticError("arccosh argument <= 1; weights must exceed -1 and radii be positive")
    return np.log1p(t + np.sqrt(t * (t + 2.0)))


def euclidean_length(eta, Ri, Rj):
    eta, Ri, Rj = np.asarray(eta, float), np.asarray(Ri, float), np.asarray(Rj, float)
    with np.errstate(over="ignore", invalid="ignore"):
        return np.sqrt((Ri - Rj) ** 2 + 2.0 * (1.0 + eta) * Ri * Rj)


def edge_lengths_h(T: Triangulation, eta, r) -> np.ndarray:
    eta = T.edge_array(eta, "eta")
    r = T.vertex_array(r, "r")
    if np.any(r <= 0):
        raise ValueError("hyperbolic radii must be positive")
    e = T.edge_vertex_array
    return hyperbolic_length(eta, r[e[:, 0]], r[e[:, 1]])


def edge_lengths_e(T: Triangulation, eta, R) -> np.ndarray:
    eta = T.edge_array(eta, "eta")
    R = T.vertex_array(R, "R")
    if np.any(R <= 0):
        raise ValueError("Euclidean radii must be positive")
    e = T.edge_vertex_array
    return euclidean_length(eta, R[e[:, 0]], R[e[:, 1]])


def edge_lengths(T: Triangulation, eta, radii, geometry: str) -> np.ndarray:
    if check_geometry(geometry) == HYPERBOLIC:
        return edge_lengths_h(T, eta, radii)
    return edge_lengths_e(T, eta, radii)


# -- angles and curvature ------------------------------------------------------

def _angles(a, b, c, geometry):
    """Angles opposite sides a, b, c via half-angle formulas.

    Inputs are broadcastable arrays; returns (alpha, beta, gamma) and a mask
    of degenerate triangles.
    """
    with np.errstate(invalid="ignore", over="ignore"):
        s = (a + b + c) / 2.0
        sa, sb, sc = s - a, s - b, s - c
    scale = np.maximum(np.maximum(a, b), c)
    with np.errstate(invalid="ignore"):
        degenerate = ~(np.minimum(np.minimum(sa, sb), sc) * 2.0 > DEGENERATE_TOL * np.maximum(scale, 1.0))
    with np.errstate(invalid="ignore", over="ignore"):
        if geometry == HYPERBOLIC:
            s, sa, sb, sc = np.sinh(s), np.sinh(sa), np.sinh(sb), np.sinh(sc)
        sa, sb, sc = np.maximum(sa, 0.0), np.maximum(sb, 0.0), np.maximum(sc, 0.0)
        alpha = 2.0 * np.arctan2(np.sqrt(sb * sc), np.sqrt(s * sa))
        beta = 2.0 * np.arctan2(np.sqrt(sa * sc), np.sqrt(s * sb))
        gamma = 2.0 * np.arctan2(np.sqrt(sa * sb), np.sqrt(s * sc))
    return alpha, beta, gamma, degenerate


def triangle_angles(lengths, geometry: str, face=None) -> tuple[float, float, float]:
    """Angles of one triangle; ``lengths[k]`` is the side opposite corner k."""
    check_geometry(geometry)
    a, b, c = (float(x) for x in lengths)
    alpha, beta, gamma, deg = _angles(np.float64(a), np.float64(b), np.float64(c), geometry)
    if deg:
        raise DegenerateFaceError(face, f"triangle inequality fails for sides {(a, b, c)}")
    return float(alpha), float(beta), float(gamma)


def face_angles(T: Triangulation, lengths, geometry: str) -> np.ndarray:
    """(F, 3) angles; column k is the angle at corner k of each face."""
    check_geometry(geometry)
    L = np.asarray(lengths, float)[T.face_edge_array]
    alpha, beta, gamma, deg = _angles(L[:, 0], L[:, 1], L[:, 2], geometry)
    if deg.any():
        f = int(np.flatnonzero(deg)[0])
        raise DegenerateFaceError(T.faces[f])
    return np.stack([alpha, beta, gamma], axis=1)


def angle_table(T: Triangulation, angles: np.ndarray) -> dict[tuple[int, int], float]:
    return {(fi, v): float(angles[fi, k]) for fi, f in enumerate(T.faces) for k, v in enumerate(f)}


def curvature(T: Triangulation, angles) -> np.ndarray:
    """2pi minus the angle sum at interior vertices, pi minus it at boundary ones.

    ``angles`` is the (F, 3) array from :func:`face_angles` or a mapping
    (face index, vertex id) -> angle.
    """
    if isinstance(angles, dict):
        arr = np.empty((T.n_faces, 3))
        for fi, f in enumerate(T.faces):
            for k, v in enumerate(f):
                try:
                    arr[fi, k] = angles[(fi, v)]
                except KeyError:
                    raise KeyError(f"missing angle at vertex {v} of face {f}") from None
        angles = arr
    sums = np.bincount(T.face_array.ravel(), weights=np.asarray(angles).ravel(),
                       minlength=T.n_vertices)
    base = np.where(T.interior_mask, 2.0 * math.pi, math.pi)
    return base - sums


# -- power centres and weighted Delaunay ------------------------------------------

@dataclass(frozen=True)
class FaceGeometry:
    """Power centre data of one embedded face.

    ``h[k]`` is the signed distance from the centre to the side opposite
    corner k, positive towards the triangle.
    """

    center: complex
    power: float
    h: tuple[float, float, float]
    powers: tuple[float, float, float]

    @property
    def virtual(self) -> bool:
        return self.power <= 0

    def face_circle(self) -> EuclideanCircle | None:
        if self.virtual:
            return None
        return EuclideanCircle(self.center, math.sqrt(self.power))


def _power_centers(p1, p2, p3, R1, R2, R3):
    """Vectorised power centre of triangles given complex vertices and radii."""
    a, b = p2 - p1, p3 - p1
    # 2 c.(p_k - p1) = |p_k|^2 - |p1|^2 - R_k^2 + R1^2 with c measured from p1
    ra = (np.abs(a) ** 2 - R2 ** 2 + R1 ** 2) / 2.0
    rb = (np.abs(b) ** 2 - R3 ** 2 + R1 ** 2) / 2.0
    det = a.real * b.imag - a.imag * b.real
    cx = (ra * b.imag - rb * a.imag) / det
    cy = (a.real * rb - b.real * ra) / det
    return p1 + cx + 1j * cy, det


def _signed_dist(c, pi, pj, pk):
    """Distance from c to line pi pj, positive on the side of pk."""
    d = pj - pi
    cross_c = (d.conjugate() * (c - pi)).imag
    cross_k = (d.conjugate() * (pk - pi)).imag
    return np.sign(cross_k) * cross_c / np.abs(d)


def power_center(positions, radii) -> FaceGeometry:
    p = [complex(z) if not isinstance(z, (tuple, list)) else complex(*z) for z in positions]
    R = [float(x) for x in radii]
    with np.errstate(divide="ignore", invalid="ignore"):
        c, det = _power_centers(np.complex128(p[0]), p[1], p[2], R[0], R[1], R[2])
    if abs(det) <= 1e-14 * max(abs(p[1] - p[0]), abs(p[2] - p[0])) ** 2:
        raise DegenerateFaceError(tuple(p), "collinear face vertices")
    c = complex(c)
    powers = tuple(abs(c - p[k]) ** 2 - R[k] ** 2 for k in range(3))
    h = (
        float(_signed_dist(c, p[1], p[2], p[0])),
        float(_signed_dist(c, p[0], p[2], p[1])),
        float(_signed_dist(c, p[0], p[1], p[2])),
    )
    return FaceGeometry(c, powers[0], h, powers)


@dataclass(frozen=True)
class DelaunayEdgeResult:
    h_sum: float
    passed: bool
    # power of the far vertex's circle at c123 minus the face power; >= 0 iff Delaunay
    power_gap: float
    face_circle_eta: float | None = None


def is_weighted_delaunay_edge(p1, p2, p3, p4, R1, R2, R3, R4, tol: float = DELAUNAY_TOL) -> DelaunayEdgeResult:
    """Weighted Delaunay test of edge p1p2 shared by faces p1p2p3 and p1p2p4.

    p3 and p4 must lie on opposite sides of the line p1p2.
    """
    p1, p2, p3, p4 = (complex(z) for z in (p1, p2, p3, p4))
    s3 = ((p2 - p1).conjugate() * (p3 - p1)).imag
    s4 = ((p2 - p1).conjugate() * (p4 - p1)).imag
    if s3 * s4 >= 0:
        raise DegenerateFaceError((p1, p2, p3, p4), "quad not embedded on opposite sides")
    f3 = power_center((p1, p2, p3), (R1, R2, R3))
    f4 = power_center((p1, p2, p4), (R1, R2, R4))
    h_sum = f3.h[2] + f4.h[2]
    gap = abs(f3.center - p4) ** 2 - R4 ** 2 - f3.power
    eta = None
    if not f3.virtual:
        eta = inversive_distance_euc(EuclideanCircle(p4, R4), f3.face_circle())
    return DelaunayEdgeResult(h_sum, h_sum >= -tol, gap, eta)


@dataclass
class DelaunayReport:
    edges: list[tuple[int, int]]
    h_sums: np.ndarray
    passed: np.ndarray

    @property
    def ok(self) -> bool:
        return bool(np.all(self.passed))

    def __bool__(self) -> bool:
        return self.ok

    @property
    def failing(self) -> list[tuple[int, int]]:
        return [e for e, p in zip(self.edges, self.passed) if not p]


def _quads(T: Triangulation):
    """For each interior edge: (edge id, v1, v2, v3, v4) with v1v2v3 a CCW face."""
    out = []
    for e in T.interior_edges():
        f, g = T.edge_faces[e]
        face = T.faces[f]
        i, j = T.edges[e]
        # orient so v1 -> v2 is a directed edge of face f, v3 on its left
        k = face.index(i)
        if face[(k + 1) % 3] == j:
            v1, v2 = i, j
        else:
            v1, v2 = j, i
        (v3,) = set(face) - {i, j}
        (v4,) = set(T.faces[g]) - {i, j}
        out.append((e, v1, v2, v3, v4))
    return out


def quad_arrays(T: Triangulation):
    q = _quads(T)
    if not q:
        return np.zeros((0, 5), dtype=np.intp)
    return np.array(q, dtype=np.intp)


@dataclass(frozen=True)
class QuadIndex:
    """Index arrays for all interior-edge quads of a triangulation."""

    table: np.ndarray   # (Q, 5): edge id, v1, v2, v3, v4 (vertex ids)
    pos: np.ndarray     # (Q, 4): vertex positions of v1..v4
    e12: np.ndarray
    e13: np.ndarray
    e23: np.ndarray
    e14: np.ndarray
    e24: np.ndarray


def quad_index(T: Triangulation) -> QuadIndex:
    cache = T.__dict__.get("_quad_index")
    if cache is not None:
        return cache
    q = quad_arrays(T)
    pos = np.array([[T.index[int(v)] for v in row[1:]] for row in q], dtype=np.intp).reshape(-1, 4)

    def eids(a, b):
        return np.array([T.edge_id(int(x), int(y)) for x, y in zip(q[:, a], q[:, b])], dtype=np.intp)

    qi = QuadIndex(q, pos, eids(1, 2), eids(1, 3), eids(2, 3), eids(1, 4), eids(2, 4))
    object.__setattr__(T, "_quad_index", qi)
    return qi


def _h_sums_euclidean(p1, p2, p3, p4, R1, R2, R3, R4):
    c3, det3 = _power_centers(p1, p2, p3, R1, R2, R3)
    c4, det4 = _power_centers(p1, p2, p4, R1, R2, R4)
    return _signed_dist(c3, p1, p2, p3) + _signed_dist(c4, p1, p2, p4)


def _embed_third(L12, L13, L23, sign):
    """Planar position of a third vertex given p1 = 0, p2 = L12 on the x-axis."""
    x = (L12 ** 2 + L13 ** 2 - L23 ** 2) / (2.0 * L12)
    y = np.sqrt(np.maximum(L13 ** 2 - x ** 2, 0.0))
    return x + 1j * sign * y


def _check_faces(T, lengths, geometry):
    face_angles(T, lengths, geometry)


def delaunay_h_sums_pe(T: Triangulation, eta, R) -> tuple[np.ndarray, np.ndarray]:
    """h sums of every interior edge of a Euclidean packing, embedded quad by quad."""
    eta = T.edge_array(eta, "eta")
    R = T.vertex_array(R, "R")
    L = edge_lengths_e(T, eta, R)
    _check_faces(T, L, EUCLIDEAN)
    qi = quad_index(T)
    if len(qi.table) == 0:
        return qi.table, np.zeros(0)
    L12 = L[qi.e12]
    p1 = np.zeros(len(L12), complex)
    p2 = L12 + 0j
    p3 = _embed_third(L12, L[qi.e13], L[qi.e23], 1.0)
    p4 = _embed_third(L12, L[qi.e14], L[qi.e24], -1.0)
    Rq = R[qi.pos]
    hs = _h_sums_euclidean(p1, p2, p3, p4, Rq[:, 0], Rq[:, 1], Rq[:, 2], Rq[:, 3])
    return qi.table, hs


def _hyp_place(l, angle):
    return np.tanh(l / 2.0) * np.exp(1j * angle)


def _hyp_to_euc_arrays(center, r):
    """Vectorised :func:`hyp_to_euc_circle`."""
    d = 2.0 * np.arctanh(np.abs(center))
    lo = np.tanh((d - r) / 2.0)
    hi = np.tanh((d + r) / 2.0)
    mod = np.abs(center)
    u = np.where(mod > 0, center / np.where(mod > 0, mod, 1.0), 1.0 + 0j)
    return u * (lo + hi) / 2.0, (hi - lo) / 2.0


def layout_quads_ph(T: Triangulation, eta, r):
    """Disk layout of every interior-edge quad: v1 at 0, v2 on the positive real axis.

    Returns the quad table and, per quad, the four hyperbolic centres.
    """
    eta = T.edge_array(eta, "eta")
    r = T.vertex_array(r, "r")
    lengths = edge_lengths_h(T, eta, r)
    _check_faces(T, lengths, HYPERBOLIC)
    qi = quad_index(T)
    L12, L13, L23 = lengths[qi.e12], lengths[qi.e13], lengths[qi.e23]
    L14, L24 = lengths[qi.e14], lengths[qi.e24]
    a3 = _angles(L23, L13, L12, HYPERBOLIC)[0]  # angle at v1 in face v1v2v3
    a4 = _angles(L24, L14, L12, HYPERBOLIC)[0]
    n = len(qi.table)
    centers = np.stack([np.zeros(n, complex), _hyp_place(L12, 0.0),
                        _hyp_place(L13, a3), _hyp_place(L14, -a4)], axis=1).reshape(n, 4)
    return qi.table, centers


def delaunay_h_sums_ph(T: Triangulation, eta, r) -> tuple[np.ndarray, np.ndarray]:
    """h sums of the induced Euclidean circles of each hyperbolic quad."""
    r = T.vertex_array(r, "r")
    q, centers = layout_quads_ph(T, eta, r)
    if len(q) == 0:
        return q, np.zeros(0)
    ec, eR = _hyp_to_euc_arrays(centers, r[quad_index(T).pos])
    hs = _h_sums_euclidean(ec[:, 0], ec[:, 1], ec[:, 2], ec[:, 3], eR[:, 0], eR[:, 1], eR[:, 2], eR[:, 3])
    return q, hs


def is_weighted_delaunay_packing(T: Triangulation, eta, radii, geometry: str,
                                 tol: float = DELAUNAY_TOL) -> DelaunayReport:
    """Weighted Delaunay test over every interior edge.

    Hyperbolic packings are tested through the Euclidean circles of a disk
    layout of each quad; the predicate only depends on the circles.
    """
    if check_geometry(geometry) == EUCLIDEAN:
        q, hs = delaunay_h_sums_pe(T, eta, radii)
    else:
        q, hs = delaunay_h_sums_ph(T, eta, radii)
    edges = [T.edges[e] for e in q[:, 0]] if len(q) else []
    return DelaunayReport(edges, hs, hs >= -tol)


def quad_circles_ph(T: Triangulation, eta, r, edge) -> list[EuclideanCircle]:
    """Euclidean circles (v1, v2, v3, v4) of one interior-edge quad laid out in the disk."""
    r = T.vertex_array(r, "r")
    q, centers = layout_quads_ph(T, eta, r)
    row = [k for k, e in enumerate(q[:, 0]) if T.edges[e] == tuple(sorted(edge))]
    if not row:
        raise KeyError(f"{edge} is not an interior edge")
    k = row[0]
    return [hyp_to_euc_circle(HyperbolicCircle(complex(centers[k, m]), float(r[T.index[int(q[k, m + 1])]])))
            for m in range(4)]
