"""Combinatorial triangulated surfaces with edge weights.

Vertex, edge and weight data are stored as numpy arrays aligned with the
sorted vertex ids (``Triangulation.vertices``) and canonical edge keys
(``Triangulation.edges``). Mappings keyed by id or by ``(i, j)`` are accepted
anywhere an array is and converted with :meth:`Triangulation.vertex_array`
and :meth:`Triangulation.edge_array`.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

REGULAR_TOL = 1e-12


class TriangulationError(ValueError):
    """Raised for combinatorially invalid face lists."""


def edge_key(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True, eq=False)
class Triangulation:
    """An oriented triangulated surface, possibly with boundary.

    Built through :func:`build_triangulation`; the constructor trusts its
    arguments.
    """

    vertices: tuple[int, ...]
    faces: tuple[tuple[int, int, int], ...]
    edges: tuple[tuple[int, int], ...]
    edge_faces: tuple[tuple[int, ...], ...]
    boundary: frozenset[int]
    index: Mapping[int, int] = field(repr=False)
    edge_index: Mapping[tuple[int, int], int] = field(repr=False)

    # -- sizes and lookups ------------------------------------------------
    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def interior(self) -> tuple[int, ...]:
        return tuple(v for v in self.vertices if v not in self.boundary)

    def is_boundary(self, v: int) -> bool:
        return v in self.boundary

    def edge_id(self, i: int, j: int) -> int:
        return self.edge_index[edge_key(i, j)]

    def interior_edges(self) -> list[int]:
        return [e for e, fs in enumerate(self.edge_faces) if len(fs) == 2]

    # -- cached index arrays ----------------------------------------------
    @property
    def face_array(self) -> np.ndarray:
        """(F, 3) array of vertex positions (not ids) per face."""
        return _cached(self, "_face_array", lambda: np.array(
            [[self.index[v] for v in f] for f in self.faces], dtype=np.intp
        ).reshape(-1, 3))

    @property
    def face_edge_array(self) -> np.ndarray:
        """(F, 3) edge indices; column k is the edge opposite face corner k."""
        def build():
            out = np.empty((self.n_faces, 3), dtype=np.intp)
            for fi, (a, b, c) in enumerate(self.faces):
                out[fi] = (self.edge_id(b, c), self.edge_id(a, c), self.edge_id(a, b))
            return out
        return _cached(self, "_face_edge_array", build)

    @property
    def edge_vertex_array(self) -> np.ndarray:
        """(E, 2) vertex positions of each edge."""
        return _cached(self, "_edge_vertex_array", lambda: np.array(
            [[self.index[i], self.index[j]] for i, j in self.edges], dtype=np.intp
        ).reshape(-1, 2))

    @property
    def interior_mask(self) -> np.ndarray:
        return _cached(self, "_interior_mask", lambda: np.array(
            [v not in self.boundary for v in self.vertices], dtype=bool))

    # -- conversion helpers ------------------------------------------------
    def vertex_array(self, values, name: str = "value") -> np.ndarray:
        if isinstance(values, Mapping):
            missing = [v for v in self.vertices if v not in values]
            if missing:
                raise KeyError(f"{name} missing for vertices {missing[:5]}")
            return np.array([float(values[v]) for v in self.vertices])
        arr = np.asarray(values, dtype=float)
        if arr.shape != (self.n_vertices,):
            raise ValueError(f"{name} must have shape ({self.n_vertices},), got {arr.shape}")
        return arr

    def edge_array(self, values, name: str = "value") -> np.ndarray:
        if isinstance(values, Mapping):
            arr = np.full(self.n_edges, np.nan)
            for (i, j), val in values.items():
                arr[self.edge_id(i, j)] = float(val)
            if np.isnan(arr).any():
                missing = [self.edges[e] for e in np.flatnonzero(np.isnan(arr))]
                raise KeyError(f"{name} missing for edges {missing[:5]}")
            return arr
        if np.isscalar(values):
            return np.full(self.n_edges, float(values))
        arr = np.asarray(values, dtype=float)
        if arr.shape != (self.n_edges,):
            raise ValueError(f"{name} must have shape ({self.n_edges},), got {arr.shape}")
        return arr

    def vertex_map(self, arr) -> dict[int, float]:
        return {v: float(x) for v, x in zip(self.vertices, arr)}

    def edge_map(self, arr) -> dict[tuple[int, int], float]:
        return {e: float(x) for e, x in zip(self.edges, arr)}

    def neighbors(self, v: int) -> list[int]:
        out = set()
        for i, j in self.edges:
            if i == v:
                out.add(j)
            elif j == v:
                out.add(i)
        return sorted(out)


def _cached(obj, name, build):
    try:
        return obj.__dict__[name]
    except KeyError:
        val = build()
        object.__setattr__(obj, name, val)
        return val


def build_triangulation(raw_faces: Iterable[Sequence[int]]) -> Triangulation:
    """Validate a face list and derive edges, adjacency and boundary flags.

    Faces must be consistently oriented: every interior edge is traversed
    once in each direction.
    """
    faces: list[tuple[int, int, int]] = []
    seen: set[frozenset[int]] = set()
    for raw in raw_faces:
        f = tuple(int(v) for v in raw)
        if len(f) != 3:
            raise TriangulationError(f"face {raw!r} is not a triple")
        if min(f) < 0:
            raise TriangulationError(f"face {f} has a negative vertex id")
        if len(set(f)) != 3:
            raise TriangulationError(f"face {f} repeats a vertex")
        key = frozenset(f)
        if key in seen:
            raise TriangulationError(f"duplicate face {f}")
        seen.add(key)
        faces.append(f)
    if not faces:
        raise TriangulationError("no faces")

    incident: dict[tuple[int, int], list[int]] = defaultdict(list)
    directed: set[tuple[int, int]] = set()
    for fi, (a, b, c) in enumerate(faces):
        for i, j in ((a, b), (b, c), (c, a)):
            if (i, j) in directed:
                raise TriangulationError(
                    f"directed edge {i}->{j} used twice; faces are not consistently oriented")
            directed.add((i, j))
            incident[edge_key(i, j)].append(fi)
    for e, fs in incident.items():
        if len(fs) > 2:
            raise TriangulationError(f"edge {e} has {len(fs)} incident faces")

    vertices = tuple(sorted({v for f in faces for v in f}))
    _check_connected(faces)

    edges = tuple(sorted(incident))
    boundary = frozenset(v for e in edges if len(incident[e]) == 1 for v in e)
    return Triangulation(
        vertices=vertices,
        faces=tuple(faces),
        edges=edges,
        edge_faces=tuple(tuple(incident[e]) for e in edges),
        boundary=boundary,
        index={v: k for k, v in enumerate(vertices)},
        edge_index={e: k for k, e in enumerate(edges)},
    )


def _check_connected(faces):
    by_vertex = defaultdict(list)
    for fi, f in enumerate(faces):
        for v in f:
            by_vertex[v].append(fi)
    seen = {0}
    queue = deque([0])
    while queue:
        fi = queue.popleft()
        for v in faces[fi]:
            for g in by_vertex[v]:
                if g not in seen:
                    seen.add(g)
                    queue.append(g)
    if len(seen) != len(faces):
        raise TriangulationError("triangulation is disconnected")


def star_polygon(n: int) -> Triangulation:
    """Star triangulation: centre 0, boundary cycle 1..n, faces (0, i, i+1)."""
    if n < 3:
        raise ValueError(f"a star polygon needs n >= 3, got {n}")
    return build_triangulation((0, i, i % n + 1) for i in range(1, n + 1))


def hex_lattice_points(rings: int) -> list[tuple[int, int]]:
    """Axial lattice coordinates of a hexagonal patch, centre first, ring by ring."""
    pts = [(0, 0)]
    directions = [(-1, 1), (-1, 0), (0, -1), (1, -1), (1, 0), (0, 1)]
    for k in range(1, rings + 1):
        q, r = k, 0
        for dq, dr in directions:
            for _ in range(k):
                pts.append((q, r))
                q, r = q + dq, r + dr
    return pts


def hex_disk_triangulation(rings: int) -> Triangulation:
    """Triangular-lattice patch made of ``rings`` hexagonal rings around vertex 0."""
    if rings < 1:
        raise ValueError(f"rings must be >= 1, got {rings}")
    pts = hex_lattice_points(rings)
    ids = {p: k for k, p in enumerate(pts)}
    faces = []
    # down triangles do not contain their anchor, so scan a bounding box
    span = range(-rings - 1, rings + 1)
    for q, r in ((q, r) for r in span for q in span):
        up = [(q, r), (q + 1, r), (q, r + 1)]
        down = [(q + 1, r), (q + 1, r + 1), (q, r + 1)]
        for tri in (up, down):
            if all(p in ids for p in tri):
                faces.append(tuple(ids[p] for p in tri))
    # both templates are counterclockwise for x = q + r/2, y = r*sqrt(3)/2
    return build_triangulation(faces)


def hex_lattice_positions(rings: int) -> np.ndarray:
    pts = hex_lattice_points(rings)
    return np.array([q + r / 2 + 1j * r * np.sqrt(3) / 2 for q, r in pts])


# -- weight checks -----------------------------------------------------------

@dataclass
class WeightReport:
    passed: bool
    offending: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed


def validate_weights(T: Triangulation, eta) -> np.ndarray:
    arr = T.edge_array(eta, "eta")
    if not np.all(arr > -1.0):
        bad = [T.edges[e] for e in np.flatnonzero(~(arr > -1.0))]
        raise ValueError(f"eta must exceed -1 (edges {bad[:5]})")
    return arr


def check_structure_condition(T: Triangulation, eta) -> WeightReport:
    """Check eta_ij + eta_jk * eta_ik >= 0 cyclically on every face."""
    arr = T.edge_array(eta, "eta")
    fe = arr[T.face_edge_array]  # column k: edge opposite corner k
    a, b, c = fe[:, 0], fe[:, 1], fe[:, 2]
    ok = (a + b * c >= 0) & (b + a * c >= 0) & (c + a * b >= 0)
    offending = [T.faces[f] for f in np.flatnonzero(~ok)]
    return WeightReport(not offending, offending)


def check_regular_weight(T: Triangulation, eta, tol: float = REGULAR_TOL) -> WeightReport:
    """Detect interior edges v1v2 with eta12 = 1, eta13 = -eta23, eta14 = -eta24.

    Boundary edges have a single face and are never tested.
    """
    arr = T.edge_array(eta, "eta")
    offending = []
    for e in T.interior_edges():
        if abs(arr[e] - 1.0) > tol:
            continue
        v1, v2 = T.edges[e]
        ok_sides = []
        for fi in T.edge_faces[e]:
            (v3,) = set(T.faces[fi]) - {v1, v2}
            ok_sides.append(abs(arr[T.edge_id(v1, v3)] + arr[T.edge_id(v2, v3)]) <= tol)
        if all(ok_sides):
            offending.append((v1, v2))
    return WeightReport(not offending, offending)
