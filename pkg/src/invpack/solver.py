"""Prescribed-curvature solver and disk layout.

Unknowns are vertex labels: ``u = ln tanh(r/2)`` for hyperbolic packings and
``u = ln R`` for Euclidean ones. Boundary labels are held fixed; interior
labels are found by damped Newton iteration with a finite-difference
Jacobian.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .hypgeom import DiskMobius, apply_mobius, hyp_distance
from .mesh import Triangulation
from .metrics import (
    EUCLIDEAN,
    HYPERBOLIC,
    DegenerateFaceError,
    check_geometry,
    curvature,
    edge_lengths,
    face_angles,
    triangle_angles,
)

FD_STEP = 1e-6
HOLONOMY_TOL = 1e-6
DEFAULT_INTERIOR_U = math.log(math.tanh(0.25))


class SolverError(RuntimeError):
    pass


class HolonomyError(SolverError):
    """Developing the metric around a vertex does not close up."""


# -- labels ------------------------------------------------------------------

def radii_to_labels(radii, geometry: str) -> np.ndarray:
    radii = np.asarray(radii, float)
    if check_geometry(geometry) == HYPERBOLIC:
        return np.log(np.tanh(radii / 2.0))
    return np.log(radii)


def labels_to_radii(u, geometry: str) -> np.ndarray:
    u = np.asarray(u, float)
    if not np.all(np.isfinite(u)):
        raise ValueError("labels must be finite")
    if check_geometry(geometry) == HYPERBOLIC:
        if np.any(u >= 0):
            raise ValueError("hyperbolic labels must be negative")
        return 2.0 * np.arctanh(np.exp(u))
    with np.errstate(over="ignore"):
        R = np.exp(u)
    if not np.all(np.isfinite(R) & (R > 0)):
        raise ValueError("Euclidean labels out of floating range")
    return R


def curvature_map(T: Triangulation, eta, u, geometry: str) -> np.ndarray:
    """Combinatorial curvature at every vertex for labels ``u``."""
    u = T.vertex_array(u, "u")
    radii = labels_to_radii(u, geometry)
    lengths = edge_lengths(T, eta, radii, geometry)
    return curvature(T, face_angles(T, lengths, geometry))


def curvature_jacobian(T: Triangulation, eta, u, geometry: str, step: float = FD_STEP) -> np.ndarray:
    """Central-difference d K_interior / d u_interior."""
    u = T.vertex_array(u, "u").copy()
    eta = T.edge_array(eta, "eta")
    inner = np.flatnonzero(T.interior_mask)
    for h in (step, step * 1e-2):
        try:
            J = np.empty((len(inner), len(inner)))
            for col, k in enumerate(inner):
                up, dn = u.copy(), u.copy()
                up[k] += h
                dn[k] -= h
                J[:, col] = (curvature_map(T, eta, up, geometry)[inner]
                             - curvature_map(T, eta, dn, geometry)[inner]) / (2.0 * h)
            return J
        except (DegenerateFaceError, ValueError):
            continue
    raise DegenerateFaceError(None, "degenerate face at every finite-difference probe")


# -- Newton solve --------------------------------------------------------------

@dataclass
class SolveConfig:
    target_K: object                 # mapping interior id -> K, array over interior vertices, or scalar
    boundary_radii: object           # mapping boundary id -> radius, or array over boundary vertices
    geometry: str = HYPERBOLIC
    max_iterations: int = 50
    residual_tol: float = 1e-10
    step_damping: float = 1.0
    max_halvings: int = 30

    def __post_init__(self):
        check_geometry(self.geometry)
        if not self.residual_tol > 0:
            raise ValueError("residual_tol must be positive")
        if not 0 < self.step_damping <= 1:
            raise ValueError("step_damping must lie in (0, 1]")


@dataclass
class SolveReport:
    u: np.ndarray
    radii: np.ndarray
    residuals: list[float] = field(default_factory=list)
    converged: bool = False
    iterations: int = 0
    degenerate_incidents: int = 0
    message: str = ""

    @property
    def residual(self) -> float:
        return self.residuals[-1] if self.residuals else math.inf


def _per_subset(T: Triangulation, values, subset, name):
    ids = [T.vertices[k] for k in subset]
    if isinstance(values, Mapping):
        missing = [v for v in ids if v not in values]
        if missing:
            raise KeyError(f"{name} missing for vertices {missing[:5]}")
        return np.array([float(values[v]) for v in ids])
    if np.isscalar(values):
        return np.full(len(ids), float(values))
    arr = np.asarray(values, float)
    if arr.shape == (T.n_vertices,):
        return arr[subset]
    if arr.shape != (len(ids),):
        raise ValueError(f"{name} must cover {len(ids)} vertices, got shape {arr.shape}")
    return arr


def solve_prescribed_curvature(T: Triangulation, eta, config: SolveConfig, initial_u=None) -> SolveReport:
    """Damped Newton on interior labels with fixed boundary radii."""
    geometry = config.geometry
    eta = T.edge_array(eta, "eta")
    inner = np.flatnonzero(T.interior_mask)
    outer = np.flatnonzero(~T.interior_mask)
    target = _per_subset(T, config.target_K, inner, "target_K")
    bnd = _per_subset(T, config.boundary_radii, outer, "boundary_radii")
    if np.any(bnd <= 0):
        raise ValueError("boundary radii must be positive")

    if initial_u is None:
        u = np.full(T.n_vertices, DEFAULT_INTERIOR_U if geometry == HYPERBOLIC else 0.0)
    else:
        u = T.vertex_array(initial_u, "initial_u").copy()
    u[outer] = radii_to_labels(bnd, geometry)

    def residual_of(v):
        K = curvature_map(T, eta, v, geometry)
        return K[inner] - target

    report = SolveReport(u=u, radii=labels_to_radii(u, geometry))
    try:
        F = residual_of(u)
    except DegenerateFaceError as exc:
        raise SolverError(f"initial labels give a degenerate face: {exc}") from exc
    res = float(np.max(np.abs(F))) if len(F) else 0.0
    report.residuals.append(res)

    for it in range(config.max_iterations):
        if res <= config.residual_tol:
            break
        try:
            J = curvature_jacobian(T, eta, u, geometry)
        except DegenerateFaceError as exc:
            report.message = f"Jacobian probe failed: {exc}"
            break
        cond = np.linalg.cond(J)
        if not np.isfinite(cond) or cond > 1e14:
            report.message = f"singular Jacobian (condition estimate {cond:.3g})"
            break
        step = -np.linalg.solve(J, F)
        t = config.step_damping
        accepted = False
        for _ in range(config.max_halvings + 1):
            trial = u.copy()
            trial[inner] += t * step
            if geometry == HYPERBOLIC and np.any(trial >= 0):
                t /= 2.0
                continue
            try:
                F_new = residual_of(trial)
            except ValueError:  # includes DegenerateFaceError
                report.degenerate_incidents += 1
                t /= 2.0
                continue
            res_new = float(np.max(np.abs(F_new)))
            if res_new <= res:
                accepted = True
                break
            t /= 2.0
        report.iterations = it + 1
        if not accepted:
            report.message = f"line search failed; best residual {res:.3g}"
            break
        u, F, res = trial, F_new, res_new
        report.residuals.append(res)

    report.u = u
    report.radii = labels_to_radii(u, geometry)
    report.converged = res <= config.residual_tol
    if report.converged:
        report.message = "converged"
    elif not report.message:
        report.message = f"no convergence in {config.max_iterations} iterations; best residual {res:.3g}"
    return report


# -- developing map ------------------------------------------------------------

@dataclass
class DiskLayout:
    positions: dict[int, complex]
    orientation: dict[int, int]     # face index -> +1 counterclockwise, -1 clockwise
    closing_error: float = 0.0

    def position_array(self, T: Triangulation) -> np.ndarray:
        return np.array([self.positions[v] for v in T.vertices])


def _third_vertex(pa: complex, pb: complex, l_ac: float, angle_a: float) -> complex:
    """Third corner c of a counterclockwise hyperbolic triangle (a, b, c)."""
    m = DiskMobius(pa, 0.0)
    theta = -math.atan2(apply_mobius(m, pb).imag, apply_mobius(m, pb).real)
    m = DiskMobius(pa, theta)
    local = math.tanh(l_ac / 2.0) * complex(math.cos(angle_a), math.sin(angle_a))
    return apply_mobius(m.inverse(), local)


def _third_vertex_plane(pa: complex, pb: complex, l_ac: float, angle_a: float) -> complex:
    d = pb - pa
    return pa + l_ac * d / abs(d) * complex(math.cos(angle_a), math.sin(angle_a))


def _develop(T: Triangulation, lengths, geometry: str, seed_face: int, holonomy_tol: float) -> DiskLayout:
    lengths = T.edge_array(lengths, "lengths")
    hyperbolic = geometry == HYPERBOLIC
    third = _third_vertex if hyperbolic else _third_vertex_plane

    def length(i, j):
        return lengths[T.edge_id(i, j)]

    def corner_angle(face, k):
        a, b, c = face
        sides = (length(b, c), length(a, c), length(a, b))
        return triangle_angles(sides, geometry, face)[k]

    pos: dict[int, complex] = {}
    a, b, c = T.faces[seed_face]
    pos[a] = 0j
    first = length(a, b)
    pos[b] = complex(math.tanh(first / 2.0) if hyperbolic else first, 0.0)
    pos[c] = third(pos[a], pos[b], length(a, c), corner_angle(T.faces[seed_face], 0))

    face_nbrs: dict[int, list[int]] = {f: [] for f in range(T.n_faces)}
    for fs in T.edge_faces:
        if len(fs) == 2:
            face_nbrs[fs[0]].append(fs[1])
            face_nbrs[fs[1]].append(fs[0])

    done = {seed_face}
    queue = deque(face_nbrs[seed_face])
    worst = 0.0
    while queue:
        f = queue.popleft()
        if f in done:
            continue
        face = T.faces[f]
        for k in range(3):
            p, q, s = face[k], face[(k + 1) % 3], face[(k + 2) % 3]
            if p in pos and q in pos:
                break
        else:  # pragma: no cover - BFS always reaches a face through a placed edge
            raise SolverError(f"face {face} has no placed edge")
        z = third(pos[p], pos[q], length(p, s), corner_angle(face, k))
        if hyperbolic and not abs(z) < 1.0:
            raise SolverError(f"vertex {s} escapes the disk")
        if s in pos:
            gap = abs(z - pos[s])
            worst = max(worst, gap)
            if gap > holonomy_tol:
                raise HolonomyError(
                    f"vertex {s} placed twice {gap:.3g} apart; interior curvature is not zero")
        else:
            pos[s] = z
        done.add(f)
        queue.extend(g for g in face_nbrs[f] if g not in done)

    orientation = {}
    for f, (i, j, k) in enumerate(T.faces):
        cross = ((pos[j] - pos[i]).conjugate() * (pos[k] - pos[i])).imag
        orientation[f] = 1 if cross > 0 else -1
    return DiskLayout(pos, orientation, worst)


def layout_in_disk(T: Triangulation, lengths, seed_face: int = 0,
                   holonomy_tol: float = HOLONOMY_TOL) -> DiskLayout:
    """Develop a piecewise hyperbolic metric into the Poincare disk.

    The seed face gets its first vertex at the origin and its first edge on
    the positive real axis; the rest follows breadth first across shared
    edges. Placing a vertex twice is compared against the first placement.
    """
    return _develop(T, lengths, HYPERBOLIC, seed_face, holonomy_tol)


def layout_in_plane(T: Triangulation, lengths, seed_face: int = 0,
                    holonomy_tol: float = HOLONOMY_TOL) -> DiskLayout:
    """Euclidean counterpart of :func:`layout_in_disk`; positions are plane points."""
    return _develop(T, lengths, EUCLIDEAN, seed_face, holonomy_tol)


def layout_edge_lengths(T: Triangulation, layout: DiskLayout) -> np.ndarray:
    return np.array([hyp_distance(layout.positions[i], layout.positions[j]) for i, j in T.edges])
