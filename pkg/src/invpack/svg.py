"""SVG drawings of packings in the Poincare disk.

The disk maps to a circle of radius 480 centred in a 1000 x 1000 viewport,
with y pointing up. Coordinates are printed with a fixed number of decimals
so the same document always renders to the same bytes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .hypgeom import DiskError, EuclideanCircle, HyperbolicCircle, circumcircle, hyp_to_euc_circle
from .io import DocumentError, PackingDocument
from .metrics import HYPERBOLIC, power_center

SIZE = 1000
CENTER = 500.0
SCALE = 480.0
DIGITS = 3

VERTEX_STROKE = "#1f3a93"
CROSSING_STROKE = "#c0392b"
EDGE_STROKE = "#555555"
FACE_STROKE = "#2e8b57"


@dataclass
class RenderOptions:
    edges: str = "geodesic"          # "geodesic" or "chord"
    face_circles: bool = False
    labels: bool = False

    def __post_init__(self):
        if self.edges not in ("geodesic", "chord"):
            raise ValueError(f"edges must be 'geodesic' or 'chord', got {self.edges!r}")


def _num(x: float) -> str:
    s = f"{x:.{DIGITS}f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _xy(z: complex) -> tuple[str, str]:
    return _num(CENTER + SCALE * z.real), _num(CENTER - SCALE * z.imag)


def vertex_circles(doc: PackingDocument) -> dict[int, EuclideanCircle]:
    """Euclidean circles of the document, centred on the layout.

    Hyperbolic radii are converted around hyperbolic centres; Euclidean radii
    are used as-is, so those circles may leave the disk.
    """
    if not doc.layout:
        raise DocumentError("rendering needs layout positions", "layout")
    T = doc.T
    if doc.has_radii(HYPERBOLIC):
        r = doc.radii(HYPERBOLIC)
        return {v: hyp_to_euc_circle(HyperbolicCircle(doc.layout[v], float(r[T.index[v]])))
                for v in T.vertices}
    R = doc.radii()
    return {v: EuclideanCircle(doc.layout[v], float(R[T.index[v]])) for v in T.vertices}


def _geodesic_path(p: complex, q: complex) -> str:
    x1, y1 = _xy(p)
    x2, y2 = _xy(q)
    # the geodesic lies on the circle through p, q and the inverse of p
    far = p if abs(p) > abs(q) else q
    if abs((p.conjugate() * q).imag) < 1e-12 or far == 0:
        return f"M {x1} {y1} L {x2} {y2}"
    try:
        C = circumcircle(p, q, 1.0 / far.conjugate())
    except DiskError:
        return f"M {x1} {y1} L {x2} {y2}"
    cross = ((p - C.center).conjugate() * (q - C.center)).imag
    sweep = 0 if cross > 0 else 1   # y is flipped on screen
    rad = _num(SCALE * C.radius)
    return f"M {x1} {y1} A {rad} {rad} 0 0 {sweep} {x2} {y2}"


def render_svg(doc: PackingDocument, options: RenderOptions | None = None) -> str:
    options = options or RenderOptions()
    T = doc.T
    circles = vertex_circles(doc)
    pos = doc.layout
    ox, oy = _num(CENTER), _num(CENTER)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f'<defs><clipPath id="disk"><circle cx="{ox}" cy="{oy}" r="{_num(SCALE)}"/></clipPath></defs>',
        f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>',
        f'<circle class="disk-boundary" cx="{ox}" cy="{oy}" r="{_num(SCALE)}" fill="none" '
        'stroke="black" stroke-width="2"/>',
    ]

    if options.face_circles:
        for f, face in enumerate(T.faces):
            geo = power_center([circles[v].center for v in face], [circles[v].radius for v in face])
            fc = geo.face_circle()
            if fc is None:
                continue
            cx, cy = _xy(fc.center)
            lines.append(f'<circle class="face-circle" data-face="{f}" cx="{cx}" cy="{cy}" '
                         f'r="{_num(SCALE * fc.radius)}" fill="none" stroke="{FACE_STROKE}" '
                         'stroke-width="1" stroke-dasharray="6 4" clip-path="url(#disk)"/>')

    for i, j in T.edges:
        if options.edges == "chord":
            (x1, y1), (x2, y2) = _xy(pos[i]), _xy(pos[j])
            d = f"M {x1} {y1} L {x2} {y2}"
        else:
            d = _geodesic_path(pos[i], pos[j])
        lines.append(f'<path class="edge" data-edge="{i}-{j}" d="{d}" fill="none" '
                     f'stroke="{EDGE_STROKE}" stroke-width="1"/>')

    for v in T.vertices:
        C = circles[v]
        cx, cy = _xy(C.center)
        rad = _num(SCALE * C.radius)
        if C.inside_disk():
            lines.append(f'<circle class="vertex-circle" data-vertex="{v}" cx="{cx}" cy="{cy}" '
                         f'r="{rad}" fill="none" stroke="{VERTEX_STROKE}" stroke-width="1.5"/>')
        else:
            lines.append(f'<circle class="vertex-circle crossing" data-vertex="{v}" cx="{cx}" '
                         f'cy="{cy}" r="{rad}" fill="none" stroke="{CROSSING_STROKE}" '
                         'stroke-width="2" stroke-dasharray="2 2" clip-path="url(#disk)"/>')
        if options.labels:
            px, py = _xy(pos[v])
            lines.append(f'<text x="{px}" y="{py}" font-size="12" text-anchor="middle">{v}</text>')

    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def count_elements(svg: str) -> dict[str, int]:
    """Element counts used by tests and the CLI summary."""
    return {
        "vertex_circles": svg.count('class="vertex-circle'),
        "crossing_circles": svg.count('class="vertex-circle crossing"'),
        "edges": svg.count('class="edge"'),
        "face_circles": svg.count('class="face-circle"'),
        "disk_boundary": svg.count('class="disk-boundary"'),
    }

