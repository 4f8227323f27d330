"""JSON packing documents.

A document holds a triangulation, the edge weights and, optionally, radii,
labels, a disk layout and free-form metadata::

    {
      "version": "invpack/1",
      "geometry": "hyperbolic",
      "vertices": [{"id": 0, "boundary": false}, 1, 2],
      "faces": [[0, 1, 2]],
      "eta": {"0-1": 1.0, "0-2": 1.0, "1-2": 1.0},
      "radii_hyp": {"0": 0.5, "1": 0.5, "2": 0.5},
      "radii_euc": {...}, "labels_u": {...},
      "layout": {"0": [0.0, 0.0], ...},
      "metadata": {"regime": "(-1,1]", "seed": 3}
    }

Vertices may be bare ids or objects; boundary flags are recomputed from the
faces. ``labels_u`` follow ``geometry`` (ln tanh(r/2) or ln R). Floats are
written with ``repr``, which round-trips exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .mesh import Triangulation, TriangulationError, build_triangulation
from .metrics import EUCLIDEAN, HYPERBOLIC, check_geometry
from .solver import labels_to_radii, radii_to_labels

FORMAT_VERSION = "invpack/1"
_KNOWN_FIELDS = {"version", "geometry", "vertices", "faces", "eta", "radii_hyp", "radii_euc",
                 "labels_u", "layout", "metadata"}


class DocumentError(ValueError):
    """Malformed or inconsistent packing document."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.field = field
        self.line = line


@dataclass
class PackingDocument:
    T: Triangulation
    eta: np.ndarray
    geometry: str = HYPERBOLIC
    radii_hyp: np.ndarray | None = None
    radii_euc: np.ndarray | None = None
    labels_u: np.ndarray | None = None
    layout: dict[int, complex] | None = None
    metadata: dict = field(default_factory=dict)
    version: str = FORMAT_VERSION

    def radii(self, geometry: str | None = None) -> np.ndarray:
        """Radii in ``geometry`` (default: the document's), derived from labels if needed."""
        geometry = check_geometry(geometry or self.geometry)
        stored = self.radii_hyp if geometry == HYPERBOLIC else self.radii_euc
        if stored is not None:
            return stored
        if self.labels_u is not None and geometry == self.geometry:
            return labels_to_radii(self.labels_u, geometry)
        raise DocumentError(f"document has no {geometry} radii or labels", "radii")

    def has_radii(self, geometry: str | None = None) -> bool:
        try:
            self.radii(geometry)
        except DocumentError:
            return False
        return True

    def with_radii(self, radii, geometry: str | None = None) -> "PackingDocument":
        """Copy with new radii; labels are refreshed and the layout dropped."""
        geometry = check_geometry(geometry or self.geometry)
        radii = np.asarray(radii, float)
        doc = PackingDocument(self.T, self.eta.copy(), geometry, self.radii_hyp, self.radii_euc,
                              radii_to_labels(radii, geometry), None, dict(self.metadata), self.version)
        if geometry == HYPERBOLIC:
            doc.radii_hyp = radii
        else:
            doc.radii_euc = radii
        return doc

    # -- plain-data conversion ---------------------------------------------
    def to_dict(self) -> dict:
        T = self.T
        out = {
            "version": self.version,
            "geometry": self.geometry,
            "vertices": [{"id": v, "boundary": v in T.boundary} for v in T.vertices],
            "faces": [list(f) for f in T.faces],
            "eta": {f"{i}-{j}": float(x) for (i, j), x in zip(T.edges, self.eta)},
        }
        for name in ("radii_hyp", "radii_euc", "labels_u"):
            arr = getattr(self, name)
            if arr is not None:
                out[name] = {str(v): float(x) for v, x in zip(T.vertices, arr)}
        if self.layout is not None:
            out["layout"] = {str(v): [float(self.layout[v].real), float(self.layout[v].imag)]
                             for v in T.vertices}
        if self.metadata:
            out["metadata"] = self.metadata
        return out

    @classmethod
    def from_dict(cls, data) -> "PackingDocument":
        if not isinstance(data, dict):
            raise DocumentError("document must be a JSON object")
        unknown = sorted(set(data) - _KNOWN_FIELDS)
        if unknown:
            raise DocumentError(f"unknown field(s) {unknown}", unknown[0])
        version = data.get("version", FORMAT_VERSION)
        if version != FORMAT_VERSION:
            raise DocumentError(f"unsupported version {version!r}", "version")
        geometry = data.get("geometry", HYPERBOLIC)
        if geometry not in (HYPERBOLIC, EUCLIDEAN):
            raise DocumentError(f"unknown geometry {geometry!r}", "geometry")

        ids = _parse_vertices(data.get("vertices"))
        faces = _parse_faces(data.get("faces"), ids)
        try:
            T = build_triangulation(faces)
        except TriangulationError as exc:
            raise DocumentError(str(exc), "faces") from None
        isolated = sorted(set(ids) - set(T.vertices))
        if isolated:
            raise DocumentError(f"vertices {isolated[:5]} belong to no face", "vertices")

        eta = _parse_eta(data.get("eta"), T)
        doc = cls(T, eta, geometry, version=version)
        for name in ("radii_hyp", "radii_euc"):
            if data.get(name) is not None:
                arr = _parse_vertex_map(data[name], T, name)
                bad = [T.vertices[k] for k in np.flatnonzero(~(arr > 0) | ~np.isfinite(arr))]
                if bad:
                    raise DocumentError(f"radius must be positive and finite (vertices {bad[:5]})", name)
                setattr(doc, name, arr)
        if data.get("labels_u") is not None:
            arr = _parse_vertex_map(data["labels_u"], T, "labels_u")
            try:
                labels_to_radii(arr, geometry)
            except ValueError as exc:
                raise DocumentError(str(exc), "labels_u") from None
            doc.labels_u = arr
        if data.get("layout") is not None:
            doc.layout = _parse_layout(data["layout"], T)
        meta = data.get("metadata", {})
        if not isinstance(meta, dict):
            raise DocumentError("metadata must be an object", "metadata")
        doc.metadata = meta
        return doc

    @classmethod
    def from_packing(cls, T: Triangulation, eta, radii=None, geometry: str = HYPERBOLIC,
                     layout=None, metadata=None) -> "PackingDocument":
        doc = cls(T, T.edge_array(eta, "eta").copy(), check_geometry(geometry),
                  metadata=dict(metadata or {}))
        if radii is not None:
            doc = doc.with_radii(T.vertex_array(radii, "radii"), geometry)
        if layout is not None:
            doc.layout = {v: complex(layout[v]) for v in T.vertices}
        return doc


# -- field parsers ---------------------------------------------------------------

def _as_int(x, fieldname) -> int:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise DocumentError(f"expected an integer id, got {x!r}", fieldname)
    try:
        return int(x)
    except ValueError:
        raise DocumentError(f"expected an integer id, got {x!r}", fieldname) from None


def _as_float(x, fieldname) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise DocumentError(f"expected a number, got {x!r}", fieldname)
    return float(x)


def _parse_vertices(raw) -> list[int]:
    if not isinstance(raw, list) or not raw:
        raise DocumentError("vertices must be a non-empty list", "vertices")
    ids = []
    for k, item in enumerate(raw):
        name = f"vertices[{k}]"
        if isinstance(item, dict):
            if "id" not in item:
                raise DocumentError("vertex object needs an 'id'", name)
            ids.append(_as_int(item["id"], name))
        else:
            ids.append(_as_int(item, name))
    if len(set(ids)) != len(ids):
        raise DocumentError("duplicate vertex id", "vertices")
    if min(ids) < 0:
        raise DocumentError("vertex ids must be non-negative", "vertices")
    return ids


def _parse_faces(raw, ids) -> list[tuple[int, int, int]]:
    if not isinstance(raw, list) or not raw:
        raise DocumentError("faces must be a non-empty list", "faces")
    known = set(ids)
    faces = []
    for k, face in enumerate(raw):
        name = f"faces[{k}]"
        if not isinstance(face, list) or len(face) != 3:
            raise DocumentError("a face is a list of three vertex ids", name)
        f = tuple(_as_int(v, name) for v in face)
        unknown = [v for v in f if v not in known]
        if unknown:
            raise DocumentError(f"unknown vertex id {unknown[0]}", name)
        faces.append(f)
    return faces


def _parse_edge_key(key: str, fieldname: str) -> tuple[int, int]:
    parts = key.split("-")
    if len(parts) != 2:
        raise DocumentError(f"edge key {key!r} is not of the form 'i-j'", fieldname)
    i, j = (_as_int(p, fieldname) for p in parts)
    if not i < j:
        raise DocumentError(f"edge key {key!r} must have i < j", fieldname)
    return i, j


def _parse_eta(raw, T: Triangulation) -> np.ndarray:
    if not isinstance(raw, dict):
        raise DocumentError("eta must be an object keyed by 'i-j'", "eta")
    arr = np.full(T.n_edges, np.nan)
    for key, val in raw.items():
        name = f"eta.{key}"
        e = _parse_edge_key(key, name)
        if e not in T.edge_index:
            raise DocumentError(f"{key} is not an edge of the triangulation", name)
        x = _as_float(val, name)
        if not (x > -1.0 and math.isfinite(x)):
            raise DocumentError(f"eta must exceed -1 (got {x!r})", name)
        arr[T.edge_index[e]] = x
    missing = [T.edges[e] for e in np.flatnonzero(np.isnan(arr))]
    if missing:
        i, j = missing[0]
        raise DocumentError(f"missing weight for edge {i}-{j}", "eta")
    return arr


def _parse_vertex_map(raw, T: Triangulation, fieldname: str) -> np.ndarray:
    if not isinstance(raw, dict):
        raise DocumentError("expected an object keyed by vertex id", fieldname)
    out = {}
    for key, val in raw.items():
        name = f"{fieldname}.{key}"
        v = _as_int(key, name)
        if v not in T.index:
            raise DocumentError(f"unknown vertex id {v}", name)
        out[v] = _as_float(val, name)
    missing = [v for v in T.vertices if v not in out]
    if missing:
        raise DocumentError(f"missing values for vertices {missing[:5]}", fieldname)
    return np.array([out[v] for v in T.vertices])


def _parse_layout(raw, T: Triangulation) -> dict[int, complex]:
    if not isinstance(raw, dict):
        raise DocumentError("layout must be an object keyed by vertex id", "layout")
    pos = {}
    for key, val in raw.items():
        name = f"layout.{key}"
        v = _as_int(key, name)
        if v not in T.index:
            raise DocumentError(f"unknown vertex id {v}", name)
        if not isinstance(val, list) or len(val) != 2:
            raise DocumentError("a position is [x, y]", name)
        z = complex(_as_float(val[0], name), _as_float(val[1], name))
        if not abs(z) < 1.0:
            raise DocumentError("position must lie in the open unit disk", name)
        pos[v] = z
    missing = [v for v in T.vertices if v not in pos]
    if missing:
        raise DocumentError(f"missing positions for vertices {missing[:5]}", "layout")
    return pos


# -- files -------------------------------------------------------------------------

def loads(text: str) -> PackingDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc.msg} (column {exc.colno})", line=exc.lineno) from None
    return PackingDocument.from_dict(data)


def dumps(doc: PackingDocument) -> str:
    return json.dumps(doc.to_dict(), indent=2, allow_nan=False) + "\n"


def load(path) -> PackingDocument:
    return loads(Path(path).read_text())


def save(doc: PackingDocument, path) -> None:
    Path(path).write_text(dumps(doc))
