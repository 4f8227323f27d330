import json
import math

import numpy as np
import pytest

from invpack.io import DocumentError, PackingDocument, dumps, load, loads, save
from invpack.mesh import hex_disk_triangulation
from invpack.metrics import EUCLIDEAN, HYPERBOLIC

TRIANGLE = {
    "version": "invpack/1",
    "vertices": [0, 1, 2],
    "faces": [[0, 1, 2]],
    "eta": {"0-1": 1.0, "1-2": 0.5, "0-2": 0.25},
    "radii_hyp": {"0": 0.3, "1": 0.4, "2": 0.5},
}


def doc_text(**changes):
    d = json.loads(json.dumps(TRIANGLE))
    for k, v in changes.items():
        if v is None:
            d.pop(k, None)
        else:
            d[k] = v
    return json.dumps(d, indent=2)


def test_minimal_triangle_loads():
    doc = loads(doc_text())
    assert doc.T.n_edges == 3
    assert doc.geometry == HYPERBOLIC
    assert np.allclose(doc.radii(), [0.3, 0.4, 0.5])


def test_eta_minus_one_rejected():
    with pytest.raises(DocumentError, match="eta must exceed -1") as exc:
        loads(doc_text(eta={"0-1": -1.0, "1-2": 0.5, "0-2": 0.25}))
    assert exc.value.field == "eta.0-1"


@pytest.mark.parametrize("changes, field", [
    ({"faces": [[0, 1, 7]]}, "faces[0]"),
    ({"eta": {"0-1": 1.0, "1-2": 0.5}}, "eta"),
    ({"eta": {"1-0": 1.0, "1-2": 0.5, "0-2": 0.25}}, "eta.1-0"),
    ({"eta": {"0-1": "x", "1-2": 0.5, "0-2": 0.25}}, "eta.0-1"),
    ({"radii_hyp": {"0": 0.3, "1": 0.0, "2": 0.5}}, "radii_hyp"),
    ({"radii_hyp": {"0": 0.3, "1": 0.4, "9": 0.5}}, "radii_hyp.9"),
    ({"vertices": [0, 1, 2, 3]}, "vertices"),
    ({"color": "red"}, "color"),
    ({"version": "other/2"}, "version"),
    ({"labels_u": {"0": 0.1, "1": -1.0, "2": -1.0}}, "labels_u"),
    ({"layout": {"0": [0, 0], "1": [1.5, 0], "2": [0, 0.5]}}, "layout.1"),
])
def test_consistency_errors_name_the_field(changes, field):
    with pytest.raises(DocumentError) as exc:
        loads(doc_text(**changes))
    assert exc.value.field == field
    assert field in str(exc.value)


def test_parse_error_reports_line():
    text = doc_text().replace('"faces"', '"faces" oops', 1)
    with pytest.raises(DocumentError) as exc:
        loads(text)
    assert exc.value.line is not None and exc.value.line > 1
    assert f"line {exc.value.line}" in str(exc.value)


def test_round_trip(tmp_path):
    T = hex_disk_triangulation(2)
    rng = np.random.default_rng(0)
    radii = rng.uniform(0.1, 0.9, T.n_vertices)
    layout = {v: complex(*rng.uniform(-0.5, 0.5, 2)) for v in T.vertices}
    doc = PackingDocument.from_packing(T, rng.uniform(-0.5, 1.0, T.n_edges), radii, HYPERBOLIC, layout,
                                       {"seed": 3, "regime": "(-1,1]"})
    path = tmp_path / "doc.json"
    save(doc, path)
    back = load(path)
    assert back.to_dict() == doc.to_dict()
    assert dumps(back) == path.read_text()
    assert np.array_equal(back.radii(), radii)
    assert back.layout == layout


def test_labels_derive_radii():
    u = {"0": math.log(math.tanh(0.15)), "1": math.log(math.tanh(0.2)), "2": math.log(math.tanh(0.25))}
    doc = loads(doc_text(radii_hyp=None, labels_u=u))
    assert np.allclose(doc.radii(), [0.3, 0.4, 0.5])
    assert not doc.has_radii(EUCLIDEAN)
    with pytest.raises(DocumentError):
        doc.radii(EUCLIDEAN)


def test_vertex_objects_and_recomputed_boundary():
    doc = loads(doc_text(vertices=[{"id": 0, "boundary": False}, {"id": 1}, 2]))
    assert doc.T.boundary == {0, 1, 2}
    assert all(v["boundary"] for v in doc.to_dict()["vertices"])


def test_euclidean_document():
    doc = loads(doc_text(geometry="euclidean", radii_hyp=None, radii_euc={"0": 1, "1": 2, "2": 3}))
    assert doc.geometry == EUCLIDEAN and np.allclose(doc.radii(), [1, 2, 3])


def test_non_object_document():
    with pytest.raises(DocumentError):
        loads("[1, 2]")
