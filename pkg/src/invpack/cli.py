"""Command line interface.

Every command prints comma-separated rows on stdout. Exit status is 0 on
success, 1 when a check or theorem test fails, 2 on usage or input errors.
The default seed for ``verify`` comes from ``INVPACK_SEED`` (0 if unset).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import harness
from .hypgeom import DiskError, apply_mobius, mobius_to_origin
from .io import DocumentError, PackingDocument, dumps, load, save
from .mesh import (
    TriangulationError,
    check_regular_weight,
    check_structure_condition,
    hex_disk_triangulation,
    star_polygon,
    validate_weights,
)
from .metrics import EUCLIDEAN, HYPERBOLIC, DegenerateFaceError, edge_lengths, is_weighted_delaunay_packing
from .solver import (
    SolveConfig,
    SolverError,
    curvature_map,
    layout_in_disk,
    layout_in_plane,
    radii_to_labels,
    solve_prescribed_curvature,
)
from .svg import RenderOptions, count_elements, render_svg

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SUITES = ("max-principle", "schwarz", "scaling", "rigidity", "generalized")
SEED_ENV = "INVPACK_SEED"


class InputError(Exception):
    pass


def _writer(out):
    return csv.writer(out, lineterminator="\n")


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "pass" if x else "fail"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _load(path) -> PackingDocument:
    try:
        return load(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


# -- commands -----------------------------------------------------------------------

def cmd_make(args, out) -> int:
    if (args.star is None) == (args.hex is None):
        raise InputError("give exactly one of --star N or --hex RINGS")
    T = star_polygon(args.star) if args.star is not None else hex_disk_triangulation(args.hex)
    eta = validate_weights(T, args.eta)
    doc = PackingDocument.from_packing(T, eta, np.full(T.n_vertices, args.radius), args.geometry,
                                       metadata={"generator": "star" if args.star else "hex"})
    _emit_doc(doc, args.out, out)
    w = _writer(out if args.out else sys.stderr)
    w.writerow(["make", "vertices", T.n_vertices])
    w.writerow(["make", "faces", T.n_faces])
    w.writerow(["make", "edges", T.n_edges])
    return EXIT_OK


def _emit_doc(doc, path, out):
    if path:
        save(doc, path)
    else:
        out.write(dumps(doc))


def cmd_check(args, out) -> int:
    doc = _load(args.input)
    geometry = args.geometry or doc.geometry
    T = doc.T
    w = _writer(out)
    w.writerow(["check", "item", "status", "detail"])
    sc = check_structure_condition(T, doc.eta)
    reg = check_regular_weight(T, doc.eta)
    w.writerow(["check", "structure_condition", _fmt(sc.passed), len(sc.offending)])
    w.writerow(["check", "regular_weight", _fmt(reg.passed), len(reg.offending)])
    ok = sc.passed and reg.passed
    if doc.has_radii(geometry):
        try:
            rep = is_weighted_delaunay_packing(T, doc.eta, doc.radii(geometry), geometry)
            w.writerow(["check", "nondegenerate", "pass", 0])
            w.writerow(["check", "weighted_delaunay", _fmt(rep.ok), len(rep.failing)])
            for e, h in zip(rep.edges, rep.h_sums):
                w.writerow(["delaunay", f"{e[0]}-{e[1]}", _fmt(bool(h >= -1e-9)), _fmt(h)])
            ok = ok and rep.ok
        except DegenerateFaceError as exc:
            w.writerow(["check", "nondegenerate", "fail", str(exc)])
            ok = False
    else:
        w.writerow(["check", "weighted_delaunay", "skipped", f"no {geometry} radii"])
    return EXIT_OK if ok else EXIT_FAIL


def cmd_curvature(args, out) -> int:
    doc = _load(args.input)
    geometry = args.geometry or doc.geometry
    T = doc.T
    try:
        K = curvature_map(T, doc.eta, radii_to_labels(doc.radii(geometry), geometry), geometry)
    except DegenerateFaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    w = _writer(out)
    w.writerow(["vertex", "boundary", "K"])
    for v, k in zip(T.vertices, K):
        w.writerow([v, int(v in T.boundary), _fmt(k)])
    return EXIT_OK


def cmd_solve(args, out) -> int:
    doc = _load(args.input)
    geometry = args.geometry or doc.geometry
    T = doc.T
    radii = doc.radii(geometry)
    bnd = {v: float(radii[T.index[v]]) for v in T.boundary}
    config = SolveConfig(args.target_K, bnd, geometry, max_iterations=args.max_iterations,
                         residual_tol=args.tol)
    init = radii_to_labels(radii, geometry)
    try:
        rep = solve_prescribed_curvature(T, doc.eta, config, init)
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    w = _writer(out if args.output else sys.stderr)
    w.writerow(["solve", "converged", _fmt(rep.converged)])
    w.writerow(["solve", "iterations", rep.iterations])
    w.writerow(["solve", "residual", _fmt(rep.residual)])
    w.writerow(["solve", "message", rep.message])
    new = doc.with_radii(rep.radii, geometry)
    new.metadata["target_K"] = args.target_K
    _emit_doc(new, args.output, out)
    return EXIT_OK if rep.converged else EXIT_FAIL


def cmd_layout(args, out) -> int:
    doc = _load(args.input)
    geometry = args.geometry or doc.geometry
    T = doc.T
    radii = doc.radii(geometry)
    lengths = edge_lengths(T, doc.eta, radii, geometry)
    centre = T.interior[0] if T.interior else T.vertices[0]
    develop = layout_in_disk if geometry == HYPERBOLIC else layout_in_plane
    try:
        lay = develop(T, lengths, holonomy_tol=args.holonomy_tol)
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if geometry == HYPERBOLIC:
        m = mobius_to_origin(lay.positions[centre])
        doc.layout = {v: apply_mobius(m, z) for v, z in lay.positions.items()}
    else:
        shift = lay.positions[centre]
        pos = {v: z - shift for v, z in lay.positions.items()}
        extent = max(abs(pos[v]) + radii[T.index[v]] for v in T.vertices)
        s = args.fill / extent
        doc = doc.with_radii(radii * s, EUCLIDEAN)
        doc.layout = {v: z * s for v, z in pos.items()}
        doc.metadata["layout_scale"] = s
    w = _writer(out if args.output else sys.stderr)
    w.writerow(["layout", "closing_error", _fmt(lay.closing_error)])
    w.writerow(["layout", "centre_vertex", centre])
    _emit_doc(doc, args.output, out)
    return EXIT_OK


def cmd_render(args, out) -> int:
    doc = _load(args.input)
    if not doc.layout:
        raise InputError("document has no layout; run the layout command first")
    svg = render_svg(doc, RenderOptions(args.edges, args.face_circles, args.labels))
    if args.output:
        Path(args.output).write_text(svg)
        w = _writer(out)
        for k, v in count_elements(svg).items():
            w.writerow(["render", k, v])
    else:
        out.write(svg)
    return EXIT_OK


def _run_suite(suite, args, regimes) -> list[harness.TrialReport]:
    seed = args.seed
    if suite == "scaling":
        reps = harness.check_scaling_lemmas(seed, max(1, args.trials // 10))
        return list(reps.values())
    reports = []
    if suite == "rigidity":
        rings, inits = args.rings or 3, max(2, args.inits)
        tangency = harness.rigidity_experiment(rings, harness.REGIME_POSITIVE, inits, seed, eta=1.0)
        tangency.suite = "rigidity-tangency"
        tangency.params["regime"] = "eta=1"
        reports.append(tangency)
        for regime in regimes:
            reports.append(harness.rigidity_experiment(rings, regime, inits, seed))
        return reports
    for regime in regimes:
        if suite == "max-principle":
            reports.append(harness.run_max_principle(args.trials, regime, seed))
        elif suite == "generalized":
            reports.append(harness.run_generalized(args.trials, regime, seed))
        elif suite == "schwarz":
            reports.append(harness.run_schwarz(args.trials, regime, seed, rings=args.rings or 2))
    return reports


_CSV_FIELDS = ("suite", "regime", "trials", "non_vacuous", "non_vacuous_rate", "vacuous", "violations",
               "boundary", "skipped", "worst_margin", "seconds")


def _report_row(rep: harness.TrialReport, seconds: float) -> list:
    worst = rep.worst_margin if math.isfinite(rep.worst_margin) else ""
    return [rep.suite, rep.params.get("regime", ""), rep.trials, rep.hypothesis_count,
            f"{rep.non_vacuous_rate:.4f}", rep.vacuous, rep.violations, rep.boundary, rep.skipped,
            _fmt(worst) if worst != "" else "", f"{seconds:.3f}"]


def cmd_verify(args, out) -> int:
    if args.seed is None:
        args.seed = _default_seed()
    if args.trials < 1:
        raise InputError("--trials must be positive")
    suites = SUITES if args.suite == "all" else (args.suite,)
    regimes = harness.REGIMES if args.regime == "both" else (harness.canonical_regime(args.regime),)
    rows, reports = [], []
    for suite in suites:
        t0 = time.perf_counter()
        reps = _run_suite(suite, args, regimes)
        dt = (time.perf_counter() - t0) / max(1, len(reps))
        for rep in reps:
            rows.append(_report_row(rep, dt))
            reports.append(rep)
    w = _writer(out)
    w.writerow(_CSV_FIELDS)
    w.writerows(rows)
    if args.report_dir:
        _write_report_dir(Path(args.report_dir), rows, reports)
    return EXIT_FAIL if any(r.violations for r in reports) else EXIT_OK


def _write_report_dir(path: Path, rows, reports) -> None:
    from . import plotting

    path.mkdir(parents=True, exist_ok=True)
    with open(path / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_CSV_FIELDS)
        # timings vary between runs; keep the file byte-stable
        w.writerows(row[:-1] + [""] for row in rows)
    payload = {"version": "invpack/1", "reports": [r.to_dict() for r in reports]}
    (path / "reports.json").write_text(json.dumps(payload, indent=2, default=_json_default) + "\n")
    plotting.plot_outcomes(reports, path / "outcomes.png")
    for rep in reports:
        tag = "-".join(x for x in (rep.suite, _slug(rep.params.get("regime", ""))) if x)
        plotting.plot_margins(rep, path / f"margins_{tag}.png")


def _slug(regime: str) -> str:
    return {"(-1,1]": "unit", "[0,inf)": "positive", "eta=1": "tangency"}.get(regime, regime)


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return str(x)


# -- parser -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="invpack", description="Inversive distance circle packings.")
    sub = p.add_subparsers(dest="command", required=True)

    def doc_io(sp, output=False):
        sp.add_argument("--in", dest="input", required=True, help="packing document (JSON)")
        if output:
            sp.add_argument("--out", dest="output", help="write the resulting document here (default stdout)")
        sp.add_argument("--geometry", choices=(HYPERBOLIC, EUCLIDEAN), help="override the document geometry")

    sp = sub.add_parser("make", help="write a star or hexagonal-patch document")
    sp.add_argument("--star", type=int, metavar="N")
    sp.add_argument("--hex", type=int, metavar="RINGS")
    sp.add_argument("--eta", type=float, default=1.0)
    sp.add_argument("--radius", type=float, default=0.3)
    sp.add_argument("--geometry", choices=(HYPERBOLIC, EUCLIDEAN), default=HYPERBOLIC)
    sp.add_argument("--out", dest="out")
    sp.set_defaults(func=cmd_make)

    sp = sub.add_parser("check", help="structure condition, regularity and Delaunay report")
    doc_io(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("curvature", help="print the curvature at every vertex")
    doc_io(sp)
    sp.set_defaults(func=cmd_curvature)

    sp = sub.add_parser("solve", help="prescribed-curvature solve with fixed boundary radii")
    doc_io(sp, output=True)
    sp.add_argument("--target-K", dest="target_K", type=float, required=True)
    sp.add_argument("--max-iterations", type=int, default=50)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("layout", help="develop the packing into the disk")
    doc_io(sp, output=True)
    sp.add_argument("--holonomy-tol", type=float, default=1e-6)
    sp.add_argument("--fill", type=float, default=0.95, help="Euclidean layouts are scaled to this extent")
    sp.set_defaults(func=cmd_layout)

    sp = sub.add_parser("render", help="SVG drawing of a laid-out packing")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", dest="output")
    sp.add_argument("--edges", choices=("geodesic", "chord"), default="geodesic")
    sp.add_argument("--face-circles", action="store_true")
    sp.add_argument("--labels", action="store_true")
    sp.set_defaults(func=cmd_render)

    sp = sub.add_parser("verify", help="run the randomized theorem checks")
    sp.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=None, help=f"default: ${SEED_ENV} or 0")
    sp.add_argument("--rings", type=int, default=None, help="hexagonal rings (schwarz: 2, rigidity: 3)")
    sp.add_argument("--inits", type=int, default=10, help="initializations for the rigidity suite")
    sp.add_argument("--regime", choices=("(-1,1]", "[0,inf)", "unit", "positive", "both"), default="both")
    sp.add_argument("--report-dir", help="write summary.csv, reports.json and PNG figures here")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = sys.stdout
    try:
        return args.func(args, out)
    except (InputError, DocumentError, TriangulationError, DiskError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
