"""Randomised checks of the comparison principles for inversive distance packings.

Every check returns a :class:`TrialOutcome`; suites merge outcomes into a
:class:`TrialReport`. A ``violation`` is a hypothesis-satisfying instance
whose conclusion fails by more than ``BOUNDARY_TOL``; failures inside that
band are counted as ``boundary`` instead.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .hypgeom import (
    INDETERMINATE,
    EuclideanCircle,
    GeneralizedRadius,
    HyperbolicCircle,
    apply_mobius,
    euc_to_hyp_circle,
    gen_radius_ratio,
    generalized_radius,
    hyp_to_euc_circle,
    mobius_to_origin,
    scale_circle,
)
from .mesh import (
    Triangulation,
    check_regular_weight,
    check_structure_condition,
    hex_disk_triangulation,
    star_polygon,
)
from .metrics import (
    EUCLIDEAN,
    HYPERBOLIC,
    DegenerateFaceError,
    curvature,
    edge_lengths_e,
    edge_lengths_h,
    face_angles,
    is_weighted_delaunay_packing,
)
from .solver import (
    SolveConfig,
    SolverError,
    curvature_map,
    labels_to_radii,
    layout_in_disk,
    radii_to_labels,
    solve_prescribed_curvature,
)

BOUNDARY_TOL = 1e-12
SCHWARZ_SLACK = 1e-10
# curvature comparisons in the Schwarz hypotheses tolerate solver residuals
CURVATURE_SLACK = 1e-9
RIGIDITY_TOL = 1e-8

REGIME_UNIT = "(-1,1]"
REGIME_POSITIVE = "[0,inf)"
REGIMES = (REGIME_UNIT, REGIME_POSITIVE)
_REGIME_ALIASES = {
    "(-1,1]": REGIME_UNIT, "unit": REGIME_UNIT,
    "[0,inf)": REGIME_POSITIVE, "[0,∞)": REGIME_POSITIVE, "positive": REGIME_POSITIVE,
}
POSITIVE_ETA_MAX = 2.0
RADIUS_RANGE = (0.05, 0.5)


def canonical_regime(regime: str) -> str:
    try:
        return _REGIME_ALIASES[regime]
    except KeyError:
        raise ValueError(f"unknown weight regime {regime!r}; use '(-1,1]' or '[0,inf)'") from None


class RejectionError(RuntimeError):
    """The rejection sampler ran out of attempts."""


# -- reports -------------------------------------------------------------------

@dataclass
class TrialOutcome:
    status: str                 # "vacuous", "pass", "boundary", "violation"
    margin: float = math.nan    # signed distance from the strict conclusion; > 0 is a pass
    branch: str = ""
    seed: object = None
    detail: str = ""


@dataclass
class TrialReport:
    suite: str
    params: dict = field(default_factory=dict)
    trials: int = 0
    hypothesis_count: int = 0
    vacuous: int = 0
    violations: int = 0
    boundary: int = 0
    skipped: int = 0
    worst_margin: float = math.inf
    violation_seeds: list = field(default_factory=list)
    margins: list = field(default_factory=list)
    branches: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def add(self, outcome: TrialOutcome) -> None:
        self.trials += 1
        if outcome.status == "skipped":
            self.skipped += 1
            return
        if outcome.status == "vacuous":
            self.vacuous += 1
            return
        self.hypothesis_count += 1
        if outcome.branch:
            self.branches[outcome.branch] = self.branches.get(outcome.branch, 0) + 1
        if not math.isnan(outcome.margin):
            self.worst_margin = min(self.worst_margin, outcome.margin)
            self.margins.append(outcome.margin)
        if outcome.status == "violation":
            self.violations += 1
            self.violation_seeds.append(outcome.seed)
        elif outcome.status == "boundary":
            self.boundary += 1

    @property
    def non_vacuous_rate(self) -> float:
        n = self.trials - self.skipped
        return self.hypothesis_count / n if n else 0.0

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def summary(self) -> str:
        return (f"{self.suite}: trials={self.trials} non-vacuous={self.hypothesis_count} "
                f"({100 * self.non_vacuous_rate:.1f}%) violations={self.violations} "
                f"boundary={self.boundary} skipped={self.skipped} worst_margin={self.worst_margin:.3g}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("margins")
        d["non_vacuous_rate"] = self.non_vacuous_rate
        d["ok"] = self.ok
        d["violation_seeds"] = [list(s) if isinstance(s, tuple) else s for s in self.violation_seeds]
        if math.isinf(d["worst_margin"]):
            d["worst_margin"] = None
        return d


def _strict_outcome(margin: float, branch: str, seed, detail: str = "") -> TrialOutcome:
    if margin > 0:
        status = "pass"
    elif margin >= -BOUNDARY_TOL:
        status = "boundary"
    else:
        status = "violation"
    return TrialOutcome(status, margin, branch, seed, detail)


# -- weight sampling -------------------------------------------------------------

def sample_weights(T: Triangulation, regime: str, rng: np.random.Generator,
                   p_negative: float = 0.3, positive_max: float = POSITIVE_ETA_MAX) -> np.ndarray:
    """Edge weights in the regime satisfying the structure condition on every face.

    With weights in (-1, 1] a face can hold at most one negative weight e,
    and then e + a b >= 0 for the other two (positive) weights a, b is the
    binding inequality. Negative edges are chosen first, one per face at
    most, and drawn above the smallest such -a b.
    """
    regime = canonical_regime(regime)
    if regime == REGIME_POSITIVE:
        return rng.uniform(0.0, positive_max, T.n_edges)
    fe = T.face_edge_array
    faces_of_edge = [[] for _ in range(T.n_edges)]
    for f in range(T.n_faces):
        for e in fe[f]:
            faces_of_edge[e].append(f)
    negative = np.zeros(T.n_edges, dtype=bool)
    for e in rng.permutation(T.n_edges):
        if rng.random() < p_negative and not any(negative[fe[f]].any() for f in faces_of_edge[e]):
            negative[e] = True
    eta = 1.0 - rng.uniform(0.0, 1.0, T.n_edges)  # (0, 1]
    for e in np.flatnonzero(negative):
        bound = min(float(np.prod([eta[k] for k in fe[f] if k != e])) for f in faces_of_edge[e])
        eta[e] = -bound * rng.uniform(0.0, 1.0)
    return eta


def _log_uniform(rng, lo, hi, size):
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size))


# -- star instances ------------------------------------------------------------

def star_circles(T: Triangulation, eta, r) -> list[EuclideanCircle]:
    """Euclidean circles of a hyperbolic star packing with the centre vertex at 0.

    Boundary vertex v_i is placed at angle = sum of the angles at v0 of the
    faces before it; only its distance from the origin matters for radii.
    """
    r = T.vertex_array(r, "r")
    lengths = edge_lengths_h(T, eta, r)
    ang = face_angles(T, lengths, HYPERBOLIC)
    c0 = T.vertices[0]
    out = {c0: hyp_to_euc_circle(HyperbolicCircle(0j, float(r[0])))}
    theta = 0.0
    for fi, face in enumerate(T.faces):
        k = face.index(c0)
        nxt = face[(k + 1) % 3]
        if nxt not in out:
            l = lengths[T.edge_id(c0, nxt)]
            z = math.tanh(l / 2.0) * complex(math.cos(theta), math.sin(theta))
            out[nxt] = hyp_to_euc_circle(HyperbolicCircle(z, float(r[T.index[nxt]])))
        theta += ang[fi, k]
    for v in T.vertices:
        if v not in out:
            l = lengths[T.edge_id(c0, v)]
            out[v] = hyp_to_euc_circle(HyperbolicCircle(math.tanh(l / 2.0) + 0j, float(r[T.index[v]])))
    return [out[v] for v in T.vertices]


@dataclass
class StarInstance:
    T: Triangulation
    eta: np.ndarray
    r: np.ndarray
    r_bar: np.ndarray
    regime: str
    seed: object
    attempts: int = 1
    certificates: dict = field(default_factory=dict)

    @property
    def u(self) -> np.ndarray:
        return radii_to_labels(self.r, HYPERBOLIC)

    @property
    def u_bar(self) -> np.ndarray:
        return radii_to_labels(self.r_bar, HYPERBOLIC)

    @property
    def w(self) -> np.ndarray:
        return self.u_bar - self.u


def packing_certificates(T: Triangulation, eta, r) -> dict:
    """Hypothesis checks for a hyperbolic packing: weights, faces, Delaunay, circles in D."""
    cert = {
        "structure": bool(check_structure_condition(T, eta)),
        "regular": bool(check_regular_weight(T, eta)),
    }
    try:
        cert["delaunay"] = bool(is_weighted_delaunay_packing(T, eta, r, HYPERBOLIC))
        cert["nondegenerate"] = True
    except DegenerateFaceError:
        cert["delaunay"] = False
        cert["nondegenerate"] = False
    return cert


def _paired_radii(rng, r: np.ndarray) -> np.ndarray:
    """A second radius assignment: independent one time in five, else u shifted by a one-signed w."""
    if rng.random() < 0.2:
        return _log_uniform(rng, *RADIUS_RANGE, len(r))
    u = radii_to_labels(r, HYPERBOLIC)
    sign = 1.0 if rng.random() < 0.5 else -1.0
    u_bar = u + sign * rng.uniform(0.0, 0.6, len(r))
    return labels_to_radii(np.minimum(u_bar, -1e-3), HYPERBOLIC)


def random_star_instance(n: int, regime: str, seed, max_attempts: int = 10_000) -> StarInstance:
    """Rejection-sample a star instance satisfying every hypothesis of the maximum principle.

    The second packing is either independent of the first or a one-signed
    label shift of it, so both curvature branches are reached often.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    regime = canonical_regime(regime)
    rng = np.random.default_rng(seed)
    T = star_polygon(n)
    for attempt in range(1, max_attempts + 1):
        eta = sample_weights(T, regime, rng)
        r = _log_uniform(rng, *RADIUS_RANGE, T.n_vertices)
        r_bar = _paired_radii(rng, r)
        c1 = packing_certificates(T, eta, r)
        if not all(c1.values()):
            continue
        c2 = packing_certificates(T, eta, r_bar)
        if not all(c2.values()):
            continue
        inside = all(C.inside_disk() for C in star_circles(T, eta, r)) and \
            all(C.inside_disk() for C in star_circles(T, eta, r_bar))
        if not inside:
            continue
        cert = {k: c1[k] and c2[k] for k in c1}
        cert["inside_disk"] = True
        return StarInstance(T, eta, r, r_bar, regime, seed, attempt, cert)
    raise RejectionError(f"no valid star instance in {max_attempts} attempts (seed {seed})")


def check_max_principle(inst: StarInstance) -> TrialOutcome:
    """Interior value of w = u_bar - u never beats the boundary in the direction the curvature allows."""
    T = inst.T
    K = curvature_map(T, inst.eta, inst.u, HYPERBOLIC)
    K_bar = curvature_map(T, inst.eta, inst.u_bar, HYPERBOLIC)
    c = T.index[T.interior[0]]
    w = inst.w
    w0 = w[c]
    others = np.delete(w, c)
    if K[c] >= K_bar[c] and w0 > 0:
        return _strict_outcome(float(others.max() - w0), "i", inst.seed)
    if K[c] <= K_bar[c] and w0 < 0:
        return _strict_outcome(float(w0 - others.min()), "ii", inst.seed)
    return TrialOutcome("vacuous", seed=inst.seed)


def _trial_seeds(seed: int, trials: int):
    return [(int(seed), k) for k in range(trials)]


def run_max_principle(trials: int, regime: str, seed: int, n_range=(3, 8)) -> TrialReport:
    regime = canonical_regime(regime)
    report = TrialReport("max-principle", {"regime": regime, "seed": seed, "trials": trials,
                                           "n_range": list(n_range)})
    for s in _trial_seeds(seed, trials):
        n = int(np.random.default_rng(s).integers(n_range[0], n_range[1] + 1))
        try:
            inst = random_star_instance(n, regime, s)
        except RejectionError:
            report.add(TrialOutcome("skipped", seed=s))
            continue
        report.add(check_max_principle(inst))
    return report


# -- discrete Schwarz-Ahlfors lemma ------------------------------------------------------

def check_schwarz_lemma(T: Triangulation, eta, r, r_bar, seed=None) -> TrialOutcome:
    """Curvature and boundary comparison force radius comparison everywhere."""
    r = T.vertex_array(r, "r")
    r_bar = T.vertex_array(r_bar, "r_bar")
    for rad in (r, r_bar):
        if not all(packing_certificates(T, eta, rad).values()):
            return TrialOutcome("vacuous", seed=seed, detail="hypotheses of the lemma fail")
    K = curvature_map(T, eta, radii_to_labels(r, HYPERBOLIC), HYPERBOLIC)
    K_bar = curvature_map(T, eta, radii_to_labels(r_bar, HYPERBOLIC), HYPERBOLIC)
    inner = T.interior_mask
    outcomes = []
    if np.all(K[inner] >= K_bar[inner] - CURVATURE_SLACK) and np.all(r[~inner] >= r_bar[~inner]):
        outcomes.append(("a", float(np.min(r - r_bar))))
    if np.all(K[inner] <= K_bar[inner] + CURVATURE_SLACK) and np.all(r[~inner] <= r_bar[~inner]):
        outcomes.append(("b", float(np.min(r_bar - r))))
    if not outcomes:
        return TrialOutcome("vacuous", seed=seed)
    # conclusion is non-strict: r >= r_bar up to the solver slack
    branch, margin = min(outcomes, key=lambda t: t[1])
    status = "pass" if margin >= -SCHWARZ_SLACK else "violation"
    return TrialOutcome(status, margin, branch, seed)


def random_schwarz_pair(T: Triangulation, regime: str, seed, max_attempts: int = 200):
    """Two packings on T built so that one branch of the lemma's hypotheses holds.

    The first packing solves random small interior curvature targets; the
    second shrinks (branch a) or grows (branch b) its boundary radii and
    shifts the targets the matching way, then re-solves.
    """
    regime = canonical_regime(regime)
    rng = np.random.default_rng(seed)
    inner = T.interior_mask
    for _ in range(max_attempts):
        eta = sample_weights(T, regime, rng)
        if not check_regular_weight(T, eta):
            continue
        bnd = _log_uniform(rng, 0.1, 0.4, int((~inner).sum()))
        targets = rng.uniform(-0.2, 0.2, int(inner.sum()))
        base = _solve(T, eta, targets, bnd, rng)
        if base is None:
            continue
        branch = "a" if rng.random() < 0.5 else "b"
        sign = -1.0 if branch == "a" else 1.0
        K = curvature_map(T, eta, radii_to_labels(base, HYPERBOLIC), HYPERBOLIC)
        factor = 1.0 + sign * rng.uniform(0.001, 0.2, len(bnd))
        delta = rng.uniform(0.001, 0.05, len(targets))
        other = _solve(T, eta, K[inner] + sign * delta, base[~inner] * factor, rng)
        if other is None:
            continue
        return eta, base, other, branch
    raise RejectionError("could not build a Schwarz-lemma pair")


def _solve(T, eta, targets, bnd, rng):
    u0 = radii_to_labels(_log_uniform(rng, 0.1, 0.4, T.n_vertices), HYPERBOLIC)
    try:
        rep = solve_prescribed_curvature(T, eta, SolveConfig(targets, bnd, HYPERBOLIC), u0)
    except (SolverError, DegenerateFaceError, ValueError):
        return None
    if not rep.converged:
        return None
    return rep.radii


def run_schwarz(trials: int, regime: str, seed: int, rings: int = 2) -> TrialReport:
    regime = canonical_regime(regime)
    T = hex_disk_triangulation(rings)
    report = TrialReport("schwarz", {"regime": regime, "seed": seed, "trials": trials, "rings": rings})
    for s in _trial_seeds(seed, trials):
        try:
            eta, r, r_bar, _ = random_schwarz_pair(T, regime, s)
        except RejectionError:
            report.add(TrialOutcome("skipped", seed=s))
            continue
        report.add(check_schwarz_lemma(T, eta, r, r_bar, seed=s))
    return report


# -- scaling lemmas -----------------------------------------------------------------

def scaling_ratio(x: float, y: float, lam: float) -> float:
    """tanh(r1^lam / 2) / tanh(r1 / 2) for the circle through x < y on the real axis."""
    num = lam * (1.0 - x * y + math.sqrt((1.0 - x * x) * (1.0 - y * y)))
    den = 1.0 - lam * lam * x * y + math.sqrt((1.0 - (lam * x) ** 2) * (1.0 - (lam * y) ** 2))
    return num / den


def scaling_gap(x: float, y: float, lam: float) -> float:
    """f(lam): the ratio above minus the centre circle's ratio, which is lam."""
    return scaling_ratio(x, y, lam) - lam


def _pair_circles(R0: float, R1: float, eta01: float) -> tuple[EuclideanCircle, EuclideanCircle]:
    L = math.sqrt((R0 - R1) ** 2 + 2.0 * (1.0 + eta01) * R0 * R1)
    return EuclideanCircle(0j, R0), EuclideanCircle(L + 0j, R1)


def _max_contained_R1(R0: float, eta01: float) -> float:
    # L + R1 <= 1 with L^2 = R0^2 + R1^2 + 2 eta R0 R1
    return (1.0 - R0 * R0) / (2.0 * (1.0 + eta01 * R0))


def hyperbolic_radius_of_neighbor(R0: float, R1: float, eta01: float) -> float:
    """Hyperbolic radius of C1 for C0 centred at 0 with inversive distance eta01."""
    return euc_to_hyp_circle(_pair_circles(R0, R1, eta01)[1]).radius


def check_scaling_lemmas(seed: int, trials: int, grid: int = 40) -> dict[str, TrialReport]:
    """Monotonicity of r1 in R1, f(lam) < 0, and the generalized ratio inequality."""
    rng = np.random.default_rng(seed)
    mono = TrialReport("scaling-monotone", {"seed": seed, "trials": trials, "grid": grid})
    gap = TrialReport("scaling-gap", {"seed": seed, "trials": 10 * trials})
    gen = TrialReport("scaling-generalized", {"seed": seed, "trials": trials})

    for k in range(trials):
        R0 = rng.uniform(0.05, 0.9)
        eta01 = rng.uniform(-0.99, 3.0)
        top = _max_contained_R1(R0, eta01)
        if top <= 0:
            mono.add(TrialOutcome("skipped", seed=(seed, k)))
            continue
        R1s = np.linspace(top * 1e-3, top * (1 - 1e-6), grid)
        r1 = np.array([hyperbolic_radius_of_neighbor(R0, R1, eta01) for R1 in R1s])
        mono.add(_strict_outcome(float(np.min(np.diff(r1))), "monotone", (seed, k)))

    for k in range(10 * trials):
        y = rng.uniform(0.0, 1.0)
        x = rng.uniform(-y, y)
        lam = rng.uniform(0.0, 1.0)
        if not (abs(x) < y < 1.0 and 0.0 < lam < 1.0):
            gap.add(TrialOutcome("skipped", seed=(seed, k)))
            continue
        gap.add(_strict_outcome(-scaling_gap(x, y, lam), "f<0", (seed, k)))
    gap.extra["f_at_one_max"] = max(abs(scaling_gap(x, y, 1.0)) for x, y in
                                    [(-0.2, 0.6), (0.1, 0.9), (-0.8, 0.85), (0.0, 0.3)])

    for k in range(trials):
        gen.add(_generalized_ratio_trial(rng, (seed, k)))
    return {"monotone": mono, "gap": gap, "generalized": gen}


def _generalized_ratio_trial(rng, seed) -> TrialOutcome:
    R0 = rng.uniform(0.05, 0.9)
    eta01 = rng.uniform(-0.99, 3.0)
    top = _max_contained_R1(R0, eta01)
    contained = rng.random() < 0.5 and top > 0
    if contained:
        R1 = rng.uniform(top * 1e-3, top * (1 - 1e-6))
    else:
        R1 = top + rng.uniform(1e-6, 2.0)
    C0, C1 = _pair_circles(R0, R1, eta01)
    if not C1.meets_disk():
        return TrialOutcome("vacuous", seed=seed, detail="C1 outside the disk")
    # lam C1 must lie inside D
    lam_max = 1.0 / (abs(C1.center) + C1.radius)
    lam = rng.uniform(0.0, min(1.0, lam_max))
    if not 0 < lam < 1 or not scale_circle(lam, C1).inside_disk():
        return TrialOutcome("vacuous", seed=seed)
    rho0, rho1 = generalized_radius(C0), generalized_radius(C1)
    rho0l = generalized_radius(scale_circle(lam, C0))
    rho1l = generalized_radius(scale_circle(lam, C1))
    lhs = gen_radius_ratio(rho1l, rho0l)
    rhs = gen_radius_ratio(rho1, rho0)
    if lhs is INDETERMINATE or rhs is INDETERMINATE:
        return TrialOutcome("skipped", seed=seed, detail="indeterminate ratio")
    branch = "finite" if not rho1.infinite else "infinite"
    if math.isinf(rhs):
        margin = math.inf if not math.isinf(lhs) else 0.0
    else:
        margin = rhs - lhs
    return _strict_outcome(margin, branch, seed)


# -- rigidity ----------------------------------------------------------------------

def rigidity_experiment(rings: int, regime: str, inits: int, seed: int,
                        eta=None, mu: float = 1.05, max_redraws: int = 1000) -> TrialReport:
    """Solve K = 0 inside a hexagonal patch from several starts and compare.

    ``eta`` overrides the sampled weights (pass 1.0 for tangency packings).
    """
    if inits < 2:
        raise ValueError("need at least two initializations")
    regime = canonical_regime(regime)
    rng = np.random.default_rng(seed)
    T = hex_disk_triangulation(rings)
    if eta is None:
        eta = sample_weights(T, regime, rng)
    eta = T.edge_array(eta, "eta")
    inner = T.interior_mask
    bnd = _log_uniform(rng, 0.2, 0.5, int((~inner).sum()))
    report = TrialReport("rigidity", {"rings": rings, "regime": regime, "inits": inits, "seed": seed,
                                      "mu": mu})
    sols = []
    config = SolveConfig(0.0, bnd, HYPERBOLIC)
    for k in range(inits):
        # weights above 1 make many radius draws degenerate; redraw the start until it is not
        rep, detail = None, ""
        for _ in range(max_redraws):
            u0 = radii_to_labels(_log_uniform(rng, 0.05, 1.0, T.n_vertices), HYPERBOLIC)
            try:
                rep = solve_prescribed_curvature(T, eta, config, u0)
                break
            except (SolverError, DegenerateFaceError) as exc:
                detail = str(exc)
        if rep is None:
            report.add(TrialOutcome("skipped", seed=(seed, k), detail=detail))
            continue
        if not rep.converged:
            report.add(TrialOutcome("skipped", seed=(seed, k), detail=rep.message))
            continue
        sols.append(rep.u)
    report.extra["converged"] = len(sols)
    if len(sols) < 2:
        return report
    spread = max(float(np.max(np.abs(a - b))) for a, b in itertools.combinations(sols, 2))
    report.extra["max_pairwise_u_difference"] = spread
    for k in range(1, len(sols)):
        diff = float(np.max(np.abs(sols[k] - sols[0])))
        status = "pass" if diff < RIGIDITY_TOL else "violation"
        report.add(TrialOutcome(status, RIGIDITY_TOL - diff, "agree", (seed, k)))
    radii = labels_to_radii(sols[0], HYPERBOLIC)
    cert = packing_certificates(T, eta, radii)
    report.extra["certificates"] = cert
    probe = mu_scaling_probe(T, eta, radii, labels_to_radii(sols[-1], HYPERBOLIC), mu)
    report.extra["mu_probe"] = probe
    if probe["rho_mu_above_rho_bar"] < probe["exited"]:
        report.add(TrialOutcome("violation", branch="mu-probe", seed=seed))
    return report


def _centred_circles(T: Triangulation, eta, r) -> tuple[dict, float]:
    """Euclidean circles of a laid-out packing with the first interior vertex at the origin."""
    lay = layout_in_disk(T, edge_lengths_h(T, eta, r))
    m = mobius_to_origin(lay.positions[T.interior[0]])
    circles = {v: hyp_to_euc_circle(HyperbolicCircle(apply_mobius(m, lay.positions[v]), float(r[T.index[v]])))
               for v in T.vertices}
    return circles, lay.closing_error


def mu_scaling_probe(T: Triangulation, eta, r, r_bar, mu: float = 1.05) -> dict:
    """Push the packing r against the unit circle, scale by mu, compare generalized radii with r_bar.

    Both packings are centred on the first interior vertex. r is first
    blown up until it touches the unit circle, then scaled by mu; every
    boundary circle that leaves the disk must get a generalized radius above
    the matching r_bar one.
    """
    circles, err = _centred_circles(T, eta, r)
    circles_bar, err_bar = _centred_circles(T, eta, r_bar)
    fill = 1.0 / max(abs(C.center) + C.radius for C in circles.values())
    exited, ok = 0, 0
    for v in T.boundary:
        C = scale_circle(mu * fill, circles[v])
        if C.inside_disk():
            continue
        exited += 1
        ok += generalized_radius(C) > generalized_radius(circles_bar[v])
    return {"boundary_vertices": len(T.boundary), "exited": exited, "rho_mu_above_rho_bar": ok,
            "fill_scale": fill, "closing_error": max(err, err_bar)}


# -- generalized maximum principle --------------------------------------------------------

@dataclass
class GeneralizedStarInstance:
    T: Triangulation
    eta: np.ndarray
    circles: list[EuclideanCircle]   # packing r, centre vertex at the origin; may leave D
    r_bar: np.ndarray
    seed: object = None
    scale: float = 1.0

    def rho(self) -> list[GeneralizedRadius]:
        return [generalized_radius(C) for C in self.circles]

    def rho_bar(self) -> list[GeneralizedRadius]:
        return [GeneralizedRadius.finite(math.tanh(x / 2.0)) for x in self.r_bar]

    def euclidean_radii(self) -> np.ndarray:
        return np.array([C.radius for C in self.circles])


def generalized_instance(inst: StarInstance, mu: float) -> GeneralizedStarInstance:
    circles = [scale_circle(mu, C) for C in star_circles(inst.T, inst.eta, inst.r)]
    return GeneralizedStarInstance(inst.T, inst.eta, circles, inst.r_bar, inst.seed, mu)


def random_generalized_instance(n: int, regime: str, seed, max_attempts: int = 1000) -> GeneralizedStarInstance:
    """Star instance whose first packing is scaled until some boundary circles cross the unit circle.

    The second packing raises the centre's generalized radius by a random
    factor, moves the other finite ones by factors around it, and gives
    crossing vertices a random finite radius.
    """
    base_seed = [int(x) for x in np.atleast_1d(seed)]
    rng = np.random.default_rng([*base_seed, 7919])
    for _ in range(max_attempts):
        inst = random_star_instance(n, regime, [*base_seed, int(rng.integers(1 << 30))])
        circles = star_circles(inst.T, inst.eta, inst.r)
        # smallest scale pushing some circle out, largest keeping the centre circle inside
        mu_cross = min(1.0 / (abs(C.center) + C.radius) for C in circles[1:])
        mu_centre = (1.0 - 1e-9) / circles[0].radius
        mu_meet = min(1.0 / (abs(C.center) - C.radius) if abs(C.center) > C.radius else math.inf
                      for C in circles)
        hi = min(mu_centre, mu_meet)
        if not mu_cross < hi:
            continue
        mu = rng.uniform(mu_cross, min(hi, 1.5 * mu_cross))
        gi = generalized_instance(inst, mu)
        if not (all(C.meets_disk() for C in gi.circles) and gi.circles[0].inside_disk()):
            continue
        w0 = rng.uniform(0.0, 0.15)
        rho_bar = []
        for k, rho in enumerate(gi.rho()):
            if rho.infinite:
                rho_bar.append(rng.uniform(0.8, 0.999))
            else:
                w = w0 if k == 0 else w0 + rng.uniform(-0.1, 1.5)
                rho_bar.append(min(rho.value * math.exp(w), 0.999))
        r_bar = 2.0 * np.arctanh(np.array(rho_bar))
        if not all(packing_certificates(inst.T, inst.eta, r_bar).values()):
            continue
        gi.r_bar = r_bar
        return gi
    raise RejectionError(f"no generalized instance in {max_attempts} attempts")


def generalized_w(gi: GeneralizedStarInstance) -> list[float]:
    """w_v = ln(rho_bar_v / rho_v); -inf where rho_v is infinite."""
    out = []
    for a, b in zip(gi.rho_bar(), gi.rho()):
        ratio = gen_radius_ratio(a, b)
        if ratio is INDETERMINATE or (isinstance(ratio, float) and math.isinf(ratio)):
            raise ValueError("w undefined: r_bar circle not inside the disk")
        out.append(math.log(ratio) if ratio > 0 else -math.inf)
    return out


def check_generalized_max_principle(gi: GeneralizedStarInstance) -> TrialOutcome:
    """A positive maximum of w is never attained at the centre vertex."""
    T = gi.T
    if not all(C.meets_disk() for C in gi.circles):
        return TrialOutcome("vacuous", seed=gi.seed, detail="a circle misses the disk")
    R = gi.euclidean_radii()
    try:
        if not is_weighted_delaunay_packing(T, gi.eta, R, EUCLIDEAN):
            return TrialOutcome("vacuous", seed=gi.seed, detail="not weighted Delaunay")
        # the centre circle sits at the origin, where Euclidean and hyperbolic angles agree
        K0 = curvature(T, face_angles(T, edge_lengths_e(T, gi.eta, R), EUCLIDEAN))
    except DegenerateFaceError:
        return TrialOutcome("vacuous", seed=gi.seed, detail="degenerate face")
    K_bar = curvature_map(T, gi.eta, radii_to_labels(gi.r_bar, HYPERBOLIC), HYPERBOLIC)
    c = T.index[T.interior[0]]
    if not K0[c] >= K_bar[c]:
        return TrialOutcome("vacuous", seed=gi.seed)
    w = generalized_w(gi)
    w0 = w[c]
    if not w0 > 0:
        return TrialOutcome("vacuous", seed=gi.seed)
    others = max(x for k, x in enumerate(w) if k != c)
    return _strict_outcome(others - w0, "generalized", gi.seed)


def run_generalized(trials: int, regime: str, seed: int, n_range=(3, 8)) -> TrialReport:
    regime = canonical_regime(regime)
    report = TrialReport("generalized", {"regime": regime, "seed": seed, "trials": trials})
    crossing = 0
    for s in _trial_seeds(seed, trials):
        n = int(np.random.default_rng(s).integers(n_range[0], n_range[1] + 1))
        try:
            gi = random_generalized_instance(n, regime, s)
        except RejectionError:
            report.add(TrialOutcome("skipped", seed=s))
            continue
        crossing += any(not C.inside_disk() for C in gi.circles)
        report.add(check_generalized_max_principle(gi))
    report.extra["instances_with_crossing_circles"] = crossing
    return report
