"""Numerical harness for dilatation structures.

A dilatation structure is a metric space together with a family of point-based
contractions dil(eps, x, y): for each base point x, dil(eps, x, .) shrinks a
neighbourhood of x by the factor eps. The harness checks the defining axioms
on sampled witnesses and extracts the tangent-space data (the rescaled-limit
distance d^x, the difference / sum / inverse operations of the tangent group)
by extrapolating finite-scale quantities to eps -> 0:

    d^x(u, v)      = lim (1/eps) d(dil(eps,x,u), dil(eps,x,v))
    diff(u, v)     = lim dil(1/eps, dil(eps,x,u), dil(eps,x,v))
    add(u, v)      = lim dil(1/eps, x, dil(eps, dil(eps,x,u), v))
    neg(u)         = diff(u, x)

Point-mismatch residuals are measured in chart coordinates; quantities that
are about the metric itself (contraction decay, rescaled-distance limits,
profile snapshots) use the structure's own distance.
"""

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .errors import DomainViolation
from .geometry import MetricSpaceHandle
from .gromov import gh_pointed_exact, _sample_density
from .limits import LimitEstimate, richardson_limit
from .util import as_point, check_schedule, halving_schedule, parallel_map, scale_of


@dataclass(frozen=True)
class DilatationStructure:
    """Metric space plus dilatations.

    dil(eps, x, y) must accept any eps > 0 (eps > 1 gives the inverse maps),
    fix x, and be the identity at eps = 1. domain_radius / inner_radius are
    the declared bounds (A and B) of the axioms' domains; working_radius is
    the "sufficiently close" radius within which witnesses are drawn.
    """

    space: MetricSpaceHandle
    dil: Callable[[float, np.ndarray, np.ndarray], np.ndarray]
    name: str = ""
    domain_radius: float = 2.0      # A > 1
    inner_radius: float = 1.5       # B in (1, A)
    working_radius: float = 1.0

    def __post_init__(self):
        if not (self.domain_radius > 1.0):
            raise ValueError("domain radius must exceed 1")
        if not (1.0 < self.inner_radius < self.domain_radius):
            raise ValueError("inner radius must lie in (1, domain radius)")

    @property
    def probe_radius(self) -> float:
        """Default radius for limit-operation probes (half the working ball)."""
        return 0.5 * self.working_radius


@dataclass
class TangentData:
    """Extrapolated tangent-space operations at a base point."""

    center: np.ndarray
    dx: Callable
    delta_op: Callable
    sigma_op: Callable
    inv_op: Callable
    limit_error: float = 0.0
    converged: bool = True
    degenerate: bool = False

    def consistency_residual(self, u, v) -> float:
        """Chart gap of diff(u, add(u, v)) against v (group cancellation)."""
        s = self.sigma_op(u, v)
        return float(np.max(np.abs(self.delta_op(u, s) - as_point(v))))


@dataclass
class CheckReport:
    """Outcome of one named check, JSON/CSV serializable."""

    check: str
    passed: bool
    max_residual: float
    tolerance: float
    converged: Optional[bool] = None
    failures: List[dict] = field(default_factory=list)
    table: List[dict] = field(default_factory=list)
    notes: str = ""

    def to_jsonable(self) -> dict:
        out = {
            "check": self.check,
            "passed": bool(self.passed),
            "max_residual": float(self.max_residual),
            "tolerance": float(self.tolerance),
            "failures": self.failures,
            "table": self.table,
            "notes": self.notes,
        }
        if self.converged is not None:
            out["converged"] = bool(self.converged)
        return out

    def to_csv(self) -> str:
        """Fixed-column table export: eps, value, diff, extrapolated, error."""
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["eps", "value", "diff", "extrapolated", "error"])
        for row in self.table:
            w.writerow([row.get("eps", ""), row.get("value", ""), row.get("diff", ""),
                        row.get("extrapolated", ""), row.get("error", "")])
        return buf.getvalue()


def report_to_json(reports: Sequence[CheckReport], meta: Optional[dict] = None) -> str:
    doc = {"schema": 1, "checks": [r.to_jsonable() for r in reports]}
    if meta:
        doc.update(meta)
    return json.dumps(doc, sort_keys=True, indent=2)


def _in_chart(ds, p) -> bool:
    return ds.space.contains(p)


# ---------------------------------------------------------------------------
# A0 / A1: domains, identity, fixed point, invertibility, contraction


def check_A0_A1(ds: DilatationStructure, samples: Sequence, eps_schedule,
                tol: float = 1e-9) -> CheckReport:
    """Identity at eps=1, fixed point, invertibility round-trip, contraction
    of d(x, dil(eps,x,y)) to zero along the schedule, small-perturbation
    continuity, and the domain witness d(x, dil(1/eps, x, y_eps)) <= A for
    ball points y_eps.

    samples: list of (x, y) point pairs with y in the working ball of x.
    """
    eps = check_schedule(eps_schedule)
    failures = []
    max_res = 0.0
    table = []
    bump = 1e-6

    for idx, (x, y) in enumerate(samples):
        x = as_point(x)
        y = as_point(y)
        sc = scale_of(x, y)

        r_id = float(np.max(np.abs(ds.dil(1.0, x, y) - y)))
        max_res = max(max_res, r_id)
        if r_id > 1e-12 * sc:
            failures.append({"sample": idx, "kind": "identity-at-1", "residual": r_id})

        decay = []
        for e in eps:
            e = float(e)
            r_fix = float(np.max(np.abs(ds.dil(e, x, x) - x)))
            y_e = as_point(ds.dil(e, x, y))
            r_inv = float(np.max(np.abs(ds.dil(1.0 / e, x, y_e) - y)))
            max_res = max(max_res, r_fix, r_inv)
            if r_fix > tol * sc:
                failures.append({"sample": idx, "kind": "fixed-point", "eps": e,
                                 "residual": r_fix})
            if r_inv > tol * sc:
                failures.append({"sample": idx, "kind": "invertibility", "eps": e,
                                 "residual": r_inv})
            decay.append(float(ds.space.distance(x, y_e)))
            # domain witness: the expanded ball point stays inside B(x, A)
            back = float(ds.space.distance(x, ds.dil(1.0 / e, x, y_e)))
            if back > ds.domain_radius * (1.0 + 1e-9):
                failures.append({"sample": idx, "kind": "domain-witness", "eps": e,
                                 "distance": back})

        # contraction trend: comparable to first order in eps, heading to 0
        d0 = float(ds.space.distance(x, y))
        floor = 1e-12 * sc
        ok_trend = all(decay[k + 1] <= decay[k] * 1.01 + floor for k in range(len(decay) - 1))
        ok_final = decay[-1] <= max(50.0 * d0 * eps[-1] / eps[0], floor)
        if d0 > floor and not (ok_trend and ok_final):
            failures.append({"sample": idx, "kind": "contraction-trend",
                             "decay": [float(t) for t in decay]})
        if idx == 0:
            for k, e in enumerate(eps):
                table.append({"eps": float(e), "value": decay[k],
                              "diff": "" if k == 0 else decay[k] - decay[k - 1],
                              "extrapolated": 0.0, "error": ""})

        # continuity probe at a fixed small perturbation of y
        dy = np.zeros_like(y)
        dy[0] = bump
        r_cont = float(np.max(np.abs(as_point(ds.dil(float(eps[0]), x, y + dy))
                                     - as_point(ds.dil(float(eps[0]), x, y)))))
        if r_cont > 100.0 * bump * sc:
            failures.append({"sample": idx, "kind": "continuity-probe", "residual": r_cont})

    return CheckReport(check="a0a1", passed=not failures, max_residual=max_res,
                       tolerance=tol, failures=failures[:20], table=table,
                       notes="%d samples, %d scales" % (len(samples), len(eps)))


def check_A2(ds: DilatationStructure, samples: Sequence, pairs: Sequence,
             tol: float = 1e-9) -> CheckReport:
    """Composition law dil(eps, x, dil(mu, x, u)) = dil(eps*mu, x, u).

    samples: list of (x, u); pairs: list of (eps, mu) scale pairs. Residuals
    are chart-coordinate gaps relative to the coordinate scale.
    """
    failures = []
    max_res = 0.0
    table = []
    for idx, (x, u) in enumerate(samples):
        x = as_point(x)
        u = as_point(u)
        sc = scale_of(x, u)
        for (e, m) in pairs:
            e, m = float(e), float(m)
            lhs = as_point(ds.dil(e, x, ds.dil(m, x, u)))
            rhs = as_point(ds.dil(e * m, x, u))
            r = float(np.max(np.abs(lhs - rhs)))
            max_res = max(max_res, r)
            if r > tol * sc:
                failures.append({"sample": idx, "kind": "composition", "eps": e,
                                 "mu": m, "residual": r})
            if idx == 0:
                table.append({"eps": e * m, "value": r, "diff": "",
                              "extrapolated": 0.0, "error": ""})
    return CheckReport(check="a2", passed=not failures, max_residual=max_res,
                       tolerance=tol, failures=failures[:20], table=table,
                       notes="%d samples x %d scale pairs" % (len(samples), len(pairs)))


# ---------------------------------------------------------------------------
# A3 / A4: rescaled-distance limit and tangent operations


def _dx_sequence(ds, x, u, v, eps):
    vals = []
    for e in eps:
        e = float(e)
        a = ds.dil(e, x, u)
        b = ds.dil(e, x, v)
        vals.append(float(ds.space.distance(a, b)) / e)
    return np.array(vals)


def estimate_dx(ds: DilatationStructure, x, sample: Sequence, eps_schedule):
    """Rescaled-limit distance d^x on all pairs from sample.

    Returns (TangentData, worst LimitEstimate). The TangentData carries a dx
    callable that extrapolates fresh pairs on demand (results cached); its
    degenerate flag is set when some pair collapses (dx below 1e-6 while the
    original distance exceeds 1e-2).
    """
    eps = check_schedule(eps_schedule)
    x = as_point(x)
    pts = [as_point(p) for p in sample]
    cache = {}

    def dx(u, v) -> float:
        u = as_point(u)
        v = as_point(v)
        key = (u.tobytes(), v.tobytes())
        if key not in cache:
            est = richardson_limit(eps, _dx_sequence(ds, x, u, v, eps))
            cache[key] = est
            cache[(key[1], key[0])] = est
        return float(cache[key].extrapolated)

    idx_pairs = [(i, j) for i in range(len(pts)) for j in range(i + 1, len(pts))]
    ests = parallel_map(
        lambda ij: richardson_limit(eps, _dx_sequence(ds, x, pts[ij[0]], pts[ij[1]], eps)),
        idx_pairs)
    worst = None
    degenerate = False
    converged = True
    for (i, j), est in zip(idx_pairs, ests):
        cache[(pts[i].tobytes(), pts[j].tobytes())] = est
        cache[(pts[j].tobytes(), pts[i].tobytes())] = est
        if worst is None or est.error > worst.error:
            worst = est
        converged = converged and est.converged
        d0 = float(ds.space.distance(pts[i], pts[j]))
        if float(est.extrapolated) < 1e-6 and d0 > 1e-2:
            degenerate = True
    if worst is None:
        raise ValueError("need at least two sample points")

    td = TangentData(center=x, dx=dx, delta_op=None, sigma_op=None, inv_op=None,
                     limit_error=float(worst.error), converged=converged,
                     degenerate=degenerate)
    return td, worst


def _delta_points(ds, x, u, v, eps):
    """dil(1/eps, dil(eps,x,u), dil(eps,x,v)) along the schedule."""
    out = []
    for e in eps:
        e = float(e)
        w1 = as_point(ds.dil(e, x, u))
        w2 = as_point(ds.dil(e, x, v))
        p = as_point(ds.dil(1.0 / e, w1, w2))
        if not _in_chart(ds, p) or not _in_chart(ds, w1):
            raise DomainViolation("difference-operation point left the chart at eps=%g" % e)
        out.append(p)
    return np.array(out)


def _sigma_points(ds, x, u, v, eps):
    """dil(1/eps, x, dil(eps, dil(eps,x,u), v)) along the schedule."""
    out = []
    for e in eps:
        e = float(e)
        w = as_point(ds.dil(e, x, u))
        q = as_point(ds.dil(e, w, v))
        p = as_point(ds.dil(1.0 / e, x, q))
        if not _in_chart(ds, p) or not _in_chart(ds, q):
            raise DomainViolation("sum-operation point left the chart at eps=%g" % e)
        out.append(p)
    return np.array(out)


def estimate_delta(ds: DilatationStructure, x, u, v, eps_schedule) -> LimitEstimate:
    """Vector limit of the difference operation at x applied to (u, v)."""
    eps = check_schedule(eps_schedule)
    x, u, v = as_point(x), as_point(u), as_point(v)
    return richardson_limit(eps, _delta_points(ds, x, u, v, eps))


def derive_sigma_inv(ds: DilatationStructure, x, eps_schedule,
                     probe_pairs: Optional[Sequence] = None) -> TangentData:
    """TangentData with extrapolating closures for all tangent operations.

    The sum operation inverts the difference on the second slot; the
    constructor spot-checks diff(u, add(u, v)) = v on probe pairs and folds
    the residual into limit_error / converged.
    """
    eps = check_schedule(eps_schedule)
    x = as_point(x)
    cache = {}

    def _memo(tag, u, v, fn):
        key = (tag, as_point(u).tobytes(), as_point(v).tobytes())
        if key not in cache:
            cache[key] = fn()
        return cache[key]

    def delta_op(u, v):
        est = _memo("delta", u, v, lambda: richardson_limit(
            eps, _delta_points(ds, x, as_point(u), as_point(v), eps)))
        return np.array(est.extrapolated, dtype=float)

    def sigma_op(u, v):
        est = _memo("sigma", u, v, lambda: richardson_limit(
            eps, _sigma_points(ds, x, as_point(u), as_point(v), eps)))
        return np.array(est.extrapolated, dtype=float)

    def inv_op(u):
        return delta_op(u, x)

    def dx(u, v):
        est = _memo("dx", u, v, lambda: richardson_limit(
            eps, _dx_sequence(ds, x, as_point(u), as_point(v), eps)))
        return float(est.extrapolated)

    td = TangentData(center=x, dx=dx, delta_op=delta_op, sigma_op=sigma_op,
                     inv_op=inv_op)

    if probe_pairs is None:
        # generic directions (axis-aligned probes can hide curvature terms
        # and make the folded error unrepresentative)
        r = ds.probe_radius
        rng = np.random.RandomState(11)
        d1 = rng.standard_normal(len(x))
        d2 = rng.standard_normal(len(x))
        d1 /= np.linalg.norm(d1)
        d2 /= np.linalg.norm(d2)
        probe_pairs = [(x + 0.9 * r * d1, x - 0.75 * r * d2)]
    err = 0.0
    ok = True
    for (u, v) in probe_pairs:
        for tag, fn in (("delta", lambda: richardson_limit(
                eps, _delta_points(ds, x, as_point(u), as_point(v), eps))),
                        ("sigma", lambda: richardson_limit(
                eps, _sigma_points(ds, x, as_point(u), as_point(v), eps)))):
            est = _memo(tag, u, v, fn)
            err = max(err, float(est.error))
            ok = ok and est.converged
        err = max(err, td.consistency_residual(u, v))
        # neutral element and self-difference identities
        err = max(err, float(np.max(np.abs(sigma_op(x, v) - as_point(v)))))
        err = max(err, float(np.max(np.abs(delta_op(u, u) - x))))
    td.limit_error = err
    td.converged = ok
    return td


# ---------------------------------------------------------------------------
# Tangent-group structure (conical-group checks)


def check_conical_group(td: TangentData, ds: DilatationStructure, samples: Sequence,
                        mus: Sequence, tol_floor: float = 1e-9,
                        tol_factor: float = 10.0) -> CheckReport:
    """Group-like behaviour of the extrapolated operations:

      associativity   add(u, add(v, w)) = add(add(u, v), w)
      left-invariance d^x(add(w,u), add(w,v)) = d^x(u, v)
      automorphism    dil(mu, x, add(u,v)) = add(dil(mu,x,u), dil(mu,x,v))
      cone property   d^x(u, v) = (1/mu) d^x(dil(mu,x,u), dil(mu,x,v))

    samples: list of points near x (consecutive triples are used).
    Tolerance adapts to the tangent data's own limit error.
    """
    if not td.converged:
        raise ValueError("tangent data has unconverged limits; refusing to certify")
    x = td.center
    pts = [as_point(p) for p in samples]
    if len(pts) < 3:
        raise ValueError("need at least three sample points")
    tol = max(tol_floor, tol_factor * td.limit_error)
    failures = []
    max_res = 0.0
    table = []

    triples = [(pts[i], pts[i + 1], pts[i + 2]) for i in range(len(pts) - 2)]
    for idx, (u, v, w) in enumerate(triples):
        sc = scale_of(u, v, w)
        r_assoc = float(np.max(np.abs(td.sigma_op(u, td.sigma_op(v, w))
                                      - td.sigma_op(td.sigma_op(u, v), w))))
        r_left = abs(td.dx(td.sigma_op(w, u), td.sigma_op(w, v)) - td.dx(u, v))
        max_res = max(max_res, r_assoc, r_left)
        if r_assoc > tol * sc:
            failures.append({"triple": idx, "kind": "associativity", "residual": r_assoc})
        if r_left > tol * sc:
            failures.append({"triple": idx, "kind": "left-invariance", "residual": r_left})

        for mu in mus:
            mu = float(mu)
            s = td.sigma_op(u, v)
            r_auto = float(np.max(np.abs(as_point(ds.dil(mu, x, s))
                                         - td.sigma_op(ds.dil(mu, x, u), ds.dil(mu, x, v)))))
            r_cone = abs(td.dx(u, v)
                         - ds_dx_scaled(td, ds, x, u, v, mu))
            max_res = max(max_res, r_auto, r_cone)
            if r_auto > tol * sc:
                failures.append({"triple": idx, "kind": "automorphism", "mu": mu,
                                 "residual": r_auto})
            if r_cone > tol * sc:
                failures.append({"triple": idx, "kind": "cone-property", "mu": mu,
                                 "residual": r_cone})
            if idx == 0:
                table.append({"eps": mu, "value": max(r_auto, r_cone), "diff": "",
                              "extrapolated": 0.0, "error": float(td.limit_error)})

    return CheckReport(check="conical-group", passed=not failures, max_residual=max_res,
                       tolerance=tol, converged=td.converged, failures=failures[:20],
                       table=table, notes="%d triples" % len(triples))


def ds_dx_scaled(td, ds, x, u, v, mu) -> float:
    return td.dx(ds.dil(mu, x, u), ds.dil(mu, x, v)) / mu


# ---------------------------------------------------------------------------
# Tangent-cone sup-estimate and profile-convergence theorem


def check_tangent_cone(ds: DilatationStructure, x, eps_schedule, count: int,
                       seed: int = 0, dx: Optional[Callable] = None) -> LimitEstimate:
    """sup over sampled pairs in B(x, eps) of |d(u,v) - d^x(u,v)| / eps.

    The values should decrease to 0 when d^x is the tangent-cone distance at
    x. dx defaults to a fresh extrapolating closure (halving schedule).
    """
    from .geometry import sample_ball

    eps = check_schedule(eps_schedule)
    x = as_point(x)
    if dx is None:
        td = derive_sigma_inv(ds, x, halving_schedule(0.5, 12), probe_pairs=[])
        dx = td.dx
    sup_vals = []
    for e in eps:
        e = float(e)
        pts = sample_ball(ds.space, x, e, count, seed=seed)
        worst = 0.0
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                gap = abs(float(ds.space.distance(pts[i], pts[j])) - dx(pts[i], pts[j]))
                worst = max(worst, gap / e)
        sup_vals.append(worst)
    est = richardson_limit(eps, np.array(sup_vals))
    # the quantity is a sup of nonnegative gaps: converged means trending to 0
    floor = 1e-10
    dec = all(sup_vals[k + 1] <= max(sup_vals[k] * 1.05, floor)
              for k in range(len(sup_vals) - 1))
    est.converged = bool(dec and sup_vals[-1] <= max(0.25 * sup_vals[0], floor))
    return est


def check_profile_theorem(ds: DilatationStructure, x, eps_schedule, mu_schedule,
                          count: int, seed: int = 0) -> CheckReport:
    """Compare rescaled-ball snapshots against the tangent-cone snapshot.

    Builds the d^x matrix on a fixed sample of the unit d^x-ball at x, then
    for each mu the (1/mu) d(dil(mu,x,u_i), dil(mu,x,u_j)) matrix, and checks
    that the pointed GH gap between them decreases in mu and ends below the
    sample density.
    """
    from .geometry import sample_ball, FinitePointedSpace

    eps = check_schedule(eps_schedule)
    mus = check_schedule(mu_schedule)
    x = as_point(x)
    count = min(count, 7)

    td = derive_sigma_inv(ds, x, eps, probe_pairs=[])
    raw = sample_ball(ds.space, x, ds.working_radius, max(24, 4 * count), seed=seed)
    pts = [x]
    for p in raw:
        if td.dx(x, p) <= ds.working_radius:
            pts.append(as_point(p))
        if len(pts) == count:
            break
    if len(pts) < 3:
        raise ValueError("tangent sample too thin for a snapshot comparison")
    n = len(pts)
    dmat0 = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            dmat0[i, j] = dmat0[j, i] = td.dx(pts[i], pts[j])
    base_fs = FinitePointedSpace(dmat=dmat0, base=0, slack=1e-5)
    density = _sample_density(dmat0)

    gaps = []
    table = []
    for mu in mus:
        mu = float(mu)
        imgs = [as_point(ds.dil(mu, x, p)) for p in pts]
        m = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                m[i, j] = m[j, i] = float(ds.space.distance(imgs[i], imgs[j])) / mu
        fs = FinitePointedSpace(dmat=m, base=0, slack=1e-9)
        g = gh_pointed_exact(fs, base_fs)
        gaps.append(g)
        table.append({"eps": mu, "value": g, "diff": "", "extrapolated": 0.0,
                      "error": float(density)})

    floor = 1e-10
    monotone = all(gaps[k + 1] <= max(1.1 * gaps[k], floor + density * 1e-6)
                   for k in range(len(gaps) - 1))
    passed = bool(monotone and gaps[-1] <= max(density, floor))
    return CheckReport(check="profile-theorem", passed=passed,
                       max_residual=float(gaps[-1]), tolerance=float(density),
                       converged=passed, table=table,
                       notes="%d-point snapshots, density %.3g" % (n, density))
