"""Gluing a scaled Eguchi-Hanson space into an orbifold chart.

The glued family lives on the chart of the Eguchi-Hanson space: a cutoff
profile chi_t (equal to 1 below t^{-1/4}, 0 above 2 t^{-1/4}) blends t * eh
against the orbifold metric pulled back through the scaling s_t(x) =
sqrt(t) x and the gauge rotation.  The naive glue blends the metrics
directly; the corrected variant blends against eh + t h for an externally
supplied correction field h (h = 0 allowed).

Residual scans measure |Ric(g_t) - Lambda g_t (- obstruction term)| in the
unit-scale Eguchi-Hanson norm over a product grid and fit the decay in t.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import calculus as ca
from . import ehspace, jets, lin4, obstruction
from .calculus import DEFAULT_REL_STEP
from .errors import AdmissibilityError, DomainError, InputError
from .sphere import direction_stencil

MIN_ZONE_RADIUS = 0.25  # numeric scans stay clear of the zero section


# ---------------------------------------------------------------------------
# cutoff and weight profiles

def _bump(u: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """exp(-1/u) on u > 0 with first and second derivatives."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    d1 = np.zeros_like(u)
    d2 = np.zeros_like(u)
    pos = u > 1e-8
    up = u[pos]
    e = np.exp(-1.0 / up)
    out[pos] = e
    d1[pos] = e / up**2
    d2[pos] = e * (1.0 - 2.0 * up) / up**4
    return out, d1, d2


def smooth_step(u: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """C-infinity monotone step: 0 for u <= 0, 1 for u >= 1, with derivatives."""
    u = np.asarray(u, dtype=float)
    a, da, dda = _bump(np.clip(u, 0.0, 1.0))
    b, db, ddb = _bump(np.clip(1.0 - u, 0.0, 1.0))
    db, ddb = -db, ddb
    den = a + b
    s = a / den
    ds = (da * b - a * db) / den**2
    dds = (dda * b - a * ddb) / den**2 - ds * 2.0 * (da + db) / den
    inside = (u > 0.0) & (u < 1.0)
    return (np.where(u <= 0.0, 0.0, np.where(u >= 1.0, 1.0, s)),
            np.where(inside, ds, 0.0),
            np.where(inside, dds, 0.0))


def cutoff_chi(t: float, r: np.ndarray, order: int = 2):
    """Gluing cutoff chi_t(r) and its radial derivatives up to 2.

    chi_t(r) = chi_1(t^{1/4} r) with chi_1 = 1 on [0, 1] and 0 on [2, inf),
    so chi_t = 1 for r <= (1/2) t^{-1/4} holds with margin and every radial
    derivative obeys |d^k chi_t| <= c_k t^{k/4}.
    """
    if t <= 0:
        raise InputError("gluing parameter t must be positive")
    r = np.asarray(r, dtype=float)
    s = t**0.25 * r
    step, dstep, ddstep = smooth_step(s - 1.0)
    chi = 1.0 - step
    if order == 0:
        return chi
    d1 = -dstep * t**0.25
    d2 = -ddstep * t**0.5
    if order == 1:
        return chi, d1
    return chi, d1, d2


def rho_weight(r: np.ndarray) -> np.ndarray:
    """Weight function >= 1, equal to 1 for r <= 1 and to r for r >= 2."""
    r = np.asarray(r, dtype=float)
    s, _, _ = smooth_step(r - 1.0)
    return np.where(r <= 1.0, 1.0, np.where(r >= 2.0, r, (1.0 - s) + s * r))


def _rtilde(r: np.ndarray) -> np.ndarray:
    """Orbifold-side weight: the distance to the singular point capped at 1."""
    r = np.asarray(r, dtype=float)
    s, _, _ = smooth_step(2.0 * (r - 0.5))
    return np.where(r <= 0.5, r, np.where(r >= 1.0, 1.0, (1.0 - s) * r + s))


# ---------------------------------------------------------------------------
# orbifold charts

@dataclass(frozen=True)
class OrbifoldChart:
    """Einstein ball chart around the singular point, with its quadratic jet."""

    name: str
    lam: float
    jet: jets.QuadJet
    fn: ca.Evaluator

    def metric(self, ys: np.ndarray) -> np.ndarray:
        return self.fn(np.atleast_2d(np.asarray(ys, dtype=float)))

    def check_consistency(self, tol: float = 1e-8) -> float:
        """|Lambda(jet) - lam|; the jet must carry the chart's Einstein constant."""
        chk = jets.einstein_check(self.jet)
        dev = abs(chk.lam - self.lam) + chk.deviation
        if not chk.is_einstein or abs(chk.lam - self.lam) > tol:
            raise InputError(f"chart {self.name!r}: jet Einstein constant "
                             f"{chk.lam} does not match {self.lam}")
        return dev


def _invariant_chart(name, lam, hij, c1, c23):
    """Chart dr^2 + c1(r) a1^2 + c23(r) (a2^2 + a3^2) in cartesian components."""
    endos, _ = lin4.std_structures()
    ii = np.array(endos)

    def f(ys):
        ys = np.atleast_2d(np.asarray(ys, dtype=float))
        r2 = np.einsum("pk,pk->p", ys, ys)
        out = np.empty((ys.shape[0], 4, 4))
        bet = np.einsum("ikc,pc->pik", ii, ys)
        xx = np.einsum("pk,pl->pkl", ys, ys)
        b1 = np.einsum("pk,pl->pkl", bet[:, 0], bet[:, 0])
        b23 = (np.einsum("pk,pl->pkl", bet[:, 1], bet[:, 1])
               + np.einsum("pk,pl->pkl", bet[:, 2], bet[:, 2]))
        r2s = np.where(r2 > 0, r2, 1.0)
        out = (xx / r2s[:, None, None]
               + (c1(np.sqrt(r2s)) / r2s**2)[:, None, None] * b1
               + (c23(np.sqrt(r2s)) / r2s**2)[:, None, None] * b23)
        # the origin is a smooth point of every catalog chart
        at0 = r2 == 0
        if np.any(at0):
            out[at0] = np.eye(4)
        return out

    return OrbifoldChart(name=name, lam=lam, jet=jets.assemble_radial_jet(hij), fn=f)


def flat_chart() -> OrbifoldChart:
    def f(ys):
        ys = np.atleast_2d(np.asarray(ys, dtype=float))
        return np.broadcast_to(np.eye(4), (ys.shape[0], 4, 4)).copy()
    return OrbifoldChart(name="flat", lam=0.0, jet=jets.flat_jet(), fn=f)


def real_hyperbolic_chart() -> OrbifoldChart:
    sh2 = lambda r: np.sinh(r) ** 2
    return _invariant_chart("real-hyperbolic", -3.0, np.eye(3) / 3.0, sh2, sh2)


def complex_hyperbolic_chart() -> OrbifoldChart:
    sh2 = lambda r: np.sinh(r) ** 2
    sh2half = lambda r: 4.0 * np.sinh(r / 2.0) ** 2
    return _invariant_chart("complex-hyperbolic", -1.5,
                            np.diag([1.0 / 3.0, 1.0 / 12.0, 1.0 / 12.0]),
                            sh2, sh2half)


def chart_catalog() -> dict[str, OrbifoldChart]:
    return {c.name: c for c in (flat_chart(), real_hyperbolic_chart(),
                                complex_hyperbolic_chart())}


def rotated_chart(chart: OrbifoldChart, rot: np.ndarray) -> OrbifoldChart:
    """Pull the chart back through the linear rotation y -> rot y."""
    a = np.asarray(rot, dtype=float)

    def f(ys):
        ys = np.atleast_2d(np.asarray(ys, dtype=float))
        g = chart.fn(ys @ a.T)
        return np.einsum("ak,pab,bl->pkl", a, g, a)

    return OrbifoldChart(name=f"{chart.name}@rot", lam=chart.lam,
                         jet=jets.pullback(chart.jet, a), fn=f)


# ---------------------------------------------------------------------------
# glued metrics

@dataclass(frozen=True)
class GluedMetric:
    """Evaluator of the glued family on the Eguchi-Hanson chart.

    Components are those of g_t itself (scale t near the bubble); the
    rescaled accessor divides by t.  The two zone formulas are definitionally
    equal on the overlap through the scaling map.
    """

    chart: OrbifoldChart
    t: float
    phi: lin4.GaugeElement
    builder: str                      # naive | corrected
    correction: ehspace.TensorField | None = None

    @property
    def outer_radius(self) -> float:
        return 2.0 * self.t**-0.25

    @property
    def transition(self) -> tuple[float, float]:
        return 0.5 * self.t**-0.25, 2.0 * self.t**-0.25

    def orbifold_pullback(self, xs: np.ndarray) -> np.ndarray:
        """(1/t) s_t^* (phi^* g0) components at chart points xs."""
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        a = self.phi.rotation4()
        ys = np.sqrt(self.t) * (xs @ a.T)
        g = self.chart.fn(ys)
        return np.einsum("ak,pab,bl->pkl", a, g, a)

    def rescaled(self, xs: np.ndarray, zone: str = "auto") -> np.ndarray:
        """Components of g_t / t."""
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        r = np.linalg.norm(xs, axis=1)
        if zone == "orbifold" or (zone == "auto" and np.all(r >= self.outer_radius)):
            return self.orbifold_pullback(xs)
        ehv = ehspace.eh_metric()(xs)
        if self.builder == "corrected" and self.correction is not None:
            ehv = ehv + self.t * self.correction(xs)
        chi = cutoff_chi(self.t, r, order=0)
        orb = self.orbifold_pullback(xs)
        return chi[:, None, None] * ehv + (1.0 - chi)[:, None, None] * orb

    def __call__(self, xs: np.ndarray, zone: str = "auto") -> np.ndarray:
        return self.t * self.rescaled(xs, zone=zone)

    def zone_consistency(self, xs: np.ndarray) -> float:
        """Relative disagreement of the two zone formulas on the overlap."""
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        r = np.linalg.norm(xs, axis=1)
        if np.any(r < self.outer_radius):
            raise DomainError("overlap points must satisfy r >= 2 t^{-1/4}")
        a = self.rescaled(xs, zone="eh")
        b = self.rescaled(xs, zone="orbifold")
        return float(np.abs(a - b).max() / max(np.abs(b).max(), 1e-300))


def _probe_admissibility(gm: GluedMetric, n_r: int = 12, n_dirs: int = 6) -> None:
    if gm.outer_radius <= 2.0 * MIN_ZONE_RADIUS:
        raise AdmissibilityError(
            f"t = {gm.t:g} leaves no bubble zone above the chart floor")
    radii = np.geomspace(MIN_ZONE_RADIUS, gm.outer_radius * 1.2, n_r)
    dirs = direction_stencil(24)[:n_dirs]
    pts = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, 4)
    vals = np.linalg.eigvalsh(gm.rescaled(pts))
    if vals.min() <= 0:
        raise AdmissibilityError(
            f"glued metric not positive definite for t = {gm.t:g}")


def naive_glue(chart: OrbifoldChart, t: float, phi: lin4.GaugeElement | None = None,
               probe: bool = True) -> GluedMetric:
    """Direct blend of t * eh against the pulled-back orbifold metric."""
    if t <= 0:
        raise InputError("gluing parameter t must be positive")
    gm = GluedMetric(chart=chart, t=float(t),
                     phi=phi or lin4.GaugeElement.identity(), builder="naive")
    if probe:
        _probe_admissibility(gm)
    return gm


def corrected_glue(chart: OrbifoldChart, t: float,
                   phi: lin4.GaugeElement | None = None,
                   correction: ehspace.TensorField | None = None,
                   probe: bool = True) -> GluedMetric:
    """Blend against the corrected bubble eh + t h; h = 0 degenerates to the
    same blend as the naive glue (the correction is what separates them)."""
    if t <= 0:
        raise InputError("gluing parameter t must be positive")
    gm = GluedMetric(chart=chart, t=float(t),
                     phi=phi or lin4.GaugeElement.identity(),
                     builder="corrected", correction=correction)
    if probe:
        _probe_admissibility(gm)
    return gm


def transition_mismatch(gm: GluedMetric, n_r: int = 12, n_dirs: int = 6) -> float:
    """sup over the transition annulus of |(1/t) s_t^* phi^* g0 - (eh + t h)|
    in the euclidean norm (the matching quality of the two glued pieces)."""
    lo, hi = gm.transition
    radii = np.geomspace(lo, hi, n_r)
    dirs = direction_stencil(24)[:n_dirs]
    pts = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, 4)
    ehv = ehspace.eh_metric()(pts)
    if gm.correction is not None:
        ehv = ehv + gm.t * gm.correction(pts)
    return float(np.abs(gm.orbifold_pullback(pts) - ehv).max())


# ---------------------------------------------------------------------------
# weighted norms

@dataclass(frozen=True)
class WeightedNormSpec:
    """Weights of the glued function spaces (both positive and small)."""

    delta0: float = 0.1
    delta_inf: float = 0.1
    t: float = 1e-3
    ell: float = -2.0  # conformal weight, -2 for covariant 2-tensors

    def __post_init__(self):
        if self.delta0 <= 0 or self.delta_inf <= 0:
            raise InputError("weights must be positive")
        if self.t <= 0:
            raise InputError("t must be positive")


def weighted_norm(field_fn: ca.Evaluator, spec: WeightedNormSpec,
                  grid: np.ndarray, gm: GluedMetric,
                  valence: str = "sym2") -> float:
    """Discrete sup of the weighted C^0 norm of a section over the grid.

    The bubble-zone part is t^{(delta0+ell)/2} sup rho^{delta0} |chi_t s|
    in the unit-scale Eguchi-Hanson norm; the orbifold part weights
    |.(1-chi_t) s| in the pulled-back orbifold norm by the capped distance
    to the singular point (no conformal-infinity weight on a ball chart).
    """
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise InputError("weighted norm needs a nonempty grid")
    r = np.linalg.norm(grid, axis=1)
    s = field_fn(grid)
    chi = cutoff_chi(spec.t, r, order=0)

    norm = {"sym2": ca.norm_sym2, "form2": ca.norm_form2, "form1": ca.norm_form1}[valence]
    geh = ehspace.eh_metric()(grid)
    bubble = rho_weight(r) ** spec.delta0 * chi * norm(geh, s)
    gorb = gm.orbifold_pullback(grid)
    orb = (_rtilde(np.sqrt(spec.t) * r) ** spec.delta0 * (1.0 - chi)
           * norm(gorb, s))
    return float(spec.t ** (0.5 * (spec.delta0 + spec.ell)) * bubble.max()
                 + orb.max())


# ---------------------------------------------------------------------------
# residual scans

@dataclass
class ResidualScan:
    builder: str
    chart_name: str
    lam: float
    ts: list
    sups: list
    argmax_r: list
    slope: float
    slope_ci: float
    n_points: int
    span_decades: float
    grid_spec: dict
    err_estimate: float
    rows: list = field(default_factory=list)  # per-point (t, r, residual)


def fit_loglog(ts, vals) -> tuple[float, float]:
    """OLS power-law fit; returns (slope, 95% CI half-width)."""
    ts = np.asarray(ts, dtype=float)
    vals = np.asarray(vals, dtype=float)
    if ts.size < 2:
        raise InputError("need at least two points to fit a slope")
    x = np.log(ts)
    y = np.log(vals)
    n = ts.size
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    if n == 2:
        return slope, float("inf")
    resid = y - (ym + slope * (x - xm))
    se = np.sqrt(np.sum(resid**2) / (n - 2) / sxx)
    from scipy.stats import t as tdist
    return slope, float(tdist.ppf(0.975, n - 2) * se)


def scan_grid(t: float, n_r: int = 16, n_dirs: int = 8) -> np.ndarray:
    """Log-spaced radii through the bubble zone, enriched inside the
    transition annulus (where the blend concentrates the residual), times a
    deterministic direction subset of the 24-cell stencil."""
    outer = 2.0 * t**-0.25
    if outer <= 2.0 * MIN_ZONE_RADIUS:
        raise AdmissibilityError(f"t = {t:g} leaves no bubble zone to scan")
    radii = np.geomspace(MIN_ZONE_RADIUS, 0.999 * outer, n_r)
    annulus = np.geomspace(max(0.5 * outer / 2.0, MIN_ZONE_RADIUS), 0.999 * outer,
                           max(n_r // 2, 6))
    radii = np.unique(np.concatenate([radii, annulus]))
    dirs = direction_stencil(24)[:n_dirs]
    return (radii[:, None, None] * dirs[None, :, :]).reshape(-1, 4)


def _residual_one_t(chart, t, phi, builder, correction, lam_vec, n_r, n_dirs,
                    rel_step):
    make = naive_glue if builder == "naive" else corrected_glue
    if builder == "naive":
        gm = make(chart, t, phi)
    else:
        gm = make(chart, t, phi, correction=correction)
    pts = scan_grid(t, n_r=n_r, n_dirs=n_dirs)
    r = np.linalg.norm(pts, axis=1)
    mj = ca.metric_jet(gm.rescaled, pts, rel_step=rel_step)
    resid = mj.ricci() - chart.lam * t * mj.g
    if builder == "corrected":
        chi = cutoff_chi(t, r, order=0)
        for i in (1, 2, 3):
            resid = resid - (t * lam_vec[i - 1] * chi)[:, None, None] \
                * ehspace.o_tensor(i)(pts)
    geh = ehspace.eh_metric()(pts)
    vals = ca.norm_sym2(geh, resid)
    k = int(np.argmax(vals))
    rows = [(t, float(r[p]), float(vals[p])) for p in range(pts.shape[0])]
    return float(vals[k]), float(r[k]), mj.err, rows


def residual_scan(chart: OrbifoldChart, t_list, phi: lin4.GaugeElement | None = None,
                  builder: str = "naive",
                  correction: ehspace.TensorField | None = None,
                  n_r: int = 16, n_dirs: int = 8,
                  rel_step: float = DEFAULT_REL_STEP,
                  threads: int | None = None) -> ResidualScan:
    """Sup of the Einstein residual of the glued family over a product grid,
    for each t, with the fitted decay exponent in t.

    The residual is |Ric(g_t) - Lambda g_t|_eh for the naive build and
    subtracts the truncated obstruction term t sum lambda_j chi_t o_j for the
    corrected build.  Fits need >= 4 values of t; the spanned decades are
    recorded alongside (2 or more make the fit trustworthy).
    """
    if builder not in ("naive", "corrected"):
        raise InputError(f"unknown builder {builder!r}")
    phi = phi or lin4.GaugeElement.identity()
    t_list = [float(t) for t in t_list]
    if len(t_list) < 4:
        raise InputError("residual scans need at least 4 values of t")
    if threads is None:
        threads = int(os.environ.get("EHGLUE_THREADS", "1"))

    lam_vec = np.zeros(3)
    if builder == "corrected":
        jet_rot = jets.pullback(chart.jet, phi.rotation4())
        lam_vec = obstruction.lambda_coefficients(jet_rot).lam

    args = [(chart, t, phi, builder, correction, lam_vec, n_r, n_dirs, rel_step)
            for t in t_list]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda a: _residual_one_t(*a), args))
    else:
        results = [_residual_one_t(*a) for a in args]

    sups = [r[0] for r in results]
    argmax = [r[1] for r in results]
    err = max(r[2] for r in results)
    rows = [row for r in results for row in r[3]]
    slope, ci = fit_loglog(t_list, sups)
    span = float(np.log10(max(t_list) / min(t_list)))
    return ResidualScan(builder=builder, chart_name=chart.name, lam=chart.lam,
                        ts=t_list, sups=sups, argmax_r=argmax, slope=slope,
                        slope_ci=ci, n_points=len(t_list), span_decades=span,
                        grid_spec={"n_r": n_r, "n_dirs": n_dirs,
                                   "r_min": MIN_ZONE_RADIUS, "rel_step": rel_step},
                        err_estimate=err, rows=rows)
