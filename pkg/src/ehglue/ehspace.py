"""The Eguchi-Hanson geometry as evaluable tensor fields on R^4 \\ {0}.

The chart is the complex one of the cotangent bundle of the projective line,
identified away from the zero section with R^4/Z2; every field here is even
under x -> -x.  All tensors are assembled from the two radial profiles

    f1(r) = r^2 / sqrt(1 + r^4),        f2(r) = sqrt(1 + r^4),

and the invariant coframe b_i = r^2 alpha_i (components (I_i x)_k for the
three standard complex structures), so the formulas stay analytic while all
differentiation is numeric (4th-order stencils + one Richardson level, see
:mod:`ehglue.calculus`).

Conventions quoted with every report: orientation dx1^dx2^dx3^dx4, the basis
dx^i^dx^j (i<j) of 2-forms is orthonormal, sphere volume Vol(S^3) = 2 pi^2
(halved on the Z2 quotient).  Under these the L2 norm of the harmonic
anti-self-dual 2-form is pi^2/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.integrate import quad

from . import calculus as ca
from .calculus import DEFAULT_REL_STEP
from . import lin4
from .errors import AccuracyError, DomainError
from .jets import CurvatureTensor
from .sphere import VOL_S3_HALF, direction_stencil

MIN_RADIUS = 1e-8  # chart excludes the zero section

_ENDOS, _FORMS = lin4.std_structures()
_I = np.array(_ENDOS)                       # (3, 4, 4) complex structures of euc
_M = np.array([f.matrix() for f in _FORMS])  # (3, 4, 4) their 2-forms


def _pts(xs: np.ndarray) -> np.ndarray:
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if xs.shape[-1] != 4:
        raise DomainError(f"points must have 4 coordinates, got shape {xs.shape}")
    return xs


def _radius2(xs: np.ndarray) -> np.ndarray:
    r2 = np.einsum("pk,pk->p", xs, xs)
    if np.any(r2 <= MIN_RADIUS**2):
        raise DomainError("evaluation at the chart origin (the zero section is excluded)")
    return r2


def _betas(xs: np.ndarray) -> np.ndarray:
    """Invariant coframe components: bet[p, i, k] = (b_i)_k = (I_i x)_k."""
    return np.einsum("ikc,pc->pik", _I, xs)


def profile_functions(r: np.ndarray):
    """The two radial profiles of the metric (f1, f2)."""
    r = np.asarray(r, dtype=float)
    s = np.sqrt(1.0 + r**4)
    return r * r / s, s


@dataclass(frozen=True)
class TensorField:
    """Chart-wise evaluator of a tensor field on R^4 \\ {0}."""

    name: str
    valence: str  # scalar | form1 | form2 | sym2 | metric
    fn: Callable[[np.ndarray], np.ndarray]
    profile: str | None = None

    def __call__(self, xs: np.ndarray) -> np.ndarray:
        return self.fn(_pts(xs))


def euclid_metric() -> TensorField:
    def f(xs):
        return np.broadcast_to(np.eye(4), (xs.shape[0], 4, 4)).copy()
    return TensorField("euc", "metric", f, profile="flat")


def eh_metric() -> TensorField:
    """The Eguchi-Hanson metric in cartesian chart components."""
    def f(xs):
        r2 = _radius2(xs)
        f1, f2 = profile_functions(np.sqrt(r2))
        bet = _betas(xs)
        xx = np.einsum("pk,pl->pkl", xs, xs)
        b11 = np.einsum("pk,pl->pkl", bet[:, 0], bet[:, 0])
        b23 = (np.einsum("pk,pl->pkl", bet[:, 1], bet[:, 1])
               + np.einsum("pk,pl->pkl", bet[:, 2], bet[:, 2]))
        return (f1 / r2)[:, None, None] * (xx + b11) + (f2 / r2**2)[:, None, None] * b23
    return TensorField("eh", "metric", f,
                       profile="f1 (dr^2 + r^2 a1^2) + f2 (a2^2 + a3^2)")


def omega_form() -> TensorField:
    """The closed anti-self-dual L2 generator of the Eguchi-Hanson space."""
    def f(xs):
        r2 = _radius2(xs)
        r4 = r2 * r2
        f1, f2 = profile_functions(np.sqrt(r2))
        bet = _betas(xs)
        xb1 = (np.einsum("pk,pl->pkl", xs, bet[:, 0])
               - np.einsum("pk,pl->pkl", bet[:, 0], xs))
        b2b3 = (np.einsum("pk,pl->pkl", bet[:, 1], bet[:, 2])
                - np.einsum("pk,pl->pkl", bet[:, 2], bet[:, 1]))
        return ((f1 / r2)[:, None, None] * xb1
                - (f2 / r4)[:, None, None] * b2b3) / (1.0 + r4)[:, None, None]
    return TensorField("omega", "form2", f, profile="(e0^e1 - e2^e3)/(1+r^4)")


def complex_structures(xs: np.ndarray) -> np.ndarray:
    """The three Eguchi-Hanson complex structures J[p, i, a, b] in the chart.

    J1 is the constant chart structure; J2, J3 are raised from the constant
    Kahler forms of the opposite pair with the Eguchi-Hanson metric.
    """
    xs = _pts(xs)
    g = eh_metric()(xs)
    gi = np.linalg.inv(g)
    out = np.empty((xs.shape[0], 3, 4, 4))
    out[:, 0] = _I[0]
    out[:, 1] = -np.einsum("pca,ab->pcb", gi, _M[1])
    out[:, 2] = -np.einsum("pca,ab->pcb", gi, _M[2])
    return out


def kahler_form() -> TensorField:
    """Kahler form of the first complex structure: w1(u, v) = eh(J1 u, v)."""
    ehf = eh_metric()

    def f(xs):
        g = ehf(xs)
        return np.einsum("ak,pal->pkl", _I[0], g)
    return TensorField("kahler1", "form2", f)


def o_tensor(i: int) -> TensorField:
    """Kernel tensor o_i(u, v) = Omega(u, J_i v); symmetric and eh-trace-free."""
    if i not in (1, 2, 3):
        raise DomainError("kernel tensor index must be 1, 2 or 3")
    om = omega_form()

    def f(xs):
        w = om(xs)
        j = complex_structures(xs)[:, i - 1]
        return np.einsum("pka,pal->pkl", w, j)
    return TensorField(f"o{i}", "sym2", f)


def o_leading(i: int) -> TensorField:
    """Flat-space asymptotics of o_i: homogeneous of degree -4.

    o1 ~ (x x + b1 b1 - b2 b2 - b3 b3)/r^6, and cyclically for o2, o3 with
    the mixed radial terms (all products unnormalized symmetric)."""
    if i not in (1, 2, 3):
        raise DomainError("kernel tensor index must be 1, 2 or 3")

    def f(xs):
        r2 = _radius2(xs)
        bet = _betas(xs)
        def s(a, b):
            return np.einsum("pk,pl->pkl", a, b) + np.einsum("pk,pl->pkl", b, a)
        if i == 1:
            num = (np.einsum("pk,pl->pkl", xs, xs)
                   + np.einsum("pk,pl->pkl", bet[:, 0], bet[:, 0])
                   - np.einsum("pk,pl->pkl", bet[:, 1], bet[:, 1])
                   - np.einsum("pk,pl->pkl", bet[:, 2], bet[:, 2]))
        elif i == 2:
            num = s(xs, bet[:, 2]) + s(bet[:, 0], bet[:, 1])
        else:
            num = -s(xs, bet[:, 1]) + s(bet[:, 0], bet[:, 2])
        return num / (r2**3)[:, None, None]
    return TensorField(f"o{i}_leading", "sym2", f)


def xi_form() -> TensorField:
    """Primitive-generating 2-form -(1/12)(1+r^4)^{3/2} Omega."""
    om = omega_form()

    def f(xs):
        r2 = _radius2(xs)
        scale = -(1.0 + r2 * r2) ** 1.5 / 12.0
        return scale[:, None, None] * om(xs)
    return TensorField("xi", "form2", f)


def xi_codifferential_closed_form() -> TensorField:
    """Closed form of d* xi: (r^4 / (2 sqrt(1+r^4))) alpha_1."""
    def f(xs):
        r2 = _radius2(xs)
        bet = _betas(xs)
        c = r2 / (2.0 * np.sqrt(1.0 + r2 * r2))
        return c[:, None] * bet[:, 0]
    return TensorField("dstar_xi", "form1", f)


def f_potential() -> TensorField:
    """The scalar sqrt(1 + r^4); its eh-Laplacian is the constant -8."""
    def f(xs):
        r2 = _radius2(xs)
        return np.sqrt(1.0 + r2 * r2)
    return TensorField("f", "scalar", f)


def khat_tensor(i: int) -> TensorField:
    """Preimage of o_i under the gauged linearized operator:
    khat_i = -(1/12)(1+r^4)^{3/2} o_i."""
    oi = o_tensor(i)

    def f(xs):
        r2 = _radius2(xs)
        scale = -(1.0 + r2 * r2) ** 1.5 / 12.0
        return scale[:, None, None] * oi(xs)
    return TensorField(f"khat{i}", "sym2", f)


def _gauge_vector_oneform() -> TensorField:
    """eh-dual of the radial gauge field ((1+r^4)^{3/2} - 1)/r^3 d/dr."""
    ehf = eh_metric()

    def f(xs):
        r2 = _radius2(xs)
        r = np.sqrt(r2)
        w = ((1.0 + r2 * r2) ** 1.5 - 1.0) / r**3
        g = ehf(xs)
        return (w / r)[:, None] * np.einsum("pka,pa->pk", g, xs)
    return TensorField("gauge_oneform", "form1", f)


def k_tensor(i: int, rel_step: float = DEFAULT_REL_STEP) -> TensorField:
    """Trace-free solution of the linearized equation sourcing o_i.

    k_1 = (3/2) khat_1 - (1/8) sqrt(1+r^4) eh + (1/12) delta*(gauge field);
    k_2 = 2 khat_2 and k_3 = 2 khat_3 exactly.  The gauge term of k_1 is a
    numeric symmetrized covariant derivative.
    """
    if i in (2, 3):
        kh = khat_tensor(i)

        def f2(xs):
            return 2.0 * kh(xs)
        return TensorField(f"k{i}", "sym2", f2)

    kh = khat_tensor(1)
    ehf = eh_metric()
    gauge = _gauge_vector_oneform()

    def f1(xs):
        r2 = _radius2(xs)
        mj = ca.metric_jet(ehf.fn, xs, rel_step=rel_step)
        ujet = ca.field_jet2(gauge.fn, xs, rel_step=rel_step)
        gauge_term = ca.delta_star_1form(mj, ujet)
        return (1.5 * kh(xs)
                - 0.125 * np.sqrt(1.0 + r2 * r2)[:, None, None] * ehf(xs)
                + gauge_term / 12.0)
    return TensorField("k1", "sym2", f1)


def eh_asymptotic_defect(xs: np.ndarray) -> np.ndarray:
    """Failure of the second-order asymptotic expansion of the radial profiles.

    Per metric block, the expansion predicts f1 = 1 - 1/(2r^4) for the
    (dr^2 + r^2 a1^2) block and f2 = r^2 + 1/(2r^2) for the (a2^2 + a3^2)
    block; the defect is the larger of the two coefficient deviations.  It
    decays like r^-6 (the sharp next order), inside the stated O(r^-6).
    Defined for r >= 2 only.
    """
    xs = _pts(xs)
    r = np.sqrt(_radius2(xs))
    if np.any(r < 2.0):
        raise DomainError("asymptotic defect is defined for r >= 2")
    f1, f2 = profile_functions(r)
    d1 = np.abs(f1 - (1.0 - 0.5 / r**4))
    d2 = np.abs(f2 - (r**2 + 0.5 / r**2))
    return np.maximum(d1, d2)


# ---------------------------------------------------------------------------
# numeric covariant calculus on fields

def numeric_connection(g: TensorField, xs: np.ndarray, rel_step: float = DEFAULT_REL_STEP,
                       tol: float | None = None):
    """Christoffel symbols Gamma^a_bc at the points, with error estimate."""
    mj = ca.metric_jet(g.fn, _pts(xs), rel_step=rel_step, tol=tol)
    return mj.gamma, mj.err


def numeric_curvature(g: TensorField, x: np.ndarray, rel_step: float = DEFAULT_REL_STEP,
                      tol: float | None = None) -> tuple[CurvatureTensor, float]:
    """Curvature tensor at a single point (projected onto the exact
    algebraic-identity subspace; the projection size is inside err)."""
    x = _pts(x)
    if x.shape[0] != 1:
        raise DomainError("numeric_curvature takes a single point")
    mj = ca.metric_jet(g.fn, x, rel_step=rel_step, tol=tol)
    raw = mj.rm[0]
    proj = ca.curvature_array(mj)[0]
    err = max(mj.err, float(np.abs(raw - proj).max()))
    if tol is not None and err > tol:
        raise AccuracyError(f"curvature error estimate {err:.3e} exceeds {tol:.3e}")
    return CurvatureTensor(proj), err


def ricci(g: TensorField, xs: np.ndarray, rel_step: float = DEFAULT_REL_STEP,
          tol: float | None = None):
    """Ricci tensor (P, 4, 4) with error estimate."""
    mj = ca.metric_jet(g.fn, _pts(xs), rel_step=rel_step, tol=tol)
    return mj.ricci(), mj.err


def operator_P(g: TensorField, h: TensorField, xs: np.ndarray,
               rel_step: float = DEFAULT_REL_STEP, tol: float | None = None):
    """(1/2) nabla*nabla h - R(h) at the points."""
    xs = _pts(xs)
    mj = ca.metric_jet(g.fn, xs, rel_step=rel_step, tol=tol)
    hjet = ca.field_jet2(h.fn, xs, rel_step=rel_step, tol=tol)
    return ca.operator_p_sym2(mj, hjet), max(mj.err, hjet.err)


def operator_B(g: TensorField, h: TensorField, xs: np.ndarray,
               rel_step: float = DEFAULT_REL_STEP, tol: float | None = None):
    """Bianchi operator delta h + (1/2) d tr h at the points."""
    xs = _pts(xs)
    mj = ca.metric_jet(g.fn, xs, rel_step=rel_step, tol=tol)
    hjet = ca.field_jet2(h.fn, xs, rel_step=rel_step, tol=tol)
    return ca.operator_b_sym2(mj, hjet), max(mj.err, hjet.err)


@dataclass
class FrameData:
    """Orthonormal coframe adapted to (dr, a1, a2, a3) plus local geometry."""

    coframe: np.ndarray        # (4, 4) rows e^0..e^3
    gram_deviation: float
    gamma: np.ndarray
    curvature: np.ndarray
    err: float


def frame_data(g: TensorField, x: np.ndarray, rel_step: float = DEFAULT_REL_STEP) -> FrameData:
    x = _pts(x)
    if x.shape[0] != 1:
        raise DomainError("frame_data takes a single point")
    r = np.sqrt(_radius2(x))[0]
    bet = _betas(x)[0]
    raw = np.vstack([x[0] / r, bet / r])  # euclidean-orthonormal adapted coframe
    mj = ca.metric_jet(g.fn, x, rel_step=rel_step)
    gi = mj.ginv[0]
    frame = []
    for v in raw:
        w = v.copy()
        for u in frame:
            w = w - (u @ gi @ w) * u
        frame.append(w / np.sqrt(w @ gi @ w))
    frame = np.array(frame)
    gram = frame @ gi @ frame.T
    return FrameData(coframe=frame, gram_deviation=float(np.abs(gram - np.eye(4)).max()),
                     gamma=mj.gamma[0], curvature=ca.curvature_array(mj)[0], err=mj.err)


# ---------------------------------------------------------------------------
# integrals

@lru_cache(maxsize=None)
def l2_norm_omega(cutoff: float = 40.0, tol: float = 1e-8) -> float:
    """L2 norm squared of the anti-self-dual generator over the Z2 quotient.

    Radial adaptive quadrature of the pointwise squared norm times r^3,
    multiplied by Vol(S^3)/2, plus an analytic tail from the r^-8 decay.
    Sphere-constancy of the integrand is verified at moderate radii (at tiny
    radii the chart metric is too ill-conditioned for that check).  Under
    the declared form-norm convention the value is pi^2/2.
    """
    om = omega_form()
    ehf = eh_metric()
    dirs = direction_stencil(24)
    for r in (0.3, 1.0, 3.0, 10.0):
        vals = ca.norm_form2(ehf(r * dirs), om(r * dirs)) ** 2
        if vals.max() - vals.min() > 1e-8 * vals.max():
            raise AccuracyError("squared norm of the harmonic form is not radial")

    n0 = dirs[0]

    def pointwise(r):
        pts = r * n0[None, :]
        return float(ca.norm_form2(ehf(pts), om(pts))[0] ** 2)

    eps = 1e-3
    val, abserr = quad(lambda r: pointwise(r) * r**3, eps, cutoff, limit=200)
    head = 0.5 * pointwise(eps) * eps**4  # integrand <= const r^3 near 0
    tail = pointwise(cutoff) * (1.0 + cutoff**4) / 4.0
    total = VOL_S3_HALF * (val + head + tail)
    err = VOL_S3_HALF * (abserr + head + tail / cutoff**4)
    if err > tol:
        raise AccuracyError(f"harmonic-form norm quadrature error {err:.2e} > {tol:.2e}")
    return float(total)


def kernel_gram_matrix(cutoff: float = 40.0) -> np.ndarray:
    """L2 Gram matrix of the three kernel tensors over the Z2 quotient."""
    ten = [o_tensor(i) for i in (1, 2, 3)]
    ehf = eh_metric()
    dirs = direction_stencil(24)[:4]
    gram = np.zeros((3, 3))
    for a in range(3):
        for b in range(a, 3):
            def pointwise(r):
                pts = r * dirs
                g = ehf(pts)
                gi = np.linalg.inv(g)
                ta, tb = ten[a](pts), ten[b](pts)
                vals = np.einsum("pia,pjb,pij,pab->p", gi, gi, ta, tb)
                return float(vals.mean())
            val, _ = quad(lambda r: pointwise(r) * r**3, 1e-3, cutoff, limit=200)
            tail = pointwise(cutoff) * (1.0 + cutoff**4) / 4.0
            gram[a, b] = gram[b, a] = VOL_S3_HALF * (val + tail)
    return gram


# ---------------------------------------------------------------------------
# identity verification

@dataclass
class IdentityReport:
    """Max residuals of the verified identities over a sample grid."""

    residuals: dict[str, float]
    tolerances: dict[str, float]
    rows: list  # (identity, r, direction index, residual)
    err_estimate: float

    def passed(self) -> bool:
        return all(self.residuals[k] <= self.tolerances[k] for k in self.residuals)

    def failures(self) -> list[str]:
        return [k for k in self.residuals if self.residuals[k] > self.tolerances[k]]


DEFAULT_TOLERANCES = {
    "ricci_flat": 1e-6,
    "omega_anti_self_dual": 1e-9,
    "omega_closed": 1e-7,
    "xi_codifferential": 1e-8,
    "xi_d_codifferential": 1e-6,
    "laplacian_potential": 1e-6,
    "kernel_P_o1": 1e-5,
    "kernel_P_o2": 1e-5,
    "kernel_P_o3": 1e-5,
    "preimage_P_khat1": 1e-5,
    "preimage_P_khat2": 1e-5,
    "preimage_P_khat3": 1e-5,
    "kernel_B_o": 1e-6,
    "kernel_trace_free": 1e-8,
    "k1_trace_free": 1e-8,
}


def default_grid(n_r: int = 10, r_min: float = 0.3, r_max: float = 5.0,
                 n_dirs: int = 5, seed: int = 7) -> np.ndarray:
    """Log-spaced radii times a deterministic direction subset."""
    if n_r < 1 or n_dirs < 1:
        raise DomainError("grid must contain at least one radius and one direction")
    radii = np.geomspace(r_min, r_max, n_r)
    dirs = direction_stencil(24)
    rng = np.random.default_rng(seed)
    pick = rng.permutation(24)[:n_dirs]
    pts = np.concatenate([r * dirs[pick] for r in radii])
    return pts


def verify_identities(points: np.ndarray | None = None, rel_step: float = DEFAULT_REL_STEP,
                      tolerances: dict[str, float] | None = None) -> IdentityReport:
    """Numeric residuals of the Eguchi-Hanson identity suite.

    Covers: Ricci-flatness; anti-self-duality and closedness of the harmonic
    form; the closed form of d* of the primitive form and of its exterior
    derivative (= Kahler form + harmonic form); the potential's Laplacian
    (-8); the kernel property of the o_i; P khat_i = o_i; B o_i = 0; and the
    trace-free checks for o_i and k_1.
    """
    pts = _pts(points if points is not None else default_grid())
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        tol.update(tolerances)

    ehf = eh_metric()
    om = omega_form()
    xi = xi_form()
    w1 = kahler_form()
    fpot = f_potential()

    mj = ca.metric_jet(ehf.fn, pts, rel_step=rel_step)
    g = mj.g
    err = mj.err

    res: dict[str, np.ndarray] = {}
    res["ricci_flat"] = ca.norm_sym2(g, mj.ricci())

    omv = om(pts)
    res["omega_anti_self_dual"] = ca.norm_form2(g, ca.hodge_star_form2(g, omv) + omv)

    omjet = ca.field_jet2(om.fn, pts, rel_step=rel_step)
    err = max(err, omjet.err)
    res["omega_closed"] = np.abs(ca.exterior_derivative_form2(omjet)).max(axis=(1, 2, 3))

    xijet = ca.field_jet2(xi.fn, pts, rel_step=rel_step)
    err = max(err, xijet.err)
    codiff = ca.codifferential_form2(mj, xijet)
    res["xi_codifferential"] = ca.norm_form1(g, codiff - xi_codifferential_closed_form()(pts))
    dcodiff = ca.d_codifferential_form2(mj, xijet)
    res["xi_d_codifferential"] = ca.norm_form2(g, dcodiff - w1(pts) - omv)

    fjet = ca.field_jet2(fpot.fn, pts, rel_step=rel_step)
    err = max(err, fjet.err)
    res["laplacian_potential"] = np.abs(ca.laplacian_scalar(mj, fjet) + 8.0)

    gi = mj.ginv
    b_worst = np.zeros(pts.shape[0])
    tr_worst = np.zeros(pts.shape[0])
    for i in (1, 2, 3):
        oi = o_tensor(i)
        ojet = ca.field_jet2(oi.fn, pts, rel_step=rel_step)
        err = max(err, ojet.err)
        res[f"kernel_P_o{i}"] = ca.norm_sym2(g, ca.operator_p_sym2(mj, ojet))
        kjet = ca.field_jet2(khat_tensor(i).fn, pts, rel_step=rel_step)
        err = max(err, kjet.err)
        res[f"preimage_P_khat{i}"] = ca.norm_sym2(
            g, ca.operator_p_sym2(mj, kjet) - ojet.value)
        b_worst = np.maximum(b_worst, ca.norm_form1(g, ca.operator_b_sym2(mj, ojet)))
        tr_worst = np.maximum(tr_worst,
                              np.abs(np.einsum("pkl,pkl->p", gi, ojet.value)))
    res["kernel_B_o"] = b_worst
    res["kernel_trace_free"] = tr_worst

    k1 = k_tensor(1, rel_step=rel_step)
    res["k1_trace_free"] = np.abs(np.einsum("pkl,pkl->p", gi, k1(pts)))

    radii = np.linalg.norm(pts, axis=1)
    rows = []
    for name, vals in res.items():
        for p in range(pts.shape[0]):
            rows.append((name, float(radii[p]), p, float(vals[p])))
    worst = {name: float(vals.max()) for name, vals in res.items()}
    return IdentityReport(residuals=worst, tolerances=tol, rows=rows, err_estimate=err)


def verify_xi_identities(points: np.ndarray | None = None,
                         rel_step: float = DEFAULT_REL_STEP) -> dict[str, float]:
    """Residuals of the three primitive-form identities on a sample grid:
    the closed form of d* of the primitive form, its exterior derivative
    (= Kahler form + harmonic form), and the potential's constant Laplacian.
    """
    pts = _pts(points if points is not None else default_grid())
    mj = ca.metric_jet(eh_metric().fn, pts, rel_step=rel_step)
    xijet = ca.field_jet2(xi_form().fn, pts, rel_step=rel_step)
    cod = ca.codifferential_form2(mj, xijet)
    dcod = ca.d_codifferential_form2(mj, xijet)
    fjet = ca.field_jet2(f_potential().fn, pts, rel_step=rel_step)
    return {
        "xi_codifferential": float(ca.norm_form1(
            mj.g, cod - xi_codifferential_closed_form()(pts)).max()),
        "xi_d_codifferential": float(ca.norm_form2(
            mj.g, dcod - kahler_form()(pts) - omega_form()(pts)).max()),
        "laplacian_potential": float(np.abs(
            ca.laplacian_scalar(mj, fjet) + 8.0).max()),
    }


def u2_rotation(u: np.ndarray) -> np.ndarray:
    """Real 4x4 rotation of a unitary 2x2 matrix acting on (x1+ix2, x3+ix4)."""
    u = np.asarray(u, dtype=complex)
    a, b, c, d = u[0, 0], u[0, 1], u[1, 0], u[1, 1]
    return np.array([
        [a.real, -a.imag, b.real, -b.imag],
        [a.imag, a.real, b.imag, b.real],
        [c.real, -c.imag, d.real, -d.imag],
        [c.imag, c.real, d.imag, d.real],
    ])


def random_u2(rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
