"""Obstruction functionals on metric germs and the wall condition.

For a quadratic jet H the three obstruction numbers are boundary integrals
at infinity pairing H (and its Bianchi 1-form) against the kernel tensors of
the Eguchi-Hanson space; only the flat-space asymptotics of the kernel
tensors contribute to the limit.  Two independent evaluation routes are
provided:

* exact: the integrand reduces to a quartic polynomial on S^3, integrated by
  the closed monomial formulas (the limit is exact at any radius);
* quadrature: the integrand is sampled at two finite radii with the exact
  curved-space kernel tensors and extrapolated in 1/R^4.

lambda_i = -(raw integral_i) / |Omega|_{L2}^2; for constant invariant-frame
coefficients this equals twice the first column of the closed-form self-dual
curvature block, which ties the obstruction to the wall condition
det R+ = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import ehspace, lin4
from .errors import AccuracyError, InputError, PreconditionError
from .jets import QuadJet, bianchi_euclidean, delta_star, radial_basis_coeffs, radialize
from .sphere import hopf_grid, integral_quartic

WALL_TOL_DEFAULT = 1e-9
_EIG_FLOOR = 1e-300


@lru_cache(maxsize=None)
def _leading_kernel_polys() -> np.ndarray:
    """Coefficient arrays P[i, k, l, c, d] of r^6 * (leading kernel tensors).

    (o_i)_kl(x) = P[i, k, l, c, d] x^c x^d / r^6.
    """
    endos, _ = lin4.std_structures()
    i1, i2, i3 = (np.asarray(e) for e in endos)
    ident = np.eye(4)

    def outer(a, b):
        return np.einsum("kc,ld->klcd", a, b)

    p1 = outer(ident, ident) + outer(i1, i1) - outer(i2, i2) - outer(i3, i3)
    p2 = outer(ident, i3) + outer(i3, ident) + outer(i1, i2) + outer(i2, i1)
    p3 = -(outer(ident, i2) + outer(i2, ident)) + outer(i1, i3) + outer(i3, i1)
    return np.array([p1, p2, p3])


def _raw_exact(h: QuadJet, i: int) -> float:
    """Closed-form boundary integral over the Z2 quotient sphere.

    The integrand (3/r)<H, o_i> + o_i(BH, d/dr) with the leading kernel
    asymptotics is homogeneous of degree 0 after the r^3 volume factor, and
    restricts to a quartic polynomial on the unit sphere.
    """
    p = _leading_kernel_polys()[i - 1]
    pairing = 3.0 * np.einsum("abkl,klcd->abcd", h.coeffs, p)
    b = bianchi_euclidean(h)
    radial = np.einsum("klcd,jk->cdjl", p, b)
    return 0.5 * (integral_quartic(pairing) + integral_quartic(radial))


def _raw_at_radius(h: QuadJet, i: int, radius: float, grid) -> float:
    pts, w = grid
    xs = radius * pts
    o = ehspace.o_tensor(i)(xs)
    hv = h.components(xs)
    b = bianchi_euclidean(h)
    bh = np.einsum("jk,pj->pk", b, xs)
    pairing = 3.0 / radius * np.einsum("pkl,pkl->p", hv, o)
    radial = np.einsum("pkl,pk,pl->p", o, bh, xs) / radius
    return 0.5 * radius**3 * float(np.sum(w * (pairing + radial)))


def raw_obstruction_integral(h: QuadJet, i: int, mode: str = "exact",
                             radius: float = 12.0, grid_size: tuple[int, int] = (12, 12),
                             check_tol: float = 1e-6) -> float:
    """Boundary obstruction integral against the i-th kernel tensor.

    mode 'exact' uses the polynomial reduction; mode 'quadrature' samples the
    exact kernel tensors at radius and 2*radius and extrapolates the 1/R^4
    correction away, then cross-checks convergence.
    """
    if i not in (1, 2, 3):
        raise InputError("kernel index must be 1, 2 or 3")
    if mode == "exact":
        return _raw_exact(h, i)
    if mode != "quadrature":
        raise InputError(f"unknown mode {mode!r}")
    grid = hopf_grid(*grid_size)
    v1 = _raw_at_radius(h, i, radius, grid)
    v2 = _raw_at_radius(h, i, 2.0 * radius, grid)
    extrap = (16.0 * v2 - v1) / 15.0
    scale = max(abs(extrap), 1.0)
    if abs(v2 - extrap) > 0.1 * scale + check_tol * scale * (2.0 * radius) ** 4:
        raise AccuracyError("obstruction quadrature did not converge in 1/R^4")
    return extrap


def raw_closed_form_radial(h: QuadJet) -> np.ndarray:
    """Test oracle: the three raw integrals of a radial jet from its
    invariant-frame coefficient functions,

        raw_1 = int (5 H_11 - H_22 - H_33),   raw_i = int 6 H_1i  (i = 2, 3),

    integrated over the quotient sphere with exact monomial formulas."""
    rc = radial_basis_coeffs(h)

    def integ(i, j):
        return 0.5 * integral_quartic(rc.quartic[i, j])

    return np.array([
        5.0 * integ(0, 0) - integ(1, 1) - integ(2, 2),
        6.0 * integ(0, 1),
        6.0 * integ(0, 2),
    ])


@dataclass(frozen=True)
class ObstructionVector:
    """The three obstruction coefficients with their raw boundary integrals."""

    lam: np.ndarray
    raw: np.ndarray
    omega_norm: float

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        raw = np.asarray(self.raw, dtype=float)
        if lam.shape != (3,) or raw.shape != (3,):
            raise InputError("obstruction vector needs 3 components")
        if np.abs(lam + raw / self.omega_norm).max() > 1e-12 * max(1.0, np.abs(lam).max()):
            raise InputError("lambda and raw integrals violate the defining relation")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "raw", raw)

    @classmethod
    def from_raw(cls, raw: np.ndarray, omega_norm: float) -> "ObstructionVector":
        raw = np.asarray(raw, dtype=float)
        return cls(lam=-raw / omega_norm, raw=raw, omega_norm=omega_norm)


def lambda_coefficients(h: QuadJet, mode: str = "exact", **kw) -> ObstructionVector:
    """Obstruction coefficients of a jet (input frame).

    The jet is radialized first (the integrals are gauge invariant, so this
    only normalizes the representative), then the three raw integrals are
    divided by -|Omega|^2_{L2}.
    """
    hr = h + delta_star(radialize(h))
    raw = np.array([raw_obstruction_integral(hr, i, mode=mode, **kw) for i in (1, 2, 3)])
    return ObstructionVector.from_raw(raw, ehspace.l2_norm_omega())


@dataclass(frozen=True)
class WallReport:
    """Eigen-analysis of the self-dual curvature block at the singular point."""

    rplus: np.ndarray
    eigenvalues: np.ndarray      # sorted by |value|
    det: float
    on_wall: bool
    tol: float
    kernel_dim: int
    kernel: np.ndarray           # (kernel_dim, 3) orthonormal rows
    degeneracy: str              # off_wall | nondegenerate | degenerate


def _fix_sign(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    return -v if v[k] < 0 else v


def wall_condition(rplus: np.ndarray, tol: float = WALL_TOL_DEFAULT) -> WallReport:
    """Wall condition det R+ = 0 with kernel analysis.

    tol is relative to the largest |eigenvalue|; the class is nondegenerate
    when exactly one eigenvalue vanishes."""
    rplus = np.asarray(rplus, dtype=float)
    if rplus.shape != (3, 3):
        raise InputError("self-dual curvature block must be 3x3")
    scale = max(float(np.abs(rplus).max()), 1.0)
    if np.abs(rplus - rplus.T).max() > 1e-12 * scale:
        raise InputError("self-dual curvature block must be symmetric")
    rplus = 0.5 * (rplus + rplus.T)
    vals, vecs = np.linalg.eigh(rplus)
    order = np.argsort(np.abs(vals), kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    thresh = tol * float(np.abs(vals).max())
    kdim = int(np.sum(np.abs(vals) <= thresh))
    on_wall = kdim >= 1

    kernel = vecs[:, :kdim].T.copy()
    if kdim >= 2:
        # tie-break: first kernel vector maximizes overlap with the first
        # self-dual direction, then Gram-Schmidt inside the kernel
        e1 = np.zeros(3)
        e1[0] = 1.0
        proj = kernel.T @ (kernel @ e1)
        if np.linalg.norm(proj) > 1e-12:
            basis = [proj / np.linalg.norm(proj)]
            for v in kernel:
                w = v - sum((u @ v) * u for u in basis)
                if np.linalg.norm(w) > 1e-9:
                    basis.append(w / np.linalg.norm(w))
            kernel = np.array(basis[:kdim])
    kernel = np.array([_fix_sign(v) for v in kernel]) if kdim else kernel

    if kdim == 0:
        cls = "off_wall"
    elif kdim == 1:
        cls = "nondegenerate"
    else:
        cls = "degenerate"
    return WallReport(rplus=rplus, eigenvalues=vals, det=float(np.linalg.det(rplus)),
                      on_wall=on_wall, tol=tol, kernel_dim=kdim, kernel=kernel,
                      degeneracy=cls)


def align_gauge(rplus: np.ndarray, tol: float = WALL_TOL_DEFAULT
                ) -> tuple[lin4.GaugeElement, np.ndarray]:
    """Gauge rotating the kernel direction of R+ onto the first self-dual axis.

    Returns (phi, conjugated) with conjugated = S R+ S^T diagonal, S =
    sp1_rotation(phi), and conjugated[0, 0] the (near-zero) kernel
    eigenvalue; the remaining eigenvalues are sorted by |value|.
    """
    report = wall_condition(rplus, tol=tol)
    if not report.on_wall:
        raise PreconditionError("no near-zero eigenvalue; gauge alignment undefined")
    vals, vecs = np.linalg.eigh(report.rplus)
    order = np.argsort(np.abs(vals), kind="stable")
    rows = [_fix_sign(vecs[:, k]) for k in order]
    q = np.array(rows)
    if np.linalg.det(q) < 0:
        q[2] = -q[2]
    phi = lin4.gauge_from_rotation3(q)
    s = lin4.sp1_rotation(phi)
    return phi, s @ report.rplus @ s.T


def gauge_derivative(rplus_aligned: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """Derivative of the obstruction coefficients under the residual gauge.

    The aligned block diag(0, a2, a3) moves under conjugation by exp(t xi)
    with xi in the complement of the stabilizer; the coefficients of the
    image of the first self-dual direction respond as (0, a2 xi2, a3 xi3).
    """
    m = np.asarray(rplus_aligned, dtype=float)
    if m.shape != (3, 3):
        raise InputError("aligned block must be 3x3")
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (2,):
        raise InputError("gauge direction needs 2 components (xi2, xi3)")
    scale = max(float(np.abs(m).max()), 1.0)
    offdiag = m - np.diag(np.diag(m))
    if np.abs(offdiag).max() > 1e-10 * scale or abs(m[0, 0]) > 1e-8 * scale:
        raise PreconditionError("input is not in aligned diagonal form")
    return np.array([0.0, m[1, 1] * xi[0], m[2, 2] * xi[1]])


def gauge_generator(xi: np.ndarray) -> np.ndarray:
    """so(3) matrix of a residual gauge direction (xi2, xi3)."""
    xi = np.asarray(xi, dtype=float)
    return np.array([
        [0.0, -xi[0], -xi[1]],
        [xi[0], 0.0, 0.0],
        [xi[1], 0.0, 0.0],
    ])
