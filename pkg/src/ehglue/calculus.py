"""Pointwise numeric covariant calculus for metrics given as chart evaluators.

Everything is built on 4th-order central stencils with one Richardson level
(step h and h/2 combined), so the leading truncation is O(h^6) and the
difference of the two levels provides the returned error estimate.  Field
evaluators are vectorized: fn(points[(P, 4)]) -> components[(P, *shape)].

Curvature conventions match :mod:`ehglue.jets`: constant curvature K gives
Rm[i,j,k,l] = K (d_ik d_jl - d_il d_jk), Ric = sum_k Rm[k,i,k,j], and the
rough Laplacian and scalar Laplacian are the nonnegative ones (Delta r^2 < 0
on euclidean space would be the analyst's sign; here Delta f = -sum f'').
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import AccuracyError

Evaluator = Callable[[np.ndarray], np.ndarray]

# Base step rel_step * max(1, r).  2e-3 balances truncation against roundoff
# for the residual tolerances used here (1e-3 is roundoff-limited at r ~ 0.3).
DEFAULT_REL_STEP = 2e-3

_D1_OFF = np.array([-2.0, -1.0, 1.0, 2.0])
_D1_W = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
_D2C_W = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0  # offsets -2..2


@lru_cache(maxsize=None)
def _stencil_offsets() -> np.ndarray:
    """Unit-step displacement stencil shared by value/gradient/hessian."""
    offs = [np.zeros(4)]
    for a in range(4):
        for o in _D1_OFF:
            e = np.zeros(4)
            e[a] = o
            offs.append(e)
    for a in range(4):
        for b in range(a + 1, 4):
            for oa in _D1_OFF:
                for ob in _D1_OFF:
                    e = np.zeros(4)
                    e[a] = oa
                    e[b] = ob
                    offs.append(e)
    return np.array(offs)  # (113, 4)


def _single_level(vals: np.ndarray, h: np.ndarray):
    """Assemble (value, grad, hess) from evaluations on the unit stencil.

    vals has shape (P, 113, *s); h is (P,).  The center value is subtracted
    before combining: all stencil weights sum to zero, so constants drop out
    exactly and the cancellation error of near-constant fields shrinks.
    """
    p, _ = vals.shape[:2]
    s = vals.shape[2:]
    hh = h.reshape((p,) + (1,) * len(s))
    value = vals[:, 0].copy()
    vals = vals - vals[:, :1]
    grad = np.empty((p, 4) + s)
    hess = np.empty((p, 4, 4) + s)
    for a in range(4):
        block = vals[:, 1 + 4 * a:1 + 4 * (a + 1)]  # offsets -2,-1,1,2
        grad[:, a] = np.einsum("o,po...->p...", _D1_W, block) / hh
        hess[:, a, a] = np.einsum("o,po...->p...",
                                  _D2C_W[[0, 1, 3, 4]], block) / hh**2
    base = 17
    for a in range(4):
        for b in range(a + 1, 4):
            block = vals[:, base:base + 16].reshape((p, 4, 4) + s)
            mixed = np.einsum("i,j,pij...->p...", _D1_W, _D1_W, block) / hh**2
            hess[:, a, b] = mixed
            hess[:, b, a] = mixed
            base += 16
    return value, grad, hess


@dataclass
class Jet2:
    """Pointwise 2-jet of a field: value, first and second derivatives."""

    value: np.ndarray  # (P, *s)
    d1: np.ndarray     # (P, 4, *s)     d1[p, a] = d_a f
    d2: np.ndarray     # (P, 4, 4, *s)  d2[p, a, b] = d_a d_b f
    err: float         # max Richardson correction over all outputs


def field_jet2(fn: Evaluator, xs: np.ndarray, rel_step: float = DEFAULT_REL_STEP,
               tol: float | None = None) -> Jet2:
    """Numeric 2-jet of a vectorized field at points xs (P, 4).

    The base step is rel_step * max(1, r) per point.  Raises AccuracyError if
    the Richardson error estimate exceeds tol (when given) or if the step
    underflows the coordinates.
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    r = np.linalg.norm(xs, axis=1)
    h = rel_step * np.maximum(1.0, r)
    if np.any(np.abs(xs).max(axis=1) + 2 * h == np.abs(xs).max(axis=1)):
        raise AccuracyError("differentiation step underflow")
    offs = _stencil_offsets()

    def level(step):
        pts = xs[:, None, :] + step[:, None, None] * offs[None, :, :]
        vals = fn(pts.reshape(-1, 4))
        return _single_level(vals.reshape(xs.shape[0], offs.shape[0], *vals.shape[1:]), step)

    v1, g1, h1 = level(h)
    v2, g2, h2 = level(0.5 * h)
    # both levels are O(h^4) accurate; the combination is O(h^6)
    d1 = (16.0 * g2 - g1) / 15.0
    d2 = (16.0 * h2 - h1) / 15.0
    err = max(float(np.abs(g2 - g1).max() / 15.0), float(np.abs(h2 - h1).max() / 15.0))
    if tol is not None and err > tol:
        raise AccuracyError(f"differentiation error estimate {err:.3e} exceeds {tol:.3e}")
    return Jet2(value=v1, d1=d1, d2=d2, err=err)


@dataclass
class MetricJet:
    """Metric 2-jet with derived connection and curvature at a batch of points."""

    g: np.ndarray        # (P, 4, 4)
    ginv: np.ndarray
    dg: np.ndarray       # (P, 4, 4, 4)   dg[p, e, i, j] = d_e g_ij
    ddg: np.ndarray      # (P, 4, 4, 4, 4)
    gamma: np.ndarray    # (P, 4, 4, 4)   gamma[p, a, b, c] = Gamma^a_bc
    dgamma: np.ndarray   # (P, 4, 4, 4, 4) dgamma[p, e, a, b, c] = d_e Gamma^a_bc
    rm: np.ndarray       # (P, 4, 4, 4, 4) full lowered curvature
    err: float

    def ricci(self) -> np.ndarray:
        return np.einsum("pka,pkiaj->pij", self.ginv, self.rm)

    def scal(self) -> np.ndarray:
        return np.einsum("pij,pij->p", self.ginv, self.ricci())


def metric_jet(fn: Evaluator, xs: np.ndarray, rel_step: float = DEFAULT_REL_STEP,
               tol: float | None = None) -> MetricJet:
    jet = field_jet2(fn, xs, rel_step=rel_step, tol=tol)
    g, dg, ddg = jet.value, jet.d1, jet.d2
    ginv = np.linalg.inv(g)
    # sym[p,b,d,c] = d_b g_dc + d_c g_db - d_d g_bc
    sym = dg + np.einsum("pcdb->pbdc", dg) - np.einsum("pdbc->pbdc", dg)
    gamma = 0.5 * np.einsum("pad,pbdc->pabc", ginv, sym)
    dginv = -np.einsum("pam,pemn,pnd->pead", ginv, dg, ginv)
    # dsym[p,e,b,d,c] = d_e sym[b,d,c]
    dsym = (ddg + np.einsum("pecdb->pebdc", ddg) - np.einsum("pedbc->pebdc", ddg))
    dgamma = (0.5 * np.einsum("pead,pbdc->peabc", dginv, sym)
              + 0.5 * np.einsum("pad,pebdc->peabc", ginv, dsym))
    # Rm[a,b,c,d] = g_ce (d_a G^e_bd - d_b G^e_ad + G^e_af G^f_bd - G^e_bf G^f_ad)
    t1 = np.einsum("paebd->pabed", dgamma)
    t2 = np.einsum("pbead->pabed", dgamma)
    t3 = np.einsum("peaf,pfbd->pabed", gamma, gamma)
    t4 = np.einsum("pebf,pfad->pabed", gamma, gamma)
    rm = np.einsum("pce,pabed->pabcd", g, t1 - t2 + t3 - t4)
    return MetricJet(g=g, ginv=ginv, dg=dg, ddg=ddg, gamma=gamma, dgamma=dgamma,
                     rm=rm, err=jet.err)


def _sym_pair_project(rm: np.ndarray) -> np.ndarray:
    """Project a numeric curvature array onto exact algebraic-identity form."""
    s = 0.5 * (rm + np.einsum("pcdab->pabcd", rm))
    s = 0.25 * (s - np.einsum("pbacd->pabcd", s) - np.einsum("pabdc->pabcd", s)
                + np.einsum("pbadc->pabcd", s))
    bianchi = (s + np.einsum("pacdb->pabcd", s) + np.einsum("padbc->pabcd", s)) / 3.0
    return s - bianchi


def curvature_array(mj: MetricJet, project: bool = True) -> np.ndarray:
    return _sym_pair_project(mj.rm) if project else mj.rm


# --- operators on auxiliary fields -----------------------------------------

def covariant_d1(mj: MetricJet, hjet: Jet2) -> np.ndarray:
    """First covariant derivative of a symmetric 2-tensor: D[p,b,i,j]."""
    return (hjet.d1
            - np.einsum("pcbi,pcj->pbij", mj.gamma, hjet.value)
            - np.einsum("pcbj,pic->pbij", mj.gamma, hjet.value))


def rough_laplacian_sym2(mj: MetricJet, hjet: Jet2) -> np.ndarray:
    """(nabla* nabla h)_ij = -g^{ab} (nabla^2 h)_{ab;ij} for a symmetric 2-tensor."""
    gam = mj.gamma        # gam[p,c,b,i] = Gamma^c_bi
    dgam = mj.dgamma      # dgam[p,a,c,b,i] = d_a Gamma^c_bi
    dh = covariant_d1(mj, hjet)
    d_dh = (hjet.d2
            - np.einsum("pacbi,pcj->pabij", dgam, hjet.value)
            - np.einsum("pcbi,pacj->pabij", gam, hjet.d1)
            - np.einsum("pacbj,pic->pabij", dgam, hjet.value)
            - np.einsum("pcbj,paic->pabij", gam, hjet.d1))
    ddh = (d_dh
           - np.einsum("pcab,pcij->pabij", gam, dh)
           - np.einsum("pcai,pbcj->pabij", gam, dh)
           - np.einsum("pcaj,pbic->pabij", gam, dh))
    return -np.einsum("pab,pabij->pij", mj.ginv, ddh)


def curvature_action_sym2(mj: MetricJet, h: np.ndarray) -> np.ndarray:
    """(R h)_ij = Rm[i,k,j,l] h^{kl}; with this sign R(g) = Ric."""
    rm = curvature_array(mj)
    hup = np.einsum("pka,plb,pab->pkl", mj.ginv, mj.ginv, h)
    return np.einsum("pikjl,pkl->pij", rm, hup)


def operator_p_sym2(mj: MetricJet, hjet: Jet2) -> np.ndarray:
    """Gauged linearized Einstein operator (1/2) nabla* nabla - R on sym 2-tensors."""
    return 0.5 * rough_laplacian_sym2(mj, hjet) - curvature_action_sym2(mj, hjet.value)


def operator_b_sym2(mj: MetricJet, hjet: Jet2) -> np.ndarray:
    """Bianchi operator delta h + (1/2) d tr h (a 1-form)."""
    dh = covariant_d1(mj, hjet)
    div = -np.einsum("pka,pakl->pl", mj.ginv, dh)
    dginv = -np.einsum("pam,pemn,pnd->pead", mj.ginv, mj.dg, mj.ginv)
    dtr = (np.einsum("plab,pab->pl", dginv, hjet.value)
           + np.einsum("pab,plab->pl", mj.ginv, hjet.d1))
    return div + 0.5 * dtr


def delta_star_1form(mj: MetricJet, ujet: Jet2) -> np.ndarray:
    """Symmetrized covariant derivative of a 1-form."""
    return (0.5 * (ujet.d1 + np.einsum("pji->pij", ujet.d1))
            - np.einsum("pcij,pc->pij", mj.gamma, ujet.value))


def codifferential_form2(mj: MetricJet, wjet: Jet2) -> np.ndarray:
    """(delta w)_l = -g^{ab} nabla_a w_{bl} for a 2-form."""
    dw = (wjet.d1
          - np.einsum("pcab,pcl->pabl", mj.gamma, wjet.value)
          - np.einsum("pcal,pbc->pabl", mj.gamma, wjet.value))
    return -np.einsum("pab,pabl->pl", mj.ginv, dw)


def d_codifferential_form2(mj: MetricJet, wjet: Jet2) -> np.ndarray:
    """(d delta w)_{kl} for a 2-form, assembled from pointwise jets."""
    gam = mj.gamma
    dgam = mj.dgamma  # dgam[p,k,c,a,b] = d_k Gamma^c_ab
    dginv = -np.einsum("pam,pemn,pnd->pead", mj.ginv, mj.dg, mj.ginv)
    nabla_w = (wjet.d1
               - np.einsum("pcab,pcl->pabl", gam, wjet.value)
               - np.einsum("pcal,pbc->pabl", gam, wjet.value))
    d_nabla_w = (wjet.d2
                 - np.einsum("pkcab,pcl->pkabl", dgam, wjet.value)
                 - np.einsum("pcab,pkcl->pkabl", gam, wjet.d1)
                 - np.einsum("pkcal,pbc->pkabl", dgam, wjet.value)
                 - np.einsum("pcal,pkbc->pkabl", gam, wjet.d1))
    d_delta = -(np.einsum("pkab,pabl->pkl", dginv, nabla_w)
                + np.einsum("pab,pkabl->pkl", mj.ginv, d_nabla_w))
    return d_delta - np.einsum("plk->pkl", d_delta)


def laplacian_scalar(mj: MetricJet, fjet: Jet2) -> np.ndarray:
    """Nonnegative Laplacian: Delta f = -g^{ab}(d_a d_b f - Gamma^c_ab d_c f)."""
    hess = fjet.d2 - np.einsum("pcab,pc->pab", mj.gamma, fjet.d1)
    return -np.einsum("pab,pab->p", mj.ginv, hess)


def exterior_derivative_form2(wjet: Jet2) -> np.ndarray:
    """(dw)_{abc} = d_a w_bc - d_b w_ac + d_c w_ab (max-abs over components
    is the residual used by the closedness checks)."""
    d = wjet.d1
    return d - np.einsum("pbac->pabc", d) + np.einsum("pcab->pabc", d)


# --- pointwise norms and duality -------------------------------------------

def norm_sym2(g: np.ndarray, t: np.ndarray) -> np.ndarray:
    gi = np.linalg.inv(g)
    return np.sqrt(np.einsum("pia,pjb,pij,pab->p", gi, gi, t, t))


def norm_form2(g: np.ndarray, w: np.ndarray) -> np.ndarray:
    gi = np.linalg.inv(g)
    return np.sqrt(0.5 * np.einsum("pia,pjb,pij,pab->p", gi, gi, w, w))


def norm_form1(g: np.ndarray, u: np.ndarray) -> np.ndarray:
    gi = np.linalg.inv(g)
    return np.sqrt(np.einsum("pab,pa,pb->p", gi, u, u))


@lru_cache(maxsize=None)
def _levi_civita() -> np.ndarray:
    eps = np.zeros((4, 4, 4, 4))
    import itertools as it
    for perm in it.permutations(range(4)):
        sign = 1.0
        p = list(perm)
        for i in range(4):
            for j in range(i + 1, 4):
                if p[i] > p[j]:
                    sign = -sign
        eps[perm] = sign
    return eps


def hodge_star_form2(g: np.ndarray, w: np.ndarray) -> np.ndarray:
    """(*w)_{ab} = (1/2) sqrt(det g) eps_{abcd} g^{ce} g^{df} w_{ef}."""
    gi = np.linalg.inv(g)
    vol = np.sqrt(np.linalg.det(g))
    return 0.5 * vol[:, None, None] * np.einsum(
        "abcd,pce,pdf,pef->pab", _levi_civita(), gi, gi, w)
