"""Integration over the unit 3-sphere and its Z2 quotient.

Exact monomial formulas (quoted in every report):

    Vol(S^3) = 2 pi^2,      int_{S^3} x_i x_j dS = (pi^2 / 2) delta_ij,
    int_{S^3} x_a x_b x_c x_d dS = (pi^2 / 12) (d_ab d_cd + d_ac d_bd + d_ad d_bc).

The Z2 quotient halves every integral; integrands handled here are even.
"""

from __future__ import annotations

import numpy as np

VOL_S3 = 2.0 * np.pi**2
VOL_S3_HALF = np.pi**2


def integral_quadratic(q: np.ndarray) -> float:
    """int_{S^3} q_ab x^a x^b dS for an arbitrary coefficient matrix."""
    return float(0.5 * np.pi**2 * np.trace(np.asarray(q, dtype=float)))


def integral_quartic(c: np.ndarray) -> float:
    """int_{S^3} c_abcd x^a x^b x^c x^d dS; c need not be symmetrized."""
    c = np.asarray(c, dtype=float)
    s = np.einsum("aabb->", c) + np.einsum("abab->", c) + np.einsum("abba->", c)
    return float(np.pi**2 / 12.0 * s)


def hopf_grid(n_u: int = 12, n_phi: int = 12) -> tuple[np.ndarray, np.ndarray]:
    """Product quadrature on S^3: Gauss-Legendre x two periodic trapezoids.

    In the coordinates x = (sqrt(1-u) e^{i p1}, sqrt(u) e^{i p2}) the round
    measure is (1/2) du dp1 dp2, so the rule is exact for polynomials of
    modest degree and spectrally accurate for smooth integrands.  Weights sum
    to Vol(S^3).
    """
    nodes, wts = np.polynomial.legendre.leggauss(n_u)
    u = 0.5 * (nodes + 1.0)
    wu = 0.5 * wts
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    wphi = 2.0 * np.pi / n_phi

    uu, p1, p2 = np.meshgrid(u, phi, phi, indexing="ij")
    c1 = np.sqrt(1.0 - uu)
    c2 = np.sqrt(uu)
    pts = np.stack([c1 * np.cos(p1), c1 * np.sin(p1),
                    c2 * np.cos(p2), c2 * np.sin(p2)], axis=-1).reshape(-1, 4)
    w = (0.5 * wu[:, None, None] * wphi * wphi * np.ones_like(uu)).reshape(-1)
    return pts, w


def direction_stencil(n: int = 24, seed: int | None = None) -> np.ndarray:
    """Deterministic direction set on S^3.

    The default 24 directions are the unit vectors (+-1, +-1, 0, 0)/sqrt(2)
    in all coordinate positions (vertices of the 24-cell).  For other n a
    seeded uniform sample is drawn.
    """
    if n == 24 and seed is None:
        dirs = []
        for i in range(4):
            for j in range(i + 1, 4):
                for si in (1.0, -1.0):
                    for sj in (1.0, -1.0):
                        v = np.zeros(4)
                        v[i] = si
                        v[j] = sj
                        dirs.append(v / np.sqrt(2.0))
        return np.array(dirs)
    rng = np.random.default_rng(0 if seed is None else seed)
    v = rng.standard_normal((n, 4))
    return v / np.linalg.norm(v, axis=1, keepdims=True)
