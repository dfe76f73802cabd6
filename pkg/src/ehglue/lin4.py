"""Constant multilinear algebra on R^4.

Conventions fixed once here and used everywhere else:

* orientation dx1^dx2^dx3^dx4;
* ordered 2-form basis (dx1^dx2, dx1^dx3, dx1^dx4, dx3^dx4, dx4^dx2, dx2^dx3),
  declared orthonormal (this is the form-norm convention quoted in reports);
* a 2-form w acts as the bilinear form w(u, v), with (a^b)(u, v) =
  a(u) b(v) - a(v) b(u);
* the endomorphism J of a 2-form w satisfies <J u, v> = w(u, v);
* quaternions are (w, x, y, z) with R^4 = H via x = x1 + x2 i + x3 j + x4 k.

With these choices the standard complex structures I1, I2, I3 are left
multiplication by i, j, k; their 2-forms are the self-dual basis
(dx1^dx2 + dx3^dx4, dx1^dx3 + dx4^dx2, dx1^dx4 + dx2^dx3) and they satisfy
the quaternion relations I1 I2 = I3 etc.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

# Index pairs of the ordered 2-form basis (0-based).
BASIS_PAIRS = ((0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2))

UNIT_QUATERNION_TOL = 1e-12
EIGENSPACE_TOL = 1e-10


def _star_matrix() -> np.ndarray:
    # Hodge star swaps each basis pair with its complement, with sign +1
    # for this ordering of the basis.
    s = np.zeros((6, 6))
    for a in range(3):
        s[a, a + 3] = 1.0
        s[a + 3, a] = 1.0
    return s


HODGE_STAR = _star_matrix()
SD_PROJECTOR = 0.5 * (np.eye(6) + HODGE_STAR)
ASD_PROJECTOR = 0.5 * (np.eye(6) - HODGE_STAR)

#: Columns of the orthonormal split basis: three self-dual, three anti-self-dual.
SPLIT_BASIS = np.zeros((6, 6))
for _a in range(3):
    SPLIT_BASIS[_a, _a] = SPLIT_BASIS[_a + 3, _a] = 1.0 / np.sqrt(2.0)
    SPLIT_BASIS[_a, _a + 3] = 1.0 / np.sqrt(2.0)
    SPLIT_BASIS[_a + 3, _a + 3] = -1.0 / np.sqrt(2.0)


def form_matrix(comps: np.ndarray) -> np.ndarray:
    """Antisymmetric 4x4 matrix of a 2-form given in the ordered basis."""
    comps = np.asarray(comps, dtype=float)
    m = np.zeros(comps.shape[:-1] + (4, 4))
    for a, (i, j) in enumerate(BASIS_PAIRS):
        m[..., i, j] = comps[..., a]
        m[..., j, i] = -comps[..., a]
    return m


def form_components(matrix: np.ndarray) -> np.ndarray:
    """Inverse of :func:`form_matrix`."""
    matrix = np.asarray(matrix, dtype=float)
    out = np.empty(matrix.shape[:-2] + (6,))
    for a, (i, j) in enumerate(BASIS_PAIRS):
        out[..., a] = matrix[..., i, j]
    return out


@dataclass(frozen=True)
class Form2:
    """A constant 2-form, stored in the ordered orthonormal basis."""

    comps: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.comps, dtype=float)
        if c.shape != (6,):
            raise InputError(f"Form2 needs 6 components, got shape {c.shape}")
        object.__setattr__(self, "comps", c)

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "Form2":
        return cls(form_components(m))

    def matrix(self) -> np.ndarray:
        return form_matrix(self.comps)

    def endomorphism(self) -> np.ndarray:
        """J with <J u, v> = w(u, v); for the I_i forms this returns I_i."""
        return -self.matrix()

    def sd(self) -> "Form2":
        return Form2(SD_PROJECTOR @ self.comps)

    def asd(self) -> "Form2":
        return Form2(ASD_PROJECTOR @ self.comps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.comps))


def hodge_split(w: Form2) -> tuple[Form2, Form2]:
    """Split into the +1 and -1 eigenvectors of the Hodge star."""
    return w.sd(), w.asd()


@dataclass(frozen=True)
class SymTensor2:
    """A constant symmetric 2-tensor on R^4."""

    mat: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mat, dtype=float)
        if m.shape != (4, 4):
            raise InputError(f"SymTensor2 needs a 4x4 matrix, got {m.shape}")
        object.__setattr__(self, "mat", 0.5 * (m + m.T))

    def trace(self) -> float:
        return float(np.trace(self.mat))

    def trace_free(self) -> "SymTensor2":
        return SymTensor2(self.mat - self.trace() / 4.0 * np.eye(4))


def quaternion_multiply(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    pw, px, py, pz = p
    qw, qx, qy, qz = q
    return np.array([
        pw * qw - px * qx - py * qy - pz * qz,
        pw * qx + px * qw + py * qz - pz * qy,
        pw * qy - px * qz + py * qw + pz * qx,
        pw * qz + px * qy - py * qx + pz * qw,
    ])


def quaternion_conjugate(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


@dataclass(frozen=True)
class GaugeElement:
    """Unit quaternion; the rotational freedom of the gluing construction."""

    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        if q.shape != (4,):
            raise InputError(f"GaugeElement needs 4 components, got {q.shape}")
        if abs(np.linalg.norm(q) - 1.0) > UNIT_QUATERNION_TOL:
            raise InputError(f"gauge quaternion not unit: |q| = {np.linalg.norm(q)!r}")
        object.__setattr__(self, "q", q)

    @classmethod
    def identity(cls) -> "GaugeElement":
        return cls(np.array([1.0, 0.0, 0.0, 0.0]))

    def compose(self, other: "GaugeElement") -> "GaugeElement":
        return GaugeElement(quaternion_multiply(self.q, other.q))

    def inverse(self) -> "GaugeElement":
        return GaugeElement(quaternion_conjugate(self.q))

    def rotation4(self) -> np.ndarray:
        """The SO(4) action on the chart: left quaternion multiplication."""
        w, x, y, z = self.q
        # Columns are q*1, q*i, q*j, q*k.
        return np.array([
            [w, -x, -y, -z],
            [x, w, -z, y],
            [y, z, w, -x],
            [z, -y, x, w],
        ])


def sp1_rotation(phi: GaugeElement) -> np.ndarray:
    """SO(3) matrix of phi acting on the self-dual triple (I1, I2, I3).

    This is the adjoint action v -> q v q^-1 on imaginary quaternions; it is
    a group homomorphism and sends the identity quaternion to the identity.
    """
    w, x, y, z = phi.q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def gauge_from_rotation3(rot: np.ndarray) -> GaugeElement:
    """Unit quaternion with sp1_rotation(q) = rot, chosen with w >= 0.

    Shepperd's method: pick the largest of the four squared components to
    avoid cancellation.
    """
    rot = np.asarray(rot, dtype=float)
    if rot.shape != (3, 3):
        raise InputError("need a 3x3 rotation matrix")
    if np.linalg.norm(rot @ rot.T - np.eye(3)) > 1e-9 or np.linalg.det(rot) < 0:
        raise InputError("matrix is not a rotation")
    t = np.trace(rot)
    cand = np.array([1 + t, 1 + 2 * rot[0, 0] - t, 1 + 2 * rot[1, 1] - t, 1 + 2 * rot[2, 2] - t])
    k = int(np.argmax(cand))
    s = np.sqrt(max(cand[k], 0.0))
    if k == 0:
        q = np.array([s, (rot[2, 1] - rot[1, 2]) / s, (rot[0, 2] - rot[2, 0]) / s,
                      (rot[1, 0] - rot[0, 1]) / s])
    elif k == 1:
        q = np.array([(rot[2, 1] - rot[1, 2]) / s, s, (rot[0, 1] + rot[1, 0]) / s,
                      (rot[0, 2] + rot[2, 0]) / s])
    elif k == 2:
        q = np.array([(rot[0, 2] - rot[2, 0]) / s, (rot[0, 1] + rot[1, 0]) / s, s,
                      (rot[1, 2] + rot[2, 1]) / s])
    else:
        q = np.array([(rot[1, 0] - rot[0, 1]) / s, (rot[0, 2] + rot[2, 0]) / s,
                      (rot[1, 2] + rot[2, 1]) / s, s])
    q /= np.linalg.norm(q)
    if q[0] < 0:
        q = -q
    return GaugeElement(q)


def std_structures() -> tuple[tuple[np.ndarray, np.ndarray, np.ndarray],
                              tuple[Form2, Form2, Form2]]:
    """The complex structures I1, I2, I3 as endomorphisms and as 2-forms.

    I1 has holomorphic coordinates x1 + i x2, x3 + i x4; I2 and I3 follow by
    quaternion left multiplication.  As 2-forms they are the self-dual basis
    and satisfy w_i = d(r^2 alpha_i)/2 for the invariant coframe alpha_i.
    """
    endos = []
    forms = []
    for a in range(3):
        unit = np.zeros(4)
        unit[a + 1] = 1.0
        endos.append(GaugeElement(unit).rotation4())
        comps = np.zeros(6)
        comps[a] = 1.0
        comps[a + 3] = 1.0
        forms.append(Form2(comps))
    return tuple(endos), tuple(forms)


def asd_sd_product(m: Form2, p: Form2) -> SymTensor2:
    """Compose an anti-self-dual and a self-dual 2-form into a trace-free
    symmetric tensor.

    The two metric-raised skew endomorphisms commute, so the composition is
    symmetric; its trace vanishes because the two eigenspaces are orthogonal.
    """
    scale_m = max(m.norm(), 1.0)
    scale_p = max(p.norm(), 1.0)
    if np.linalg.norm(SD_PROJECTOR @ m.comps) > EIGENSPACE_TOL * scale_m:
        raise InputError("first argument is not anti-self-dual")
    if np.linalg.norm(ASD_PROJECTOR @ p.comps) > EIGENSPACE_TOL * scale_p:
        raise InputError("second argument is not self-dual")
    em = m.endomorphism()
    ep = p.endomorphism()
    return SymTensor2(em @ ep)
