"""Quadratic metric jets at the origin of R^4 and their curvature.

A jet H with coefficients H[i, j, k, l] (symmetric in (i, j) and in (k, l))
represents the symmetric 2-tensor H_{ijkl} x^i x^j dx^k dx^l, the second-order
term of a metric euc + H + O(|x|^4).  The curvature of such a metric at the
origin is linear in H and is computed exactly here, together with the gauge
normalizations (Bianchi and radial) realized by cubic vector fields.

Curvature conventions (fixed package-wide):

    Rm[i, j, k, l] = K (d_ik d_jl - d_il d_jk)  for constant curvature K,
    Ric[i, j]      = sum_k Rm[k, i, k, j],
    Scal           = sum_ik Rm[i, k, i, k],
    curvature operator on 2-forms: (R w)_ij = (1/2) Rm[i, j, k, l] w_kl,

so hyperbolic space (sectional curvature -1) has Ric = -3 euc, Scal = -12 and
curvature operator -Id on all of Lambda^2.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import lin4
from .errors import InputError, InternalError, LoadError
from .sphere import integral_quartic

SOLVE_TOL = 1e-12
RADIAL_TOL = 1e-12

_SYM_IDX = [(a, b) for a in range(4) for b in range(a, 4)]


def _sym_pairs(arr: np.ndarray) -> np.ndarray:
    arr = 0.5 * (arr + arr.transpose(1, 0, 2, 3))
    return 0.5 * (arr + arr.transpose(0, 1, 3, 2))


def _sym_last3(arr: np.ndarray) -> np.ndarray:
    return sum(arr.transpose((0,) + p) for p in itertools.permutations((1, 2, 3))) / 6.0


def _sym4(arr: np.ndarray) -> np.ndarray:
    return sum(arr.transpose(p) for p in itertools.permutations(range(4))) / 24.0


@dataclass(frozen=True)
class QuadJet:
    """Degree-2 metric jet; coefficients symmetric in (i,j) and (k,l) by storage."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (4, 4, 4, 4):
            raise InputError(f"QuadJet needs shape (4,4,4,4), got {c.shape}")
        object.__setattr__(self, "coeffs", _sym_pairs(c))

    @classmethod
    def zero(cls) -> "QuadJet":
        return cls(np.zeros((4, 4, 4, 4)))

    def components(self, xs: np.ndarray) -> np.ndarray:
        """Tensor components h_kl(x) = H[i,j,k,l] x^i x^j; xs is (..., 4)."""
        xs = np.asarray(xs, dtype=float)
        return np.einsum("ijkl,...i,...j->...kl", self.coeffs, xs, xs)

    def __add__(self, other: "QuadJet") -> "QuadJet":
        return QuadJet(self.coeffs + other.coeffs)

    def __sub__(self, other: "QuadJet") -> "QuadJet":
        return QuadJet(self.coeffs - other.coeffs)

    def __mul__(self, s: float) -> "QuadJet":
        return QuadJet(self.coeffs * float(s))

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


@dataclass(frozen=True)
class CubicVectorField:
    """V = V[m,i,j,k] x^i x^j x^k d/dx^m, fully symmetric in (i, j, k)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (4, 4, 4, 4):
            raise InputError(f"CubicVectorField needs shape (4,4,4,4), got {c.shape}")
        object.__setattr__(self, "coeffs", _sym_last3(c))

    @classmethod
    def zero(cls) -> "CubicVectorField":
        return cls(np.zeros((4, 4, 4, 4)))

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


@dataclass(frozen=True)
class CurvatureTensor:
    """Constant curvature tensor with all four algebraic identities checked."""

    rm: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rm, dtype=float)
        if r.shape != (4, 4, 4, 4):
            raise InputError(f"CurvatureTensor needs shape (4,4,4,4), got {r.shape}")
        scale = max(float(np.abs(r).max()), 1.0)
        checks = (
            np.abs(r + r.transpose(1, 0, 2, 3)).max(),
            np.abs(r + r.transpose(0, 1, 3, 2)).max(),
            np.abs(r - r.transpose(2, 3, 0, 1)).max(),
            np.abs(r + r.transpose(0, 2, 3, 1) + r.transpose(0, 3, 1, 2)).max(),
        )
        if max(checks) > 1e-12 * scale:
            raise InternalError(f"curvature identities violated: {checks}")
        object.__setattr__(self, "rm", r)

    def ricci(self) -> np.ndarray:
        return np.einsum("kikj->ij", self.rm)

    def scal(self) -> float:
        return float(np.einsum("ikik->", self.rm))


@dataclass(frozen=True)
class CurvatureOperator:
    """Symmetric 6x6 operator on 2-forms in the (self-dual, anti-self-dual) split."""

    matrix: np.ndarray
    scal: float

    @property
    def rplus(self) -> np.ndarray:
        return self.matrix[:3, :3]

    @property
    def rminus(self) -> np.ndarray:
        return self.matrix[3:, 3:]

    @property
    def ric0(self) -> np.ndarray:
        return self.matrix[:3, 3:]

    @property
    def wplus(self) -> np.ndarray:
        return self.rplus - np.trace(self.rplus) / 3.0 * np.eye(3)

    @property
    def wminus(self) -> np.ndarray:
        return self.rminus - np.trace(self.rminus) / 3.0 * np.eye(3)


def curvature_at_origin(h: QuadJet) -> CurvatureTensor:
    """Curvature at 0 of the metric euc + H; exact and linear in H."""
    c = h.coeffs
    rm = (np.einsum("iljk->ijkl", c) + np.einsum("jkil->ijkl", c)
          - np.einsum("ikjl->ijkl", c) - np.einsum("jlik->ijkl", c))
    return CurvatureTensor(rm)


def curvature_operator(r: CurvatureTensor) -> CurvatureOperator:
    """Assemble the 6x6 operator in the split orthonormal basis."""
    m = np.empty((6, 6))
    for a, (i, j) in enumerate(lin4.BASIS_PAIRS):
        for b, (k, l) in enumerate(lin4.BASIS_PAIRS):
            m[a, b] = r.rm[i, j, k, l]
    u = lin4.SPLIT_BASIS
    return CurvatureOperator(matrix=u.T @ m @ u, scal=r.scal())


def bianchi_euclidean(h: QuadJet) -> np.ndarray:
    """Euclidean Bianchi operator of the jet.

    Returns the coefficient array b[j, l] of (B H) = b[j, l] x^j dx^l, where
    B = delta + (1/2) d tr with delta the negative divergence.
    """
    c = h.coeffs
    return -2.0 * np.einsum("kjkl->jl", c) + np.einsum("jlkk->jl", c)


def delta_star(v: CubicVectorField) -> QuadJet:
    """Symmetrized euclidean derivative of the dual 1-form of V (a quadratic jet)."""
    c = v.coeffs
    out = 1.5 * (np.einsum("lkab->abkl", c) + np.einsum("klab->abkl", c))
    return QuadJet(out)


def radial_contraction(h: QuadJet) -> np.ndarray:
    """Coefficients (sym in a,b,c) of the cubic 1-form x -| H."""
    c = np.einsum("abkl->labk", h.coeffs)
    return _sym_last3(c)


@lru_cache(maxsize=None)
def _cubic_basis() -> np.ndarray:
    """Frobenius-orthonormal basis of the 80-dim space of cubic vector fields."""
    out = []
    for m in range(4):
        for (a, b) in _SYM_IDX:
            for k in range(b, 4):
                e = np.zeros((4, 4, 4, 4))
                e[m, a, b, k] = 1.0
                e = _sym_last3(e)
                out.append(e / np.linalg.norm(e))
    return np.array(out)


@lru_cache(maxsize=None)
def _jet_basis() -> np.ndarray:
    """Frobenius-orthonormal basis of the 100-dim space of quadratic jets."""
    out = []
    for (a, b) in _SYM_IDX:
        for (k, l) in _SYM_IDX:
            e = np.zeros((4, 4, 4, 4))
            e[a, b, k, l] = 1.0
            e = _sym_pairs(e)
            out.append(e / np.linalg.norm(e))
    return np.array(out)


@lru_cache(maxsize=None)
def _bianchi_of_delta_star() -> np.ndarray:
    """Matrix of V -> B(delta* V) over the cubic basis, output flattened (16,)."""
    cols = [bianchi_euclidean(delta_star(CubicVectorField(e))).ravel()
            for e in _cubic_basis()]
    return np.array(cols).T


@lru_cache(maxsize=None)
def _contraction_of_delta_star() -> np.ndarray:
    """Matrix of V -> x -| delta*(V) over the cubic basis, output flattened (256,)."""
    cols = [radial_contraction(delta_star(CubicVectorField(e))).ravel()
            for e in _cubic_basis()]
    return np.array(cols).T


def _assemble_cubic(coeffs: np.ndarray) -> CubicVectorField:
    return CubicVectorField(np.tensordot(coeffs, _cubic_basis(), axes=(0, 0)))


def bianchi_gauge_fix(h: QuadJet) -> CubicVectorField:
    """Cubic field V with B(H + delta* V) = 0.

    The system is underdetermined; the minimum Frobenius-norm solution is
    returned.  The solve is rechecked and must close to 1e-12.
    """
    target = -bianchi_euclidean(h).ravel()
    sol, *_ = np.linalg.lstsq(_bianchi_of_delta_star(), target, rcond=None)
    v = _assemble_cubic(sol)
    res = np.abs(bianchi_euclidean(h + delta_star(v))).max()
    if res > SOLVE_TOL * max(1.0, h.norm()):
        raise InternalError(f"Bianchi gauge solve residual {res:.3e}")
    return v


def radialize(h: QuadJet) -> CubicVectorField:
    """Cubic field V with x -| (H + delta* V) = 0 (radial gauge).

    Minimum Frobenius-norm solution; the contraction map is onto the range
    needed, so a nonzero recheck residual is a bug, not an input problem.
    """
    target = -radial_contraction(h).ravel()
    sol, *_ = np.linalg.lstsq(_contraction_of_delta_star(), target, rcond=None)
    v = _assemble_cubic(sol)
    res = np.abs(radial_contraction(h + delta_star(v))).max()
    if res > SOLVE_TOL * max(1.0, h.norm()):
        raise InternalError(f"radial gauge solve residual {res:.3e}")
    return v


def is_radial(h: QuadJet, tol: float = RADIAL_TOL) -> bool:
    return np.abs(radial_contraction(h)).max() <= tol * max(1.0, h.norm())


@lru_cache(maxsize=None)
def radial_jet_basis() -> np.ndarray:
    """Orthonormal basis (20, 4,4,4,4) of radial jets, i.e. ker of x -| (.)."""
    from scipy.linalg import null_space

    cols = np.array([radial_contraction(QuadJet(e)).ravel() for e in _jet_basis()]).T
    null = null_space(cols)
    if null.shape[1] != 20:
        raise InternalError(f"radial jet space has dimension {null.shape[1]}, expected 20")
    return np.tensordot(null.T, _jet_basis(), axes=(1, 0))


@dataclass(frozen=True)
class RadialCoeffs:
    """Coefficients of a radial jet in the invariant coframe basis.

    H decomposes pointwise as sum_ij H_ij(x) b_i b_j over the symmetric
    products of the three invariant 1-forms b_i (the r^2-scaled coframe).
    Each H_ij is homogeneous of degree 0 and stored as a quartic numerator:
    H_ij(x) = quartic[i,j](x) / r^4.
    """

    quartic: np.ndarray  # (3, 3, 4, 4, 4, 4), fully symmetric numerators

    def evaluate(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        r2 = np.sum(xs * xs, axis=-1)
        num = np.einsum("ijabcd,...a,...b,...c,...d->...ij",
                        self.quartic, xs, xs, xs, xs)
        return num / (r2 * r2)[..., None, None]

    def constant(self, tol: float = 1e-10) -> np.ndarray | None:
        """The 3x3 constant matrix if every H_ij is constant, else None."""
        out = np.empty((3, 3))
        for i in range(3):
            for j in range(3):
                q = self.quartic[i, j]
                # constant c has numerator c (sum x^2)^2; its full trace is 8c
                c = np.einsum("aabb->", q) / 8.0
                model = c * _sym4(np.einsum("ab,cd->abcd", np.eye(4), np.eye(4)))
                if np.abs(q - model).max() > tol * max(1.0, np.abs(q).max()):
                    return None
                out[i, j] = c
        return out

    def sphere_average(self) -> np.ndarray:
        """Mean of H_ij over the unit sphere (exact monomial integration)."""
        out = np.empty((3, 3))
        for i in range(3):
            for j in range(3):
                out[i, j] = integral_quartic(self.quartic[i, j]) / (2.0 * np.pi**2)
        return out


@lru_cache(maxsize=None)
def _complex_structure_matrices() -> np.ndarray:
    endos, _ = lin4.std_structures()
    return np.array(endos)


def invariant_coframe_products() -> np.ndarray:
    """Coefficient arrays P[s, k, l, c, d] of the quadratic-component tensors

        s=0..3 -> x (x) x, b1 (x) b1, b2 (x) b2, b3 (x) b3  (not symmetrized
        in (c,d); contract with x^c x^d).

    Used both for radial decompositions and for the kernel-tensor asymptotics.
    """
    mats = [np.eye(4)] + list(_complex_structure_matrices())
    return np.array([np.einsum("kc,ld->klcd", m, m) for m in mats])


def radial_basis_coeffs(h: QuadJet) -> RadialCoeffs:
    """Decompose a radial jet in the invariant coframe basis.

    Raises InputError when x -| H != 0.  The coefficient functions are degree-0
    homogeneous; on the 20-dim radial space they are quartics over r^4 (only
    the 6-dim constant-coefficient subfamily reduces to constants).
    """
    if not is_radial(h):
        raise InputError("jet is not in radial gauge; apply radialize first")
    ii = _complex_structure_matrices()
    quartic = np.empty((3, 3, 4, 4, 4, 4))
    for i in range(3):
        for j in range(3):
            # <H, sym(b_i b_j)>(x): pair the component polynomials.
            s = 0.5 * (np.einsum("kc,ld->klcd", ii[i], ii[j])
                       + np.einsum("kc,ld->klcd", ii[j], ii[i]))
            t = np.einsum("abkl,klcd->abcd", h.coeffs, s)
            quartic[i, j] = _sym4(t)
    return RadialCoeffs(quartic=quartic)


def assemble_radial_jet(hij: np.ndarray) -> QuadJet:
    """Jet sum_ij H_ij b_i b_j for a constant symmetric 3x3 coefficient matrix."""
    hij = np.asarray(hij, dtype=float)
    if hij.shape != (3, 3) or np.abs(hij - hij.T).max() > 0:
        hij = 0.5 * (hij + hij.T)
    ii = _complex_structure_matrices()
    c = np.einsum("ij,ika,jlb->abkl", hij, ii, ii)
    return QuadJet(c)


def rplus_closed_form(hij: np.ndarray) -> np.ndarray:
    """Self-dual curvature block of the jet with constant invariant-coframe
    coefficients H_ij: diagonal -5 H_ii + (sum of the other two), off-diagonal
    -6 H_ij.  Equivalently -6 H + tr(H) Id."""
    hij = np.asarray(hij, dtype=float)
    if hij.shape != (3, 3):
        raise InputError("need a 3x3 coefficient matrix")
    return -6.0 * hij + np.trace(hij) * np.eye(3)


@dataclass(frozen=True)
class RadialDecomposition:
    """Split of a radial jet by the irreducible block its curvature lands in."""

    scalar_part: QuadJet
    ricci_part: QuadJet
    weyl_plus_part: QuadJet
    weyl_minus_part: QuadJet

    def total(self) -> QuadJet:
        return (self.scalar_part + self.ricci_part
                + self.weyl_plus_part + self.weyl_minus_part)


def _operator_block_coords(op: CurvatureOperator) -> dict[str, np.ndarray]:
    m = op.matrix
    tr = np.trace(m) / 6.0
    return {
        "scalar": np.array([tr]),
        "ricci": m[:3, 3:].ravel(),
        "weyl_plus": (m[:3, :3] - np.trace(m[:3, :3]) / 3.0 * np.eye(3)).ravel(),
        "weyl_minus": (m[3:, 3:] - np.trace(m[3:, 3:]) / 3.0 * np.eye(3)).ravel(),
    }


@lru_cache(maxsize=None)
def _radial_block_matrices() -> dict[str, np.ndarray]:
    basis = radial_jet_basis()
    cols = {k: [] for k in ("scalar", "ricci", "weyl_plus", "weyl_minus")}
    for e in basis:
        op = curvature_operator(curvature_at_origin(QuadJet(e)))
        for k, v in _operator_block_coords(op).items():
            cols[k].append(v)
    return {k: np.array(v).T for k, v in cols.items()}


def rep_decompose(h: QuadJet) -> RadialDecomposition:
    """Decompose a radial jet into the four curvature-isotypic components.

    Curvature is an isomorphism from radial jets onto constant curvature
    tensors, so each component is obtained by inverting it block by block
    over the 20-dim radial basis (dense least squares with recheck).
    """
    if not is_radial(h):
        raise InputError("jet is not in radial gauge; apply radialize first")
    basis = radial_jet_basis()
    op = curvature_operator(curvature_at_origin(h))
    target = _operator_block_coords(op)
    mats = _radial_block_matrices()
    parts = {}
    for k, mat in mats.items():
        sol, *_ = np.linalg.lstsq(mat, target[k], rcond=None)
        res = np.linalg.norm(mat @ sol - target[k])
        if res > 1e-10 * max(1.0, h.norm()):
            raise InternalError(f"block inversion residual {res:.3e} for {k}")
        parts[k] = QuadJet(np.tensordot(sol, basis, axes=(0, 0)))
    dec = RadialDecomposition(scalar_part=parts["scalar"], ricci_part=parts["ricci"],
                              weyl_plus_part=parts["weyl_plus"],
                              weyl_minus_part=parts["weyl_minus"])
    if (dec.total() - h).norm() > 1e-10 * max(1.0, h.norm()):
        raise InternalError("radial decomposition does not reconstruct the jet")
    return dec


@dataclass(frozen=True)
class EinsteinCheck:
    is_einstein: bool
    lam: float
    deviation: float


def einstein_check(h: QuadJet, tol: float = 1e-10) -> EinsteinCheck:
    """Test Ric(H) = Lambda euc at the origin; Lambda = Scal/4."""
    r = curvature_at_origin(h)
    ric = r.ricci()
    lam = r.scal() / 4.0
    dev = float(np.abs(ric - lam * np.eye(4)).max())
    return EinsteinCheck(is_einstein=dev <= tol * max(1.0, float(np.abs(ric).max())),
                         lam=lam, deviation=dev)


def pullback(h: QuadJet, rot: np.ndarray) -> QuadJet:
    """Jet of the pullback metric under the linear map x -> rot x."""
    a = np.asarray(rot, dtype=float)
    c = np.einsum("cm,dn,ak,bl,cdab->mnkl", a, a, a, a, h.coeffs)
    return QuadJet(c)


# ---------------------------------------------------------------------------
# catalog jets and file format

def flat_jet() -> QuadJet:
    return QuadJet.zero()


def real_hyperbolic_jet() -> QuadJet:
    """Second-order term of dr^2 + sinh^2(r) (a1^2 + a2^2 + a3^2)."""
    return assemble_radial_jet(np.eye(3) / 3.0)


def complex_hyperbolic_jet() -> QuadJet:
    """Second-order term of dr^2 + sinh^2(r) a1^2 + 4 sinh^2(r/2) (a2^2 + a3^2)."""
    return assemble_radial_jet(np.diag([1.0 / 3.0, 1.0 / 12.0, 1.0 / 12.0]))


def load_jet(path: str) -> QuadJet:
    """Load a jet from a JSON file of records {i, j, k, l, value}, 1-based.

    Symmetrization in (i,j) and (k,l) is applied on load; records that assign
    different values to the same symmetry class are a load error; unlisted
    entries are zero.
    """
    try:
        with open(path) as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise LoadError(f"cannot read jet file {path!r}: {exc}") from exc
    if isinstance(data, dict):
        data = data.get("records")
    if not isinstance(data, list):
        raise LoadError("jet file must be a list of records or {'records': [...]}")

    coeffs = np.zeros((4, 4, 4, 4))
    seen: dict[tuple[int, int, int, int], tuple[float, int]] = {}
    for n, rec in enumerate(data, start=1):
        try:
            i, j, k, l = (int(rec[key]) for key in ("i", "j", "k", "l"))
            value = float(rec["value"])
        except (KeyError, TypeError, ValueError) as exc:
            raise LoadError(f"record {n}: malformed entry {rec!r}") from exc
        if not all(1 <= z <= 4 for z in (i, j, k, l)):
            raise LoadError(f"record {n}: indices must be in 1..4, got {(i, j, k, l)}")
        key = (*sorted((i - 1, j - 1)), *sorted((k - 1, l - 1)))
        if key in seen:
            old, where = seen[key]
            if old != value:
                raise LoadError(f"record {n}: conflicts with record {where} "
                                f"for symmetry class {tuple(z + 1 for z in key)} "
                                f"({value!r} vs {old!r})")
            continue
        seen[key] = (value, n)
        a, b, c, d = key
        for p, q in ((a, b), (b, a)):
            for r, s in ((c, d), (d, c)):
                coeffs[p, q, r, s] = value
    return QuadJet(coeffs)
