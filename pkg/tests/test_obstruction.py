import numpy as np
import pytest
from scipy.linalg import expm

from ehglue import jets, lin4
from ehglue import obstruction as ob
from ehglue.errors import InputError, PreconditionError

PI2 = np.pi**2


def random_radial(rng):
    basis = jets.radial_jet_basis()
    return jets.QuadJet(np.tensordot(rng.standard_normal(20), basis, axes=(0, 0)))


# --- raw integrals ------------------------------------------------------------

def test_raw_integral_coframe_square():
    h = jets.assemble_radial_jet(np.diag([1.0, 0, 0]))
    assert abs(ob.raw_obstruction_integral(h, 1) - 5.0 * PI2) < 1e-12
    assert abs(ob.raw_obstruction_integral(h, 2)) < 1e-14
    assert abs(ob.raw_obstruction_integral(h, 3)) < 1e-14


def test_raw_integral_zero_jet():
    for i in (1, 2, 3):
        assert ob.raw_obstruction_integral(jets.QuadJet.zero(), i) == 0.0


def test_raw_integral_mixed_coefficient():
    hij = np.zeros((3, 3))
    hij[0, 1] = hij[1, 0] = 1.0
    h = jets.assemble_radial_jet(hij)
    exact = ob.raw_obstruction_integral(h, 2)
    assert abs(exact - 6.0 * PI2) < 1e-12
    quadr = ob.raw_obstruction_integral(h, 2, mode="quadrature")
    assert abs(exact - quadr) < 1e-6 * abs(exact)


def test_exact_matches_quadrature_on_random_radial():
    rng = np.random.default_rng(0)
    for _ in range(10):
        h = random_radial(rng)
        for i in (1, 2, 3):
            e = ob.raw_obstruction_integral(h, i)
            q = ob.raw_obstruction_integral(h, i, mode="quadrature")
            assert abs(e - q) < 1e-6 * max(1.0, abs(e))


def test_exact_matches_invariant_coefficient_closed_form():
    rng = np.random.default_rng(1)
    for _ in range(5):
        h = random_radial(rng)
        exact = np.array([ob.raw_obstruction_integral(h, i) for i in (1, 2, 3)])
        closed = ob.raw_closed_form_radial(h)
        assert np.abs(exact - closed).max() < 1e-10 * max(1.0, np.abs(exact).max())


def test_raw_integral_bad_index_and_mode():
    with pytest.raises(InputError):
        ob.raw_obstruction_integral(jets.QuadJet.zero(), 4)
    with pytest.raises(InputError):
        ob.raw_obstruction_integral(jets.QuadJet.zero(), 1, mode="bogus")


# --- lambda coefficients --------------------------------------------------------

def test_lambda_zero_jet():
    ov = ob.lambda_coefficients(jets.QuadJet.zero())
    assert np.abs(ov.lam).max() == 0.0


def test_lambda_gauge_invariance():
    rng = np.random.default_rng(2)
    for _ in range(10):
        h = jets.QuadJet(rng.standard_normal((4, 4, 4, 4)))
        v = jets.CubicVectorField(rng.standard_normal((4, 4, 4, 4)))
        l1 = ob.lambda_coefficients(h).lam
        l2 = ob.lambda_coefficients(h + jets.delta_star(v)).lam
        assert np.abs(l1 - l2).max() < 1e-8 * max(1.0, np.abs(l1).max())


def test_lambda_proportional_to_first_column():
    rng = np.random.default_rng(3)
    for _ in range(10):
        hij = rng.standard_normal((3, 3))
        hij = 0.5 * (hij + hij.T)
        h = jets.assemble_radial_jet(hij)
        lam = ob.lambda_coefficients(h).lam
        col = jets.rplus_closed_form(hij)[:, 0]
        if np.linalg.norm(col) < 1e-9:
            continue
        ln = lam / np.linalg.norm(lam)
        cn = col / np.linalg.norm(col)
        assert min(np.abs(ln - cn).max(), np.abs(ln + cn).max()) < 1e-8


def test_lambda_real_hyperbolic_direction():
    lam = ob.lambda_coefficients(jets.real_hyperbolic_jet()).lam
    assert lam[0] < 0
    assert np.abs(lam / np.abs(lam[0]) - np.array([-1.0, 0, 0])).max() < 1e-10


def test_lambda_kahler_jet_vanishes_in_aligned_frame():
    # the Kahler germ carries its zero eigenvalues on the second and third
    # structures; the obstruction vanishes once the kernel direction is
    # rotated onto the first structure (input frame reports the raw pairing)
    h = jets.complex_hyperbolic_jet()
    ov = ob.lambda_coefficients(h)
    assert abs(ov.lam[0] + 3.0) < 1e-8
    assert np.abs(ov.lam[1:]).max() < 1e-10

    op = jets.curvature_operator(jets.curvature_at_origin(h))
    phi, conj = ob.align_gauge(op.rplus)
    aligned = jets.pullback(h, phi.inverse().rotation4())
    lam_aligned = ob.lambda_coefficients(aligned).lam
    assert np.abs(lam_aligned).max() < 1e-10
    assert np.abs(lam_aligned - 2.0 * conj[:, 0]).max() < 1e-10


def test_lambda_matches_conjugated_first_column():
    rng = np.random.default_rng(4)
    q = rng.standard_normal(4)
    q /= np.linalg.norm(q)
    phi = lin4.GaugeElement(q)
    h = jets.QuadJet(rng.standard_normal((4, 4, 4, 4)))
    rot = lin4.sp1_rotation(phi)
    op = jets.curvature_operator(jets.curvature_at_origin(h))
    lam_rot = ob.lambda_coefficients(jets.pullback(h, phi.inverse().rotation4())).lam
    assert np.abs(lam_rot - 2.0 * (rot @ op.rplus @ rot.T)[:, 0]).max() < 1e-8


def test_obstruction_vector_relation_enforced():
    with pytest.raises(InputError):
        ob.ObstructionVector(lam=np.ones(3), raw=np.ones(3), omega_norm=1.0)


# --- wall condition -------------------------------------------------------------

def test_wall_kahler_block():
    rep = ob.wall_condition(np.diag([-1.5, 0.0, 0.0]))
    assert rep.on_wall and rep.kernel_dim == 2 and rep.degeneracy == "degenerate"
    assert np.abs(np.abs(rep.eigenvalues) - np.array([0, 0, 1.5])).max() < 1e-14
    assert np.abs(rep.kernel @ rep.kernel.T - np.eye(2)).max() < 1e-12


def test_wall_real_hyperbolic_block():
    rep = ob.wall_condition(-np.eye(3))
    assert not rep.on_wall
    assert rep.kernel_dim == 0 and rep.degeneracy == "off_wall"
    assert abs(rep.det + 1.0) < 1e-14


def test_wall_nondegenerate():
    rep = ob.wall_condition(np.diag([0.0, 0.7, -2.0]))
    assert rep.on_wall and rep.kernel_dim == 1 and rep.degeneracy == "nondegenerate"
    assert np.abs(np.abs(rep.kernel[0]) - np.array([1.0, 0, 0])).max() < 1e-12


def test_wall_zero_operator_degenerate():
    rep = ob.wall_condition(np.zeros((3, 3)))
    assert rep.on_wall and rep.kernel_dim == 3 and rep.degeneracy == "degenerate"


def test_wall_rejects_asymmetric():
    m = np.zeros((3, 3))
    m[0, 1] = 1.0
    with pytest.raises(InputError):
        ob.wall_condition(m)


def test_wall_kernel_tie_break_prefers_first_structure():
    # two-dimensional kernel spanning the 1st and 3rd axes: the reported
    # first kernel vector maximizes overlap with the first structure
    rep = ob.wall_condition(np.diag([0.0, 5.0, 0.0]))
    assert rep.kernel_dim == 2
    assert abs(abs(rep.kernel[0] @ np.array([1.0, 0, 0])) - 1.0) < 1e-12


# --- gauge alignment -------------------------------------------------------------

def test_align_gauge_already_aligned():
    phi, conj = ob.align_gauge(np.diag([0.0, 1.0, 2.0]))
    assert np.abs(phi.q - np.array([1.0, 0, 0, 0])).max() < 1e-12
    assert np.abs(conj - np.diag([0.0, 1.0, 2.0])).max() < 1e-12


def test_align_gauge_swaps_axes():
    phi, conj = ob.align_gauge(np.diag([1.0, 0.0, 2.0]))
    assert np.abs(conj - np.diag([0.0, 1.0, 2.0])).max() < 1e-12
    rot = lin4.sp1_rotation(phi)
    assert np.abs(rot @ rot.T - np.eye(3)).max() < 1e-12


def test_align_gauge_random_on_wall():
    rng = np.random.default_rng(5)
    for _ in range(20):
        q = np.linalg.qr(rng.standard_normal((3, 3)))[0]
        m = q @ np.diag([0.0, *rng.standard_normal(2)]) @ q.T
        m = 0.5 * (m + m.T)
        phi, conj = ob.align_gauge(m)
        off = conj - np.diag(np.diag(conj))
        scale = max(np.abs(m).max(), 1.0)
        assert np.abs(off).max() < 1e-10 * scale
        assert abs(conj[0, 0]) < 1e-10 * scale
        rot = lin4.sp1_rotation(phi)
        assert np.abs(rot @ m @ rot.T - conj).max() < 1e-10 * scale


def test_align_gauge_requires_wall():
    with pytest.raises(PreconditionError):
        ob.align_gauge(-np.eye(3))


def test_align_gauge_consistent_with_jet_pullback():
    # rotating the chart by the inverse gauge realizes the conjugated block
    h = jets.complex_hyperbolic_jet()
    op = jets.curvature_operator(jets.curvature_at_origin(h))
    phi, conj = ob.align_gauge(op.rplus)
    aligned = jets.pullback(h, phi.inverse().rotation4())
    op2 = jets.curvature_operator(jets.curvature_at_origin(aligned))
    assert np.abs(op2.rplus - conj).max() < 1e-12


# --- gauge derivative -------------------------------------------------------------

def test_gauge_derivative_values():
    m = np.diag([0.0, -1.0, 2.0])
    assert np.array_equal(ob.gauge_derivative(m, np.array([1.0, 0.0])),
                          np.array([0.0, -1.0, 0.0]))
    assert np.array_equal(ob.gauge_derivative(m, np.zeros(2)), np.zeros(3))


def test_gauge_derivative_finite_difference_oracle():
    rng = np.random.default_rng(6)
    for _ in range(10):
        m = np.diag([0.0, *rng.standard_normal(2)])
        xi = rng.standard_normal(2)
        gen = ob.gauge_generator(xi)
        eps = 1e-6

        def lam(t):
            r = expm(-t * gen) @ m @ expm(t * gen)
            return r[:, 0]

        fd = (lam(eps) - lam(-eps)) / (2 * eps)
        assert np.abs(ob.gauge_derivative(m, xi) - fd).max() < 1e-6


def test_gauge_derivative_rejects_misaligned():
    with pytest.raises(PreconditionError):
        ob.gauge_derivative(np.diag([1.0, 2.0, 3.0]), np.array([1.0, 0.0]))
    m = np.diag([0.0, 1.0, 2.0])
    m[1, 2] = m[2, 1] = 0.5
    with pytest.raises(PreconditionError):
        ob.gauge_derivative(m, np.array([1.0, 0.0]))
