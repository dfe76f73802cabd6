"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; every tolerance is pinned here, nothing is calibrated elsewhere.
"""

import json
import time

import numpy as np
from scipy.integrate import quad
from scipy.linalg import expm

from ehglue import cli, ehspace, gluing, jets, lin4
from ehglue import obstruction as ob
from ehglue import calculus as ca


def _report(num, ok, detail):
    print(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def test_criterion_01_closed_form_oracle_equivalence():
    t0 = time.monotonic()
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(100):
        hij = rng.standard_normal((3, 3))
        hij = 0.5 * (hij + hij.T)
        op = jets.curvature_operator(jets.curvature_at_origin(jets.assemble_radial_jet(hij)))
        worst = max(worst, float(np.abs(op.rplus - jets.rplus_closed_form(hij)).max()))
    elapsed = time.monotonic() - t0
    _report(1, worst < 1e-10 and elapsed < 5.0,
            f"operator block vs closed form on 100 constant radial jets: "
            f"max dev {worst:.2e} (tol 1e-10), {elapsed:.2f}s (< 5s)")


def test_criterion_02_complex_hyperbolic_cross_check():
    op = jets.curvature_operator(jets.curvature_at_origin(jets.complex_hyperbolic_jet()))
    eigs = np.sort(np.linalg.eigvalsh(op.rplus))
    dev = max(abs(op.scal + 6.0), float(np.abs(eigs - np.array([-1.5, 0.0, 0.0])).max()))
    wall = ob.wall_condition(op.rplus)
    ok = dev < 1e-10 and wall.on_wall and wall.kernel_dim == 2
    _report(2, ok, f"complex-hyperbolic jet: Scal/eigenvalue dev {dev:.2e} "
                   f"(tol 1e-10), on_wall={wall.on_wall}, kernel_dim={wall.kernel_dim}")


def test_criterion_03_real_hyperbolic_check():
    op = jets.curvature_operator(jets.curvature_at_origin(jets.real_hyperbolic_jet()))
    dev = float(np.abs(op.rplus + np.eye(3)).max())
    wall = ob.wall_condition(op.rplus)
    _report(3, dev < 1e-10 and not wall.on_wall,
            f"real-hyperbolic jet: |R+ + Id| = {dev:.2e} (tol 1e-10), "
            f"on_wall={wall.on_wall} (expect False)")


def test_criterion_04_quadrature_equivalence():
    rng = np.random.default_rng(104)
    basis = jets.radial_jet_basis()
    worst = 0.0
    for _ in range(50):
        h = jets.QuadJet(np.tensordot(rng.standard_normal(20), basis, axes=(0, 0)))
        raws = np.array([ob.raw_obstruction_integral(h, i) for i in (1, 2, 3)])
        quads = np.array([ob.raw_obstruction_integral(h, i, mode="quadrature")
                          for i in (1, 2, 3)])
        worst = max(worst, float(np.abs(raws - quads).max()
                                 / max(1.0, np.abs(raws).max())))
    b1 = ob.raw_obstruction_integral(jets.assemble_radial_jet(np.diag([1.0, 0, 0])), 1)
    dev = abs(b1 - 5.0 * np.pi**2)
    _report(4, worst < 1e-6 and dev < 1e-8,
            f"exact vs quadrature on 50 radial jets: rel dev {worst:.2e} (tol 1e-6); "
            f"coframe-square integral vs 5 pi^2: {dev:.2e} (tol 1e-8)")


def test_criterion_05_gauge_invariance_of_lambda():
    rng = np.random.default_rng(105)
    worst = 0.0
    for _ in range(50):
        h = jets.QuadJet(rng.standard_normal((4, 4, 4, 4)))
        v = jets.CubicVectorField(rng.standard_normal((4, 4, 4, 4)))
        l1 = ob.lambda_coefficients(h).lam
        l2 = ob.lambda_coefficients(h + jets.delta_star(v)).lam
        worst = max(worst, float(np.abs(l1 - l2).max() / max(1.0, np.abs(l1).max())))
    _report(5, worst < 1e-8,
            f"lambda(H + delta* V) = lambda(H) over 50 pairs: max dev {worst:.2e} (tol 1e-8)")


def test_criterion_06_identity_suite():
    t0 = time.monotonic()
    pts = ehspace.default_grid(n_r=10, r_min=0.3, r_max=5.0, n_dirs=5)
    assert pts.shape[0] >= 50
    rep = ehspace.verify_identities(points=pts)
    elapsed = time.monotonic() - t0
    lines = ", ".join(f"{k}={rep.residuals[k]:.1e}" for k in sorted(rep.residuals))
    _report(6, rep.passed() and elapsed < 120.0,
            f"identity suite on {pts.shape[0]} points in {elapsed:.1f}s (< 120s): {lines}")


def test_criterion_07_asymptotic_law():
    rs = np.geomspace(4.0, 64.0, 12)
    n = np.array([0.5, 0.5, 0.5, 0.5])
    d = ehspace.eh_asymptotic_defect(rs[:, None] * n[None, :])
    slope = float(np.polyfit(np.log(rs), np.log(d), 1)[0])
    _report(7, abs(slope + 6.0) < 0.1,
            f"asymptotic defect log-log slope over r in [4, 64]: {slope:.4f} "
            f"(expect -6 +- 0.1)")


def test_criterion_08_omega_l2_norm():
    # independent 1d radial oracle first: |Omega|^2 = 2/(1+r^4)^2 gives
    # pi^2 * int_0^inf 2 r^3 (1+r^4)^{-2} dr with closed value 1/2
    oracle_1d, _ = quad(lambda r: 2.0 * r**3 / (1.0 + r**4) ** 2, 0.0, np.inf)
    assert abs(oracle_1d - 0.5) < 1e-10
    value = ehspace.l2_norm_omega()
    dev = abs(value - np.pi**2 / 2.0)
    _report(8, dev < 1e-6,
            f"|Omega|_L2^2 = {value:.12f} vs pi^2/2: dev {dev:.2e} (tol 1e-6); "
            f"1d oracle validated to {abs(oracle_1d - 0.5):.1e}")


def test_criterion_09_gluing_decay_law():
    t0 = time.monotonic()
    ts = [1e-2, 3e-3, 1e-3, 3e-4]
    scan = gluing.residual_scan(gluing.real_hyperbolic_chart(), ts)
    elapsed = time.monotonic() - t0
    in_annulus = all(0.5 * t**-0.25 <= r <= 2.0 * t**-0.25
                     for t, r in zip(scan.ts, scan.argmax_r))
    ok = abs(scan.slope - 1.0) < 0.2 and in_annulus and elapsed < 600.0
    _report(9, ok,
            f"naive glue on the real-hyperbolic chart: slope {scan.slope:.3f} "
            f"(expect 1.0 +- 0.2), argmax in transition annulus: {in_annulus}, "
            f"{elapsed:.1f}s (< 600s)")


def test_criterion_10_gauge_alignment_and_derivative():
    rng = np.random.default_rng(110)
    worst_diag = 0.0
    worst_fd = 0.0
    for _ in range(100):
        q = np.linalg.qr(rng.standard_normal((3, 3)))[0]
        m = q @ np.diag([0.0, *rng.standard_normal(2)]) @ q.T
        m = 0.5 * (m + m.T)
        phi, conj = ob.align_gauge(m)
        worst_diag = max(worst_diag, abs(conj[0, 0]))
        aligned = np.diag(np.diag(conj))  # strip alignment roundoff
        xi = rng.standard_normal(2)
        gen = ob.gauge_generator(xi)
        eps = 1e-6
        fd = ((expm(-eps * gen) @ aligned @ expm(eps * gen))[:, 0]
              - (expm(eps * gen) @ aligned @ expm(-eps * gen))[:, 0]) / (2 * eps)
        worst_fd = max(worst_fd, float(np.abs(ob.gauge_derivative(aligned, xi) - fd).max()))
    _report(10, worst_diag < 1e-10 and worst_fd < 1e-6,
            f"100 on-wall alignments: kernel entry {worst_diag:.2e} (tol 1e-10); "
            f"gauge derivative vs finite-difference conjugation {worst_fd:.2e} (tol 1e-6)")


def test_criterion_11_cli_determinism(tmp_path):
    cmds = [
        ["jet-curvature", "--catalog", "complex-hyperbolic"],
        ["obstruction", "--catalog", "real-hyperbolic"],
        ["eh-verify", "--grid", "3"],
        ["glue-scan", "--catalog", "flat", "--t-list", "1e-2,3e-3,1e-3,3e-4",
         "--grid", "5"],
    ]
    ok = True
    for k, cmd in enumerate(cmds):
        blobs = []
        for run in range(2):
            out = tmp_path / f"c{k}_{run}.json"
            code = cli.main([*cmd, "--out", str(out)])
            assert code == 0
            blobs.append(out.read_bytes())
        ok = ok and blobs[0] == blobs[1]
        json.loads(blobs[0])  # reports stay valid JSON
    _report(11, ok, f"{len(cmds)} CLI commands rerun byte-identically: {ok}")
