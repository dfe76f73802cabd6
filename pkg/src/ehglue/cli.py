"""Command-line surface: curvature of jets, obstruction analysis, identity
verification and glued-metric residual scans, with machine-readable reports.

Exit codes: 0 success, 2 validation failure (a residual above tolerance),
3 input error, 4 accuracy error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import ehspace, gluing, jets, lin4, obstruction
from .calculus import DEFAULT_REL_STEP
from .errors import (AccuracyError, AdmissibilityError, EhglueError, InputError,
                     InternalError)
from .report import convention_block, to_csv, to_json

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INPUT = 3
EXIT_ACCURACY = 4


@dataclass
class RunConfig:
    """Echoed into every report; identical configs give identical bytes."""

    command: str
    input: str | None = None
    catalog: str | None = None
    t_list: list = field(default_factory=lambda: [1e-2, 3e-3, 1e-3, 3e-4, 1e-4])
    grid: int = 10
    wall_tol: float = obstruction.WALL_TOL_DEFAULT
    diff_step: float = DEFAULT_REL_STEP
    quad_tol: float = 1e-6
    fmt: str = "json"
    seed: int = 0
    out: str | None = None
    builder: str = "naive"
    gauge: list = field(default_factory=lambda: [1.0, 0.0, 0.0, 0.0])
    tol_override: float | None = None

    def __post_init__(self):
        for name in ("wall_tol", "diff_step", "quad_tol"):
            if getattr(self, name) <= 0:
                raise InputError(f"{name} must be positive")
        if self.fmt not in ("json", "csv"):
            raise InputError(f"unknown format {self.fmt!r}")
        if any(t <= 0 for t in self.t_list):
            raise InputError("every t must be positive")


def _echo(cfg: RunConfig) -> dict:
    # the output destination is not part of the computation
    d = asdict(cfg)
    d.pop("out")
    return d


def _load_jet(cfg: RunConfig) -> jets.QuadJet:
    if cfg.catalog:
        cat = {
            "flat": jets.flat_jet,
            "real-hyperbolic": jets.real_hyperbolic_jet,
            "complex-hyperbolic": jets.complex_hyperbolic_jet,
        }
        name = cfg.catalog.removeprefix("catalog:")
        if name not in cat:
            raise InputError(f"unknown catalog jet {cfg.catalog!r}; "
                             f"available: {sorted(cat)}")
        return cat[name]()
    if cfg.input:
        return jets.load_jet(cfg.input)
    raise InputError("need --input PATH or --catalog NAME")


def _operator_dict(op: jets.CurvatureOperator) -> dict:
    return {
        "matrix": op.matrix,
        "rplus": op.rplus,
        "rminus": op.rminus,
        "ric0": op.ric0,
        "wplus": op.wplus,
        "wminus": op.wminus,
        "scal": op.scal,
    }


def cmd_jet_curvature(cfg: RunConfig) -> tuple[dict, int]:
    h = _load_jet(cfg)
    rt = jets.curvature_at_origin(h)
    op = jets.curvature_operator(rt)
    chk = jets.einstein_check(h)
    return {
        "config": _echo(cfg),
        "convention": convention_block(),
        "curvature_tensor": rt.rm,
        "operator": _operator_dict(op),
        "einstein": {"is_einstein": chk.is_einstein, "lambda": chk.lam,
                     "deviation": chk.deviation},
    }, EXIT_OK


def cmd_obstruction(cfg: RunConfig) -> tuple[dict, int]:
    h = _load_jet(cfg)
    op = jets.curvature_operator(jets.curvature_at_origin(h))
    ov = obstruction.lambda_coefficients(h)
    wall = obstruction.wall_condition(op.rplus, tol=cfg.wall_tol)
    out = {
        "config": _echo(cfg),
        "convention": convention_block(),
        "rplus": wall.rplus,
        "eigenvalues": wall.eigenvalues,
        "det": wall.det,
        "on_wall": wall.on_wall,
        "kernel_dim": wall.kernel_dim,
        "kernel": wall.kernel,
        "degeneracy": wall.degeneracy,
        "lambda": ov.lam,
        "raw_integrals": ov.raw,
        "operator": _operator_dict(op),
        "gauge": None,
        "rplus_aligned": None,
        "lambda_aligned": None,
    }
    if wall.on_wall:
        phi, conj = obstruction.align_gauge(op.rplus, tol=cfg.wall_tol)
        aligned_jet = jets.pullback(h, phi.inverse().rotation4())
        out["gauge"] = {"quaternion": phi.q}
        out["rplus_aligned"] = conj
        out["lambda_aligned"] = obstruction.lambda_coefficients(aligned_jet).lam
    return out, EXIT_OK


def cmd_eh_verify(cfg: RunConfig) -> tuple[dict | str, int]:
    if cfg.grid < 1:
        raise InputError("grid must contain at least one radius")
    pts = ehspace.default_grid(n_r=cfg.grid, seed=cfg.seed)
    tols = None
    if cfg.tol_override is not None:
        tols = {k: cfg.tol_override for k in ehspace.DEFAULT_TOLERANCES}
    rep = ehspace.verify_identities(points=pts, rel_step=cfg.diff_step,
                                    tolerances=tols)
    code = EXIT_OK if rep.passed() else EXIT_VALIDATION
    if cfg.fmt == "csv":
        n_dirs = 5  # default_grid enumerates this many directions per radius
        rows = [(name, r, p % n_dirs, v) for name, r, p, v in rep.rows]
        return to_csv(["identity", "r", "direction", "residual"], rows), code
    out = {
        "config": _echo(cfg),
        "convention": convention_block(),
        "residuals": rep.residuals,
        "tolerances": rep.tolerances,
        "err_estimate": rep.err_estimate,
        "passed": rep.passed(),
        "failures": rep.failures(),
    }
    return out, code


def cmd_glue_scan(cfg: RunConfig) -> tuple[dict | str, int]:
    charts = gluing.chart_catalog()
    name = (cfg.catalog or "").removeprefix("catalog:")
    if name not in charts:
        raise InputError(f"unknown chart {cfg.catalog!r}; available: {sorted(charts)}")
    phi = lin4.GaugeElement(np.asarray(cfg.gauge, dtype=float))
    scan = gluing.residual_scan(charts[name], cfg.t_list, phi=phi,
                                builder=cfg.builder, n_r=max(cfg.grid, 4),
                                rel_step=cfg.diff_step)
    if cfg.fmt == "csv":
        rows = list(zip(scan.ts, scan.sups, scan.argmax_r))
        return to_csv(["t", "sup_residual", "argmax_r"], rows), EXIT_OK
    out = {
        "config": _echo(cfg),
        "convention": convention_block(),
        "chart": scan.chart_name,
        "builder": scan.builder,
        "lambda_einstein": scan.lam,
        "t": scan.ts,
        "sup_residual": scan.sups,
        "argmax_r": scan.argmax_r,
        "transition": [[0.5 * t**-0.25, 2.0 * t**-0.25] for t in scan.ts],
        "slope": scan.slope,
        "slope_ci95": scan.slope_ci,
        "n_points": scan.n_points,
        "span_decades": scan.span_decades,
        "grid_spec": scan.grid_spec,
        "err_estimate": scan.err_estimate,
    }
    return out, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ehglue", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("jet-curvature", "curvature tensor and operator blocks of a jet"),
        ("obstruction", "obstruction coefficients, wall condition, gauge alignment"),
        ("eh-verify", "Eguchi-Hanson identity residual table"),
        ("glue-scan", "Einstein residual decay of the glued family"),
    ):
        q = sub.add_parser(name, help=help_text)
        q.add_argument("--input", help="jet file (JSON records)")
        q.add_argument("--catalog", help="catalog name (flat, real-hyperbolic, "
                                         "complex-hyperbolic)")
        q.add_argument("--t-list", default="1e-2,3e-3,1e-3,3e-4,1e-4",
                       help="comma-separated gluing parameters")
        q.add_argument("--grid", type=int, default=10, help="radial grid size")
        q.add_argument("--wall-tol", type=float, default=obstruction.WALL_TOL_DEFAULT)
        q.add_argument("--diff-step", type=float, default=DEFAULT_REL_STEP)
        q.add_argument("--quad-tol", type=float, default=1e-6)
        q.add_argument("--format", choices=("json", "csv"), default="json")
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--out", help="write the report here instead of stdout")
        q.add_argument("--builder", choices=("naive", "corrected"), default="naive")
        q.add_argument("--gauge", default="1,0,0,0",
                       help="gauge quaternion w,x,y,z")
        q.add_argument("--tol", type=float, default=None,
                       help="override every identity tolerance (eh-verify)")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    try:
        t_list = [float(s) for s in str(args.t_list).split(",") if s]
        gauge = [float(s) for s in str(args.gauge).split(",")]
    except ValueError as exc:
        raise InputError(f"malformed numeric list: {exc}") from exc
    return RunConfig(command=args.command, input=args.input, catalog=args.catalog,
                     t_list=t_list, grid=args.grid, wall_tol=args.wall_tol,
                     diff_step=args.diff_step, quad_tol=args.quad_tol,
                     fmt=args.format, seed=args.seed, out=args.out,
                     builder=args.builder, gauge=gauge, tol_override=args.tol)


COMMANDS = {
    "jet-curvature": cmd_jet_curvature,
    "obstruction": cmd_obstruction,
    "eh-verify": cmd_eh_verify,
    "glue-scan": cmd_glue_scan,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        result, code = COMMANDS[cfg.command](cfg)
    except (InputError, AdmissibilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AccuracyError as exc:
        print(f"accuracy error: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        raise
    text = result if isinstance(result, str) else to_json(result) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
