#!/usr/bin/env python3
"""Wall-condition and obstruction summary for the catalog germs."""

import argparse
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from ehglue import jets, obstruction
from ehglue.report import convention_block, to_json

CATALOG = {
    "flat": jets.flat_jet,
    "real-hyperbolic": jets.real_hyperbolic_jet,
    "complex-hyperbolic": jets.complex_hyperbolic_jet,
}


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out-dir", default="out")
    args = p.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)

    rows = {}
    for name, make in CATALOG.items():
        h = make()
        op = jets.curvature_operator(jets.curvature_at_origin(h))
        wall = obstruction.wall_condition(op.rplus)
        ov = obstruction.lambda_coefficients(h)
        entry = {
            "scal": op.scal,
            "rplus": op.rplus,
            "eigenvalues": wall.eigenvalues,
            "on_wall": wall.on_wall,
            "kernel_dim": wall.kernel_dim,
            "degeneracy": wall.degeneracy,
            "lambda": ov.lam,
        }
        if wall.on_wall:
            phi, conj = obstruction.align_gauge(op.rplus)
            aligned = jets.pullback(h, phi.inverse().rotation4())
            entry["gauge_quaternion"] = phi.q
            entry["rplus_aligned"] = conj
            entry["lambda_aligned"] = obstruction.lambda_coefficients(aligned).lam
        rows[name] = entry
        lam = np.array2string(ov.lam, precision=3)
        print(f"{name:20s} on_wall={str(wall.on_wall):5s} "
              f"kernel_dim={wall.kernel_dim} {wall.degeneracy:13s} lambda={lam}")

    out = {"convention": convention_block(), "catalog": rows}
    with open(os.path.join(args.out_dir, "wall_catalog.json"), "w") as f:
        f.write(to_json(out) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
