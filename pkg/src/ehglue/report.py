"""Deterministic report serialization.

Floating-point values are printed with 17 significant digits (full float64
round trip); dict keys are sorted; no timestamps or environment data enter a
report, so identical run configurations produce byte-identical output.
"""

from __future__ import annotations

import numpy as np

from . import ehspace
from .errors import InputError


def fmt_float(x: float) -> str:
    if x != x:
        return "NaN"
    if x in (float("inf"), float("-inf")):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return format(float(x), ".17g")


def to_json(obj, indent: int = 0) -> str:
    """Recursive JSON writer with fixed float formatting and sorted keys."""
    pad = " " * indent
    inner = " " * (indent + 2)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(float(obj))
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{out}"'
    if isinstance(obj, np.ndarray):
        return to_json(obj.tolist(), indent)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [to_json(v, indent + 2) for v in obj]
        return "[\n" + ",\n".join(inner + s for s in items) + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for k in sorted(obj, key=str):
            items.append(f'{inner}"{k}": ' + to_json(obj[k], indent + 2))
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    raise InputError(f"cannot serialize {type(obj).__name__}")


def to_csv(header: list[str], rows: list[tuple]) -> str:
    def cell(v):
        if isinstance(v, (float, np.floating)):
            return fmt_float(float(v))
        return str(v)
    lines = [",".join(header)]
    lines.extend(",".join(cell(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def convention_block() -> dict:
    """Conventions quoted in every report."""
    return {
        "orientation": "dx1^dx2^dx3^dx4",
        "form_norm": "basis dx^i^dx^j (i<j) orthonormal",
        "sphere_volume": 2.0 * np.pi**2,
        "sphere_volume_quotient": np.pi**2,
        "omega_norm": ehspace.l2_norm_omega(),
        "omega_norm_method": "adaptive radial quadrature x exact sphere volume, "
                             "analytic r^-8 tail, Z2 quotient",
        "curvature_sign": "constant curvature K has operator K Id on 2-forms",
    }
