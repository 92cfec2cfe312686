"""JSON round-tripping for instances and reports.

Complex matrices are row-major arrays of [re, im] pairs.  Every file carries
the schema marker {"opineq-schema": 1}.  Floats go through Python's repr, so
values round-trip losslessly.
"""

from __future__ import annotations

import json

import numpy as np

from .bounds import BoundReport, InequalityInstance
from .envelope import AffineEnvelope
from .funcs import BoxDomain, MultiFunc, ScalarFunc1D, composite_affine, separable
from .linalg import HermitianOperator, LoewnerVerdict
from .maps import MapGrid, PositiveLinearMap, WeightFamily

SCHEMA_KEY = "opineq-schema"
SCHEMA_VERSION = 1


def complex_matrix_to_json(mat: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(mat)]


def complex_matrix_from_json(data) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in data], dtype=np.complex128)


def operator_to_json(op: HermitianOperator) -> list:
    return complex_matrix_to_json(op.mat)


def operator_from_json(data) -> HermitianOperator:
    return HermitianOperator(complex_matrix_from_json(data))


def scalar_func_to_json(u: ScalarFunc1D) -> dict:
    out = {"kind": u.kind}
    if u.kind == "polynomial":
        out["coeffs"] = list(u.coeffs)
    elif u.kind == "affine":
        out["slope"] = u.slope
        out["intercept"] = u.intercept
    elif u.kind == "power":
        out["exponent"] = u.exponent
        out["scale"] = u.scale
    else:
        out["scale"] = u.scale
    return out


def scalar_func_from_json(data: dict) -> ScalarFunc1D:
    kind = data["kind"]
    if kind == "polynomial":
        return ScalarFunc1D("polynomial", coeffs=tuple(data["coeffs"]))
    if kind == "affine":
        return ScalarFunc1D("affine", slope=data["slope"], intercept=data["intercept"])
    if kind == "power":
        return ScalarFunc1D("power", exponent=data["exponent"], scale=data.get("scale", 1.0))
    if kind in ("log", "exp", "reciprocal"):
        return ScalarFunc1D(kind, scale=data.get("scale", 1.0))
    raise ValueError(f"unknown scalar function kind {kind!r}")


def multifunc_to_json(f: MultiFunc) -> dict:
    if f.form == "separable":
        return {"form": "separable",
                "components": [scalar_func_to_json(u) for u in f.components]}
    return {"form": "composite", "beta": list(f.beta),
            "outer": scalar_func_to_json(f.outer)}


def multifunc_from_json(data: dict) -> MultiFunc:
    if data["form"] == "separable":
        return separable(*[scalar_func_from_json(u) for u in data["components"]])
    if data["form"] == "composite":
        return composite_affine(data["beta"], scalar_func_from_json(data["outer"]))
    raise ValueError(f"unknown multifunc form {data['form']!r}")


def box_to_json(box: BoxDomain) -> list:
    return [[m, mm] for m, mm in box.bounds]


def box_from_json(data) -> BoxDomain:
    return BoxDomain(tuple((m, mm) for m, mm in data))


def envelope_to_json(env: AffineEnvelope) -> dict:
    return {"a": list(env.a), "b": env.b, "c": list(env.c), "d": env.d}


def envelope_from_json(data: dict) -> AffineEnvelope:
    return AffineEnvelope(a=tuple(data["a"]), b=data["b"], c=tuple(data["c"]), d=data["d"])


def instance_to_json(inst: InequalityInstance) -> dict:
    return {
        SCHEMA_KEY: SCHEMA_VERSION,
        "n": inst.n,
        "box": box_to_json(inst.box),
        "weights": [list(map(float, v)) for v in inst.weights.vectors],
        "axes": [[operator_to_json(op) for op in ops] for ops in inst.axes],
        "grid": {
            "shape": list(inst.grid.shape),
            "maps": [{"kraus": [complex_matrix_to_json(v) for v in phi.kraus]}
                     for phi in inst.grid.maps],
        },
        "f": multifunc_to_json(inst.f),
        "g": multifunc_to_json(inst.g),
        "envelope": envelope_to_json(inst.envelope),
    }


def instance_from_json(data: dict) -> InequalityInstance:
    if data.get(SCHEMA_KEY) != SCHEMA_VERSION:
        raise ValueError(f"unsupported or missing {SCHEMA_KEY} field")
    box = box_from_json(data["box"])
    weights = WeightFamily(tuple(np.array(v) for v in data["weights"]))
    axes = [[operator_from_json(m) for m in ops] for ops in data["axes"]]
    maps = [PositiveLinearMap(np.stack([complex_matrix_from_json(v) for v in entry["kraus"]]))
            for entry in data["grid"]["maps"]]
    grid = MapGrid(tuple(data["grid"]["shape"]), maps)
    return InequalityInstance(
        axes=axes, box=box, weights=weights, grid=grid,
        f=multifunc_from_json(data["f"]), g=multifunc_from_json(data["g"]),
        envelope=envelope_from_json(data["envelope"]),
    )


def verdict_to_json(v: LoewnerVerdict) -> dict:
    return {"holds": v.holds, "margin": v.margin, "tolerance": v.tolerance}


def report_to_json(r: BoundReport, include_operators: bool = False) -> dict:
    out = {
        "theorem": r.theorem,
        "side": r.side,
        "scalar_constant": r.scalar_constant,
        "argpoint": list(r.argpoint),
        "verdict": verdict_to_json(r.verdict),
    }
    if include_operators:
        out["lhs"] = operator_to_json(r.lhs)
        out["rhs"] = operator_to_json(r.rhs)
    return out


def write_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def read_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
