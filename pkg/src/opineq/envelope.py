"""Affine envelopes sum(a_i x_i) + b <= f(x) <= sum(c_i x_i) + d over a box.

Slopes are per-axis chords, which makes the residual f(x) - sum(slope_i x_i)
either a separable sum or a one-variable function of s = sum(beta_i x_i), so
exact offsets reduce to certifiable 1-D optimization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .funcs import BoxDomain, MultiFunc, _broadcast_axis
from .optimize import OptOptions, box_maximize, box_minimize

_OFFSET_OPTS = OptOptions(grid_res=129, top_cells=5)
VALIDATION_SLACK = 1e-10


@dataclass(frozen=True)
class AffineEnvelope:
    """Coefficients of the two bounding hyperplanes (a, b below; c, d above)."""

    a: tuple
    b: float
    c: tuple
    d: float


def fit_envelope(f: MultiFunc, box: BoxDomain, grid_res: int = 201) -> AffineEnvelope:
    """Chord-slope envelope, tight on both sides somewhere on the box."""
    f.check_box(box)
    if f.form == "separable":
        slopes = []
        b = d = 0.0
        for u, (m, mm) in zip(f.components, box.bounds):
            slope = (float(u(mm)) - float(u(m))) / (mm - m)
            slopes.append(slope)
            seg = BoxDomain(((m, mm),))
            residual = lambda pts, u=u, slope=slope: np.asarray(u(pts[..., 0])) - slope * pts[..., 0]
            d += box_maximize(residual, seg, _OFFSET_OPTS).value
            b += box_minimize(residual, seg, _OFFSET_OPTS).value
        return AffineEnvelope(a=tuple(slopes), b=b, c=tuple(slopes), d=d)

    beta = np.array(f.beta)
    smin = float(beta @ box.lower)
    smax = float(beta @ box.upper)
    h = f.outer
    if smax - smin < 1e-14 * (1.0 + abs(smin)):
        # all composite weight collapsed: f is constant on the box
        const = float(h(np.array(smin)))
        zero = (0.0,) * f.arity
        return AffineEnvelope(a=zero, b=const, c=zero, d=const)
    kappa = (float(h(np.array(smax))) - float(h(np.array(smin)))) / (smax - smin)
    seg = BoxDomain(((smin, smax),))
    residual = lambda pts: np.asarray(h(pts[..., 0])) - kappa * pts[..., 0]
    d = box_maximize(residual, seg, _OFFSET_OPTS).value
    b = box_minimize(residual, seg, _OFFSET_OPTS).value
    slopes = tuple(kappa * bi for bi in f.beta)
    return AffineEnvelope(a=slopes, b=b, c=slopes, d=d)


def validate_envelope(f: MultiFunc, env: AffineEnvelope, box: BoxDomain,
                      grid_res: int = 201) -> tuple[int, float]:
    """Exhaustive grid scan; returns (violation count, worst gap).

    A node violates when the lower plane exceeds f or f exceeds the upper
    plane by more than 1e-10.  The worst gap is the largest signed excess
    (negative when the envelope is everywhere slack, zero when it is exact).
    """
    grids = box.axis_grids(grid_res)
    n = box.n
    fvals = f.eval_grid(grids)
    lower = np.zeros((1,) * n) + env.b
    upper = np.zeros((1,) * n) + env.d
    for i in range(n):
        lower = lower + _broadcast_axis(env.a[i] * grids[i], i, n)
        upper = upper + _broadcast_axis(env.c[i] * grids[i], i, n)
    below_gap = lower - fvals
    above_gap = fvals - upper
    violations = int(np.count_nonzero(below_gap > VALIDATION_SLACK)
                     + np.count_nonzero(above_gap > VALIDATION_SLACK))
    worst = float(max(below_gap.max(), above_gap.max()))
    return violations, worst


def offsets_for_slopes(f: MultiFunc, box: BoxDomain, slopes) -> tuple[float, float]:
    """Exact (b, d) offsets making sum(slope_i x_i) + offset bound f on the box.

    Exposed separately so widening behaviour can be studied at fixed slopes;
    reduces to a full box optimization of the residual.
    """
    slopes = np.asarray(slopes, dtype=np.float64)
    residual = lambda pts: f.eval_points(pts) - pts @ slopes
    d = box_maximize(residual, box, _OFFSET_OPTS if box.n == 1 else None).value
    b = box_minimize(residual, box, _OFFSET_OPTS if box.n == 1 else None).value
    return b, d
