"""Box-constrained global maximization/minimization of smooth scalar objectives.

Strategy: dense coarse grid scan (default 33 points per axis), keep the top
cells, polish each with a derivative-free Nelder-Mead simplex projected onto
the box, then report the best point found.  The procedure is deterministic;
ties between equal optima resolve to the lexicographically smallest argpoint.

Objectives are callables taking an array of shape (..., n) and returning
shape (...).  Domain errors raised by the objective propagate to the caller.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .funcs import BoxDomain

_MAX_ARITY = 6
_CHUNK = 1 << 20


@dataclass(frozen=True)
class OptOptions:
    grid_res: int = 33
    top_cells: int = 5
    max_iter: int = 400
    diam_rel_tol: float = 1e-9


@dataclass(frozen=True)
class OptResult:
    argpoint: tuple
    value: float
    certificate_res: int


def box_maximize(objective, box: BoxDomain, opts: OptOptions | None = None) -> OptResult:
    """Global maximum of `objective` over the box."""
    opts = opts or OptOptions()
    n = box.n
    if n > _MAX_ARITY:
        raise ValueError(f"arity {n} exceeds the supported cap of {_MAX_ARITY}")
    lo, hi = box.lower, box.upper
    grids = box.axis_grids(opts.grid_res)

    # coarse scan, chunked to bound memory on higher arities
    mesh = np.stack(np.meshgrid(*grids, indexing="ij"), axis=-1).reshape(-1, n)
    values = np.empty(mesh.shape[0])
    for start in range(0, mesh.shape[0], _CHUNK):
        stop = min(start + _CHUNK, mesh.shape[0])
        values[start:stop] = np.asarray(objective(mesh[start:stop]))
    if not np.all(np.isfinite(values)):
        bad = mesh[int(np.argmax(~np.isfinite(values)))]
        raise ValueError(f"objective is not finite at {tuple(bad)}")

    order = np.argsort(values, kind="stable")[::-1][: opts.top_cells]
    cell = (hi - lo) / (opts.grid_res - 1)
    candidates = [mesh[order[0]]]
    for idx in order:
        candidates.append(_nelder_mead(objective, mesh[idx], lo, hi, cell, opts))

    best_pt, best_val = None, -np.inf
    for pt in candidates:
        val = float(np.asarray(objective(pt.reshape(1, n)))[0])
        if val > best_val or (val == best_val and tuple(pt) < tuple(best_pt)):
            best_pt, best_val = pt, val
    return OptResult(argpoint=tuple(float(x) for x in best_pt), value=best_val,
                     certificate_res=opts.grid_res)


def box_minimize(objective, box: BoxDomain, opts: OptOptions | None = None) -> OptResult:
    """Global minimum; dual of box_maximize via negation."""
    res = box_maximize(lambda pts: -np.asarray(objective(pts)), box, opts)
    return OptResult(argpoint=res.argpoint, value=-res.value,
                     certificate_res=res.certificate_res)


def _nelder_mead(objective, x0, lo, hi, cell, opts: OptOptions) -> np.ndarray:
    """Projected Nelder-Mead ascent started from a grid point."""
    n = x0.size
    proj = lambda x: np.clip(x, lo, hi)
    f = lambda x: float(np.asarray(objective(proj(x).reshape(1, n)))[0])

    simplex = [x0.astype(float)]
    for i in range(n):
        step = cell[i] if x0[i] + cell[i] <= hi[i] else -cell[i]
        vertex = x0.copy().astype(float)
        vertex[i] += step
        simplex.append(proj(vertex))
    simplex = np.array(simplex)
    fvals = np.array([f(x) for x in simplex])
    diam_tol = opts.diam_rel_tol * float(np.max(hi - lo))

    for _ in range(opts.max_iter):
        order = np.argsort(-fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]
        if np.max(np.abs(simplex - simplex[0])) < diam_tol:
            break
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = proj(centroid + (centroid - worst))
        fr = f(xr)
        if fr > fvals[0]:
            xe = proj(centroid + 2.0 * (centroid - worst))
            fe = f(xe)
            simplex[-1], fvals[-1] = (xe, fe) if fe > fr else (xr, fr)
        elif fr > fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
        else:
            xc = proj(centroid + 0.5 * (worst - centroid))
            fc = f(xc)
            if fc > fvals[-1]:
                simplex[-1], fvals[-1] = xc, fc
            else:
                for i in range(1, n + 1):
                    simplex[i] = proj(simplex[0] + 0.5 * (simplex[i] - simplex[0]))
                    fvals[i] = f(simplex[i])
    order = np.argsort(-fvals, kind="stable")
    return proj(simplex[order[0]])
