"""Operator inequality bounds for weighted mixtures of positive-map images.

Every bound compares an operator left-hand side built from the mixture

    T_f   = sum w_{j_1} ... w_{j_n} Phi_idx( f(A_{j_1}, ..., A_{j_n}) )
    T_i   = sum w_{j_1} ... w_{j_n} Phi_idx( A_{j_i} )

against a scalar constant obtained by maximizing or minimizing a combination
of the affine envelope of f and the comparison function g over the spectral
box.  Four families are provided: the general form F(T_f, g(T...)), the
alpha-weighted difference, the ratio (congruence) form for one-signed g, and
the plain difference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .envelope import AffineEnvelope, validate_envelope
from .funcs import BoxDomain, MultiFunc, composite_affine, expf, logf, power
from .linalg import (
    DimensionMismatch,
    HermitianOperator,
    LoewnerVerdict,
    eig_hermitian,
    loewner_leq,
    psd_inv_sqrt,
)
from .maps import MapGrid, WeightFamily, aggregate
from .optimize import OptResult, box_maximize, box_minimize

SPECTRUM_TOL = 1e-10


class SignChange(ValueError):
    """g takes both signs on the box, so no ratio bound applies."""


@dataclass(frozen=True)
class Difference:
    """F(u, v) = u - alpha * v."""

    alpha: float


@dataclass(frozen=True)
class Congruence:
    """F(u, v) = v^(-1/2) u v^(-1/2); requires positive definite g(T...)."""


@dataclass(frozen=True)
class BoundReport:
    theorem: str
    side: str
    lhs: HermitianOperator
    rhs: HermitianOperator
    scalar_constant: float
    verdict: LoewnerVerdict
    argpoint: tuple


class InequalityInstance:
    """A full problem instance: axis operators, weights, map grid, f, g, and
    a validated affine envelope of f over the box."""

    __slots__ = ("axes", "box", "weights", "grid", "f", "g", "envelope",
                 "_tf", "_tis", "_gmix", "_cache")

    def __init__(self, axes, box: BoxDomain, weights: WeightFamily, grid: MapGrid,
                 f: MultiFunc, g: MultiFunc, envelope: AffineEnvelope,
                 envelope_grid_res: int = 201):
        axes = tuple(tuple(ops) for ops in axes)
        n = box.n
        if not (len(axes) == weights.n == f.arity == g.arity == n):
            raise DimensionMismatch(
                f"arity mismatch: axes={len(axes)} weights={weights.n} "
                f"f={f.arity} g={g.arity} box={n}"
            )
        shape = tuple(len(ops) for ops in axes)
        if shape != grid.shape or shape != weights.shape:
            raise DimensionMismatch(
                f"shape mismatch: axes={shape} grid={grid.shape} weights={weights.shape}"
            )
        for i, ops in enumerate(axes):
            m, mm = box.bounds[i]
            for j, op in enumerate(ops):
                if op.dim != grid.dim_in:
                    raise DimensionMismatch(f"axis {i} operator {j} has dim {op.dim}")
                lam = eig_hermitian(op).eigenvalues
                if lam[0] < m - SPECTRUM_TOL or lam[-1] > mm + SPECTRUM_TOL:
                    raise ValueError(
                        f"axis {i} operator {j} spectrum [{lam[0]:.12g}, {lam[-1]:.12g}] "
                        f"escapes box [{m}, {mm}]"
                    )
        f.check_box(box)
        g.check_box(box)
        violations, worst = validate_envelope(f, envelope, box, envelope_grid_res)
        if violations:
            raise ValueError(
                f"envelope invalid for f on box: {violations} grid violations, worst {worst:.3e}"
            )
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "envelope", envelope)
        object.__setattr__(self, "_tf", None)
        object.__setattr__(self, "_tis", None)
        object.__setattr__(self, "_gmix", None)
        object.__setattr__(self, "_cache", {})

    def __setattr__(self, name, value):
        raise AttributeError("InequalityInstance is immutable")

    @property
    def n(self) -> int:
        return self.box.n

    def operator_tuple(self, idx: tuple) -> list:
        return [self.axes[i][idx[i]] for i in range(self.n)]


def lhs_f_mixture(inst: InequalityInstance) -> HermitianOperator:
    """T_f, the weighted map mixture of f evaluated on each operator tuple."""
    if inst._tf is not None:
        return inst._tf
    f = inst.f
    if f.form == "separable":
        from .linalg import apply_scalar_func

        per_axis = [
            [apply_scalar_func(op, u).mat for op in ops]
            for u, ops in zip(f.components, inst.axes)
        ]

        def field(idx):
            acc = per_axis[0][idx[0]].copy()
            for i in range(1, inst.n):
                acc += per_axis[i][idx[i]]
            return HermitianOperator(acc, tol=np.inf)

    else:
        def field(idx):
            return f.eval_operator(inst.operator_tuple(idx))

    tf = aggregate(inst.grid, inst.weights, field)
    object.__setattr__(inst, "_tf", tf)
    return tf


def arg_mixtures(inst: InequalityInstance) -> list:
    """T_i per axis, each with spectrum inside the axis interval."""
    if inst._tis is not None:
        return list(inst._tis)
    tis = [
        aggregate(inst.grid, inst.weights, lambda idx, i=i: inst.axes[i][idx[i]])
        for i in range(inst.n)
    ]
    object.__setattr__(inst, "_tis", tuple(tis))
    return tis


def g_of_mixtures(inst: InequalityInstance) -> HermitianOperator:
    if inst._gmix is None:
        object.__setattr__(inst, "_gmix", inst.g.eval_operator(arg_mixtures(inst)))
    return inst._gmix


def spectrum_containment(inst: InequalityInstance, tol: float = 1e-8) -> tuple[bool, float]:
    """Check Lambda(T_i) within [m_i - tol, M_i + tol] for every axis.

    Returns (ok, worst escape), worst escape being the largest distance any
    mixture eigenvalue lands outside its interval (0 when fully contained).
    """
    worst = 0.0
    for i, ti in enumerate(arg_mixtures(inst)):
        m, mm = inst.box.bounds[i]
        lam = eig_hermitian(ti).eigenvalues
        worst = max(worst, float(m - lam[0]), float(lam[-1] - mm), 0.0)
    return worst <= tol, worst


def _plane(env: AffineEnvelope, side: str):
    coeffs, offset = (env.c, env.d) if side == "upper" else (env.a, env.b)
    co = np.array(coeffs)

    def plane(pts):
        return np.asarray(pts) @ co + offset

    return plane


def _verdict(lhs, rhs, side: str, tol) -> LoewnerVerdict:
    return loewner_leq(lhs, rhs, tol) if side == "upper" else loewner_leq(rhs, lhs, tol)


def _check_side(side: str) -> None:
    if side not in ("upper", "lower"):
        raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")


def general_bound(inst: InequalityInstance, fk, side: str, tol: float | None = None) -> BoundReport:
    """F(T_f, g(T...)) against the box extremum of F(envelope plane, g)."""
    _check_side(side)
    tf = lhs_f_mixture(inst)
    gmix = g_of_mixtures(inst)
    plane = _plane(inst.envelope, side)
    ident = HermitianOperator.identity(tf.dim)

    if isinstance(fk, Difference):
        alpha = fk.alpha
        objective = lambda pts: plane(pts) - alpha * inst.g.eval_points(pts)
        opt = box_maximize(objective, inst.box) if side == "upper" else box_minimize(objective, inst.box)
        lhs = tf - alpha * gmix
        rhs = opt.value * ident
    elif isinstance(fk, Congruence):
        sign = g_sign_on_box(inst.g, inst.box)
        if sign != "positive":
            raise SignChange(f"congruence form needs g > 0 on the box, got {sign}")
        objective = lambda pts: plane(pts) / inst.g.eval_points(pts)
        opt = box_maximize(objective, inst.box) if side == "upper" else box_minimize(objective, inst.box)
        half = psd_inv_sqrt(gmix)
        lhs = HermitianOperator(half.mat @ tf.mat @ half.mat, tol=np.inf)
        rhs = opt.value * ident
    else:
        raise TypeError(f"unsupported F kind {fk!r}")

    return BoundReport(
        theorem="thm2.3", side=side, lhs=lhs, rhs=rhs, scalar_constant=opt.value,
        verdict=_verdict(lhs, rhs, side, tol), argpoint=opt.argpoint,
    )


def _difference_extremum(inst: InequalityInstance, alpha: float, side: str) -> OptResult:
    plane = _plane(inst.envelope, side)
    objective = lambda pts: plane(pts) - alpha * inst.g.eval_points(pts)
    if side == "upper":
        return box_maximize(objective, inst.box)
    return box_minimize(objective, inst.box)


def alpha_difference_bound(inst: InequalityInstance, alpha: float, side: str,
                           tol: float | None = None) -> BoundReport:
    """T_f against alpha * g(T...) + extremum(envelope plane - alpha g) * I."""
    _check_side(side)
    tf = lhs_f_mixture(inst)
    gmix = g_of_mixtures(inst)
    opt = _difference_extremum(inst, alpha, side)
    rhs = alpha * gmix + opt.value * HermitianOperator.identity(tf.dim)
    return BoundReport(
        theorem="thm2.4", side=side, lhs=tf, rhs=rhs, scalar_constant=opt.value,
        verdict=_verdict(tf, rhs, side, tol), argpoint=opt.argpoint,
    )


def difference_bound(inst: InequalityInstance, side: str, tol: float | None = None) -> BoundReport:
    """T_f - g(T...) against extremum(envelope plane - g) * I.

    Shares the alpha = 1 optimizer path exactly, so results agree bit for bit
    with alpha_difference_bound(1) after moving g across the inequality.
    """
    _check_side(side)
    tf = lhs_f_mixture(inst)
    gmix = g_of_mixtures(inst)
    opt = _difference_extremum(inst, 1.0, side)
    lhs = tf - gmix
    rhs = opt.value * HermitianOperator.identity(tf.dim)
    return BoundReport(
        theorem="thm2.15", side=side, lhs=lhs, rhs=rhs, scalar_constant=opt.value,
        verdict=_verdict(lhs, rhs, side, tol), argpoint=opt.argpoint,
    )


def g_sign_on_box(g: MultiFunc, box: BoxDomain) -> str:
    """'positive', 'negative', or 'mixed', decided by the box extremes of g."""
    gmin = box_minimize(g.eval_points, box).value
    gmax = box_maximize(g.eval_points, box).value
    if gmin > 0.0:
        return "positive"
    if gmax < 0.0:
        return "negative"
    return "mixed"


def ratio_bound(inst: InequalityInstance, side: str, g_sign: str | None = None,
                tol: float | None = None) -> BoundReport:
    """T_f against lambda * g(T...), lambda an extremum of (envelope plane)/g.

    For g > 0 the upper bound maximizes the ratio and the lower bound
    minimizes it; for g < 0 the two extrema swap.  A sign change across the
    box is rejected.
    """
    _check_side(side)
    detected = g_sign_on_box(inst.g, inst.box)
    if detected == "mixed":
        raise SignChange("g changes sign on the box; ratio bound undefined")
    if g_sign is not None and g_sign != detected:
        raise SignChange(f"declared g sign {g_sign!r} but box extremes say {detected!r}")

    tf = lhs_f_mixture(inst)
    gmix = g_of_mixtures(inst)
    plane = _plane(inst.envelope, side)
    objective = lambda pts: plane(pts) / inst.g.eval_points(pts)
    take_max = (side == "upper") == (detected == "positive")
    opt = box_maximize(objective, inst.box) if take_max else box_minimize(objective, inst.box)
    rhs = opt.value * gmix
    return BoundReport(
        theorem="thm2.9", side=side, lhs=tf, rhs=rhs, scalar_constant=opt.value,
        verdict=_verdict(tf, rhs, side, tol), argpoint=opt.argpoint,
    )


def special_g(kind: str, beta, q: float | None = None) -> MultiFunc:
    """Comparison functions of an affine aggregate: power, log, or exp.

    Power takes the exponent `q`; all kinds require nonnegative beta.  The
    log sign split (positive vs negative branch) is detected per box by
    g_sign_on_box and routed inside ratio_bound.
    """
    if kind == "power":
        if q is None:
            raise ValueError("power kind needs an exponent q")
        return composite_affine(beta, power(q))
    if kind == "log":
        return composite_affine(beta, logf())
    if kind == "exp":
        return composite_affine(beta, expf())
    raise ValueError(f"unknown special g kind {kind!r}")
