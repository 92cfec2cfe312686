"""Sobolev-type inequalities for operator-input functions.

Given conjugate exponents q = m p / (m - p), the original-arguments
inequality bounds the p-norm-like mixture of |f| by the q-norm-like mixture
of the gradient magnitude |f'|:

    ( sum w Phi(|f(A...)|^p) )^(1/p)  <=  C1 ( sum w Phi(|f'(A...)|^q) )^(1/q)

with C1 = C3^(1/q) / C2.  The operator-mean variant replaces the aggregated
gradient by |f'| evaluated at the per-axis mixtures T_i, with constant C4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import BoundReport, InequalityInstance, arg_mixtures
from .envelope import AffineEnvelope
from .funcs import BoxDomain, MultiFunc
from .linalg import (
    HermitianOperator,
    eig_hermitian,
    loewner_leq,
    operator_abs_power,
    psd_power,
)
from .maps import aggregate
from .optimize import box_maximize, box_minimize

GRAD_FLOOR = 1e-9
_SPECTRAL_FLOOR = 1e-9


@dataclass(frozen=True)
class SobolevExponents:
    m: int
    p: float
    q: float


def sobolev_conjugate(m: int, p: float) -> SobolevExponents:
    """q = m p / (m - p) for integer m > 1 and 1 < p < m."""
    if int(m) != m or m <= 1:
        raise ValueError(f"m must be an integer > 1, got {m!r}")
    if not 1.0 < p < m:
        raise ValueError(f"p must satisfy 1 < p < m, got {p!r}")
    return SobolevExponents(m=int(m), p=float(p), q=float(m * p / (m - p)))


@dataclass(frozen=True)
class SobolevConstants:
    C2: float
    C3: float
    C3_prime: float
    C1: float
    C4_prime: float
    C4: float


def constant_C2(h: MultiFunc, box: BoxDomain, exps: SobolevExponents) -> float:
    """Largest constant with C2 * h <= h^(p/q) on the box: min of h^((p-q)/q).

    Requires h strictly positive on the box.
    """
    hmin = box_minimize(h.eval_points, box).value
    if hmin <= 0.0:
        raise ValueError(f"h must be strictly positive on the box; min is {hmin:.6g}")
    expo = (exps.p - exps.q) / exps.q
    objective = lambda pts: h.eval_points(pts) ** expo
    return box_minimize(objective, box).value


def constant_C3(f: MultiFunc, box: BoxDomain, exps: SobolevExponents) -> float:
    """(box max of |f|^p) / (box min of |f'|^q); needs |f'| bounded below."""
    grad_min = box_minimize(f.grad_magnitude_points, box).value
    if grad_min <= GRAD_FLOOR:
        raise ValueError(f"|f'| must be bounded below from zero; box min is {grad_min:.3e}")
    abs_max = box_maximize(lambda pts: np.abs(f.eval_points(pts)), box).value
    return abs_max**exps.p / grad_min**exps.q


def abs_f_power_mixture(inst: InequalityInstance, p: float) -> HermitianOperator:
    """sum w Phi(|f(A...)|^p) over the multi-index grid."""
    key = ("absf", p)
    if key not in inst._cache:
        field = lambda idx: operator_abs_power(inst.f.eval_operator(inst.operator_tuple(idx)), p)
        inst._cache[key] = aggregate(inst.grid, inst.weights, field)
    return inst._cache[key]


def grad_power_mixture(inst: InequalityInstance, q: float) -> HermitianOperator:
    """sum w Phi(|f'(A...)|^q) over the multi-index grid."""
    key = ("gradf", q)
    if key not in inst._cache:
        field = lambda idx: psd_power(
            inst.f.grad_magnitude_operator(inst.operator_tuple(idx)), q
        )
        inst._cache[key] = aggregate(inst.grid, inst.weights, field)
    return inst._cache[key]


def flat_upper_envelope(inst: InequalityInstance, p: float) -> AffineEnvelope:
    """Constant upper envelope |f(x)|^p <= d on the box (slopes zero).

    Valid for any f; a small pad keeps grid validation away from the
    optimizer's equality point.
    """
    opt = box_maximize(lambda pts: np.abs(inst.f.eval_points(pts)) ** p, inst.box)
    d = opt.value + 1e-12 * (1.0 + abs(opt.value))
    zeros = (0.0,) * inst.n
    return AffineEnvelope(a=zeros, b=0.0, c=zeros, d=d)


def _instance_C2(inst: InequalityInstance, exps: SobolevExponents) -> float:
    """C2 from the spectral enclosure of ( sum w Phi(|f|^p) )^(1/p).

    The scalar map t -> t^((p-q)/q) is decreasing (p < q), so its minimum
    over the enclosure [l, L] sits at the top eigenvalue; the floor guards
    the negative exponent when f vanishes.
    """
    w = abs_f_power_mixture(inst, exps.p)
    lam = eig_hermitian(w).eigenvalues
    top = max(_SPECTRAL_FLOOR, float(lam[-1])) ** (1.0 / exps.p)
    return top ** ((exps.p - exps.q) / exps.q)


def sobolev_constants(inst: InequalityInstance, exps: SobolevExponents,
                      envelope: AffineEnvelope | None = None) -> SobolevConstants:
    """All constants for one instance: C2, C3, C3' = C3^(1/q), C1 = C3'/C2,
    and the operator-mean pair (C4', C4)."""
    c2 = _instance_C2(inst, exps)
    c3 = constant_C3(inst.f, inst.box, exps)
    c3p = c3 ** (1.0 / exps.q)
    c4p, c4 = _mean_constants(inst, exps, envelope or flat_upper_envelope(inst, exps.p))
    return SobolevConstants(C2=c2, C3=c3, C3_prime=c3p, C1=c3p / c2, C4_prime=c4p, C4=c4)


def _mean_constants(inst: InequalityInstance, exps: SobolevExponents,
                    envelope: AffineEnvelope) -> tuple[float, float]:
    """(C4', C4) for the operator-mean inequality.

    lambda_r is the box maximum of (upper envelope of |f|^p) / |f'|^q; C4'
    must dominate nu^(1/p - 1/q) over the spectrum of lambda_r |f'(T...)|^q
    so that raising that operator from power 1/p to 1/q only costs C4'.
    """
    grad_min = box_minimize(inst.f.grad_magnitude_points, inst.box).value
    if grad_min <= GRAD_FLOOR:
        raise ValueError(f"|f'| must be bounded below from zero; box min is {grad_min:.3e}")
    co = np.array(envelope.c)
    plane = lambda pts: np.asarray(pts) @ co + envelope.d
    ratio = lambda pts: plane(pts) / inst.f.grad_magnitude_points(pts) ** exps.q
    lam_ratio = box_maximize(ratio, inst.box).value

    gm = mean_grad_operator(inst)
    lam = eig_hermitian(gm).eigenvalues
    if float(lam[0]) <= 0.0:
        raise ValueError(f"|f'(T...)| has a nonpositive eigenvalue {lam[0]:.3e}")
    nu_max = lam_ratio * float(lam[-1]) ** exps.q
    c4p = nu_max ** ((exps.q - exps.p) / (exps.p * exps.q))
    return c4p, c4p * lam_ratio ** (1.0 / exps.q)


def mean_grad_operator(inst: InequalityInstance) -> HermitianOperator:
    """|f'(T_1, ..., T_n)| at the per-axis weighted mixtures."""
    key = ("meangrad",)
    if key not in inst._cache:
        inst._cache[key] = inst.f.grad_magnitude_operator(arg_mixtures(inst))
    return inst._cache[key]


def verify_sobolev_original(inst: InequalityInstance, exps: SobolevExponents,
                            tol: float | None = None) -> tuple[BoundReport, SobolevConstants]:
    """Check lhs = W^(1/p) <= C1 * Z^(1/q) with W, Z the aggregated powers."""
    consts = sobolev_constants(inst, exps)
    w = abs_f_power_mixture(inst, exps.p)
    z = grad_power_mixture(inst, exps.q)
    lhs = psd_power(w, 1.0 / exps.p, floor=0.0)
    rhs = consts.C1 * psd_power(z, 1.0 / exps.q, floor=0.0)
    verdict = loewner_leq(lhs, rhs, tol)
    report = BoundReport(
        theorem="sobolev", side="upper", lhs=lhs, rhs=rhs,
        scalar_constant=consts.C1, verdict=verdict, argpoint=(),
    )
    return report, consts


def verify_sobolev_mean(inst: InequalityInstance, exps: SobolevExponents,
                        envelope: AffineEnvelope | None = None,
                        tol: float | None = None) -> tuple[BoundReport, SobolevConstants]:
    """Check lhs = W^(1/p) <= C4 * (|f'(T...)|^q)^(1/q)."""
    envelope = envelope or flat_upper_envelope(inst, exps.p)
    _check_mean_envelope(inst, envelope, exps.p)
    consts = sobolev_constants(inst, exps, envelope)
    w = abs_f_power_mixture(inst, exps.p)
    lhs = psd_power(w, 1.0 / exps.p, floor=0.0)
    gq = psd_power(mean_grad_operator(inst), exps.q)
    rhs = consts.C4 * psd_power(gq, 1.0 / exps.q, floor=0.0)
    verdict = loewner_leq(lhs, rhs, tol)
    report = BoundReport(
        theorem="sobolev-mean", side="upper", lhs=lhs, rhs=rhs,
        scalar_constant=consts.C4, verdict=verdict, argpoint=(),
    )
    return report, consts


def _check_mean_envelope(inst: InequalityInstance, envelope: AffineEnvelope,
                         p: float, grid_res: int = 201) -> None:
    """Grid-validate |f(x)|^p <= sum c_i x_i + d on the box."""
    grids = inst.box.axis_grids(grid_res)
    from .funcs import _broadcast_axis

    n = inst.n
    fvals = np.abs(inst.f.eval_grid(grids)) ** p
    plane = np.zeros((1,) * n) + envelope.d
    for i in range(n):
        plane = plane + _broadcast_axis(envelope.c[i] * grids[i], i, n)
    excess = fvals - plane
    bad = int(np.count_nonzero(excess > 1e-10 * (1.0 + np.abs(plane))))
    if bad:
        raise ValueError(f"upper envelope invalid for |f|^p: {bad} grid violations")


@dataclass(frozen=True)
class EmbeddingReport:
    w_norm: float
    l_norm: float
    w_positive: bool
    l_positive: bool
    member: bool


def embedding_norms(inst: InequalityInstance, exps: SobolevExponents) -> EmbeddingReport:
    """Max-eigenvalue norms of the gradient-side and function-side mixtures.

    Membership asks both aggregates to be finite and positive definite.
    """
    w = abs_f_power_mixture(inst, exps.p)
    z = grad_power_mixture(inst, exps.q)
    lam_w = eig_hermitian(z).eigenvalues
    lam_l = eig_hermitian(w).eigenvalues
    w_norm = max(float(lam_w[-1]), 0.0) ** (1.0 / exps.q)
    l_norm = max(float(lam_l[-1]), 0.0) ** (1.0 / exps.p)
    w_pos = bool(lam_w[0] > 0.0) and bool(np.all(np.isfinite(lam_w)))
    l_pos = bool(lam_l[0] > 0.0) and bool(np.all(np.isfinite(lam_l)))
    return EmbeddingReport(
        w_norm=w_norm, l_norm=l_norm, w_positive=w_pos, l_positive=l_pos,
        member=w_pos and l_pos,
    )


def lemma_grid_violations(h: MultiFunc, f: MultiFunc, box: BoxDomain,
                          exps: SobolevExponents, c2: float, c3: float,
                          grid_res: int = 201) -> tuple[int, int]:
    """Grid violation counts for the two scalar lemma inequalities.

    Checks C2 * h(x) <= h^(p/q)(x) and |f(x)|^p <= C3 * |f'(x)|^q at every
    node, with relative slack 1e-10.
    """
    grids = box.axis_grids(grid_res)
    hv = h.eval_grid(grids)
    lhs2 = c2 * hv
    rhs2 = hv ** (exps.p / exps.q)
    bad2 = int(np.count_nonzero(lhs2 > rhs2 + 1e-10 * (1.0 + np.abs(rhs2))))

    mesh = np.stack(np.meshgrid(*grids, indexing="ij"), axis=-1)
    fv = np.abs(f.eval_points(mesh)) ** exps.p
    gv = c3 * f.grad_magnitude_points(mesh) ** exps.q
    bad3 = int(np.count_nonzero(fv > gv + 1e-10 * (1.0 + np.abs(gv))))
    return bad2, bad3
