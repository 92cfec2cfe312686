"""Multivariate scalar-function model and its operator evaluation.

Two forms are supported, chosen so that scalar envelopes and operator
functional calculus stay coherent for non-commuting Hermitian inputs:

  * Separable:        f(x) = sum_i u_i(x_i)     ->  f(A...) = sum_i u_i(A_i)
  * CompositeAffine:  f(x) = h(sum_i b_i x_i)   ->  f(A...) = h(sum_i b_i A_i)

with b_i >= 0 in the composite form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .linalg import (
    DimensionMismatch,
    DomainViolation,
    HermitianOperator,
    apply_scalar_func,
    eig_hermitian,
    psd_power,
)


@dataclass(frozen=True)
class ScalarFunc1D:
    """Elementary one-variable function: one of polynomial, power, log, exp,
    affine, reciprocal, optionally premultiplied by `scale`."""

    kind: str
    coeffs: tuple = ()
    exponent: float = 0.0
    scale: float = 1.0
    slope: float = 0.0
    intercept: float = 0.0

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.kind == "polynomial":
            return npoly.polyval(x, self.coeffs) if self.coeffs else np.zeros_like(x)
        if self.kind == "power":
            q = self.exponent
            if q == 0.0:
                return np.full_like(x, self.scale)
            if float(q).is_integer():
                return self.scale * x ** int(q)
            return self.scale * x**q
        if self.kind == "log":
            return self.scale * np.log(x)
        if self.kind == "exp":
            return self.scale * np.exp(x)
        if self.kind == "affine":
            return self.slope * x + self.intercept
        if self.kind == "reciprocal":
            return self.scale / x
        raise ValueError(f"unknown scalar function kind {self.kind!r}")

    # -- calculus ----------------------------------------------------------
    def derivative(self) -> "ScalarFunc1D":
        if self.kind == "polynomial":
            der = tuple(npoly.polyder(self.coeffs)) if len(self.coeffs) > 1 else (0.0,)
            return poly(der)
        if self.kind == "power":
            q = self.exponent
            if q == 0.0:
                return poly((0.0,))
            return power(q - 1.0, self.scale * q)
        if self.kind == "log":
            return power(-1.0, self.scale)
        if self.kind == "exp":
            return expf(self.scale)
        if self.kind == "affine":
            return poly((self.slope,))
        if self.kind == "reciprocal":
            return power(-2.0, -self.scale)
        raise ValueError(f"unknown scalar function kind {self.kind!r}")

    def scaled(self, k: float) -> "ScalarFunc1D":
        k = float(k)
        if self.kind == "polynomial":
            return poly(tuple(k * c for c in self.coeffs))
        if self.kind == "affine":
            return affine(k * self.slope, k * self.intercept)
        return ScalarFunc1D(self.kind, exponent=self.exponent, scale=k * self.scale)

    # -- domain ------------------------------------------------------------
    def domain_kind(self) -> str:
        """One of 'all', 'nonzero' (x != 0), 'positive' (x > 0)."""
        if self.kind in ("polynomial", "exp", "affine"):
            return "all"
        if self.kind == "log":
            return "positive"
        if self.kind == "reciprocal":
            return "nonzero"
        q = self.exponent
        if float(q).is_integer():
            return "all" if q >= 0 else "nonzero"
        return "positive"

    def check_domain(self, values) -> None:
        values = np.atleast_1d(np.asarray(values, dtype=np.float64))
        dk = self.domain_kind()
        if dk == "all":
            return
        if dk == "positive":
            bad = values[values <= 0.0]
            if bad.size:
                raise DomainViolation(
                    f"{self.kind} requires positive arguments; got {bad.flat[0]:.6g}"
                )
        else:
            bad = values[values == 0.0]
            if bad.size:
                raise DomainViolation(f"{self.kind} undefined at 0")

    def admits_interval(self, lo: float, hi: float) -> bool:
        dk = self.domain_kind()
        if dk == "all":
            return True
        if dk == "positive":
            return lo > 0.0
        return not (lo <= 0.0 <= hi)


def poly(coeffs) -> ScalarFunc1D:
    """Polynomial with ascending coefficients (c0 + c1 x + c2 x^2 + ...)."""
    return ScalarFunc1D("polynomial", coeffs=tuple(float(c) for c in coeffs))


def power(q: float, scale: float = 1.0) -> ScalarFunc1D:
    return ScalarFunc1D("power", exponent=float(q), scale=float(scale))


def logf(scale: float = 1.0) -> ScalarFunc1D:
    return ScalarFunc1D("log", scale=float(scale))


def expf(scale: float = 1.0) -> ScalarFunc1D:
    return ScalarFunc1D("exp", scale=float(scale))


def affine(slope: float, intercept: float) -> ScalarFunc1D:
    return ScalarFunc1D("affine", slope=float(slope), intercept=float(intercept))


def reciprocal(scale: float = 1.0) -> ScalarFunc1D:
    return ScalarFunc1D("reciprocal", scale=float(scale))


@dataclass(frozen=True)
class BoxDomain:
    """Cartesian product of closed intervals [m_i, M_i] with m_i < M_i."""

    bounds: tuple

    def __post_init__(self):
        bounds = tuple((float(m), float(mm)) for m, mm in self.bounds)
        if not bounds:
            raise ValueError("box needs at least one axis")
        for m, mm in bounds:
            if not m < mm:
                raise ValueError(f"box interval [{m}, {mm}] must have m < M strictly")
        object.__setattr__(self, "bounds", bounds)

    @property
    def n(self) -> int:
        return len(self.bounds)

    @property
    def lower(self) -> np.ndarray:
        return np.array([b[0] for b in self.bounds])

    @property
    def upper(self) -> np.ndarray:
        return np.array([b[1] for b in self.bounds])

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    def axis_grids(self, res: int) -> list:
        return [np.linspace(m, mm, res) for m, mm in self.bounds]


def _broadcast_axis(values: np.ndarray, axis: int, n: int) -> np.ndarray:
    shape = [1] * n
    shape[axis] = values.size
    return values.reshape(shape)


@dataclass(frozen=True)
class MultiFunc:
    """n-variable function in separable or composite-affine form."""

    form: str
    components: tuple = ()
    beta: tuple = ()
    outer: ScalarFunc1D | None = None

    @property
    def arity(self) -> int:
        return len(self.components) if self.form == "separable" else len(self.beta)

    # -- scalar evaluation ---------------------------------------------------
    def eval_points(self, pts) -> np.ndarray:
        """Evaluate at points of shape (..., n); returns shape (...)."""
        pts = np.asarray(pts, dtype=np.float64)
        if pts.shape[-1] != self.arity:
            raise DimensionMismatch(f"expected {self.arity} coordinates, got {pts.shape[-1]}")
        if self.form == "separable":
            total = np.zeros(pts.shape[:-1])
            for i, u in enumerate(self.components):
                u.check_domain(pts[..., i])
                total = total + u(pts[..., i])
            return total
        s = np.tensordot(pts, np.array(self.beta), axes=([-1], [0]))
        self.outer.check_domain(s)
        return self.outer(s)

    def eval_scalar(self, x) -> float:
        return float(self.eval_points(np.asarray(x, dtype=np.float64)))

    def eval_grid(self, axis_values: list) -> np.ndarray:
        """Broadcast evaluation over a product grid given per-axis 1-D arrays."""
        n = self.arity
        if len(axis_values) != n:
            raise DimensionMismatch(f"expected {n} axis arrays, got {len(axis_values)}")
        axes = [np.asarray(a, dtype=np.float64) for a in axis_values]
        if self.form == "separable":
            total = np.zeros((1,) * n)
            for i, u in enumerate(self.components):
                u.check_domain(axes[i])
                total = total + _broadcast_axis(u(axes[i]), i, n)
            return total
        s = np.zeros((1,) * n)
        for i, b in enumerate(self.beta):
            s = s + _broadcast_axis(b * axes[i], i, n)
        self.outer.check_domain(s)
        return self.outer(s)

    # -- operator evaluation ---------------------------------------------------
    def eval_operator(self, ops) -> HermitianOperator:
        ops = list(ops)
        if len(ops) != self.arity:
            raise DimensionMismatch(f"expected {self.arity} operators, got {len(ops)}")
        dim = ops[0].dim
        for op in ops[1:]:
            if op.dim != dim:
                raise DimensionMismatch("operators must share a common dimension")
        if self.form == "separable":
            acc = np.zeros((dim, dim), dtype=np.complex128)
            for u, op in zip(self.components, ops):
                acc = acc + apply_scalar_func(op, u).mat
            return HermitianOperator(acc, tol=np.inf)
        s = np.zeros((dim, dim), dtype=np.complex128)
        for b, op in zip(self.beta, ops):
            s = s + b * op.mat
        return apply_scalar_func(HermitianOperator(s, tol=np.inf), self.outer)

    def partial(self, i: int) -> "MultiFunc":
        """Symbolic partial derivative along axis i (0-based)."""
        n = self.arity
        if not 0 <= i < n:
            raise IndexError(f"axis {i} out of range for arity {n}")
        if self.form == "separable":
            comps = [poly((0.0,))] * n
            comps[i] = self.components[i].derivative()
            return separable(*comps)
        return composite_affine(self.beta, self.outer.derivative().scaled(self.beta[i]))

    def grad_magnitude_points(self, pts) -> np.ndarray:
        """Scalar |f'(x)| = sqrt(sum_i f_i(x)^2) on points of shape (..., n)."""
        pts = np.asarray(pts, dtype=np.float64)
        if self.form == "separable":
            total = np.zeros(pts.shape[:-1])
            for i, u in enumerate(self.components):
                du = u.derivative()
                du.check_domain(pts[..., i])
                total = total + du(pts[..., i]) ** 2
            return np.sqrt(total)
        s = np.tensordot(pts, np.array(self.beta), axes=([-1], [0]))
        dh = self.outer.derivative()
        dh.check_domain(s)
        b2 = float(np.sum(np.array(self.beta) ** 2))
        return np.sqrt(b2 * dh(s) ** 2)

    def grad_magnitude_operator(self, ops) -> HermitianOperator:
        """Operator |f'(A...)| = sqrt(sum_i [f_i(A...)]^2); PSD by construction.

        For both supported forms the squares commute axis by axis, so the sum
        of squares is assembled spectrally and rooted with eigenvalue clipping
        at zero to scrub roundoff.
        """
        ops = list(ops)
        dim = ops[0].dim
        if self.form == "separable":
            acc = np.zeros((dim, dim), dtype=np.complex128)
            for u, op in zip(self.components, ops):
                du = u.derivative()
                dec = eig_hermitian(op)
                du.check_domain(dec.eigenvalues)
                mapped = du(dec.eigenvalues) ** 2
                acc = acc + (dec.eigenvectors * mapped) @ dec.eigenvectors.conj().T
            return psd_power(HermitianOperator(acc, tol=np.inf), 0.5)
        s = np.zeros((dim, dim), dtype=np.complex128)
        for b, op in zip(self.beta, ops):
            s = s + b * op.mat
        dec = eig_hermitian(HermitianOperator(s, tol=np.inf))
        dh = self.outer.derivative()
        dh.check_domain(dec.eigenvalues)
        b2 = float(np.sum(np.array(self.beta) ** 2))
        mapped = b2 * dh(dec.eigenvalues) ** 2
        acc = (dec.eigenvectors * mapped) @ dec.eigenvectors.conj().T
        return psd_power(HermitianOperator(acc, tol=np.inf), 0.5)

    # -- admissibility -----------------------------------------------------
    def check_box(self, box: BoxDomain) -> None:
        """Reject pairings where some component is undefined on the box."""
        if box.n != self.arity:
            raise DimensionMismatch(f"box arity {box.n} != function arity {self.arity}")
        if self.form == "separable":
            for u, (m, mm) in zip(self.components, box.bounds):
                if not u.admits_interval(m, mm):
                    raise DomainViolation(
                        f"{u.kind} component undefined somewhere on [{m}, {mm}]"
                    )
            return
        smin = float(sum(b * m for b, (m, _) in zip(self.beta, box.bounds)))
        smax = float(sum(b * mm for b, (_, mm) in zip(self.beta, box.bounds)))
        if not self.outer.admits_interval(smin, smax):
            raise DomainViolation(
                f"{self.outer.kind} outer undefined somewhere on [{smin}, {smax}]"
            )


def separable(*components: ScalarFunc1D) -> MultiFunc:
    if not components:
        raise ValueError("separable form needs at least one component")
    return MultiFunc(form="separable", components=tuple(components))


def composite_affine(beta, outer: ScalarFunc1D) -> MultiFunc:
    beta = tuple(float(b) for b in beta)
    if not beta:
        raise ValueError("composite form needs at least one weight")
    if any(b < 0 for b in beta):
        raise ValueError(f"composite weights must be nonnegative, got {beta}")
    return MultiFunc(form="composite", beta=beta, outer=outer)


def eval_scalar(f: MultiFunc, x) -> float:
    return f.eval_scalar(x)


def eval_operator(f: MultiFunc, ops) -> HermitianOperator:
    return f.eval_operator(ops)


def partial(f: MultiFunc, i: int) -> MultiFunc:
    return f.partial(i)


def grad_magnitude_operator(f: MultiFunc, ops) -> HermitianOperator:
    return f.grad_magnitude_operator(ops)


def abs_power_of_f(f: MultiFunc, ops, p: float) -> HermitianOperator:
    """|f(A...)|^p via the spectrum of f(A...)."""
    from .linalg import operator_abs_power

    return operator_abs_power(f.eval_operator(ops), p)
