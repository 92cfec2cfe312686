"""Dense Hermitian linear algebra: eigendecomposition, spectral functional
calculus, Loewner-order comparison, and PSD utilities.

Matrices are small (dim <= 32) and dense; the eigensolver is a cyclic
complex Jacobi iteration, which is simple and robust at this scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
JACOBI_REL_TOL = 1e-13
_MAX_SWEEPS = 100


class SymmetryViolation(ValueError):
    """Input matrix is not Hermitian within tolerance."""


class DimensionMismatch(ValueError):
    """Operands have incompatible dimensions."""


class DomainViolation(ValueError):
    """A spectrum point falls outside a scalar function's domain."""


class HermitianOperator:
    """Immutable dense self-adjoint matrix over the complex field.

    Construction symmetrizes the entries (A <- (A + A*)/2) after checking
    that the asymmetry is within `tol`, so downstream floating-point drift
    never accumulates.
    """

    __slots__ = ("mat", "_eig")

    def __init__(self, mat, tol: float = HERMITIAN_TOL):
        a = np.asarray(mat, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
        if a.shape[0] < 1:
            raise DimensionMismatch("dimension must be at least 1")
        asym = np.max(np.abs(a - a.conj().T))
        if asym > tol:
            raise SymmetryViolation(
                f"matrix is not Hermitian: max |A - A*| = {asym:.3e} exceeds {tol:.1e}"
            )
        a = (a + a.conj().T) / 2.0
        a.setflags(write=False)
        object.__setattr__(self, "mat", a)
        object.__setattr__(self, "_eig", None)

    def __setattr__(self, name, value):
        raise AttributeError("HermitianOperator is immutable")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def identity(cls, dim: int) -> "HermitianOperator":
        return cls(np.eye(dim, dtype=np.complex128))

    @classmethod
    def zeros(cls, dim: int) -> "HermitianOperator":
        return cls(np.zeros((dim, dim), dtype=np.complex128))

    @classmethod
    def from_diag(cls, values) -> "HermitianOperator":
        return cls(np.diag(np.asarray(values, dtype=np.complex128)))

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        self._check_same_dim(other)
        return HermitianOperator(self.mat + other.mat, tol=np.inf)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        self._check_same_dim(other)
        return HermitianOperator(self.mat - other.mat, tol=np.inf)

    def __mul__(self, scalar: float) -> "HermitianOperator":
        return HermitianOperator(float(scalar) * self.mat, tol=np.inf)

    __rmul__ = __mul__

    def __neg__(self) -> "HermitianOperator":
        return HermitianOperator(-self.mat, tol=np.inf)

    def _check_same_dim(self, other: "HermitianOperator") -> None:
        if self.dim != other.dim:
            raise DimensionMismatch(f"dimension mismatch: {self.dim} vs {other.dim}")

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.mat)))

    def __repr__(self) -> str:
        return f"HermitianOperator(dim={self.dim})"


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues in ascending order and matching orthonormal eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


@dataclass(frozen=True)
class LoewnerVerdict:
    """Outcome of an operator-order comparison A <= B."""

    holds: bool
    margin: float
    tolerance: float


def eig_hermitian(a: HermitianOperator) -> SpectralDecomposition:
    """Eigendecomposition by cyclic complex Jacobi rotations.

    Sweeps run until the off-diagonal Frobenius mass drops below
    1e-13 * ||A||_F.  Results are cached on the operator.
    """
    if a._eig is not None:
        return a._eig
    m = np.array(a.mat, dtype=np.complex128)
    n = m.shape[0]
    v = np.eye(n, dtype=np.complex128)
    if n > 1:
        _jacobi_sweeps(m, v)
    vals = np.real(np.diag(m))
    order = np.argsort(vals, kind="stable")
    dec = SpectralDecomposition(eigenvalues=vals[order].copy(), eigenvectors=v[:, order].copy())
    dec.eigenvalues.setflags(write=False)
    dec.eigenvectors.setflags(write=False)
    object.__setattr__(a, "_eig", dec)
    return dec


def _jacobi_sweeps(m: np.ndarray, v: np.ndarray) -> None:
    n = m.shape[0]
    norm_f = float(np.linalg.norm(m))
    if norm_f == 0.0:
        return
    target = JACOBI_REL_TOL * norm_f
    # if every entry stays below target/n the off-diagonal norm is below target,
    # so a sweep that rotates nothing certifies convergence
    skip = target / n
    for _ in range(_MAX_SWEEPS):
        hollow = m.copy()
        np.fill_diagonal(hollow, 0.0)
        if float(np.linalg.norm(hollow)) <= target:
            return
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(m[p, q]) > skip:
                    _rotate(m, v, p, q)
                    rotated = True
        if not rotated:
            return
    raise RuntimeError("Jacobi iteration failed to converge")


def _rotate(m: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """Annihilate m[p, q] with a unitary rotation; update m and v in place."""
    apq = m[p, q]
    r = abs(apq)
    if r == 0.0:
        return
    phase = apq / r
    app = m[p, p].real
    aqq = m[q, q].real
    theta = (aqq - app) / (2.0 * r)
    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    s_ph = s * phase.conjugate()
    # column transform: [col_p, col_q] <- [c*col_p - s_ph*col_q, s*col_p + c*ph*col_q]
    col_p = m[:, p].copy()
    col_q = m[:, q].copy()
    m[:, p] = c * col_p - s_ph * col_q
    m[:, q] = s * col_p + c * phase.conjugate() * col_q
    row_p = m[p, :].copy()
    row_q = m[q, :].copy()
    m[p, :] = c * row_p - s * phase * row_q
    m[q, :] = s * row_p + c * phase * row_q
    m[p, q] = 0.0
    m[q, p] = 0.0
    m[p, p] = m[p, p].real
    m[q, q] = m[q, q].real
    vcol_p = v[:, p].copy()
    vcol_q = v[:, q].copy()
    v[:, p] = c * vcol_p - s_ph * vcol_q
    v[:, q] = s * vcol_p + c * phase.conjugate() * vcol_q


def apply_scalar_func(a: HermitianOperator, u) -> HermitianOperator:
    """Functional calculus u(A) = U diag(u(lambda)) U*.

    `u` is called on the eigenvalue vector; if it exposes `check_domain`,
    that runs first and raises DomainViolation naming any offending
    eigenvalue.
    """
    dec = eig_hermitian(a)
    lam = dec.eigenvalues
    check = getattr(u, "check_domain", None)
    if check is not None:
        check(lam)
    mapped = np.asarray(u(lam), dtype=np.float64)
    mat = (dec.eigenvectors * mapped) @ dec.eigenvectors.conj().T
    return HermitianOperator(mat, tol=np.inf)


def loewner_leq(a: HermitianOperator, b: HermitianOperator, tol: float | None = None) -> LoewnerVerdict:
    """Check A <= B in the Loewner order: margin = min eigenvalue of B - A.

    Default tolerance is scale-aware, 1e-8 * (1 + max|B - A|).
    """
    a._check_same_dim(b)
    diff = b - a
    if tol is None:
        tol = 1e-8 * (1.0 + diff.max_abs())
    margin = float(eig_hermitian(diff).eigenvalues[0])
    return LoewnerVerdict(holds=margin >= -tol, margin=margin, tolerance=float(tol))


def operator_abs_power(a: HermitianOperator, p: float) -> HermitianOperator:
    """|A|^p through the spectrum: eigenvalues map to |lambda|^p."""
    dec = eig_hermitian(a)
    absvals = np.abs(dec.eigenvalues)
    if p < 0 and float(absvals.min(initial=np.inf)) <= 0.0:
        raise DomainViolation(f"singular operator: |A|^{p} undefined at eigenvalue 0")
    if p == 0:
        return HermitianOperator.identity(a.dim)
    mapped = absvals**p
    mat = (dec.eigenvectors * mapped) @ dec.eigenvectors.conj().T
    return HermitianOperator(mat, tol=np.inf)


def psd_power(a: HermitianOperator, p: float, floor: float = 0.0) -> HermitianOperator:
    """A^p for PSD A, clipping tiny negative eigenvalues up to `floor`."""
    dec = eig_hermitian(a)
    lam = np.clip(dec.eigenvalues, floor, None)
    if p < 0 and float(lam.min()) <= 0.0:
        raise DomainViolation(f"operator not positive definite: min eigenvalue {dec.eigenvalues[0]:.3e}")
    mapped = lam**p
    mat = (dec.eigenvectors * mapped) @ dec.eigenvectors.conj().T
    return HermitianOperator(mat, tol=np.inf)


def psd_inv_sqrt(a: HermitianOperator) -> HermitianOperator:
    """A^(-1/2) for positive definite A."""
    dec = eig_hermitian(a)
    if float(dec.eigenvalues[0]) <= 0.0:
        raise DomainViolation(
            f"operator not positive definite: min eigenvalue {dec.eigenvalues[0]:.3e}"
        )
    mapped = dec.eigenvalues**-0.5
    mat = (dec.eigenvectors * mapped) @ dec.eigenvectors.conj().T
    return HermitianOperator(mat, tol=np.inf)
