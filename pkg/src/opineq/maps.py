"""Normalized positive linear maps in Kraus form and their weighted
multi-index aggregation.

A map keeps a family {V_k} of dim_in x dim_out matrices with
sum_k V_k* V_k = I (dim_out), applied as Phi(X) = sum_k V_k* X V_k.
Normalization makes Phi unital; the Kraus structure makes it positive.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .linalg import (
    DimensionMismatch,
    HermitianOperator,
    eig_hermitian,
    psd_inv_sqrt,
)
from .rng import SplitMix64

KRAUS_NORM_TOL = 1e-10


class MapValidationError(ValueError):
    """Kraus family fails the normalization requirement."""


class PositiveLinearMap:
    """Normalized positive linear map between operator spaces."""

    __slots__ = ("kraus", "dim_in", "dim_out")

    def __init__(self, kraus, tol: float = KRAUS_NORM_TOL):
        mats = np.asarray(kraus, dtype=np.complex128)
        if mats.ndim != 3 or mats.shape[0] < 1:
            raise DimensionMismatch("kraus must be a nonempty stack of matrices")
        mats.setflags(write=False)
        object.__setattr__(self, "kraus", mats)
        object.__setattr__(self, "dim_in", mats.shape[1])
        object.__setattr__(self, "dim_out", mats.shape[2])
        residual = normalization_residual(self)
        if residual > tol:
            raise MapValidationError(
                f"sum V*V deviates from identity by {residual:.3e} (tol {tol:.1e})"
            )

    def __setattr__(self, name, value):
        raise AttributeError("PositiveLinearMap is immutable")

    def __call__(self, x: HermitianOperator) -> HermitianOperator:
        return kraus_apply(self, x)


def normalization_residual(phi: PositiveLinearMap) -> float:
    s = np.einsum("kij,kil->jl", phi.kraus.conj(), phi.kraus)
    return float(np.max(np.abs(s - np.eye(phi.dim_out))))


def kraus_apply(phi: PositiveLinearMap, x: HermitianOperator) -> HermitianOperator:
    """Phi(X) = sum_k V_k* X V_k."""
    if x.dim != phi.dim_in:
        raise DimensionMismatch(f"operator dim {x.dim} != map input dim {phi.dim_in}")
    out = np.einsum("kij,im,kml->jl", phi.kraus.conj(), x.mat, phi.kraus, optimize=True)
    return HermitianOperator(out, tol=np.inf)


def identity_map(dim: int) -> PositiveLinearMap:
    return PositiveLinearMap(np.eye(dim, dtype=np.complex128)[None, :, :])


def pinching_map(dim: int) -> PositiveLinearMap:
    """Projection onto the diagonal: Kraus family of standard-basis projectors."""
    kraus = np.zeros((dim, dim, dim), dtype=np.complex128)
    for e in range(dim):
        kraus[e, e, e] = 1.0
    return PositiveLinearMap(kraus)


@dataclass(frozen=True)
class MapCheckReport:
    """validate_map outcome: failures are reported, never raised."""

    normalization_residual: float
    positivity_min: float
    ok: bool


def validate_map(phi: PositiveLinearMap, tol: float = KRAUS_NORM_TOL,
                 samples: int = 16, seed: int = 0x51A7) -> MapCheckReport:
    """Report the normalization residual and positivity spot-checks.

    Positivity is probed on random PSD inputs: the worst minimum eigenvalue
    of Phi(X), scaled by the sample norm, must stay above -tol.
    """
    residual = normalization_residual(phi)
    rng = SplitMix64(seed)
    worst = np.inf
    for _ in range(samples):
        g = _gaussian_matrix(rng, phi.dim_in, phi.dim_in)
        x = HermitianOperator(g @ g.conj().T, tol=np.inf)
        lam = eig_hermitian(kraus_apply(phi, x)).eigenvalues[0]
        worst = min(worst, float(lam) / (1.0 + x.max_abs()))
    return MapCheckReport(
        normalization_residual=residual,
        positivity_min=worst,
        ok=residual <= tol and worst >= -tol,
    )


def _gaussian_matrix(rng: SplitMix64, rows: int, cols: int) -> np.ndarray:
    out = np.empty((rows, cols), dtype=np.complex128)
    for i in range(rows):
        for j in range(cols):
            re, im = rng.gauss_pair()
            out[i, j] = complex(re, im) / np.sqrt(2.0)
    return out


def random_map(dim_in: int, dim_out: int, n_kraus: int, seed: int) -> PositiveLinearMap:
    """Random normalized map: Gaussian V_k renormalized by (sum V*V)^(-1/2).

    Redraws when the Gram sum is illconditioned (min eigenvalue below
    1e-10 of the max); fails after 8 attempts.
    """
    if n_kraus < 1:
        raise ValueError("need at least one Kraus term")
    rng = SplitMix64(seed)
    for _ in range(8):
        vs = np.stack([_gaussian_matrix(rng, dim_in, dim_out) for _ in range(n_kraus)])
        s = np.einsum("kij,kil->jl", vs.conj(), vs)
        s_op = HermitianOperator(s, tol=1e-9)
        lam = eig_hermitian(s_op).eigenvalues
        if lam[0] > 1e-10 * lam[-1] and lam[0] > 0:
            whiten = psd_inv_sqrt(s_op).mat
            return PositiveLinearMap(vs @ whiten)
    raise RuntimeError("random_map failed to draw a well-conditioned Kraus family")


@dataclass(frozen=True)
class WeightFamily:
    """n probability vectors, one per axis."""

    vectors: tuple

    def __post_init__(self):
        vecs = tuple(np.asarray(v, dtype=np.float64) for v in self.vectors)
        for v in vecs:
            if v.ndim != 1 or v.size < 1:
                raise ValueError("each weight vector must be a nonempty 1-D array")
            if np.any(v < 0):
                raise ValueError("weights must be nonnegative")
            if abs(float(v.sum()) - 1.0) > 1e-12:
                raise ValueError(f"weights must sum to 1, got {float(v.sum())!r}")
            v.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)

    @property
    def n(self) -> int:
        return len(self.vectors)

    @property
    def shape(self) -> tuple:
        return tuple(v.size for v in self.vectors)

    def product_weight(self, idx: tuple) -> float:
        w = 1.0
        for i, j in enumerate(idx):
            w *= float(self.vectors[i][j])
        return w


class MapGrid:
    """One normalized positive map per multi-index (j_1, ..., j_n)."""

    __slots__ = ("shape", "maps")

    def __init__(self, shape, maps):
        shape = tuple(int(k) for k in shape)
        maps = tuple(maps)
        expected = int(np.prod(shape))
        if len(maps) != expected:
            raise DimensionMismatch(f"grid of shape {shape} needs {expected} maps, got {len(maps)}")
        dims = {(phi.dim_in, phi.dim_out) for phi in maps}
        if len(dims) != 1:
            raise DimensionMismatch(f"maps must share dimensions; saw {sorted(dims)}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "maps", maps)

    def __setattr__(self, name, value):
        raise AttributeError("MapGrid is immutable")

    @property
    def dim_in(self) -> int:
        return self.maps[0].dim_in

    @property
    def dim_out(self) -> int:
        return self.maps[0].dim_out

    def indices(self):
        return itertools.product(*(range(k) for k in self.shape))

    def at(self, idx: tuple) -> PositiveLinearMap:
        flat = 0
        for k, j in zip(self.shape, idx):
            flat = flat * k + j
        return self.maps[flat]

    @classmethod
    def uniform(cls, shape, phi: PositiveLinearMap) -> "MapGrid":
        return cls(shape, [phi] * int(np.prod(tuple(shape))))


def aggregate(grid: MapGrid, weights: WeightFamily, field) -> HermitianOperator:
    """sum over multi-indices of w_{j_1} ... w_{j_n} Phi_idx(field(idx)).

    `field` maps an index tuple to a HermitianOperator of the grid's input
    dimension.  The result lives on the output space and is linear in the
    field.
    """
    if weights.shape != grid.shape:
        raise DimensionMismatch(f"weight shape {weights.shape} != grid shape {grid.shape}")
    acc = np.zeros((grid.dim_out, grid.dim_out), dtype=np.complex128)
    for idx in grid.indices():
        x = field(idx)
        if x.dim != grid.dim_in:
            raise DimensionMismatch(f"field entry at {idx} has dim {x.dim}, expected {grid.dim_in}")
        acc = acc + weights.product_weight(idx) * kraus_apply(grid.at(idx), x).mat
    return HermitianOperator(acc, tol=np.inf)
