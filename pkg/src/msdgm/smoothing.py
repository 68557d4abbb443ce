"""Kernel smoothing of periodogram matrices over the frequency lattice."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .spectra import SpectralMatrixField

KERNELS = ("uniform", "triangular")


def min_half_width(d: int) -> int:
    """Smallest h with (2h + 1)^2 >= d."""
    return max(0, math.ceil((math.sqrt(d) - 1) / 2))


def default_half_width(d: int) -> int:
    return max(3, min_half_width(d))


@dataclass(frozen=True)
class SmootherSpec:
    kernel: str = "uniform"
    half_width: int = 3
    ridge: float = 1e-8

    def __post_init__(self):
        if self.kernel not in KERNELS:
            raise ValueError(f"kernel must be one of {KERNELS}, got {self.kernel!r}")
        if self.half_width < 0:
            raise ValueError("half_width must be >= 0")
        if not (self.ridge >= 0 and math.isfinite(self.ridge)):
            raise ValueError("ridge must be a finite number >= 0")

    @classmethod
    def for_dimension(cls, d: int, kernel: str = "uniform", ridge: float = 1e-8) -> "SmootherSpec":
        return cls(kernel, default_half_width(d), ridge)

    def validate(self, d: int) -> None:
        """Check that a full neighbourhood can give a nonsingular d x d estimate."""
        window = (2 * self.half_width + 1) ** 2
        if window >= d:
            return
        msg = (f"half_width={self.half_width} averages {window} frequencies but d={d}; "
               f"use half_width >= {min_half_width(d)}")
        if self.ridge == 0:
            raise ValueError(msg + " or a positive ridge")
        warnings.warn(msg + "; relying on the ridge for invertibility", stacklevel=2)

    def weights(self) -> np.ndarray:
        """(2h+1) x (2h+1) kernel weights, indexed by (dp + h, dq + h)."""
        h = self.half_width
        offs = np.arange(-h, h + 1)
        if self.kernel == "uniform":
            w1 = np.ones(2 * h + 1)
        else:
            w1 = 1.0 - np.abs(offs) / (h + 1)
        return np.outer(w1, w1)


def smooth_field(raw: SpectralMatrixField, spec: SmootherSpec) -> SpectralMatrixField:
    """Kernel-weighted average of each entry over its (p, q) neighbourhood.

    The kernel is truncated at the lattice edges and renormalised over the
    points that remain, and the (0, 0) frequency never contributes. Offsets
    are accumulated in a fixed raster order so the result does not depend on
    how the work is split.
    """
    h = spec.half_width
    P, Q = raw.grid.shape
    mask = np.ones((P, Q))
    mask[raw.grid.dc_index] = 0.0
    vals = raw.values * mask[..., None, None]
    num = np.zeros_like(raw.values)
    den = np.zeros((P, Q))
    support = np.zeros((P, Q), dtype=np.int64)
    w = spec.weights()
    for a, dp in enumerate(range(-h, h + 1)):
        for b, dq in enumerate(range(-h, h + 1)):
            # target slice [t0:t1] reads source slice [t0+off : t1+off]
            tp0, tp1 = max(0, -dp), min(P, P - dp)
            tq0, tq1 = max(0, -dq), min(Q, Q - dq)
            if tp0 >= tp1 or tq0 >= tq1:
                continue
            src = (slice(tp0 + dp, tp1 + dp), slice(tq0 + dq, tq1 + dq))
            tgt = (slice(tp0, tp1), slice(tq0, tq1))
            num[tgt] += w[a, b] * vals[src]
            den[tgt] += w[a, b] * mask[src]
            support[tgt] += (mask[src] > 0) & (w[a, b] > 0)
    out = raw.values.copy()
    ok = den > 0
    out[ok] = num[ok] / den[ok][:, None, None]
    # exact Hermitian symmetry and real diagonal
    out = 0.5 * (out + np.conj(np.swapaxes(out, -1, -2)))
    if raw.support is not None:
        support = np.where(ok, support, raw.support)
    return SpectralMatrixField(out, raw.grid, raw.type_names, smoothed=True, support=support)


def regularize(matrix: np.ndarray, eps: float) -> np.ndarray:
    """Add ``eps`` times the mean diagonal to the diagonal.

    Works on a single matrix or a stack of matrices (last two axes).
    """
    if eps < 0:
        raise ValueError("eps must be >= 0")
    matrix = np.asarray(matrix)
    if eps == 0:
        return matrix.copy()
    diag = np.diagonal(matrix, axis1=-2, axis2=-1).real
    level = diag.mean(axis=-1)
    if np.any(level == 0):
        warnings.warn("zero diagonal; ridge has nothing to scale and is skipped", stacklevel=2)
    out = matrix.astype(complex, copy=True)
    idx = np.arange(matrix.shape[-1])
    out[..., idx, idx] += (eps * level)[..., None]
    return out
