"""Inverse spectral matrices and partial dependence between component processes.

At every usable frequency the smoothed spectral matrix f is inverted to
g = f^-1 and normalised to the rescaled inverse

    d_ij = g_ij / sqrt(g_ii g_jj),

whose negation is the partial coherence R_ij|rest. The Schur-complement
partial cross-spectrum is provided as an independent second route.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import EstimationError
from .smoothing import regularize
from .spectra import FrequencyGrid, SpectralMatrixField

COND_THRESHOLD = 1e12
RESIDUAL_TOL = 1e-8

# frequency flag bits
DC = 1
LOW_SUPPORT = 2
SINGULAR = 4
BAD_DIAGONAL = 8

FLAG_NAMES = {DC: "dc", LOW_SUPPORT: "low_support", SINGULAR: "singular", BAD_DIAGONAL: "nonpositive_diagonal"}


class SingularSpectrumError(EstimationError):
    pass


def _hermitian_part(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + np.conj(np.swapaxes(m, -1, -2)))


def _condition(stack: np.ndarray) -> np.ndarray:
    s = np.linalg.svd(stack, compute_uv=False)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = s[..., 0] / s[..., -1]
    return np.where(np.isfinite(c), c, np.inf)


def _invert_stack(stack: np.ndarray, cond_threshold: float) -> tuple[np.ndarray, np.ndarray]:
    """Invert the well-conditioned matrices of a stack; return (inverses, ok)."""
    n, d, _ = stack.shape
    g = np.full_like(stack, np.nan)
    ok = _condition(stack) <= cond_threshold
    if ok.any():
        inv = _hermitian_part(np.linalg.inv(stack[ok]))
        resid = np.abs(inv @ stack[ok] - np.eye(d)).max(axis=(-2, -1))
        good = resid <= RESIDUAL_TOL
        idx = np.flatnonzero(ok)
        ok[idx[~good]] = False
        g[idx[good]] = inv[good]
    return g, ok


def _invert_chunk(stack, ridge, cond_threshold):
    g, ok = _invert_stack(stack, cond_threshold)
    regularized = np.zeros(len(stack), dtype=bool)
    retry = np.flatnonzero(~ok)
    if len(retry) and ridge > 0:
        diag = np.diagonal(stack[retry], axis1=-2, axis2=-1).real
        # an all-zero diagonal has no scale to regularise with
        has_scale = diag.mean(axis=-1) > 0
        retry = retry[has_scale]
        if len(retry):
            g2, ok2 = _invert_stack(regularize(stack[retry], ridge), cond_threshold)
            g[retry[ok2]] = g2[ok2]
            ok[retry[ok2]] = True
            regularized[retry[ok2]] = True
    return g, ok, regularized


def invert_spectral_matrix(f: np.ndarray, ridge: float = 1e-8, cond_threshold: float = COND_THRESHOLD) -> np.ndarray:
    """Invert one Hermitian spectral matrix, ridging once if it is ill-conditioned.

    Raises
    ------
    SingularSpectrumError
        If the matrix is still too ill-conditioned after the ridge.
    """
    f = np.asarray(f, dtype=complex)
    if not np.allclose(f, np.conj(f.T), rtol=1e-10, atol=1e-12 * max(1.0, np.abs(f).max())):
        raise ValueError("spectral matrix is not Hermitian")
    g, ok, _ = _invert_chunk(f[None], ridge, cond_threshold)
    if not ok[0]:
        raise SingularSpectrumError(f"matrix is singular (condition number above {cond_threshold:g}) even after ridge {ridge:g}")
    return g[0]


@dataclass(frozen=True, eq=False)
class InverseField:
    """g(w) = f(w)^-1 per grid frequency, with per-frequency flag bits.

    ``flags == 0`` marks usable frequencies; the (0, 0) frequency always
    carries the DC bit. Flagged entries hold NaN.
    """

    values: np.ndarray
    grid: FrequencyGrid
    type_names: tuple[str, ...]
    flags: np.ndarray
    regularized: np.ndarray

    @property
    def usable(self) -> np.ndarray:
        return self.flags == 0

    def flag_counts(self) -> dict[str, int]:
        return {name: int(np.count_nonzero(self.flags & bit)) for bit, name in FLAG_NAMES.items()}


def invert_field(
    field: SpectralMatrixField,
    ridge: float = 1e-8,
    cond_threshold: float = COND_THRESHOLD,
    min_support: int | None = None,
    workers: int = 1,
) -> InverseField:
    """Invert the spectral matrix at every frequency of ``field``.

    Frequencies whose estimate averages fewer than ``min_support`` raw values
    (default: d) are rank deficient by construction and are flagged rather
    than inverted. The remaining frequencies are split into ``workers``
    contiguous chunks; each matrix is inverted independently, so the output
    does not depend on the split.
    """
    P, Q = field.grid.shape
    d = field.d
    flags = np.zeros((P, Q), dtype=np.int64)
    flags[field.grid.dc_index] |= DC
    if min_support is None:
        min_support = d
    if field.support is not None:
        flags[field.support < min_support] |= LOW_SUPPORT

    stack = field.values.reshape(P * Q, d, d)
    todo = np.flatnonzero(flags.ravel() == 0)
    g = np.full((P * Q, d, d), np.nan, dtype=complex)
    ok = np.zeros(P * Q, dtype=bool)
    reg = np.zeros(P * Q, dtype=bool)

    chunks = [c for c in np.array_split(todo, max(1, workers)) if len(c)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda c: _invert_chunk(stack[c], ridge, cond_threshold), chunks))
    else:
        results = [_invert_chunk(stack[c], ridge, cond_threshold) for c in chunks]
    for c, (gc, okc, regc) in zip(chunks, results):
        g[c] = gc
        ok[c] = okc
        reg[c] = regc

    flat_flags = flags.ravel()
    flat_flags[todo[~ok[todo]]] |= SINGULAR
    diag = np.diagonal(g, axis1=-2, axis2=-1).real
    bad_diag = ok & ~np.all(diag > 0, axis=-1)
    flat_flags[bad_diag] |= BAD_DIAGONAL
    g[flat_flags != 0] = np.nan
    return InverseField(g.reshape(P, Q, d, d), field.grid, field.type_names,
                        flat_flags.reshape(P, Q), reg.reshape(P, Q))


def _pair_diag(g: np.ndarray, i: int, j: int) -> tuple[float, float]:
    gii, gjj = g[i, i], g[j, j]
    if not (gii.real > 0 and gjj.real > 0):
        raise SingularSpectrumError(f"nonpositive inverse diagonal for pair ({i}, {j})")
    return gii.real, gjj.real


def rescaled_inverse(g: np.ndarray, i: int, j: int) -> complex:
    """g_ij / sqrt(g_ii g_jj); its modulus measures partial dependence of i and j."""
    g = np.asarray(g)
    gii, gjj = _pair_diag(g, i, j)
    return complex(g[i, j] / np.sqrt(gii * gjj))


def partial_coherence(g: np.ndarray, i: int, j: int) -> complex:
    """Partial coherence R_ij|rest from the inverse spectral matrix."""
    return -rescaled_inverse(g, i, j)


def ordinary_coherence(f: np.ndarray, i: int, j: int) -> float:
    """|f_ij|^2 / (f_ii f_jj)."""
    f = np.asarray(f)
    fii, fjj = f[i, i].real, f[j, j].real
    if not (fii > 0 and fjj > 0):
        raise SingularSpectrumError(f"zero auto-spectrum for pair ({i}, {j})")
    return float(abs(f[i, j]) ** 2 / (fii * fjj))


def _partialize(f: np.ndarray, i: int, j: int, ridge: float) -> np.ndarray:
    """2 x 2 block of residual spectra for (i, j) after removing all other components."""
    d = f.shape[0]
    if d < 2 or i == j or not (0 <= i < d and 0 <= j < d):
        raise ValueError("need two distinct components of a matrix with d >= 2")
    pair = [i, j]
    rest = [k for k in range(d) if k not in pair]
    f_pp = f[np.ix_(pair, pair)]
    if not rest:
        return f_pp
    f_rr = f[np.ix_(rest, rest)]
    f_pr = f[np.ix_(pair, rest)]
    f_rp = f[np.ix_(rest, pair)]
    try:
        rr_inv = invert_spectral_matrix(f_rr, ridge=ridge)
    except SingularSpectrumError as exc:
        raise SingularSpectrumError(f"conditioning block for pair ({i}, {j}) is singular") from exc
    return f_pp - f_pr @ rr_inv @ f_rp


def brillinger_partial_spectrum(f: np.ndarray, i: int, j: int, ridge: float = 1e-8) -> complex:
    """f_ij|rest = f_ij - f_i,rest f_rest,rest^-1 f_rest,j."""
    return complex(_partialize(np.asarray(f, dtype=complex), i, j, ridge)[0, 1])


def brillinger_partial_coherence(f: np.ndarray, i: int, j: int, ridge: float = 1e-8) -> complex:
    """Partial cross-spectrum normalised by the partialised auto-spectra."""
    s = _partialize(np.asarray(f, dtype=complex), i, j, ridge)
    sii, sjj = s[0, 0].real, s[1, 1].real
    if not (sii > 0 and sjj > 0):
        raise SingularSpectrumError(f"nonpositive partial auto-spectrum for pair ({i}, {j})")
    return complex(s[0, 1] / np.sqrt(sii * sjj))


@dataclass(frozen=True, eq=False)
class PartialDependenceField:
    """Rescaled inverse ``rescaled[ip, iq, i, j]`` per frequency; NaN where flagged."""

    rescaled: np.ndarray
    grid: FrequencyGrid
    type_names: tuple[str, ...]
    flags: np.ndarray

    @property
    def usable(self) -> np.ndarray:
        return self.flags == 0

    @property
    def partial_coherence(self) -> np.ndarray:
        return -self.rescaled

    @property
    def strength(self) -> np.ndarray:
        return np.abs(self.rescaled)


def partial_dependence(inverse: InverseField) -> PartialDependenceField:
    g = inverse.values
    diag = np.diagonal(g, axis1=-2, axis2=-1).real
    with np.errstate(invalid="ignore"):
        scale = np.sqrt(diag[..., :, None] * diag[..., None, :])
        rescaled = g / scale
    return PartialDependenceField(rescaled, inverse.grid, inverse.type_names, inverse.flags)


@dataclass(frozen=True, eq=False)
class EdgeStatisticMatrix:
    """Symmetric matrix of sup_w |d_ij(w)| over usable frequencies; unit diagonal."""

    values: np.ndarray
    type_names: tuple[str, ...]
    n_frequencies: int

    @property
    def d(self) -> int:
        return len(self.type_names)

    def __getitem__(self, ij) -> float:
        return float(self.values[ij])


def edge_statistics(field: PartialDependenceField) -> EdgeStatisticMatrix:
    usable = field.usable
    n = int(usable.sum())
    if n == 0:
        counts = {name: int(np.count_nonzero(field.flags & bit)) for bit, name in FLAG_NAMES.items()}
        raise EstimationError(f"every frequency is flagged ({field.flags.size} total; by reason {counts})")
    stat = np.max(field.strength[usable], axis=0)
    stat = np.maximum(stat, stat.T)
    np.fill_diagonal(stat, 1.0)
    return EdgeStatisticMatrix(stat, field.type_names, n)


def write_edge_statistics(stats: EdgeStatisticMatrix, sink, delimiter: str = ",") -> None:
    sink.write(delimiter.join(["type", *stats.type_names]) + "\n")
    for name, row in zip(stats.type_names, stats.values.tolist()):
        sink.write(delimiter.join([name, *(repr(v) for v in row)]) + "\n")


def write_partial(field: PartialDependenceField, sink, delimiter: str = ",") -> None:
    """One row per usable (p, q) and pair i < j with |d_ij|."""
    sink.write(delimiter.join(["p", "q", "i", "j", "abs_d"]) + "\n")
    d = len(field.type_names)
    strength = field.strength
    for ip, pv in enumerate(field.grid.p.tolist()):
        for iq, qv in enumerate(field.grid.q.tolist()):
            if field.flags[ip, iq]:
                continue
            for i in range(d):
                for j in range(i + 1, d):
                    sink.write(delimiter.join([str(pv), str(qv), str(i), str(j), repr(float(strength[ip, iq, i, j]))]) + "\n")
