"""Fourier transform of marked locations and the marked periodogram matrix field."""
from __future__ import annotations

from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .errors import PreprocessingError
from .pattern import MarkedPointPattern


@dataclass(frozen=True)
class FrequencyGrid:
    """Half-plane integer lattice p = 0..p_max, q = -q_max..q_max-1.

    Arrays indexed by the grid have shape ``(len(p), len(q))``; the
    ``[ip, iq]`` entry belongs to ``(p[ip], q[iq])``.
    """

    p_max: int = 16
    q_max: int = 16

    def __post_init__(self):
        if self.p_max < 0 or self.q_max < 1:
            raise ValueError("need p_max >= 0 and q_max >= 1")

    @property
    def p(self) -> np.ndarray:
        return np.arange(0, self.p_max + 1)

    @property
    def q(self) -> np.ndarray:
        return np.arange(-self.q_max, self.q_max)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.p_max + 1, 2 * self.q_max)

    @property
    def size(self) -> int:
        return (self.p_max + 1) * 2 * self.q_max

    @property
    def lattice(self) -> list[tuple[int, int]]:
        return [(int(p), int(q)) for p in self.p for q in self.q]

    @property
    def dc_index(self) -> tuple[int, int]:
        """Array index of the (0, 0) frequency."""
        return (0, self.q_max)

    def angular(self) -> tuple[np.ndarray, np.ndarray]:
        """Angular frequencies (2 pi p, 2 pi q) on the grid, for unit-square data."""
        pp, qq = np.meshgrid(self.p, self.q, indexing="ij")
        return 2 * np.pi * pp, 2 * np.pi * qq

    def index(self, p: int, q: int) -> tuple[int, int]:
        if not (0 <= p <= self.p_max and -self.q_max <= q < self.q_max):
            raise KeyError(f"({p}, {q}) is not on the grid")
        return (p, q + self.q_max)


@dataclass(frozen=True, eq=False)
class DftTable:
    """``values[i, ip, iq]`` is F_i at grid position (ip, iq)."""

    values: np.ndarray
    grid: FrequencyGrid
    type_names: tuple[str, ...]

    @property
    def d(self) -> int:
        return self.values.shape[0]

    def __call__(self, i: int, p: int, q: int) -> complex:
        return complex(self.values[(i, *self.grid.index(p, q))])

    def _check(self, i: int) -> None:
        if not 0 <= i < self.d:
            raise KeyError(f"unknown type id {i}")


@dataclass(frozen=True, eq=False)
class SpectralMatrixField:
    """A d x d Hermitian matrix per grid frequency, ``values[ip, iq, i, j]``.

    ``support`` counts how many raw lattice values went into each entry
    (1 everywhere for a raw periodogram).
    """

    values: np.ndarray
    grid: FrequencyGrid
    type_names: tuple[str, ...]
    smoothed: bool = False
    support: np.ndarray | None = None

    @property
    def d(self) -> int:
        return self.values.shape[-1]

    def at(self, p: int, q: int) -> np.ndarray:
        return self.values[self.grid.index(p, q)]

    def co_spectrum(self, i: int, j: int) -> np.ndarray:
        return self.values[..., i, j].real

    def quadrature_spectrum(self, i: int, j: int) -> np.ndarray:
        return -self.values[..., i, j].imag


def _phases(coord: np.ndarray, freqs: np.ndarray) -> np.ndarray:
    return np.exp(-2j * np.pi * np.outer(coord, freqs))


def compute_dft(pattern: MarkedPointPattern, grid: FrequencyGrid = FrequencyGrid()) -> DftTable:
    """F_i(p, q) = sum over type-i points of mark * exp(-2 pi i (p x + q y)).

    The exponential factorises into an x part and a y part, so each type costs
    one (p x n) @ (n x q) product.
    """
    if not pattern.rescaled:
        raise PreprocessingError("pattern must be rescaled to the unit square first (rescale_to_unit_square)")
    if not pattern.demeaned:
        raise PreprocessingError("marks must be demeaned first (demean_marks)")
    out = np.zeros((pattern.d, *grid.shape), dtype=complex)
    p, q = grid.p, grid.q
    for i in range(pattern.d):
        sel = pattern.select(i)
        ex = _phases(pattern.x[sel], p) * pattern.marks[sel][:, None]
        ey = _phases(pattern.y[sel], q)
        out[i] = ex.T @ ey
    return DftTable(out, grid, pattern.type_names)


def auto_periodogram(table: DftTable, i: int) -> np.ndarray:
    table._check(i)
    F = table.values[i]
    return F.real * F.real + F.imag * F.imag


def cross_periodogram(table: DftTable, i: int, j: int) -> np.ndarray:
    table._check(i)
    table._check(j)
    if i == j:
        return auto_periodogram(table, i).astype(complex)
    if i > j:
        # mirror the upper triangle so conjugate symmetry holds bit for bit
        return np.conj(table.values[j] * np.conj(table.values[i]))
    return table.values[i] * np.conj(table.values[j])


def assemble_periodogram_field(table: DftTable) -> SpectralMatrixField:
    """Stack all auto- and cross-periodograms: F(w) F(w)^H at every frequency."""
    F = np.moveaxis(table.values, 0, -1)
    M = F[..., :, None] * np.conj(F[..., None, :])
    rows, cols = np.triu_indices(table.d, 1)
    M[..., cols, rows] = np.conj(M[..., rows, cols])
    idx = np.arange(table.d)
    M[..., idx, idx] = F.real * F.real + F.imag * F.imag
    return SpectralMatrixField(M, table.grid, table.type_names, smoothed=False,
                               support=np.ones(table.grid.shape, dtype=np.int64))


def periodogram_field(pattern: MarkedPointPattern, grid: FrequencyGrid = FrequencyGrid()) -> SpectralMatrixField:
    return assemble_periodogram_field(compute_dft(pattern, grid))


def write_field(field: SpectralMatrixField, sink: TextIO, delimiter: str = ",") -> None:
    """One row per (p, q, i, j) with the real and imaginary parts of the entry."""
    sink.write(delimiter.join(["p", "q", "i", "j", "real", "imag"]) + "\n")
    p, q = field.grid.p, field.grid.q
    d = field.d
    for ip, pv in enumerate(p.tolist()):
        for iq, qv in enumerate(q.tolist()):
            mat = field.values[ip, iq]
            for i in range(d):
                for j in range(d):
                    z = mat[i, j]
                    sink.write(delimiter.join([str(pv), str(qv), str(i), str(j), repr(float(z.real)), repr(float(z.imag))]) + "\n")
