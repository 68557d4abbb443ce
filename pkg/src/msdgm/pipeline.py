"""End-to-end estimation: pattern -> spectra -> partial dependence -> graphs."""
from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import PatternError
from .graph import DependenceGraph, build_msdgm
from .partial import (EdgeStatisticMatrix, InverseField, PartialDependenceField, edge_statistics,
                      invert_field, partial_dependence)
from .pattern import MarkedPointPattern, demean_marks, filter_min_count, rescale_to_unit_square
from .smoothing import SmootherSpec, default_half_width, smooth_field
from .spectra import FrequencyGrid, SpectralMatrixField, compute_dft, assemble_periodogram_field

DEFAULT_THRESHOLDS = (0.3, 0.6, 0.9)


@dataclass(frozen=True)
class EstimationConfig:
    p_max: int = 16
    q_max: int = 16
    kernel: str = "uniform"
    bandwidth: int | None = None  # None: max(3, smallest admissible for d)
    ridge: float = 1e-8
    thresholds: tuple[float, ...] = DEFAULT_THRESHOLDS
    min_n: int = 1
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "thresholds", tuple(float(a) for a in self.thresholds))
        for a in self.thresholds:
            if not 0 < a < 1:
                raise ValueError(f"threshold {a} outside (0, 1)")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def smoother(self, d: int) -> SmootherSpec:
        h = default_half_width(d) if self.bandwidth is None else self.bandwidth
        spec = SmootherSpec(self.kernel, h, self.ridge)
        spec.validate(d)
        return spec


@dataclass(eq=False)
class AnalysisResult:
    pattern: MarkedPointPattern
    dropped: list[str]
    smoother: SmootherSpec
    raw: SpectralMatrixField
    smoothed: SpectralMatrixField
    inverse: InverseField
    partial: PartialDependenceField
    statistics: EdgeStatisticMatrix
    graphs: dict[float, DependenceGraph]
    timing: dict[str, float] = field(default_factory=dict)


def preprocess(pattern: MarkedPointPattern, min_n: int = 1) -> tuple[MarkedPointPattern, list[str]]:
    pattern, dropped = filter_min_count(pattern, min_n)
    return demean_marks(rescale_to_unit_square(pattern)), dropped


def analyze(pattern: MarkedPointPattern, config: EstimationConfig = EstimationConfig()) -> AnalysisResult:
    """Run the full estimation on a loaded pattern."""
    timing = {}
    t0 = time.perf_counter()
    pattern, dropped = preprocess(pattern, config.min_n)
    if pattern.d < 2:
        raise PatternError(f"need at least 2 types for a dependence graph, found {pattern.d}")
    if pattern.d == 2:
        warnings.warn("only 2 types: partial and ordinary coherence coincide (empty conditioning set)", stacklevel=2)
    singletons = [n for n, c in zip(pattern.type_names, pattern.counts) if c == 1]
    if singletons:
        warnings.warn(f"types with a single point have identically zero spectra: {singletons}", stacklevel=2)
    smoother = config.smoother(pattern.d)
    grid = FrequencyGrid(config.p_max, config.q_max)

    t = time.perf_counter()
    raw = assemble_periodogram_field(compute_dft(pattern, grid))
    timing["periodogram"] = time.perf_counter() - t
    t = time.perf_counter()
    smoothed = smooth_field(raw, smoother)
    timing["smoothing"] = time.perf_counter() - t
    t = time.perf_counter()
    inverse = invert_field(smoothed, ridge=smoother.ridge, workers=config.workers)
    partial = partial_dependence(inverse)
    stats = edge_statistics(partial)
    timing["inversion"] = time.perf_counter() - t
    graphs = {a: build_msdgm(stats, a) for a in config.thresholds}
    timing["total"] = time.perf_counter() - t0
    return AnalysisResult(pattern, dropped, smoother, raw, smoothed, inverse, partial, stats, graphs, timing)


def edge_statistic_matrix(pattern: MarkedPointPattern, config: EstimationConfig = EstimationConfig()) -> np.ndarray:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return analyze(pattern, config).statistics.values
