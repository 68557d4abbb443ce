"""Marked spatial dependence graph models for multi-type marked point patterns."""
from .errors import EstimationError, MsdgmError, PatternError, PreprocessingError
from .graph import (DependenceGraph, build_msdgm, connected_components, export_graph, from_json,
                    is_separator, neighborhood)
from .partial import (EdgeStatisticMatrix, InverseField, PartialDependenceField, brillinger_partial_coherence,
                      brillinger_partial_spectrum, edge_statistics, invert_field, invert_spectral_matrix,
                      ordinary_coherence, partial_coherence, partial_dependence, rescaled_inverse)
from .pattern import (ColumnSchema, MarkedPoint, MarkedPointPattern, Window, demean_marks, filter_min_count,
                      from_arrays, load_pattern, rescale_to_unit_square)
from .pipeline import AnalysisResult, EstimationConfig, analyze
from .simulate import Coupling, SimulationSpec, simulate, simulate_coupled_pair, simulate_independent
from .smoothing import SmootherSpec, regularize, smooth_field
from .spectra import (DftTable, FrequencyGrid, SpectralMatrixField, assemble_periodogram_field, auto_periodogram,
                      compute_dft, cross_periodogram)

__version__ = "0.1.0"
