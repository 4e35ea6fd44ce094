"""Orthogonal polynomial recurrence data, spectra, and regularity
diagnostics.

The package is organized around one loop: build recurrence coefficients
(from formulas, measures, or periodic generators), truncate to finite
matrices and diagonalize, compare the resulting spectral data against
potential-theoretic references (equilibrium measures, capacities,
isospectral tori), and track windowed Cesaro averages of coefficient
deviations as the window grows.  The ``opspectra`` command line runs
named end-to-end experiments; see ``opspectra list-scenarios``.
"""

from .measures import (CircleMeasureSpec, DensityPart, DiscreteMeasure,
                       LineMeasureSpec, discretize, gauss_rule,
                       jacobi_from_measure, trig_moments,
                       verblunsky_from_measure, verblunsky_from_moments)
from .periodic import (Discriminant, PeriodicJacobi, TorusPoint, bands,
                       d_to_torus, d_to_torus_batch, delta_of_J, discriminant,
                       dm_weights, normalize_type1, normalize_type3,
                       torus_point)
from .potential import (CircleArcSet, EquilibriumMeasure, FiniteGapSet,
                        capacity, eq_moment, equilibrium_measure, w1_distance)
from .regularity import (DEFAULT_LADDER, StatSeries, arc_stats, cn_stat_matrix,
                         cn_stat_matrix_invariant, cn_stat_oprl, cn_stat_opuc,
                         cn_stat_torus, cn_stat_windowed, cn_sq_stat_oprl, d_m,
                         lemma21_stats, root_test, trace_stat)
from .rng import SplitMix64
from .sequences import (BlockJacobiParams, JacobiParams, UnitaryChain,
                        VerblunskyParams, rayleigh_cesaro, sup_deviation,
                        validate_blocks, validate_jacobi)
from .spectra import (CmvMatrix, EmpiricalMeasure, TridiagonalMatrix,
                      block_dense, block_trace_square, cmv, eig_block,
                      eig_sym_tridiag, eig_unitary, trace_square, truncate,
                      zero_counting)

__version__ = "0.1.0"

__all__ = [
    "BlockJacobiParams", "CircleArcSet", "CircleMeasureSpec", "CmvMatrix",
    "DEFAULT_LADDER", "DensityPart", "DiscreteMeasure", "Discriminant",
    "EmpiricalMeasure", "EquilibriumMeasure", "FiniteGapSet", "JacobiParams",
    "LineMeasureSpec", "PeriodicJacobi", "SplitMix64", "StatSeries",
    "TorusPoint", "TridiagonalMatrix", "UnitaryChain", "VerblunskyParams",
    "arc_stats", "bands", "block_dense", "block_trace_square", "capacity",
    "cmv", "cn_sq_stat_oprl", "cn_stat_matrix", "cn_stat_matrix_invariant",
    "cn_stat_oprl", "cn_stat_opuc", "cn_stat_torus", "cn_stat_windowed",
    "d_m", "d_to_torus", "d_to_torus_batch", "delta_of_J", "discretize",
    "discriminant", "dm_weights", "eig_block", "eig_sym_tridiag",
    "eig_unitary", "eq_moment", "equilibrium_measure", "gauss_rule",
    "jacobi_from_measure", "lemma21_stats", "normalize_type1",
    "normalize_type3", "rayleigh_cesaro", "root_test", "sup_deviation",
    "torus_point", "trace_square", "trace_stat", "trig_moments", "truncate",
    "validate_blocks", "validate_jacobi", "verblunsky_from_measure",
    "verblunsky_from_moments", "w1_distance", "zero_counting",
]
