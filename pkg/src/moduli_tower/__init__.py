"""Exact combinatorics of the weighted moduli spaces M_{0,n.eps} and (P^1)^n // SL(2).

Everything is computed with integers and :class:`fractions.Fraction`.
"""

__version__ = "0.1.0"

from .core import (
    AffineAlpha,
    Level,
    MarkedSubset,
    ModuliError,
    canonicalize_subset,
    eps,
    parse_rational,
)
from .divisors import (
    DivisorClass,
    PicardBasis,
    a_alpha_class,
    boundary_class,
    canonical_class,
    picard_basis,
    pullback_step,
    pullback_to_top,
    pushforward_step,
    symmetric_class,
    verify_basis_rank,
)
from .fcurves import FCurve, enumerate_fcurves, pair_boundary, pair_class, vital_curve
from .git_stability import CoincidencePattern, Stability, classify_pattern, count_singular_points, descends
from .hassett_trees import CombCurveType, WeightData, enumerate_stable_types, is_stable_type, reduce_type
from .nef import NefReport, ak_alpha_table, fnef_threshold, simpson_model
from .tower import blowup_center_description, quotient_ledger, schedule, stability_transitions

__all__ = [
    "AffineAlpha",
    "CoincidencePattern",
    "CombCurveType",
    "DivisorClass",
    "FCurve",
    "Level",
    "MarkedSubset",
    "ModuliError",
    "NefReport",
    "PicardBasis",
    "Stability",
    "WeightData",
    "a_alpha_class",
    "ak_alpha_table",
    "blowup_center_description",
    "boundary_class",
    "canonical_class",
    "canonicalize_subset",
    "classify_pattern",
    "count_singular_points",
    "descends",
    "enumerate_fcurves",
    "enumerate_stable_types",
    "eps",
    "fnef_threshold",
    "is_stable_type",
    "pair_boundary",
    "pair_class",
    "parse_rational",
    "picard_basis",
    "pullback_step",
    "pullback_to_top",
    "pushforward_step",
    "quotient_ledger",
    "reduce_type",
    "schedule",
    "simpson_model",
    "stability_transitions",
    "symmetric_class",
    "verify_basis_rank",
    "vital_curve",
]
