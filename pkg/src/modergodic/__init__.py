"""Exact polynomial ergodic averages on the rotation Z/NZ, x -> x + 1."""

from .averages import (
    AverageReport,
    CorrelationProfile,
    DeviationResult,
    PkGoalReport,
    RefuseExhaustive,
    brute_force_average,
    conditional_inner,
    correlation_profile,
    max_deviation_exhaustive,
    max_deviation_sampled,
    pkgoal_check,
    polynomial_average,
)
from .bounds import (
    BoundReport,
    ComplexSignal,
    InapplicableBound,
    NormBoundReport,
    ThresholdReport,
    average_norm_check,
    expsum_bound_check,
    expsum_exact,
    expsum_literal,
    thresholds,
    weighted_linear_check,
)
from .combinatorics import (
    CounterexampleWitness,
    CoverageReport,
    NotFound,
    PairCountReport,
    WeilCountReport,
    brute_force_pair_count,
    construct_counterexample,
    coverage_check,
    pair_count,
    solution_count_three,
    sumset,
    trivial_disjoint_demo,
)
from .polynomials import (
    IntValuedPoly,
    NotIntegerValued,
    PolyParseError,
    eval_mod,
    image_histogram,
    iterated_difference,
    parse_and_validate,
)
from .ring import DomainError, Modulus, NotAUnit, Residue, factorize, legendre_symbol, mod_inverse
from .sets import ModulusMismatch, ResidueSet, SetParseError, parse_set

__version__ = "0.1.0"

__all__ = [
    "AverageReport",
    "CorrelationProfile",
    "DeviationResult",
    "PkGoalReport",
    "RefuseExhaustive",
    "brute_force_average",
    "conditional_inner",
    "correlation_profile",
    "max_deviation_exhaustive",
    "max_deviation_sampled",
    "pkgoal_check",
    "polynomial_average",
    "BoundReport",
    "ComplexSignal",
    "InapplicableBound",
    "NormBoundReport",
    "ThresholdReport",
    "average_norm_check",
    "expsum_bound_check",
    "expsum_exact",
    "expsum_literal",
    "thresholds",
    "weighted_linear_check",
    "CounterexampleWitness",
    "CoverageReport",
    "NotFound",
    "PairCountReport",
    "WeilCountReport",
    "brute_force_pair_count",
    "construct_counterexample",
    "coverage_check",
    "pair_count",
    "solution_count_three",
    "sumset",
    "trivial_disjoint_demo",
    "IntValuedPoly",
    "NotIntegerValued",
    "PolyParseError",
    "eval_mod",
    "image_histogram",
    "iterated_difference",
    "parse_and_validate",
    "DomainError",
    "Modulus",
    "NotAUnit",
    "Residue",
    "factorize",
    "legendre_symbol",
    "mod_inverse",
    "ModulusMismatch",
    "ResidueSet",
    "SetParseError",
    "parse_set",
]
