"""Signal temporal logic: predicates, formulas, parser and robustness."""

from .formula import (
    Always,
    And,
    Atom,
    Eventually,
    Not,
    StlFormula,
    TrueF,
    Until,
    horizon,
    is_temporal,
    leaves,
    to_text,
)
from .parser import StlParseError, UnknownPredicateError, parse_formula
from .predicates import Predicate, SingularityError, eval_predicate
from .robustness import (
    EmptyWindowError,
    InsufficientHorizonError,
    RobustnessValue,
    SampledTrace,
    TemporalFormulaError,
    active_leaf,
    eval_robustness,
    robustness_gradient,
    robustness_signal,
    static_robustness,
)

__all__ = [
    "Always", "And", "Atom", "Eventually", "Not", "StlFormula", "TrueF", "Until",
    "horizon", "is_temporal", "leaves", "to_text",
    "StlParseError", "UnknownPredicateError", "parse_formula",
    "Predicate", "SingularityError", "eval_predicate",
    "EmptyWindowError", "InsufficientHorizonError", "RobustnessValue", "SampledTrace", "TemporalFormulaError",
    "active_leaf", "eval_robustness", "robustness_gradient", "robustness_signal",
    "static_robustness",
]
