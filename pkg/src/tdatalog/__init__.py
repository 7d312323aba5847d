"""Fuzzy Datalog with existential rules and t-norm connectives."""
from .chase import (
    ChaseResult,
    StrategyConfig,
    Trigger,
    TraceStep,
    apply_trigger,
    check_k_model,
    enumerate_active_triggers,
    head_of,
    is_active,
    run_chase,
    trigger_target_degree,
)
from .degrees import LUK, MIN, PROD, TNorm, UnaryOp, tnorm_apply, tnorm_fold, unary_apply
from .errors import (
    ConfigError,
    ContractViolation,
    InvariantViolation,
    NotStratifiable,
    ParseError,
    TDatalogError,
    Undecided,
    ValidationError,
)
from .lang import (
    Atom,
    Literal,
    Program,
    Rule,
    Var,
    check_weak_acyclicity,
    compute_stratification,
    parse_atom,
    parse_dataset,
    parse_program,
)
from .model import (
    FuzzyDataset,
    FuzzyInterpretation,
    NullKey,
    allocate_null,
    body_degree,
    crispify,
    minimal_interpretation,
)
from .reason import EntailmentQuery, cq_entails, entails, evaluate_stratified

__version__ = "0.1.0"

__all__ = [
    "LUK",
    "MIN",
    "PROD",
    "TNorm",
    "UnaryOp",
    "tnorm_apply",
    "tnorm_fold",
    "unary_apply",
    "ChaseResult",
    "StrategyConfig",
    "Trigger",
    "TraceStep",
    "apply_trigger",
    "check_k_model",
    "enumerate_active_triggers",
    "head_of",
    "is_active",
    "run_chase",
    "trigger_target_degree",
    "ConfigError",
    "ContractViolation",
    "InvariantViolation",
    "NotStratifiable",
    "ParseError",
    "TDatalogError",
    "Undecided",
    "ValidationError",
    "Atom",
    "Literal",
    "Program",
    "Rule",
    "Var",
    "check_weak_acyclicity",
    "compute_stratification",
    "parse_atom",
    "parse_dataset",
    "parse_program",
    "FuzzyDataset",
    "FuzzyInterpretation",
    "NullKey",
    "allocate_null",
    "body_degree",
    "crispify",
    "minimal_interpretation",
    "EntailmentQuery",
    "cq_entails",
    "entails",
    "evaluate_stratified",
]
