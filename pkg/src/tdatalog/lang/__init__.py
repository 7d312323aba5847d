"""Syntax, parsing, printing and static analysis of t-Datalog programs."""
from .analysis import (
    Edge,
    StratificationResult,
    WeakAcyclicity,
    alternative_stratifications,
    check_weak_acyclicity,
    compute_stratification,
    is_semipositive,
    is_stratifiable,
)
from .parser import parse_atom, parse_dataset, parse_program, tokenize
from .printer import format_atom, format_fact, format_program, format_rule
from .syntax import Atom, Literal, Null, Program, Rule, Var, is_constant, term_key

__all__ = [
    "Atom", "Literal", "Null", "Program", "Rule", "Var", "is_constant", "term_key",
    "parse_program", "parse_dataset", "parse_atom", "tokenize",
    "format_atom", "format_fact", "format_program", "format_rule",
    "Edge", "WeakAcyclicity", "check_weak_acyclicity",
    "StratificationResult", "compute_stratification", "alternative_stratifications",
    "is_stratifiable", "is_semipositive",
]
