"""Entailment, conjunctive-query goals and stratified evaluation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .chase import (
    COMPLETED,
    ChaseResult,
    StrategyConfig,
    _Engine,
    enumerate_active_triggers,
    step_cap,
)
from .degrees import MIN, TNorm, degree
from .errors import ConfigError, ContractViolation, InvariantViolation, Undecided
from .lang.analysis import StratificationResult, compute_stratification
from .lang.syntax import Atom, Literal, Program, Rule
from .model import FuzzyInterpretation, minimal_interpretation

__all__ = [
    "EntailmentQuery",
    "Entailment",
    "entails",
    "entails_all_ones_classical_agreement",
    "cq_entails",
    "evaluate_stratified",
    "StratifiedRun",
    "run_stratified",
]


@dataclass(frozen=True)
class EntailmentQuery:
    goal: Atom
    c: float = 1.0
    K: float = 1.0

    def __post_init__(self):
        if not self.goal.is_ground() or self.goal.has_nulls():
            raise ContractViolation(f"goal {self.goal} must be ground over constants")
        object.__setattr__(self, "c", degree(self.c))
        object.__setattr__(self, "K", degree(self.K))


@dataclass(frozen=True)
class Entailment:
    answer: bool
    degree: float
    interpretation: FuzzyInterpretation

    def __bool__(self):
        return self.answer


def _default_config(K: float, config: Optional[StrategyConfig]) -> StrategyConfig:
    if config is None:
        return StrategyConfig(activity="r", order="greedy", K=K)
    return config.with_(K=K)


def entails(program: Program, dataset, query: EntailmentQuery,
            config: Optional[StrategyConfig] = None) -> Entailment:
    """Decide whether every K-model gives the goal degree at least ``c``.

    The goal's degree in the chase result is its degree in the universal
    model, so the answer is read off one completed chase.  Programs with
    unary operators are evaluated stratum by stratum (K must be 1).
    """
    if program.uses_unary_ops:
        if query.K != 1.0:
            raise ConfigError("programs with unary operators are evaluated at K = 1 only")
        interp = evaluate_stratified(program, dataset)
    else:
        from .chase import run_chase

        result = run_chase(program, dataset, _default_config(query.K, config))
        if result.status != COMPLETED:
            raise Undecided(
                f"chase stopped after {result.steps} steps with active triggers left; "
                "entailment is undecided (raise --max-steps or check termination)")
        interp = result.interpretation
    d = interp[query.goal]
    return Entailment(d >= query.c, d, interp)


def entails_all_ones_classical_agreement(program: Program, dataset, goal: Atom,
                                         max_steps: Optional[int] = None) -> bool:
    """Fuzzy entailment at c = K = 1 on crisp data, cross-checked classically."""
    from .oracle.classical import classical_chase

    if any(d != 1.0 for d in dataset.values()):
        raise ContractViolation("every dataset degree must be 1")
    cfg = StrategyConfig(max_steps=max_steps)
    fuzzy = entails(program, dataset, EntailmentQuery(goal, 1.0, 1.0), cfg).answer
    classical = goal in classical_chase(program, set(dataset), max_steps=max_steps)
    if fuzzy != classical:
        raise InvariantViolation(
            f"goal {goal}: fuzzy entailment says {fuzzy}, classical chase says {classical}")
    return fuzzy


def _fresh_goal(program: Program) -> str:
    name, i = "Goal", 0
    while name in program.arities:
        i += 1
        name = f"Goal_{i}"
    return name


def cq_entails(program: Program, dataset, body: Sequence, connective: TNorm = MIN,
               c: float = 1.0, K: float = 1.0,
               config: Optional[StrategyConfig] = None) -> Entailment:
    """Entailment of ``∃x̄ body`` through a fresh 0-ary goal rule."""
    goal = Atom(_fresh_goal(program), ())
    lits = tuple(b if isinstance(b, Literal) else Literal(b) for b in body)
    prog = program.extended(Rule(0, lits, goal, connective))
    return entails(prog, dataset, EntailmentQuery(goal, c, K), config)


@dataclass
class StratifiedRun:
    stratification: StratificationResult
    interpretation: FuzzyInterpretation
    results: list  # one ChaseResult per stratum


def run_stratified(program: Program, dataset, stratification: Optional[StratificationResult] = None,
                   K: float = 1.0, check_fixpoint: bool = True,
                   max_steps: Optional[int] = None) -> StratifiedRun:
    """Greedy chase each stratum on the previous stratum's result.

    Lower strata are never written again, so unary operators over their
    predicates read final degrees.  With ``check_fixpoint`` no rule of the
    strata evaluated so far may have an active trigger after each stratum.
    """
    if K != 1.0:
        raise ConfigError("stratified evaluation is defined for K = 1 only")
    strat = stratification if stratification is not None else compute_stratification(program)
    if isinstance(dataset, FuzzyInterpretation):
        interp = dataset.copy()
    else:
        interp = minimal_interpretation(dataset)
    config = StrategyConfig(activity="r", order="greedy", max_steps=max_steps)
    done: list[Rule] = []
    results: list[ChaseResult] = []
    for i, rules in enumerate(strat.strata, start=1):
        prog = Program(tuple(rules))
        res = _Engine(prog, config).run(interp, step_cap(prog, interp, config))
        if res.status != COMPLETED:
            raise Undecided(f"stratum {i} did not complete within {res.steps} steps")
        results.append(res)
        done.extend(rules)
        if check_fixpoint:
            left = enumerate_active_triggers(interp, Program(tuple(done)), config)
            if left:
                raise InvariantViolation(
                    f"after stratum {i}, {len(left)} trigger(s) remain active, e.g. {left[0]}")
    return StratifiedRun(strat, interp, results)


def evaluate_stratified(program: Program, dataset,
                        stratification: Optional[StratificationResult] = None,
                        K: float = 1.0) -> FuzzyInterpretation:
    """Semantics of a stratifiable program with unary operators."""
    return run_stratified(program, dataset, stratification, K).interpretation
