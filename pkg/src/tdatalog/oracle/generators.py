"""Random desk-scale instances for differential testing.

All generators are driven by a ``random.Random`` so a seed reproduces an
instance exactly.  Degrees are drawn from {0.1, 0.2, ..., 1.0}.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from ..degrees import LUK, MIN, PROD, TNorm, UnaryOp
from ..errors import NotStratifiable
from ..lang.analysis import check_weak_acyclicity, count_topological_orders
from ..lang.printer import format_program
from ..lang.syntax import Atom, Literal, Program, Rule, Var
from ..model import FuzzyDataset

CONNECTIVES = (MIN, LUK, PROD, TNorm("ss", -1.0))
UNARY = (UnaryOp("neg"), UnaryOp("nneg"), UnaryOp("delta", 0.5))
DEGREES = tuple(k / 10 for k in range(1, 11))


@dataclass(frozen=True)
class Caps:
    constants: int = 6
    predicates: int = 4
    rules: int = 6
    body: int = 3
    facts: int = 14
    max_arity: int = 3


@dataclass(frozen=True)
class Instance:
    program: Program
    dataset: FuzzyDataset
    label: str = ""

    def texts(self) -> tuple[str, str]:
        return format_program(self.program), self.dataset.dump()


def _predicates(rng, caps):
    n = rng.randint(2, caps.predicates)
    arities = [rng.choice([a for a in (1, 2, 2, 3) if a <= caps.max_arity]) for _ in range(n)]
    return [(f"P{i}", a) for i, a in enumerate(arities)]


def _constants(rng, caps):
    return [f"c{i}" for i in range(rng.randint(1, caps.constants))]


def _atom(rng, pred, pool, consts, p_const=0.08):
    name, n = pred
    return Atom(name, tuple(rng.choice(consts) if rng.random() < p_const else rng.choice(pool)
                            for _ in range(n)))


def _rule(rng, preds, consts, caps, rid, existential=False, unary=False):
    pool = [Var(f"x{i}") for i in range(4)]
    k = rng.randint(1, caps.body)
    body = [Literal(_atom(rng, rng.choice(preds), pool, consts)) for _ in range(k)]
    bvars = sorted({v for lit in body for v in lit.atom.variables()}, key=lambda v: v.name)
    if unary and bvars:
        for _ in range(rng.randint(1, 2)):
            pred = rng.choice(preds)
            body.append(Literal(_atom(rng, pred, bvars, consts), rng.choice(UNARY)))
        rng.shuffle(body)
    head_pred = rng.choice(preds)
    ex_vars = []
    args = []
    for _ in range(head_pred[1]):
        if existential and (rng.random() < 0.4 or not bvars):
            z = Var(f"z{rng.randint(0, 1)}")
            if z not in ex_vars:
                ex_vars.append(z)
            args.append(z)
        elif bvars and rng.random() > 0.05:
            args.append(rng.choice(bvars))
        else:
            args.append(rng.choice(consts))
    conn = rng.choice(CONNECTIVES)
    return Rule(rid, tuple(body), Atom(head_pred[0], tuple(args)), conn, tuple(ex_vars))


def _dataset(rng, preds, consts, caps, all_ones=False):
    facts = {}
    for _ in range(rng.randint(1, caps.facts)):
        name, n = rng.choice(preds)
        atom = Atom(name, tuple(rng.choice(consts) for _ in range(n)))
        facts[atom] = 1.0 if all_ones else rng.choice(DEGREES)
    return FuzzyDataset(facts)


def random_datalog(rng: random.Random, caps: Caps = Caps(), all_ones: bool = False) -> Instance:
    """Program without existential variables or unary operators."""
    preds, consts = _predicates(rng, caps), _constants(rng, caps)
    rules = [_rule(rng, preds, consts, caps, i) for i in range(rng.randint(1, caps.rules))]
    return Instance(Program(tuple(rules)), _dataset(rng, preds, consts, caps, all_ones), "t-Datalog")


def random_weakly_acyclic(rng: random.Random, caps: Caps = Caps(), all_ones: bool = False,
                          p_existential: float = 0.5) -> Instance:
    """Weakly acyclic program in which some rules invent nulls."""
    while True:
        preds, consts = _predicates(rng, caps), _constants(rng, caps)
        rules = tuple(_rule(rng, preds, consts, caps, i, existential=rng.random() < p_existential)
                      for i in range(rng.randint(1, caps.rules)))
        prog = Program(rules)
        if check_weak_acyclicity(prog):
            return Instance(prog, _dataset(rng, preds, consts, caps, all_ones), prog.fragment)


def _layered_rule(rng, rid, head, plain, negatable, consts, caps, force_unary=False):
    pool = [Var(f"x{i}") for i in range(4)]
    body = [Literal(_atom(rng, rng.choice(plain), pool, consts))
            for _ in range(rng.randint(1, caps.body))]
    bvars = sorted({v for lit in body for v in lit.atom.variables()}, key=lambda v: v.name)
    if bvars and (force_unary or rng.random() < 0.5):
        for j in range(rng.randint(1, 2)):
            pred = negatable[0] if force_unary and j == 0 else rng.choice(negatable)
            body.append(Literal(_atom(rng, pred, bvars, consts), rng.choice(UNARY)))
        rng.shuffle(body)
    args = tuple(rng.choice(bvars) if bvars and rng.random() > 0.05 else rng.choice(consts)
                 for _ in range(head[1]))
    return Rule(rid, tuple(body), Atom(head[0], args), rng.choice(CONNECTIVES))


def random_stratified(rng: random.Random, caps: Caps = Caps(), min_orders: int = 2,
                      attempts: int = 50) -> Optional[Instance]:
    """Stratifiable program with a unary operator over a derived predicate.

    One extensional predicate ``P0``, two derived predicates ``P1`` and
    ``P2`` that never mention each other, and ``P3`` above both, reading at
    least one of them through a unary operator.  ``P1`` and ``P2`` can be
    evaluated in either order, so there are at least two stratification
    orders.  Returns ``None`` only if ``attempts`` candidates were rejected.
    """
    if caps.predicates < 4 or caps.rules < 3:
        raise ValueError("stratified instances need at least 4 predicates and 3 rules")
    for _ in range(attempts):
        arities = [rng.choice([a for a in (1, 2, 2, 3) if a <= caps.max_arity]) for _ in range(4)]
        edb, low1, low2, top = preds = [(f"P{i}", a) for i, a in enumerate(arities)]
        consts = _constants(rng, caps)
        heads = [low1, low2, top] + [rng.choice((low1, low2, top))
                                     for _ in range(rng.randint(0, caps.rules - 3))]
        rules = []
        for rid, head in enumerate(heads):
            if head is top:
                plain, negatable = [edb, low1, low2, top], [rng.choice((low1, low2)), edb]
            else:
                plain, negatable = [edb, head], [edb]
            rules.append(_layered_rule(rng, rid, head, plain, negatable, consts, caps,
                                       force_unary=rid == 2))
        prog = Program(tuple(rules))
        try:
            if count_topological_orders(prog, cap=min_orders) < min_orders:
                continue
        except NotStratifiable:  # pragma: no cover - excluded by construction
            continue
        if not any(lit.op is not None and lit.atom.predicate in prog.idb()
                   for r in rules for lit in r.body):
            continue
        return Instance(prog, _dataset(rng, preds, consts, caps), "t-Datalog^U")
    return None
