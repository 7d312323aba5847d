"""Round-based least fixpoint for programs without existential variables.

Every round evaluates all groundings against a frozen copy of the previous
round's interpretation (Jacobi style) with a plain nested-loop join, so no
scheduling or indexing code is shared with the chase engine.
"""
from __future__ import annotations

import math

from ..degrees import tnorm_fold
from ..errors import ContractViolation, InvariantViolation
from ..lang.syntax import Atom, Program, Var
from ..model import FuzzyInterpretation


def matches(by_pred: dict, atoms, binding: dict):
    """All extensions of ``binding`` mapping every atom into ``by_pred``."""
    if not atoms:
        yield binding
        return
    first, rest = atoms[0], atoms[1:]
    for cand in by_pred.get(first.predicate, ()):
        b = dict(binding)
        for a, t in zip(first.args, cand.args):
            if isinstance(a, Var):
                if b.setdefault(a, t) != t:
                    break
            elif a != t:
                break
        else:
            yield from matches(by_pred, rest, b)


def substitute(atom: Atom, binding: dict) -> Atom:
    return Atom(atom.predicate, tuple(binding.get(a, a) if isinstance(a, Var) else a
                                      for a in atom.args))


def _group(degrees: dict) -> dict:
    out: dict = {}
    for a in degrees:
        out.setdefault(a.predicate, []).append(a)
    return out


def round_cap(program: Program, degrees) -> int:
    """Number of ground head atoms over the active domain, plus one."""
    dom = {t for a in degrees for t in a.args}
    for r in program.rules:
        for lit in r.body:
            dom.update(t for t in lit.atom.args if not isinstance(t, Var))
        dom.update(t for t in r.head.args if not isinstance(t, Var))
    n = len(dom)
    return sum(n ** program.arities[p] for p in program.idb()) + 1


def naive_fixpoint(program: Program, dataset, K: float = 1.0) -> FuzzyInterpretation:
    if program.uses_existentials:
        raise ContractViolation("the fixpoint oracle handles programs without existential variables")
    idb = program.idb()
    for r in program.rules:
        for lit in r.body:
            if lit.op is not None and lit.atom.predicate in idb:
                raise ContractViolation("unary operators are only allowed on extensional predicates")
    cur = {a: d for a, d in dataset.items() if d > 0.0}
    cap = round_cap(program, cur)
    for _ in range(cap):
        snap = dict(cur)
        by_pred = _group(snap)
        changed = False
        for rule in program.rules:
            plain = [lit.atom for lit in rule.body if lit.op is None]
            for b in matches(by_pred, plain, {}):
                degs = []
                for lit in rule.body:
                    d = snap.get(substitute(lit.atom, b), 0.0)
                    degs.append(lit.op(d) if lit.op is not None else d)
                target = max(0.0, math.fsum((tnorm_fold(rule.connective, degs), K, -1.0)))
                head = substitute(rule.head, b)
                if target > cur.get(head, 0.0):
                    cur[head] = target
                    changed = True
        if not changed:
            return FuzzyInterpretation(cur)
    raise InvariantViolation(f"fixpoint not reached within {cap} rounds")
