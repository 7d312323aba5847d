"""Semi-oblivious chase over Boolean facts."""
from __future__ import annotations

from typing import Iterable, Optional

from ..errors import ContractViolation, Undecided
from ..lang.syntax import Atom, Program
from ..model import NullKey, allocate_null
from .fixpoint import matches, substitute

DEFAULT_MAX_STEPS = 100_000


def classical_chase(program: Program, atoms: Iterable[Atom],
                    max_steps: Optional[int] = None) -> set[Atom]:
    """Apply each (rule, frontier binding) once until nothing new appears.

    Nulls come from :func:`allocate_null`, so the result names them exactly
    as the fuzzy chase does.  Raises :class:`Undecided` after ``max_steps``
    rule applications.
    """
    if program.uses_unary_ops:
        raise ContractViolation("unary operators have no classical counterpart here")
    cap = DEFAULT_MAX_STEPS if max_steps is None else max_steps
    facts = set(atoms)
    applied = set()
    steps = 0
    changed = True
    while changed:
        changed = False
        by_pred: dict = {}
        for a in facts:
            by_pred.setdefault(a.predicate, []).append(a)
        for rule in program.rules:
            names = sorted(v.name for v in rule.frontier)
            for b in matches(by_pred, [lit.atom for lit in rule.body], {}):
                by_name = {v.name: t for v, t in b.items()}
                frontier = tuple((n, by_name[n]) for n in names)
                if (rule.id, frontier) in applied:
                    continue
                if steps >= cap:
                    raise Undecided(f"classical chase exceeded {cap} steps")
                steps += 1
                applied.add((rule.id, frontier))
                full = dict(b)
                for z in rule.existential_vars:
                    full[z] = allocate_null(NullKey(rule.id, z.name, frontier))
                head = substitute(rule.head, full)
                if head not in facts:
                    facts.add(head)
                    changed = True
    return facts
