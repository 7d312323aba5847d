"""Terms, atoms, rules and programs.

Constants are plain ``str`` values, variables are :class:`Var` and labelled
nulls are :class:`Null`; the three kinds are told apart by type alone.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Optional, Sequence, Tuple, Union

from ..degrees import MIN, TNorm, UnaryOp
from ..errors import ValidationError


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name

    def __lt__(self, other):
        return self.name < other.name


class Null:
    """A labelled null; create through :func:`tdatalog.model.allocate_null`."""

    __slots__ = ("key", "name", "_hash")

    def __init__(self, key, name: str):
        self.key = key
        self.name = name
        self._hash = hash(("null", name))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other or (isinstance(other, Null) and self.key == other.key)

    def __repr__(self):
        return f"Null({self.name})"

    def __str__(self):
        return self.name

    def __reduce__(self):
        from ..model import allocate_null
        return (allocate_null, (self.key,))


Term = Union[str, Var, Null]


def is_constant(t) -> bool:
    return type(t) is str


def term_key(t) -> tuple:
    """Total order on ground terms: constants before nulls."""
    if type(t) is str:
        return (0, t)
    if isinstance(t, Null):
        return (1, t.name)
    return (2, t.name)


class Atom(NamedTuple):
    predicate: str
    args: Tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def is_ground(self) -> bool:
        return not any(isinstance(a, Var) for a in self.args)

    def has_nulls(self) -> bool:
        return any(isinstance(a, Null) for a in self.args)

    def variables(self) -> Iterator[Var]:
        return (a for a in self.args if isinstance(a, Var))

    def sort_key(self):
        return (self.predicate, tuple(term_key(a) for a in self.args))

    def __str__(self):
        from .printer import format_atom
        return format_atom(self)

    def __repr__(self):
        return f"Atom({self!s})"


class Literal(NamedTuple):
    """A body atom, optionally preceded by a unary operator."""

    atom: Atom
    op: Optional[UnaryOp] = None


def _first_occurrence(atoms) -> tuple[Var, ...]:
    seen: dict[Var, None] = {}
    for atom in atoms:
        for a in atom.args:
            if isinstance(a, Var):
                seen.setdefault(a, None)
    return tuple(seen)


@dataclass(frozen=True)
class Rule:
    """``body -> exists existential_vars . head``.

    ``connective`` is a single t-norm for the whole body, or a tuple with one
    t-norm per adjacent pair of body literals (folded left to right).
    """

    id: int
    body: Tuple[Literal, ...]
    head: Atom
    connective: Union[TNorm, Tuple[TNorm, ...]] = MIN
    existential_vars: Tuple[Var, ...] = ()
    body_vars: Tuple[Var, ...] = field(init=False, repr=False, compare=False)
    frontier: Tuple[Var, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        body = tuple(lit if isinstance(lit, Literal) else Literal(*lit) for lit in self.body)
        object.__setattr__(self, "body", body)
        object.__setattr__(self, "existential_vars", tuple(self.existential_vars))
        if not isinstance(self.connective, TNorm):
            conns = tuple(self.connective)
            if conns and all(c == conns[0] for c in conns):
                conns = conns[0]
            object.__setattr__(self, "connective", conns)
        if len(body) == 1:
            # irrelevant for a single atom; normalised so printing round-trips
            object.__setattr__(self, "connective", MIN)
        object.__setattr__(self, "body_vars", _first_occurrence(lit.atom for lit in body))
        ex = set(self.existential_vars)
        object.__setattr__(
            self, "frontier", tuple(v for v in _first_occurrence([self.head]) if v not in ex))
        problems = self.problems()
        if problems:
            raise ValidationError(problems)

    def problems(self) -> list[str]:
        out = []
        if not self.body:
            out.append("rule body must contain at least one atom")
        if isinstance(self.connective, tuple):
            if len(self.connective) != max(len(self.body) - 1, 0):
                out.append("need exactly one connective between adjacent body atoms")
        bvars = set(self.body_vars)
        for v in self.existential_vars:
            if v in bvars:
                out.append(f"existential variable {v} also occurs in the body")
        if len(set(self.existential_vars)) != len(self.existential_vars):
            out.append("existential variable declared twice")
        for v in _first_occurrence([self.head]):
            if v not in bvars and v not in self.existential_vars:
                out.append(f"head variable {v} does not occur in the body")
        for v in self.existential_vars:
            if v not in self.head.args:
                out.append(f"existential variable {v} does not occur in the head")
        positive = {v for lit in self.body if lit.op is None for v in lit.atom.variables()}
        unsafe = _first_occurrence([lit.atom for lit in self.body if lit.op is not None])
        for v in unsafe:
            if v not in positive:
                out.append(f"unsafe variable {v}: it occurs under a unary operator "
                           "but in no plain body atom")
        if self.existential_vars and any(lit.op is not None for lit in self.body):
            out.append("unary operators cannot be combined with existential variables")
        for a in list(self.head.args) + [t for lit in self.body for t in lit.atom.args]:
            if isinstance(a, Null):
                out.append("rules may not mention nulls")
                break
        return out

    @property
    def has_unary_ops(self) -> bool:
        return any(lit.op is not None for lit in self.body)

    @property
    def connectives(self) -> Tuple[TNorm, ...]:
        if isinstance(self.connective, TNorm):
            return (self.connective,) * max(len(self.body) - 1, 0)
        return self.connective

    def with_id(self, new_id: int) -> "Rule":
        return Rule(new_id, self.body, self.head, self.connective, self.existential_vars)

    def __str__(self):
        from .printer import format_rule
        return format_rule(self)


@dataclass(frozen=True)
class Program:
    rules: Tuple[Rule, ...] = ()
    arities: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rules = tuple(self.rules)
        object.__setattr__(self, "rules", rules)
        arities: dict[str, int] = {}
        problems = []
        ids = set()
        for r in rules:
            if r.id in ids:
                problems.append(f"duplicate rule id {r.id}")
            ids.add(r.id)
            for atom in [r.head] + [lit.atom for lit in r.body]:
                n = arities.setdefault(atom.predicate, atom.arity)
                if n != atom.arity:
                    problems.append(
                        f"predicate {atom.predicate} used with arity {atom.arity}, "
                        f"expected {n}")
        if self.uses_unary_ops and self.uses_existentials:
            problems.append("unary operators cannot be combined with existential variables")
        if problems:
            raise ValidationError(problems)
        object.__setattr__(self, "arities", arities)

    @classmethod
    def of(cls, rules: Sequence[Rule]) -> "Program":
        """Build a program renumbering rule ids to their positions."""
        return cls(tuple(r.with_id(i) for i, r in enumerate(rules)))

    @property
    def uses_existentials(self) -> bool:
        return any(r.existential_vars for r in self.rules)

    @property
    def uses_unary_ops(self) -> bool:
        return any(r.has_unary_ops for r in self.rules)

    @property
    def fragment(self) -> str:
        if self.uses_unary_ops:
            return "t-Datalog^U"
        if self.uses_existentials:
            return "t-Datalog∃"
        return "t-Datalog"

    def idb(self) -> set[str]:
        return {r.head.predicate for r in self.rules}

    def edb(self) -> set[str]:
        heads = self.idb()
        return {p for p in self.arities if p not in heads}

    def rule(self, rule_id: int) -> Rule:
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise KeyError(rule_id)

    def subprogram(self, rules) -> "Program":
        return Program(tuple(rules))

    def extended(self, rule: Rule) -> "Program":
        next_id = max((r.id for r in self.rules), default=-1) + 1
        return Program(self.rules + (rule.with_id(next_id),))

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)

    def __str__(self):
        from .printer import format_program
        return format_program(self)
