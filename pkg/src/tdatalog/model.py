"""Fuzzy datasets, fuzzy interpretations and deterministic null allocation."""
from __future__ import annotations

import hashlib
import json
from collections.abc import Mapping
from typing import Iterable, Iterator, NamedTuple, Optional, Union

from .degrees import degree, tnorm_fold
from .errors import DegreeError, ValidationError
from .lang.printer import format_atom, format_degree
from .lang.syntax import Atom, Null, Var

__all__ = [
    "FuzzyDataset",
    "FuzzyInterpretation",
    "NullKey",
    "allocate_null",
    "minimal_interpretation",
    "body_degree",
    "crispify",
    "ground",
]


class NullKey(NamedTuple):
    """Identity of the null invented for ``variable`` by ``rule_id``.

    ``frontier`` is the frontier binding as ``(var_name, term)`` pairs sorted
    by variable name.
    """

    rule_id: int
    variable: str
    frontier: tuple


_NULLS: dict[NullKey, Null] = {}


def _canonical(t) -> str:
    if isinstance(t, Null):
        return t.name
    return json.dumps(t)


def allocate_null(key: NullKey) -> Null:
    """Return the interned null for ``key``; equal keys give the same object."""
    null = _NULLS.get(key)
    if null is None:
        key = NullKey(key.rule_id, key.variable, tuple(key.frontier))
        payload = ",".join(f"{v}={_canonical(t)}" for v, t in key.frontier)
        digest = hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]
        null = Null(key, f"_:r{key.rule_id}.{key.variable}.{digest}")
        _NULLS[key] = null
    return null


def ground(atom: Atom, binding: Mapping) -> Atom:
    return Atom(atom.predicate,
                tuple(binding[a] if isinstance(a, Var) else a for a in atom.args))


class FuzzyDataset(Mapping):
    """Finite map from ground atoms over constants to degrees in (0, 1]."""

    __slots__ = ("_facts",)

    def __init__(self, facts: Union[Mapping, Iterable, None] = None):
        items = facts.items() if isinstance(facts, Mapping) else (facts or ())
        out: dict[Atom, float] = {}
        arities: dict[str, int] = {}
        problems = []
        for atom, d in items:
            atom = Atom(atom.predicate, tuple(atom.args))
            if not atom.is_ground() or atom.has_nulls():
                problems.append(f"{atom}: facts must be ground and mention constants only")
                continue
            try:
                d = degree(d)
            except DegreeError as exc:
                problems.append(f"{atom}: {exc}")
                continue
            if d == 0.0:
                problems.append(f"{atom}: degree must lie in (0, 1]")
                continue
            n = arities.setdefault(atom.predicate, atom.arity)
            if n != atom.arity:
                problems.append(f"{atom}: arity mismatch for {atom.predicate}, expected {n}")
                continue
            if atom in out:
                problems.append(f"duplicate fact {atom}")
                continue
            out[atom] = d
        if problems:
            raise ValidationError(problems)
        self._facts = out

    def __getitem__(self, atom):
        return self._facts[atom]

    def __iter__(self):
        return iter(self._facts)

    def __len__(self):
        return len(self._facts)

    def __repr__(self):
        return f"FuzzyDataset({len(self)} facts)"

    def __eq__(self, other):
        if isinstance(other, FuzzyDataset):
            return self._facts == other._facts
        return NotImplemented

    __hash__ = None

    @property
    def arities(self) -> dict[str, int]:
        return {a.predicate: a.arity for a in self._facts}

    def union(self, other: "FuzzyDataset") -> "FuzzyDataset":
        """Union of two datasets; a fact present in both is an error."""
        return FuzzyDataset(list(self.items()) + list(other.items()))

    def dump(self) -> str:
        lines = [f"{d!r} :: {format_atom(a)}."
                 for a, d in sorted(self.items(), key=lambda kv: kv[0].sort_key())]
        return "\n".join(lines) + ("\n" if lines else "")


def crispify(dataset: FuzzyDataset) -> FuzzyDataset:
    """Same atoms, every degree raised to 1."""
    return FuzzyDataset({a: 1.0 for a in dataset})


class FuzzyInterpretation:
    """Total map from ground atoms to degrees, stored as its finite support.

    Lookups of atoms outside the support return 0.  Indexes by predicate and
    by (predicate, position, term) serve the join in the chase.
    """

    __slots__ = ("_deg", "_by_pred", "_by_arg")

    def __init__(self, facts: Optional[Mapping] = None):
        self._deg: dict[Atom, float] = {}
        self._by_pred: dict[str, dict[Atom, None]] = {}
        self._by_arg: dict[tuple, dict[Atom, None]] = {}
        if facts:
            for atom, d in facts.items():
                self[atom] = d

    def __getitem__(self, atom: Atom) -> float:
        return self._deg.get(atom, 0.0)

    get = __getitem__

    def __setitem__(self, atom: Atom, d: float) -> None:
        if d == 0.0:
            self._discard(atom)
            return
        if atom not in self._deg:
            self._by_pred.setdefault(atom.predicate, {})[atom] = None
            by_arg = self._by_arg
            p = atom.predicate
            for i, t in enumerate(atom.args):
                by_arg.setdefault((p, i, t), {})[atom] = None
        self._deg[atom] = d

    def _discard(self, atom: Atom) -> None:
        if self._deg.pop(atom, None) is None:
            return
        del self._by_pred[atom.predicate][atom]
        for i, t in enumerate(atom.args):
            del self._by_arg[(atom.predicate, i, t)][atom]

    def __contains__(self, atom) -> bool:
        return atom in self._deg

    def __iter__(self) -> Iterator[Atom]:
        return iter(self._deg)

    def __len__(self) -> int:
        return len(self._deg)

    def items(self):
        return self._deg.items()

    def support(self) -> dict[Atom, float]:
        return dict(self._deg)

    def atoms(self, predicate: Optional[str] = None):
        if predicate is None:
            return self._deg.keys()
        return self._by_pred.get(predicate, {}).keys()

    def lookup(self, predicate: str, bound: Mapping[int, object]):
        """Support atoms of ``predicate`` with the given terms at positions."""
        if not bound:
            return self._by_pred.get(predicate, {}).keys()
        best = None
        for i, t in bound.items():
            cand = self._by_arg.get((predicate, i, t))
            if not cand:
                return ()
            if best is None or len(cand) < len(best):
                best = cand
        if len(bound) == 1:
            return best.keys()
        return [a for a in best if all(a.args[i] == t for i, t in bound.items())]

    def copy(self) -> "FuzzyInterpretation":
        new = FuzzyInterpretation()
        new._deg = dict(self._deg)
        new._by_pred = {k: dict(v) for k, v in self._by_pred.items()}
        new._by_arg = {k: dict(v) for k, v in self._by_arg.items()}
        return new

    snapshot = copy

    def active_domain(self) -> set:
        return {t for a in self._deg for t in a.args}

    def nulls(self) -> set:
        return {t for a in self._deg for t in a.args if isinstance(t, Null)}

    def dominates(self, other) -> bool:
        """True iff ``self(A) >= other(A)`` for every atom ``A``."""
        return all(self[a] >= d for a, d in other.items())

    def __eq__(self, other):
        if isinstance(other, FuzzyInterpretation):
            return self._deg == other._deg
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        return f"FuzzyInterpretation({len(self)} atoms)"

    def sorted_items(self):
        return sorted(self._deg.items(), key=lambda kv: kv[0].sort_key())

    def dump(self, places: Optional[int] = 6) -> str:
        """``DEGREE :: Atom.`` lines sorted by predicate and arguments.

        ``places=None`` prints the shortest round-trip representation.
        """
        lines = []
        for atom, d in self.sorted_items():
            deg = repr(d) if places is None else format_degree(d, places)
            lines.append(f"{deg} :: {format_atom(atom)}.")
        return "\n".join(lines) + ("\n" if lines else "")


def minimal_interpretation(dataset: Mapping) -> FuzzyInterpretation:
    return FuzzyInterpretation(dataset)


def body_degree(interp: FuzzyInterpretation, rule, binding: Mapping) -> float:
    """Degree of the grounded body, folded left to right with the rule's t-norm."""
    degs = []
    for lit in rule.body:
        d = interp[ground(lit.atom, binding)]
        if lit.op is not None:
            d = lit.op(d)
        degs.append(d)
    return tnorm_fold(rule.connective, degs)
