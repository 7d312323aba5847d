"""Fuzzy chase: triggers, activity notions and the four chase strategies.

A trigger is a rule plus a grounding of its body variables.  Applying it
raises the degree of its head atom (existential variables replaced by
deterministic nulls) to the trigger's target degree.  Strategies combine an
activity notion (``so``: the head would increase; ``r``: no variant of the
head with its invented nulls replaced exceeds the target) with a selection
order (``greedy``: highest target first; ``fifo``: oldest activation first).
"""
from __future__ import annotations

import heapq
import json
import math
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterable, Iterator, List, NamedTuple, Optional

from .degrees import MIN
from .errors import ConfigError, ContractViolation, InvariantViolation
from .lang.analysis import check_weak_acyclicity
from .lang.printer import format_atom
from .lang.syntax import Atom, Literal, Program, Rule, Var, term_key
from .model import FuzzyInterpretation, NullKey, allocate_null, minimal_interpretation

__all__ = [
    "StrategyConfig",
    "Trigger",
    "TraceStep",
    "ChaseResult",
    "COMPLETED",
    "STEP_LIMIT_EXCEEDED",
    "trigger_target_degree",
    "head_of",
    "is_active",
    "enumerate_active_triggers",
    "apply_trigger",
    "run_chase",
    "check_k_model",
    "greedy_violations",
    "trace_to_jsonl",
]

COMPLETED = "completed"
STEP_LIMIT_EXCEEDED = "step_limit_exceeded"

STRATEGIES = ("so-greedy", "so-fifo", "r-greedy", "r-fifo")


@dataclass(frozen=True)
class StrategyConfig:
    activity: str = "r"
    order: str = "greedy"
    K: float = 1.0
    max_steps: Optional[int] = None
    unbounded: bool = False
    tie_break: Optional[Callable[["Trigger"], Any]] = field(default=None, compare=False)
    check_invariants: bool = False

    def __post_init__(self):
        if self.activity not in ("so", "r"):
            raise ConfigError(f"activity must be 'so' or 'r', got {self.activity!r}")
        if self.order not in ("greedy", "fifo"):
            raise ConfigError(f"order must be 'greedy' or 'fifo', got {self.order!r}")
        k = float(self.K)
        if not 0.0 <= k <= 1.0:
            raise ConfigError(f"K must lie in [0, 1], got {self.K!r}")
        object.__setattr__(self, "K", k)
        if self.max_steps is not None and self.max_steps < 0:
            raise ConfigError("max_steps must be non-negative")

    @classmethod
    def named(cls, name: str, **kw) -> "StrategyConfig":
        """``StrategyConfig.named("so-fifo", K=0.9)``"""
        if name not in STRATEGIES:
            raise ConfigError(f"unknown strategy {name!r}; choose from {', '.join(STRATEGIES)}")
        activity, order = name.split("-")
        return cls(activity=activity, order=order, **kw)

    @property
    def name(self) -> str:
        return f"{self.activity}-{self.order}"

    def with_(self, **kw) -> "StrategyConfig":
        return replace(self, **kw)


# -- compiled rules ---------------------------------------------------------

class _Pattern(NamedTuple):
    predicate: str
    # per argument: variable index, or -1 with the constant in ``consts``
    slots: tuple
    consts: tuple


def _pattern(atom: Atom, index: dict) -> _Pattern:
    slots, consts = [], []
    for a in atom.args:
        if isinstance(a, Var):
            slots.append(index[a])
            consts.append(None)
        else:
            slots.append(-1)
            consts.append(a)
    return _Pattern(atom.predicate, tuple(slots), tuple(consts))


def _instantiate(p: _Pattern, values) -> Atom:
    return Atom(p.predicate, tuple(values[s] if s >= 0 else c
                                   for s, c in zip(p.slots, p.consts)))


class _Compiled:
    __slots__ = ("rule", "vars", "index", "body", "ops", "plain", "head",
                 "frontier", "ex_positions", "ex_groups", "fold", "single")

    def __init__(self, rule: Rule):
        self.rule = rule
        self.vars = rule.body_vars
        self.index = {v: i for i, v in enumerate(self.vars)}
        self.body = [_pattern(lit.atom, self.index) for lit in rule.body]
        self.ops = [lit.op for lit in rule.body]
        self.plain = [i for i, lit in enumerate(rule.body) if lit.op is None]
        ex = {v: j for j, v in enumerate(rule.existential_vars)}
        full_index = dict(self.index)
        for v, j in ex.items():
            full_index[v] = len(self.vars) + j
        self.head = _pattern(rule.head, full_index)
        self.frontier = tuple((v.name, self.index[v]) for v in sorted(rule.frontier))
        self.ex_positions = tuple(j for j, a in enumerate(rule.head.args) if a in ex)
        groups: dict = {}
        for j, a in enumerate(rule.head.args):
            if a in ex:
                groups.setdefault(a, []).append(j)
        self.ex_groups = tuple(tuple(g) for g in groups.values() if len(g) > 1)
        self.single = len(rule.body) == 1
        conn = rule.connective
        if isinstance(conn, tuple):
            fns = [c._fn for c in conn]

            def fold(degs, fns=fns):
                acc = degs[0]
                for f, d in zip(fns, degs[1:]):
                    acc = f(acc, d)
                return acc
        else:
            fn = conn._fn

            def fold(degs, fn=fn):
                acc = degs[0]
                for d in degs[1:]:
                    acc = fn(acc, d)
                return acc
        self.fold = fold

    def body_degree(self, interp: FuzzyInterpretation, values) -> float:
        deg = interp._deg
        degs = []
        for p, op in zip(self.body, self.ops):
            d = deg.get(_instantiate(p, values), 0.0)
            if op is not None:
                d = op._fn(d)
            elif d == 0.0:
                return 0.0  # any t-norm with a 0 argument is 0
            degs.append(d)
        return degs[0] if self.single else self.fold(degs)

    def head_atom(self, values) -> Atom:
        if not self.ex_positions:
            return _instantiate(self.head, values)
        frontier = tuple((name, values[i]) for name, i in self.frontier)
        rid = self.rule.id
        full = list(values)
        for v in self.rule.existential_vars:
            full.append(allocate_null(NullKey(rid, v.name, frontier)))
        return _instantiate(self.head, full)


def _compiled(rule: Rule) -> _Compiled:
    c = _CACHE.get(rule)
    if c is None:
        c = _Compiled(rule)
        if len(_CACHE) > 4096:
            _CACHE.clear()
        _CACHE[rule] = c
    return c


_CACHE: dict = {}


# -- triggers ---------------------------------------------------------------

class Trigger:
    """A rule with a grounding of its body variables.

    ``values`` lists the grounding in the order of ``rule.body_vars``.
    Identity is ``(rule.id, values)``.
    """

    __slots__ = ("rule", "values", "_hash")

    def __init__(self, rule: Rule, values):
        self.rule = rule
        self.values = tuple(values)
        self._hash = hash((rule.id, self.values))

    @classmethod
    def of(cls, rule: Rule, grounding: dict) -> "Trigger":
        """Build from a ``{Var or name: term}`` mapping."""
        g = {(k.name if isinstance(k, Var) else k): t for k, t in grounding.items()}
        missing = [v.name for v in rule.body_vars if v.name not in g]
        if missing:
            raise ContractViolation(f"grounding misses body variables {missing}")
        return cls(rule, [g[v.name] for v in rule.body_vars])

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, Trigger) and self.rule.id == other.rule.id \
            and self.values == other.values

    @property
    def binding(self) -> dict:
        return dict(zip(self.rule.body_vars, self.values))

    @property
    def grounding(self) -> tuple:
        """``(var_name, term)`` pairs sorted by variable name."""
        return tuple(sorted(((v.name, t) for v, t in zip(self.rule.body_vars, self.values)),
                            key=lambda p: p[0]))

    def sort_key(self):
        return (self.rule.id, tuple((n, term_key(t)) for n, t in self.grounding))

    def __repr__(self):
        g = ", ".join(f"{n}={t}" for n, t in self.grounding)
        return f"Trigger(r{self.rule.id}, {{{g}}})"


def head_of(trigger: Trigger) -> Atom:
    return _compiled(trigger.rule).head_atom(trigger.values)


def _target(body: float, K: float) -> float:
    if K == 1.0:
        return body
    s = math.fsum((body, K, -1.0))
    return s if s > 0.0 else 0.0


def trigger_target_degree(interp: FuzzyInterpretation, trigger: Trigger, K: float = 1.0) -> float:
    """``max(0, body + K - 1)``; for ``K = 1`` the body degree itself."""
    return _target(_compiled(trigger.rule).body_degree(interp, trigger.values), K)


def _restricted_bound(interp: FuzzyInterpretation, comp: _Compiled, head: Atom) -> float:
    """Largest degree of an atom matching ``head`` with its invented nulls free."""
    if not comp.ex_positions:
        return interp[head]
    ex = comp.ex_positions
    bound = {i: t for i, t in enumerate(head.args) if i not in ex}
    best = 0.0
    deg = interp._deg
    for a in interp.lookup(head.predicate, bound):
        if comp.ex_groups and any(len({a.args[j] for j in g}) > 1 for g in comp.ex_groups):
            continue
        d = deg[a]
        if d > best:
            best = d
    return best


def _active(interp, comp, head, target, activity) -> bool:
    if target <= 0.0:
        return False
    if activity == "so" or not comp.ex_positions:
        return target > interp[head]
    return target > _restricted_bound(interp, comp, head)


def is_active(interp: FuzzyInterpretation, trigger: Trigger, config: StrategyConfig) -> bool:
    comp = _compiled(trigger.rule)
    target = _target(comp.body_degree(interp, trigger.values), config.K)
    return _active(interp, comp, comp.head_atom(trigger.values), target, config.activity)


# -- joins ------------------------------------------------------------------

def _join(interp: FuzzyInterpretation, comp: _Compiled, order, values: list) -> Iterator[tuple]:
    """Bind the body variables by matching plain literals ``order`` against the support."""
    if not order:
        yield tuple(values)
        return
    p = comp.body[order[0]]
    rest = order[1:]
    bound = {}
    for i, (s, c) in enumerate(zip(p.slots, p.consts)):
        if s < 0:
            bound[i] = c
        elif values[s] is not None:
            bound[i] = values[s]
    free = [(i, s) for i, s in enumerate(p.slots) if s >= 0 and i not in bound]
    if not free:
        if interp.lookup(p.predicate, bound):
            yield from _join(interp, comp, rest, values)
        return
    for atom in list(interp.lookup(p.predicate, bound)):
        args = atom.args
        newly = []
        ok = True
        for i, s in free:
            cur = values[s]
            if cur is None:
                values[s] = args[i]
                newly.append(s)
            elif cur != args[i]:
                ok = False
                break
        if ok:
            yield from _join(interp, comp, rest, values)
        for s in newly:
            values[s] = None


def _all_groundings(interp, comp: _Compiled) -> Iterator[tuple]:
    return _join(interp, comp, comp.plain, [None] * len(comp.vars))


def _groundings_through(interp, comp: _Compiled, atom: Atom) -> Iterator[tuple]:
    """Groundings whose plain body mentions ``atom``."""
    seen = set()
    for k in comp.plain:
        p = comp.body[k]
        if p.predicate != atom.predicate:
            continue
        values = [None] * len(comp.vars)
        ok = True
        for s, c, t in zip(p.slots, p.consts, atom.args):
            if s < 0:
                if c != t:
                    ok = False
                    break
            elif values[s] is None:
                values[s] = t
            elif values[s] != t:
                ok = False
                break
        if not ok:
            continue
        rest = [j for j in comp.plain if j != k]
        for g in _join(interp, comp, rest, values):
            if g not in seen:
                seen.add(g)
                yield g


class _Engine:
    def __init__(self, program: Program, config: StrategyConfig):
        self.program = program
        self.config = config
        self.rules = [_compiled(r) for r in program.rules]
        heads = program.idb()
        for r in program.rules:
            for lit in r.body:
                if lit.op is not None and lit.atom.predicate in heads:
                    raise ContractViolation(
                        f"rule {r.id} applies a unary operator to intensional predicate "
                        f"{lit.atom.predicate}; evaluate such programs stratum by stratum")
        self.by_pred: dict[str, list[_Compiled]] = {}
        for c in self.rules:
            for k in c.plain:
                lst = self.by_pred.setdefault(c.body[k].predicate, [])
                if c not in lst:
                    lst.append(c)
        tb = config.tie_break
        self.tie_key = tb if tb is not None else Trigger.sort_key

    def candidates(self, interp) -> Iterator[tuple[_Compiled, tuple, float]]:
        K = self.config.K
        for comp in self.rules:
            for values in _all_groundings(interp, comp):
                t = _target(comp.body_degree(interp, values), K)
                if t > 0.0:
                    yield comp, values, t

    def delta(self, interp, atom: Atom):
        K = self.config.K
        for comp in self.by_pred.get(atom.predicate, ()):
            for values in _groundings_through(interp, comp, atom):
                t = _target(comp.body_degree(interp, values), K)
                if t > 0.0:
                    yield comp, values, t

    def run(self, interp: FuzzyInterpretation, cap: Optional[int]) -> "ChaseResult":
        if self.config.order == "greedy":
            status, trace = self._greedy(interp, cap)
        else:
            status, trace = self._fifo(interp, cap)
        return ChaseResult(status, interp, trace, self.config)

    def _apply(self, interp, trace, comp, values, head, target):
        before = interp[head]
        interp[head] = target
        trace.append(TraceStep(len(trace) + 1, comp.rule.id,
                               Trigger(comp.rule, values).grounding, head, before, target))

    def _greedy(self, interp, cap):
        activity = self.config.activity
        K = self.config.K
        heap: list = []
        seq = 0
        key = self.tie_key

        def push(comp, values, t):
            nonlocal seq
            seq += 1
            heapq.heappush(heap, (-t, key(Trigger(comp.rule, values)), seq, comp, values))

        for comp, values, t in self.candidates(interp):
            push(comp, values, t)
        trace: list[TraceStep] = []
        while heap:
            neg, _, _, comp, values = heapq.heappop(heap)
            t = _target(comp.body_degree(interp, values), K)
            if t != -neg:
                continue  # stale; a fresher entry carries the current target
            head = comp.head_atom(values)
            if not _active(interp, comp, head, t, activity):
                continue
            if cap is not None and len(trace) >= cap:
                return STEP_LIMIT_EXCEEDED, trace
            self._apply(interp, trace, comp, values, head, t)
            for c2, v2, t2 in self.delta(interp, head):
                push(c2, v2, t2)
        return COMPLETED, trace

    def _fifo(self, interp, cap):
        activity = self.config.activity
        K = self.config.K
        key = self.tie_key
        queue: deque = deque()
        queued: set = set()

        def enqueue(found):
            batch = []
            for comp, values, t in found:
                trig = Trigger(comp.rule, values)
                if trig in queued:
                    continue
                if _active(interp, comp, comp.head_atom(values), t, activity):
                    queued.add(trig)
                    batch.append((key(trig), comp, trig))
            batch.sort(key=lambda b: b[0])
            queue.extend((comp, trig) for _, comp, trig in batch)

        enqueue(self.candidates(interp))
        trace: list[TraceStep] = []
        while queue:
            comp, trig = queue.popleft()
            queued.discard(trig)
            values = trig.values
            t = _target(comp.body_degree(interp, values), K)
            head = comp.head_atom(values)
            if not _active(interp, comp, head, t, activity):
                continue
            if cap is not None and len(trace) >= cap:
                return STEP_LIMIT_EXCEEDED, trace
            self._apply(interp, trace, comp, values, head, t)
            enqueue(self.delta(interp, head))
        return COMPLETED, trace


# -- results ----------------------------------------------------------------

class TraceStep(NamedTuple):
    index: int
    rule_id: int
    grounding: tuple
    head: Atom
    degree_before: float
    degree_after: float


@dataclass
class ChaseResult:
    status: str
    interpretation: FuzzyInterpretation
    trace: List[TraceStep]
    config: StrategyConfig

    @property
    def completed(self) -> bool:
        return self.status == COMPLETED

    @property
    def steps(self) -> int:
        return len(self.trace)

    def replay(self, start: FuzzyInterpretation) -> FuzzyInterpretation:
        """Apply the recorded head updates to a copy of ``start``."""
        out = start.copy()
        for step in self.trace:
            out[step.head] = step.degree_after
        return out


# -- public operations ------------------------------------------------------

def enumerate_active_triggers(interp: FuzzyInterpretation, program: Program,
                              config: StrategyConfig = StrategyConfig()) -> list[Trigger]:
    """All active triggers, sorted by (rule id, grounding)."""
    out = []
    for comp in (_compiled(r) for r in program.rules):
        for values in _all_groundings(interp, comp):
            t = _target(comp.body_degree(interp, values), config.K)
            if _active(interp, comp, comp.head_atom(values), t, config.activity):
                out.append(Trigger(comp.rule, values))
    out.sort(key=Trigger.sort_key)
    return out


def apply_trigger(interp: FuzzyInterpretation, trigger: Trigger, K: float = 1.0,
                  activity: str = "so") -> FuzzyInterpretation:
    """Return a copy of ``interp`` with the trigger's head raised to its target."""
    comp = _compiled(trigger.rule)
    target = _target(comp.body_degree(interp, trigger.values), K)
    head = comp.head_atom(trigger.values)
    if not _active(interp, comp, head, target, activity):
        raise ContractViolation(f"{trigger} is not {activity}-active")
    out = interp.copy()
    out[head] = target
    return out


def _without_unary(program: Program) -> Program:
    rules = []
    for r in program.rules:
        # every t-norm maps all-ones to 1, so the connective is irrelevant here
        body = tuple(lit for lit in r.body if lit.op is None)
        rules.append(Rule(r.id, body, r.head, MIN, r.existential_vars))
    return Program(tuple(rules))


def estimate_derivable_heads(program: Program, interp: FuzzyInterpretation) -> int:
    """Size of the crisp semi-oblivious chase from the support of ``interp``."""
    crisp = FuzzyInterpretation({a: 1.0 for a in interp})
    prog = _without_unary(program) if program.uses_unary_ops else program
    engine = _Engine(prog, StrategyConfig(activity="so", order="greedy"))
    engine.run(crisp, None)
    return len(crisp)


def step_cap(program: Program, interp: FuzzyInterpretation, config: StrategyConfig) -> Optional[int]:
    if config.unbounded:
        return None
    if config.max_steps is not None:
        return config.max_steps
    wa = check_weak_acyclicity(program)
    if not wa:
        raise ConfigError(f"program is {wa}; pass an explicit max_steps")
    return 10 * (estimate_derivable_heads(program, interp) + 1)


def run_chase(program: Program, dataset, config: StrategyConfig = StrategyConfig()) -> ChaseResult:
    """Chase ``dataset`` (a dataset or an interpretation, not modified) with ``program``."""
    if isinstance(dataset, FuzzyInterpretation):
        interp = dataset.copy()
    else:
        interp = minimal_interpretation(dataset)
    cap = step_cap(program, interp, config)
    result = _Engine(program, config).run(interp, cap)
    if config.check_invariants and config.order == "greedy" and config.K == 1.0:
        problems = greedy_violations(result.trace)
        if problems:
            raise InvariantViolation("; ".join(problems))
    return result


def greedy_violations(trace: Iterable[TraceStep]) -> list[str]:
    """Non-increasing target degrees and distinct heads along a greedy trace."""
    out = []
    prev = None
    heads = set()
    for s in trace:
        if prev is not None and s.degree_after > prev.degree_after:
            out.append(f"step {s.index}: degree {s.degree_after!r} exceeds previous "
                       f"{prev.degree_after!r}")
        if s.head in heads:
            out.append(f"step {s.index}: head {format_atom(s.head)} written twice")
        heads.add(s.head)
        prev = s
    return out


def _naive_matches(support: dict, lits: list[Literal], binding: dict) -> Iterator[dict]:
    if not lits:
        yield binding
        return
    atom = lits[0].atom
    for cand in support.get(atom.predicate, ()):
        b = dict(binding)
        ok = True
        for a, t in zip(atom.args, cand.args):
            if isinstance(a, Var):
                if b.setdefault(a, t) != t:
                    ok = False
                    break
            elif a != t:
                ok = False
                break
        if ok:
            yield from _naive_matches(support, lits[1:], b)


def check_k_model(interp: FuzzyInterpretation, program: Program, K: float = 1.0) -> bool:
    """Whether every grounding of every rule is K-satisfied by ``interp``.

    Groundings with a plain body atom outside the support have body degree 0
    and are satisfied trivially, so only support matches are enumerated.
    Existential heads take the supremum over completions in the support.
    """
    return not k_model_violations(interp, program, K, first_only=True)


def k_model_violations(interp: FuzzyInterpretation, program: Program, K: float = 1.0,
                       first_only: bool = False) -> list[tuple[Rule, dict, float, float]]:
    """``(rule, grounding, body degree, head degree)`` for each violated grounding."""
    from .degrees import tnorm_fold

    if K == 0.0:
        return []
    by_pred: dict[str, list[Atom]] = {}
    for a in interp:
        by_pred.setdefault(a.predicate, []).append(a)
    out = []
    for rule in program.rules:
        plain = [lit for lit in rule.body if lit.op is None]
        for b in _naive_matches(by_pred, plain, {}):
            degs = []
            for lit in rule.body:
                d = interp[Atom(lit.atom.predicate, tuple(
                    b[a] if isinstance(a, Var) else a for a in lit.atom.args))]
                degs.append(lit.op(d) if lit.op is not None else d)
            body = tnorm_fold(rule.connective, degs)
            need = _target(body, K)
            if need == 0.0:
                continue
            if rule.existential_vars:
                head = 0.0
                partial = Atom(rule.head.predicate, tuple(
                    b.get(a, a) if isinstance(a, Var) else a for a in rule.head.args))
                for m in _naive_matches(by_pred, [Literal(partial)], {}):
                    head = max(head, interp[Atom(partial.predicate, tuple(
                        m.get(a, a) if isinstance(a, Var) else a for a in partial.args))])
            else:
                head = interp[Atom(rule.head.predicate, tuple(
                    b[a] if isinstance(a, Var) else a for a in rule.head.args))]
            if head < need:
                out.append((rule, b, body, head))
                if first_only:
                    return out
    return out


def trace_to_jsonl(result: ChaseResult) -> str:
    """One JSON object per step; floats use the shortest round-trip form."""
    lines = []
    for s in result.trace:
        lines.append(json.dumps({
            "index": s.index,
            "rule_id": s.rule_id,
            "grounding": [[n, str(t)] for n, t in s.grounding],
            "head": format_atom(s.head),
            "degree_before": s.degree_before,
            "degree_after": s.degree_after,
            "strategy": result.config.name,
            "K": result.config.K,
        }, ensure_ascii=False))
    return "\n".join(lines) + ("\n" if lines else "")
