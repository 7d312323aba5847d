"""Cross-checks of the chase engine against the reference implementations."""
from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Callable, Optional

from ..chase import (
    STRATEGIES,
    ChaseResult,
    StrategyConfig,
    check_k_model,
    enumerate_active_triggers,
    estimate_derivable_heads,
    greedy_violations,
    run_chase,
)
from ..degrees import TNorm
from ..errors import Undecided
from ..lang.analysis import check_weak_acyclicity
from ..lang.syntax import Atom, Null, Program, Rule
from ..model import FuzzyDataset, minimal_interpretation
from .classical import classical_chase
from .fixpoint import naive_fixpoint
from .generators import Caps, Instance, random_datalog, random_weakly_acyclic
from .homomorphism import find_ndf_homomorphism
from .laws import check_tnorm_laws, install_broken_tnorm
from .models import sample_models

PASS, FAIL, NA = "pass", "fail", "n/a"


@dataclass(frozen=True)
class CheckResult:
    name: str
    verdict: str
    detail: str = ""
    reproducer: Optional[tuple[str, str]] = None  # (program text, dataset text)

    def to_dict(self) -> dict:
        d = {"check": self.name, "verdict": self.verdict, "detail": self.detail}
        if self.reproducer:
            d["program"], d["dataset"] = self.reproducer
        return d


@dataclass
class DifferentialReport:
    instance: str
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.verdict != FAIL for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if c.verdict == FAIL]

    def verdict(self, name: str) -> str:
        for c in self.checks:
            if c.name == name:
                return c.verdict
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"instance": self.instance, "ok": self.ok,
                "checks": [c.to_dict() for c in self.checks]}


@dataclass(frozen=True)
class CheckOptions:
    K: float = 1.0
    law_samples: int = 2_000
    models: int = 2
    seed: int = 0


class _Runs:
    """Chase runs of one instance, computed on first use."""

    def __init__(self, inst: Instance, opts: CheckOptions):
        self.inst = inst
        self.program = inst.program
        self.dataset = inst.dataset
        self.opts = opts

    @cached_property
    def weakly_acyclic(self) -> bool:
        return bool(check_weak_acyclicity(self.program))

    @cached_property
    def cap(self) -> int:
        if not self.weakly_acyclic:
            return 5_000
        return 10 * (estimate_derivable_heads(self.program, minimal_interpretation(self.dataset)) + 1)

    def run(self, name: str, K: Optional[float] = None) -> ChaseResult:
        K = self.opts.K if K is None else K
        key = (name, K)
        cache = self.__dict__.setdefault("_cache", {})
        if key not in cache:
            cache[key] = run_chase(self.program, self.dataset,
                                   StrategyConfig.named(name, K=K, max_steps=self.cap))
        return cache[key]

    @cached_property
    def crisp_atoms(self) -> Optional[set]:
        try:
            return classical_chase(self.program, set(self.dataset), max_steps=self.cap)
        except Undecided:
            return None


# -- individual checks ------------------------------------------------------
# each returns (verdict, detail)

def check_connective_laws(r: _Runs):
    conns = sorted({c for rule in r.program.rules for c in rule.connectives}, key=str)
    for c in conns:
        bad = check_tnorm_laws(c, samples=r.opts.law_samples, seed=r.opts.seed, limit=1)
        if bad:
            return FAIL, "; ".join(str(b) for b in bad)
    return PASS, f"{len(conns)} connective(s)"


def check_termination(r: _Runs):
    if not r.weakly_acyclic:
        return NA, "not weakly acyclic"
    for s in STRATEGIES:
        res = r.run(s)
        if not res.completed:
            return FAIL, f"{s} stopped after {res.steps} steps"
    return PASS, ""


def check_greedy_invariants(r: _Runs):
    if r.opts.K != 1.0:
        return NA, "stated for K = 1"
    bound = None
    if r.crisp_atoms is not None:
        idb = r.program.idb()
        bound = sum(1 for a in r.crisp_atoms if a.predicate in idb)
    for s in ("so-greedy", "r-greedy"):
        res = r.run(s)
        problems = greedy_violations(res.trace)
        if problems:
            return FAIL, f"{s}: {problems[0]}"
        if bound is not None and res.steps > bound:
            return FAIL, f"{s}: {res.steps} steps but only {bound} derivable heads"
    return PASS, ""


def check_model_property(r: _Runs):
    base = minimal_interpretation(r.dataset)
    for s in STRATEGIES:
        res = r.run(s)
        if not res.completed:
            continue
        if not check_k_model(res.interpretation, r.program, r.opts.K):
            return FAIL, f"{s} result is not a K-model"
        if not res.interpretation.dominates(base):
            return FAIL, f"{s} result lost dataset degrees"
        if enumerate_active_triggers(res.interpretation, r.program, res.config):
            return FAIL, f"{s} completed with active triggers"
    return PASS, ""


def check_trace_replay(r: _Runs):
    base = minimal_interpretation(r.dataset)
    for s in STRATEGIES:
        res = r.run(s)
        if res.replay(base) != res.interpretation:
            return FAIL, f"{s} trace does not replay to its result"
        for step in res.trace:
            if not step.degree_after > step.degree_before:
                return FAIL, f"{s} step {step.index} does not raise its head"
    return PASS, ""


def _null_free(interp) -> dict:
    return {a: d for a, d in interp.items() if not any(isinstance(t, Null) for t in a.args)}


def check_strategy_agreement(r: _Runs):
    results = [(s, r.run(s)) for s in STRATEGIES]
    results = [(s, res) for s, res in results if res.completed]
    if len(results) < 2:
        return NA, "fewer than two strategies completed"
    s0, ref = results[0][0], _null_free(results[0][1].interpretation)
    for s, res in results[1:]:
        other = _null_free(res.interpretation)
        if other != ref:
            diff = sorted(set(ref.items()) ^ set(other.items()), key=lambda kv: kv[0].sort_key())
            atom = diff[0][0]
            return FAIL, f"{atom}: {s0}={ref.get(atom, 0.0)!r} {s}={other.get(atom, 0.0)!r}"
    return PASS, ""


def check_oracle_fixpoint(r: _Runs):
    if r.program.uses_existentials:
        return NA, "existential rules"
    oracle = naive_fixpoint(r.program, r.dataset, r.opts.K)
    if not check_k_model(oracle, r.program, r.opts.K):
        return FAIL, "oracle result is not a K-model"
    for s in STRATEGIES:
        res = r.run(s)
        if res.completed and res.interpretation != oracle:
            got = res.interpretation
            atom = min((a for a in set(got) | set(oracle) if got[a] != oracle[a]),
                       key=lambda a: a.sort_key())
            return FAIL, f"{atom}: {s}={got[atom]!r} oracle={oracle[atom]!r}"
    return PASS, ""


def check_crisp_containment(r: _Runs):
    crisp = r.crisp_atoms
    if crisp is None:
        return NA, "classical chase did not terminate within the cap"
    for s in STRATEGIES:
        res = r.run(s)
        extra = [a for a in res.interpretation if a not in crisp]
        if extra:
            return FAIL, f"{s}: {min(extra, key=lambda a: a.sort_key())} not in the crisp chase"
    return PASS, ""


def ground_goals(program: Program, dataset) -> list[Atom]:
    consts = sorted({t for a in dataset for t in a.args}
                    | {t for rule in program.rules for lit in rule.body for t in lit.atom.args
                       if isinstance(t, str)}
                    | {t for rule in program.rules for t in rule.head.args if isinstance(t, str)})
    preds = set(program.arities) | {a.predicate for a in dataset}
    arity = dict(program.arities)
    arity.update({a.predicate: a.arity for a in dataset})
    return [Atom(p, args) for p in sorted(preds) for args in product(consts, repeat=arity[p])]


def check_classical_agreement(r: _Runs):
    if any(d != 1.0 for d in r.dataset.values()) or r.opts.K != 1.0:
        return NA, "dataset is not crisp"
    crisp = r.crisp_atoms
    if crisp is None:
        return NA, "classical chase did not terminate within the cap"
    res = r.run("r-greedy")
    if not res.completed:
        return NA, "chase did not complete"
    interp = res.interpretation
    goals = ground_goals(r.program, r.dataset)
    for g in goals:
        if (interp[g] >= 1.0) != (g in crisp):
            return FAIL, f"{g}: fuzzy degree {interp[g]!r}, classical {'yes' if g in crisp else 'no'}"
    return PASS, f"{len(goals)} goals"


def check_universality(r: _Runs):
    res = r.run("r-greedy")
    if not res.completed:
        return NA, "chase did not complete"
    rng = random.Random(r.opts.seed)
    n = 0
    for m in sample_models(r.program, r.dataset, rng, r.opts.models, r.opts.K, max_steps=r.cap):
        n += 1
        try:
            h = find_ndf_homomorphism(res.interpretation, m, cap=20_000)
        except Undecided:
            return NA, "homomorphism search cap reached"
        if h is None:
            return FAIL, "no non-decreasing homomorphism into a sampled model"
    return PASS, f"{n} model(s)"


def check_r_implies_so(r: _Runs):
    so = StrategyConfig(activity="so", K=r.opts.K)
    rr = StrategyConfig(activity="r", K=r.opts.K)
    for interp in (minimal_interpretation(r.dataset), r.run("so-fifo").interpretation):
        active_so = set(enumerate_active_triggers(interp, r.program, so))
        for t in enumerate_active_triggers(interp, r.program, rr):
            if t not in active_so:
                return FAIL, f"{t} is r-active but not so-active"
    return PASS, ""


def check_k_monotonicity(r: _Runs):
    if r.program.uses_existentials or r.program.uses_unary_ops:
        return NA, "stated for t-Datalog"
    prev = None
    for K in (0.0, 0.5, 0.8, 1.0):
        cur = r.run("so-greedy", K).interpretation
        if prev is not None and not cur.dominates(prev):
            return FAIL, f"result at K={K} is not above the result for a smaller K"
        prev = cur
    return PASS, ""


CHECKS: dict[str, Callable] = {
    "connective laws": check_connective_laws,
    "termination": check_termination,
    "greedy invariants": check_greedy_invariants,
    "model property": check_model_property,
    "trace replay": check_trace_replay,
    "strategy agreement": check_strategy_agreement,
    "oracle fixpoint": check_oracle_fixpoint,
    "crisp containment": check_crisp_containment,
    "classical agreement": check_classical_agreement,
    "universality": check_universality,
    "r implies so": check_r_implies_so,
    "K monotonicity": check_k_monotonicity,
}


def _run_check(fn, inst: Instance, opts: CheckOptions):
    try:
        return fn(_Runs(inst, opts))
    except Exception as exc:  # a crash is a failure of the instance, not of the suite
        return FAIL, f"{type(exc).__name__}: {exc}"


def shrink(inst: Instance, failing: Callable[[Instance], bool], budget: int = 200) -> Instance:
    """Drop rules and facts one at a time while ``failing`` stays true."""
    changed = True
    while changed and budget > 0:
        changed = False
        for i in range(len(inst.program.rules)):
            if len(inst.program.rules) <= 1:
                break
            rules = inst.program.rules[:i] + inst.program.rules[i + 1:]
            cand = Instance(Program(rules), inst.dataset, inst.label)
            budget -= 1
            if failing(cand):
                inst, changed = cand, True
                break
        if changed:
            continue
        facts = list(inst.dataset.items())
        for i in range(len(facts)):
            cand = Instance(inst.program, FuzzyDataset(facts[:i] + facts[i + 1:]), inst.label)
            budget -= 1
            if failing(cand):
                inst, changed = cand, True
                break
    return inst


def differential_check(program: Program, dataset, options: CheckOptions = CheckOptions(),
                       label: str = "", only: Optional[list[str]] = None) -> DifferentialReport:
    """Run every applicable check; failures carry a shrunk reproducer."""
    inst = Instance(program, dataset, label)
    report = DifferentialReport(label or program.fragment)
    runs = _Runs(inst, options)
    for name, fn in CHECKS.items():
        if only is not None and name not in only:
            continue
        try:
            verdict, detail = fn(runs)
        except Exception as exc:
            verdict, detail = FAIL, f"{type(exc).__name__}: {exc}"
        repro = None
        if verdict == FAIL:
            small = shrink(inst, lambda c: _run_check(fn, c, options)[0] == FAIL)
            repro = small.texts()
        report.checks.append(CheckResult(name, verdict, detail, repro))
    return report


# -- randomized suite -------------------------------------------------------

SUITE_SIZES = {"tiny": 8, "small": 60, "full": 400}


@dataclass
class SuiteReport:
    seed: int
    caps: str
    reports: list[DifferentialReport] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports)

    def tally(self) -> dict[str, dict[str, int]]:
        out: dict[str, dict[str, int]] = {}
        for rep in self.reports:
            for c in rep.checks:
                t = out.setdefault(c.name, {PASS: 0, FAIL: 0, NA: 0})
                t[c.verdict] += 1
        return out

    def to_json(self) -> str:
        return json.dumps({
            "seed": self.seed, "caps": self.caps, "ok": self.ok,
            "instances": len(self.reports), "tally": self.tally(),
            "failures": [dict(f.to_dict(), instance=r.instance)
                         for r in self.reports for f in r.failures],
        }, indent=2, sort_keys=True)

    def to_table(self) -> str:
        lines = [f"selftest seed={self.seed} caps={self.caps} instances={len(self.reports)}"]
        width = max((len(n) for n in CHECKS), default=10)
        for name, t in self.tally().items():
            lines.append(f"  {name:<{width}}  pass {t[PASS]:>5}  fail {t[FAIL]:>3}  n/a {t[NA]:>5}")
        for rep in self.reports:
            for f in rep.failures:
                lines.append(f"FAIL [{rep.instance}] {f.name}: {f.detail}")
                if f.reproducer:
                    prog, data = f.reproducer
                    lines.append("  program:")
                    lines.extend("    " + ln for ln in prog.splitlines())
                    lines.append("  dataset:")
                    lines.extend("    " + ln for ln in data.splitlines())
        lines.append("result: " + ("pass" if self.ok else "FAIL"))
        return "\n".join(lines)


def negative_control_instance() -> Instance:
    """The sample program with its product connective swapped for ``&broken``."""
    from ..lang.parser import parse_dataset, parse_program
    from ..samples import sample_text

    broken = install_broken_tnorm()
    prog = parse_program(sample_text("fig1.tdl"))
    rules = tuple(Rule(r.id, r.body, r.head, broken if r.connective == TNorm("prod") else r.connective,
                       r.existential_vars) for r in prog.rules)
    return Instance(Program(rules), parse_dataset(sample_text("fig1.tdf")), "negative control")


def run_suite(seed: int = 0, caps: str = "small", negative_control: bool = False,
              log: Optional[Callable[[str], None]] = None) -> SuiteReport:
    """Randomized differential suite over the three instance families."""
    if caps not in SUITE_SIZES:
        raise ValueError(f"caps must be one of {', '.join(SUITE_SIZES)}")
    n = SUITE_SIZES[caps]
    rng = random.Random(seed)
    opts = CheckOptions(law_samples=200 if caps == "tiny" else 2_000, seed=seed)
    start = time.perf_counter()
    out = SuiteReport(seed, caps)
    small = Caps(constants=4, predicates=3, rules=4, facts=8) if caps == "tiny" else Caps()
    families = [
        ("t-Datalog", lambda: random_datalog(rng, small)),
        ("weakly acyclic", lambda: random_weakly_acyclic(rng, small)),
        ("crisp weakly acyclic", lambda: random_weakly_acyclic(rng, small, all_ones=True)),
    ]
    for fam, gen in families:
        for i in range(n):
            inst = gen()
            out.reports.append(differential_check(inst.program, inst.dataset, opts,
                                                  label=f"{fam} #{i}"))
        if log:
            log(f"{fam}: {n} instances")
    if negative_control:
        inst = negative_control_instance()
        out.reports.append(differential_check(inst.program, inst.dataset, opts,
                                              label=inst.label))
    out.seconds = time.perf_counter() - start
    return out
