import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tdatalog.chase import (
    COMPLETED,
    STEP_LIMIT_EXCEEDED,
    StrategyConfig,
    Trigger,
    apply_trigger,
    check_k_model,
    enumerate_active_triggers,
    greedy_violations,
    head_of,
    is_active,
    k_model_violations,
    run_chase,
    trace_to_jsonl,
    trigger_target_degree,
)
from tdatalog.errors import ConfigError, ContractViolation
from tdatalog.lang import Atom, Null, Var, parse_dataset, parse_program
from tdatalog.model import FuzzyInterpretation, NullKey, allocate_null, minimal_interpretation
from tdatalog.oracle import classical_chase, random_weakly_acyclic

STRATEGY_NAMES = ("so-greedy", "so-fifo", "r-greedy", "r-fifo")

# two classifier labels combined by an existential rule
PAIR_PROGRAM = "NeuralLabel(x,y) &luk NeuralLabel(u,w) -> exists z . CommonClass(x,u,z)."
PAIR_DATA = "0.8 :: NeuralLabel(img1, tiger_shark).\n0.9 :: NeuralLabel(img2, tench).\n"

# a label that raises a class already present at a lower degree
REACTIVATION_DATA = "0.9 :: NeuralLabel(img, c1).\n0.6 :: Class(img, c1).\nHypernym(c1, c2).\n"


def A(p, *args):
    return Atom(p, args)


def luk(a, b):
    return float(max(Fraction(0), Fraction(a) + Fraction(b) - 1))


@pytest.fixture
def pair():
    return parse_program(PAIR_PROGRAM), parse_dataset(PAIR_DATA)


def pair_trigger(prog, x, y, u, w):
    return Trigger.of(prog.rules[0], {"x": x, "y": y, "u": u, "w": w})


def pair_null(x, u):
    return allocate_null(NullKey(0, "z", (("u", u), ("x", x))))


# -- target degrees ---------------------------------------------------------------

def test_target_degree_with_k(pair):
    prog, data = pair
    I = minimal_interpretation(data)
    t = pair_trigger(prog, "img1", "tiger_shark", "img2", "tench")
    assert trigger_target_degree(I, t) == luk(0.8, 0.9)
    assert trigger_target_degree(I, t, K=0.0) == 0.0
    body = FuzzyInterpretation({A("P", "a"): 0.8})
    (r,) = parse_program("P(x) -> Q(x).").rules
    assert trigger_target_degree(body, Trigger.of(r, {"x": "a"}), K=0.9) == float(
        Fraction(0.8) + Fraction(0.9) - 1)
    assert abs(trigger_target_degree(body, Trigger.of(r, {"x": "a"}), K=0.9) - 0.7) < 1e-15


def test_trigger_head_uses_the_frontier_null(pair):
    prog, _ = pair
    t = pair_trigger(prog, "img1", "tiger_shark", "img2", "tench")
    head = head_of(t)
    assert head == A("CommonClass", "img1", "img2", pair_null("img1", "img2"))
    # the null depends only on the frontier, not on y and w
    other = pair_trigger(prog, "img1", "hammerhead", "img2", "coho")
    assert head_of(other) == head


def test_applying_one_trigger(pair):
    prog, data = pair
    I = minimal_interpretation(data)
    t = pair_trigger(prog, "img1", "tiger_shark", "img2", "tench")
    J = apply_trigger(I, t)
    assert J[head_of(t)] == luk(0.8, 0.9)
    assert abs(J[head_of(t)] - 0.7) < 1e-15
    assert len(J) == len(I) + 1
    assert len(I) == 2  # the input is not modified
    with pytest.raises(ContractViolation):
        apply_trigger(J, t)


# -- enumeration and activity -------------------------------------------------------

def test_four_triggers_are_active_initially(pair):
    prog, data = pair
    I = minimal_interpretation(data)
    active = enumerate_active_triggers(I, prog, StrategyConfig(activity="so"))
    assert len(active) == 4
    assert enumerate_active_triggers(I, prog, StrategyConfig(activity="r")) == active
    expected = {("img1", "img2"): luk(0.8, 0.9), ("img2", "img1"): luk(0.9, 0.8),
                ("img1", "img1"): luk(0.8, 0.8), ("img2", "img2"): luk(0.9, 0.9)}
    got = {(t.binding[Var("x")], t.binding[Var("u")]): trigger_target_degree(I, t) for t in active}
    assert got == expected
    assert sorted(round(d, 12) for d in got.values()) == [0.6, 0.7, 0.7, 0.8]


def test_each_pair_chase_writes_four_heads(pair):
    prog, data = pair
    for name in STRATEGY_NAMES:
        res = run_chase(prog, data, StrategyConfig.named(name))
        assert res.completed
        heads = {s.head: s.degree_after for s in res.trace}
        assert len(heads) == 4
        assert all(isinstance(h.args[2], Null) for h in heads)
        assert heads[A("CommonClass", "img2", "img2", pair_null("img2", "img2"))] == luk(0.9, 0.9)
        assert heads[A("CommonClass", "img1", "img1", pair_null("img1", "img1"))] == luk(0.8, 0.8)


def test_a_stronger_constant_fact_blocks_the_restricted_trigger(pair):
    prog, data = pair
    data = data.union(parse_dataset("0.8 :: CommonClass(img1, img2, fish)."))
    I = minimal_interpretation(data)
    t = pair_trigger(prog, "img1", "tiger_shark", "img2", "tench")
    assert is_active(I, t, StrategyConfig(activity="so"))
    assert not is_active(I, t, StrategyConfig(activity="r"))
    assert len(enumerate_active_triggers(I, prog, StrategyConfig(activity="so"))) == 4
    assert len(enumerate_active_triggers(I, prog, StrategyConfig(activity="r"))) == 3
    r = run_chase(prog, data, StrategyConfig.named("r-greedy"))
    so = run_chase(prog, data, StrategyConfig.named("so-greedy"))
    assert (r.steps, so.steps) == (3, 4)


def test_equal_degree_is_not_active():
    (r,) = parse_program("P(x) -> Q(x).").rules
    I = FuzzyInterpretation({A("P", "a"): 0.5, A("Q", "a"): 0.5})
    t = Trigger.of(r, {"x": "a"})
    assert not is_active(I, t, StrategyConfig(activity="so"))
    I[A("P", "a")] = 0.6
    assert is_active(I, t, StrategyConfig(activity="so"))


def test_nothing_is_active_on_empty_input(sample_program):
    assert enumerate_active_triggers(FuzzyInterpretation(), sample_program) == []


def test_nothing_is_active_after_completion(sample_program, sample_data):
    for name in STRATEGY_NAMES:
        res = run_chase(sample_program, sample_data, StrategyConfig.named(name))
        assert res.completed
        cfg = StrategyConfig.named(name)
        assert enumerate_active_triggers(res.interpretation, sample_program, cfg) == []


def test_restricted_activity_only_frees_invented_positions():
    # a null at a frontier position stays fixed when matching the head
    prog = parse_program("A(x) -> exists z . R(x,z).\nR(x,y) -> exists w . S(y,w).")
    data = parse_dataset("A(a).\n0.5 :: S(b, c).")
    res = run_chase(prog, data, StrategyConfig.named("r-greedy"))
    s_atoms = [a for a in res.interpretation.atoms("S")]
    assert len(s_atoms) == 2
    null_z = allocate_null(NullKey(0, "z", (("x", "a"),)))
    (derived,) = [a for a in s_atoms if a.args[0] == null_z]
    assert res.interpretation[derived] == 1.0


def test_repeated_existential_variables_must_match_together():
    prog = parse_program("A(x) -> exists z . R(x,z,z).")
    blocked = run_chase(prog, parse_dataset("A(a).\nR(a,b,b)."), StrategyConfig.named("r-greedy"))
    assert blocked.steps == 0
    open_ = run_chase(prog, parse_dataset("A(a).\nR(a,b,c)."), StrategyConfig.named("r-greedy"))
    assert open_.steps == 1


def test_every_restricted_trigger_is_semi_oblivious_active(pair):
    prog, data = pair
    data = data.union(parse_dataset("0.85 :: CommonClass(img2, img2, fish)."))
    I = minimal_interpretation(data)
    r_active = enumerate_active_triggers(I, prog, StrategyConfig(activity="r"))
    so_active = enumerate_active_triggers(I, prog, StrategyConfig(activity="so"))
    assert set(r_active) <= set(so_active)
    assert len(r_active) == 3


# -- the sample instance -------------------------------------------------------------

@pytest.mark.parametrize("name", STRATEGY_NAMES)
def test_sample_instance_degrees(sample_program, sample_data, name):
    res = run_chase(sample_program, sample_data, StrategyConfig.named(name))
    I = res.interpretation
    assert res.status == COMPLETED
    assert I[A("Class", "img1", "fish")] == 0.8
    assert I[A("Class", "img2", "fish")] == 0.9
    assert abs(I[A("CommonClass", "img1", "img2", "fish")] - 0.72) < 1e-12
    assert abs(I[A("CommonClass", "img1", "img2", "tiger_shark")] - 0.016) < 1e-12
    assert check_k_model(I, sample_program)
    assert I.dominates(minimal_interpretation(sample_data))


def test_strategies_agree_on_the_sample(sample_program, sample_data):
    results = [run_chase(sample_program, sample_data, StrategyConfig.named(n)).interpretation
               for n in STRATEGY_NAMES]
    assert all(r == results[0] for r in results)


# -- reactivation --------------------------------------------------------------------

def test_fifo_reactivates_a_trigger(sample_program):
    data = parse_dataset(REACTIVATION_DATA)
    rule_two_first = StrategyConfig.named(
        "so-fifo", tie_break=lambda t: (0 if t.rule.id == 1 else 1, t.sort_key()))
    res = run_chase(sample_program, data, rule_two_first)
    target = A("Class", "img", "c2")
    writes = [s.degree_after for s in res.trace if s.head == target]
    assert writes == [0.6, 0.9]
    assert res.interpretation[target] == 0.9
    assert [s.rule_id for s in res.trace if s.rule_id < 2] == [1, 0, 1]


def test_second_application_raises_the_head(sample_program):
    r1, r2, _ = sample_program.rules
    I = minimal_interpretation(parse_dataset(REACTIVATION_DATA))
    t2 = Trigger.of(r2, {"x": "img", "y": "c1", "z": "c2"})
    I = apply_trigger(I, t2)
    assert I[A("Class", "img", "c2")] == 0.6
    I = apply_trigger(I, Trigger.of(r1, {"x": "img", "y": "c1"}))
    assert is_active(I, t2, StrategyConfig(activity="so"))
    I = apply_trigger(I, t2)
    assert I[A("Class", "img", "c2")] == 0.9


def test_greedy_writes_each_head_once(sample_program):
    data = parse_dataset(REACTIVATION_DATA)
    res = run_chase(sample_program, data, StrategyConfig.named("r-greedy", check_invariants=True))
    heads = [s.head for s in res.trace]
    assert len(heads) == len(set(heads))
    assert res.interpretation[A("Class", "img", "c2")] == 0.9
    fifo = run_chase(sample_program, data, StrategyConfig.named("so-fifo"))
    assert fifo.interpretation == res.interpretation


# -- model checking --------------------------------------------------------------------

def test_k_model_checks(sample_program):
    I = minimal_interpretation(parse_dataset(REACTIVATION_DATA))
    assert not check_k_model(I, sample_program)
    (rule, binding, body, head), *_ = k_model_violations(I, sample_program)
    assert rule.id == 0 and (body, head) == (0.9, 0.6)
    assert check_k_model(I, sample_program, K=0.0)
    # 0.9 -> 0.6 is satisfied to degree 0.7
    assert check_k_model(FuzzyInterpretation({A("NeuralLabel", "img", "c1"): 0.9,
                                              A("Class", "img", "c1"): 0.6}),
                         sample_program.subprogram(sample_program.rules[:1]), K=0.7)


def test_k_model_with_existential_heads(pair):
    prog, data = pair
    res = run_chase(prog, data, StrategyConfig.named("r-greedy"))
    assert check_k_model(res.interpretation, prog)
    I = res.interpretation.copy()
    I[next(iter(I.atoms("CommonClass")))] = 0.0
    assert not check_k_model(I, prog)


@pytest.mark.parametrize("K", [0.0, 0.3, 0.9, 1.0])
def test_chase_results_are_k_models(sample_program, sample_data, K):
    for name in STRATEGY_NAMES:
        res = run_chase(sample_program, sample_data, StrategyConfig.named(name, K=K))
        assert res.completed
        assert check_k_model(res.interpretation, sample_program, K)


# -- traces ---------------------------------------------------------------------------

def test_trace_is_deterministic_and_replays(sample_program, sample_data):
    for name in STRATEGY_NAMES:
        a = run_chase(sample_program, sample_data, StrategyConfig.named(name))
        b = run_chase(sample_program, sample_data, StrategyConfig.named(name))
        assert trace_to_jsonl(a) == trace_to_jsonl(b)
        assert a.replay(minimal_interpretation(sample_data)) == a.interpretation
        for s in a.trace:
            assert s.degree_after > s.degree_before


def test_trace_records(pair):
    prog, data = pair
    res = run_chase(prog, data, StrategyConfig.named("so-greedy", K=0.95))
    lines = trace_to_jsonl(res).splitlines()
    assert len(lines) == res.steps == 4
    first = json.loads(lines[0])
    assert set(first) == {"index", "rule_id", "grounding", "head", "degree_before",
                          "degree_after", "strategy", "K"}
    assert first["strategy"] == "so-greedy" and first["K"] == 0.95
    assert [n for n, _ in first["grounding"]] == ["u", "w", "x", "y"]
    assert first["head"].startswith("CommonClass(img2, img2, _:r0.z.")
    # greedy picks the largest target first
    assert first["degree_after"] == luk(0.9, 0.9) + 0.95 - 1 or abs(
        first["degree_after"] - (luk(0.9, 0.9) - 0.05)) < 1e-15


def test_greedy_violations_reports_problems():
    from tdatalog.chase import TraceStep
    h = A("P", "a")
    steps = [TraceStep(1, 0, (), h, 0.0, 0.5), TraceStep(2, 0, (), h, 0.5, 0.7)]
    problems = greedy_violations(steps)
    assert len(problems) == 2


# -- termination control ---------------------------------------------------------------

def test_guarded_rule_hits_the_step_limit():
    prog = parse_program("R(x,y) -> exists z . R(y,z).")
    data = parse_dataset("R(a,b).")
    for cap in (1, 5, 20):
        res = run_chase(prog, data, StrategyConfig.named("so-greedy", max_steps=cap))
        assert res.status == STEP_LIMIT_EXCEEDED
        assert res.steps == cap


def test_not_weakly_acyclic_needs_an_explicit_cap():
    prog = parse_program("R(x,y) -> exists z . R(y,z).")
    with pytest.raises(ConfigError):
        run_chase(prog, parse_dataset("R(a,b)."))


def test_a_cap_that_suffices_completes(sample_program, sample_data):
    full = run_chase(sample_program, sample_data, StrategyConfig.named("r-greedy"))
    exact = run_chase(sample_program, sample_data, StrategyConfig.named("r-greedy", max_steps=full.steps))
    assert exact.status == COMPLETED
    short = run_chase(sample_program, sample_data,
                      StrategyConfig.named("r-greedy", max_steps=full.steps - 1))
    assert short.status == STEP_LIMIT_EXCEEDED


def test_strategy_config_validation():
    with pytest.raises(ConfigError):
        StrategyConfig.named("lazy-greedy")
    with pytest.raises(ConfigError):
        StrategyConfig(K=1.5)
    with pytest.raises(ConfigError):
        StrategyConfig(max_steps=-1)
    assert StrategyConfig.named("so-fifo").name == "so-fifo"


def test_unary_operators_over_derived_predicates_are_rejected():
    prog = parse_program("P(x) -> Q(x).\n~Q(x) &min S(x) -> R(x).")
    with pytest.raises(ContractViolation):
        run_chase(prog, parse_dataset("P(a).\nS(a)."))


# -- support containment -----------------------------------------------------------------

def test_restricted_support_can_leave_the_crisp_restricted_chase():
    # The fuzzy r-chase writes the null atom because R(a,b) is weaker than the
    # body, while a crisp r-chase is blocked by R(a,b) itself.
    prog = parse_program("A(x) -> exists z . R(x,z).")
    data = parse_dataset("0.5 :: A(a).\n0.3 :: R(a,b).")
    res = run_chase(prog, data, StrategyConfig.named("r-greedy"))
    null = allocate_null(NullKey(0, "z", (("x", "a"),)))
    assert res.interpretation[A("R", "a", null)] == 0.5
    crisp_r = run_chase(prog, parse_dataset("A(a).\nR(a,b)."), StrategyConfig.named("r-greedy"))
    assert A("R", "a", null) not in crisp_r.interpretation
    # the crisp semi-oblivious chase still contains it
    assert A("R", "a", null) in classical_chase(prog, {A("A", "a"), A("R", "a", "b")})


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_support_is_inside_the_crisp_chase(seed):
    inst = random_weakly_acyclic(random.Random(seed))
    crisp = classical_chase(inst.program, set(inst.dataset))
    for name in STRATEGY_NAMES:
        res = run_chase(inst.program, inst.dataset, StrategyConfig.named(name))
        assert res.completed
        assert set(res.interpretation) <= crisp


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**9), K=st.sampled_from([1.0, 0.9, 0.5]))
def test_completed_results_are_models(seed, K):
    inst = random_weakly_acyclic(random.Random(seed))
    for name in STRATEGY_NAMES:
        res = run_chase(inst.program, inst.dataset, StrategyConfig.named(name, K=K))
        assert res.completed
        assert check_k_model(res.interpretation, inst.program, K)
        assert res.interpretation.dominates(minimal_interpretation(inst.dataset))
        assert res.replay(minimal_interpretation(inst.dataset)) == res.interpretation
        if name.endswith("greedy") and K == 1.0:
            assert greedy_violations(res.trace) == []


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_strategies_agree_on_null_free_atoms(seed):
    inst = random_weakly_acyclic(random.Random(seed))
    views = []
    for name in STRATEGY_NAMES:
        I = run_chase(inst.program, inst.dataset, StrategyConfig.named(name)).interpretation
        views.append({a: d for a, d in I.items() if not a.has_nulls()})
    assert all(v == views[0] for v in views)
