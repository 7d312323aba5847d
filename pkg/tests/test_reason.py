import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tdatalog.chase import StrategyConfig, check_k_model, run_chase
from tdatalog.errors import ConfigError, ContractViolation, NotStratifiable, Undecided
from tdatalog.lang import Atom, Program, Var, alternative_stratifications, parse_dataset, parse_program
from tdatalog.model import crispify
from tdatalog.oracle import classical_chase, naive_fixpoint, random_datalog, random_stratified
from tdatalog.reason import (
    EntailmentQuery,
    cq_entails,
    entails,
    entails_all_ones_classical_agreement,
    evaluate_stratified,
    run_stratified,
)


def A(p, *args):
    return Atom(p, args)


FISH = A("CommonClass", "img1", "img2", "fish")


def test_sample_goal_is_entailed(sample_program, sample_data):
    res = entails(sample_program, sample_data, EntailmentQuery(FISH, 0.72))
    assert res.answer
    assert abs(res.degree - 0.72) < 1e-12
    assert not entails(sample_program, sample_data, EntailmentQuery(FISH, 0.73)).answer
    assert entails(sample_program, sample_data, EntailmentQuery(A("Class", "img9", "fish"), 0.0)).answer


def test_semi_oblivious_entailment_agrees(sample_program, sample_data):
    so = entails(sample_program, sample_data, EntailmentQuery(FISH, 0.5), StrategyConfig.named("so-fifo"))
    r = entails(sample_program, sample_data, EntailmentQuery(FISH, 0.5))
    assert so.degree == r.degree


def test_goal_must_be_ground():
    with pytest.raises(ContractViolation):
        EntailmentQuery(Atom("P", (Var("x"),)))


@settings(max_examples=50, deadline=None)
@given(c=st.floats(0, 1), d=st.floats(0, 1))
def test_entailment_is_monotone_in_c(sample_program, c, d):
    data = parse_dataset("0.8 :: NeuralLabel(img1, tiger_shark).\nHypernym(tiger_shark, fish).")
    goal = A("Class", "img1", "fish")
    lo, hi = sorted((c, d))
    if entails(sample_program, data, EntailmentQuery(goal, hi)).answer:
        assert entails(sample_program, data, EntailmentQuery(goal, lo)).answer


def test_step_limit_is_undecided():
    prog = parse_program("R(x,y) -> exists z . R(y,z).\nR(x,y) -> Done(x).")
    data = parse_dataset("R(a,b).")
    with pytest.raises(Undecided):
        entails(prog, data, EntailmentQuery(A("Done", "a"), 1.0), StrategyConfig(max_steps=5))
    with pytest.raises(ConfigError):
        entails(prog, data, EntailmentQuery(A("Done", "a"), 1.0))


def test_crisp_entailment_agrees_with_classical_chase(sample_program, sample_data):
    crisp = crispify(sample_data)
    assert entails_all_ones_classical_agreement(sample_program, crisp, FISH)
    assert not entails_all_ones_classical_agreement(sample_program, crisp, A("Class", "img1", "tench"))
    assert entails_all_ones_classical_agreement(Program(), crisp, A("Hypernym", "tench", "fish"))
    with pytest.raises(ContractViolation):
        entails_all_ones_classical_agreement(sample_program, sample_data, FISH)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_crisp_entailment_on_random_programs(seed):
    inst = random_datalog(random.Random(seed), all_ones=True)
    closure = classical_chase(inst.program, set(inst.dataset))
    consts = sorted({t for a in inst.dataset for t in a.args})
    rng = random.Random(seed)
    for pred in sorted(inst.program.idb()):
        n = inst.program.arities[pred]
        goal = Atom(pred, tuple(rng.choice(consts) for _ in range(n)))
        assert entails_all_ones_classical_agreement(inst.program, inst.dataset, goal) == (goal in closure)


# -- conjunctive goals -----------------------------------------------------------

def test_conjunctive_goal(sample_program, sample_data):
    body = [Atom("Class", (Var("x"), "fish"))]
    res = cq_entails(sample_program, sample_data, body, c=0.9)
    assert res.answer and res.degree == 0.9
    assert not cq_entails(sample_program, sample_data, body, c=0.95).answer


def test_conjunctive_goal_over_data_only(sample_data):
    body = [Atom("NeuralLabel", ("img1", Var("y")))]
    res = cq_entails(Program(), sample_data, body, c=0.8)
    assert res.answer and res.degree == 0.8


def test_conjunctive_goal_uses_a_fresh_predicate(sample_data):
    prog = parse_program("NeuralLabel(x,y) -> Goal(x).")
    res = cq_entails(prog, sample_data, [Atom("Goal", (Var("x"),))], c=0.9)
    assert res.answer and res.degree == 0.9


# -- stratified evaluation ------------------------------------------------------------

def test_two_strata_evaluation():
    prog = parse_program("P(x) -> Q(x).\n~Q(x) &min S(x) -> R(x).")
    data = parse_dataset("0.4 :: P(a).\n0.9 :: S(a).\n0.9 :: S(b).")
    I = evaluate_stratified(prog, data)
    assert I[A("Q", "a")] == 0.4
    assert I[A("R", "a")] == 0.0
    assert I[A("R", "b")] == 0.9


def test_negation_over_extensional_data():
    prog = parse_program("!P(x) &min T(x) -> R(x).")
    I = evaluate_stratified(prog, parse_dataset("0.3 :: P(a).\nT(a)."))
    assert I[A("R", "a")] == 0.7


def test_single_stratum_matches_the_chase(sample_program, sample_data):
    assert evaluate_stratified(sample_program, sample_data) == \
        run_chase(sample_program, sample_data).interpretation


def test_stratified_entailment():
    prog = parse_program("P(x) -> Q(x).\n~Q(x) &min S(x) -> R(x).")
    data = parse_dataset("0.4 :: P(a).\n0.9 :: S(b).")
    assert entails(prog, data, EntailmentQuery(A("R", "b"), 0.9)).answer
    with pytest.raises(ConfigError):
        entails(prog, data, EntailmentQuery(A("R", "b"), 0.9, K=0.5))


def test_stratified_errors():
    with pytest.raises(NotStratifiable):
        evaluate_stratified(parse_program("~P(x) &min T(x) -> P(x)."), parse_dataset("T(a)."))
    with pytest.raises(ConfigError):
        run_stratified(parse_program("P(x) -> Q(x)."), parse_dataset("P(a)."), K=0.5)


def test_delta_threshold_over_a_lower_stratum():
    prog = parse_program("P(x) &luk P(x) -> Q(x).\ndelta[0.5] Q(x) &min P(x) -> R(x).")
    I = evaluate_stratified(prog, parse_dataset("0.8 :: P(a).\n0.7 :: P(b)."))
    # Q(a) = 0.6 clears the threshold; Q(b) = 0.4 does not
    assert I[A("R", "a")] == 0.8
    assert I[A("R", "b")] == 0.0


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**9))
def test_stratification_choice_does_not_matter(seed):
    inst = random_stratified(random.Random(seed), attempts=50)
    if inst is None:
        return
    results = [run_stratified(inst.program, inst.dataset, s).interpretation
               for s in alternative_stratifications(inst.program, limit=4)]
    results.append(evaluate_stratified(inst.program, inst.dataset))
    assert all(r == results[0] for r in results)


# -- K and the oracle --------------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**9), k1=st.floats(0, 1), k2=st.floats(0, 1))
def test_results_grow_with_k(seed, k1, k2):
    inst = random_datalog(random.Random(seed))
    lo, hi = sorted((k1, k2))
    small = run_chase(inst.program, inst.dataset, StrategyConfig(K=lo)).interpretation
    large = run_chase(inst.program, inst.dataset, StrategyConfig(K=hi)).interpretation
    assert large.dominates(small)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**9), K=st.sampled_from([1.0, 0.8]))
def test_entailment_degree_matches_the_fixpoint(seed, K):
    inst = random_datalog(random.Random(seed))
    oracle = naive_fixpoint(inst.program, inst.dataset, K)
    for atom, d in oracle.items():
        assert entails(inst.program, inst.dataset, EntailmentQuery(atom, d, K)).degree == d
    assert check_k_model(oracle, inst.program, K)
