import json

from hypothesis import given, settings
from hypothesis import strategies as st

from taylorlab.algebra import FiniteAlgebra, satisfies
from taylorlab.conditions import builtin_system, idempotency_equations
from taylorlab.errors import BudgetExceeded
from taylorlab.forge import q_and_c_from_strong_double_loop
from taylorlab.library import majority, xor3
from taylorlab.prover import (
    PROVED,
    UNKNOWN,
    ProofSession,
    audit,
    cc_prove,
    find_countermodel,
    goal_witness,
    linear_constraints,
    linear_models,
    random_linear_model,
    suite_goals,
    verify_derivation_suite,
)
from taylorlab.terms import (
    App,
    Equation,
    EquationSystem,
    Signature,
    Var,
    parse_equation,
)

F2 = Signature({"f": 2})


def test_idempotent_nesting_depth_one():
    ax = [parse_equation("(= (f x x) x)", F2)]
    res = cc_prove(ax, parse_equation("(= (f (f x x) x) x)", F2), depth=2)
    assert res.status == PROVED and res.depth == 1


def test_trivial_goal_at_depth_zero():
    res = cc_prove([], parse_equation("(= (f x y) (f x y))", F2))
    assert res.proved and res.depth == 0


def test_no_axioms_is_unknown():
    res = cc_prove([], parse_equation("(= x y)", {}))
    assert res.status == UNKNOWN


def test_goal_variables_are_constants():
    # f(x,y) = f(y,x) is not a consequence of idempotency
    ax = [parse_equation("(= (f x x) x)", F2)]
    assert not cc_prove(ax, parse_equation("(= (f x y) (f y x))", F2), depth=2).proved


def test_congruence_propagates():
    sig = Signature({"f": 2, "g": 1})
    ax = [parse_equation("(= (g x) x)", sig)]
    goal = parse_equation("(= (f (g x) y) (f x (g (g y))))", sig)
    assert cc_prove(ax, goal, depth=1).proved


def test_q_rows_meet_in_one_round():
    sys = builtin_system("strong_double_loop")
    ax = sys.with_equations(idempotency_equations(sys.signature))
    qc = q_and_c_from_strong_double_loop("d")
    x, y = Var("x"), Var("y")
    goal = Equation(qc["q1"](x, y, x, y), qc["q2"](y, x, x, y))
    res = cc_prove(ax, goal, depth=2)
    assert res.proved and res.depth == 1


def test_proof_is_deterministic():
    ax = [parse_equation("(= (f x x) x)", F2), parse_equation("(= (f x y) (f y x))", F2)]
    goal = parse_equation("(= (f (f y x) (f x y)) (f x y))", F2)
    a, b = cc_prove(ax, goal), cc_prove(ax, goal)
    assert a.proved
    assert (a.status, a.depth, a.universe, a.classes, a.instances) == \
        (b.status, b.depth, b.universe, b.classes, b.instances)


def test_instance_budget_gives_unknown():
    ax = [parse_equation("(= (f x x) x)", F2)]
    res = cc_prove(ax, parse_equation("(= (f (f x x) x) x)", F2), depth=2, max_instances=1)
    assert res.status == UNKNOWN and res.reason.startswith("budget")


def test_node_budget_gives_unknown():
    ax = [parse_equation("(= (f x y) (f y (f x y)))", F2)]
    res = cc_prove(ax, parse_equation("(= (f x y) x)", F2), depth=3, node_budget=8)
    assert res.status == UNKNOWN


def _ground(draw, depth):
    if depth == 0 or draw(st.booleans()):
        return Var(draw(st.sampled_from("abc")))
    return App("f", [_ground(draw, depth - 1), _ground(draw, depth - 1)])


@st.composite
def ground_problems(draw):
    terms = [_ground(draw, 3) for _ in range(draw(st.integers(2, 6)))]
    merges = draw(st.lists(st.tuples(st.integers(0, len(terms) - 1), st.integers(0, len(terms) - 1)),
                           max_size=4))
    return terms, merges


@given(ground_problems())
@settings(max_examples=100, deadline=None)
def test_closure_invariant(problem):
    terms, merges = problem
    s = ProofSession()
    ids = [s.add(t) for t in terms]
    for i, j in merges:
        s.union(ids[i], ids[j])
    s.close()
    assert s.is_congruence_closed()
    # merged terms stay merged, and congruent parents follow
    for i, j in merges:
        assert s.find(ids[i]) == s.find(ids[j])
        a = s.add(App("f", [terms[i], Var("a")]))
        b = s.add(App("f", [terms[j], Var("a")]))
        s.close()
        assert s.find(a) == s.find(b)


def test_budget_in_session():
    s = ProofSession(node_budget=2)
    s.add(Var("a"))
    s.add(Var("b"))
    try:
        s.add(Var("c"))
    except BudgetExceeded:
        pass
    else:
        raise AssertionError("budget not enforced")


def test_linear_constraints_conflict():
    # f(x, y) = x and f(x, y) = y force 0 = 1
    sys = EquationSystem(F2, [parse_equation("(= (f x y) x)", F2), parse_equation("(= (f x y) y)", F2)])
    assert linear_constraints(sys, 2) is None
    assert random_linear_model(sys, 2) is None
    assert list(linear_models(sys, 2)) == []


def test_maltsev_models_on_two_elements():
    sys = builtin_system("maltsev")
    models = list(linear_models(sys, 2))
    # 8 cells, 6 forced by the two equations
    assert len(models) == 4
    assert all(satisfies(A, sys) for A in models)
    tables = {tuple(A.ops["m"].table) for A in models}
    assert tuple(xor3().ops["xor3"].table) in tables


@given(st.sampled_from(["maltsev", "nu", "wnu", "siggers6", "double_loop"]), st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_random_models_satisfy_axioms(name, seed):
    sys = builtin_system(name)
    A = random_linear_model(sys, 3, seed)
    assert A is not None and satisfies(A, sys)


def test_audit_on_unsound_goal():
    sys = builtin_system("nu", 3)
    x, y = Var("x"), Var("y")
    # NU forces u(x, y, y) = y, so this fails whenever x != y
    bogus = Equation(App("u", [x, y, y]), x)
    assert not any(audit(sys, bogus, seeds=range(5)))


def test_suite_shape():
    goals = suite_goals()
    names = [g.name for g in goals]
    assert len(names) == len(set(names))
    assert {g.group for g in goals} == {"taylor_pair", "double_to_strong", "strong_to_condition5",
                                        "condition5_to_terminator"}


def test_derivation_suite():
    rep = verify_derivation_suite()
    assert rep.all_proved, rep.failures()
    assert all(e.result.depth <= 2 for e in rep.entries)
    assert rep.audits_pass
    assert rep.ablation_broken == rep.idempotency_goals
    assert rep.idempotency_goals == {"taylor_pair_eq1", "substitution_b~c", "substitution_a~d"}
    json.dumps(rep.to_json())


def test_countermodel_maltsev_to_nu():
    res = find_countermodel(builtin_system("maltsev"), builtin_system("nu", 3))
    assert res
    assert list(res.algebra.ops["m"].table) == list(xor3().ops["xor3"].table)
    assert res.replay()


def test_no_countermodel_maltsev_to_wnu():
    res = find_countermodel(builtin_system("maltsev"), builtin_system("wnu", 3))
    assert not res and not res.inconclusive
    assert res.candidates_tried == 4


def test_no_countermodel_for_same_condition():
    sys = builtin_system("nu", 3)
    assert not find_countermodel(sys, sys)


def test_goal_witness_for_majority():
    w = goal_witness(majority(), builtin_system("nu", 3))
    assert w is not None
    assert satisfies(FiniteAlgebra(2, w), builtin_system("nu", 3))
