import itertools
import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from taylorlab.algebra import satisfies
from taylorlab.conditions import (
    DOUBLE_LOOP_COLUMNS,
    FORBIDDEN_COLUMNS,
    ColumnMatrix,
    NotTaylorShape,
    TaylorSystem,
    TrivialInput,
    builtin_system,
    check_trivial,
    is_taylor_shape,
    normalize_two_equation,
    single_nontrivial_equation,
    system_from_matrix,
    taylor_to_pair_system,
)
from taylorlab.errors import ShapeError
from taylorlab.library import majority, meet
from taylorlab.terms import App, Equation, EquationSystem, Signature, Var, star_compose

GOLDEN = json.loads((Path(__file__).parent / "golden" / "builtin_systems.json").read_text())


@pytest.mark.parametrize("key", sorted(GOLDEN))
def test_builtin_systems_match_golden(key):
    name, _, rest = key.partition("(")
    params = [int(p) for p in rest.rstrip(")").split(",")] if rest else []
    assert builtin_system(name, *params).to_json() == GOLDEN[key]


def test_builtin_displayed_forms():
    assert builtin_system("siggers6").to_json()["equations"] == ["(= (s x y x z y z) (s y x z x z y))"]
    assert builtin_system("siggers4").to_json()["equations"] == ["(= (s r a r e) (s a r e a))"]
    assert builtin_system("weak_3cube").to_json()["equations"] == [
        "(= (t x y y y x x) (t y x y x y x))",
        "(= (t y x y x y x) (t y y x x x y))",
    ]
    assert builtin_system("weak_3edge").to_json()["equations"] == [
        "(= (e y y x x) (e y x y x))",
        "(= (e y x y x) (e x x x y))",
    ]


def test_double_loop_rows_are_lexicographic():
    rows = ["xxxxxxyyyyyy", "xxyyyyxxxxyy", "xyxxyyxxyyxy", "yxxyxyxyxyyx"]
    assert ["".join(c[r] for c in DOUBLE_LOOP_COLUMNS) for r in range(4)] == rows
    assert list(DOUBLE_LOOP_COLUMNS) == sorted(DOUBLE_LOOP_COLUMNS)
    assert len(FORBIDDEN_COLUMNS) == 4


def test_builtin_rejects_unknown_and_bad_params():
    with pytest.raises(ValueError):
        builtin_system("nonsense")
    with pytest.raises(Exception):
        builtin_system("wnu", 1)


NONTRIVIAL = ["maltsev", "siggers6", "siggers4", "double_loop", "strong_double_loop",
              "weak_3cube", "terminator", "strong_terminator", "weak_3edge", "condition5"]


@pytest.mark.parametrize("name", NONTRIVIAL)
def test_named_conditions_are_nontrivial(name):
    assert check_trivial(builtin_system(name)) is None


def test_wnu_and_cyclic_nontrivial():
    for n in (2, 3, 5):
        assert check_trivial(builtin_system("wnu", n)) is None
        assert check_trivial(builtin_system("cyclic", n)) is None


def test_associativity_witness():
    w = check_trivial(builtin_system("associativity"))
    assert w is not None and w.choice == {"n": 1}


def test_idempotency_trivial():
    w = check_trivial(builtin_system("idempotency", 3))
    assert w.choice == {"f": 1}


def _brute_trivial(sys):
    symbols = sys.symbols_used()
    for combo in itertools.product(*[range(1, sys.signature[s] + 1) for s in symbols]):
        choice = dict(zip(symbols, combo))

        def red(t):
            while not t.is_var:
                t = t.args[choice[t.head] - 1]
            return t.name

        if all(red(e.lhs) == red(e.rhs) for e in sys.equations):
            return choice
    return None


SMALL_SIG = Signature({"f": 2, "g": 3})


def small_terms():
    return st.recursive(
        st.sampled_from("xyz").map(Var),
        lambda sub: st.one_of(
            st.tuples(sub, sub).map(lambda a: App("f", a)),
            st.tuples(sub, sub, sub).map(lambda a: App("g", a)),
        ),
        max_leaves=6,
    )


@given(st.lists(st.tuples(small_terms(), small_terms()), min_size=1, max_size=3))
@settings(max_examples=300, deadline=None)
def test_check_trivial_matches_projection_enumeration(pairs):
    sys = EquationSystem(SMALL_SIG, [Equation(a, b) for a, b in pairs])
    got = check_trivial(sys)
    want = _brute_trivial(sys)
    assert (got is None) == (want is None)
    if got is not None:
        # first witness in mixed-radix order
        assert got.choice == want


def _maltsev_taylor_rows():
    sys = EquationSystem.from_json({"symbols": {"m": 3}, "equations": [
        "(= (m x x x) (m y y x))", "(= (m x x x) (m y y x))", "(= (m x x x) (m x y y))"]})
    return sys


def test_maltsev_derived_taylor_shape():
    ts = is_taylor_shape(_maltsev_taylor_rows())
    assert isinstance(ts, TaylorSystem)
    assert set(ts.coverage) == {0, 1, 2}


def test_uncovered_coordinate_reported():
    sys = EquationSystem.from_json({"symbols": {"t": 3}, "equations": [
        "(= (t x x y) (t y x x))", "(= (t y x y) (t x x x))"]})
    res = is_taylor_shape(sys)
    assert isinstance(res, NotTaylorShape) and res.coordinate == 2


def test_siggers4_substitution_rows_are_taylor():
    sys = EquationSystem.from_json({"symbols": {"s": 4}, "equations": [
        "(= (s x y x x) (s y x x y))", "(= (s y x y x) (s x y x x))",
        "(= (s x y x y) (s y x y y))", "(= (s y y y x) (s y y x y))"]})
    assert isinstance(is_taylor_shape(sys), TaylorSystem)


def test_taylor_shape_rejects_nonlinear():
    sys = EquationSystem.from_json({"symbols": {"t": 2}, "equations": ["(= (t (t x y) y) x)"]})
    with pytest.raises(ShapeError):
        is_taylor_shape(sys)


@given(st.integers(2, 7), st.data())
@settings(max_examples=100, deadline=None)
def test_row_deletion_uncovers_its_coordinate(n, data):
    # row i differs only at coordinate i, so each row is the unique cover of one coordinate
    rows = []
    for i in range(n):
        rest = data.draw(st.lists(st.sampled_from("xy"), min_size=n, max_size=n))
        lhs = list(rest)
        rhs = list(rest)
        lhs[i], rhs[i] = "x", "y"
        rows.append((lhs, rhs))
    def system(rs):
        return EquationSystem(Signature({"t": n}), [
            Equation(App("t", [Var(v) for v in l]), App("t", [Var(v) for v in r])) for l, r in rs])
    assert isinstance(is_taylor_shape(system(rows), "t"), TaylorSystem)
    k = data.draw(st.integers(0, n - 1))
    res = is_taylor_shape(system(rows[:k] + rows[k + 1:]), "t")
    assert isinstance(res, NotTaylorShape) and res.coordinate == k + 1


def test_pair_system_from_maltsev():
    ts = is_taylor_shape(_maltsev_taylor_rows())
    pair = taylor_to_pair_system(ts)
    assert pair.signature["s"] == 9 and len(pair) == 2
    assert check_trivial(pair) is None
    first = pair.equations[0]
    assert [a.name for a in first.lhs.args] == ["x1", "x2", "x3"] * 3
    assert [a.name for a in first.rhs.args] == ["x1"] * 3 + ["x2"] * 3 + ["x3"] * 3


def test_pair_system_binary():
    sys = EquationSystem.from_json({"symbols": {"w": 2}, "equations": ["(= (w x y) (w y x))"]})
    pair = taylor_to_pair_system(is_taylor_shape(sys))
    assert pair.signature["s"] == 4
    assert check_trivial(pair) is None


def test_pair_system_holds_for_star_square():
    # maj*maj satisfies both equations over the majority algebra
    ts = is_taylor_shape(builtin_system("wnu", 3))
    pair = taylor_to_pair_system(ts)
    s = star_compose("maj", "maj", 3, 3)
    assert satisfies(majority(), pair, {"s": s})


def test_single_nontrivial_equation_shape():
    ts = is_taylor_shape(_maltsev_taylor_rows())
    eq = single_nontrivial_equation(ts)
    assert eq.lhs.head == "m" and eq.rhs.head == "m"
    assert eq.lhs.depth() == 2 and eq.rhs.depth() == 2
    single = EquationSystem(Signature({"m": 3}), [eq])
    assert check_trivial(single) is None


def test_normalize_canonical_is_fixed_point():
    res = normalize_two_equation(builtin_system("double_loop"))
    assert res.slot_of_position == tuple(range(12))
    assert res.system == builtin_system("double_loop")


def test_normalize_detects_trivial_column():
    sys = EquationSystem.from_json({"symbols": {"t": 3}, "equations": [
        "(= (t x x y) (t x y x))", "(= (t y x x) (t y y x))"]})
    res = normalize_two_equation(sys)
    assert isinstance(res, TrivialInput) and res.coordinate == 1
    assert check_trivial(sys).choice == {"t": 1}


def test_normalize_with_duplicates_pads_dummies():
    cols = [DOUBLE_LOOP_COLUMNS[k] for k in (0, 3, 3, 7, 11, 0)]
    sys = system_from_matrix(ColumnMatrix(tuple(cols)))
    res = normalize_two_equation(sys)
    assert res.slot_of_position == (0, 3, 3, 7, 11, 0)
    assert check_trivial(res.system) is None
    d = res.double_loop_from("t", 6)
    assert d.arity == 12
    used = {v for v in d.body.variables()}
    assert used == {"w1", "w4", "w8", "w12"}


def test_normalized_term_satisfies_double_loop():
    # binary Taylor term: commutativity of meet gives a 4-ary pair system
    ts = is_taylor_shape(builtin_system("wnu", 2))
    pair = taylor_to_pair_system(ts)
    res = normalize_two_equation(pair)
    s = star_compose("meet", "meet", 2, 2)
    assert satisfies(meet(), pair, {"s": s})
    assert satisfies(meet(), builtin_system("double_loop"), {"d": res.double_loop_from(s)})


def test_normalize_rejects_wrong_shape():
    with pytest.raises(ShapeError):
        normalize_two_equation(builtin_system("strong_double_loop"))
