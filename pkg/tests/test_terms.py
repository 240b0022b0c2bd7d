import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from taylorlab.errors import ArityError, ParseError
from taylorlab.terms import (
    App,
    Equation,
    EquationSystem,
    Signature,
    TermFunction,
    Var,
    app,
    inline,
    parse_equation,
    parse_term,
    star_compose,
    to_sexpr,
)

SIG = {"maj": 3, "m": 3, "f": 2, "g": 1}


def test_parse_flat_application():
    t = parse_term("(maj x y x)", SIG)
    assert t.head == "maj"
    assert [a.name for a in t.args] == ["x", "y", "x"]
    assert t == app("maj", "x", "y", "x")


def test_parse_arity_mismatch():
    with pytest.raises(ArityError):
        parse_term("(maj x y)", SIG)


def test_parse_unbalanced():
    with pytest.raises(ParseError) as info:
        parse_term("(m x (m y x z) z", SIG)
    assert info.value.position is not None


def test_parse_nested_depth():
    t = parse_term("(m x (m y x z) z)", SIG)
    assert t.depth() == 2
    assert t.args[1].head == "m"


def test_undeclared_identifiers_are_variables():
    t = parse_term("(f u v)", SIG)
    assert t.variables() == ("u", "v")


def test_hash_consing_shares_identity():
    a = parse_term("(m x (f y y) z)", SIG)
    b = parse_term("(m x (f y y) z)", SIG)
    assert a is b
    assert App("f", [Var("y"), Var("y")]) is a.args[1]


def test_equation_text_roundtrip():
    eq = parse_equation("(= (f (f x x) x) x)", SIG)
    assert str(eq) == "(= (f (f x x) x) x)"


def test_system_json_roundtrip():
    text = json.dumps({"symbols": {"t": 6}, "equations": ["(= (t x y y y x x) (t y x y x y x))"]})
    sys = EquationSystem.from_json(text)
    assert EquationSystem.from_json(sys.to_json()) == sys


def test_system_rejects_undeclared_head():
    with pytest.raises(ArityError):
        EquationSystem.from_json({"symbols": {"t": 2}, "equations": ["(= (t x y) (q x y))"]})


def test_signature_rejects_zero_arity():
    with pytest.raises(ArityError):
        Signature({"c": 0})


def test_star_compose_three_by_two():
    tf = star_compose("f3", "g2", 3, 2)
    assert tf.arity == 6
    assert tf.params == ("x_1_1", "x_1_2", "x_2_1", "x_2_2", "x_3_1", "x_3_2")
    assert to_sexpr(tf.body) == "(f3 (g2 x_1_1 x_1_2) (g2 x_2_1 x_2_2) (g2 x_3_1 x_3_2))"


def test_star_compose_unary():
    tf = star_compose("f", "g", 1, 1)
    assert to_sexpr(tf.body) == "(f (g x_1_1))"


def test_star_compose_twelve_cubed():
    inner = star_compose("t", "t", 12, 12)
    outer = star_compose("t", inner, 12)
    assert outer.arity == 1728
    # the DAG stays small even though the printed term is large
    assert len(outer.body.nodes()) == 1 + 12 + 144 + 1728


def test_star_blocks_recover_factors():
    f = TermFunction(("a", "b"), app("f", "b", "a"))
    g = TermFunction(("u", "v", "w"), app("g", "w", "u", "v"))
    tf = star_compose(f, g)
    body = tf.body
    # outer head and argument order come from f, inner layout from g
    assert body.head == "f"
    assert to_sexpr(body.args[0]) == "(g x_2_3 x_2_1 x_2_2)"
    assert to_sexpr(body.args[1]) == "(g x_1_3 x_1_1 x_1_2)"


def test_inline_symbol_binding():
    t = parse_term("(s x y)", {"s": 2})
    out = inline(t, {"s": TermFunction(("a", "b"), app("f", "b", "a"))})
    assert to_sexpr(out) == "(f y x)"


names = st.sampled_from(["x", "y", "z"])


def terms(depth=3):
    leaves = names.map(Var)
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            st.tuples(sub, sub).map(lambda p: App("f", p)),
            st.tuples(sub, sub, sub).map(lambda p: App("m", p)),
            sub.map(lambda a: App("g", [a])),
        ),
        max_leaves=12,
    )


@given(terms())
@settings(max_examples=200, deadline=None)
def test_sexpr_roundtrip_is_identity(t):
    assert parse_term(to_sexpr(t), SIG) is t


@given(terms(), terms())
@settings(max_examples=100, deadline=None)
def test_equation_roundtrip(a, b):
    eq = Equation(a, b)
    assert parse_equation(str(eq), SIG) == eq
