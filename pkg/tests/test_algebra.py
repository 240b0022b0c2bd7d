import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import brute_taylor, nu_instance, scramble_outside

from taylorlab.algebra import (
    FiniteAlgebra,
    NotTaylor,
    OperationTable,
    Relation,
    TaylorReport,
    absorbs,
    check_shape,
    compatible,
    eval_term,
    first_violation,
    is_taylor_operation,
    nu_from_semiabsorbing,
    produces_enough_absorption,
    relation_absorbs_square,
    satisfies,
    semiabsorbing_ii_prime,
)
from taylorlab.conditions import builtin_system
from taylorlab.errors import ArityError, ParseError, PreconditionError
from taylorlab.library import majority, median, xor3
from taylorlab.terms import TermFunction, parse_term

MAJ = majority().ops["maj"]
XOR = xor3().ops["xor3"]
PI1 = OperationTable.projection(2, 3, 0)
EDGE = Relation.of(2, [(0, 1), (1, 0)])


def test_table_layout_row_major():
    op = OperationTable.from_function(3, 2, lambda a, b: (a + 2 * b) % 3)
    assert op.index((2, 1)) == 7
    assert op(2, 1) == op.table[7] == 1


def test_table_length_checked():
    with pytest.raises(ArityError):
        OperationTable(2, 3, [0, 1])


def test_algebra_json_roundtrip():
    A = FiniteAlgebra.from_json('{"size":2,"ops":{"maj":{"arity":3,"table":[0,0,0,1,0,1,1,1]}}}')
    assert A.ops["maj"] == MAJ
    assert FiniteAlgebra.from_json(A.to_json()).ops["maj"] == MAJ


def test_algebra_json_error_has_position():
    with pytest.raises(ParseError) as info:
        FiniteAlgebra.from_json('{"size":2,"ops":{"maj":')
    assert info.value.position is not None


def test_relation_json_roundtrip():
    R = Relation.from_json('{"power":2,"tuples":[[0,1],[1,0]]}')
    assert R == EDGE
    assert Relation.from_json(R.to_json()) == R


def test_eval_median_term():
    A = median()
    t = parse_term("(m x y z)", {"m": 3})
    assert eval_term(A, t) == A.ops["m"]


def test_eval_variable_is_projection():
    A = median()
    assert eval_term(A, TermFunction(("x", "y"), parse_term("x", {}))) == OperationTable.projection(3, 2, 0)


def test_eval_idempotent_diagonal():
    A = median()
    t = parse_term("(m x x x)", {"m": 3})
    assert list(eval_term(A, t).table) == [0, 1, 2]


def test_xor_satisfies_maltsev():
    m = TermFunction(("x", "y", "z"), parse_term("(xor3 x y z)", {"xor3": 3}))
    assert satisfies(xor3(), builtin_system("maltsev"), {"m": m})


def test_majority_satisfies_nu():
    assert satisfies(majority(), builtin_system("nu", 3), {"u": TermFunction.of_symbol("maj", 3)})


def test_projection_fails_maltsev():
    A = FiniteAlgebra(2, {"p": PI1})
    bad = first_violation(A, builtin_system("maltsev"), {"m": TermFunction.of_symbol("p", 3)})
    assert bad is not None
    eq, env = bad
    assert str(eq) == "(= (m x x y) y)" and env["x"] != env["y"]


def test_unbound_symbol():
    with pytest.raises(ArityError):
        satisfies(majority(), builtin_system("maltsev"))


def test_shapes():
    assert check_shape(MAJ, "nu")
    assert check_shape(XOR, "cyclic")
    assert not check_shape(PI1, "wnu")
    assert check_shape(XOR, "idempotent")
    with pytest.raises(ArityError):
        check_shape(OperationTable.projection(2, 2, 0), "nu")


def test_taylor_operation_examples():
    rep = is_taylor_operation(XOR)
    assert isinstance(rep, TaylorReport) and rep.idempotent
    assert satisfies(FiniteAlgebra(2, {"xor3": XOR}), rep.system.equations(),
                     {"t": TermFunction.of_symbol("xor3", 3)})
    assert isinstance(is_taylor_operation(MAJ), TaylorReport)
    res = is_taylor_operation(PI1)
    assert isinstance(res, NotTaylor) and res.coordinate == 1


def test_non_idempotent_taylor_is_flagged():
    neg = OperationTable.from_function(2, 2, lambda a, b: 1 - (a & b))
    rep = is_taylor_operation(neg)
    assert isinstance(rep, TaylorReport) and not rep.idempotent


def test_taylor_matches_enumeration_on_all_ternary_boolean_ops():
    for code in range(256):
        op = OperationTable(2, 3, [(code >> i) & 1 for i in range(8)])
        assert bool(is_taylor_operation(op)) == brute_taylor(op), code


def test_nu_implies_taylor_on_ternary_boolean_ops():
    for code in range(256):
        op = OperationTable(2, 3, [(code >> i) & 1 for i in range(8)])
        if check_shape(op, "nu"):
            assert is_taylor_operation(op)


def test_compatibility_examples():
    assert compatible(MAJ, EDGE)
    assert compatible(XOR, EDGE)
    assert compatible(MAJ, Relation.of(2, [(0, 1)]))


def test_majority_incompatible_with_triangle():
    K3 = Relation.of(3, [(a, b) for a in range(3) for b in range(3) if a != b])
    assert not compatible(median().ops["m"], K3)


def test_absorption_examples():
    assert absorbs({0, 1}, {1}, MAJ)
    assert absorbs({1}, {0, 1}, MAJ)
    assert not absorbs({1}, {0, 1}, XOR)


def test_enough_absorption_examples():
    assert produces_enough_absorption(EDGE, MAJ)
    assert not produces_enough_absorption(EDGE, XOR)
    assert produces_enough_absorption(Relation.of(2, []), XOR)
    with pytest.raises(PreconditionError):
        produces_enough_absorption(Relation.of(2, [(0, 1)]), MAJ)


def test_semiabsorbing_examples():
    assert semiabsorbing_ii_prime(EDGE, MAJ)
    assert not semiabsorbing_ii_prime(EDGE, XOR)
    assert semiabsorbing_ii_prime(Relation.of(2, []), XOR)


def test_nu_from_semiabsorbing_examples():
    assert nu_from_semiabsorbing(MAJ) == MAJ
    u = nu_from_semiabsorbing(PI1)
    assert check_shape(u, "nu")
    # binary input gets a redundant argument
    u2 = nu_from_semiabsorbing(OperationTable.projection(3, 2, 0))
    assert u2.arity == 3 and check_shape(u2, "nu")


@given(st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_prop_chain_on_nu_instances(seed):
    inst = nu_instance(seed)
    assert compatible(inst.f, inst.R)
    assert semiabsorbing_ii_prime(inst.R, inst.f)
    assert produces_enough_absorption(inst.R, inst.f)
    g = scramble_outside(inst, seed)
    assert semiabsorbing_ii_prime(inst.R, g)
    u = nu_from_semiabsorbing(g)
    assert check_shape(u, "nu") and compatible(u, inst.R)


@given(st.integers(0, 10_000))
@settings(max_examples=100, deadline=None)
def test_square_absorption_implies_semiabsorbing(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 4))
    op = OperationTable(n, 3, [t[0] if len(set(t)) == 1 else int(rng.integers(n))
                               for t in itertools.product(range(n), repeat=3)])
    pairs = [(a, b) for a in range(n) for b in range(n) if rng.random() < 0.6]
    R = Relation.of(n, pairs).symmetric_closure()
    if relation_absorbs_square(R, op) and compatible(op, R):
        assert semiabsorbing_ii_prime(R, op)
    if semiabsorbing_ii_prime(R, op):
        assert produces_enough_absorption(R, op)
