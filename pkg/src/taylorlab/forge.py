"""Explicit term synthesis: Siggers, double loop, strong double loop, weak 3-cube, terminator.

Search-based constructions run witnessed closures inside finite powers of
the source algebra; purely syntactic ones build terms directly.  Every
result with status ``Found`` has been model-checked on the source algebra.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .algebra import FiniteAlgebra, OperationTable, check_shape, eval_term, first_violation, satisfies
from .closure import DEFAULT_CAP, equal_blocks, extract_witness, generate_closure, projections
from .conditions import (
    DOUBLE_LOOP_COLUMNS,
    DOUBLE_LOOP_ROWS,
    SLOT_OF_COLUMN,
    X,
    Y,
    ColumnMatrix,
    builtin_system,
)
from .errors import PreconditionError
from .terms import App, Term, TermFunction, Var, inline, to_sexpr

FOUND, NOT_TAYLOR, INCONCLUSIVE = "Found", "NotTaylor", "Inconclusive"


@dataclass
class SynthesisResult:
    """``term`` is a function of explicit parameters over the source algebra's operations."""

    term: TermFunction | None
    verified: bool
    stats: dict
    status: str

    def to_json(self) -> dict:
        term = None
        if self.term is not None:
            term = {"params": list(self.term.params), "body": to_sexpr(self.term.body)}
        return {"status": self.status, "term": term, "verified": self.verified, "stats": self.stats}


def _selected(A: FiniteAlgebra, ops: Sequence[str] | str | None) -> FiniteAlgebra:
    if ops is None:
        return A
    if isinstance(ops, str):
        ops = [ops]
    missing = [o for o in ops if o not in A.ops]
    if missing:
        raise PreconditionError(f"unknown operations {missing}", missing)
    return A.reduct(ops)


def _binary_generators(size: int) -> tuple[np.ndarray, np.ndarray]:
    """The binary projections x, y as rows of A^(size^2)."""
    p = projections(size, 2)
    return p[0], p[1]


def _swap(size: int) -> np.ndarray:
    """Coordinate permutation of A^(size^2) realizing the automorphism x <-> y."""
    grid = np.arange(size * size).reshape(size, size)
    return grid.T.reshape(-1)


def _closure_stats(c) -> dict:
    return {"elements": len(c), "rounds": list(c.rounds), "complete": c.complete,
            "elapsed": round(c.elapsed, 4)}


# ---------------------------------------------------------------------------
# Siggers from NU


def siggers_from_nu(A: FiniteAlgebra, op: str, cap: int = DEFAULT_CAP) -> SynthesisResult:
    """A 6-ary term t over {op} with t(x,y,x,z,y,z) = t(y,x,z,x,z,y) in A.

    The pair closure of (x,y),(y,x),(x,z),(z,x),(y,z),(z,y) is run in the
    square of the ternary clone slice; a pair with equal halves is a
    Siggers term.
    """
    t0 = time.perf_counter()
    if op not in A.ops:
        raise PreconditionError(f"unknown operation {op!r}", op)
    if A.ops[op].arity < 3 or not check_shape(A.ops[op], "nu"):
        raise PreconditionError(f"operation {op!r} is not a near unanimity operation", op)
    B = A.reduct([op])
    x, y, z = projections(A.size, 3)
    width = x.size
    gens = np.array([np.concatenate(p) for p in ((x, y), (y, x), (x, z), (z, x), (y, z), (z, y))])
    c = generate_closure(B, gens, cap=cap, target=equal_blocks([[0, 1]], width))
    stats = {"pair_closure": _closure_stats(c), "power": 2 * width}
    if c.hit is None:
        stats["elapsed"] = round(time.perf_counter() - t0, 4)
        return SynthesisResult(None, False, stats, INCONCLUSIVE)
    params = tuple(f"g{j}" for j in range(1, 7))
    term = TermFunction(params, extract_witness(c, c.hit))
    verified = satisfies(A, builtin_system("siggers6"), {"s": term})
    stats["elapsed"] = round(time.perf_counter() - t0, 4)
    if not verified:
        raise AssertionError("Siggers witness failed verification")
    return SynthesisResult(term, True, stats, FOUND)


# ---------------------------------------------------------------------------
# double loop from a Taylor algebra


def double_loop_from_taylor(A: FiniteAlgebra, ops: Sequence[str] | str | None = None,
                            cap: int = DEFAULT_CAP) -> SynthesisResult:
    """A 12-ary double loop term over the selected operations, or a certificate that none exists.

    Q is generated in the fourth power of the binary clone slice by the
    twelve columns (a1,a2,b1,b2) with a1 != a2 or b1 != b2, in slot order.
    An element (u,u,v,v) of Q is a double loop term.  When Q is closed and
    contains no such element the selected reduct is not Taylor.
    """
    t0 = time.perf_counter()
    B = _selected(A, ops)
    bad = [n for n, o in B.ops.items() if not o.is_idempotent()]
    if bad:
        raise PreconditionError(f"operations {bad} are not idempotent", bad)
    x, y = _binary_generators(A.size)
    width = x.size
    pick = {X: x, Y: y}
    gens = np.array([np.concatenate([pick[v] for v in col]) for col in DOUBLE_LOOP_COLUMNS])
    free = generate_closure(B, np.array([x, y]), cap=cap)
    c = generate_closure(B, gens, cap=cap, target=equal_blocks([[0, 1], [2, 3]], width))
    stats = {"binary_slice": len(free), "quad_closure": _closure_stats(c), "power": 4 * width}
    if c.hit is None:
        stats["elapsed"] = round(time.perf_counter() - t0, 4)
        if c.complete:
            target = equal_blocks([[0, 1], [2, 3]], width)
            if target(c.elements).any():
                raise AssertionError("closure missed a double loop element")
            return SynthesisResult(None, False, stats, NOT_TAYLOR)
        return SynthesisResult(None, False, stats, INCONCLUSIVE)
    params = tuple(f"g{j}" for j in range(1, 13))
    term = TermFunction(params, extract_witness(c, c.hit))
    verified = satisfies(A, builtin_system("double_loop"), {"d": term})
    stats["elapsed"] = round(time.perf_counter() - t0, 4)
    if not verified:
        raise AssertionError("double loop witness failed verification")
    return SynthesisResult(term, True, stats, FOUND)


# ---------------------------------------------------------------------------
# strong double loop from a double loop (syntactic)


def xor_var(a: str, b: str) -> str:
    """x+x = y+y = x and x+y = y+x = y."""
    return X if a == b else Y


@dataclass(frozen=True)
class SubstitutionScheme:
    """Four substitutions of d*d*d by x and y, indexed by (i, j, k) (outer, middle, inner)."""

    e1: tuple[str, ...] = DOUBLE_LOOP_ROWS[0]
    e2: tuple[str, ...] = DOUBLE_LOOP_ROWS[1]
    f1: tuple[str, ...] = DOUBLE_LOOP_ROWS[2]
    f2: tuple[str, ...] = DOUBLE_LOOP_ROWS[3]

    RULES = ("a", "b", "c", "d")

    def value(self, rule: str, i: int, j: int, k: int) -> str:
        if rule == "a":
            return xor_var(self.e1[j], self.f1[k])
        if rule == "b":
            return xor_var(self.e2[j], self.f1[k])
        if rule == "c":
            return xor_var(self.f1[j], self.e1[i])
        if rule == "d":
            return xor_var(self.f2[j], self.e1[i])
        raise ValueError(f"unknown rule {rule!r}")

    def positions(self):
        return itertools.product(range(12), repeat=3)

    def rows(self) -> tuple[tuple[str, ...], ...]:
        pos = list(self.positions())
        return tuple(tuple(self.value(r, i, j, k) for i, j, k in pos) for r in self.RULES)

    def columns(self) -> ColumnMatrix:
        return ColumnMatrix(tuple(zip(*self.rows())))


def _triple_body(d: str, leaf) -> Term:
    middles = []
    for i in range(12):
        inners = [App(d, [leaf(i, j, k) for k in range(12)]) for j in range(12)]
        middles.append(App(d, inners))
    return App(d, middles)


def triple_star(d: str = "d") -> TermFunction:
    """d*d*d with parameters x_i_j_k (1-based, i outer, k inner), row-major."""
    params = tuple(f"x_{i}_{j}_{k}" for i, j, k in itertools.product(range(1, 13), repeat=3))
    return TermFunction(params, _triple_body(d, lambda i, j, k: Var(f"x_{i + 1}_{j + 1}_{k + 1}")))


def substituted(d: str, values: Sequence[str]) -> Term:
    """d*d*d with its 1728 variables replaced by variable names in row-major order."""
    if len(values) != 1728:
        raise ValueError("d*d*d has 1728 variables")
    return _triple_body(d, lambda i, j, k: Var(values[144 * i + 12 * j + k]))


@dataclass(frozen=True)
class StrongDoubleLoopConstruction:
    term: TermFunction  # 12-ary over {d}
    matrix: ColumnMatrix  # 1728 columns, one per variable of d*d*d
    slots_used: tuple[int, ...]

    def report(self) -> dict:
        counts = self.matrix.pattern_counts()
        return {"positions": len(self.matrix.columns),
                "patterns": {"".join(k): v for k, v in sorted(counts.items())},
                "forbidden": len(self.matrix.forbidden_columns()),
                "slots_used": list(self.slots_used)}


def strong_double_loop_from_double_loop(d: str = "d") -> StrongDoubleLoopConstruction:
    """A 12-ary strong double loop term over a double loop symbol ``d``.

    Each variable of d*d*d receives the column of its four substitutions;
    no column is constant on rows 1-2 and on rows 3-4 simultaneously, so
    identifying variables by column gives a term for the strong system.
    """
    scheme = SubstitutionScheme()
    matrix = scheme.columns()
    bad = matrix.forbidden_columns()
    if bad:
        raise AssertionError(f"substitution produced forbidden columns at {bad[:5]}")
    slots = [SLOT_OF_COLUMN[c] for c in matrix.columns]
    params = tuple(f"w{s}" for s in range(1, 13))
    body = substituted(d, [params[s] for s in slots])
    return StrongDoubleLoopConstruction(TermFunction(params, body), matrix, tuple(sorted(set(slots))))


def compose(tf: TermFunction, binding: Mapping[str, TermFunction | Term]) -> TermFunction:
    return TermFunction(tf.params, inline(tf.body, binding))


# ---------------------------------------------------------------------------
# weak 3-cube from a strong double loop


def _as_d(A: FiniteAlgebra, d: TermFunction | str) -> OperationTable:
    if isinstance(d, str):
        return A.ops[d]
    return eval_term(A, d)


def _require_strong_double_loop(A: FiniteAlgebra, d: TermFunction | str):
    binding = None if isinstance(d, str) else {"d": d}
    sys = builtin_system("strong_double_loop")
    if isinstance(d, str) and d != "d":
        binding = {"d": TermFunction.of_symbol(d, 12)}
    bad = first_violation(A, sys, binding)
    if bad is not None:
        raise PreconditionError("term does not satisfy the strong double loop equations", bad)


CUBE_GENERATORS = ("xyy", "yxy", "yyx", "yxx", "xyx", "xxy")


def _cube_closure(A: FiniteAlgebra, dop: OperationTable, cap: int, target=None):
    x, y = _binary_generators(A.size)
    pick = {X: x, Y: y}
    gens = np.array([np.concatenate([pick[v] for v in g]) for g in CUBE_GENERATORS])
    B = FiniteAlgebra(A.size, {"d": dop})
    return generate_closure(B, gens, cap=cap, target=target), x.size


def weak_3cube_from_strong_double_loop(A: FiniteAlgebra, d: TermFunction | str,
                                       cap: int = DEFAULT_CAP) -> SynthesisResult:
    """A 6-ary weak 3-cube term from a strong double loop term ``d`` of ``A``.

    Q is generated in the cube of the binary slice by the six triples with
    mixed coordinates; a constant triple in Q is a weak 3-cube term over d.
    """
    t0 = time.perf_counter()
    _require_strong_double_loop(A, d)
    dop = _as_d(A, d)
    x, y = _binary_generators(A.size)
    free = generate_closure(FiniteAlgebra(A.size, {"d": dop}), np.array([x, y]), cap=cap)
    c, width = _cube_closure(A, dop, cap, target=equal_blocks([[0, 1, 2]], width=A.size ** 2))
    stats = {"binary_slice": len(free), "cube_closure": _closure_stats(c), "power": 3 * width}
    if c.hit is None:
        stats["elapsed"] = round(time.perf_counter() - t0, 4)
        return SynthesisResult(None, False, stats, INCONCLUSIVE)
    params = tuple(f"g{j}" for j in range(1, 7))
    over_d = TermFunction(params, extract_witness(c, c.hit))
    dfun = TermFunction.of_symbol(d, 12) if isinstance(d, str) else d
    term = compose(over_d, {"d": dfun})
    verified = satisfies(A, builtin_system("weak_3cube"), {"t": term})
    stats["over_d"] = to_sexpr(over_d.body)
    stats["elapsed"] = round(time.perf_counter() - t0, 4)
    if not verified:
        raise AssertionError("weak 3-cube witness failed verification")
    return SynthesisResult(term, True, stats, FOUND)


@dataclass
class RecipeReport:
    memberships: dict[str, bool]
    z_constant: bool
    search_constant: bool
    holds: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _claim_elements(dot, x, y):
    x1 = dot(dot(dot(x, y), x), dot(y, dot(x, y)))
    y1 = dot(dot(dot(y, x), y), dot(x, dot(y, x)))
    return x1, y1


def explicit_weak3cube_recipe(A: FiniteAlgebra, d: TermFunction | str) -> RecipeReport:
    """Cross-check the explicit construction of a constant triple in Q.

    With x.y = d(x,x,x,x,x,x,y,y,y,y,y,y): x1 = ((xy)x)(y(xy)), y1 its
    swap, x2 = (x1y1)(y1x1), y2 = (y1x1)(x1y1) and
    z = d(y2,y2,x2,x2,x2,y2,x2,x2,x2,y2,x2,x2).  The six triples over x2,
    y2, x1, y1, the two d-applications through z and (z,z,z) must all lie
    in Q.
    """
    _require_strong_double_loop(A, d)
    dop = _as_d(A, d)
    c, width = _cube_closure(A, dop, cap=DEFAULT_CAP)
    if not c.complete:
        raise PreconditionError("cube closure did not close within the cap")
    x, y = _binary_generators(A.size)
    swap = _swap(A.size)

    def dot(u, v):
        return dop.apply([u] * 6 + [v] * 6)

    x1, y1 = _claim_elements(dot, x, y)
    x2, y2 = dot(dot(x1, y1), dot(y1, x1)), dot(dot(y1, x1), dot(x1, y1))
    z = dop.apply([y2, y2, x2, x2, x2, y2, x2, x2, x2, y2, x2, x2])
    val = {"x1": x1, "y1": y1, "x2": x2, "y2": y2}
    checks: dict[str, bool] = {
        "y1=swap(x1)": bool(np.array_equal(y1, x1[swap])),
        "y2=swap(x2)": bool(np.array_equal(y2, x2[swap])),
    }

    def triple(a, b, cc):
        return np.concatenate([a, b, cc])

    six = {"x2y1y1": ("x2", "y1", "y1"), "y2x1y1": ("y2", "x1", "y1"), "y2y1x1": ("y2", "y1", "x1"),
           "y2x1x1": ("y2", "x1", "x1"), "x2y1x1": ("x2", "y1", "x1"), "x2x1y1": ("x2", "x1", "y1")}
    for name, (a, b, cc) in six.items():
        checks[name] = triple(val[a], val[b], val[cc]) in c
    zrow = [y2, y2, x2, x2, x2, y2, x2, x2, x2, y2, x2, x2]
    for label, r2, r3, target in (
        ("z,x1y1,x1y1", [x1] * 6 + [y1] * 6, [x1, x1, y1, y1, y1, y1, x1, x1, x1, x1, y1, y1], dot(x1, y1)),
        ("z,y1x1,y1x1", [y1, x1, y1, y1, x1, x1, y1, y1, x1, x1, y1, x1],
         [x1, y1, y1, x1, y1, x1, y1, x1, y1, x1, x1, y1], dot(y1, x1)),
    ):
        cols_in = all(triple(a, b, cc) in c for a, b, cc in zip(zrow, r2, r3))
        lands = (np.array_equal(dop.apply(r2), target) and np.array_equal(dop.apply(r3), target))
        checks[label] = bool(cols_in and lands and triple(z, target, target) in c)
    z_const = triple(z, z, z) in c
    checks["z,z,z"] = z_const
    const = equal_blocks([[0, 1, 2]], width=A.size ** 2)(c.elements)
    return RecipeReport(checks, z_const, bool(const.any()), all(checks.values()))


@dataclass
class ClaimReport:
    holds: bool
    memberships: dict[str, bool]
    x1: np.ndarray
    witness: Term | None = None

    def to_json(self) -> dict:
        return {"holds": self.holds, "memberships": self.memberships, "x1": self.x1.tolist(),
                "witness": None if self.witness is None else to_sexpr(self.witness)}


EXPANSION_ROWS = (
    ("yx", "y", "x(yx)", "(xy)x", "y", "xy", "xy", "x", "y(xy)", "(yx)y", "x", "yx"),
    ("xy", "xy", "x", "y", "x", "y", "x", "y", "x", "y", "xy", "xy"),
    ("x", "x", "y", "x", "x", "x", "y", "y", "y", "x", "y", "y"),
)


def _expansion(dot, a):
    """[((a1 a2) a3)(a4 (a5 a6))] [((a7 a8) a9)(a10 (a11 a12))]."""
    left = dot(dot(dot(a[0], a[1]), a[2]), dot(a[3], dot(a[4], a[5])))
    right = dot(dot(dot(a[6], a[7]), a[8]), dot(a[9], dot(a[10], a[11])))
    return dot(left, right)


def verify_idempotency_claim(A: FiniteAlgebra, op: OperationTable | str,
                             cap: int = DEFAULT_CAP) -> ClaimReport:
    """Check that an idempotent binary operation puts ((y1x1)(x1y1), x1, x1) into Q.

    Q is generated under the operation by the six mixed triples; the
    triple is also rebuilt column by column from the twelve-column
    expansion, each column checked to lie in Q.
    """
    bop = A.ops[op] if isinstance(op, str) else op
    if bop.arity != 2 or not bop.is_idempotent():
        raise PreconditionError("the claim needs an idempotent binary operation")
    B = FiniteAlgebra(A.size, {"m": bop})
    x, y = _binary_generators(A.size)
    pick = {X: x, Y: y}
    gens = np.array([np.concatenate([pick[v] for v in g]) for g in CUBE_GENERATORS])
    c = generate_closure(B, gens, cap=cap)
    if not c.complete:
        raise PreconditionError("closure did not close within the cap")
    swap = _swap(A.size)

    def dot(u, v):
        return bop.apply([u, v])

    x1, y1 = _claim_elements(dot, x, y)
    top = dot(dot(y1, x1), dot(x1, y1))
    triple = np.concatenate([top, x1, x1])
    named = {"x": x, "y": y, "xy": dot(x, y), "yx": dot(y, x)}
    named.update({"x(yx)": dot(x, named["yx"]), "(xy)x": dot(named["xy"], x),
                  "y(xy)": dot(y, named["xy"]), "(yx)y": dot(named["yx"], y)})
    cols = [np.concatenate([named[r[k]] for r in EXPANSION_ROWS]) for k in range(12)]
    rows = [np.array([named[v] for v in r]) for r in EXPANSION_ROWS]
    rebuilt = np.concatenate([_expansion(dot, r) for r in rows])
    checks = {
        "y1=swap(x1)": bool(np.array_equal(y1, x1[swap])),
        "columns_in_Q": all(col in c for col in cols),
        "expansion_matches": bool(np.array_equal(rebuilt, triple)),
        "triple_in_Q": triple in c,
    }
    i = c.index_of(triple)
    witness = extract_witness(c, i) if i is not None else None
    return ClaimReport(all(checks.values()), checks, x1, witness)


# ---------------------------------------------------------------------------
# q1, q2, c terms and terminator terms (syntactic)


def _fn(params: str, symbol: str, args: str) -> TermFunction:
    return TermFunction(tuple(params), App(symbol, [Var(a) for a in args]))


def q_and_c_from_strong_double_loop(d: str = "d") -> dict[str, TermFunction]:
    """The ternary c and 4-ary q1, q2 as applications of the 12-ary symbol ``d``."""
    return {
        "c": _fn("xyz", d, "yyxzzxxzzxyy"),
        "q1": _fn("uvxy", d, "xxuuuuvvvvyy"),
        "q2": _fn("uvxy", d, "uvxuvyxuvyuv"),
    }


def terminator_from_q(c: TermFunction, q1: TermFunction, q2: TermFunction) -> dict[str, TermFunction]:
    """Strong terminator terms from ternary c and 4-ary q1, q2 satisfying the condition5 equations."""
    x, y, z = Var("x"), Var("y"), Var("z")
    xyz, yxz = ("x", "y", "z"), ("y", "x", "z")
    return {
        "c": c,
        "c1": TermFunction(xyz, q1(x, y, z, z)),
        "c2": TermFunction(xyz, q2(x, y, z, z)),
        "c11": TermFunction(xyz, q1(x, z, y, x)),
        "c21": TermFunction(yxz, q2(x, z, y, x)),
        "c12": TermFunction(xyz, q1(z, x, y, x)),
        "c22": TermFunction(yxz, q2(z, x, y, x)),
    }


# ---------------------------------------------------------------------------
# the full pipeline


@dataclass
class PipelineReport:
    double_loop: SynthesisResult
    strong_double_loop: TermFunction | None = None
    columns: dict = field(default_factory=dict)
    weak_3cube: SynthesisResult | None = None
    condition5_holds: bool = False
    terminator: dict[str, TermFunction] = field(default_factory=dict)
    strong_terminator_holds: bool = False
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return (self.double_loop.status == FOUND and self.weak_3cube is not None
                and self.weak_3cube.verified and self.condition5_holds
                and self.strong_terminator_holds and self.columns.get("forbidden") == 0)

    def summary(self) -> dict:
        return {"double_loop": self.double_loop.status, "columns": self.columns,
                "strong_double_loop": self.strong_double_loop is not None,
                "weak_3cube": None if self.weak_3cube is None else self.weak_3cube.status,
                "condition5": self.condition5_holds,
                "strong_terminator": self.strong_terminator_holds, "ok": self.ok,
                "elapsed": round(self.elapsed, 3)}


def run_pipeline(A: FiniteAlgebra, ops: Sequence[str] | str | None = None,
                 cap: int = DEFAULT_CAP) -> PipelineReport:
    """double loop -> strong double loop -> {weak 3-cube, c/q -> strong terminator} on ``A``."""
    t0 = time.perf_counter()
    dl = double_loop_from_taylor(A, ops, cap)
    rep = PipelineReport(dl)
    if dl.status != FOUND:
        rep.elapsed = time.perf_counter() - t0
        return rep
    con = strong_double_loop_from_double_loop("d")
    rep.columns = con.report()
    strong = compose(con.term, {"d": dl.term})
    rep.strong_double_loop = strong
    rep.weak_3cube = weak_3cube_from_strong_double_loop(A, strong, cap)
    qc = q_and_c_from_strong_double_loop("d")
    qc_a = {k: compose(v, {"d": strong}) for k, v in qc.items()}
    rep.condition5_holds = satisfies(A, builtin_system("condition5"), qc_a)
    term = terminator_from_q(qc["c"], qc["q1"], qc["q2"])
    rep.terminator = {k: compose(v, {"d": strong}) for k, v in term.items()}
    rep.strong_terminator_holds = satisfies(A, builtin_system("strong_terminator"), rep.terminator)
    rep.elapsed = time.perf_counter() - t0
    return rep

