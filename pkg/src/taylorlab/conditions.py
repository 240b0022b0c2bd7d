"""Named equational conditions and syntactic decisions on them.

Everything here is purely syntactic: nothing looks at an algebra.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import ShapeError
from .terms import (
    App,
    Equation,
    EquationSystem,
    Signature,
    Term,
    TermFunction,
    Var,
    chain,
)

X, Y = "x", "y"

# The twelve columns (a1, a2, b1, b2) in {x,y}^4 with a1 != a2 or b1 != b2,
# lexicographic with x < y.  They fix the slot order of every 12-ary
# double loop term in the package.
DOUBLE_LOOP_COLUMNS: tuple[tuple[str, str, str, str], ...] = tuple(
    c for c in itertools.product((X, Y), repeat=4) if c[0] != c[1] or c[2] != c[3]
)
DOUBLE_LOOP_ROWS: tuple[tuple[str, ...], ...] = tuple(
    tuple(c[r] for c in DOUBLE_LOOP_COLUMNS) for r in range(4)
)
FORBIDDEN_COLUMNS = frozenset(
    c for c in itertools.product((X, Y), repeat=4) if c[0] == c[1] and c[2] == c[3]
)
SLOT_OF_COLUMN = {c: i for i, c in enumerate(DOUBLE_LOOP_COLUMNS)}


def _row(symbol: str, names: Sequence[str]) -> App:
    return App(symbol, [Var(n) for n in names])


def _sys(symbols: Mapping[str, int], eqs: Sequence[Equation]) -> EquationSystem:
    return EquationSystem(Signature(dict(symbols)), eqs)


def _nu_rows(n: int) -> list[tuple[str, ...]]:
    return [tuple(Y if j == i else X for j in range(n)) for i in range(n)]


def builtin_system(name: str, *params: int) -> EquationSystem:
    """Equation systems for the standard conditions, by name.

    Parametrised names accept the parameter either as ``"wnu(4)"`` or as
    ``builtin_system("wnu", 4)``.
    """
    if "(" in name:
        base, _, rest = name.partition("(")
        if not rest.endswith(")"):
            raise ValueError(f"malformed condition name {name!r}")
        params = tuple(int(p) for p in rest[:-1].split(",")) + tuple(params)
        name = base
    name = name.strip().lower().replace("-", "_")
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ValueError(f"unknown condition {name!r}; known: {sorted(_BUILDERS)}") from None
    return builder(*params)


def _maltsev():
    return _sys({"m": 3}, [
        Equation(_row("m", "xxy"), Var("y")),
        Equation(_row("m", "yxx"), Var("y")),
    ])


def _wnu(n: int = 3):
    if n < 2:
        raise ValueError("wnu needs arity >= 2")
    rows = list(reversed(_nu_rows(n)))  # y in the last position first, as displayed
    return _sys({"w": n}, chain([_row("w", r) for r in rows]))


def _nu(n: int = 3):
    if n < 3:
        raise ValueError("near unanimity needs arity >= 3")
    return _sys({"u": n}, [Equation(_row("u", r), Var(X)) for r in _nu_rows(n)])


def _cyclic(n: int = 3):
    if n < 2:
        raise ValueError("cyclic needs arity >= 2")
    xs = [f"x{i}" for i in range(1, n + 1)]
    return _sys({"c": n}, [Equation(_row("c", xs), _row("c", xs[1:] + xs[:1]))])


def _siggers6():
    return _sys({"s": 6}, [Equation(_row("s", "xyxzyz"), _row("s", "yxzxzy"))])


def _siggers4():
    return _sys({"s": 4}, [Equation(_row("s", "rare"), _row("s", "area"))])


def _double_loop():
    r1, r2, r3, r4 = DOUBLE_LOOP_ROWS
    return _sys({"d": 12}, [Equation(_row("d", r1), _row("d", r2)),
                            Equation(_row("d", r3), _row("d", r4))])


def _strong_double_loop():
    return _sys({"d": 12}, chain([_row("d", r) for r in DOUBLE_LOOP_ROWS]))


def _weak_3cube():
    return _sys({"t": 6}, chain([_row("t", "xyyyxx"), _row("t", "yxyxyx"), _row("t", "yyxxxy")]))


TERMINATOR_SYMBOLS = ("c", "c1", "c2", "c11", "c12", "c21", "c22")


def _terminator_equations() -> list[Equation]:
    def eq(a, ra, b, rb):
        return Equation(_row(a, ra), _row(b, rb))

    eqs = [eq("c", "xyx", "c1", "xxy"), eq("c", "yxx", "c2", "xxy")]
    for i in ("1", "2"):
        eqs += [eq("c" + i, "xyx", f"c{i}1", "xxy"), eq("c" + i, "yxx", f"c{i}2", "xxy")]
    for i in ("1", "2"):
        eqs += [eq(f"c{i}1", "xyx", f"c{i}2", "xyx"), eq(f"c{i}1", "yxx", f"c{i}2", "yxx")]
    return eqs


def _terminator():
    return _sys({s: 3 for s in TERMINATOR_SYMBOLS}, _terminator_equations())


def _strong_terminator():
    extra = Equation(_row("c11", "yxx"), _row("c22", "xyx"))
    return _sys({s: 3 for s in TERMINATOR_SYMBOLS}, _terminator_equations() + [extra])


def _weak_3edge():
    return _sys({"e": 4}, chain([_row("e", "yyxx"), _row("e", "yxyx"), _row("e", "xxxy")]))


def _associativity():
    x, y, z = Var("x"), Var("y"), Var("z")
    return _sys({"n": 2}, [Equation(App("n", [App("n", [x, y]), z]), App("n", [x, App("n", [y, z])]))])


def _idempotency(n: int = 2, symbol: str = "f"):
    if n < 1:
        raise ValueError("idempotency needs arity >= 1")
    return _sys({symbol: n}, [Equation(_row(symbol, [X] * n), Var(X))])


def _condition5():
    """The c/q condition in symbols q1, q2 (4-ary) and c (ternary), between strong double loops and terminators."""
    return _sys({"q1": 4, "q2": 4, "c": 3}, chain([
        _row("q1", "xyxy"), _row("q1", "yxxy"), _row("q2", "xyxy"), _row("q2", "yxxy"),
    ]) + [
        Equation(_row("q1", "xxyy"), _row("c", "xyx")),
        Equation(_row("q2", "xxyy"), _row("c", "yxx")),
    ])


_BUILDERS = {
    "maltsev": _maltsev,
    "wnu": _wnu,
    "nu": _nu,
    "cyclic": _cyclic,
    "siggers6": _siggers6,
    "siggers4": _siggers4,
    "double_loop": _double_loop,
    "strong_double_loop": _strong_double_loop,
    "weak_3cube": _weak_3cube,
    "terminator": _terminator,
    "strong_terminator": _strong_terminator,
    "weak_3edge": _weak_3edge,
    "associativity": _associativity,
    "idempotency": _idempotency,
    "condition5": _condition5,
}

BUILTIN_NAMES = tuple(_BUILDERS)


def idempotency_equations(sig: Signature, symbols: Sequence[str] | None = None) -> list[Equation]:
    syms = sig.symbols if symbols is None else symbols
    return [Equation(_row(s, [X] * sig[s]), Var(X)) for s in syms]


# ---------------------------------------------------------------------------
# triviality


@dataclass(frozen=True)
class ProjectionAssignment:
    """Coordinates are 1-based, as in the usual projection notation."""

    choice: Mapping[str, int]

    def __str__(self):
        return ", ".join(f"{s}->pi{i}" for s, i in self.choice.items())


def _reduce(t: Term, choice: Mapping[str, int], memo: dict) -> str:
    key = id(t)
    if key in memo:
        return memo[key]
    if t.is_var:
        r = t.name
    else:
        r = _reduce(t.args[choice[t.head] - 1], choice, memo)
    memo[key] = r
    return r


def check_trivial(sys: EquationSystem) -> ProjectionAssignment | None:
    """A projection assignment satisfying every equation, or ``None`` if there is none.

    The search is a depth-first walk in mixed-radix order (first declared
    symbol most significant), checking each equation as soon as all of its
    symbols are fixed, so the first witness is the one a plain enumeration
    would return.
    """
    symbols = sys.symbols_used()
    order = {s: i for i, s in enumerate(symbols)}
    ready: list[list[Equation]] = [[] for _ in symbols]
    for eq in sys.equations:
        used = eq.symbols()
        if not used:
            if eq.lhs is not eq.rhs:
                return None
            continue
        ready[max(order[s] for s in used)].append(eq)

    choice: dict[str, int] = {}

    def search(k: int) -> bool:
        if k == len(symbols):
            return True
        s = symbols[k]
        for i in range(1, sys.signature[s] + 1):
            choice[s] = i
            memo: dict = {}
            if all(_reduce(e.lhs, choice, memo) == _reduce(e.rhs, choice, memo) for e in ready[k]):
                if search(k + 1):
                    return True
        del choice[s]
        return False

    if not symbols:
        return ProjectionAssignment({})
    return ProjectionAssignment(dict(choice)) if search(0) else None


# ---------------------------------------------------------------------------
# Taylor systems


@dataclass(frozen=True)
class TaylorSystem:
    """Two-variable equations ``t(lhs) ≈ t(rhs)`` covering every coordinate.

    ``coverage[i]`` is the index of a row whose two sides differ at
    coordinate ``i`` (0-based).
    """

    symbol: str
    arity: int
    rows: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...]
    coverage: Mapping[int, int]

    def __post_init__(self):
        for lhs, rhs in self.rows:
            if len(lhs) != self.arity or len(rhs) != self.arity:
                raise ShapeError("row length differs from arity")
            if not set(lhs) | set(rhs) <= {X, Y}:
                raise ShapeError("Taylor rows may only contain x and y")
        for i in range(self.arity):
            r = self.coverage.get(i)
            if r is None or self.rows[r][0][i] == self.rows[r][1][i]:
                raise ShapeError(f"coordinate {i + 1} is not covered")

    def oriented(self, i: int) -> tuple[tuple[str, ...], tuple[str, ...]]:
        """The covering row for coordinate ``i`` with x on the left at ``i``."""
        lhs, rhs = self.rows[self.coverage[i]]
        return (lhs, rhs) if lhs[i] == X else (rhs, lhs)

    def equations(self) -> EquationSystem:
        return _sys({self.symbol: self.arity},
                    [Equation(_row(self.symbol, l), _row(self.symbol, r)) for l, r in self.rows])


@dataclass(frozen=True)
class NotTaylorShape:
    coordinate: int  # 1-based first uncovered coordinate
    reason: str = "uncovered coordinate"

    def __bool__(self):
        return False


def _rows_of(sys: EquationSystem, symbol: str) -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
    """Rows over {x,y}; variables are renamed per equation since each is quantified on its own."""
    rows = []
    for eq in sys.equations:
        sides = []
        names: list[str] = []
        for side in (eq.lhs, eq.rhs):
            if side.is_var or side.head != symbol or any(not a.is_var for a in side.args):
                raise ShapeError(f"equation {eq} is not a linear equation in {symbol!r} on both sides")
            for a in side.args:
                if a.name not in names:
                    names.append(a.name)
            sides.append(tuple(a.name for a in side.args))
        if len(names) > 2:
            raise ShapeError(f"more than two variables in {eq}: {names}")
        rename = {X: X, Y: Y} if set(names) <= {X, Y} else dict(zip(names, (X, Y)))
        l, r = sides
        rows.append((tuple(rename[v] for v in l), tuple(rename[v] for v in r)))
    return rows


def is_taylor_shape(sys: EquationSystem, symbol: str | None = None) -> TaylorSystem | NotTaylorShape:
    if symbol is None:
        used = sys.symbols_used()
        if len(used) != 1:
            raise ShapeError("system must use exactly one symbol")
        symbol = used[0]
    n = sys.signature[symbol]
    rows = _rows_of(sys, symbol)
    coverage = {}
    for i in range(n):
        for r, (l, rr) in enumerate(rows):
            if l[i] != rr[i]:
                coverage[i] = r
                break
        else:
            return NotTaylorShape(i + 1)
    return TaylorSystem(symbol, n, tuple(rows), coverage)


def taylor_to_pair_system(ts: TaylorSystem, symbol: str = "s") -> EquationSystem:
    """Two linear equations for the n²-ary symbol ``s = t*t``.

    Position ``(i, j)`` of ``s`` (row-major) corresponds to argument ``j`` of
    the ``i``-th inner ``t``.  The first equation holds by idempotency of
    ``t`` alone, the second by the Taylor equations alone.
    """
    n = ts.arity
    xs = [f"x{i}" for i in range(1, n + 1)]
    first_lhs = [xs[j] for i in range(n) for j in range(n)]
    first_rhs = [xs[i] for i in range(n) for j in range(n)]
    second_lhs, second_rhs = [], []
    for i in range(n):
        lhs, rhs = ts.oriented(i)
        second_lhs += lhs
        second_rhs += rhs
    return _sys({symbol: n * n}, [
        Equation(_row(symbol, first_lhs), _row(symbol, first_rhs)),
        Equation(_row(symbol, second_lhs), _row(symbol, second_rhs)),
    ])


def single_nontrivial_equation(ts: TaylorSystem) -> Equation:
    """The Taylor-derived pair equation with ``s`` written out as ``t*t``."""
    t = ts.symbol
    lhs = App(t, [_row(t, ts.oriented(i)[0]) for i in range(ts.arity)])
    rhs = App(t, [_row(t, ts.oriented(i)[1]) for i in range(ts.arity)])
    return Equation(lhs, rhs)


# ---------------------------------------------------------------------------
# two-equation systems and the double loop matrix


@dataclass(frozen=True)
class ColumnMatrix:
    """A 4-row matrix over {x,y}, stored column by column."""

    columns: tuple[tuple[str, str, str, str], ...]

    @property
    def rows(self) -> tuple[tuple[str, ...], ...]:
        return tuple(tuple(c[r] for c in self.columns) for r in range(4))

    def forbidden_columns(self) -> list[int]:
        return [k for k, c in enumerate(self.columns) if c in FORBIDDEN_COLUMNS]

    def pattern_counts(self) -> dict[tuple[str, str, str, str], int]:
        counts: dict = {}
        for c in self.columns:
            counts[c] = counts.get(c, 0) + 1
        return counts


@dataclass(frozen=True)
class TrivialInput:
    """A two-equation system satisfied by the projection onto ``coordinate`` (1-based)."""

    coordinate: int

    def __bool__(self):
        return False


@dataclass(frozen=True)
class DoubleLoopNormalization:
    system: EquationSystem
    # slot_of_position[p] = double loop slot (0-based) of input position p
    slot_of_position: tuple[int, ...]
    matrix: ColumnMatrix

    def double_loop_from(self, t: Term | TermFunction | str, symbol_arity: int | None = None) -> TermFunction:
        """Given a term ``t`` satisfying the input system, a 12-ary term satisfying the double loop equations.

        Unused slots become dummy arguments.
        """
        from .terms import as_function
        if isinstance(t, str):
            tf = TermFunction.of_symbol(t, symbol_arity or len(self.slot_of_position))
        else:
            tf = as_function(t, len(self.slot_of_position))
        params = tuple(f"w{k}" for k in range(1, 13))
        return TermFunction(params, tf(*[Var(params[s]) for s in self.slot_of_position]))


def normalize_two_equation(sys: EquationSystem) -> DoubleLoopNormalization | TrivialInput:
    if len(sys.equations) != 2:
        raise ShapeError("expected exactly two equations")
    used = sys.symbols_used()
    if len(used) != 1:
        raise ShapeError("expected exactly one operation symbol")
    rows = _rows_of(sys, used[0])
    (r1, r2), (r3, r4) = rows
    columns = tuple(zip(r1, r2, r3, r4))
    for p, c in enumerate(columns):
        if c in FORBIDDEN_COLUMNS:
            return TrivialInput(p + 1)
    return DoubleLoopNormalization(
        builtin_system("double_loop"),
        tuple(SLOT_OF_COLUMN[c] for c in columns),
        ColumnMatrix(columns),
    )


def system_from_matrix(matrix: ColumnMatrix, symbol: str = "t", strong: bool = False) -> EquationSystem:
    n = len(matrix.columns)
    r1, r2, r3, r4 = matrix.rows
    if strong:
        eqs = chain([_row(symbol, r) for r in (r1, r2, r3, r4)])
    else:
        eqs = [Equation(_row(symbol, r1), _row(symbol, r2)), Equation(_row(symbol, r3), _row(symbol, r4))]
    return _sys({symbol: n}, eqs)
