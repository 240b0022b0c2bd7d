"""Finite algebras given by operation tables, and predicates on their operations."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .conditions import X, Y, TaylorSystem, builtin_system
from .errors import ArityError, BudgetExceeded, ParseError, PreconditionError
from .terms import EquationSystem, Term, TermFunction, as_function

IMAGE_STATE_BUDGET = 2_000_000


@dataclass(frozen=True, eq=False)
class OperationTable:
    """A k-ary operation on {0..n-1}; ``table[sum(a_i * n**(k-1-i))] = f(a_1..a_k)``."""

    size: int
    arity: int
    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64).reshape(-1)
        if self.arity < 1:
            raise ArityError("operations have arity >= 1")
        if t.size != self.size ** self.arity:
            raise ArityError(f"table of length {t.size} does not match {self.size}^{self.arity}")
        if t.size and (t.min() < 0 or t.max() >= self.size):
            raise ValueError("table entries out of range")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @classmethod
    def from_function(cls, size: int, arity: int, fn) -> OperationTable:
        return cls(size, arity, [fn(*a) for a in itertools.product(range(size), repeat=arity)])

    @classmethod
    def projection(cls, size: int, arity: int, coordinate: int) -> OperationTable:
        """``coordinate`` is 0-based."""
        return cls(size, arity, all_tuples(size, arity)[:, coordinate])

    def __call__(self, *args: int) -> int:
        return int(self.table[self.index(args)])

    def index(self, args: Sequence[int]) -> int:
        i = 0
        for a in args:
            i = i * self.size + int(a)
        return i

    def apply(self, columns: Sequence[np.ndarray]) -> np.ndarray:
        """Apply coordinatewise to arrays of equal shape (one array per argument)."""
        if len(columns) != self.arity:
            raise ArityError(f"expected {self.arity} arguments, got {len(columns)}")
        idx = np.zeros(np.shape(columns[0]), dtype=np.int64)
        for c in columns:
            idx = idx * self.size + c
        return self.table[idx]

    def __eq__(self, other):
        return (isinstance(other, OperationTable) and self.size == other.size
                and self.arity == other.arity and np.array_equal(self.table, other.table))

    __hash__ = None

    def is_idempotent(self) -> bool:
        return bool(np.all(self.table[self.diagonal_indices()] == np.arange(self.size)))

    def diagonal_indices(self) -> np.ndarray:
        step = sum(self.size ** j for j in range(self.arity))
        return np.arange(self.size) * step

    @cached_property
    def residual_transitions(self) -> list[np.ndarray]:
        """Transition tables over residual-function classes.

        Prefixes of arguments are identified when the operations left after
        fixing them coincide.  ``trans[j][c, a]`` is the class at level
        ``j+1`` reached from class ``c`` at level ``j`` by the next argument
        ``a``; classes at the last level are the operation values.  Level 0
        has the single class 0.
        """
        n, k = self.size, self.arity
        trans: list[np.ndarray] = [None] * k
        classes = self.table
        for j in range(k - 1, -1, -1):
            rows = classes.reshape(n ** j, n)
            uniq, inverse = np.unique(rows, axis=0, return_inverse=True)
            trans[j] = uniq.astype(np.int64)
            classes = inverse.reshape(-1)
        return trans

    def to_json(self) -> dict:
        return {"arity": self.arity, "table": [int(v) for v in self.table]}


def all_tuples(size: int, length: int) -> np.ndarray:
    """All tuples in {0..size-1}^length, row-major (first coordinate slowest)."""
    if length == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((size,) * length).reshape(length, -1).T
    return grids.astype(np.int64)


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    size: int
    ops: Mapping[str, OperationTable]

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("universe must be nonempty")
        for name, op in self.ops.items():
            if op.size != self.size:
                raise ValueError(f"operation {name!r} lives on a universe of size {op.size}")
        object.__setattr__(self, "ops", dict(self.ops))

    def __getitem__(self, name: str) -> OperationTable:
        return self.ops[name]

    def reduct(self, names: Iterable[str]) -> FiniteAlgebra:
        return FiniteAlgebra(self.size, {n: self.ops[n] for n in names})

    def is_idempotent(self) -> bool:
        return all(op.is_idempotent() for op in self.ops.values())

    def to_json(self) -> dict:
        return {"size": self.size, "ops": {k: v.to_json() for k, v in self.ops.items()}}

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data: dict | str) -> FiniteAlgebra:
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from None
        try:
            n = int(data["size"])
            ops = {k: OperationTable(n, int(v["arity"]), v["table"]) for k, v in data["ops"].items()}
        except (KeyError, TypeError, ValueError, ArityError) as exc:
            raise ParseError(f"bad algebra JSON: {exc}") from None
        return cls(n, ops)


@dataclass(frozen=True, eq=False)
class Relation:
    """An m-ary relation on {0..size-1}; binary relations double as digraphs."""

    size: int
    power: int
    tuples: frozenset

    def __post_init__(self):
        ts = frozenset(tuple(int(a) for a in t) for t in self.tuples)
        for t in ts:
            if len(t) != self.power or any(a < 0 or a >= self.size for a in t):
                raise ValueError(f"tuple {t} out of range")
        object.__setattr__(self, "tuples", ts)

    @classmethod
    def of(cls, size: int, tuples: Iterable[Sequence[int]], power: int = 2) -> Relation:
        return cls(size, power, frozenset(map(tuple, tuples)))

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> Relation:
        return cls(m.shape[0], 2, frozenset(zip(*map(lambda a: a.tolist(), np.nonzero(m)))))

    def __contains__(self, t) -> bool:
        return tuple(t) in self.tuples

    def __len__(self) -> int:
        return len(self.tuples)

    def __iter__(self):
        return iter(sorted(self.tuples))

    def __eq__(self, other):
        return (isinstance(other, Relation) and self.size == other.size
                and self.power == other.power and self.tuples == other.tuples)

    def __hash__(self):
        return hash((self.size, self.power, self.tuples))

    def array(self) -> np.ndarray:
        if not self.tuples:
            return np.zeros((0, self.power), dtype=np.int64)
        return np.array(sorted(self.tuples), dtype=np.int64)

    def codes(self) -> np.ndarray:
        return encode_rows(self.array(), self.size)

    def matrix(self) -> np.ndarray:
        self._binary()
        m = np.zeros((self.size, self.size), dtype=bool)
        for a, b in self.tuples:
            m[a, b] = True
        return m

    def _binary(self):
        if self.power != 2:
            raise ValueError("binary relation expected")

    def neighbors(self, x: int) -> frozenset[int]:
        self._binary()
        return frozenset(b for a, b in self.tuples if a == x)

    def non_isolated(self) -> list[int]:
        """Elements with an out-neighbour (for symmetric R: the set A^{+R})."""
        self._binary()
        return sorted({a for a, _ in self.tuples})

    def is_symmetric(self) -> bool:
        self._binary()
        return all((b, a) in self.tuples for a, b in self.tuples)

    def restrict(self, domain: Iterable[int]) -> Relation:
        d = set(domain)
        return Relation(self.size, self.power, frozenset(t for t in self.tuples if set(t) <= d))

    def symmetric_closure(self) -> Relation:
        self._binary()
        return Relation(self.size, 2, self.tuples | {(b, a) for a, b in self.tuples})

    def to_json(self) -> dict:
        return {"size": self.size, "power": self.power, "tuples": [list(t) for t in sorted(self.tuples)]}

    @classmethod
    def from_json(cls, data: dict | str, size: int | None = None) -> Relation:
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from None
        try:
            tuples = [tuple(t) for t in data["tuples"]]
            power = int(data.get("power", len(tuples[0]) if tuples else 2))
            n = data.get("size", size)
            if n is None:
                n = 1 + max((max(t) for t in tuples if t), default=0)
            return cls(int(n), power, frozenset(tuples))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad relation JSON: {exc}") from None


def encode_rows(rows: np.ndarray, base: int) -> np.ndarray:
    """Injective integer code per row (requires base**width < 2**63)."""
    rows = np.asarray(rows, dtype=np.int64)
    if rows.shape[1] * np.log2(max(base, 2)) >= 62:
        raise OverflowError("rows too wide to encode as integers")
    code = np.zeros(rows.shape[0], dtype=np.int64)
    for j in range(rows.shape[1]):
        code = code * base + rows[:, j]
    return code


# ---------------------------------------------------------------------------
# images of operations on powers


@dataclass
class Image:
    """Distinct results of an operation applied to candidate argument tuples.

    ``values[r]`` is a result (an m-tuple) and ``choices[r, j]`` the index
    into the j-th candidate list of the argument that produced it; for each
    result the recorded choice is the lexicographically first one.
    """

    values: np.ndarray
    choices: np.ndarray


def _unique_first(rows: np.ndarray) -> np.ndarray:
    """Indices of first occurrences of distinct rows, in increasing order."""
    if rows.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    if rows.shape[1] == 0:
        return np.zeros(1, dtype=np.int64)
    rows = np.ascontiguousarray(rows)
    view = rows.view(np.dtype((np.void, rows.dtype.itemsize * rows.shape[1]))).reshape(-1)
    _, idx = np.unique(view, return_index=True)
    return np.sort(idx)


def image(op: OperationTable, candidates: Sequence[np.ndarray], state_budget: int = IMAGE_STATE_BUDGET) -> Image:
    """All values ``op(c_1, ..., c_k)`` (coordinatewise) with ``c_j`` from ``candidates[j]``.

    Runs a left-to-right dynamic program over residual-function classes, so
    its cost depends on the number of distinct partial applications rather
    than on the product of the candidate list sizes.
    """
    k = op.arity
    if len(candidates) != k:
        raise ArityError(f"operation has arity {k}, got {len(candidates)} candidate lists")
    cands = [np.asarray(c, dtype=np.int64) for c in candidates]
    m = cands[0].shape[1]
    trans = op.residual_transitions
    states = np.zeros((1, m), dtype=np.int64)
    parents: list[tuple[np.ndarray, np.ndarray]] = []
    for j in range(k):
        c = cands[j]
        if c.shape[0] == 0:
            return Image(np.zeros((0, m), dtype=np.int64), np.zeros((0, k), dtype=np.int64))
        t = trans[j]
        chunk = max(1, 4_000_000 // max(1, c.shape[0] * max(m, 1)))
        firsts_rows, firsts_par, firsts_el = [], [], []
        for s0 in range(0, states.shape[0], chunk):
            st = states[s0:s0 + chunk]
            nxt = t[st[:, None, :], c[None, :, :]].reshape(-1, m)
            keep = _unique_first(nxt)
            firsts_rows.append(nxt[keep])
            firsts_par.append(s0 + keep // c.shape[0])
            firsts_el.append(keep % c.shape[0])
        rows = np.concatenate(firsts_rows)
        par = np.concatenate(firsts_par)
        el = np.concatenate(firsts_el)
        if len(firsts_rows) > 1:
            keep = _unique_first(rows)
            rows, par, el = rows[keep], par[keep], el[keep]
        if rows.shape[0] > state_budget:
            raise BudgetExceeded(f"{rows.shape[0]} partial applications exceed the budget of {state_budget}")
        parents.append((par, el))
        states = rows
    # walk parent pointers back to recover one argument choice per result
    r = states.shape[0]
    choices = np.zeros((r, k), dtype=np.int64)
    cur = np.arange(r)
    for j in range(k - 1, -1, -1):
        par, el = parents[j]
        choices[:, j] = el[cur]
        cur = par[cur]
    return Image(states, choices)


# ---------------------------------------------------------------------------
# term evaluation


def _var_columns(size: int, nvars: int) -> list[np.ndarray]:
    grid = all_tuples(size, nvars)
    return [grid[:, i] for i in range(nvars)]


def _evaluate(A: FiniteAlgebra, t: Term, env: Mapping[str, np.ndarray],
              funcs: Mapping[str, TermFunction], memo: dict, top: bool = True) -> np.ndarray:
    # inside a bound body, names resolve to basic operations before other bindings
    for node in t.nodes():
        key = id(node)
        if key in memo:
            continue
        if node.is_var:
            try:
                memo[key] = env[node.name]
            except KeyError:
                raise ArityError(f"variable {node.name!r} is not among the declared variables") from None
            continue
        args = [memo[id(c)] for c in node.args]
        f = funcs.get(node.head) if top or node.head not in A.ops else None
        if f is not None:
            if f.arity != len(args):
                raise ArityError(f"{node.head!r} bound to a {f.arity}-ary term, applied to {len(args)}")
            memo[key] = _evaluate(A, f.body, dict(zip(f.params, args)), funcs, {}, top=False)
        elif node.head in A.ops:
            op = A.ops[node.head]
            if op.arity != len(args):
                raise ArityError(f"operation {node.head!r} has arity {op.arity}, applied to {len(args)}")
            memo[key] = op.apply(args)
        else:
            raise ArityError(f"symbol {node.head!r} is not bound")
    return memo[id(t)]


def _functions(binding) -> dict[str, TermFunction]:
    if not binding:
        return {}
    return {k: as_function(v) for k, v in binding.items()}


def eval_term(A: FiniteAlgebra, t: Term | TermFunction,
              binding: Mapping[str, Term | TermFunction] | None = None,
              variables: Sequence[str] | None = None) -> OperationTable:
    """The term operation of ``t``; variables in first-occurrence order unless given.

    Symbols are looked up in ``binding`` first, then among the basic
    operations of ``A``.
    """
    if isinstance(t, TermFunction):
        variables, t = t.params, t.body
    if variables is None:
        variables = t.variables()
    if not variables:
        raise ArityError("a term operation needs at least one variable")
    cols = _var_columns(A.size, len(variables))
    env = dict(zip(variables, cols))
    out = _evaluate(A, t, env, _functions(binding), {})
    return OperationTable(A.size, len(variables), np.broadcast_to(out, cols[0].shape).copy())


def evaluate_on(A: FiniteAlgebra, t: Term, env: Mapping[str, np.ndarray],
                binding: Mapping[str, Term | TermFunction] | None = None) -> np.ndarray:
    """Evaluate ``t`` on arbitrary value arrays (coordinatewise)."""
    return _evaluate(A, t, env, _functions(binding), {})


def default_binding(A: FiniteAlgebra, sys: EquationSystem, binding=None) -> dict:
    """Bindings for ``sys``'s symbols; unbound symbols fall back to same-named basic operations."""
    out = dict(binding or {})
    for s in sys.symbols_used():
        if s not in out:
            if s not in A.ops:
                raise ArityError(f"symbol {s!r} is neither bound nor a basic operation")
            if A.ops[s].arity != sys.signature[s]:
                raise ArityError(f"basic operation {s!r} has the wrong arity")
        else:
            as_function(out[s], sys.signature[s])
    return out


def first_violation(A: FiniteAlgebra, sys: EquationSystem,
                    binding: Mapping[str, Term | TermFunction] | None = None):
    """``None`` if every equation holds, else ``(equation, {variable: value})``."""
    b = default_binding(A, sys, binding)
    funcs = _functions(b)
    for eq in sys.equations:
        names = eq.variables() or ("_",)
        cols = _var_columns(A.size, len(names))
        env = dict(zip(names, cols))
        shape = cols[0].shape
        lhs = np.broadcast_to(_evaluate(A, eq.lhs, env, funcs, {}), shape)
        rhs = np.broadcast_to(_evaluate(A, eq.rhs, env, funcs, {}), shape)
        bad = np.nonzero(lhs != rhs)[0]
        if bad.size:
            i = bad[0]
            return eq, {v: int(c[i]) for v, c in zip(names, cols) if v != "_"}
    return None


def satisfies(A: FiniteAlgebra, sys: EquationSystem,
              binding: Mapping[str, Term | TermFunction] | None = None) -> bool:
    return first_violation(A, sys, binding) is None


# ---------------------------------------------------------------------------
# shapes of single operations


def _single_op_algebra(op: OperationTable) -> FiniteAlgebra:
    return FiniteAlgebra(op.size, {"f": op})


SHAPE_KINDS = ("idempotent", "nu", "wnu", "cyclic", "siggers6", "siggers4")


def shape_system(kind: str, arity: int) -> EquationSystem:
    if kind == "idempotent":
        return builtin_system("idempotency", arity)
    if kind == "nu":
        if arity < 3:
            raise ArityError("near unanimity operations have arity > 2")
        return builtin_system("nu", arity)
    if kind == "wnu":
        if arity < 2:
            raise ArityError("weak near unanimity needs arity >= 2")
        return builtin_system("wnu", arity)
    if kind == "cyclic":
        if arity < 2:
            raise ArityError("cyclic needs arity >= 2")
        return builtin_system("cyclic", arity)
    if kind in ("siggers6", "siggers4"):
        need = 6 if kind == "siggers6" else 4
        if arity != need:
            raise ArityError(f"{kind} needs arity {need}")
        return builtin_system(kind)
    raise ValueError(f"unknown shape {kind!r}; known: {SHAPE_KINDS}")


def check_shape(op: OperationTable, kind: str) -> bool:
    sys = shape_system(kind, op.arity)
    sym = sys.symbols_used()[0]
    return satisfies(_single_op_algebra(op), sys, {sym: TermFunction.of_symbol("f", op.arity)})


def shape_counterexample(op: OperationTable, kind: str):
    sys = shape_system(kind, op.arity)
    sym = sys.symbols_used()[0]
    return first_violation(_single_op_algebra(op), sys, {sym: TermFunction.of_symbol("f", op.arity)})


@dataclass(frozen=True)
class NotTaylor:
    coordinate: int  # 1-based
    idempotent: bool = True

    def __bool__(self):
        return False


@dataclass(frozen=True)
class TaylorReport:
    system: TaylorSystem
    idempotent: bool


def is_taylor_operation(op: OperationTable, symbol: str = "t", max_arity: int = 20) -> TaylorReport | NotTaylor:
    """Find a Taylor system satisfied by ``op``.

    Patterns in {x,y}^k are grouped by the binary operation they induce;
    coordinate i is coverable iff some group holds patterns with x and with
    y at i.  Non-idempotent operations are allowed and flagged.
    """
    k = op.arity
    if k > max_arity:
        raise BudgetExceeded(f"arity {k} exceeds the pattern budget (2^{max_arity})")
    n = op.size
    bits = ((np.arange(2 ** k)[:, None] >> np.arange(k - 1, -1, -1)[None, :]) & 1).astype(bool)
    pairs = all_tuples(n, 2)
    induced = np.empty((2 ** k, n * n), dtype=np.int64)
    for col, (a, b) in enumerate(pairs):
        args = np.where(bits, b, a)
        induced[:, col] = op.apply([args[:, i] for i in range(k)])
    _, group = np.unique(induced, axis=0, return_inverse=True)
    group = group.reshape(-1)
    idem = op.is_idempotent()
    rows: list[tuple[tuple[str, ...], tuple[str, ...]]] = []
    coverage: dict[int, int] = {}
    order = np.argsort(group, kind="stable")
    starts = np.r_[0, np.nonzero(np.diff(group[order]))[0] + 1, len(order)]
    members = [order[starts[i]:starts[i + 1]] for i in range(len(starts) - 1)]
    members.sort(key=lambda g: g[0])
    for i in range(k):
        for g in members:
            col = bits[g, i]
            if col.any() and not col.all():
                lhs = g[np.nonzero(~col)[0][0]]
                rhs = g[np.nonzero(col)[0][0]]
                row = (tuple(Y if b else X for b in bits[lhs]), tuple(Y if b else X for b in bits[rhs]))
                if row not in rows:
                    rows.append(row)
                coverage[i] = rows.index(row)
                break
        else:
            return NotTaylor(i + 1, idem)
    return TaylorReport(TaylorSystem(symbol, k, tuple(rows), coverage), idem)


# ---------------------------------------------------------------------------
# compatibility and absorption


def _as_rows(S, power: int | None = None) -> np.ndarray:
    if isinstance(S, Relation):
        return S.array()
    arr = np.asarray(sorted(S) if isinstance(S, (set, frozenset)) else list(S), dtype=np.int64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.size == 0:
        arr = arr.reshape(0, power or 1)
    return arr


def image_counterexample(op: OperationTable, candidates: Sequence[np.ndarray], allowed: np.ndarray, base: int):
    """First (argument rows, result) whose result code is not in ``allowed``, else ``None``."""
    img = image(op, candidates)
    if img.values.shape[0] == 0:
        return None
    ok = np.isin(encode_rows(img.values, base), allowed)
    bad = np.nonzero(~ok)[0]
    if bad.size == 0:
        return None
    r = bad[0]
    args = [tuple(int(v) for v in candidates[j][img.choices[r, j]]) for j in range(op.arity)]
    return args, tuple(int(v) for v in img.values[r])


def compatible(op: OperationTable, R: Relation) -> bool:
    return compatibility_counterexample(op, R) is None


def compatibility_counterexample(op: OperationTable, R: Relation):
    rows = R.array()
    if rows.shape[0] == 0:
        return None
    return image_counterexample(op, [rows] * op.arity, R.codes(), op.size)


def absorption_counterexample(X_: Iterable, Y_: Iterable, op: OperationTable, universe_size: int | None = None):
    """First violation of 'X absorbs Y wrt op', as ``(coordinate, args, value)``; elements may be tuples."""
    Xr = _as_rows(X_)
    Yr = _as_rows(Y_, Xr.shape[1] if Xr.size else None)
    if Yr.shape[0] == 0:
        return None
    if Xr.shape[0] == 0:
        if op.arity == 1:
            # a unary op absorbs if it maps Y into the empty set: only when Y is empty
            return (1, [tuple(int(v) for v in Yr[0])], None)
        return None
    base = universe_size or op.size
    allowed = encode_rows(Xr, base)
    for i in range(op.arity):
        cands = [Xr] * op.arity
        cands[i] = Yr
        bad = image_counterexample(op, cands, allowed, base)
        if bad is not None:
            return (i + 1, bad[0], bad[1])
    return None


def absorbs(X_: Iterable, Y_: Iterable, op: OperationTable) -> bool:
    """``X`` absorbs ``Y`` wrt ``op``: one argument from ``Y`` and the rest from ``X`` land in ``X``.

    Elements are universe elements, or equal-length tuples when ``op`` acts
    coordinatewise on a power (e.g. a relation absorbing ``A^2``).
    """
    return absorption_counterexample(X_, Y_, op) is None


def _require_symmetric(R: Relation):
    if not R.is_symmetric():
        raise PreconditionError("relation is not symmetric",
                                next((a, b) for a, b in sorted(R.tuples) if (b, a) not in R.tuples))


def enough_absorption_counterexample(R: Relation, op: OperationTable):
    _require_symmetric(R)
    for x in R.non_isolated():
        nb = R.neighbors(x)
        bad = absorption_counterexample(nb, nb | {x}, op)
        if bad is not None:
            return x, bad
    return None


def produces_enough_absorption(R: Relation, op: OperationTable) -> bool:
    return enough_absorption_counterexample(R, op) is None


def semiabsorbing_ii_prime(R: Relation, op: OperationTable) -> bool:
    """``op`` is compatible with R and each neighbourhood absorbs the set of non-isolated elements."""
    _require_symmetric(R)
    if not compatible(op, R):
        return False
    nonisolated = set(R.non_isolated())
    return all(absorbs(R.neighbors(x), nonisolated, op) for x in nonisolated)


def relation_absorbs_square(R: Relation, op: OperationTable) -> bool:
    """R absorbs A^2 with ``op`` acting coordinatewise on pairs."""
    return absorbs(R.array(), all_tuples(R.size, 2), op)


def nu_from_semiabsorbing(op: OperationTable) -> OperationTable:
    """Overwrite the near-unanimous rows of ``op`` so that it becomes an NU operation.

    Arity below 3 is first padded with redundant trailing arguments.
    """
    n, k = op.size, op.arity
    if k < 3:
        pad = 3 - k
        table = np.repeat(op.table, n ** pad)
        k = 3
    else:
        table = op.table.copy()
    for y in range(n):
        for x in range(n):
            for i in range(k):
                row = np.full(k, y)
                row[i] = x
                idx = 0
                for v in row:
                    idx = idx * n + int(v)
                table[idx] = y
    return OperationTable(n, k, table)
