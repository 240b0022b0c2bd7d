"""Generated subuniverses of finite powers, with a derivation for every element."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .algebra import FiniteAlgebra, OperationTable, all_tuples, image
from .errors import BudgetExceeded
from .terms import App, Term, TermFunction, Var

DEFAULT_CAP = 1_000_000

Target = Callable[[np.ndarray], np.ndarray]


@dataclass
class WitnessedClosure:
    """Elements of a subuniverse of A^m in breadth-first order.

    ``derivations[i]`` is ``None`` for generators and ``(op, children)``
    otherwise; children always precede the element they derive.
    ``generator_index[j]`` is the element holding generator ``g{j+1}``.
    """

    size: int
    power: int
    elements: np.ndarray
    derivations: list
    generator_index: list[int]
    ops: tuple[str, ...]
    complete: bool = True
    hit: int | None = None
    rounds: list[int] = field(default_factory=list)
    elapsed: float = 0.0
    _index: dict = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return self.elements.shape[0]

    def __contains__(self, element) -> bool:
        return self.index_of(element) is not None

    def index_of(self, element) -> int | None:
        key = np.asarray(element, dtype=np.int64).tobytes()
        return self._index.get(key)

    def depth(self, i: int) -> int:
        d = [0] * (i + 1)
        for j in range(i + 1):
            der = self.derivations[j]
            d[j] = 0 if der is None else 1 + max(d[c] for c in der[1])
        return d[i]

    def stats(self) -> dict:
        return {"elements": len(self), "rounds": list(self.rounds), "complete": self.complete,
                "elapsed": round(self.elapsed, 4)}


def _block_target(blocks: Sequence[Sequence[int]], width: int) -> Target:
    """Rows whose width-sized blocks agree within each group of block indices."""
    def target(rows: np.ndarray) -> np.ndarray:
        ok = np.ones(rows.shape[0], dtype=bool)
        for group in blocks:
            first = rows[:, group[0] * width:(group[0] + 1) * width]
            for b in group[1:]:
                ok &= np.all(rows[:, b * width:(b + 1) * width] == first, axis=1)
        return ok
    return target


def equal_blocks(groups: Sequence[Sequence[int]], width: int) -> Target:
    """Target predicate: within every group, the listed blocks of ``width`` coordinates coincide."""
    return _block_target(groups, width)


def generate_closure(A: FiniteAlgebra, generators, ops: Sequence[str] | None = None,
                     cap: int = DEFAULT_CAP, target: Target | None = None) -> WitnessedClosure:
    """Close ``generators`` (rows in A^m) under the selected operations.

    Rounds are breadth first: round r applies every operation to all tuples
    of elements found before round r, so a new element's derivation has
    minimal depth.  New elements of a round are appended in lexicographic
    order.  Stops at a fixpoint, at the first element satisfying
    ``target`` (checked on generators too), or when ``cap`` elements would be
    exceeded; the last two leave ``complete`` False unless the fixpoint
    was reached.
    """
    t0 = time.perf_counter()
    ops = tuple(A.ops) if ops is None else tuple(ops)
    gens = np.atleast_2d(np.asarray(generators, dtype=np.int64))
    m = gens.shape[1]
    if cap < len({g.tobytes() for g in gens}):
        raise ValueError("cap is smaller than the number of generators")
    elements: list[np.ndarray] = []
    derivations: list = []
    index: dict[bytes, int] = {}
    gen_index = []
    for g in gens:
        key = g.tobytes()
        if key not in index:
            index[key] = len(elements)
            elements.append(g)
            derivations.append(None)
        gen_index.append(index[key])

    def result(arr, complete, hit, rounds):
        return WitnessedClosure(A.size, m, arr, derivations, gen_index, ops, complete, hit, rounds,
                                time.perf_counter() - t0, index)

    arr = np.array(elements, dtype=np.int64).reshape(-1, m)
    rounds = [len(elements)]
    if target is not None:
        hits = np.nonzero(target(arr))[0]
        if hits.size:
            return result(arr, False, int(hits[0]), rounds)
    while True:
        fresh: dict[bytes, tuple[np.ndarray, tuple]] = {}
        for name in ops:
            op = A.ops[name]
            try:
                img = image(op, [arr] * op.arity)
            except BudgetExceeded:
                return result(arr, False, None, rounds)
            for r in range(img.values.shape[0]):
                row = img.values[r]
                key = row.tobytes()
                if key in index or key in fresh:
                    continue
                fresh[key] = (row, (name, tuple(int(c) for c in img.choices[r])))
        if not fresh:
            return result(arr, True, None, rounds)
        new = sorted(fresh.values(), key=lambda v: tuple(v[0]))
        new_rows = np.array([v[0] for v in new], dtype=np.int64)
        hit = None
        if target is not None:
            hits = np.nonzero(target(new_rows))[0]
            if hits.size:
                hit = int(hits[0])
        room = cap - len(elements)
        if hit is not None and hit >= room:
            # keep the hit even past the cap; it is all the caller asked for
            take = list(range(min(room, hit))) + [hit]
        else:
            take = list(range(min(room, len(new))))
        base = len(elements)
        for pos, j in enumerate(take):
            row, der = new[j]
            index[row.tobytes()] = base + pos
            elements.append(row)
            derivations.append(der)
        arr = np.concatenate([arr, new_rows[take]]) if take else arr
        rounds.append(len(elements))
        if hit is not None:
            return result(arr, False, base + take.index(hit), rounds)
        if len(take) < len(new):
            return result(arr, False, None, rounds)


def extract_witness(c: WitnessedClosure, element) -> Term:
    """A term over the closure's operations in variables g1..gk producing ``element``."""
    i = element if isinstance(element, (int, np.integer)) else c.index_of(element)
    if i is None or not 0 <= i < len(c):
        raise KeyError("element is not in the closure")
    names = {}
    for j, e in enumerate(c.generator_index):
        names.setdefault(e, f"g{j + 1}")
    memo: dict[int, Term] = {}
    stack = [i]
    while stack:
        k = stack[-1]
        if k in memo:
            stack.pop()
            continue
        der = c.derivations[k]
        if der is None:
            memo[k] = Var(names[k])
            stack.pop()
            continue
        pending = [ch for ch in der[1] if ch not in memo]
        if pending:
            stack.extend(pending)
            continue
        memo[k] = App(der[0], [memo[ch] for ch in der[1]])
        stack.pop()
    return memo[i]


def witness_function(c: WitnessedClosure, element) -> TermFunction:
    """The witness as a function of all generators g1..gk (unused ones become dummies)."""
    params = tuple(f"g{j + 1}" for j in range(len(c.generator_index)))
    return TermFunction(params, extract_witness(c, element))


def projections(size: int, arity: int) -> np.ndarray:
    """The ``arity`` projections as rows of A^(size^arity)."""
    return all_tuples(size, arity).T.copy()


def term_clone_slice(A: FiniteAlgebra, arity: int, cap: int = DEFAULT_CAP,
                     ops: Sequence[str] | None = None) -> WitnessedClosure:
    """All ``arity``-ary term operations of ``A`` as a closure of the projections.

    Element rows are operation tables in the row-major layout of
    :class:`OperationTable`; witnesses are terms in g1..g{arity}.
    """
    return generate_closure(A, projections(A.size, arity), ops=ops, cap=cap)


def slice_table(c: WitnessedClosure, i: int, arity: int) -> OperationTable:
    return OperationTable(c.size, arity, c.elements[i])
