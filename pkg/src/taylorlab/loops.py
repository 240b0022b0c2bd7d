"""Symmetric relations, odd cycles and a constructive loop lemma.

:func:`find_loop_constructive` follows the inductive proof: the primary
measure is the arity of the auxiliary operation ``g``, the secondary one
the length of the odd cycle.  Each frame revalidates its hypotheses by
default, so a run doubles as a check of the induction step's claims.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import (
    OperationTable,
    Relation,
    absorption_counterexample,
    all_tuples,
    check_shape,
    compatibility_counterexample,
    enough_absorption_counterexample,
    shape_counterexample,
)
from .errors import PreconditionError


def compose_power(R: Relation, k: int) -> Relation:
    """Pairs joined by an R-walk of length exactly ``k``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    m = R.matrix().astype(np.int64)
    acc = m.copy()
    for _ in range(k - 1):
        acc = np.minimum(acc @ m, 1)
    return Relation.from_matrix(acc.astype(bool))


def find_odd_cycle(R: Relation, allow_loops: bool = True) -> list[int] | None:
    """A shortest odd closed walk as a vertex list ``[a1..al]`` (``al -> a1`` closes it).

    A loop is a cycle of length one; with ``allow_loops=False`` loops are
    ignored and the result has length at least three.
    """
    if not R.is_symmetric():
        raise PreconditionError("relation is not symmetric")
    loops = sorted(a for a, b in R.tuples if a == b)
    if loops and allow_loops:
        return [loops[0]]
    adj = {v: sorted(R.neighbors(v) - {v}) for v in range(R.size)}
    best: list[int] | None = None
    for s in range(R.size):
        if not adj[s]:
            continue
        dist = {s: 0}
        parent = {s: None}
        q = deque([s])
        found = None
        while q and found is None:
            u = q.popleft()
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    q.append(w)
                elif dist[w] == dist[u] and found is None:
                    found = (u, w)
        if found is None:
            continue
        u, w = found
        length = 2 * dist[u] + 1
        if best is not None and length >= len(best):
            continue

        def path(v):
            out = []
            while v is not None:
                out.append(v)
                v = parent[v]
            return out[::-1]

        pu, pw = path(u), path(w)
        # s .. u, then back along w .. s (excluding s)
        best = pu + pw[::-1][:-1]
    return best


def brute_loop(R: Relation) -> tuple[int, int] | None:
    for a in range(R.size):
        if (a, a) in R.tuples:
            return (a, a)
    return None


def _is_closed_walk(R: Relation, cycle: Sequence[int]) -> bool:
    return all((cycle[i], cycle[(i + 1) % len(cycle)]) in R.tuples for i in range(len(cycle)))


# ---------------------------------------------------------------------------
# preconditions


@dataclass
class PreconditionReport:
    """One entry per hypothesis of the loop lemma; ``counterexamples`` holds the first failure of each."""

    checks: dict[str, bool]
    counterexamples: dict[str, object] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return all(self.checks.values())

    def failed(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]


def mixed_link_counterexample(R: Relation, f: OperationTable, g: OperationTable, chunk: int = 1 << 20):
    """First choice of pairs (x_i, y_i) in R with (g(x_1..x_ar g), f(y_1..y_ar f)) outside R."""
    if g.arity > f.arity:
        return ("arity", g.arity, f.arity)
    pairs = R.array()
    r, k = pairs.shape[0], f.arity
    if r == 0:
        return None
    m = R.matrix()
    total = r ** k
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk))
        digits = [(idx // r ** (k - 1 - i)) % r for i in range(k)]
        xs = [pairs[d, 0] for d in digits]
        ys = [pairs[d, 1] for d in digits]
        gv = g.apply(xs[:g.arity])
        fv = f.apply(ys)
        bad = np.nonzero(~m[gv, fv])[0]
        if bad.size:
            i = bad[0]
            chosen = [tuple(int(v) for v in pairs[d[i]]) for d in digits]
            return chosen, (int(gv[i]), int(fv[i]))
    return None


def validate_preconditions(R: Relation, f: OperationTable, g: OperationTable | None = None,
                           cycle: Sequence[int] | None = None) -> PreconditionReport:
    """Check the numbered loop-lemma hypotheses (keys 1_ to 5_) plus symmetry.

    When ``cycle`` is given, the 1_odd_cycle item checks that it is an odd closed walk;
    otherwise an odd cycle is searched for.
    """
    g = f if g is None else g
    checks: dict[str, bool] = {}
    cex: dict[str, object] = {}
    sym = R.is_symmetric()
    checks["symmetric"] = sym
    if not sym:
        cex["symmetric"] = next((a, b) for a, b in sorted(R.tuples) if (b, a) not in R.tuples)
    if cycle is not None:
        ok = len(cycle) % 2 == 1 and _is_closed_walk(R, cycle)
        checks["1_odd_cycle"] = ok
        if not ok:
            cex["1_odd_cycle"] = list(cycle)
    else:
        oc = find_odd_cycle(R) if sym else None
        checks["1_odd_cycle"] = oc is not None
        if oc is None:
            cex["1_odd_cycle"] = "no odd cycle"
    bad = compatibility_counterexample(f, R)
    checks["2_compatible"] = bad is None
    if bad is not None:
        cex["2_compatible"] = bad
    if sym:
        bad = enough_absorption_counterexample(R, f)
        checks["3_enough_absorption_f"] = bad is None
        if bad is not None:
            cex["3_enough_absorption_f"] = bad
    else:
        checks["3_enough_absorption_f"] = False
        cex["3_enough_absorption_f"] = "relation not symmetric"
    checks["4_arity"] = g.arity <= f.arity
    if g.arity > f.arity:
        cex["4_arity"] = (g.arity, f.arity)
        checks["4_link"] = False
        cex["4_link"] = "arity"
    else:
        bad = mixed_link_counterexample(R, f, g)
        checks["4_link"] = bad is None
        if bad is not None:
            cex["4_link"] = bad
    if sym:
        bad = enough_absorption_counterexample(R, g)
        checks["5_enough_absorption_g"] = bad is None
        if bad is not None:
            cex["5_enough_absorption_g"] = bad
    else:
        checks["5_enough_absorption_g"] = False
        cex["5_enough_absorption_g"] = "relation not symmetric"
    return PreconditionReport(checks, cex)


# ---------------------------------------------------------------------------
# the constructive loop lemma


@dataclass(frozen=True)
class Frame:
    phase: str  # "base-loop", "base-unary", "cube", "restrict"
    relation_id: int
    g_arity: int
    cycle_length: int
    choice: tuple


@dataclass
class LoopCertificate:
    loop: tuple[int, int]
    trace: list[Frame]
    relations: list[Relation]

    @property
    def vertex(self) -> int:
        return self.loop[0]


def _triangle(R: Relation, a: int) -> tuple[int, int, int]:
    """b, c with (a,b), (b,c), (c,a) in R; exists when (a,a) is in R^3."""
    na = R.neighbors(a)
    for b in sorted(na):
        for c in sorted(R.neighbors(b) & na):
            return a, b, c
    raise AssertionError(f"({a},{a}) is not a loop of R^3")


def _plug_last(g: OperationTable, a: int) -> OperationTable:
    """The operation g(x_1, ..., x_{k-1}, a)."""
    n = g.size
    return OperationTable(n, g.arity - 1, g.table.reshape(-1, n)[:, a])


def _alternating_cycle(f: OperationTable, a: int, b: int, c: int) -> list[int]:
    """f(c^i b^{k-i}) and f(b^i a c^{k-1-i}) interleaved, closing at f(c^k)."""
    k = f.arity
    out = []
    for i in range(k):
        out.append(f(*([c] * i + [b] * (k - i))))
        out.append(f(*([b] * i + [a] + [c] * (k - 1 - i))))
    out.append(f(*([c] * k)))
    return out


def find_loop_constructive(R: Relation, f: OperationTable, g: OperationTable | None = None,
                           cycle: Sequence[int] | None = None, check: bool = True) -> LoopCertificate:
    """Produce a loop of ``R`` by the loop lemma's recursion.

    ``cycle`` is an odd closed walk (defaults to a shortest odd cycle).
    With ``check`` on, every frame revalidates all hypotheses and raises
    :class:`PreconditionError` on the first failure.
    """
    g = f if g is None else g
    if cycle is None:
        cycle = find_odd_cycle(R)
        if cycle is None:
            raise PreconditionError("relation has no odd cycle")
    trace: list[Frame] = []
    relations: list[Relation] = []
    loop = _solve(R, f, g, list(cycle), check, trace, relations, None)
    if loop not in R.tuples:
        raise AssertionError(f"constructed pair {loop} is not in the relation")
    return LoopCertificate(loop, trace, relations)


def _solve(R, f, g, cycle, check, trace, relations, parent_measure):
    l = len(cycle)
    measure = (g.arity, l)
    if parent_measure is not None and not measure < parent_measure:
        raise AssertionError(f"recursion measure {measure} does not decrease from {parent_measure}")
    if l % 2 == 0:
        raise PreconditionError("cycle length is even", list(cycle))
    if check:
        rep = validate_preconditions(R, f, g, cycle)
        if not rep:
            k = rep.failed()[0]
            raise PreconditionError(f"loop lemma hypothesis {k} fails", rep.counterexamples.get(k))
    rid = len(relations)
    relations.append(R)
    if l == 1:
        trace.append(Frame("base-loop", rid, g.arity, l, (cycle[0],)))
        return (cycle[0], cycle[0])
    if g.arity == 1:
        x = R.non_isolated()[0]
        gx = g(x)
        trace.append(Frame("base-unary", rid, g.arity, l, (x, gx)))
        if (gx, gx) not in R.tuples:
            raise AssertionError(f"g({x}) = {gx} does not carry a loop")
        return (gx, gx)
    # loop in R^3 from the shorter cycle x_1..x_{l-2}
    R3 = compose_power(R, 3)
    trace.append(Frame("cube", rid, g.arity, l, tuple(cycle[:l - 2])))
    a, _ = _solve(R3, f, g, cycle[:l - 2], check, trace, relations, measure)
    a, b, c = _triangle(R, a)
    sub = R.neighbors(a)
    R2 = R.restrict(sub)
    g2 = _plug_last(g, a)
    new_cycle = _alternating_cycle(f, a, b, c)
    if not set(new_cycle) <= sub:
        raise AssertionError("alternating walk leaves the neighbourhood of a")
    trace.append(Frame("restrict", rid, g.arity, l, (a, b, c, len(new_cycle))))
    return _solve(R2, f, g2, new_cycle, check, trace, relations, (g.arity, l))


MODES = ("nu", "absorbing", "lemma")


def find_loop(R: Relation, op: OperationTable, mode: str = "nu", check: bool = True) -> LoopCertificate:
    """Loop lemma front end.

    ``nu``: ``op`` is a near unanimity operation compatible with R.
    ``absorbing``: ``op`` is idempotent and R absorbs A^2 wrt ``op``.
    ``lemma``: the raw hypotheses with g = f.
    The first two imply the lemma's hypotheses; they are checked first so
    a failure names the mode's own condition.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if not R.is_symmetric():
        raise PreconditionError("relation is not symmetric")
    if mode == "nu":
        if op.arity < 3 or not check_shape(op, "nu"):
            raise PreconditionError("operation is not a near unanimity operation",
                                    shape_counterexample(op, "nu") if op.arity >= 3 else op.arity)
        bad = compatibility_counterexample(op, R)
        if bad is not None:
            raise PreconditionError("operation is not compatible with the relation", bad)
    elif mode == "absorbing":
        if not op.is_idempotent():
            raise PreconditionError("operation is not idempotent")
        bad = absorption_counterexample(R.array(), all_tuples(R.size, 2), op)
        if bad is not None:
            raise PreconditionError("relation does not absorb A^2", bad)
    # prefer a loopless odd cycle so the construction does real work
    cycle = find_odd_cycle(R, allow_loops=False) or find_odd_cycle(R)
    if cycle is None:
        raise PreconditionError("relation has no odd cycle")
    return find_loop_constructive(R, op, op, cycle, check=check)
