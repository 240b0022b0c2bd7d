"""Finite digraphs: structural classification, polymorphism search, loop conjecture lab.

A digraph is a binary :class:`Relation` on {0..n-1}.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .algebra import OperationTable, Relation, all_tuples, check_shape, compatible
from .errors import BudgetExceeded, ShapeError

CONSTRAINTS = ("idempotent", "nu", "wnu")
DEFAULT_BUDGET = 200_000


def _require_binary(d: Relation):
    if d.power != 2:
        raise ShapeError(f"a digraph is a binary relation, got arity {d.power}")


@dataclass(frozen=True)
class GraphClass:
    smooth: bool
    algebraic_length_one: bool
    has_loop: bool

    def to_json(self) -> dict:
        return {"smooth": self.smooth, "algebraic_length_one": self.algebraic_length_one,
                "has_loop": self.has_loop}


def is_smooth(d: Relation) -> bool:
    _require_binary(d)
    sources = {a for a, _ in d.tuples}
    targets = {b for _, b in d.tuples}
    return sources == targets


def _component_gcds(d: Relation) -> list[int]:
    """gcd of edge defects p(u)+1-p(v) per weakly connected component with edges.

    The net lengths of closed walks in a component form the subgroup of Z
    generated by these defects, so gcd 1 means some closed walk has one more
    forward than backward edge.
    """
    adj: dict[int, list[tuple[int, int]]] = {}
    for a, b in d.tuples:
        adj.setdefault(a, []).append((b, 1))
        adj.setdefault(b, []).append((a, -1))
    potential: dict[int, int] = {}
    comp: dict[int, int] = {}
    for root in sorted(adj):
        if root in potential:
            continue
        potential[root] = 0
        comp[root] = root
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v, step in adj[u]:
                if v not in potential:
                    potential[v] = potential[u] + step
                    comp[v] = root
                    queue.append(v)
    gcds: dict[int, int] = {}
    for a, b in d.tuples:
        r = comp[a]
        gcds[r] = math.gcd(gcds.get(r, 0), potential[a] + 1 - potential[b])
    return [gcds[r] for r in sorted(gcds)]


def algebraic_length_one(d: Relation) -> bool:
    _require_binary(d)
    return 1 in _component_gcds(d)


def graph_class(d: Relation) -> GraphClass:
    _require_binary(d)
    return GraphClass(is_smooth(d), algebraic_length_one(d), any(a == b for a, b in d.tuples))


def closed_walk_oracle(adjacency: np.ndarray, max_length: int = 10) -> np.ndarray:
    """For a batch of adjacency matrices (B, n, n), whether some closed walk of
    length at most ``max_length`` has net length +1 (forward minus backward).

    Straight enumeration by dynamic programming over (start, current, net).
    """
    adj = np.asarray(adjacency, dtype=bool)
    if adj.ndim == 2:
        adj = adj[None]
    B, n, _ = adj.shape
    width = 2 * max_length + 1
    # reach[b, s, u, k]: a walk from s to u with net k - max_length exists
    reach = np.zeros((B, n, n, width), dtype=bool)
    idx = np.arange(n)
    reach[:, idx, idx, max_length] = True
    fwd = adj.astype(np.int64)
    bwd = np.transpose(adj, (0, 2, 1)).astype(np.int64)
    found = np.zeros(B, dtype=bool)
    for _ in range(max_length):
        r = reach.astype(np.int64)
        step_f = np.einsum("bsuk,buv->bsvk", r, fwd) > 0
        step_b = np.einsum("bsuk,buv->bsvk", r, bwd) > 0
        nxt = np.zeros_like(reach)
        nxt[..., 1:] |= step_f[..., :-1]
        nxt[..., :-1] |= step_b[..., 1:]
        reach = nxt
        found |= reach[:, idx, idx, max_length + 1].any(axis=1)
    return found


def all_digraph_matrices(n: int, loopless: bool = False) -> np.ndarray:
    """Every labeled digraph on n vertices as a stack of boolean adjacency matrices."""
    cells = [(i, j) for i in range(n) for j in range(n) if not (loopless and i == j)]
    bits = all_tuples(2, len(cells)).astype(bool)
    out = np.zeros((bits.shape[0], n, n), dtype=bool)
    for c, (i, j) in enumerate(cells):
        out[:, i, j] = bits[:, c]
    return out


def relation_from_matrix(m: np.ndarray) -> Relation:
    n = m.shape[0]
    return Relation.of(n, [(int(i), int(j)) for i, j in zip(*np.nonzero(m))])


def _code(matrix: np.ndarray) -> int:
    return int("".join("1" if v else "0" for v in np.asarray(matrix).reshape(-1)) or "0", 2)


def canonical_form(d: Relation) -> tuple[int, int]:
    """``(n, code)``: the largest adjacency bit code over relabelings that order
    vertices by (out-degree, in-degree, loop)."""
    _require_binary(d)
    n = d.size
    m = d.matrix().astype(bool)
    sig = [(int(m[v].sum()), int(m[:, v].sum()), bool(m[v, v])) for v in range(n)]
    groups = [[v for v in range(n) if sig[v] == s] for s in sorted(set(sig))]
    best = -1
    for parts in itertools.product(*(itertools.permutations(g) for g in groups)):
        order = [v for p in parts for v in p]
        best = max(best, _code(m[np.ix_(order, order)]))
    return n, best


def from_canonical(form: tuple[int, int]) -> Relation:
    n, code = form
    bits = [(code >> (n * n - 1 - i)) & 1 for i in range(n * n)]
    return relation_from_matrix(np.array(bits, dtype=bool).reshape(n, n))


# ---------------------------------------------------------------------------
# polymorphism search


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass
class SearchStats:
    cells: int = 0
    variables: int = 0
    free: int = 0
    constraints: int = 0
    nodes: int = 0
    elapsed: float = 0.0

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _pins(n: int, arity: int, constraints: set[str]):
    """Pinned cell values and cell groups forced equal by the requested shapes."""
    pinned: dict[int, int] = {}
    groups: list[list[int]] = []
    base = [n ** (arity - 1 - i) for i in range(arity)]

    def idx(t):
        return sum(a * b for a, b in zip(t, base))

    # near unanimity forces idempotency; weak near unanimity does not
    if constraints & {"idempotent", "nu"}:
        for a in range(n):
            pinned[idx([a] * arity)] = a
    for x in range(n):
        for y in range(n):
            if x == y:
                continue
            cells = []
            for pos in range(arity):
                t = [x] * arity
                t[pos] = y
                cells.append(idx(t))
            if "nu" in constraints:
                for c in cells:
                    pinned[c] = x
            elif "wnu" in constraints:
                groups.append(cells)
    return pinned, groups


def find_polymorphism(d: Relation, arity: int, constraints: Iterable[str] = ("idempotent",),
                      budget: int = DEFAULT_BUDGET, stats: SearchStats | None = None
                      ) -> OperationTable | None:
    """A compatible ``arity``-ary operation on the vertices meeting the shape constraints.

    Cells of the table are variables; idempotency and NU pin cells, WNU ties
    near-unanimous cells together.  Every pair of argument tuples that is an
    edge coordinatewise must map to an edge, enforced by arc consistency
    during a backtracking search (smallest domain first, lowest value first).
    Returns ``None`` when no such operation exists and raises
    :class:`BudgetExceeded` after ``budget`` search nodes.
    """
    _require_binary(d)
    cons = set(constraints)
    unknown = cons - set(CONSTRAINTS)
    if unknown:
        raise ValueError(f"unknown constraints {sorted(unknown)}; known: {CONSTRAINTS}")
    if "nu" in cons and arity < 3:
        raise ValueError("near unanimity needs arity >= 3")
    t0 = time.perf_counter()
    stats = stats if stats is not None else SearchStats()
    n = d.size
    ncells = n ** arity
    pinned, groups = _pins(n, arity, cons)
    uf = _UnionFind(ncells)
    for g in groups:
        for c in g[1:]:
            uf.union(g[0], c)
    root = [uf.find(c) for c in range(ncells)]
    var_of_root: dict[int, int] = {}
    for r in sorted(set(root)):
        var_of_root[r] = len(var_of_root)
    var = [var_of_root[r] for r in root]
    nv = len(var_of_root)

    full = (1 << n) - 1
    dom = [full] * nv
    for c, v in pinned.items():
        dom[var[c]] &= 1 << v
    out_mask = [0] * n
    in_mask = [0] * n
    loop_mask = 0
    for a, b in d.tuples:
        out_mask[a] |= 1 << b
        in_mask[b] |= 1 << a
        if a == b:
            loop_mask |= 1 << a

    # binary constraints (p, q): value(p) -> value(q) must be an edge
    edges = d.array() if len(d) else np.zeros((0, 2), dtype=np.int64)
    arcs: set[tuple[int, int]] = set()
    if len(edges):
        choice = all_tuples(len(edges), arity)
        tails = edges[choice, 0]
        heads = edges[choice, 1]
        w = np.array([n ** (arity - 1 - i) for i in range(arity)], dtype=np.int64)
        var_arr = np.array(var, dtype=np.int64)
        pv = var_arr[tails @ w]
        qv = var_arr[heads @ w]
        for p, q in set(zip(pv.tolist(), qv.tolist())):
            arcs.add((p, q))
    for p, q in arcs:
        if p == q:
            dom[p] &= loop_mask
    succ: list[list[int]] = [[] for _ in range(nv)]
    pred: list[list[int]] = [[] for _ in range(nv)]
    for p, q in sorted(arcs):
        if p != q:
            succ[p].append(q)
            pred[q].append(p)
    stats.cells, stats.variables, stats.constraints = ncells, nv, len(arcs)
    stats.free = sum(1 for x in dom if x & (x - 1))

    def support(mask: int, table: list[int]) -> int:
        s = 0
        v = 0
        while mask:
            if mask & 1:
                s |= table[v]
            mask >>= 1
            v += 1
        return s

    def propagate(dom: list[int], queue: list[int]) -> bool:
        pending = set(queue)
        work = deque(queue)
        while work:
            p = work.popleft()
            pending.discard(p)
            fwd = support(dom[p], out_mask)
            for q in succ[p]:
                nd = dom[q] & fwd
                if nd != dom[q]:
                    if not nd:
                        return False
                    dom[q] = nd
                    if q not in pending:
                        pending.add(q)
                        work.append(q)
            back = support(dom[p], in_mask)
            for q in pred[p]:
                nd = dom[q] & back
                if nd != dom[q]:
                    if not nd:
                        return False
                    dom[q] = nd
                    if q not in pending:
                        pending.add(q)
                        work.append(q)
        return True

    def finish(result):
        stats.elapsed = time.perf_counter() - t0
        return result

    if any(x == 0 for x in dom) or not propagate(dom, list(range(nv))):
        return finish(None)

    # iterative depth-first search with explicit domain snapshots
    stack = [(dom, None)]
    solution = None
    while stack:
        cur, _ = stack.pop()
        stats.nodes += 1
        if stats.nodes > budget:
            stats.elapsed = time.perf_counter() - t0
            raise BudgetExceeded(f"polymorphism search exceeded {budget} nodes")
        open_vars = [(bin(x).count("1"), p) for p, x in enumerate(cur) if x & (x - 1)]
        if not open_vars:
            solution = cur
            break
        _, p = min(open_vars)
        values = [v for v in range(n) if cur[p] >> v & 1]
        children = []
        for v in values:
            nxt = list(cur)
            nxt[p] = 1 << v
            if propagate(nxt, [p]):
                children.append(nxt)
        for child in reversed(children):
            stack.append((child, p))
    if solution is None:
        return finish(None)
    table = [solution[var[c]].bit_length() - 1 for c in range(ncells)]
    op = OperationTable(n, arity, table)
    if not compatible(op, d):
        raise AssertionError("polymorphism search produced an incompatible table")
    for kind in cons:
        if not check_shape(op, kind):
            raise AssertionError(f"polymorphism search produced a table violating {kind}")
    return finish(op)


# ---------------------------------------------------------------------------
# loop conjecture lab


@dataclass
class InstanceOutcome:
    digraph: Relation
    classification: GraphClass
    status: str  # counterexample | none | inconclusive | filtered
    polymorphism: OperationTable | None = None
    elapsed: float = 0.0
    nodes: int = 0

    def to_json(self) -> dict:
        return {"digraph": self.digraph.to_json(), "classification": self.classification.to_json(),
                "status": self.status,
                "polymorphism": None if self.polymorphism is None else self.polymorphism.to_json(),
                "elapsed": round(self.elapsed, 6), "nodes": self.nodes}


@dataclass
class ConjectureReport:
    max_vertices: int
    arity: int
    mode: str
    seed: int | None
    outcomes: list[InstanceOutcome] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def counterexamples(self) -> list[InstanceOutcome]:
        return [o for o in self.outcomes if o.status == "counterexample"]

    @property
    def inconclusive(self) -> list[InstanceOutcome]:
        return [o for o in self.outcomes if o.status == "inconclusive"]

    @property
    def searched(self) -> list[InstanceOutcome]:
        return [o for o in self.outcomes if o.status != "filtered"]

    def summary(self) -> dict:
        return {"max_vertices": self.max_vertices, "arity": self.arity, "mode": self.mode,
                "seed": self.seed, "instances": len(self.searched),
                "counterexamples": len(self.counterexamples),
                "inconclusive": len(self.inconclusive), "elapsed": round(self.elapsed, 3)}

    def to_json(self) -> dict:
        return {"summary": self.summary(), "instances": [o.to_json() for o in self.outcomes]}


def run_instance(d: Relation, arity: int = 3, budget: int = DEFAULT_BUDGET) -> InstanceOutcome:
    """Search one digraph for an idempotent NU polymorphism.

    Digraphs with a loop, or that are not smooth of algebraic length one,
    are filtered out without searching.
    """
    cls = graph_class(d)
    if cls.has_loop or not (cls.smooth and cls.algebraic_length_one):
        return InstanceOutcome(d, cls, "filtered")
    stats = SearchStats()
    t0 = time.perf_counter()
    try:
        op = find_polymorphism(d, arity, ("idempotent", "nu"), budget, stats)
    except BudgetExceeded:
        return InstanceOutcome(d, cls, "inconclusive", None, time.perf_counter() - t0, stats.nodes)
    status = "none" if op is None else "counterexample"
    return InstanceOutcome(d, cls, status, op, time.perf_counter() - t0, stats.nodes)


def loopless_candidates(n: int) -> list[Relation]:
    """Loopless smooth digraphs of algebraic length one on n vertices, one per
    isomorphism class, sorted by canonical form."""
    mats = all_digraph_matrices(n, loopless=True)
    forms = set()
    for m in mats:
        d = relation_from_matrix(m)
        if is_smooth(d) and algebraic_length_one(d):
            forms.add(canonical_form(d))
    return [from_canonical(f) for f in sorted(forms)]


def sample_candidates(n: int, count: int, seed: int, max_draws: int | None = None) -> list[Relation]:
    """``count`` uniformly drawn labeled loopless digraphs on n vertices that are
    smooth and of algebraic length one (rejection sampling)."""
    rng = random.Random(seed)
    cells = [(i, j) for i in range(n) for j in range(n) if i != j]
    out = []
    draws = 0
    max_draws = max_draws if max_draws is not None else 1000 * max(count, 1)
    while len(out) < count:
        draws += 1
        if draws > max_draws:
            raise BudgetExceeded(f"only {len(out)} of {count} candidates after {max_draws} draws")
        d = Relation.of(n, [c for c in cells if rng.random() < 0.5])
        if is_smooth(d) and algebraic_length_one(d):
            out.append(d)
    return out


def check_loop_conjecture(max_vertices: int, arity: int = 3, mode: str = "exhaustive",
                          sample: int = 1000, seed: int = 0,
                          budget: int = DEFAULT_BUDGET) -> ConjectureReport:
    """Look for a loopless smooth digraph of algebraic length one with an NU polymorphism.

    ``mode='exhaustive'`` covers every isomorphism class on 1..max_vertices
    vertices; ``mode='sample'`` draws ``sample`` labeled digraphs on exactly
    ``max_vertices`` vertices with the given seed.  Search results are shared
    between isomorphic instances.
    """
    if max_vertices > 6:
        raise BudgetExceeded("canonical forms are computed by permutation; at most 6 vertices")
    t0 = time.perf_counter()
    report = ConjectureReport(max_vertices, arity, mode, seed if mode == "sample" else None)
    if mode == "exhaustive":
        digraphs = [d for n in range(1, max_vertices + 1) for d in loopless_candidates(n)]
    elif mode == "sample":
        digraphs = sample_candidates(max_vertices, sample, seed)
    else:
        raise ValueError("mode is 'exhaustive' or 'sample'")
    cache: dict[tuple[int, int], InstanceOutcome] = {}
    for d in digraphs:
        key = canonical_form(d)
        if key not in cache:
            cache[key] = run_instance(from_canonical(key), arity, budget)
        hit = cache[key]
        if hit.status == "counterexample" and hit.digraph != d:
            # a table found for the canonical labeling does not fit this one
            hit = run_instance(d, arity, budget)
        report.outcomes.append(InstanceOutcome(d, hit.classification, hit.status,
                                               hit.polymorphism, hit.elapsed, hit.nodes))
    report.elapsed = time.perf_counter() - t0
    return report
