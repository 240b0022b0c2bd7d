"""Ground congruence closure with bounded axiom instantiation, and finite countermodels."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .algebra import FiniteAlgebra, OperationTable, satisfies
from .closure import term_clone_slice
from .conditions import builtin_system, idempotency_equations, is_taylor_shape, taylor_to_pair_system
from .errors import BudgetExceeded, ShapeError
from .forge import SubstitutionScheme, q_and_c_from_strong_double_loop, substituted, terminator_from_q
from .terms import App, Equation, EquationSystem, Signature, Term, TermFunction, Var, inline, star_compose

PROVED, UNKNOWN = "Proved", "Unknown"
DEFAULT_NODE_BUDGET = 200_000


@dataclass
class ProofResult:
    status: str
    depth: int
    universe: int
    classes: int
    instances: int
    reason: str = ""
    elapsed: float = 0.0

    @property
    def proved(self) -> bool:
        return self.status == PROVED

    def to_json(self) -> dict:
        return dict(self.__dict__)


class ProofSession:
    """A term universe with a union-find kept closed under congruence.

    Nodes are ``(head, children)``; variables of goals are constants
    (nodes without children).  Use one session per proof attempt.
    """

    def __init__(self, node_budget: int = DEFAULT_NODE_BUDGET):
        self.heads: list[str] = []
        self.children: list[tuple[int, ...]] = []
        self.parent: list[int] = []
        self.intern_table: dict[tuple, int] = {}
        self.signatures: dict[tuple, int] = {}
        self.node_budget = node_budget
        self.instances = 0

    def __len__(self) -> int:
        return len(self.heads)

    def find(self, a: int) -> int:
        p = self.parent
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True

    def node(self, head: str, children: Sequence[int] = ()) -> int:
        key = (head, tuple(children))
        i = self.intern_table.get(key)
        if i is None:
            if len(self.heads) >= self.node_budget:
                raise BudgetExceeded("term universe budget exceeded")
            i = len(self.heads)
            self.heads.append(head)
            self.children.append(tuple(children))
            self.parent.append(i)
            self.intern_table[key] = i
            sig = (head, tuple(self.find(c) for c in children))
            other = self.signatures.get(sig)
            if other is None:
                self.signatures[sig] = i
            else:
                self.union(i, other)
        return i

    def add(self, t: Term, env: Mapping[str, int] | None = None) -> int:
        """Intern ``t``; variables in ``env`` stand for existing nodes, others are constants."""
        memo: dict[int, int] = {}
        for n in t.nodes():
            if n.is_var:
                memo[id(n)] = env[n.name] if env and n.name in env else self.node("$" + n.name)
            else:
                memo[id(n)] = self.node(n.head, [memo[id(c)] for c in n.args])
        return memo[id(t)]

    def lookup(self, t: Term, env: Mapping[str, int]) -> int | None:
        """The class of ``t`` under ``env`` if it already occurs in the universe (up to congruence)."""
        memo: dict[int, int] = {}
        for n in t.nodes():
            if n.is_var:
                memo[id(n)] = self.find(env[n.name])
                continue
            sig = (n.head, tuple(memo[id(c)] for c in n.args))
            hit = self.signatures.get(sig)
            if hit is None:
                return None
            memo[id(n)] = self.find(hit)
        return memo[id(t)]

    def close(self):
        """Merge congruent nodes until quiescence."""
        changed = True
        while changed:
            changed = False
            table: dict[tuple, int] = {}
            for i, (h, ch) in enumerate(zip(self.heads, self.children)):
                sig = (h, tuple(self.find(c) for c in ch))
                other = table.get(sig)
                if other is None:
                    table[sig] = i
                elif self.union(i, other):
                    changed = True
            self.signatures = table

    def representatives(self) -> list[int]:
        return sorted({self.find(i) for i in range(len(self))})

    def is_congruence_closed(self) -> bool:
        seen: dict[tuple, int] = {}
        for i, (h, ch) in enumerate(zip(self.heads, self.children)):
            sig = (h, tuple(self.find(c) for c in ch))
            if sig in seen and self.find(seen[sig]) != self.find(i):
                return False
            seen.setdefault(sig, i)
        return True

    def instantiate(self, axioms: Sequence[Equation], max_instances: int) -> int:
        """One round: every axiom under every assignment of its variables to classes.

        An instance is used only when a non-variable side already occurs
        in the universe; the other side is then added and merged.
        """
        reps = self.representatives()
        used = 0
        for eq in axioms:
            names = eq.variables()
            count = len(reps) ** len(names)
            if self.instances + count > max_instances:
                raise BudgetExceeded("instantiation budget exceeded")
            for choice in itertools.product(reps, repeat=len(names)):
                env = dict(zip(names, choice))
                left = None if eq.lhs.is_var else self.lookup(eq.lhs, env)
                right = None if eq.rhs.is_var else self.lookup(eq.rhs, env)
                if left is None and right is None:
                    continue
                a = left if left is not None else self.add(eq.lhs, env)
                b = right if right is not None else self.add(eq.rhs, env)
                if self.union(a, b):
                    used += 1
            self.instances += count
        self.close()
        return used


def _axioms_of(axioms: EquationSystem | Iterable[Equation]) -> list[Equation]:
    return list(axioms.equations if isinstance(axioms, EquationSystem) else axioms)


def cc_prove(axioms: EquationSystem | Iterable[Equation], goal: Equation, depth: int = 2,
             node_budget: int = DEFAULT_NODE_BUDGET, max_instances: int = 5_000_000) -> ProofResult:
    """Try to derive ``goal`` from ``axioms`` with ``depth`` rounds of instantiation.

    Sound but incomplete: ``Unknown`` is not a refutation.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    t0 = time.perf_counter()
    ax = _axioms_of(axioms)
    s = ProofSession(node_budget)
    lhs, rhs = s.add(goal.lhs), s.add(goal.rhs)
    s.close()

    def result(status, k, reason=""):
        return ProofResult(status, k, len(s), len(s.representatives()), s.instances, reason,
                           time.perf_counter() - t0)

    if s.find(lhs) == s.find(rhs):
        return result(PROVED, 0)
    for k in range(1, depth + 1):
        try:
            s.instantiate(ax, max_instances)
        except BudgetExceeded as exc:
            return result(UNKNOWN, k, f"budget: {exc}")
        if s.find(lhs) == s.find(rhs):
            return result(PROVED, k)
    return result(UNKNOWN, depth, "goal sides not merged")


# ---------------------------------------------------------------------------
# random finite models of linear systems


def _cells(eq_side: Term, env: Mapping[str, int], size: int):
    if eq_side.is_var:
        return ("const", env[eq_side.name])
    if any(not a.is_var for a in eq_side.args):
        raise ShapeError(f"side {eq_side} is not linear")
    idx = 0
    for a in eq_side.args:
        idx = idx * size + env[a.name]
    return (eq_side.head, idx)


def linear_constraints(sys: EquationSystem, size: int):
    """Union-find classes of table cells forced equal by ``sys`` on a universe of ``size``.

    Returns ``(classes, constant)``: ``classes`` maps each constrained cell
    ``(symbol, index)`` to its class root, ``constant`` maps roots to the
    forced value.  ``None`` if two different values are forced together.
    """
    parent: dict = {}

    def find(a):
        parent.setdefault(a, a)
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for eq in sys.equations:
        names = eq.variables()
        for vals in itertools.product(range(size), repeat=len(names)):
            env = dict(zip(names, vals))
            a, b = find(_cells(eq.lhs, env, size)), find(_cells(eq.rhs, env, size))
            if a != b:
                parent[max(a, b, key=repr)] = min(a, b, key=repr)
    constant: dict = {}
    for cell in list(parent):
        if cell[0] == "const":
            r = find(cell)
            if constant.get(r, cell[1]) != cell[1]:
                return None
            constant[r] = cell[1]
    classes = {c: find(c) for c in parent if c[0] != "const"}
    return classes, constant


def _model_from_values(sig: Signature, size: int, classes, constant, free_value, base):
    tables = {s: base[s].copy() for s in sig.symbols}
    for (sym, idx), root in classes.items():
        tables[sym][idx] = constant[root] if root in constant else free_value[root]
    return FiniteAlgebra(size, {s: OperationTable(size, sig[s], t) for s, t in tables.items()})


def random_linear_model(sys: EquationSystem, size: int, seed: int = 0,
                        signature: Signature | None = None) -> FiniteAlgebra | None:
    """A random algebra on {0..size-1} satisfying the linear system ``sys``.

    Forced cells follow the union-find classes; every other cell and every
    unforced class gets a uniform random value.  ``None`` if the system
    forces two distinct constants together on this universe.
    """
    sig = signature or sys.signature
    cons = linear_constraints(sys, size)
    if cons is None:
        return None
    classes, constant = cons
    rng = np.random.default_rng(seed)
    base = {s: rng.integers(0, size, size ** sig[s]) for s in sig.symbols}
    roots = sorted({r for r in classes.values() if r not in constant}, key=repr)
    free_value = {r: int(rng.integers(0, size)) for r in roots}
    A = _model_from_values(sig, size, classes, constant, free_value, base)
    if not satisfies(A, sys):
        raise AssertionError("sampled model violates its own axioms")
    return A


def linear_models(sys: EquationSystem, size: int, signature: Signature | None = None):
    """Every model of the linear system on {0..size-1}.

    Free units are the unforced classes (by first cell) and the cells no
    equation mentions, ordered by symbol then cell index; their values run
    through {0..size-1}^units in lexicographic order.
    """
    sig = signature or sys.signature
    cons = linear_constraints(sys, size)
    if cons is None:
        return
    classes, constant = cons
    units: list = []
    seen = set()
    for sym in sig.symbols:
        for idx in range(size ** sig[sym]):
            root = classes.get((sym, idx))
            if root is None:
                units.append(("cell", (sym, idx)))
            elif root not in constant and root not in seen:
                seen.add(root)
                units.append(("class", root))
    for vals in itertools.product(range(size), repeat=len(units)):
        base = {s: np.zeros(size ** sig[s], dtype=np.int64) for s in sig.symbols}
        free_value = {}
        for (kind, u), v in zip(units, vals):
            if kind == "cell":
                base[u[0]][u[1]] = v
            else:
                free_value[u] = v
        yield _model_from_values(sig, size, classes, constant, free_value, base)


def audit(axioms: EquationSystem, goal: Equation, seeds: Sequence[int] = (0, 1, 2),
          size: int = 3) -> list[bool]:
    """Model-check ``goal`` on random models of the linear ``axioms``."""
    sig = dict(axioms.signature.symbols)
    for side in (goal.lhs, goal.rhs):
        for n in side.nodes():
            if not n.is_var:
                sig.setdefault(n.head, len(n.args))
    signature = Signature(sig)
    goal_sys = EquationSystem(signature, [goal])
    out = []
    for s in seeds:
        A = random_linear_model(axioms, size, s, signature)
        out.append(A is not None and satisfies(A, goal_sys))
    return out


# ---------------------------------------------------------------------------
# the canned derivation suite


@dataclass
class SuiteGoal:
    name: str
    group: str
    axioms: EquationSystem
    goal: Equation
    uses_idempotency: bool
    depth: int = 2


@dataclass
class SuiteEntry:
    name: str
    group: str
    uses_idempotency: bool
    result: ProofResult
    audit: list[bool] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"name": self.name, "group": self.group, "uses_idempotency": self.uses_idempotency,
                "result": self.result.to_json(), "audit": self.audit}


@dataclass
class SuiteReport:
    entries: list[SuiteEntry]
    ablation: list[SuiteEntry]
    elapsed: float = 0.0

    @property
    def all_proved(self) -> bool:
        return all(e.result.proved for e in self.entries)

    @property
    def audits_pass(self) -> bool:
        return all(all(e.audit) for e in self.entries if e.result.proved)

    @property
    def ablation_broken(self) -> set[str]:
        return {e.name for e in self.ablation if not e.result.proved}

    @property
    def idempotency_goals(self) -> set[str]:
        return {e.name for e in self.entries if e.uses_idempotency}

    @property
    def ablation_matches(self) -> bool:
        return self.ablation_broken == self.idempotency_goals

    @property
    def ok(self) -> bool:
        return self.all_proved and self.audits_pass and self.ablation_matches

    def failures(self) -> list[str]:
        return [e.name for e in self.entries if not e.result.proved]

    def to_json(self) -> dict:
        return {"ok": self.ok, "all_proved": self.all_proved, "audits_pass": self.audits_pass,
                "ablation_broken": sorted(self.ablation_broken),
                "idempotency_goals": sorted(self.idempotency_goals),
                "entries": [e.to_json() for e in self.entries],
                "ablation": [e.to_json() for e in self.ablation], "elapsed": round(self.elapsed, 3)}


def _with_idempotency(sys: EquationSystem) -> EquationSystem:
    return sys.with_equations(idempotency_equations(sys.signature))


def suite_goals() -> list[SuiteGoal]:
    goals: list[SuiteGoal] = []

    # the two linear equations for s = t*t built from a Taylor term t
    ts = is_taylor_shape(builtin_system("wnu", 3))
    pair = taylor_to_pair_system(ts, "s")
    tt = star_compose(ts.symbol, ts.symbol, ts.arity, ts.arity)
    ax = _with_idempotency(ts.equations())
    for k, eq in enumerate(pair.equations, start=1):
        goal = Equation(inline(eq.lhs, {"s": tt}), inline(eq.rhs, {"s": tt}))
        goals.append(SuiteGoal(f"taylor_pair_eq{k}", "taylor_pair", ax, goal, uses_idempotency=k == 1))

    # four substitutions into d*d*d
    scheme = SubstitutionScheme()
    rows = dict(zip(scheme.RULES, scheme.rows()))
    sub = {r: substituted("d", rows[r]) for r in scheme.RULES}
    ax = _with_idempotency(builtin_system("double_loop"))
    for a, b, idem in (("a", "b", False), ("c", "d", False), ("b", "c", True), ("a", "d", True)):
        goals.append(SuiteGoal(f"substitution_{a}~{b}", "double_to_strong", ax,
                               Equation(sub[a], sub[b]), uses_idempotency=idem))

    # the q1, q2, c equations from a strong double loop term
    qc = q_and_c_from_strong_double_loop("d")
    ax = _with_idempotency(builtin_system("strong_double_loop"))
    for k, eq in enumerate(builtin_system("condition5").equations, start=1):
        goals.append(SuiteGoal(f"condition5_eq{k}", "strong_to_condition5", ax,
                               Equation(inline(eq.lhs, qc), inline(eq.rhs, qc)), uses_idempotency=False))

    # strong terminator terms from the q1, q2, c equations
    ax = _with_idempotency(builtin_system("condition5"))
    term = terminator_from_q(TermFunction(tuple("xyz"), _app("c", "xyz")),
                             TermFunction(tuple("uvxy"), _app("q1", "uvxy")),
                             TermFunction(tuple("uvxy"), _app("q2", "uvxy")))
    for k, eq in enumerate(builtin_system("strong_terminator").equations, start=1):
        goals.append(SuiteGoal(f"terminator_eq{k}", "condition5_to_terminator", ax,
                               Equation(inline(eq.lhs, term), inline(eq.rhs, term)), uses_idempotency=False))
    return goals


def _app(symbol: str, names: str) -> Term:
    return App(symbol, [Var(n) for n in names])


def _without_idempotency(sys: EquationSystem) -> EquationSystem:
    idem = set(map(str, idempotency_equations(sys.signature)))
    return EquationSystem(sys.signature, [e for e in sys.equations if str(e) not in idem])


def verify_derivation_suite(depth: int = 2, audit_seeds: Sequence[int] = (0, 1, 2),
                            ablation: bool = True) -> SuiteReport:
    """Prove every canned derivation goal, audit each proof on random models,
    and rerun without idempotency axioms to see which goals depend on them."""
    t0 = time.perf_counter()
    entries, ablated = [], []
    for g in suite_goals():
        res = cc_prove(g.axioms, g.goal, min(depth, g.depth))
        checks = audit(g.axioms, g.goal, audit_seeds) if res.proved else []
        entries.append(SuiteEntry(g.name, g.group, g.uses_idempotency, res, checks))
        if ablation:
            res2 = cc_prove(_without_idempotency(g.axioms), g.goal, min(depth, g.depth))
            ablated.append(SuiteEntry(g.name, g.group, g.uses_idempotency, res2))
    return SuiteReport(entries, ablated, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# countermodels


@dataclass
class Countermodel:
    """An algebra whose basic operations satisfy the hypotheses under their own names,
    while no assignment of term operations satisfies the goal."""

    algebra: FiniteAlgebra
    hypotheses: EquationSystem
    goal: EquationSystem
    slice_sizes: dict[int, int]
    candidates_tried: int

    def replay(self) -> bool:
        return satisfies(self.algebra, self.hypotheses) and goal_witness(self.algebra, self.goal) is None

    def to_json(self) -> dict:
        return {"algebra": self.algebra.to_json(), "slice_sizes": self.slice_sizes,
                "candidates_tried": self.candidates_tried}


@dataclass(frozen=True)
class NoCountermodel:
    inconclusive: bool
    candidates_tried: int
    reason: str = ""

    def __bool__(self):
        return False

    def to_json(self) -> dict:
        return {"inconclusive": self.inconclusive, "candidates_tried": self.candidates_tried,
                "reason": self.reason}


class _Inconclusive(Exception):
    pass


def goal_witness(A: FiniteAlgebra, goal: EquationSystem, cap: int = 100_000,
                 max_assignments: int = 1_000_000) -> dict | None:
    """Term operations of ``A`` satisfying ``goal``, searched over complete clone slices.

    Returns a binding ``{symbol: OperationTable}`` or ``None`` when no
    assignment works.  Raises when a slice or the assignment space exceeds
    its budget.
    """
    symbols = goal.symbols_used()
    slices = {}
    for s in symbols:
        k = goal.signature[s]
        if k not in slices:
            c = term_clone_slice(A, k, cap=cap)
            if not c.complete:
                raise _Inconclusive(f"clone slice of arity {k} exceeded {cap} elements")
            slices[k] = [OperationTable(A.size, k, row) for row in c.elements]
    total = 1
    for s in symbols:
        total *= len(slices[goal.signature[s]])
    if total > max_assignments:
        raise _Inconclusive(f"{total} assignments exceed the budget")
    for combo in itertools.product(*(slices[goal.signature[s]] for s in symbols)):
        B = FiniteAlgebra(A.size, dict(zip(symbols, combo)))
        if satisfies(B, goal):
            return dict(zip(symbols, combo))
    return None


def find_countermodel(hypotheses: EquationSystem, goal: EquationSystem, max_size: int = 2,
                      budget: int = 10_000, seed: int = 0, samples: int = 50) -> Countermodel | NoCountermodel:
    """An algebra satisfying ``hypotheses`` (basic operations named by its symbols)
    in which no term operations satisfy ``goal``.

    Size 2 is enumerated exhaustively, larger sizes by ``samples`` seeded
    random models.  ``budget`` bounds the number of candidate algebras.
    """
    tried = 0
    inconclusive = False
    reason = ""
    for size in range(2, max_size + 1):
        if size == 2:
            candidates = linear_models(hypotheses, size)
        else:
            candidates = (random_linear_model(hypotheses, size, seed * 1_000_003 + i)
                          for i in range(samples))
        for A in candidates:
            if A is None:
                continue
            if tried >= budget:
                return NoCountermodel(True, tried, "candidate budget exhausted")
            tried += 1
            try:
                w = goal_witness(A, goal)
            except _Inconclusive as exc:
                inconclusive, reason = True, str(exc)
                continue
            if w is None:
                return Countermodel(A, hypotheses, goal,
                                    {k: len(term_clone_slice(A, k).elements)
                                     for k in sorted({goal.signature[s] for s in goal.symbols_used()})},
                                    tried)
    return NoCountermodel(inconclusive, tried, reason)
