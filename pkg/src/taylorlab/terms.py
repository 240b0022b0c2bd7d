"""Terms, signatures and equation systems.

Terms are hash-consed: building the same structure twice returns the same
object, so equality and hashing are identity based and a term with heavy
sharing (e.g. an iterated star composition) is stored as a DAG.
"""

from __future__ import annotations

import json
import re
import threading
import weakref
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ArityError, ParseError


class Term:
    __slots__ = ("__weakref__",)

    is_var = False

    def __str__(self) -> str:
        return to_sexpr(self)

    def variables(self) -> tuple[str, ...]:
        """Variable names in order of first occurrence (left to right)."""
        seen: dict[str, None] = {}
        visited: set[int] = set()
        stack: list[Term] = [self]
        while stack:
            t = stack.pop()
            if t.is_var:
                seen.setdefault(t.name, None)
                continue
            if id(t) in visited:
                continue
            visited.add(id(t))
            stack.extend(reversed(t.args))
        return tuple(seen)

    def symbols(self) -> set[str]:
        return {n.head for n in self.nodes() if not n.is_var}

    def nodes(self) -> list[Term]:
        """Distinct subterms, children before parents."""
        order: list[Term] = []
        visited: set[int] = set()
        stack: list[tuple[Term, bool]] = [(self, False)]
        while stack:
            t, expanded = stack.pop()
            if expanded:
                order.append(t)
                continue
            if id(t) in visited:
                continue
            visited.add(id(t))
            stack.append((t, True))
            if not t.is_var:
                stack.extend((c, False) for c in reversed(t.args))
        return order

    def depth(self) -> int:
        d: dict[int, int] = {}
        for n in self.nodes():
            d[id(n)] = 0 if n.is_var else 1 + max(d[id(c)] for c in n.args)
        return d[id(self)]

    def substitute(self, mapping: Mapping[str, Term]) -> Term:
        """Replace variables by terms; unmapped variables stay."""
        out: dict[int, Term] = {}
        for n in self.nodes():
            if n.is_var:
                out[id(n)] = mapping.get(n.name, n)
            else:
                out[id(n)] = App(n.head, [out[id(c)] for c in n.args])
        return out[id(self)]


class Var(Term):
    __slots__ = ("name",)
    is_var = True

    def __new__(cls, name: str) -> Var:
        key = ("v", name)
        with _LOCK:
            t = _TABLE.get(key)
            if t is None:
                t = object.__new__(cls)
                t.name = name
                _TABLE[key] = t
        return t

    def __reduce__(self):
        return (Var, (self.name,))

    def __repr__(self) -> str:
        return f"Var({self.name!r})"


class App(Term):
    __slots__ = ("head", "args")

    def __new__(cls, head: str, args: Iterable[Term]) -> App:
        args = tuple(args)
        key = (head, args)
        with _LOCK:
            t = _TABLE.get(key)
            if t is None:
                t = object.__new__(cls)
                t.head = head
                t.args = args
                _TABLE[key] = t
        return t

    def __reduce__(self):
        return (App, (self.head, self.args))

    def __repr__(self) -> str:
        return f"App({self.head!r}, {len(self.args)} args)"


_LOCK = threading.Lock()
_TABLE: weakref.WeakValueDictionary = weakref.WeakValueDictionary()


def app(head: str, *args: Term | str) -> App:
    """Shorthand: strings become variables."""
    return App(head, [Var(a) if isinstance(a, str) else a for a in args])


def vars_(names: str | Sequence[str]) -> list[Var]:
    if isinstance(names, str):
        names = names.split()
    return [Var(n) for n in names]


@dataclass(frozen=True)
class TermFunction:
    """A term together with an explicit parameter list.

    Needed whenever a term does not use all of its arguments (dummy
    variables) or uses them out of first-occurrence order.
    """

    params: tuple[str, ...]
    body: Term

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        missing = set(self.body.variables()) - set(self.params)
        if missing:
            raise ValueError(f"free variables {sorted(missing)} not among parameters")
        if len(set(self.params)) != len(self.params):
            raise ValueError("repeated parameter names")

    @property
    def arity(self) -> int:
        return len(self.params)

    def __call__(self, *args: Term) -> Term:
        if len(args) != self.arity:
            raise ArityError(f"expected {self.arity} arguments, got {len(args)}")
        return self.body.substitute(dict(zip(self.params, args)))

    @classmethod
    def of_symbol(cls, symbol: str, arity: int) -> TermFunction:
        params = tuple(f"x{i}" for i in range(1, arity + 1))
        return cls(params, App(symbol, [Var(p) for p in params]))

    def __str__(self) -> str:
        return f"(lambda ({' '.join(self.params)}) {to_sexpr(self.body)})"


def as_function(t: Term | TermFunction, arity: int | None = None) -> TermFunction:
    if isinstance(t, TermFunction):
        if arity is not None and t.arity != arity:
            raise ArityError(f"bound term has arity {t.arity}, symbol needs {arity}")
        return t
    params = t.variables()
    if arity is not None and len(params) != arity:
        raise ArityError(
            f"term {to_sexpr(t)} has {len(params)} variables but arity {arity} is needed; "
            "wrap it in a TermFunction to fix the parameter order"
        )
    return TermFunction(params, t)


def inline(t: Term, binding: Mapping[str, Term | TermFunction]) -> Term:
    """Expand every application of a bound symbol by its definition."""
    funcs = {k: as_function(v) for k, v in binding.items()}
    out: dict[int, Term] = {}
    for n in t.nodes():
        if n.is_var:
            out[id(n)] = n
            continue
        args = [out[id(c)] for c in n.args]
        f = funcs.get(n.head)
        out[id(n)] = f(*args) if f is not None else App(n.head, args)
    return out[id(t)]


# ---------------------------------------------------------------------------
# signatures, equations


@dataclass(frozen=True)
class Signature:
    symbols: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        syms = dict(self.symbols)
        for name, ar in syms.items():
            if not isinstance(ar, int) or ar < 1:
                raise ArityError(f"symbol {name!r} has invalid arity {ar!r}")
            if not _IDENT.fullmatch(name):
                raise ParseError(f"invalid symbol name {name!r}")
        object.__setattr__(self, "symbols", syms)

    def __contains__(self, name: str) -> bool:
        return name in self.symbols

    def __getitem__(self, name: str) -> int:
        return self.symbols[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self.symbols)

    def __hash__(self):
        return hash(tuple(self.symbols.items()))

    def check(self, t: Term) -> None:
        for n in t.nodes():
            if n.is_var:
                continue
            if n.head not in self.symbols:
                raise ArityError(f"undeclared symbol {n.head!r}")
            if len(n.args) != self.symbols[n.head]:
                raise ArityError(
                    f"symbol {n.head!r} has arity {self.symbols[n.head]}, applied to {len(n.args)}"
                )


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term

    def variables(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(self.lhs.variables() + self.rhs.variables()))

    def symbols(self) -> set[str]:
        return self.lhs.symbols() | self.rhs.symbols()

    def is_linear(self) -> bool:
        return all(_height(s) <= 1 for s in (self.lhs, self.rhs))

    def __str__(self) -> str:
        return f"(= {to_sexpr(self.lhs)} {to_sexpr(self.rhs)})"


def _height(t: Term) -> int:
    return 0 if t.is_var else 1 + max((_height(a) for a in t.args), default=0)


@dataclass(frozen=True)
class EquationSystem:
    signature: Signature
    equations: tuple[Equation, ...]

    def __post_init__(self):
        object.__setattr__(self, "equations", tuple(self.equations))
        for eq in self.equations:
            self.signature.check(eq.lhs)
            self.signature.check(eq.rhs)

    def __iter__(self) -> Iterator[Equation]:
        return iter(self.equations)

    def __len__(self) -> int:
        return len(self.equations)

    def symbols_used(self) -> list[str]:
        used = set().union(*(e.symbols() for e in self.equations)) if self.equations else set()
        return [s for s in self.signature if s in used]

    def is_linear(self) -> bool:
        return all(e.is_linear() for e in self.equations)

    def with_equations(self, extra: Iterable[Equation]) -> EquationSystem:
        return EquationSystem(self.signature, self.equations + tuple(extra))

    def to_json(self) -> dict:
        return {
            "symbols": dict(self.signature.symbols),
            "equations": [str(e) for e in self.equations],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, data: dict | str) -> EquationSystem:
        if isinstance(data, str):
            try:
                data = json.loads(data)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from None
        try:
            sig = Signature({k: int(v) for k, v in data["symbols"].items()})
            eqs = data["equations"]
        except (KeyError, TypeError, AttributeError) as exc:
            raise ParseError(f"equation system JSON needs 'symbols' and 'equations': {exc}") from None
        return cls(sig, [parse_equation(s, sig) for s in eqs])


def chain(terms: Sequence[Term]) -> list[Equation]:
    """``t1 ≈ t2 ≈ ... ≈ tk`` as consecutive equations."""
    return [Equation(a, b) for a, b in zip(terms, terms[1:])]


# ---------------------------------------------------------------------------
# s-expressions

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_'.\-]*|[0-9]+[A-Za-z0-9_']*")
_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")


def _tokens(text: str) -> list[tuple[str, int]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError("unexpected character", pos)
        tok = m.group(1) or m.group(2) or m.group(3)
        out.append((tok, m.start(m.lastindex)))
        pos = m.end()
    return out


def _parse_sexpr(text: str):
    toks = _tokens(text)
    if not toks:
        raise ParseError("empty input", 0)
    stack: list[list] = [[]]
    opens: list[int] = []
    for tok, pos in toks:
        if tok == "(":
            stack.append([])
            opens.append(pos)
        elif tok == ")":
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", pos)
            done = stack.pop()
            start = opens.pop()
            stack[-1].append((done, start))
        else:
            if not _IDENT.fullmatch(tok) and tok != "=":
                raise ParseError(f"invalid identifier {tok!r}", pos)
            stack[-1].append((tok, pos))
    if len(stack) != 1:
        raise ParseError("unbalanced '('", opens[-1])
    if len(stack[0]) != 1:
        raise ParseError("expected exactly one expression", stack[0][1][1] if len(stack[0]) > 1 else 0)
    return stack[0][0]


def _build(node, sig: Signature) -> Term:
    item, pos = node
    if isinstance(item, str):
        if item in sig:
            raise ArityError(f"symbol {item!r} of arity {sig[item]} used without arguments (offset {pos})")
        return Var(item)
    if not item:
        raise ParseError("empty application", pos)
    head, hpos = item[0]
    if not isinstance(head, str):
        raise ParseError("application head must be a symbol", hpos)
    if head not in sig:
        raise ArityError(f"undeclared symbol {head!r} applied (offset {hpos})")
    args = [_build(a, sig) for a in item[1:]]
    if len(args) != sig[head]:
        raise ArityError(f"symbol {head!r} has arity {sig[head]}, got {len(args)} arguments (offset {hpos})")
    return App(head, args)


def parse_term(text: str, sig: Signature | Mapping[str, int]) -> Term:
    """Parse ``(head arg ...)``; identifiers not declared in ``sig`` are variables."""
    if not isinstance(sig, Signature):
        sig = Signature(sig)
    return _build(_parse_sexpr(text), sig)


def parse_equation(text: str, sig: Signature | Mapping[str, int]) -> Equation:
    if not isinstance(sig, Signature):
        sig = Signature(sig)
    item, pos = _parse_sexpr(text)
    if not isinstance(item, list) or len(item) != 3 or item[0][0] != "=":
        raise ParseError("equation must have the form (= lhs rhs)", pos)
    return Equation(_build(item[1], sig), _build(item[2], sig))


def to_sexpr(t: Term) -> str:
    memo: dict[int, str] = {}
    for n in t.nodes():
        if n.is_var:
            memo[id(n)] = n.name
        else:
            memo[id(n)] = "(" + " ".join([n.head] + [memo[id(c)] for c in n.args]) + ")"
    return memo[id(t)]


# ---------------------------------------------------------------------------
# star composition


def star_compose(f: str | Term | TermFunction, g: str | Term | TermFunction,
                 f_arity: int | None = None, g_arity: int | None = None,
                 prefix: str = "x") -> TermFunction:
    """The (n*m)-ary term f(g(x_1_1..x_1_m), ..., g(x_n_1..x_n_m)).

    Symbols need their arity passed explicitly. Fresh variables are named
    ``{prefix}_{i}_{j}`` and listed row-major.
    """
    ff = _to_function(f, f_arity)
    gf = _to_function(g, g_arity)
    n, m = ff.arity, gf.arity
    params = []
    blocks = []
    for i in range(1, n + 1):
        row = [f"{prefix}_{i}_{j}" for j in range(1, m + 1)]
        params.extend(row)
        blocks.append(gf(*[Var(v) for v in row]))
    return TermFunction(tuple(params), ff(*blocks))


def _to_function(f, arity) -> TermFunction:
    if isinstance(f, str):
        if arity is None:
            raise ArityError(f"arity of symbol {f!r} must be given")
        return TermFunction.of_symbol(f, arity)
    return as_function(f, arity)
