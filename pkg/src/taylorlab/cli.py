"""Command-line interface.  Every command prints one JSON report on standard output.

Exit codes: 0 success, 1 negative result, 2 inconclusive or budget, 3 usage
or input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

from .algebra import FiniteAlgebra, Relation, is_taylor_operation
from .closure import DEFAULT_CAP
from .conditions import BUILTIN_NAMES, builtin_system, check_trivial
from .digraphs import check_loop_conjecture
from .errors import BudgetExceeded, ParseError, PreconditionError, TaylorLabError
from .forge import (
    FOUND,
    NOT_TAYLOR,
    compose,
    double_loop_from_taylor,
    q_and_c_from_strong_double_loop,
    siggers_from_nu,
    strong_double_loop_from_double_loop,
    terminator_from_q,
    weak_3cube_from_strong_double_loop,
)
from .library import ALGEBRAS, named_algebra
from .loops import MODES, find_loop
from .prover import cc_prove, find_countermodel, verify_derivation_suite
from .terms import EquationSystem, Signature, parse_equation, to_sexpr

OK, NEGATIVE, INCONCLUSIVE, USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# inputs


class Inputs:
    """Loads named or file inputs and remembers a digest of each."""

    def __init__(self):
        self.digests: dict[str, str] = {}

    def _read(self, path: str) -> str:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        self.digests[path] = hashlib.sha256(text.encode()).hexdigest()
        return text

    def _parse(self, spec: str, kind: str, loader):
        if os.path.exists(spec):
            text = self._read(spec)
            try:
                return loader(text)
            except ParseError as exc:
                err = ParseError(f"{spec}: {exc}")
                err.position = exc.position
                raise err from None
        return None

    def system(self, spec: str) -> EquationSystem:
        sys_ = self._parse(spec, "system", EquationSystem.from_json)
        if sys_ is not None:
            return sys_
        name = spec[:-5] if spec.endswith(".json") else spec
        try:
            sys_ = builtin_system(name)
        except (KeyError, ValueError):
            raise UsageError(f"no file {spec!r} and no builtin system of that name; "
                             f"builtins: {', '.join(BUILTIN_NAMES)}") from None
        self.digests[spec] = "builtin:" + name
        return sys_

    def algebra(self, spec: str) -> FiniteAlgebra:
        A = self._parse(spec, "algebra", FiniteAlgebra.from_json)
        if A is not None:
            return A
        name = spec[:-5] if spec.endswith(".json") else spec
        if name not in ALGEBRAS:
            raise UsageError(f"no file {spec!r} and no named algebra of that name; "
                             f"named: {', '.join(sorted(ALGEBRAS))}")
        self.digests[spec] = "builtin:" + name
        return named_algebra(name)

    def relation(self, spec: str, size: int) -> Relation:
        R = self._parse(spec, "relation", lambda t: Relation.from_json(t, size))
        if R is None:
            raise UsageError(f"relation file {spec!r} not found")
        return R


def _op_name(A: FiniteAlgebra, op: str | None) -> str:
    if op is None:
        if len(A.ops) != 1:
            raise UsageError(f"--op is required; operations: {sorted(A.ops)}")
        return next(iter(A.ops))
    if op not in A.ops:
        raise UsageError(f"unknown operation {op!r}; operations: {sorted(A.ops)}")
    return op


def _term_json(tf) -> dict:
    return {"params": list(tf.params), "body": to_sexpr(tf.body)}


# ---------------------------------------------------------------------------
# commands; each returns (exit code, outcome, artifacts)


def cmd_check_trivial(args, inp: Inputs):
    sys_ = inp.system(args.system)
    w = check_trivial(sys_)
    if w is None:
        return NEGATIVE, {"trivial": False}, {}
    return OK, {"trivial": True, "witness": {s: f"pi{i}" for s, i in w.choice.items()}}, {}


def cmd_is_taylor(args, inp: Inputs):
    A = inp.algebra(args.algebra)
    op = _op_name(A, args.op)
    rep = is_taylor_operation(A.ops[op])
    if not rep:
        return NEGATIVE, {"taylor": False, "uncovered_coordinate": rep.coordinate,
                          "idempotent": rep.idempotent}, {}
    eqs = [str(e) for e in rep.system.equations().equations]
    return OK, {"taylor": True, "idempotent": rep.idempotent}, {"system": eqs}


def cmd_find_loop(args, inp: Inputs):
    A = inp.algebra(args.algebra)
    op = _op_name(A, args.op)
    R = inp.relation(args.relation, A.size)
    try:
        cert = find_loop(R, A.ops[op], args.mode)
    except PreconditionError as exc:
        ce = exc.counterexample
        return NEGATIVE, {"loop": None, "precondition": str(exc)}, {"counterexample": repr(ce)}
    frames = [{"phase": f.phase, "relation": f.relation_id, "g_arity": f.g_arity,
               "cycle_length": f.cycle_length} for f in cert.trace]
    return OK, {"loop": list(cert.loop)}, {"trace": frames}


def cmd_derive(args, inp: Inputs):
    what = args.what
    if what in ("strong-double-loop", "terminator"):
        d = args.symbol
        if what == "strong-double-loop":
            con = strong_double_loop_from_double_loop(d)
            return OK, {"derived": what, "columns": con.report()}, {"term": _term_json(con.term)}
        qc = q_and_c_from_strong_double_loop(d)
        terms = terminator_from_q(qc["c"], qc["q1"], qc["q2"])
        return OK, {"derived": what, "symbols": list(terms)}, {
            "terms": {k: _term_json(v) for k, v in terms.items()}}
    if args.algebra is None:
        raise UsageError(f"derive {what} needs --algebra")
    A = inp.algebra(args.algebra)
    if what == "siggers":
        res = siggers_from_nu(A, _op_name(A, args.op), args.cap)
    elif what == "double-loop":
        res = double_loop_from_taylor(A, [_op_name(A, args.op)] if args.op else None, args.cap)
    else:
        dl = double_loop_from_taylor(A, [_op_name(A, args.op)] if args.op else None, args.cap)
        if dl.status != FOUND:
            res = dl
        else:
            strong = compose(strong_double_loop_from_double_loop("d").term, {"d": dl.term})
            res = weak_3cube_from_strong_double_loop(A, strong, args.cap)
    code = {FOUND: OK, NOT_TAYLOR: NEGATIVE}.get(res.status, INCONCLUSIVE)
    out = res.to_json()
    term = out.pop("term")
    return code, dict(out, derived=what), {"term": term}


def cmd_prove(args, inp: Inputs):
    ax = inp.system(args.axioms)
    goal_text = inp._read(args.goal).strip() if os.path.exists(args.goal) else args.goal
    sig = dict(ax.signature.symbols)
    for extra in args.symbol or []:
        name, _, k = extra.partition("=")
        sig[name] = int(k)
    goal = parse_equation(goal_text, Signature(sig))
    res = cc_prove(ax, goal, args.depth)
    code = OK if res.proved else INCONCLUSIVE
    return code, {"status": res.status, "depth": res.depth, "reason": res.reason}, {
        "universe": res.universe, "classes": res.classes, "instances": res.instances}


def cmd_verify_suite(args, inp: Inputs):
    rep = verify_derivation_suite(args.depth)
    data = rep.to_json()
    entries = data.pop("entries")
    ablation = data.pop("ablation")
    data.pop("elapsed")
    return (OK if rep.ok else NEGATIVE), data, {
        "goals": {e["name"]: e["result"]["status"] for e in entries},
        "ablation": {e["name"]: e["result"]["status"] for e in ablation}}


def cmd_countermodel(args, inp: Inputs):
    hyp = inp.system(args.hyp)
    goal = inp.system(args.goal)
    res = find_countermodel(hyp, goal, args.max_size, args.budget, args.seed)
    if res:
        return OK, {"countermodel": True, "replayed": res.replay()}, res.to_json()
    code = INCONCLUSIVE if res.inconclusive else NEGATIVE
    return code, {"countermodel": None, **res.to_json()}, {}


def cmd_explore(args, inp: Inputs):
    mode = "sample" if args.sample else "exhaustive"
    rep = check_loop_conjecture(args.max_vertices, args.arity, mode, args.sample or 0,
                                args.seed, args.budget)
    summary = rep.summary()
    summary.pop("elapsed")
    if rep.counterexamples:
        code = NEGATIVE
    elif rep.inconclusive:
        code = INCONCLUSIVE
    else:
        code = OK
    arts = {"counterexamples": [o.to_json() for o in rep.counterexamples]}
    if args.details:
        arts["instances"] = [o.to_json() for o in rep.outcomes]
    return code, summary, arts


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="taylorlab", description="Finite idempotent algebra workbench.")
    p.add_argument("--format", dest="top_format", choices=("json", "text"))
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "text"))
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add_parser(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    s = add_parser("check-trivial", help="decide whether projections satisfy a system")
    s.add_argument("system", help="system JSON file or builtin name (e.g. maltsev, wnu(3))")
    s.set_defaults(func=cmd_check_trivial)

    s = add_parser("is-taylor", help="find a Taylor system satisfied by an operation")
    s.add_argument("--algebra", required=True)
    s.add_argument("--op")
    s.set_defaults(func=cmd_is_taylor)

    s = add_parser("find-loop", help="constructive loop lemma")
    s.add_argument("--algebra", required=True)
    s.add_argument("--op")
    s.add_argument("--relation", required=True)
    s.add_argument("--mode", choices=MODES, default="nu")
    s.set_defaults(func=cmd_find_loop)

    s = add_parser("derive", help="synthesize a term")
    s.add_argument("what", choices=("siggers", "double-loop", "weak-3cube", "strong-double-loop", "terminator"))
    s.add_argument("--algebra")
    s.add_argument("--op")
    s.add_argument("--symbol", default="d")
    s.add_argument("--cap", type=int, default=DEFAULT_CAP)
    s.set_defaults(func=cmd_derive)

    s = add_parser("prove", help="congruence closure with bounded instantiation")
    s.add_argument("--axioms", required=True)
    s.add_argument("--goal", required=True, help="'(= lhs rhs)' or a file holding it")
    s.add_argument("--depth", type=int, default=2)
    s.add_argument("--symbol", action="append", help="extra goal symbol as name=arity")
    s.set_defaults(func=cmd_prove)

    s = add_parser("verify-suite", help="canned symbolic derivations with ablation")
    s.add_argument("--depth", type=int, default=2)
    s.set_defaults(func=cmd_verify_suite)

    s = add_parser("countermodel", help="finite algebra separating two conditions")
    s.add_argument("--hyp", required=True)
    s.add_argument("--goal", required=True)
    s.add_argument("--max-size", type=int, default=2)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--budget", type=int, default=10_000)
    s.set_defaults(func=cmd_countermodel)

    s = add_parser("explore", help="exploratory searches")
    s.add_argument("topic", choices=("loop-conjecture",))
    s.add_argument("--max-vertices", type=int, default=3)
    s.add_argument("--arity", type=int, default=3)
    s.add_argument("--sample", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--budget", type=int, default=200_000)
    s.add_argument("--details", action="store_true", help="include every instance")
    s.set_defaults(func=cmd_explore)
    return p


def _untimed(obj):
    """Drop nested wall-clock fields so reports replay byte for byte."""
    if isinstance(obj, dict):
        return {k: _untimed(v) for k, v in obj.items() if k != "elapsed"}
    if isinstance(obj, list):
        return [_untimed(v) for v in obj]
    return obj


def _text(report: dict) -> str:
    lines = [f"{report['command']}: exit {report['exit']}"]
    for k, v in report["outcome"].items():
        lines.append(f"  {k}: {v}")
    return "\n".join(lines)


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    t0 = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(json.dumps({"error": str(exc), "exit": USAGE}), file=out)
        return USAGE
    if args.command is None:
        print(json.dumps({"error": "a command is required", "exit": USAGE}), file=out)
        return USAGE
    inp = Inputs()
    seed = getattr(args, "seed", None)
    try:
        code, outcome, artifacts = args.func(args, inp)
    except UsageError as exc:
        code, outcome, artifacts = USAGE, {"error": str(exc)}, {}
    except ParseError as exc:
        code, outcome, artifacts = USAGE, {"error": str(exc), "position": exc.position}, {}
    except BudgetExceeded as exc:
        code, outcome, artifacts = INCONCLUSIVE, {"error": f"budget: {exc}"}, {}
    except (TaylorLabError, OSError) as exc:
        code, outcome, artifacts = USAGE, {"error": str(exc)}, {}
    report = {"command": args.command, "inputs": inp.digests, "outcome": _untimed(outcome),
              "artifacts": _untimed(artifacts), "seed": seed, "exit": code,
              "elapsed": round(time.perf_counter() - t0, 4)}
    if (args.format or args.top_format) == "text":
        print(_text(report), file=out)
    else:
        print(json.dumps(report, sort_keys=True), file=out)
    return code


def main() -> None:
    sys.exit(run())
