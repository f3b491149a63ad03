"""File-based driver: `cocon check` and `cocon eval`.

Exit codes: 0 success, 1 type error, 2 parse or I/O error, 3 fuel
exhausted during evaluation.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from typing import Callable, Optional

from .comp_subst import CompSubst, apply_comp_subst
from .errors import (
    CheckError, Diagnostic, FuelExhausted, KernelError, reject,
)
from .parser import (
    CompDef, EvalDirective, LfDecl, ParseError, SourceFile, parse_file,
)
from .printer import Printer
from .syntax import (
    BoxObj, CompApp, CompCtx, CompTerm, CtxObj, KPi, KType, LfApp, LfLam,
    Name, Rec, SigDecl, Signature, Unbox,
)
from .typecheck import (
    CheckState, check_comp, check_lf_kind, check_lf_type, infer_comp,
)
from .whnf import (
    DEFAULT_FUEL, lf_spine, whnf_comp, whnf_lf_term,
)
from .syntax import CtxEmpty, Univ


@dataclass
class Elaboration:
    """Result of processing a source file declaration by declaration.

    A definition is an opaque variable while later bodies are checked (its
    declared type is all they may use), but type annotations and the bodies
    stored for evaluation have every earlier definition substituted away, so
    type-level computation through definitions reduces and evaluation never
    meets a definition name.
    """

    signature: Signature = field(default_factory=Signature)
    gamma: CompCtx = field(default_factory=CompCtx)
    def_types: dict[Name, CompTerm] = field(default_factory=dict)
    def_bodies: dict[Name, CompTerm] = field(default_factory=dict)
    order: list[Name] = field(default_factory=list)
    evals: list[Name] = field(default_factory=list)

    def expansion(self) -> CompSubst:
        return CompSubst(tuple((n, self.def_bodies[n]) for n in self.order))


def elaborate(src: SourceFile, fuel: int = DEFAULT_FUEL) -> Elaboration:
    out = Elaboration()
    for decl in src.declarations:
        if isinstance(decl, LfDecl):
            if out.signature.find(decl.name) is not None:
                raise reject("DuplicateDecl", f"{decl.name} is declared twice",
                             decl.pos, "signature")
            st = CheckState(out.signature, out.gamma, fuel=fuel)
            try:
                if isinstance(decl.classifier, (KType, KPi)):
                    check_lf_kind(st, CtxEmpty(), decl.classifier)
                else:
                    check_lf_type(st, CtxEmpty(), decl.classifier)
            except CheckError as e:
                raise reject(
                    "IllKindedDecl",
                    f"declaration {decl.name} is ill-formed: {e.diagnostic.message}",
                    decl.pos, "signature") from e
            out.signature = out.signature.extended(
                SigDecl(decl.name, decl.classifier, pos=decl.pos))
        elif isinstance(decl, CompDef):
            if decl.name in out.def_bodies:
                raise reject("DuplicateDecl",
                             f"{decl.name} is defined twice", decl.pos, "def")
            ty = apply_comp_subst(out.expansion(), decl.type)
            st = CheckState(out.signature, out.gamma, fuel=fuel)
            sort = whnf_comp(infer_comp(st, ty), fuel)
            if not isinstance(sort, Univ):
                raise reject("TypeMismatch",
                             f"the type of {decl.name} is not a type",
                             decl.pos, "def")
            check_comp(st, decl.body, ty)
            out.def_types[decl.name] = ty
            out.def_bodies[decl.name] = apply_comp_subst(out.expansion(),
                                                         decl.body)
            out.order.append(decl.name)
            out.gamma = out.gamma.extended(decl.name, ty)
        else:
            assert isinstance(decl, EvalDirective)
            if decl.name not in out.def_bodies:
                raise reject("UnboundCompVar",
                             f"#eval target {decl.name} is not defined",
                             decl.pos, "eval")
            out.evals.append(decl.name)
    return out


# ---------------------------------------------------------------------------
# Display normalization (--deep)

def deep_for_display(t: CompTerm, fuel: int) -> CompTerm:
    """Iterate whnf under box constructors for readable output."""
    w = whnf_comp(t, fuel)
    match w:
        case BoxObj(obj, annot):
            return BoxObj(CtxObj(obj.ctx, _deep_lf(obj.term, fuel)), annot,
                          pos=w.pos)
        case CompApp(fun, arg):
            return CompApp(deep_for_display(fun, fuel),
                           deep_for_display(arg, fuel), pos=w.pos)
        case Rec(motive, branches, ctx_arg, scrut):
            return Rec(motive, branches, ctx_arg,
                       deep_for_display(scrut, fuel), pos=w.pos)
        case _:
            return w


def _deep_lf(m, fuel: int):
    w = whnf_lf_term(m, fuel)
    if isinstance(w, LfLam):
        return LfLam(w.binder, _deep_lf(w.body, fuel), pos=w.pos)
    head, args = lf_spine(w)
    if isinstance(head, Unbox):
        head = Unbox(deep_for_display(head.comp, fuel), head.subst,
                     pos=head.pos)
    out = head
    for a in args:
        out = LfApp(out, _deep_lf(a, fuel))
    return out


# ---------------------------------------------------------------------------
# Commands

def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _report(diag: Diagnostic, path: str) -> None:
    print(diag.render(path), file=sys.stderr)


def check_one(path: str, fuel: int) -> int:
    try:
        text = _read(path)
    except OSError as e:
        print(f"ERROR IOError {path}:-1 io: {e}", file=sys.stderr)
        return 2
    try:
        src = parse_file(text, path)
    except ParseError as e:
        _report(e.diagnostic, path)
        return 2
    try:
        elaborate(src, fuel)
    except CheckError as e:
        _report(e.diagnostic, path)
        return 1
    except FuelExhausted:
        _report(Diagnostic("FuelExhausted",
                           "reduction budget exhausted while checking",
                           -1, "whnf"), path)
        return 3
    except KernelError as e:
        _report(Diagnostic(type(e).__name__, str(e), -1, "kernel"), path)
        return 1
    return 0


def run_check(paths: list[str], fuel: int) -> int:
    worst = 0
    for path in paths:
        code = check_one(path, fuel)
        worst = max(worst, code)
    return worst


def run_eval(path: str, name: Optional[str], deep: bool, trace: bool,
             fuel: int) -> int:
    try:
        text = _read(path)
    except OSError as e:
        print(f"ERROR IOError {path}:-1 io: {e}", file=sys.stderr)
        return 2
    try:
        src = parse_file(text, path)
    except ParseError as e:
        _report(e.diagnostic, path)
        return 2
    try:
        elab = elaborate(src, fuel)
    except CheckError as e:
        _report(e.diagnostic, path)
        return 1
    except FuelExhausted:
        _report(Diagnostic("FuelExhausted",
                           "reduction budget exhausted while checking",
                           -1, "whnf"), path)
        return 3

    if name is not None:
        targets = [Name(name)]
        if targets[0] not in elab.def_bodies:
            _report(Diagnostic("UnboundCompVar", f"no definition named {name}",
                               -1, "eval"), path)
            return 1
    else:
        targets = elab.evals
        if not targets:
            _report(Diagnostic("UnboundCompVar",
                               "no #eval directives and no --def given",
                               -1, "eval"), path)
            return 1

    trace_fn: Optional[Callable[[str], None]] = None
    if trace:
        trace_fn = lambda rule: print(rule, file=sys.stderr)

    for target in targets:
        body = elab.def_bodies[target]
        try:
            if deep:
                value = deep_for_display(body, fuel)
            else:
                value = whnf_comp(body, fuel, trace_fn)
        except FuelExhausted as e:
            printer = Printer()
            print(f"ERROR FuelExhausted {path}:-1 whnf: partial result "
                  f"{printer.comp(e.partial)}", file=sys.stderr)
            return 3
        except KernelError as e:
            _report(Diagnostic(type(e).__name__, str(e), -1, "whnf"), path)
            return 1
        print(Printer().comp(value))
    return 0


def _default_fuel() -> int:
    env = os.environ.get("COCON_FUEL")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return DEFAULT_FUEL


def main(argv: Optional[list[str]] = None) -> int:
    ap = argparse.ArgumentParser(
        prog="cocon",
        description="Type checker and evaluator for a contextual type theory")
    sub = ap.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="type check source files")
    p_check.add_argument("files", nargs="+")
    p_check.add_argument("--fuel", type=int, default=None)

    p_eval = sub.add_parser("eval", help="evaluate a definition to whnf")
    p_eval.add_argument("file")
    p_eval.add_argument("--def", dest="name", default=None,
                        help="definition to evaluate (defaults to #eval directives)")
    p_eval.add_argument("--deep", action="store_true",
                        help="normalize under box constructors for display")
    p_eval.add_argument("--trace", action="store_true",
                        help="print one line per applied reduction rule")
    p_eval.add_argument("--fuel", type=int, default=None)

    args = ap.parse_args(argv)
    fuel = args.fuel if args.fuel is not None else _default_fuel()
    if args.command == "check":
        return run_check(args.files, fuel)
    return run_eval(args.file, args.name, args.deep, args.trace, fuel)


if __name__ == "__main__":
    sys.exit(main())
