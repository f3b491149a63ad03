"""Weak-head reduction for LF terms, LF substitutions and computations.

Reduction is fuel-bounded: the theory is normalizing, but ill-typed or
adversarial input must fail gracefully instead of looping.  An optional
trace callback receives the name of each applied rule.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .comp_subst import CompSubst, apply_comp_subst
from .errors import (
    FuelExhausted, IllFormedScrutinee, KernelError, NonCanonicalHead,
)
from .lf_subst import apply_lf_subst, single_subst
from .syntax import (
    Atom, BoxObj, BoxTy, Branches, CompApp, CompTerm, CompVar, Cons, CtxLit,
    CtxSnoc, CtxObj, ECtxSnoc, EmptySub, Fn, LfApp, LfCtx, LfLam, LfSubst,
    LfTerm, LfVar, LfConst, Name, PiTy, Rec, Unbox, Univ, Wk, all_names,
    ctx_binders, erase_ctx, fresh_name, split_erased,
)

DEFAULT_FUEL = 1_000_000

Trace = Optional[Callable[[str], None]]


@dataclass
class _Eval:
    fuel: int
    trace: Trace = None

    def step(self, rule: str, partial) -> None:
        if self.trace is not None:
            self.trace(rule)
        self.fuel -= 1
        if self.fuel < 0:
            raise FuelExhausted(partial)


# ---------------------------------------------------------------------------
# Whnf classification

@dataclass(frozen=True)
class WhnfLam:
    pass


@dataclass(frozen=True)
class WhnfNeutralLf:
    head: Name
    spine_len: int


@dataclass(frozen=True)
class WhnfUnboxNeutral:
    spine_len: int = 0


@dataclass(frozen=True)
class WhnfCompFn:
    pass


@dataclass(frozen=True)
class WhnfCompPi:
    pass


@dataclass(frozen=True)
class WhnfUniv:
    pass


@dataclass(frozen=True)
class WhnfBox:
    pass


@dataclass(frozen=True)
class WhnfCompNeutral:
    pass


def lf_spine(m: LfTerm) -> tuple[LfTerm, list[LfTerm]]:
    args: list[LfTerm] = []
    while isinstance(m, LfApp):
        args.append(m.arg)
        m = m.fun
    args.reverse()
    return m, args


def is_lf_neutral(m: LfTerm) -> bool:
    head, _ = lf_spine(m)
    match head:
        case LfVar() | LfConst():
            return True
        case Unbox(comp, _):
            return is_comp_neutral(comp)
    return False


def is_lf_whnf(m: LfTerm) -> bool:
    return isinstance(m, LfLam) or is_lf_neutral(m)


def is_comp_neutral(t: CompTerm) -> bool:
    match t:
        case CompVar():
            return True
        case CompApp(fun, _):
            return is_comp_neutral(fun)
        case Rec(_, _, _, scrut):
            if is_comp_neutral(scrut):
                return True
            return _is_blocked_box(scrut)
    return False


def _is_blocked_box(s: CompTerm) -> bool:
    """A box whose LF payload is neutral with a stuck unbox at its head."""
    if not isinstance(s, BoxObj):
        return False
    head, _ = lf_spine(s.obj.term)
    return isinstance(head, Unbox) and is_comp_neutral(head.comp)


def is_comp_whnf(t: CompTerm) -> bool:
    match t:
        case Fn() | PiTy() | Univ() | BoxTy() | BoxObj():
            return True
    return is_comp_neutral(t)


def classify_lf_whnf(m: LfTerm):
    if isinstance(m, LfLam):
        return WhnfLam()
    head, args = lf_spine(m)
    match head:
        case LfVar(n) | LfConst(n):
            return WhnfNeutralLf(n, len(args))
        case Unbox(comp, _) if is_comp_neutral(comp):
            return WhnfUnboxNeutral(len(args))
    raise KernelError(f"not an LF whnf: {type(m).__name__}")


def classify_comp_whnf(t: CompTerm):
    match t:
        case Fn():
            return WhnfCompFn()
        case PiTy():
            return WhnfCompPi()
        case Univ():
            return WhnfUniv()
        case BoxTy() | BoxObj():
            return WhnfBox()
    if is_comp_neutral(t):
        return WhnfCompNeutral()
    raise KernelError(f"not a computation whnf: {type(t).__name__}")


# ---------------------------------------------------------------------------
# LF reduction

def whnf_lf_term(m: LfTerm, fuel: int = DEFAULT_FUEL, trace: Trace = None) -> LfTerm:
    return _whnf_lf(m, _Eval(fuel, trace))


def _whnf_lf(m: LfTerm, ev: _Eval) -> LfTerm:
    while True:
        match m:
            case LfLam() | LfVar() | LfConst():
                return m
            case LfApp(fun, arg):
                wf = _whnf_lf(fun, ev)
                if isinstance(wf, LfLam):
                    ev.step("lf/beta", LfApp(wf, arg))
                    m = single_subst(arg, wf.binder, wf.body)
                    continue
                if ev.trace is not None and wf is not fun:
                    ev.trace("lf/app-head")
                return m if wf is fun else LfApp(wf, arg)
            case Unbox(comp, subst):
                wt = _whnf_comp(comp, ev)
                if isinstance(wt, BoxObj):
                    ev.step("lf/unbox-box", m)
                    m = apply_lf_subst(subst, wt.obj.ctx, wt.obj.term)
                    continue
                if is_comp_neutral(wt):
                    if ev.trace is not None and wt is not comp:
                        ev.trace("lf/unbox-neutral")
                    return m if wt is comp else Unbox(wt, subst)
                raise KernelError("unboxed computation produced a non-box value")
            case _:
                raise KernelError(f"whnf_lf_term: not an LF term: {type(m).__name__}")


def whnf_lf_subst(sigma: LfSubst, fuel: int = DEFAULT_FUEL, trace: Trace = None) -> LfSubst:
    return _whnf_lf_subst(sigma, _Eval(fuel, trace))


def _whnf_lf_subst(sigma: LfSubst, ev: _Eval) -> LfSubst:
    match sigma:
        case Wk(domain):
            match domain:
                case ECtxSnoc(rest, x):
                    ev.step("lf/wk-snoc", sigma)
                    return Cons(Wk(rest), LfVar(x))
                case _:
                    head, _ = split_erased(domain)
                    if head is None:
                        ev.step("lf/wk-empty", sigma)
                        return EmptySub()
                    return sigma
        case _:
            return sigma


# ---------------------------------------------------------------------------
# Computation reduction

def whnf_comp(t: CompTerm, fuel: int = DEFAULT_FUEL, trace: Trace = None) -> CompTerm:
    return _whnf_comp(t, _Eval(fuel, trace))


def _whnf_comp(t: CompTerm, ev: _Eval) -> CompTerm:
    while True:
        match t:
            case Fn() | PiTy() | Univ() | BoxTy() | BoxObj() | CompVar():
                return t
            case CompApp(fun, arg):
                wf = _whnf_comp(fun, ev)
                if isinstance(wf, Fn):
                    ev.step("comp/beta", CompApp(wf, arg))
                    payload = arg.ctx if isinstance(arg, CtxLit) else arg
                    t = apply_comp_subst(CompSubst(((wf.binder, payload),)), wf.body)
                    continue
                if is_comp_neutral(wf):
                    if ev.trace is not None and wf is not fun:
                        ev.trace("comp/app-head")
                    return t if wf is fun else CompApp(wf, arg)
                raise KernelError("application of a non-function value")
            case Rec(motive, branches, psi, scrut):
                ws = _whnf_comp(scrut, ev)
                if is_comp_neutral(ws):
                    if ev.trace is not None and ws is not scrut:
                        ev.trace("comp/rec-neutral")
                    return t if ws is scrut else Rec(motive, branches, psi, ws)
                if not isinstance(ws, BoxObj):
                    raise IllFormedScrutinee(
                        "recursor scrutinee is neither neutral nor a box")
                n = _whnf_lf(ws.obj.term, ev)
                head, args = lf_spine(n)
                if isinstance(head, Unbox) and is_comp_neutral(head.comp):
                    ev.step("comp/rec-unbox-neutral", t)
                    blocked = BoxObj(CtxObj(ws.obj.ctx, n), ws.annot)
                    return Rec(motive, branches, psi, blocked)
                t = _select_branch(branches, motive, psi, n, ev)
            case CtxLit():
                raise KernelError("context literal is not a term")
            case _:
                raise KernelError(
                    f"whnf_comp: not a computation: {type(t).__name__}")


def select_branch(branches: Branches, motive: CompTerm, psi: LfCtx,
                  n: LfTerm, fuel: int = DEFAULT_FUEL, trace: Trace = None) -> CompTerm:
    """Dispatch a neutral tm-scrutinee to its branch and reduce the body."""
    ev = _Eval(fuel, trace)
    return _whnf_comp(_select_branch(branches, motive, psi, n, ev), ev)


def _select_branch(branches: Branches, motive: CompTerm, psi: LfCtx,
                   n: LfTerm, ev: _Eval) -> CompTerm:
    psi_hat = erase_ctx(psi)
    head, args = lf_spine(n)
    match head:
        case LfVar(x) if not args:
            ev.step("comp/rec-var", n)
            b = branches.var
            theta = CompSubst((
                (b.psi, psi),
                (b.p, BoxObj(CtxObj(psi_hat, n), psi)),
            ))
            return apply_comp_subst(theta, b.body)
        case LfConst(c) if c.text == "app" and len(args) == 2:
            ev.step("comp/rec-app", n)
            m_arg, n_arg = args
            b = branches.app
            box_m = BoxObj(CtxObj(psi_hat, m_arg), psi)
            box_n = BoxObj(CtxObj(psi_hat, n_arg), psi)
            theta = CompSubst((
                (b.psi, psi),
                (b.m, box_m),
                (b.n, box_n),
                (b.fm, Rec(motive, branches, psi, box_m)),
                (b.fn, Rec(motive, branches, psi, box_n)),
            ))
            return apply_comp_subst(theta, b.body)
        case LfConst(c) if c.text == "lam" and len(args) == 1:
            ev.step("comp/rec-lam", n)
            fun = args[0]
            b = branches.lam
            tm = Atom(Name("tm"))
            if isinstance(fun, LfLam):
                x = fresh_name(fun.binder,
                               frozenset(ctx_binders(psi)) | all_names(fun.body))
                body = single_subst(LfVar(x), fun.binder, fun.body)
            else:
                # eta-expand a non-canonical function argument
                x = fresh_name(Name("x"),
                               frozenset(ctx_binders(psi)) | all_names(fun))
                body = LfApp(fun, LfVar(x))
            ext = CtxSnoc(psi, x, tm)
            box_m = BoxObj(CtxObj(ECtxSnoc(psi_hat, x), body), ext)
            theta = CompSubst((
                (b.psi, psi),
                (b.m, box_m),
                (b.fm, Rec(motive, branches, ext, box_m)),
            ))
            return apply_comp_subst(theta, b.body)
    raise NonCanonicalHead(
        "recursor scrutinee must be headed by a variable, lam, or app")
