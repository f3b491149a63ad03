"""Simultaneous LF substitution.

A substitution is a bare list of terms (or a weakening); its domain is
supplied at application time, so variable lookup zips entries against
the domain positionally.  Embedded computations are never touched: they
cannot contain free LF variables.
"""
from __future__ import annotations

from .errors import TruncMismatch, UnboundLfVar
from .syntax import (
    Atom, Cons, CtxVar, ECtxEmpty, ECtxSnoc, ECtxVar, EmptySub, ErasedCtx,
    KPi, KType, LfApp, LfConst, LfLam, LfPi, LfSubst, LfTerm, LfVar, Name,
    Unbox, Wk, all_names, ectx_from, fresh_name, free_lf_names, split_erased,
)


def lookup_var(x: Name, sigma: LfSubst, domain: ErasedCtx) -> LfTerm:
    """Instantiation of x under sigma, peeling entries in step with domain."""
    while True:
        match sigma:
            case Cons(rest, term):
                if not isinstance(domain, ECtxSnoc):
                    raise UnboundLfVar(f"domain exhausted looking up {x}")
                if domain.binder == x:
                    return term
                sigma, domain = rest, domain.rest
            case Wk(stored):
                return _wk_lookup(x, stored, domain)
            case EmptySub():
                raise UnboundLfVar(f"no entry for {x}")
            case _:
                raise UnboundLfVar(f"no entry for {x}")


def _wk_lookup(x: Name, stored: ErasedCtx, domain: ErasedCtx) -> LfTerm:
    """Weakening maps each domain variable to the positionally matching
    stored variable (identical names in the well-typed case)."""
    while True:
        match stored, domain:
            case ECtxSnoc(srest, s), ECtxSnoc(drest, d):
                if d == x:
                    return LfVar(s)
                stored, domain = srest, drest
            case _:
                raise UnboundLfVar(f"{x} not covered by weakening")


def trunc(target: ErasedCtx, sigma: LfSubst, domain: ErasedCtx) -> LfSubst:
    """Drop the entries of sigma for domain variables beyond target."""
    t_head, t_names = split_erased(target)
    while True:
        d_head, d_names = split_erased(domain)
        if d_head == t_head and len(d_names) == len(t_names):
            return sigma
        match sigma:
            case Cons(rest, _):
                if not isinstance(domain, ECtxSnoc):
                    raise TruncMismatch("substitution longer than its domain")
                sigma, domain = rest, domain.rest
            case Wk(stored):
                return _wk_trunc(t_head, len(t_names), stored, domain)
            case EmptySub():
                raise TruncMismatch("target context is not a prefix of the domain")
            case _:
                raise TruncMismatch("target context is not a prefix of the domain")


def _wk_trunc(t_head, t_len: int, stored: ErasedCtx, domain: ErasedCtx) -> LfSubst:
    s_head, s_names = split_erased(stored)
    d_head, d_names = split_erased(domain)
    if d_head != s_head or len(d_names) != len(s_names):
        raise TruncMismatch("weakening does not match its domain")
    if t_head != s_head or t_len > len(s_names):
        raise TruncMismatch("target context is not a prefix of the domain")
    return Wk(ectx_from(s_head, s_names[:t_len]))


def apply_lf_subst(sigma: LfSubst, domain: ErasedCtx, target):
    """Capture-avoiding [sigma/domain]target over terms, types, kinds and
    substitutions."""
    match target:
        case LfVar(x):
            return lookup_var(x, sigma, domain)
        case LfConst():
            return target
        case LfLam(x, body):
            x2, sigma2, domain2 = _push_binder(x, sigma, domain, body)
            return LfLam(x2, apply_lf_subst(sigma2, domain2, body))
        case LfApp(fun, arg):
            return LfApp(apply_lf_subst(sigma, domain, fun),
                         apply_lf_subst(sigma, domain, arg))
        case Unbox(comp, inner):
            return Unbox(comp, apply_lf_subst(sigma, domain, inner))
        case Atom(head, spine):
            return Atom(head, tuple(apply_lf_subst(sigma, domain, m) for m in spine))
        case LfPi(x, dom, body):
            dom2 = apply_lf_subst(sigma, domain, dom)
            x2, sigma2, domain2 = _push_binder(x, sigma, domain, body)
            return LfPi(x2, dom2, apply_lf_subst(sigma2, domain2, body))
        case KType():
            return target
        case KPi(x, dom, body):
            dom2 = apply_lf_subst(sigma, domain, dom)
            x2, sigma2, domain2 = _push_binder(x, sigma, domain, body)
            return KPi(x2, dom2, apply_lf_subst(sigma2, domain2, body))
        case EmptySub():
            return target
        case Wk(stored):
            return trunc(stored, sigma, domain)
        case Cons(rest, term):
            return Cons(apply_lf_subst(sigma, domain, rest),
                        apply_lf_subst(sigma, domain, term))
    raise TypeError(f"apply_lf_subst: unsupported {type(target).__name__}")


def _push_binder(x: Name, sigma: LfSubst, domain: ErasedCtx, body):
    """Extend sigma/domain under a binder, renaming it clear of the range."""
    _, dom_names = split_erased(domain)
    avoid = free_lf_names(sigma) | frozenset(dom_names) | all_names(body)
    x2 = fresh_name(x, avoid)
    return x2, Cons(sigma, LfVar(x2)), ECtxSnoc(domain, x)


def single_subst(n: LfTerm, x: Name, target):
    """[n/x]target, the beta-contraction substitution.

    Agrees with apply_lf_subst over (wk, n) but avoids materialising the
    ambient context.
    """
    return _single(n, x, free_lf_names(n), target)


def _single(n: LfTerm, x: Name, fv_n: frozenset[Name], target):
    match target:
        case LfVar(y):
            return n if y == x else target
        case LfConst():
            return target
        case LfLam(y, body):
            if y == x:
                return target
            y2, body = _avoid_capture(y, body, x, fv_n)
            return LfLam(y2, _single(n, x, fv_n, body))
        case LfApp(fun, arg):
            return LfApp(_single(n, x, fv_n, fun), _single(n, x, fv_n, arg))
        case Unbox(comp, inner):
            return Unbox(comp, _single(n, x, fv_n, inner))
        case Atom(head, spine):
            return Atom(head, tuple(_single(n, x, fv_n, m) for m in spine))
        case LfPi(y, dom, body):
            dom2 = _single(n, x, fv_n, dom)
            if y == x:
                return LfPi(y, dom2, body)
            y2, body = _avoid_capture(y, body, x, fv_n)
            return LfPi(y2, dom2, _single(n, x, fv_n, body))
        case KType():
            return target
        case KPi(y, dom, body):
            dom2 = _single(n, x, fv_n, dom)
            if y == x:
                return KPi(y, dom2, body)
            y2, body = _avoid_capture(y, body, x, fv_n)
            return KPi(y2, dom2, _single(n, x, fv_n, body))
        case EmptySub():
            return target
        case Wk(stored):
            return _single_into_wk(n, x, stored)
        case Cons(rest, term):
            return Cons(_single(n, x, fv_n, rest), _single(n, x, fv_n, term))
    raise TypeError(f"single_subst: unsupported {type(target).__name__}")


def _avoid_capture(y: Name, body, x: Name, fv_n: frozenset[Name]):
    if y not in fv_n:
        return y, body
    y2 = fresh_name(y, fv_n | all_names(body) | {x})
    return y2, _single(LfVar(y2), y, frozenset((y2,)), body)


def _single_into_wk(n: LfTerm, x: Name, stored: ErasedCtx):
    """[n/x]wk(..,x,ys) expands the weakening enough to replace x by n."""
    head, names = split_erased(stored)
    if x not in names:
        return Wk(stored)
    i = names.index(x)
    out: LfSubst = Wk(ectx_from(head, names[:i]))
    out = Cons(out, n)
    for y in names[i + 1:]:
        out = Cons(out, LfVar(y))
    return out


def identity_subst(domain: ErasedCtx) -> LfSubst:
    """The identity substitution on a context, as a weakening."""
    return Wk(domain)
