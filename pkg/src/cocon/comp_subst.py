"""Computation-level substitution.

A substitution maps computation variables to terms, and ctx-kinded
variables to LF contexts.  Application pushes through boxes into the LF
layer.  Splicing a context for a context variable renames the trailing
declarations away from the binders of the spliced prefix; the renaming
is threaded through the rest of the enclosing LF scope.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import KindMismatchError
from .syntax import (
    AnnDom, AppBranch, Atom, BoxObj, BoxTy, Branches, CompApp, CompCtx,
    CompTerm, CompVar, Cons, CtxDom, CtxEmpty, CtxLit, CtxObj, CtxSnoc,
    CtxType, CtxVar, ECtxEmpty, ECtxSnoc, ECtxVar, EmptySub, ErasedCtx, Fn,
    KPi, KType, LamBranch, LfApp, LfConst, LfCtx, LfLam, LfPi, LfVar, Name,
    PiTy, Rec, Unbox, Univ, VarBranch, Wk, all_names, erase_ctx, fresh_name,
    free_comp_names, split_ctx, split_erased,
)

Payload = Union[CompTerm, LfCtx]


def _is_ctx_payload(p: Payload) -> bool:
    return isinstance(p, (CtxEmpty, CtxVar, CtxSnoc))


@dataclass(frozen=True)
class CompSubst:
    """Simultaneous substitution with pairwise-distinct domain names."""

    entries: tuple[tuple[Name, Payload], ...] = ()

    def domain(self) -> frozenset[Name]:
        return frozenset(n for n, _ in self.entries)


def comp_subst1(payload: Payload, y: Name) -> CompSubst:
    return CompSubst(((y, payload),))


def extend_renaming(rho: CompSubst, gamma_entry: tuple[Name, AnnDom]) -> CompSubst:
    """Extend a renaming with an identity mapping for a context entry,
    freshening the copy if it would collide with the range."""
    name, dom = gamma_entry
    taken = set(rho.domain())
    for _, p in rho.entries:
        taken |= free_comp_names(p)
    name2 = fresh_name(name, taken)
    payload: Payload = CtxVar(name2) if isinstance(dom, CtxDom) else CompVar(name2)
    return CompSubst(rho.entries + ((name, payload),))


class _Theta:
    """Internal applied form: lookup dict plus precomputed avoid-sets."""

    __slots__ = ("map", "comp_avoid", "lf_pool")

    def __init__(self, mapping: dict, comp_avoid: frozenset, lf_pool: frozenset):
        self.map = mapping
        self.comp_avoid = comp_avoid
        self.lf_pool = lf_pool

    @staticmethod
    def of(theta: CompSubst) -> "_Theta":
        mapping = dict(theta.entries)
        avoid: set[Name] = set(mapping)
        pool: set[Name] = set()
        for p in mapping.values():
            avoid |= free_comp_names(p)
            pool |= all_names(p)
        return _Theta(mapping, frozenset(avoid), frozenset(pool))

    def shadow(self, y: Name, y2: Name) -> "_Theta":
        mapping = dict(self.map)
        mapping[y] = CompVar(y2)
        return _Theta(mapping, self.comp_avoid | {y, y2}, self.lf_pool)


def apply_comp_subst(theta: CompSubst, target):
    """{theta}target for any syntactic class of the two layers."""
    th = _Theta.of(theta)
    match target:
        case CtxObj(ectx, term):
            ectx2, ren = _splice_erased_binding(th, ectx, all_names(term))
            return CtxObj(ectx2, _lf(th, ren, term))
        case CtxType(ctx, ty, vo):
            ctx2, ren = _splice_ctx_binding(th, ctx, all_names(ty))
            return CtxType(ctx2, _lf(th, ren, ty), vo)
        case CtxEmpty() | CtxVar() | CtxSnoc():
            ctx2, _ = _splice_ctx_binding(th, target, frozenset())
            return ctx2
        case ECtxEmpty() | ECtxVar() | ECtxSnoc():
            ectx2, _ = _splice_erased_binding(th, target, frozenset())
            return ectx2
        case LfVar() | LfConst() | LfLam() | LfApp() | Unbox() | Atom() | \
                LfPi() | KType() | KPi() | EmptySub() | Wk() | Cons():
            return _lf(th, {}, target)
        case _:
            return _comp(th, target)


def _comp(th: _Theta, t: CompTerm) -> CompTerm:
    match t:
        case CompVar(y):
            p = th.map.get(y)
            if p is None:
                return t
            if _is_ctx_payload(p):
                return CtxLit(p)
            return p
        case Univ():
            return t
        case BoxTy(inner):
            ctx2, ren = _splice_ctx_binding(th, inner.ctx, all_names(inner.type))
            return BoxTy(CtxType(ctx2, _lf(th, ren, inner.type), inner.var_only))
        case BoxObj(obj, annot):
            if annot is not None:
                annot2, ren = _splice_ctx_binding(th, annot, all_names(obj.term))
                return BoxObj(CtxObj(erase_ctx(annot2), _lf(th, ren, obj.term)), annot2)
            ectx2, ren = _splice_erased_binding(th, obj.ctx, all_names(obj.term))
            return BoxObj(CtxObj(ectx2, _lf(th, ren, obj.term)), None)
        case PiTy(y, dom, body):
            dom2 = dom if isinstance(dom, CtxDom) else _comp(th, dom)
            y2, th2 = _push(th, y, body)
            return PiTy(y2, dom2, _comp(th2, body))
        case Fn(y, body):
            y2, th2 = _push(th, y, body)
            return Fn(y2, _comp(th2, body))
        case CompApp(fun, arg):
            return CompApp(_comp(th, fun), _comp(th, arg))
        case CtxLit(ctx):
            ctx2, _ = _splice_ctx_binding(th, ctx, frozenset())
            return CtxLit(ctx2)
        case Rec(motive, bs, ctx_arg, scrut):
            ctx2, _ = _splice_ctx_binding(th, ctx_arg, frozenset())
            return Rec(_comp(th, motive), _branches(th, bs), ctx2, _comp(th, scrut))
    raise TypeError(f"apply_comp_subst: unsupported {type(t).__name__}")


def _branches(th: _Theta, bs: Branches) -> Branches:
    vpsi, th1 = _push(th, bs.var.psi, bs.var.body)
    vp, th1 = _push(th1, bs.var.p, bs.var.body)
    var = VarBranch(vpsi, vp, _comp(th1, bs.var.body))

    apsi, th2 = _push(th, bs.app.psi, bs.app.body)
    am, th2 = _push(th2, bs.app.m, bs.app.body)
    an, th2 = _push(th2, bs.app.n, bs.app.body)
    afm, th2 = _push(th2, bs.app.fm, bs.app.body)
    afn, th2 = _push(th2, bs.app.fn, bs.app.body)
    app = AppBranch(apsi, am, an, afm, afn, _comp(th2, bs.app.body))

    lpsi, th3 = _push(th, bs.lam.psi, bs.lam.body)
    lm, th3 = _push(th3, bs.lam.m, bs.lam.body)
    lfm, th3 = _push(th3, bs.lam.fm, bs.lam.body)
    lam = LamBranch(lpsi, lm, lfm, _comp(th3, bs.lam.body))
    return Branches(var, app, lam)


def _push(th: _Theta, y: Name, body) -> tuple[Name, _Theta]:
    """Move under a computation binder, freshening it clear of the payloads
    and of everything free in the body."""
    avoid = th.comp_avoid | free_comp_names(body)
    y2 = fresh_name(y, avoid)
    return y2, th.shadow(y, y2)


# ---------------------------------------------------------------------------
# LF layer traversal; `ren` tracks LF binder renames within one LF scope

def _lf(th: _Theta, ren: dict, x):
    match x:
        case LfVar(v):
            return LfVar(ren.get(v, v))
        case LfConst():
            return x
        case LfLam(b, body):
            b2, ren2 = _lf_binder(th, b, ren, body)
            return LfLam(b2, _lf(th, ren2, body))
        case LfApp(f, a):
            return LfApp(_lf(th, ren, f), _lf(th, ren, a))
        case Unbox(comp, subst):
            return Unbox(_comp(th, comp), _lf(th, ren, subst))
        case Atom(h, spine):
            return Atom(h, tuple(_lf(th, ren, m) for m in spine))
        case LfPi(b, dom, body):
            dom2 = _lf(th, ren, dom)
            b2, ren2 = _lf_binder(th, b, ren, body)
            return LfPi(b2, dom2, _lf(th, ren2, body))
        case KType():
            return x
        case KPi(b, dom, body):
            dom2 = _lf(th, ren, dom)
            b2, ren2 = _lf_binder(th, b, ren, body)
            return KPi(b2, dom2, _lf(th, ren2, body))
        case EmptySub():
            return x
        case Wk(domain):
            return Wk(_erased_ref(th, ren, domain))
        case Cons(rest, term):
            return Cons(_lf(th, ren, rest), _lf(th, ren, term))
    raise TypeError(f"comp subst: unsupported LF node {type(x).__name__}")


def _lf_binder(th: _Theta, b: Name, ren: dict, body) -> tuple[Name, dict]:
    values = set(ren.values())
    if b in values or b in th.lf_pool:
        b2 = fresh_name(b, values | set(ren) | th.lf_pool | all_names(body))
        ren2 = dict(ren)
        ren2[b] = b2
        return b2, ren2
    if b in ren:
        ren2 = {k: v for k, v in ren.items() if k != b}
        return b, ren2
    return b, ren


def _erased_ref(th: _Theta, ren: dict, ectx: ErasedCtx) -> ErasedCtx:
    """Erased context in reference position (a weakening domain)."""
    head, names = split_erased(ectx)
    if head is None:
        base: ErasedCtx = ECtxEmpty()
    else:
        p = th.map.get(head)
        if p is None:
            base = ECtxVar(head)
        else:
            base = erase_ctx(_payload_ctx(head, p))
    for n in names:
        base = ECtxSnoc(base, ren.get(n, n))
    return base


def _payload_ctx(name: Name, p: Payload) -> LfCtx:
    if _is_ctx_payload(p):
        return p
    match p:
        case CompVar(v):
            return CtxVar(v)
        case CtxLit(c):
            return c
    raise KindMismatchError(
        f"context variable {name} was given a term payload")


def _splice_ctx_binding(th: _Theta, ctx: LfCtx, scope_names: frozenset):
    """Substitute into an LF context whose binders scope over later entries
    and over `scope_names` worth of payload; returns the new context and the
    renaming applied to its trailing binders."""
    head, entries = split_ctx(ctx)
    avoid = set(th.lf_pool) | set(scope_names)
    for n, _ in entries:
        avoid |= {n}
    ren: dict[Name, Name] = {}
    if head is None:
        base: LfCtx = CtxEmpty()
        taken: set[Name] = set()
    else:
        p = th.map.get(head)
        if p is None:
            base = CtxVar(head)
            taken = set()
        else:
            base = _payload_ctx(head, p)
            taken = set(all_names(base))
            avoid |= taken
    for n, a in entries:
        a2 = _lf(th, ren, a)
        if n in taken:
            n2 = fresh_name(n, frozenset(avoid))
            ren = dict(ren)
            ren[n] = n2
        else:
            n2 = n
        avoid.add(n2)
        taken.add(n2)
        base = CtxSnoc(base, n2, a2)
    return base, ren


def _splice_erased_binding(th: _Theta, ectx: ErasedCtx, scope_names: frozenset):
    head, names = split_erased(ectx)
    avoid = set(th.lf_pool) | set(scope_names) | set(names)
    ren: dict[Name, Name] = {}
    if head is None:
        base: ErasedCtx = ECtxEmpty()
        taken: set[Name] = set()
    else:
        p = th.map.get(head)
        if p is None:
            base = ECtxVar(head)
            taken = set()
        else:
            spliced = erase_ctx(_payload_ctx(head, p))
            base = spliced
            taken = set(split_erased(spliced)[1])
            avoid |= taken
    for n in names:
        if n in taken:
            n2 = fresh_name(n, frozenset(avoid))
            ren = dict(ren)
            ren[n] = n2
        else:
            n2 = n
        avoid.add(n2)
        taken.add(n2)
        base = ECtxSnoc(base, n2)
    return base, ren


def rename_lf(target, ren: dict):
    """Capture-avoiding renaming of free LF names; a degenerate comp subst."""
    if not ren:
        return target
    empty = _Theta({}, frozenset(), frozenset())
    return _lf(empty, dict(ren), target)


def compose_comp_subst(outer: CompSubst, inner: CompSubst) -> CompSubst:
    """outer after inner: apply outer to inner's payloads, keep outer entries
    for variables inner does not mention."""
    entries = []
    seen = set()
    for y, p in inner.entries:
        entries.append((y, apply_comp_subst(outer, p)))
        seen.add(y)
    for y, p in outer.entries:
        if y not in seen:
            entries.append((y, p))
    return CompSubst(tuple(entries))
