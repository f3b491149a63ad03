"""Algorithmic definitional equality, directed by weak-head normal forms.

Terms are compared at a type: at Pi types both sides are applied to a
shared fresh variable, at box types both sides are unboxed with the
identity weakening (the eta law for boxes), at universes the type
comparison takes over, and at neutral types whnfs are compared
structurally.
"""
from __future__ import annotations

from typing import Optional, Union

from . import typecheck as tc
from .comp_subst import CompSubst, apply_comp_subst, comp_subst1, rename_lf
from .errors import KernelError
from .lf_subst import apply_lf_subst, single_subst
from .syntax import (
    AnnDom, Atom, BoxTy, CompApp, CompTerm, CompVar, Cons, CtxDom, CtxEmpty,
    CtxLit, CtxSnoc, CtxType, CtxVar, ECtxVar, EmptySub, LfApp, LfConst,
    LfCtx, LfLam, LfPi, LfSubst, LfTerm, LfType, LfVar, Name, PiTy, Rec,
    Unbox, Univ, Wk, erase_ctx, free_comp_names, fresh_name, split_ctx,
    split_erased,
)
from .whnf import is_comp_neutral, lf_spine, whnf_comp, whnf_lf_subst, whnf_lf_term


def ctx_renaming(src: LfCtx, dst: LfCtx) -> dict:
    """Positional renaming of src's binders to dst's."""
    _, src_entries = split_ctx(src)
    _, dst_entries = split_ctx(dst)
    return {s: d for (s, _), (d, _) in zip(src_entries, dst_entries) if s != d}


# ---------------------------------------------------------------------------
# Computations

def conv_comp(st: tc.CheckState, t1: CompTerm, t2: CompTerm, tau: CompTerm) -> bool:
    """Definitional equality of t1 and t2 at type tau."""
    tw = whnf_comp(tau, st.fuel)
    match tw:
        case PiTy(y, dom, cod):
            avoid = (st.gamma.names() | free_comp_names(cod)
                     | free_comp_names(t1) | free_comp_names(t2))
            z = fresh_name(y, avoid)
            st2 = st.bind(z, dom)
            arg: CompTerm = CtxLit(CtxVar(z)) if isinstance(dom, CtxDom) else CompVar(z)
            cod2 = apply_comp_subst(
                comp_subst1(CtxVar(z) if isinstance(dom, CtxDom) else CompVar(z), y),
                cod)
            return conv_comp(st2, CompApp(t1, arg), CompApp(t2, arg), cod2)
        case BoxTy(inner):
            wk = Wk(erase_ctx(inner.ctx))
            return conv_lf_term(st, inner.ctx,
                                Unbox(t1, wk), Unbox(t2, wk), inner.type)
        case Univ():
            return conv_comp_type(st, t1, t2)
        case _ if is_comp_neutral(tw):
            w1 = whnf_comp(t1, st.fuel)
            w2 = whnf_comp(t2, st.fuel)
            if not (is_comp_neutral(w1) and is_comp_neutral(w2)):
                return False
            return conv_comp_neutral(st, w1, w2) is not None
    raise KernelError(f"conversion at a non-type: {type(tw).__name__}")


def conv_comp_type(st: tc.CheckState, tau1: CompTerm, tau2: CompTerm) -> bool:
    """Definitional equality of two types (terms of some universe)."""
    w1 = whnf_comp(tau1, st.fuel)
    w2 = whnf_comp(tau2, st.fuel)
    match w1, w2:
        case Univ(i), Univ(j):
            return i == j
        case BoxTy(i1), BoxTy(i2):
            if i1.var_only != i2.var_only:
                return False
            if not conv_lf_ctx(st, i1.ctx, i2.ctx):
                return False
            ren = ctx_renaming(i2.ctx, i1.ctx)
            return conv_lf_type(st, i1.ctx, i1.type, rename_lf(i2.type, ren))
        case PiTy(y1, d1, b1), PiTy(y2, d2, b2):
            if isinstance(d1, CtxDom) != isinstance(d2, CtxDom):
                return False
            if not isinstance(d1, CtxDom) and not conv_comp_type(st, d1, d2):
                return False
            avoid = (st.gamma.names() | free_comp_names(b1) | free_comp_names(b2))
            z = fresh_name(y1, avoid)
            payload: CompTerm | LfCtx = \
                CtxVar(z) if isinstance(d1, CtxDom) else CompVar(z)
            b1z = apply_comp_subst(comp_subst1(payload, y1), b1)
            b2z = apply_comp_subst(comp_subst1(payload, y2), b2)
            return conv_comp_type(st.bind(z, d1), b1z, b2z)
        case _ if is_comp_neutral(w1) and is_comp_neutral(w2):
            return conv_comp_neutral(st, w1, w2) is not None
    return False


def conv_comp_neutral(st: tc.CheckState, n1: CompTerm, n2: CompTerm
                      ) -> Optional[Union[CompTerm, CtxDom]]:
    """Structural comparison of two weak-head neutrals; returns the type of
    the common neutral on success."""
    match n1, n2:
        case CompVar(x), CompVar(y):
            if x != y:
                return None
            dom = st.gamma.lookup(x)
            return dom
        case CompApp(f1, a1), CompApp(f2, a2):
            ty = conv_comp_neutral(st, f1, f2)
            if ty is None or isinstance(ty, CtxDom):
                return None
            tw = whnf_comp(ty, st.fuel)
            if not isinstance(tw, PiTy):
                return None
            if isinstance(tw.domain, CtxDom):
                c1 = _as_ctx(st, a1)
                c2 = _as_ctx(st, a2)
                if c1 is None or c2 is None or not conv_lf_ctx(st, c1, c2):
                    return None
                return apply_comp_subst(comp_subst1(c1, tw.binder), tw.body)
            if not conv_comp(st, a1, a2, tw.domain):
                return None
            return apply_comp_subst(comp_subst1(a1, tw.binder), tw.body)
        case Rec(m1, bs1, c1, s1), Rec(m2, bs2, c2, s2):
            if not conv_comp_type(st, m1, m2):
                return None
            if not conv_lf_ctx(st, c1, c2):
                return None
            psi_name, y_name, tau = tc.motive_parts(st, m1)
            if not conv_comp(st, s1, s2, BoxTy(CtxType(c1, tc.tm_atom()))):
                return None
            obligations = tc.branch_obligations(st, psi_name, y_name, tau, bs1)
            others = [
                ((bs2.var.psi, bs2.var.p), bs2.var.body),
                ((bs2.app.psi, bs2.app.m, bs2.app.n, bs2.app.fm, bs2.app.fn),
                 bs2.app.body),
                ((bs2.lam.psi, bs2.lam.m, bs2.lam.fm), bs2.lam.body),
            ]
            for (st2, names, body1, expected), (names2, body2) in zip(obligations, others):
                ren = CompSubst(tuple(
                    (o, CompVar(n)) for o, n in zip(names2, names) if o != n))
                body2r = apply_comp_subst(ren, body2) if ren.entries else body2
                if not conv_comp(st2, body1, body2r, expected):
                    return None
            theta = CompSubst(((psi_name, c1), (y_name, s1)))
            return apply_comp_subst(theta, tau)
    return None


def _as_ctx(st: tc.CheckState, arg: CompTerm) -> Optional[LfCtx]:
    match arg:
        case CtxLit(c):
            return c
        case CompVar(name) if isinstance(st.gamma.lookup(name), CtxDom):
            return CtxVar(name)
    return None


# ---------------------------------------------------------------------------
# LF terms

def conv_lf_term(st: tc.CheckState, psi: LfCtx, m1: LfTerm, m2: LfTerm,
                 a: LfType) -> bool:
    """Type-directed equality of LF terms; eta at Pi types."""
    match a:
        case LfPi(x, dom, cod):
            from .syntax import all_names, ctx_binders
            z = fresh_name(x, frozenset(ctx_binders(psi)) | all_names(m1)
                           | all_names(m2) | all_names(cod))
            cod2 = single_subst(LfVar(z), x, cod)
            return conv_lf_term(st, CtxSnoc(psi, z, dom),
                                LfApp(m1, LfVar(z)), LfApp(m2, LfVar(z)), cod2)
        case Atom():
            w1 = whnf_lf_term(m1, st.fuel)
            w2 = whnf_lf_term(m2, st.fuel)
            if isinstance(w1, LfLam) or isinstance(w2, LfLam):
                return False
            return conv_lf_neutral(st, psi, w1, w2) is not None
    raise KernelError("conversion at a malformed LF type")


def conv_lf_neutral(st: tc.CheckState, psi: LfCtx, n1: LfTerm, n2: LfTerm
                    ) -> Optional[LfType]:
    """Spine comparison of LF neutrals; returns the common type on success."""
    h1, args1 = lf_spine(n1)
    h2, args2 = lf_spine(n2)
    if len(args1) != len(args2):
        return None
    ty: Optional[LfType] = None
    match h1, h2:
        case LfVar(x), LfVar(y):
            if x != y:
                return None
            from .syntax import ctx_lookup
            ty = ctx_lookup(psi, x)
            if ty is None:
                raise KernelError(f"neutral head {x} is not in scope")
        case LfConst(c1), LfConst(c2):
            if c1 != c2:
                return None
            d = st.signature.find(c1)
            if d is None or d.is_family:
                raise KernelError(f"neutral head {c1} is not a term constant")
            ty = d.classifier
        case Unbox(t1, s1), Unbox(t2, s2):
            if not (is_comp_neutral(t1) and is_comp_neutral(t2)):
                raise KernelError("stuck unbox with a non-neutral computation")
            ty1 = whnf_comp(tc.typeof_neutral(st, t1), st.fuel)
            ty2 = whnf_comp(tc.typeof_neutral(st, t2), st.fuel)
            if not (isinstance(ty1, BoxTy) and isinstance(ty2, BoxTy)):
                raise KernelError("stuck unbox whose head is not box-typed")
            if conv_comp_neutral(st, t1, t2) is None:
                return None
            if not conv_lf_ctx(st, ty1.inner.ctx, ty2.inner.ctx):
                return None
            if not conv_lf_subst(st, psi, s1, s2, ty1.inner.ctx):
                return None
            ty = apply_lf_subst(s1, erase_ctx(ty1.inner.ctx), ty1.inner.type)
        case _:
            return None
    for a1, a2 in zip(args1, args2):
        if not isinstance(ty, LfPi):
            return None
        if not conv_lf_term(st, psi, a1, a2, ty.domain):
            return None
        ty = single_subst(a1, ty.binder, ty.body)
    return ty


def conv_lf_type(st: tc.CheckState, psi: LfCtx, a1: LfType, a2: LfType) -> bool:
    match a1, a2:
        case Atom(h1, sp1), Atom(h2, sp2):
            if h1 != h2 or len(sp1) != len(sp2):
                return False
            d = st.signature.find(h1)
            if d is None or not d.is_family:
                raise KernelError(f"atomic type head {h1} is not a family")
            kind = d.classifier
            for m1, m2 in zip(sp1, sp2):
                from .syntax import KPi
                if not isinstance(kind, KPi):
                    return False
                if not conv_lf_term(st, psi, m1, m2, kind.domain):
                    return False
                kind = single_subst(m1, kind.binder, kind.body)
            return True
        case LfPi(x1, d1, b1), LfPi(x2, d2, b2):
            if not conv_lf_type(st, psi, d1, d2):
                return False
            from .syntax import all_names, ctx_binders
            z = fresh_name(x1, frozenset(ctx_binders(psi)) | all_names(b1)
                           | all_names(b2))
            b1z = single_subst(LfVar(z), x1, b1)
            b2z = single_subst(LfVar(z), x2, b2)
            return conv_lf_type(st, CtxSnoc(psi, z, d1), b1z, b2z)
    return False


def conv_lf_subst(st: tc.CheckState, psi: LfCtx, s1: LfSubst, s2: LfSubst,
                  phi: LfCtx) -> bool:
    """Equality of substitutions from phi into psi, directed by phi."""
    w1 = whnf_lf_subst(s1, st.fuel)
    w2 = whnf_lf_subst(s2, st.fuel)
    match phi:
        case CtxEmpty():
            return isinstance(w1, EmptySub) and isinstance(w2, EmptySub)
        case CtxVar(name):
            match w1, w2:
                case Wk(d1), Wk(d2):
                    h1, e1 = split_erased(d1)
                    h2, e2 = split_erased(d2)
                    return h1 == h2 == name and not e1 and not e2
            return False
        case CtxSnoc(rest, _, a):
            match w1, w2:
                case Cons(r1, m1), Cons(r2, m2):
                    if not conv_lf_subst(st, psi, r1, r2, rest):
                        return False
                    aty = apply_lf_subst(r1, erase_ctx(rest), a)
                    return conv_lf_term(st, psi, m1, m2, aty)
            return False
    raise KernelError("malformed substitution domain in conversion")


def conv_lf_ctx(st: tc.CheckState, psi1: LfCtx, psi2: LfCtx) -> bool:
    """Shape equality of LF contexts with pointwise convertible types."""
    h1, e1 = split_ctx(psi1)
    h2, e2 = split_ctx(psi2)
    if (h1 is None) != (h2 is None) or len(e1) != len(e2):
        return False
    if h1 is not None and h1 != h2:
        return False
    prefix: LfCtx = CtxVar(h1) if h1 is not None else CtxEmpty()
    ren: dict = {}
    for (x1, a1), (x2, a2) in zip(e1, e2):
        if not conv_lf_type(st, prefix, a1, rename_lf(a2, ren)):
            return False
        if x2 != x1:
            ren = dict(ren)
            ren[x2] = x1
        prefix = CtxSnoc(prefix, x1, a1)
    return True
