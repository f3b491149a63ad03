"""Bidirectional type checking for both layers.

Introduction forms with binders (LF abstractions, computation functions,
variable boxes) are checked against a given type; everything else infers.
`typeof_neutral` recovers the type of a weak-head neutral computation
without re-checking it, as conversion needs when comparing stuck unboxes.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional, Union

from .comp_subst import CompSubst, apply_comp_subst, comp_subst1, rename_lf
from .errors import CheckError, NotNeutral, reject
from .lf_subst import apply_lf_subst, single_subst
from .syntax import (
    AnnDom, Atom, BoxObj, BoxTy, Branches, CompApp, CompCtx, CompTerm,
    CompVar, Cons, CtxDom, CtxEmpty, CtxLit, CtxObj, CtxSnoc, CtxType,
    CtxVar, ECtxSnoc, ECtxVar, EmptySub, Fn, KPi, KType, LfApp, LfConst,
    LfCtx, LfKind, LfLam, LfPi, LfSubst, LfTerm, LfType, LfVar, Name, PiTy,
    Rec, SigDecl, Signature, Unbox, Univ, Wk, all_names, ctx_binders,
    ctx_lookup, erase_ctx, free_comp_names, fresh_name, split_ctx,
    split_erased,
)
from .whnf import (
    DEFAULT_FUEL, is_comp_neutral, whnf_comp, whnf_lf_subst, whnf_lf_term,
)

TM = Name("tm")
LAM = Name("lam")
APP = Name("app")


def tm_atom() -> Atom:
    return Atom(TM)


@dataclass(frozen=True)
class CheckState:
    """Checking environment: global signature, computation context, limits."""

    signature: Signature
    gamma: CompCtx = CompCtx()
    universe_cap: Optional[int] = None
    fuel: int = DEFAULT_FUEL

    def bind(self, name: Name, dom: AnnDom) -> "CheckState":
        return dataclasses.replace(self, gamma=self.gamma.extended(name, dom))


def _whnf(st: CheckState, t: CompTerm) -> CompTerm:
    return whnf_comp(t, st.fuel)


# ---------------------------------------------------------------------------
# Signature checking

def check_signature(decls) -> Signature:
    """Check an ordered list of SigDecl against the empty context."""
    sig = Signature()
    for d in decls:
        if sig.find(d.name) is not None:
            raise reject("DuplicateDecl", f"{d.name} is declared twice",
                         d.pos, "signature")
        st = CheckState(sig)
        try:
            if isinstance(d.classifier, (KType, KPi)):
                check_lf_kind(st, CtxEmpty(), d.classifier)
            else:
                check_lf_type(st, CtxEmpty(), d.classifier)
        except CheckError as e:
            raise reject("IllKindedDecl",
                         f"declaration {d.name} is ill-formed: {e.diagnostic.message}",
                         d.pos, "signature") from e
        sig = sig.extended(d)
    return sig


# ---------------------------------------------------------------------------
# LF layer

def infer_lf_term(st: CheckState, psi: LfCtx, m: LfTerm) -> LfType:
    match m:
        case LfVar(x):
            ty = ctx_lookup(psi, x)
            if ty is None:
                raise reject("UnboundLfVar", f"LF variable {x} is not in scope",
                             m.pos, "lf-var")
            return ty
        case LfConst(c):
            d = st.signature.find(c)
            if d is None:
                raise reject("UnknownConst", f"undeclared constant {c}",
                             m.pos, "lf-const")
            if d.is_family:
                raise reject("UnknownConst",
                             f"{c} is a type family, not a term constant",
                             m.pos, "lf-const")
            return d.classifier
        case LfApp(fun, arg):
            tf = infer_lf_term(st, psi, fun)
            if not isinstance(tf, LfPi):
                raise reject("NotAFunction",
                             "applied LF term does not have a Pi type",
                             m.pos, "lf-app")
            check_lf_term(st, psi, arg, tf.domain)
            return single_subst(arg, tf.binder, tf.body)
        case LfLam():
            raise reject("CannotInfer",
                         "LF abstractions only check against a given Pi type",
                         m.pos, "lf-lam")
        case Unbox(comp, subst):
            tau = _whnf(st, infer_comp(st, comp))
            if not isinstance(tau, BoxTy):
                raise reject("NotABoxType",
                             "unboxed computation does not have a box type",
                             m.pos, "lf-unbox")
            phi, a = tau.inner.ctx, tau.inner.type
            check_lf_subst(st, psi, subst, phi)
            return apply_lf_subst(subst, erase_ctx(phi), a)
    raise reject("CannotInfer", f"not an LF term: {type(m).__name__}", -1, "lf-term")


def check_lf_term(st: CheckState, psi: LfCtx, m: LfTerm, a: LfType) -> None:
    if isinstance(m, LfLam):
        if not isinstance(a, LfPi):
            raise reject("NotPiType",
                         "LF abstraction checked against a non-Pi type",
                         m.pos, "lf-lam")
        x2 = fresh_name(m.binder, frozenset(ctx_binders(psi)) |
                        all_names(m.body) | all_names(a))
        body = single_subst(LfVar(x2), m.binder, m.body)
        bty = single_subst(LfVar(x2), a.binder, a.body)
        check_lf_term(st, CtxSnoc(psi, x2, a.domain), body, bty)
        return
    got = infer_lf_term(st, psi, m)
    from .conversion import conv_lf_type
    if not conv_lf_type(st, psi, got, a):
        raise reject("TypeMismatch",
                     "LF term does not have the expected type",
                     m.pos, "lf-conv")


def check_lf_type(st: CheckState, psi: LfCtx, a: LfType) -> None:
    match a:
        case Atom(head, spine):
            d = st.signature.find(head)
            if d is None or not d.is_family:
                raise reject("UnknownConst",
                             f"undeclared type family {head}", a.pos, "lf-kinding")
            kind: LfKind = d.classifier
            for arg in spine:
                if not isinstance(kind, KPi):
                    raise reject("NotAFunction",
                                 f"type family {head} applied to too many arguments",
                                 a.pos, "lf-kinding")
                check_lf_term(st, psi, arg, kind.domain)
                kind = single_subst(arg, kind.binder, kind.body)
            if not isinstance(kind, KType):
                raise reject("TypeMismatch",
                             f"type family {head} is not fully applied",
                             a.pos, "lf-kinding")
        case LfPi(x, dom, body):
            check_lf_type(st, psi, dom)
            x2 = fresh_name(x, frozenset(ctx_binders(psi)) | all_names(body))
            check_lf_type(st, CtxSnoc(psi, x2, dom),
                          single_subst(LfVar(x2), x, body))
        case _:
            raise reject("TypeMismatch", f"not an LF type: {type(a).__name__}",
                         -1, "lf-kinding")


def check_lf_kind(st: CheckState, psi: LfCtx, k: LfKind) -> None:
    match k:
        case KType():
            return
        case KPi(x, dom, body):
            check_lf_type(st, psi, dom)
            x2 = fresh_name(x, frozenset(ctx_binders(psi)) | all_names(body))
            check_lf_kind(st, CtxSnoc(psi, x2, dom),
                          single_subst(LfVar(x2), x, body))
        case _:
            raise reject("TypeMismatch", "not an LF kind", -1, "lf-kinding")


def check_lf_subst(st: CheckState, psi: LfCtx, sigma: LfSubst, phi: LfCtx) -> None:
    """sigma provides a mapping from phi into psi."""
    sw = whnf_lf_subst(sigma, st.fuel)
    match phi:
        case CtxEmpty():
            match sw:
                case EmptySub():
                    return
                case Wk():
                    raise reject("NotAnExtension",
                                 "weakening domain is not the empty context",
                                 sigma.pos, "lf-subst")
                case _:
                    raise reject("ArityMismatch",
                                 "substitution provides entries for the empty context",
                                 sigma.pos, "lf-subst")
        case CtxVar(phi_name):
            match sw:
                case Wk(stored):
                    s_head, s_names = split_erased(stored)
                    if s_head != phi_name or s_names:
                        raise reject("NotAnExtension",
                                     f"weakening does not have domain {phi_name}",
                                     sigma.pos, "lf-subst")
                    p_head, _ = split_ctx(psi)
                    if p_head != phi_name:
                        raise reject("NotAnExtension",
                                     f"target context does not extend {phi_name}",
                                     sigma.pos, "lf-subst")
                    return
                case _:
                    raise reject("ArityMismatch",
                                 "an abstract context admits only weakenings",
                                 sigma.pos, "lf-subst")
        case CtxSnoc(rest, _, a):
            match sw:
                case Cons(tail, term):
                    check_lf_subst(st, psi, tail, rest)
                    check_lf_term(st, psi, term,
                                  apply_lf_subst(tail, erase_ctx(rest), a))
                    return
                case EmptySub():
                    raise reject("ArityMismatch",
                                 "substitution is shorter than its domain",
                                 sigma.pos, "lf-subst")
                case _:
                    raise reject("NotAnExtension",
                                 "weakening cannot target an abstract extension",
                                 sigma.pos, "lf-subst")
    raise reject("CtxMismatch", "malformed substitution domain", -1, "lf-subst")


def check_lf_ctx(st: CheckState, psi: LfCtx, at_schema: bool = False) -> None:
    """Well-formedness of an LF context; at schema position every
    declaration must be convertible to tm."""
    match psi:
        case CtxEmpty():
            return
        case CtxVar(name):
            dom = st.gamma.lookup(name)
            if dom is None or not isinstance(dom, CtxDom):
                raise reject("UnboundCtxVar",
                             f"{name} is not a context variable", psi.pos, "lf-ctx")
            return
        case CtxSnoc(rest, _, a):
            check_lf_ctx(st, rest, at_schema)
            check_lf_type(st, rest, a)
            if at_schema:
                from .conversion import conv_lf_type
                if st.signature.find(TM) is None or \
                        not conv_lf_type(st, rest, a, tm_atom()):
                    raise reject("SchemaViolation",
                                 "context declarations must have type tm here",
                                 psi.pos, "lf-ctx-schema")
            return
    raise reject("CtxMismatch", "malformed LF context", -1, "lf-ctx")


# ---------------------------------------------------------------------------
# Computation layer

def _push_gamma(st: CheckState, y: Name, dom: AnnDom, *bodies):
    """Extend gamma with a fresh copy of y, renaming the bodies to match."""
    avoid = set(st.gamma.names())
    for b in bodies:
        avoid |= free_comp_names(b)
    avoid.discard(y)
    y2 = fresh_name(y, avoid)
    if y2 != y:
        ren = comp_subst1(CompVar(y2), y)
        bodies = tuple(apply_comp_subst(ren, b) for b in bodies)
    return (y2, st.bind(y2, dom), *bodies)


def infer_comp(st: CheckState, t: CompTerm) -> CompTerm:
    match t:
        case CompVar(y):
            dom = st.gamma.lookup(y)
            if dom is None:
                raise reject("UnboundCompVar", f"{y} is not in scope",
                             t.pos, "comp-var")
            if isinstance(dom, CtxDom):
                raise reject("KindMismatch",
                             f"context variable {y} used as a term",
                             t.pos, "comp-var")
            return dom
        case Univ(k):
            if st.universe_cap is not None and k > st.universe_cap:
                raise reject("TypeMismatch",
                             f"universe U{k} exceeds the configured cap",
                             t.pos, "comp-univ")
            return Univ(k + 1)
        case PiTy(y, dom, body):
            if isinstance(dom, CtxDom):
                y2, st2, body2 = _push_gamma(st, y, dom, body)
                return _infer_sort(st2, body2, t.pos)
            s1 = _whnf(st, infer_comp(st, dom))
            if not isinstance(s1, Univ):
                raise reject("TypeMismatch", "Pi domain is not a type",
                             t.pos, "comp-pi")
            y2, st2, body2 = _push_gamma(st, y, dom, body)
            s2 = _infer_sort(st2, body2, t.pos)
            return Univ(max(s1.level, s2.level))
        case BoxTy(inner):
            check_lf_ctx(st, inner.ctx)
            check_lf_type(st, inner.ctx, inner.type)
            return Univ(0)
        case BoxObj(obj, annot):
            if annot is None:
                raise reject("CannotInfer",
                             "box without a typed context annotation",
                             t.pos, "comp-box")
            check_lf_ctx(st, annot)
            term = _realign_obj(obj, annot, t.pos)
            a = infer_lf_term(st, annot, term)
            return BoxTy(CtxType(annot, a))
        case Fn():
            raise reject("CannotInfer",
                         "functions only check against a given Pi type",
                         t.pos, "comp-fn")
        case CompApp(fun, arg):
            tf = _whnf(st, infer_comp(st, fun))
            if not isinstance(tf, PiTy):
                raise reject("NotAFunctionType",
                             "applied computation does not have a Pi type",
                             t.pos, "comp-app")
            if isinstance(tf.domain, CtxDom):
                payload = _ctx_argument(st, arg)
                return apply_comp_subst(comp_subst1(payload, tf.binder), tf.body)
            if isinstance(arg, CtxLit):
                raise reject("KindMismatch",
                             "LF context argument for a term-domain function",
                             t.pos, "comp-app")
            check_comp(st, arg, tf.domain)
            return apply_comp_subst(comp_subst1(arg, tf.binder), tf.body)
        case CtxLit():
            raise reject("KindMismatch",
                         "LF context used where a term is expected",
                         t.pos, "comp-ctx")
        case Rec(motive, branches, ctx_arg, scrut):
            _require_rec_signature(st, t.pos)
            sort = _whnf(st, infer_comp(st, motive))
            if not isinstance(sort, Univ):
                raise reject("MotiveShape", "recursor motive is not a type",
                             t.pos, "comp-rec")
            psi_name, y_name, tau = motive_parts(st, motive, t.pos)
            check_lf_ctx(st, ctx_arg, at_schema=True)
            check_comp(st, scrut, BoxTy(CtxType(ctx_arg, tm_atom())))
            for st2, _, body, expected in branch_obligations(
                    st, psi_name, y_name, tau, branches):
                check_comp(st2, body, expected)
            theta = CompSubst(((psi_name, ctx_arg), (y_name, scrut)))
            return apply_comp_subst(theta, tau)
    raise reject("CannotInfer", f"not a computation: {type(t).__name__}",
                 -1, "comp-term")


def _infer_sort(st: CheckState, tau: CompTerm, pos: int) -> Univ:
    s = _whnf(st, infer_comp(st, tau))
    if not isinstance(s, Univ):
        raise reject("TypeMismatch", "expected a type", pos, "comp-sort")
    return s


def _ctx_argument(st: CheckState, arg: CompTerm) -> LfCtx:
    """Interpret an application argument in ctx-domain position."""
    match arg:
        case CtxLit(ctx):
            check_lf_ctx(st, ctx, at_schema=True)
            return ctx
        case CompVar(name):
            dom = st.gamma.lookup(name)
            if isinstance(dom, CtxDom):
                return CtxVar(name)
            raise reject("KindMismatch",
                         f"{name} is not a context variable", arg.pos, "comp-app")
    raise reject("KindMismatch",
                 "expected an LF context argument", getattr(arg, "pos", -1),
                 "comp-app")


def _realign_obj(obj: CtxObj, target: LfCtx, pos: int) -> LfTerm:
    """Rename the object's term from its erased binders to the target's."""
    t_head, t_entries = split_ctx(target)
    o_head, o_names = split_erased(obj.ctx)
    if (t_head is None) != (o_head is None) or len(t_entries) != len(o_names) \
            or (t_head is not None and t_head != o_head):
        raise reject("CtxMismatch",
                     "box context does not match the expected context",
                     pos, "comp-box")
    ren = {o: t for o, (t, _) in zip(o_names, t_entries) if o != t}
    return rename_lf(obj.term, ren)


def check_comp(st: CheckState, t: CompTerm, tau: CompTerm) -> None:
    from .conversion import (
        conv_comp_type, conv_lf_ctx, conv_lf_type, ctx_renaming,
    )
    match t:
        case Fn(y, body):
            tw = _whnf(st, tau)
            if not isinstance(tw, PiTy):
                raise reject("NotPiType",
                             "function checked against a non-Pi type",
                             t.pos, "comp-fn")
            avoid = (set(st.gamma.names())
                     | (free_comp_names(body) - {y})
                     | (free_comp_names(tw.body) - {tw.binder}))
            y2 = fresh_name(y, avoid)
            body2 = body if y2 == y else \
                apply_comp_subst(comp_subst1(CompVar(y2), y), body)
            cod2 = tw.body if tw.binder == y2 else \
                apply_comp_subst(comp_subst1(CompVar(y2), tw.binder), tw.body)
            check_comp(st.bind(y2, tw.domain), body2, cod2)
            return
        case BoxObj(obj, _):
            tw = _whnf(st, tau)
            if isinstance(tw, BoxTy):
                phi, a = tw.inner.ctx, tw.inner.type
                term = _realign_obj(obj, phi, t.pos)
                if tw.inner.var_only:
                    w = whnf_lf_term(term, st.fuel)
                    if not isinstance(w, LfVar):
                        raise reject("NotVarBox",
                                     "expected a variable of the LF context",
                                     t.pos, "comp-box-var")
                    declared = ctx_lookup(phi, w.name)
                    if declared is None or not conv_lf_type(st, phi, declared, a):
                        raise reject("NotVarBox",
                                     f"{w.name} is not a context variable of "
                                     "the expected type", t.pos, "comp-box-var")
                    return
                check_lf_term(st, phi, term, a)
                return
        case CtxLit():
            raise reject("KindMismatch",
                         "LF context used where a term is expected",
                         t.pos, "comp-ctx")
    got = infer_comp(st, t)
    if conv_comp_type(st, got, tau):
        return
    # a box of variables is in particular a box of terms
    gw, tw = _whnf(st, got), _whnf(st, tau)
    if isinstance(gw, BoxTy) and isinstance(tw, BoxTy) \
            and gw.inner.var_only and not tw.inner.var_only \
            and conv_lf_ctx(st, gw.inner.ctx, tw.inner.ctx):
        ren = ctx_renaming(tw.inner.ctx, gw.inner.ctx)
        if conv_lf_type(st, gw.inner.ctx, gw.inner.type,
                        rename_lf(tw.inner.type, ren)):
            return
    raise reject("TypeMismatch",
                 "computation does not have the expected type",
                 getattr(t, "pos", -1), "comp-conv")


# ---------------------------------------------------------------------------
# Recursor obligations (shared with conversion)

def _require_rec_signature(st: CheckState, pos: int) -> None:
    tm_d = st.signature.find(TM)
    lam_d = st.signature.find(LAM)
    app_d = st.signature.find(APP)
    ok = tm_d is not None and isinstance(tm_d.classifier, KType)
    if ok:
        x, y = Name("x"), Name("y")
        lam_ty = LfPi(y, LfPi(x, tm_atom(), tm_atom()), tm_atom())
        app_ty = LfPi(x, tm_atom(), LfPi(y, tm_atom(), tm_atom()))
        from .syntax import alpha_eq
        ok = (lam_d is not None and not lam_d.is_family
              and alpha_eq(lam_d.classifier, lam_ty)
              and app_d is not None and not app_d.is_family
              and alpha_eq(app_d.classifier, app_ty))
    if not ok:
        raise reject("RecSignature",
                     "recursors need tm : type, lam : (tm -> tm) -> tm and "
                     "app : tm -> tm -> tm in the signature", pos, "comp-rec")


def motive_parts(st: CheckState, motive: CompTerm, pos: int = -1
                 ) -> tuple[Name, Name, CompTerm]:
    """Decompose a motive (psi : ctx) -> (y : [psi |- tm]) -> tau."""
    w = _whnf(st, motive)
    if isinstance(w, PiTy) and isinstance(w.domain, CtxDom):
        inner = _whnf(st, w.body)
        if isinstance(inner, PiTy) and not isinstance(inner.domain, CtxDom):
            dom = _whnf(st, inner.domain)
            if isinstance(dom, BoxTy) and not dom.inner.var_only \
                    and isinstance(dom.inner.ctx, CtxVar) \
                    and dom.inner.ctx.name == w.binder \
                    and isinstance(dom.inner.type, Atom) \
                    and dom.inner.type.head == TM and not dom.inner.type.spine:
                return w.binder, inner.binder, inner.body
    raise reject("MotiveShape",
                 "motive must have shape (psi : ctx) -> (y : [psi |- tm]) -> tau",
                 pos, "comp-rec")


def branch_obligations(st: CheckState, psi_name: Name, y_name: Name,
                       tau: CompTerm, branches: Branches):
    """The three (state, body, expected type) checking obligations of Fig-style
    branch typing; binders are freshened against the ambient context."""
    out = []

    bv = branches.var
    (names1, st1, body) = _freshen_branch(st, (bv.psi, bv.p), bv.body)
    psi2, p2 = names1
    st1 = st1.bind(psi2, CtxDom())
    st1 = st1.bind(p2, BoxTy(CtxType(CtxVar(psi2), tm_atom(), var_only=True)))
    expected = apply_comp_subst(
        CompSubst(((psi_name, CtxVar(psi2)), (y_name, CompVar(p2)))), tau)
    out.append((st1, names1, body, expected))

    ba = branches.app
    (names2, st2, body) = _freshen_branch(
        st, (ba.psi, ba.m, ba.n, ba.fm, ba.fn), ba.body)
    psi2, m2, n2, fm2, fn2 = names2
    tau_psi = apply_comp_subst(comp_subst1(CtxVar(psi2), psi_name), tau)
    tm_box = BoxTy(CtxType(CtxVar(psi2), tm_atom()))
    st2 = st2.bind(psi2, CtxDom()).bind(m2, tm_box).bind(n2, tm_box)
    st2 = st2.bind(fm2, apply_comp_subst(comp_subst1(CompVar(m2), y_name), tau_psi))
    st2 = st2.bind(fn2, apply_comp_subst(comp_subst1(CompVar(n2), y_name), tau_psi))
    id_sub = Wk(ECtxVar(psi2))
    app_term = LfApp(LfApp(LfConst(APP), Unbox(CompVar(m2), id_sub)),
                     Unbox(CompVar(n2), id_sub))
    app_box = BoxObj(CtxObj(ECtxVar(psi2), app_term), CtxVar(psi2))
    expected = apply_comp_subst(comp_subst1(app_box, y_name), tau_psi)
    out.append((st2, names2, body, expected))

    bl = branches.lam
    (names3, st3, body) = _freshen_branch(st, (bl.psi, bl.m, bl.fm), bl.body)
    psi2, m2, fm2 = names3
    x = Name("x")
    ext = CtxSnoc(CtxVar(psi2), x, tm_atom())
    st3 = st3.bind(psi2, CtxDom())
    st3 = st3.bind(m2, BoxTy(CtxType(ext, tm_atom())))
    st3 = st3.bind(fm2, apply_comp_subst(
        CompSubst(((psi_name, ext), (y_name, CompVar(m2)))), tau))
    lam_term = LfApp(LfConst(LAM),
                     LfLam(x, Unbox(CompVar(m2), Wk(ECtxSnoc(ECtxVar(psi2), x)))))
    lam_box = BoxObj(CtxObj(ECtxVar(psi2), lam_term), CtxVar(psi2))
    expected = apply_comp_subst(
        CompSubst(((psi_name, CtxVar(psi2)), (y_name, lam_box))), tau)
    out.append((st3, names3, body, expected))
    return out


def _freshen_branch(st: CheckState, names: tuple[Name, ...], body: CompTerm):
    assert len(set(names)) == len(names), "branch binders must be distinct"
    avoid = (set(st.gamma.names()) | free_comp_names(body) | set(names))
    fresh: list[Name] = []
    ren_entries = []
    for n in names:
        n2 = fresh_name(n, frozenset(avoid - {n}))
        avoid.add(n2)
        fresh.append(n2)
        if n2 != n:
            ren_entries.append((n, CompVar(n2)))
    if ren_entries:
        body = apply_comp_subst(CompSubst(tuple(ren_entries)), body)
    return tuple(fresh), st, body


# ---------------------------------------------------------------------------
# Type inference for neutral computations

def typeof_neutral(st: CheckState, t: CompTerm) -> CompTerm:
    """Type of a weak-head neutral computation, without re-checking it."""
    match t:
        case CompVar(y):
            dom = st.gamma.lookup(y)
            if dom is None or isinstance(dom, CtxDom):
                raise NotNeutral(f"{y} has no computation type")
            return dom
        case CompApp(fun, arg):
            tf = _whnf(st, typeof_neutral(st, fun))
            if not isinstance(tf, PiTy):
                raise NotNeutral("neutral head does not have a Pi type")
            if isinstance(tf.domain, CtxDom):
                payload = _ctx_argument(st, arg)
                return apply_comp_subst(comp_subst1(payload, tf.binder), tf.body)
            return apply_comp_subst(comp_subst1(arg, tf.binder), tf.body)
        case Rec(motive, _, ctx_arg, scrut):
            psi_name, y_name, tau = motive_parts(st, motive)
            theta = CompSubst(((psi_name, ctx_arg), (y_name, scrut)))
            return apply_comp_subst(theta, tau)
    raise NotNeutral(f"not a neutral computation: {type(t).__name__}")
