"""Seeded random generation of well-scoped and well-typed terms.

The typed generator only produces forms the bidirectional checker accepts
(canonical values, neutrals, recursors, unbox closures of boxes); reduction
work comes from unbox-of-box closures and recursor unfolding.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from cocon.syntax import (
    AppBranch, Atom, BoxObj, BoxTy, Branches, CompApp, CompTerm, CompVar,
    Cons, CtxDom, CtxEmpty, CtxSnoc, CtxType, CtxVar, CtxObj, ECtxEmpty,
    ECtxSnoc, ECtxVar, EmptySub, ErasedCtx, Fn, KType, LamBranch, LfApp,
    LfConst, LfCtx, LfLam, LfPi, LfSubst, LfTerm, LfVar, Name, PiTy, Rec,
    SigDecl, Unbox, Univ, VarBranch, Wk, erase_ctx, split_ctx,
)
from cocon.typecheck import CheckState, check_signature, tm_atom

TM = Name("tm")
LAM = Name("lam")
APP = Name("app")


def base_signature():
    x, y = Name("x"), Name("y")
    tm = tm_atom()
    return check_signature([
        SigDecl(TM, KType()),
        SigDecl(LAM, LfPi(y, LfPi(x, tm, tm), tm)),
        SigDecl(APP, LfPi(x, tm, LfPi(y, tm, tm))),
    ])


def base_state(fuel: int = 1_000_000) -> CheckState:
    return CheckState(base_signature(), fuel=fuel)


def lam_(x: Name, body: LfTerm) -> LfTerm:
    return LfApp(LfConst(LAM), LfLam(x, body))


def app_(m: LfTerm, n: LfTerm) -> LfTerm:
    return LfApp(LfApp(LfConst(APP), m), n)


def copy_motive(psi: Name, y: Name) -> CompTerm:
    box = BoxTy(CtxType(CtxVar(psi), tm_atom()))
    return PiTy(psi, CtxDom(), PiTy(y, box, box))


def copy_branches(g: "TermGen") -> Branches:
    psi, p, m, n, fm, fn = (g.name(s) for s in ("g", "p", "m", "n", "fm", "fn"))
    x = g.name("x")
    return Branches(
        VarBranch(psi, p, CompVar(p)),
        AppBranch(psi, m, n, fm, fn,
                  BoxObj(CtxObj(ECtxVar(psi),
                                app_(Unbox(CompVar(fm), Wk(ECtxVar(psi))),
                                     Unbox(CompVar(fn), Wk(ECtxVar(psi))))),
                         CtxVar(psi))),
        LamBranch(psi, m, fm,
                  BoxObj(CtxObj(ECtxVar(psi),
                                LfApp(LfConst(LAM),
                                      LfLam(x, Unbox(CompVar(fm),
                                                     Wk(ECtxSnoc(ECtxVar(psi), x)))))),
                         CtxVar(psi))),
    )


@dataclass
class Typed:
    state: CheckState
    term: CompTerm
    type: CompTerm


class TermGen:
    def __init__(self, seed: int):
        self.rng = random.Random(seed)
        self.counter = 0

    def name(self, base: str) -> Name:
        self.counter += 1
        return Name(base, 1000 + self.counter)

    def pick(self, weights: list[tuple[int, object]]):
        total = sum(w for w, _ in weights)
        r = self.rng.randrange(total)
        for w, v in weights:
            if r < w:
                return v
            r -= w
        raise AssertionError

    # -- contexts -----------------------------------------------------------
    def concrete_ctx(self, max_len: int = 2) -> LfCtx:
        out: LfCtx = CtxEmpty()
        for _ in range(self.rng.randint(0, max_len)):
            out = CtxSnoc(out, self.name("v"), tm_atom())
        return out

    def gamma_and_ctx(self, st: CheckState) -> tuple[CheckState, LfCtx]:
        """Maybe extend gamma with a context variable; return a scrutinee
        context over it (or a concrete one)."""
        if self.rng.random() < 0.4:
            psi = self.name("psi")
            st = st.bind(psi, CtxDom())
            ctx: LfCtx = CtxVar(psi)
            for _ in range(self.rng.randint(0, 1)):
                ctx = CtxSnoc(ctx, self.name("v"), tm_atom())
            return st, ctx
        return st, self.concrete_ctx()

    # -- LF terms of type tm in a given context -------------------------------
    def lf_tm(self, st: CheckState, psi: LfCtx, depth: int) -> LfTerm:
        _, entries = split_ctx(psi)
        box_vars = [n for n, dom in st.gamma.entries
                    if isinstance(dom, BoxTy) and not dom.inner.var_only]
        opts: list[tuple[int, str]] = [(3, "lam"), (3, "app")]
        if entries:
            opts.append((4, "var"))
        if depth <= 0:
            if entries:
                return LfVar(self.rng.choice(entries)[0])
            return self._closed_leaf()
        opts.append((2, "unbox"))
        if box_vars:
            opts.append((2, "gamma_unbox"))
        kind = self.pick(opts)
        if kind == "var":
            return LfVar(self.rng.choice(entries)[0])
        if kind == "lam":
            x = self.name("x")
            return lam_(x, self.lf_tm(st, CtxSnoc(psi, x, tm_atom()), depth - 1))
        if kind == "app":
            return app_(self.lf_tm(st, psi, depth - 1),
                        self.lf_tm(st, psi, depth - 1))
        if kind == "unbox":
            phi = self.concrete_ctx(1)
            inner = self.comp_box(st, phi, depth - 1)
            sigma = self.lf_subst_to(st, psi, phi, depth - 1)
            return Unbox(inner, sigma)
        # gamma_unbox: unbox a box-typed gamma variable
        name, dom = self.rng.choice(
            [(n, d) for n, d in st.gamma.entries
             if isinstance(d, BoxTy) and not d.inner.var_only])
        phi = dom.inner.ctx
        sigma = self.lf_subst_to(st, psi, phi, depth - 1)
        return Unbox(CompVar(name), sigma)

    def _closed_leaf(self) -> LfTerm:
        x = self.name("x")
        return lam_(x, LfVar(x))

    def lf_subst_to(self, st: CheckState, psi: LfCtx, phi: LfCtx,
                    depth: int) -> LfSubst:
        """A substitution phi -> psi: instantiate each entry of phi."""
        head, entries = split_ctx(phi)
        if head is not None:
            p_head, p_entries = split_ctx(psi)
            assert p_head == head, "cannot map an abstract context here"
            out: LfSubst = Wk(ECtxVar(head))
        else:
            out = EmptySub()
        for _, _ty in entries:
            out = Cons(out, self.lf_tm(st, psi, max(0, depth - 1)))
        return out

    # -- computations ----------------------------------------------------------
    def comp_box(self, st: CheckState, psi: LfCtx, depth: int) -> CompTerm:
        """A computation of type BoxTy(psi |- tm)."""
        matching = [n for n, dom in st.gamma.entries
                    if isinstance(dom, BoxTy) and not dom.inner.var_only
                    and dom.inner.ctx == psi]
        opts: list[tuple[int, str]] = [(4, "box")]
        if depth > 0:
            opts.append((3, "rec"))
        if matching:
            opts.append((2, "var"))
        kind = self.pick(opts)
        if kind == "var":
            return CompVar(self.rng.choice(matching))
        if kind == "box":
            return BoxObj(CtxObj(erase_ctx(psi),
                                 self.lf_tm(st, psi, depth)), psi)
        motive = copy_motive(self.name("g"), self.name("w"))
        branches = copy_branches(self)
        scrut = self.comp_box(st, psi, depth - 1)
        return Rec(motive, branches, psi, scrut)

    def typed(self, seed_gamma: bool = True, depth: int = 3) -> Typed:
        """A well-typed (state, term, type) triple over the base signature."""
        st = base_state()
        if seed_gamma and self.rng.random() < 0.5:
            b = self.name("b")
            ctx0 = self.concrete_ctx(1)
            st = st.bind(b, BoxTy(CtxType(ctx0, tm_atom())))
        st, psi = self.gamma_and_ctx(st)
        shape = self.pick([(5, "box"), (2, "fn"), (2, "type")])
        box_ty = BoxTy(CtxType(psi, tm_atom()))
        if shape == "box":
            return Typed(st, self.comp_box(st, psi, depth), box_ty)
        if shape == "fn":
            y = self.name("y")
            st2 = st.bind(y, box_ty)
            body = self.comp_box(st2, psi, depth - 1)
            return Typed(st, Fn(y, body), PiTy(y, box_ty, box_ty))
        if self.rng.random() < 0.5:
            return Typed(st, box_ty, Univ(0))
        motive = PiTy(self.name("g"), CtxDom(),
                      PiTy(self.name("w"), box_ty, Univ(0)))
        # motive must close over its own binders
        g, w = self.name("g"), self.name("w")
        motive = PiTy(g, CtxDom(),
                      PiTy(w, BoxTy(CtxType(CtxVar(g), tm_atom())), Univ(0)))
        branches = Branches(
            VarBranch(self.name("g"), self.name("p"),
                      BoxTy(CtxType(CtxEmpty(), tm_atom()))),
            AppBranch(self.name("g"), self.name("m"), self.name("n"),
                      self.name("fm"), self.name("fn"),
                      BoxTy(CtxType(CtxEmpty(), tm_atom()))),
            LamBranch(self.name("g"), self.name("m"), self.name("fm"),
                      BoxTy(CtxType(self.concrete_ctx(1), tm_atom()))),
        )
        scrut = self.comp_box(st, psi, depth - 1)
        return Typed(st, Rec(motive, branches, psi, scrut), Univ(0))

    # -- raw well-scoped LF pieces for the substitution algebra ----------------
    def raw_lf_term(self, scope: list[Name], depth: int) -> LfTerm:
        opts: list[tuple[int, str]] = [(2, "const")]
        if scope:
            opts.append((4, "var"))
        if depth > 0:
            opts += [(3, "lam"), (3, "app")]
        kind = self.pick(opts)
        if kind == "var":
            return LfVar(self.rng.choice(scope))
        if kind == "const":
            return LfConst(self.rng.choice([LAM, APP]))
        if kind == "lam":
            x = self.name("x")
            return LfLam(x, self.raw_lf_term(scope + [x], depth - 1))
        return LfApp(self.raw_lf_term(scope, depth - 1),
                     self.raw_lf_term(scope, depth - 1))

    def raw_erased(self, size: int) -> ErasedCtx:
        out: ErasedCtx = ECtxEmpty()
        for _ in range(size):
            out = ECtxSnoc(out, self.name("v"))
        return out

    def raw_subst_to(self, range_scope: list[Name], domain: ErasedCtx,
                     depth: int) -> LfSubst:
        """A raw substitution instantiating every entry of `domain` with a
        term over `range_scope`; occasionally a weakening when shapes allow."""
        from cocon.syntax import split_erased
        _, names = split_erased(domain)
        out: LfSubst = EmptySub()
        for _ in names:
            out = Cons(out, self.raw_lf_term(range_scope, depth))
        return out
