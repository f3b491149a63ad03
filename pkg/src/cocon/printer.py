"""Rendering back to the surface syntax.

Bound names are displayed with their freshness counter folded into the
identifier and primed on residual collisions, so printed output reparses
to an alpha-equivalent term.
"""
from __future__ import annotations

from .syntax import (
    Atom, BoxObj, BoxTy, CompApp, CompTerm, CompVar, Cons, CtxDom, CtxEmpty,
    CtxLit, CtxSnoc, CtxVar, ECtxEmpty, ECtxSnoc, ECtxVar, EmptySub, Fn, KPi,
    KType, LfApp, LfConst, LfLam, LfPi, LfVar, Name, PiTy, Rec, Unbox, Univ,
    Wk, free_lf_names, split_ctx, split_erased,
)


class Printer:
    def __init__(self):
        self.display: dict[Name, str] = {}
        self.used: set[str] = set()

    def _bind(self, name: Name) -> tuple[str, tuple]:
        d = str(name)
        while d in self.used:
            d += "'"
        saved = (self.display.get(name), d)
        self.display[name] = d
        self.used.add(d)
        return d, saved

    def _unbind(self, name: Name, saved: tuple) -> None:
        prev, d = saved
        self.used.discard(d)
        if prev is None:
            self.display.pop(name, None)
        else:
            self.display[name] = prev

    def _ref(self, name: Name) -> str:
        return self.display.get(name, str(name))

    # -- computations -------------------------------------------------------
    def comp(self, t: CompTerm) -> str:
        match t:
            case Fn(y, body):
                d, saved = self._bind(y)
                out = f"fn {d} => {self.comp(body)}"
                self._unbind(y, saved)
                return out
            case PiTy(y, dom, body):
                ds = "ctx" if isinstance(dom, CtxDom) else self.comp(dom)
                d, saved = self._bind(y)
                out = f"({d} : {ds}) -> {self.comp(body)}"
                self._unbind(y, saved)
                return out
            case CompApp(fun, arg):
                return f"{self._comp_head(fun)} {self._comp_atom(arg)}"
            case _:
                return self._comp_atom(t)

    def _comp_head(self, t: CompTerm) -> str:
        if isinstance(t, CompApp):
            return self.comp(t)
        return self._comp_atom(t)

    def _comp_atom(self, t: CompTerm) -> str:
        match t:
            case CompVar(y):
                return self._ref(y)
            case Univ(k):
                return f"U{k}"
            case BoxTy(inner):
                mark = "|-#" if inner.var_only else "|-"
                ctx_s, binds = self._open_ctx(inner.ctx)
                out = f"[{ctx_s}{mark} {self.lf_type(inner.type)}]"
                self._close_ctx(binds)
                return out
            case BoxObj(obj, annot):
                if annot is not None:
                    ctx_s, binds = self._open_ctx(annot)
                else:
                    ctx_s, binds = self._open_erased(obj.ctx)
                out = f"[{ctx_s}|- {self.lf_term(obj.term)}]"
                self._close_ctx(binds)
                return out
            case CtxLit(ctx):
                return self.ctx_arg(ctx)
            case Rec(motive, bs, ctx_arg, scrut):
                parts = [f"rec ({self.comp(motive)}) with"]
                names = (bs.var.psi, bs.var.p)
                d, s = zip(*(self._bind(n) for n in names))
                parts.append(f"| var {' '.join(d)} => {self.comp(bs.var.body)}")
                for n, sv in reversed(list(zip(names, s))):
                    self._unbind(n, sv)
                names = (bs.app.psi, bs.app.m, bs.app.n, bs.app.fm, bs.app.fn)
                d, s = zip(*(self._bind(n) for n in names))
                parts.append(f"| app {' '.join(d)} => {self.comp(bs.app.body)}")
                for n, sv in reversed(list(zip(names, s))):
                    self._unbind(n, sv)
                names = (bs.lam.psi, bs.lam.m, bs.lam.fm)
                d, s = zip(*(self._bind(n) for n in names))
                parts.append(f"| lam {' '.join(d)} => {self.comp(bs.lam.body)}")
                for n, sv in reversed(list(zip(names, s))):
                    self._unbind(n, sv)
                parts.append(f"end {self.ctx_arg(ctx_arg)} {self._comp_atom(scrut)}")
                return " ".join(parts)
            case _:
                return f"({self.comp(t)})"

    # -- LF contexts ----------------------------------------------------------
    def _open_ctx(self, ctx) -> tuple[str, list]:
        head, entries = split_ctx(ctx)
        parts = []
        binds = []
        if head is not None:
            parts.append(self._ref(head))
        for x, a in entries:
            a_s = self.lf_type(a)
            d, saved = self._bind(x)
            binds.append((x, saved))
            parts.append(f"{d} : {a_s}")
        s = ", ".join(parts)
        return (s + " " if s else ""), binds

    def _open_erased(self, ectx) -> tuple[str, list]:
        head, names = split_erased(ectx)
        parts = []
        binds = []
        if head is not None:
            parts.append(self._ref(head))
        for x in names:
            d, saved = self._bind(x)
            binds.append((x, saved))
            parts.append(d)
        s = ", ".join(parts)
        return (s + " " if s else ""), binds

    def _close_ctx(self, binds: list) -> None:
        for x, saved in reversed(binds):
            self._unbind(x, saved)

    def ctx_arg(self, ctx) -> str:
        head, entries = split_ctx(ctx)
        if head is not None and not entries:
            return self._ref(head)
        ctx_s, binds = self._open_ctx(ctx)
        self._close_ctx(binds)
        return f"({ctx_s.rstrip()})"

    def erased(self, ectx) -> str:
        head, names = split_erased(ectx)
        parts = ([self._ref(head)] if head is not None else []) + \
            [self._ref(n) for n in names]
        return " ".join(parts)

    # -- LF types and kinds ------------------------------------------------------
    def lf_type(self, a) -> str:
        match a:
            case Atom(head, spine):
                parts = [self._ref(head)] + [self._lf_atom(m) for m in spine]
                return " ".join(parts)
            case LfPi(x, dom, body):
                dom_s = self._lf_type_group(dom)
                if x not in free_lf_names(body):
                    return f"{dom_s} -> {self.lf_type(body)}"
                d, saved = self._bind(x)
                out = f"({d} : {self.lf_type(dom)}) -> {self.lf_type(body)}"
                self._unbind(x, saved)
                return out
        raise TypeError(f"not an LF type: {type(a).__name__}")

    def _lf_type_group(self, a) -> str:
        if isinstance(a, LfPi):
            return f"({self.lf_type(a)})"
        return self.lf_type(a)

    def lf_kind(self, k) -> str:
        match k:
            case KType():
                return "type"
            case KPi(x, dom, body):
                if x not in free_lf_names(body):
                    return f"{self._lf_type_group(dom)} -> {self.lf_kind(body)}"
                d, saved = self._bind(x)
                out = f"({d} : {self.lf_type(dom)}) -> {self.lf_kind(body)}"
                self._unbind(x, saved)
                return out
        raise TypeError(f"not an LF kind: {type(k).__name__}")

    # -- LF terms -------------------------------------------------------------
    def lf_term(self, m) -> str:
        match m:
            case LfLam(x, body):
                d, saved = self._bind(x)
                out = f"\\{d}. {self.lf_term(body)}"
                self._unbind(x, saved)
                return out
            case LfApp(fun, arg):
                return f"{self._lf_head(fun)} {self._lf_atom(arg)}"
            case _:
                return self._lf_atom(m)

    def _lf_head(self, m) -> str:
        if isinstance(m, LfApp):
            return self.lf_term(m)
        return self._lf_atom(m)

    def _lf_atom(self, m) -> str:
        match m:
            case LfVar(x):
                return self._ref(x)
            case LfConst(c):
                return self._ref(c)
            case Unbox(comp, subst):
                return f"unbox({self.comp(comp)} ; {self.lf_subst(subst)})"
            case _:
                return f"({self.lf_term(m)})"

    def lf_subst(self, sigma) -> str:
        entries = []
        while isinstance(sigma, Cons):
            entries.append(sigma.term)
            sigma = sigma.rest
        entries.reverse()
        match sigma:
            case EmptySub():
                base = "." if not entries else None
            case Wk(domain):
                names = self.erased(domain)
                base = f"wk {names}" if names else "wk"
            case _:
                base = "?"
        parts = ([base] if base is not None else []) + \
            [self.lf_term(e) for e in entries]
        return " , ".join(parts)


def show_comp(t: CompTerm) -> str:
    return Printer().comp(t)


def show_lf_term(m) -> str:
    return Printer().lf_term(m)


def show_lf_type(a) -> str:
    return Printer().lf_type(a)
