"""Surface-syntax parser.

Hand-written lexer and recursive-descent parser with bounded
backtracking where context literals and Pi binders overlap.  Offsets are
in bytes.  Identifiers are resolved lexically at parse time: bound names
become variables, everything else an LF constant; box payloads parse as
types when their head is a previously declared type family.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from .errors import Diagnostic
from .syntax import (
    Atom, AppBranch, BoxObj, BoxTy, Branches, CompApp, CompTerm, CompVar,
    Cons, CtxDom, CtxEmpty, CtxLit, CtxObj, CtxSnoc, CtxType, CtxVar,
    ECtxEmpty, ECtxSnoc, ECtxVar, EmptySub, ErasedCtx, Fn, KPi, KType,
    LamBranch, LfApp, LfConst, LfCtx, LfKind, LfLam, LfPi, LfSubst, LfTerm,
    LfType, LfVar, Name, PiTy, Rec, Unbox, Univ, VarBranch, Wk, erase_ctx,
)

_KEYWORDS = {"def", "fn", "rec", "with", "end", "ctx", "type", "unbox", "wk"}
_UNIV_RE = re.compile(r"^U[0-9]+$")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")

_PUNCT = ["|-#", "|-", ":=", "->", "=>", "#eval", "(", ")", "[", "]",
          ",", ";", ":", ".", "\\", "|"]


@dataclass(frozen=True)
class Token:
    kind: str          # "ident", "univ", a punctuation/keyword literal, "eof"
    text: str
    pos: int           # byte offset


class ParseError(Exception):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{pos}: {message}")
        self.diagnostic = Diagnostic("ParseError", message, pos, "parse")


def _lex(src: str) -> list[Token]:
    toks: list[Token] = []
    i = 0
    byte_pos = 0
    n = len(src)
    while i < n:
        c = src[i]
        if c == "%":
            while i < n and src[i] != "\n":
                byte_pos += len(src[i].encode("utf-8"))
                i += 1
            continue
        if c.isspace():
            byte_pos += len(c.encode("utf-8"))
            i += 1
            continue
        m = _IDENT_RE.match(src, i)
        if m:
            word = m.group(0)
            kind = "univ" if _UNIV_RE.match(word) else \
                (word if word in _KEYWORDS else "ident")
            toks.append(Token(kind, word, byte_pos))
            byte_pos += len(word.encode("utf-8"))
            i += len(word)
            continue
        for p in _PUNCT:
            if src.startswith(p, i):
                toks.append(Token(p, p, byte_pos))
                byte_pos += len(p)
                i += len(p)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", byte_pos)
    toks.append(Token("eof", "", byte_pos))
    return toks


# ---------------------------------------------------------------------------
# Declarations

@dataclass(frozen=True)
class LfDecl:
    name: Name
    classifier: Union[LfKind, LfType]
    pos: int


@dataclass(frozen=True)
class CompDef:
    name: Name
    type: CompTerm
    body: CompTerm
    pos: int


@dataclass(frozen=True)
class EvalDirective:
    name: Name
    pos: int


Decl = Union[LfDecl, CompDef, EvalDirective]


@dataclass(frozen=True)
class SourceFile:
    path: str
    declarations: tuple[Decl, ...]


class _Scope:
    """Lexical scope: text -> Name, shadowing handled with fresh uids."""

    def __init__(self):
        self.map: dict[str, Name] = {}
        self.uid_counter: dict[str, int] = {}

    def bind(self, text: str) -> tuple[Name, Optional[Name]]:
        prev = self.map.get(text)
        if text in self.uid_counter:
            self.uid_counter[text] += 1
            name = Name(text, self.uid_counter[text])
        else:
            self.uid_counter[text] = 0
            name = Name(text)
        self.map[text] = name
        return name, prev

    def unbind(self, text: str, prev: Optional[Name]) -> None:
        if prev is None:
            self.map.pop(text, None)
        else:
            self.map[text] = prev

    def lookup(self, text: str) -> Optional[Name]:
        return self.map.get(text)

    def snapshot(self):
        return dict(self.map), dict(self.uid_counter)

    def restore(self, snap) -> None:
        self.map, self.uid_counter = dict(snap[0]), dict(snap[1])


class Parser:
    def __init__(self, src: str, path: str = "<input>"):
        self.toks = _lex(src)
        self.i = 0
        self.path = path
        self.comp_scope = _Scope()
        self.lf_scope = _Scope()
        self.families: set[str] = set()
        # ambient LF scope, for the identity-substitution shorthand
        self.lf_ambient: list[tuple[str, Name]] = []  # ("head"|"bind", name)

    # -- token plumbing ------------------------------------------------------
    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, kind: str) -> Token:
        t = self.peek()
        if t.kind != kind:
            raise ParseError(
                f"expected {kind!r}, found {(t.text or 'end of input')!r}", t.pos)
        return self.next()

    def at(self, kind: str) -> bool:
        return self.peek().kind == kind

    def _snapshot(self):
        return (self.i, self.comp_scope.snapshot(), self.lf_scope.snapshot(),
                list(self.lf_ambient))

    def _restore(self, snap) -> None:
        self.i, comp_snap, lf_snap, ambient = snap
        self.comp_scope.restore(comp_snap)
        self.lf_scope.restore(lf_snap)
        self.lf_ambient = list(ambient)

    # -- file ------------------------------------------------------------------
    def parse_file(self) -> SourceFile:
        decls: list[Decl] = []
        while not self.at("eof"):
            decls.append(self.parse_decl())
        return SourceFile(self.path, tuple(decls))

    def parse_decl(self) -> Decl:
        t = self.peek()
        if t.kind == "#eval":
            self.next()
            name = self.expect("ident")
            self.expect(".")
            return EvalDirective(Name(name.text), name.pos)
        if t.kind == "def":
            self.next()
            name = self.expect("ident")
            self.expect(":")
            ty = self.parse_comp()
            self.expect(":=")
            body = self.parse_comp()
            self.expect(".")
            return CompDef(Name(name.text), ty, body, name.pos)
        if t.kind == "ident":
            name = self.next()
            self.expect(":")
            classifier = self.parse_classifier()
            self.expect(".")
            if isinstance(classifier, (KType, KPi)):
                self.families.add(name.text)
            return LfDecl(Name(name.text), classifier, name.pos)
        raise ParseError(f"expected a declaration, found {t.text!r}", t.pos)

    # -- LF classifiers (kinds and types) ----------------------------------------
    def parse_classifier(self) -> Union[LfKind, LfType]:
        t = self.peek()
        if t.kind == "type":
            self.next()
            return KType(pos=t.pos)
        if t.kind == "(" and self.peek(1).kind == "ident" \
                and self.peek(2).kind == ":":
            self.next()
            binder_tok = self.expect("ident")
            self.expect(":")
            dom = self.parse_lf_type()
            self.expect(")")
            self.expect("->")
            binder, prev = self.lf_scope.bind(binder_tok.text)
            self.lf_ambient.append(("bind", binder))
            body = self.parse_classifier()
            self.lf_ambient.pop()
            self.lf_scope.unbind(binder_tok.text, prev)
            if isinstance(body, (KType, KPi)):
                return KPi(binder, dom, body, pos=t.pos)
            return LfPi(binder, dom, body, pos=t.pos)
        lhs = self.parse_lf_type_group()
        if self.at("->"):
            self.next()
            body = self.parse_classifier()
            if isinstance(body, (KType, KPi)):
                return KPi(Name("_"), lhs, body, pos=t.pos)
            return LfPi(Name("_"), lhs, body, pos=t.pos)
        return lhs

    def parse_lf_type(self) -> LfType:
        out = self.parse_classifier()
        if isinstance(out, (KType, KPi)):
            raise ParseError("a kind cannot appear here", self.peek().pos)
        return out

    def parse_lf_type_group(self) -> LfType:
        t = self.peek()
        if t.kind == "(":
            self.next()
            inner = self.parse_lf_type()
            self.expect(")")
            return inner
        head = self.expect("ident")
        spine: list[LfTerm] = []
        while self.peek().kind in ("ident", "unbox") or \
                (self.at("(") and not self._paren_starts_binder()):
            spine.append(self.parse_lf_atom())
        return Atom(Name(head.text), tuple(spine), pos=t.pos)

    def _paren_starts_binder(self) -> bool:
        return self.peek(1).kind == "ident" and self.peek(2).kind == ":"

    # -- LF terms ------------------------------------------------------------------
    def parse_lf_term(self) -> LfTerm:
        t = self.peek()
        if t.kind == "\\":
            return self._parse_lf_lam()
        out = self.parse_lf_atom()
        while self.peek().kind in ("ident", "unbox", "(", "\\"):
            if self.at("\\"):
                return LfApp(out, self._parse_lf_lam(), pos=t.pos)
            out = LfApp(out, self.parse_lf_atom(), pos=t.pos)
        return out

    def _parse_lf_lam(self) -> LfTerm:
        t = self.expect("\\")
        binder_tok = self.expect("ident")
        self.expect(".")
        binder, prev = self.lf_scope.bind(binder_tok.text)
        self.lf_ambient.append(("bind", binder))
        body = self.parse_lf_term()
        self.lf_ambient.pop()
        self.lf_scope.unbind(binder_tok.text, prev)
        return LfLam(binder, body, pos=t.pos)

    def parse_lf_atom(self) -> LfTerm:
        t = self.peek()
        if t.kind == "(":
            self.next()
            inner = self.parse_lf_term()
            self.expect(")")
            return inner
        if t.kind == "unbox":
            self.next()
            self.expect("(")
            comp = self.parse_comp()
            if self.at(";"):
                self.next()
                subst = self.parse_lf_subst()
            else:
                subst = Wk(self._ambient_erased())
            self.expect(")")
            return Unbox(comp, subst, pos=t.pos)
        tok = self.expect("ident")
        bound = self.lf_scope.lookup(tok.text)
        if bound is not None:
            return LfVar(bound, pos=tok.pos)
        return LfConst(Name(tok.text), pos=tok.pos)

    def _ambient_erased(self) -> ErasedCtx:
        out: ErasedCtx = ECtxEmpty()
        for kind, name in self.lf_ambient:
            if kind == "head":
                out = ECtxVar(name)
            else:
                out = ECtxSnoc(out, name)
        return out

    # -- LF substitutions --------------------------------------------------------
    def parse_lf_subst(self) -> LfSubst:
        t = self.peek()
        base: LfSubst
        if t.kind == ".":
            self.next()
            base = EmptySub(pos=t.pos)
        elif t.kind == "wk":
            self.next()
            entries: ErasedCtx = ECtxEmpty()
            first = True
            while self.at("ident"):
                tok = self.next()
                comp_bound = self.comp_scope.lookup(tok.text)
                lf_bound = self.lf_scope.lookup(tok.text)
                if first and comp_bound is not None and lf_bound is None:
                    entries = ECtxVar(comp_bound)
                else:
                    entries = ECtxSnoc(
                        entries,
                        lf_bound if lf_bound is not None else Name(tok.text))
                first = False
            base = Wk(entries, pos=t.pos)
        else:
            base = Cons(EmptySub(pos=t.pos), self.parse_lf_term(), pos=t.pos)
        while self.at(","):
            self.next()
            base = Cons(base, self.parse_lf_term(), pos=t.pos)
        return base

    # -- LF contexts ------------------------------------------------------------
    def parse_lf_ctx(self, stops: tuple[str, ...]) -> tuple[LfCtx, list]:
        """Parse context entries up to one of the stop tokens.  Binders are
        left in scope; the caller releases them with _close_ctx."""
        binds: list = []
        out: LfCtx = CtxEmpty()
        if self.peek().kind in stops:
            return out, binds
        first = True
        while True:
            tok = self.expect("ident")
            if first and not self.at(":"):
                head = self.comp_scope.lookup(tok.text)
                if head is None:
                    raise ParseError(
                        f"{tok.text} is not a context variable in scope", tok.pos)
                out = CtxVar(head, pos=tok.pos)
                self.lf_ambient.append(("head", head))
                binds.append((None, None))
            else:
                self.expect(":")
                ty = self.parse_lf_type()
                binder, prev = self.lf_scope.bind(tok.text)
                self.lf_ambient.append(("bind", binder))
                binds.append((tok.text, prev))
                out = CtxSnoc(out, binder, ty, pos=tok.pos)
            first = False
            if self.at(","):
                self.next()
                continue
            return out, binds

    def _close_ctx(self, binds: list) -> None:
        for text, prev in reversed(binds):
            self.lf_ambient.pop()
            if text is not None:
                self.lf_scope.unbind(text, prev)

    # -- computations ----------------------------------------------------------
    def _at_fn_abstraction(self) -> bool:
        return self.at("fn") and self.peek(1).kind in ("ident", "fn") \
            and self.peek(2).kind == "=>"

    def parse_comp(self) -> CompTerm:
        t = self.peek()
        if self._at_fn_abstraction():
            self.next()
            binder_tok = self._expect_ident_like()
            self.expect("=>")
            binder, prev = self.comp_scope.bind(binder_tok.text)
            body = self.parse_comp()
            self.comp_scope.unbind(binder_tok.text, prev)
            return Fn(binder, body, pos=t.pos)
        if t.kind == "(" and self.peek(1).kind == "ident" \
                and self.peek(2).kind == ":":
            pi = self._try_parse_pi()
            if pi is not None:
                return pi
        out = self.parse_comp_atom()
        while self._starts_comp_atom():
            out = CompApp(out, self.parse_comp_atom(), pos=t.pos)
        return out

    def _try_parse_pi(self) -> Optional[CompTerm]:
        snap = self._snapshot()
        t = self.next()                      # "("
        binder_tok = self.next()             # ident
        self.next()                          # ":"
        dom: Union[CompTerm, CtxDom]
        if self.at("ctx"):
            self.next()
            dom = CtxDom()
        else:
            try:
                dom = self.parse_comp()
            except ParseError:
                self._restore(snap)
                return None
        if not self.at(")") or self.peek(1).kind != "->":
            self._restore(snap)
            return None
        self.next()
        self.next()
        binder, prev = self.comp_scope.bind(binder_tok.text)
        body = self.parse_comp()
        self.comp_scope.unbind(binder_tok.text, prev)
        return PiTy(binder, dom, body, pos=t.pos)

    def _expect_ident_like(self) -> Token:
        t = self.peek()
        if t.kind in ("ident", "fn"):
            return self.next()
        raise ParseError(
            f"expected an identifier, found {(t.text or 'end of input')!r}", t.pos)

    def _starts_comp_atom(self) -> bool:
        k = self.peek().kind
        if k == "fn":
            return not self._at_fn_abstraction()
        return k in ("ident", "univ", "[", "(", "rec")

    def parse_comp_atom(self) -> CompTerm:
        t = self.peek()
        if t.kind == "univ":
            self.next()
            return Univ(int(t.text[1:]), pos=t.pos)
        if t.kind == "ident" or (t.kind == "fn" and not self._at_fn_abstraction()):
            self.next()
            bound = self.comp_scope.lookup(t.text)
            return CompVar(bound if bound is not None else Name(t.text), pos=t.pos)
        if t.kind == "[":
            return self.parse_box()
        if t.kind == "rec":
            return self.parse_rec()
        if t.kind == "(":
            if self.peek(1).kind == ")":
                self.next()
                self.next()
                return CtxLit(CtxEmpty(), pos=t.pos)
            if self.peek(1).kind == "ident" and self.peek(2).kind == ":":
                lit = self._try_parse_ctx_literal()
                if lit is not None:
                    return lit
            self.next()
            inner = self.parse_comp()
            self.expect(")")
            return inner
        raise ParseError(
            f"expected a term, found {(t.text or 'end of input')!r}", t.pos)

    def _try_parse_ctx_literal(self) -> Optional[CompTerm]:
        snap = self._snapshot()
        t = self.next()                      # "("
        try:
            ctx, binds = self.parse_lf_ctx((")",))
            self.expect(")")
        except ParseError:
            self._restore(snap)
            return None
        self._close_ctx(binds)
        if self.at("->"):                    # it was a Pi binder after all
            self._restore(snap)
            return None
        return CtxLit(ctx, pos=t.pos)

    def parse_box(self) -> CompTerm:
        t = self.expect("[")
        ctx, binds = self.parse_lf_ctx(("|-", "|-#"))
        var_only = self.at("|-#")
        if var_only:
            self.next()
            ty = self.parse_lf_type()
            self._close_ctx(binds)
            self.expect("]")
            return BoxTy(CtxType(ctx, ty, var_only=True), pos=t.pos)
        self.expect("|-")
        if self._payload_is_type():
            ty = self.parse_lf_type()
            self._close_ctx(binds)
            self.expect("]")
            return BoxTy(CtxType(ctx, ty), pos=t.pos)
        term = self.parse_lf_term()
        self._close_ctx(binds)
        self.expect("]")
        return BoxObj(CtxObj(erase_ctx(ctx), term), ctx, pos=t.pos)

    def _payload_is_type(self) -> bool:
        t = self.peek()
        if t.kind == "ident" and t.text in self.families \
                and self.lf_scope.lookup(t.text) is None:
            return True
        if t.kind == "(" and self._paren_starts_binder():
            return True
        return False

    def parse_rec(self) -> CompTerm:
        t = self.expect("rec")
        self.expect("(")
        motive = self.parse_comp()
        self.expect(")")
        self.expect("with")
        branches = self.parse_branches()
        self.expect("end")
        ctx_arg = self.parse_ctx_arg()
        scrut = self.parse_comp_atom()
        return Rec(motive, branches, ctx_arg, scrut, pos=t.pos)

    def parse_branches(self) -> Branches:
        var: Optional[VarBranch] = None
        app: Optional[AppBranch] = None
        lam: Optional[LamBranch] = None
        first = self.peek()
        for _ in range(3):
            self.expect("|")
            kw = self.expect("ident")
            if kw.text == "var" and var is None:
                binders, body = self._branch_body(2)
                var = VarBranch(binders[0], binders[1], body)
            elif kw.text == "app" and app is None:
                binders, body = self._branch_body(5)
                app = AppBranch(*binders, body)
            elif kw.text == "lam" and lam is None:
                binders, body = self._branch_body(3)
                lam = LamBranch(*binders, body)
            else:
                raise ParseError("expected one var, one app, and one lam branch",
                                 kw.pos)
        if var is None or app is None or lam is None:
            raise ParseError("rec needs var, app, and lam branches", first.pos)
        return Branches(var, app, lam)

    def _branch_body(self, count: int) -> tuple[list[Name], CompTerm]:
        name_toks = [self._expect_ident_like() for _ in range(count)]
        self.expect("=>")
        if len({tok.text for tok in name_toks}) != len(name_toks):
            raise ParseError("branch binders must be distinct", name_toks[0].pos)
        binders = []
        prevs = []
        for tok in name_toks:
            b, prev = self.comp_scope.bind(tok.text)
            binders.append(b)
            prevs.append((tok.text, prev))
        body = self.parse_comp()
        for text, prev in reversed(prevs):
            self.comp_scope.unbind(text, prev)
        return binders, body

    def parse_ctx_arg(self) -> LfCtx:
        t = self.peek()
        if t.kind == "ident":
            self.next()
            head = self.comp_scope.lookup(t.text)
            if head is None:
                raise ParseError(
                    f"{t.text} is not a context variable in scope", t.pos)
            return CtxVar(head, pos=t.pos)
        if t.kind == "(":
            self.next()
            if self.at(")"):
                self.next()
                return CtxEmpty(pos=t.pos)
            ctx, binds = self.parse_lf_ctx((")",))
            self.expect(")")
            self._close_ctx(binds)
            return ctx
        raise ParseError("expected an LF context argument", t.pos)


def parse_file(text: str, path: str = "<input>") -> SourceFile:
    return Parser(text, path).parse_file()


def parse_comp_term(text: str, families: tuple[str, ...] = ("tm",)) -> CompTerm:
    """Parse a single closed computation, for tests and tooling."""
    p = Parser(text)
    p.families |= set(families)
    out = p.parse_comp()
    if not p.at("eof"):
        raise ParseError("trailing input after term", p.peek().pos)
    return out
