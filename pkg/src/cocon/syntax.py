"""Core abstract syntax for both layers of the theory.

The LF layer (terms, types, kinds, contexts, substitutions) represents
syntax trees with binders; the computation layer (a single PTS-style
category of terms and types) represents recursive programs over boxed
LF objects.  Everything here is immutable; variables are named, with a
freshness counter disambiguating copies of the same source name.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

# ---------------------------------------------------------------------------
# Names

@dataclass(frozen=True)
class Name:
    text: str
    uid: int = 0

    def __str__(self) -> str:
        return self.text if self.uid == 0 else f"{self.text}{self.uid}"


def fresh_name(base: Name, avoid: frozenset[Name] | set[Name]) -> Name:
    """Pick a name not in `avoid`, reusing `base` itself when possible."""
    if base not in avoid:
        return base
    top = max(n.uid for n in avoid if n.text == base.text)
    return Name(base.text, top + 1)


def _pos_field():
    return field(default=-1, compare=False, repr=False, kw_only=True)


# ---------------------------------------------------------------------------
# LF layer

@dataclass(frozen=True)
class LfVar:
    name: Name
    pos: int = _pos_field()


@dataclass(frozen=True)
class LfConst:
    name: Name
    pos: int = _pos_field()


@dataclass(frozen=True)
class LfLam:
    binder: Name
    body: "LfTerm"
    pos: int = _pos_field()


@dataclass(frozen=True)
class LfApp:
    fun: "LfTerm"
    arg: "LfTerm"
    pos: int = _pos_field()


@dataclass(frozen=True)
class Unbox:
    """Closure embedding a computation into an LF term.

    The computation must be LF-closed; the substitution relocates its
    result into the ambient LF context.
    """

    comp: "CompTerm"
    subst: "LfSubst"
    pos: int = _pos_field()


LfTerm = Union[LfVar, LfConst, LfLam, LfApp, Unbox]


@dataclass(frozen=True)
class Atom:
    head: Name
    spine: tuple[LfTerm, ...] = ()
    pos: int = _pos_field()


@dataclass(frozen=True)
class LfPi:
    binder: Name
    domain: "LfType"
    body: "LfType"
    pos: int = _pos_field()


LfType = Union[Atom, LfPi]


@dataclass(frozen=True)
class KType:
    pos: int = _pos_field()


@dataclass(frozen=True)
class KPi:
    binder: Name
    domain: LfType
    body: "LfKind"
    pos: int = _pos_field()


LfKind = Union[KType, KPi]


@dataclass(frozen=True)
class CtxEmpty:
    pos: int = _pos_field()


@dataclass(frozen=True)
class CtxVar:
    name: Name
    pos: int = _pos_field()


@dataclass(frozen=True)
class CtxSnoc:
    rest: "LfCtx"
    binder: Name
    type: LfType
    pos: int = _pos_field()


LfCtx = Union[CtxEmpty, CtxVar, CtxSnoc]


@dataclass(frozen=True)
class ECtxEmpty:
    pos: int = _pos_field()


@dataclass(frozen=True)
class ECtxVar:
    name: Name
    pos: int = _pos_field()


@dataclass(frozen=True)
class ECtxSnoc:
    rest: "ErasedCtx"
    binder: Name
    pos: int = _pos_field()


ErasedCtx = Union[ECtxEmpty, ECtxVar, ECtxSnoc]


@dataclass(frozen=True)
class EmptySub:
    pos: int = _pos_field()


@dataclass(frozen=True)
class Wk:
    """Weakening substitution; its stored context is the domain it embeds."""

    domain: ErasedCtx
    pos: int = _pos_field()


@dataclass(frozen=True)
class Cons:
    rest: "LfSubst"
    term: LfTerm
    pos: int = _pos_field()


LfSubst = Union[EmptySub, Wk, Cons]


# ---------------------------------------------------------------------------
# Contextual types and objects

@dataclass(frozen=True)
class CtxType:
    """A contextual type; `var_only` marks the variables-only variant."""

    ctx: LfCtx
    type: LfType
    var_only: bool = False
    pos: int = _pos_field()


@dataclass(frozen=True)
class CtxObj:
    ctx: ErasedCtx
    term: LfTerm
    pos: int = _pos_field()


# ---------------------------------------------------------------------------
# Computation layer (terms and types share one category)

@dataclass(frozen=True)
class CompVar:
    name: Name
    pos: int = _pos_field()


@dataclass(frozen=True)
class Univ:
    level: int
    pos: int = _pos_field()


@dataclass(frozen=True)
class BoxTy:
    inner: CtxType
    pos: int = _pos_field()


@dataclass(frozen=True)
class BoxObj:
    """Boxed contextual object.

    `annot` carries the typed context the box was written with; the
    stored object keeps only its erasure.  Inference needs the
    annotation, checking against a known box type does not.
    """

    obj: CtxObj
    annot: Optional[LfCtx] = None
    pos: int = _pos_field()


@dataclass(frozen=True)
class CtxDom:
    """The `ctx` domain of discourse, usable only as a Pi domain."""

    pos: int = _pos_field()


AnnDom = Union["CompTerm", CtxDom]


@dataclass(frozen=True)
class PiTy:
    binder: Name
    domain: AnnDom
    body: "CompTerm"
    pos: int = _pos_field()


@dataclass(frozen=True)
class Fn:
    binder: Name
    body: "CompTerm"
    pos: int = _pos_field()


@dataclass(frozen=True)
class CompApp:
    fun: "CompTerm"
    arg: "CompTerm"
    pos: int = _pos_field()


@dataclass(frozen=True)
class CtxLit:
    """An LF context in argument position (ctx-domain application)."""

    ctx: LfCtx
    pos: int = _pos_field()


@dataclass(frozen=True)
class VarBranch:
    psi: Name
    p: Name
    body: "CompTerm"


@dataclass(frozen=True)
class AppBranch:
    psi: Name
    m: Name
    n: Name
    fm: Name
    fn: Name
    body: "CompTerm"


@dataclass(frozen=True)
class LamBranch:
    psi: Name
    m: Name
    fm: Name
    body: "CompTerm"


@dataclass(frozen=True)
class Branches:
    var: VarBranch
    app: AppBranch
    lam: LamBranch


@dataclass(frozen=True)
class Rec:
    """Recursor over boxed tm-objects: motive, branches, context, scrutinee."""

    motive: "CompTerm"
    branches: Branches
    ctx_arg: LfCtx
    scrutinee: "CompTerm"
    pos: int = _pos_field()


CompTerm = Union[
    CompVar, Univ, BoxTy, BoxObj, PiTy, Fn, CompApp, CtxLit, Rec
]


# ---------------------------------------------------------------------------
# Signature and computation context

@dataclass(frozen=True)
class SigDecl:
    name: Name
    classifier: Union[LfKind, LfType]
    pos: int = _pos_field()

    @property
    def is_family(self) -> bool:
        return isinstance(self.classifier, (KType, KPi))


@dataclass(frozen=True)
class Signature:
    decls: tuple[SigDecl, ...] = ()

    def find(self, name: Name) -> Optional[SigDecl]:
        for d in self.decls:
            if d.name == name:
                return d
        return None

    def extended(self, decl: SigDecl) -> "Signature":
        return Signature(self.decls + (decl,))


@dataclass(frozen=True)
class CompCtx:
    entries: tuple[tuple[Name, AnnDom], ...] = ()

    def lookup(self, name: Name) -> Optional[AnnDom]:
        for n, dom in reversed(self.entries):
            if n == name:
                return dom
        return None

    def extended(self, name: Name, dom: AnnDom) -> "CompCtx":
        return CompCtx(self.entries + ((name, dom),))

    def names(self) -> frozenset[Name]:
        return frozenset(n for n, _ in self.entries)


# ---------------------------------------------------------------------------
# Context helpers

def erase_ctx(psi: LfCtx) -> ErasedCtx:
    """Drop type annotations, keeping the binder spine and any head variable."""
    match psi:
        case CtxEmpty():
            return ECtxEmpty()
        case CtxVar(name):
            return ECtxVar(name)
        case CtxSnoc(rest, binder, _):
            return ECtxSnoc(erase_ctx(rest), binder)
    raise TypeError(f"not an LF context: {psi!r}")


def split_ctx(psi: LfCtx) -> tuple[Optional[Name], list[tuple[Name, LfType]]]:
    """Return (head context variable or None, entries outermost first)."""
    entries: list[tuple[Name, LfType]] = []
    while isinstance(psi, CtxSnoc):
        entries.append((psi.binder, psi.type))
        psi = psi.rest
    entries.reverse()
    head = psi.name if isinstance(psi, CtxVar) else None
    return head, entries


def split_erased(psi: ErasedCtx) -> tuple[Optional[Name], list[Name]]:
    names: list[Name] = []
    while isinstance(psi, ECtxSnoc):
        names.append(psi.binder)
        psi = psi.rest
    names.reverse()
    head = psi.name if isinstance(psi, ECtxVar) else None
    return head, names


def ectx_from(head: Optional[Name], names: list[Name]) -> ErasedCtx:
    e: ErasedCtx = ECtxVar(head) if head is not None else ECtxEmpty()
    for n in names:
        e = ECtxSnoc(e, n)
    return e


def ctx_binders(psi: LfCtx) -> list[Name]:
    return [n for n, _ in split_ctx(psi)[1]]


def ctx_lookup(psi: LfCtx, name: Name) -> Optional[LfType]:
    while isinstance(psi, CtxSnoc):
        if psi.binder == name:
            return psi.type
        psi = psi.rest
    return None


# ---------------------------------------------------------------------------
# Free names and occurring names

def free_lf_names(x) -> frozenset[Name]:
    """LF variables occurring free.  Computations never contribute: LF
    variables cannot cross the box boundary."""
    match x:
        case LfVar(name):
            return frozenset((name,))
        case LfConst():
            return frozenset()
        case LfLam(binder, body):
            return free_lf_names(body) - {binder}
        case LfApp(fun, arg):
            return free_lf_names(fun) | free_lf_names(arg)
        case Unbox(_, subst):
            return free_lf_names(subst)
        case Atom(_, spine):
            out = frozenset()
            for m in spine:
                out |= free_lf_names(m)
            return out
        case LfPi(binder, domain, body):
            return free_lf_names(domain) | (free_lf_names(body) - {binder})
        case KType():
            return frozenset()
        case KPi(binder, domain, body):
            return free_lf_names(domain) | (free_lf_names(body) - {binder})
        case EmptySub():
            return frozenset()
        case Wk(domain):
            _, names = split_erased(domain)
            return frozenset(names)
        case Cons(rest, term):
            return free_lf_names(rest) | free_lf_names(term)
    raise TypeError(f"free_lf_names: unsupported {type(x).__name__}")


def free_comp_names(x) -> frozenset[Name]:
    """Computation variables (including context variables) occurring free."""
    match x:
        case CompVar(name):
            return frozenset((name,))
        case Univ():
            return frozenset()
        case BoxTy(inner):
            return free_comp_names(inner.ctx) | free_comp_names(inner.type)
        case BoxObj(obj, annot):
            out = free_comp_names(obj.ctx) | free_comp_names(obj.term)
            if annot is not None:
                out |= free_comp_names(annot)
            return out
        case PiTy(binder, domain, body):
            dom = frozenset() if isinstance(domain, CtxDom) else free_comp_names(domain)
            return dom | (free_comp_names(body) - {binder})
        case Fn(binder, body):
            return free_comp_names(body) - {binder}
        case CompApp(fun, arg):
            return free_comp_names(fun) | free_comp_names(arg)
        case CtxLit(ctx):
            return free_comp_names(ctx)
        case Rec(motive, branches, ctx_arg, scrutinee):
            out = free_comp_names(motive) | free_comp_names(ctx_arg)
            out |= free_comp_names(scrutinee)
            b = branches
            out |= free_comp_names(b.var.body) - {b.var.psi, b.var.p}
            out |= free_comp_names(b.app.body) - {b.app.psi, b.app.m, b.app.n, b.app.fm, b.app.fn}
            out |= free_comp_names(b.lam.body) - {b.lam.psi, b.lam.m, b.lam.fm}
            return out
        case LfVar() | LfConst():
            return frozenset()
        case LfLam(_, body):
            return free_comp_names(body)
        case LfApp(fun, arg):
            return free_comp_names(fun) | free_comp_names(arg)
        case Unbox(comp, subst):
            return free_comp_names(comp) | free_comp_names(subst)
        case Atom(_, spine):
            out = frozenset()
            for m in spine:
                out |= free_comp_names(m)
            return out
        case LfPi(_, domain, body):
            return free_comp_names(domain) | free_comp_names(body)
        case KType():
            return frozenset()
        case KPi(_, domain, body):
            return free_comp_names(domain) | free_comp_names(body)
        case CtxEmpty() | ECtxEmpty():
            return frozenset()
        case CtxVar(name) | ECtxVar(name):
            return frozenset((name,))
        case CtxSnoc(rest, _, ty):
            return free_comp_names(rest) | free_comp_names(ty)
        case ECtxSnoc(rest, _):
            return free_comp_names(rest)
        case EmptySub():
            return frozenset()
        case Wk(domain):
            return free_comp_names(domain)
        case Cons(rest, term):
            return free_comp_names(rest) | free_comp_names(term)
        case CtxDom():
            return frozenset()
    raise TypeError(f"free_comp_names: unsupported {type(x).__name__}")


def all_names(x) -> frozenset[Name]:
    """Every name occurring anywhere in x, bound or free, either layer."""
    out: set[Name] = set()
    stack = [x]
    while stack:
        node = stack.pop()
        match node:
            case None | KType() | CtxEmpty() | ECtxEmpty() | EmptySub() | Univ() | CtxDom():
                pass
            case Name():
                out.add(node)
            case LfVar(n) | LfConst(n) | CtxVar(n) | ECtxVar(n) | CompVar(n):
                out.add(n)
            case LfLam(b, body):
                out.add(b)
                stack.append(body)
            case LfApp(f, a) | CompApp(f, a):
                stack += [f, a]
            case Unbox(c, s):
                stack += [c, s]
            case Atom(h, spine):
                out.add(h)
                stack += list(spine)
            case LfPi(b, d, bd) | KPi(b, d, bd):
                out.add(b)
                stack += [d, bd]
            case CtxSnoc(r, b, t):
                out.add(b)
                stack += [r, t]
            case ECtxSnoc(r, b):
                out.add(b)
                stack.append(r)
            case Wk(d):
                stack.append(d)
            case Cons(r, t):
                stack += [r, t]
            case CtxType(c, t, _):
                stack += [c, t]
            case CtxObj(c, t):
                stack += [c, t]
            case BoxTy(i):
                stack.append(i)
            case BoxObj(o, a):
                stack.append(o)
                if a is not None:
                    stack.append(a)
            case PiTy(b, d, bd):
                out.add(b)
                stack += [d, bd]
            case Fn(b, bd):
                out.add(b)
                stack.append(bd)
            case CtxLit(c):
                stack.append(c)
            case Rec(motive, branches, ctx_arg, scrut):
                stack += [motive, ctx_arg, scrut]
                for br in (branches.var, branches.app, branches.lam):
                    stack.append(br.body)
                out |= {branches.var.psi, branches.var.p}
                out |= {branches.app.psi, branches.app.m, branches.app.n,
                        branches.app.fm, branches.app.fn}
                out |= {branches.lam.psi, branches.lam.m, branches.lam.fm}
            case _:
                raise TypeError(f"all_names: unsupported {type(node).__name__}")
    return frozenset(out)


# ---------------------------------------------------------------------------
# Alpha equivalence

class _AEnv:
    """Parallel de Bruijn levelling for the two sides of a comparison."""

    __slots__ = ("left", "right", "depth")

    def __init__(self):
        self.left: dict[Name, int] = {}
        self.right: dict[Name, int] = {}
        self.depth = 0

    def bind(self, a: Name, b: Name) -> tuple:
        saved = (self.left.get(a), self.right.get(b))
        self.left[a] = self.right[b] = self.depth
        self.depth += 1
        return saved

    def unbind(self, a: Name, b: Name, saved: tuple) -> None:
        self.depth -= 1
        la, rb = saved
        if la is None:
            del self.left[a]
        else:
            self.left[a] = la
        if rb is None:
            del self.right[b]
        else:
            self.right[b] = rb

    def same(self, a: Name, b: Name) -> bool:
        la, rb = self.left.get(a), self.right.get(b)
        if la is None and rb is None:
            return a == b
        return la == rb and la is not None


def alpha_eq(a, b) -> bool:
    """True iff a and b differ only in the choice of bound names."""
    lf, comp = _AEnv(), _AEnv()
    return _aeq(a, b, lf, comp)


def _aeq(a, b, lf: _AEnv, comp: _AEnv) -> bool:
    if a is b:
        return True
    if type(a) is not type(b):
        return False
    match a, b:
        case LfVar(x), LfVar(y):
            return lf.same(x, y)
        case LfConst(x), LfConst(y):
            return x == y
        case LfLam(x, m), LfLam(y, n):
            saved = lf.bind(x, y)
            ok = _aeq(m, n, lf, comp)
            lf.unbind(x, y, saved)
            return ok
        case LfApp(f1, a1), LfApp(f2, a2):
            return _aeq(f1, f2, lf, comp) and _aeq(a1, a2, lf, comp)
        case Unbox(t1, s1), Unbox(t2, s2):
            return _aeq(t1, t2, lf, comp) and _aeq(s1, s2, lf, comp)
        case Atom(h1, sp1), Atom(h2, sp2):
            if h1 != h2 or len(sp1) != len(sp2):
                return False
            return all(_aeq(m, n, lf, comp) for m, n in zip(sp1, sp2))
        case LfPi(x, d1, b1), LfPi(y, d2, b2):
            if not _aeq(d1, d2, lf, comp):
                return False
            saved = lf.bind(x, y)
            ok = _aeq(b1, b2, lf, comp)
            lf.unbind(x, y, saved)
            return ok
        case KType(), KType():
            return True
        case KPi(x, d1, b1), KPi(y, d2, b2):
            if not _aeq(d1, d2, lf, comp):
                return False
            saved = lf.bind(x, y)
            ok = _aeq(b1, b2, lf, comp)
            lf.unbind(x, y, saved)
            return ok
        case EmptySub(), EmptySub():
            return True
        case Wk(d1), Wk(d2):
            return _aeq_erased_ref(d1, d2, lf, comp)
        case Cons(r1, m1), Cons(r2, m2):
            return _aeq(r1, r2, lf, comp) and _aeq(m1, m2, lf, comp)
        case CompVar(x), CompVar(y):
            return comp.same(x, y)
        case Univ(i), Univ(j):
            return i == j
        case BoxTy(i1), BoxTy(i2):
            if i1.var_only != i2.var_only:
                return False
            return _aeq_ctx_binding(i1.ctx, i2.ctx, i1.type, i2.type, lf, comp)
        case BoxObj(o1, _), BoxObj(o2, _):
            return _aeq_ectx_binding(o1.ctx, o2.ctx, o1.term, o2.term, lf, comp)
        case PiTy(x, d1, b1), PiTy(y, d2, b2):
            if isinstance(d1, CtxDom) != isinstance(d2, CtxDom):
                return False
            if not isinstance(d1, CtxDom) and not _aeq(d1, d2, lf, comp):
                return False
            saved = comp.bind(x, y)
            ok = _aeq(b1, b2, lf, comp)
            comp.unbind(x, y, saved)
            return ok
        case Fn(x, b1), Fn(y, b2):
            saved = comp.bind(x, y)
            ok = _aeq(b1, b2, lf, comp)
            comp.unbind(x, y, saved)
            return ok
        case CompApp(f1, a1), CompApp(f2, a2):
            return _aeq(f1, f2, lf, comp) and _aeq(a1, a2, lf, comp)
        case CtxLit(c1), CtxLit(c2):
            return _aeq_ctx_binding(c1, c2, None, None, lf, comp)
        case Rec(m1, bs1, c1, s1), Rec(m2, bs2, c2, s2):
            if not (_aeq(m1, m2, lf, comp)
                    and _aeq_ctx_binding(c1, c2, None, None, lf, comp)
                    and _aeq(s1, s2, lf, comp)):
                return False
            return (_aeq_branch((bs1.var.psi, bs1.var.p), bs1.var.body,
                                (bs2.var.psi, bs2.var.p), bs2.var.body, lf, comp)
                    and _aeq_branch(
                        (bs1.app.psi, bs1.app.m, bs1.app.n, bs1.app.fm, bs1.app.fn),
                        bs1.app.body,
                        (bs2.app.psi, bs2.app.m, bs2.app.n, bs2.app.fm, bs2.app.fn),
                        bs2.app.body, lf, comp)
                    and _aeq_branch((bs1.lam.psi, bs1.lam.m, bs1.lam.fm), bs1.lam.body,
                                    (bs2.lam.psi, bs2.lam.m, bs2.lam.fm), bs2.lam.body,
                                    lf, comp))
        case CtxObj(c1, t1), CtxObj(c2, t2):
            return _aeq_ectx_binding(c1, c2, t1, t2, lf, comp)
        case CtxType(c1, t1, v1), CtxType(c2, t2, v2):
            return v1 == v2 and _aeq_ctx_binding(c1, c2, t1, t2, lf, comp)
        case CtxEmpty(), CtxEmpty():
            return True
        case CtxVar(x), CtxVar(y):
            return comp.same(x, y)
        case CtxSnoc(), CtxSnoc():
            return _aeq_ctx_binding(a, b, None, None, lf, comp)
        case ECtxEmpty(), ECtxEmpty():
            return True
        case ECtxVar(x), ECtxVar(y):
            return comp.same(x, y)
        case ECtxSnoc(), ECtxSnoc():
            return _aeq_ectx_binding(a, b, None, None, lf, comp)
        case CtxDom(), CtxDom():
            return True
    return False


def _aeq_branch(xs, body1, ys, body2, lf, comp) -> bool:
    if len(xs) != len(ys):
        return False
    saved = [comp.bind(x, y) for x, y in zip(xs, ys)]
    ok = _aeq(body1, body2, lf, comp)
    for (x, y), s in zip(reversed(list(zip(xs, ys))), reversed(saved)):
        comp.unbind(x, y, s)
    return ok


def _aeq_ctx_binding(c1: LfCtx, c2: LfCtx, t1, t2, lf, comp) -> bool:
    """Compare LF contexts entrywise; binders scope over later entries and
    over the optional payloads t1/t2."""
    h1, e1 = split_ctx(c1)
    h2, e2 = split_ctx(c2)
    if (h1 is None) != (h2 is None) or len(e1) != len(e2):
        return False
    if h1 is not None and not comp.same(h1, h2):
        return False
    saved = []
    ok = True
    bound = []
    for (x, a1), (y, a2) in zip(e1, e2):
        if not _aeq(a1, a2, lf, comp):
            ok = False
            break
        saved.append(lf.bind(x, y))
        bound.append((x, y))
    if ok and t1 is not None:
        ok = _aeq(t1, t2, lf, comp)
    for (x, y), s in zip(reversed(bound), reversed(saved)):
        lf.unbind(x, y, s)
    return ok


def _aeq_ectx_binding(c1: ErasedCtx, c2: ErasedCtx, t1, t2, lf, comp) -> bool:
    h1, e1 = split_erased(c1)
    h2, e2 = split_erased(c2)
    if (h1 is None) != (h2 is None) or len(e1) != len(e2):
        return False
    if h1 is not None and not comp.same(h1, h2):
        return False
    saved = [lf.bind(x, y) for x, y in zip(e1, e2)]
    ok = True if t1 is None else _aeq(t1, t2, lf, comp)
    for (x, y), s in zip(reversed(list(zip(e1, e2))), reversed(saved)):
        lf.unbind(x, y, s)
    return ok


def _aeq_erased_ref(c1: ErasedCtx, c2: ErasedCtx, lf, comp) -> bool:
    """Erased contexts in reference position (weakening domains): entries are
    occurrences, not binders."""
    h1, e1 = split_erased(c1)
    h2, e2 = split_erased(c2)
    if (h1 is None) != (h2 is None) or len(e1) != len(e2):
        return False
    if h1 is not None and not comp.same(h1, h2):
        return False
    return all(lf.same(x, y) for x, y in zip(e1, e2))
