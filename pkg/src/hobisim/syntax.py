"""Terms, sorts and variable bookkeeping for higher-order processes with
name and process parameterization.

Names are plain strings. A lowercase identifier is a name variable when it is
bound by an enclosing name abstraction (or declared free by the caller);
otherwise it is a constant. Process variables start with an uppercase letter.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Union


class SortError(Exception):
    """Raised for ill-sorted terms (bad application, dangling abstraction, ...)."""

    def __init__(self, message: str, term: "Term | None" = None):
        self.term = term
        if term is not None:
            from .parser import print_term

            message = f"{message} in `{print_term(term)}`"
        super().__init__(message)


class _TermBase:
    __slots__ = ()

    def __str__(self) -> str:
        from .parser import print_term

        return print_term(self)


@dataclass(frozen=True, slots=True, repr=False)
class Nil(_TermBase):
    def __repr__(self):
        return "Nil()"


@dataclass(frozen=True, slots=True)
class Var(_TermBase):
    name: str


@dataclass(frozen=True, slots=True)
class Input(_TermBase):
    chan: str
    var: str
    body: Term


@dataclass(frozen=True, slots=True)
class Output(_TermBase):
    chan: str
    payload: Term


@dataclass(frozen=True, slots=True)
class Par(_TermBase):
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class ProcAbs(_TermBase):
    var: str
    body: Term


@dataclass(frozen=True, slots=True)
class ProcApp(_TermBase):
    fun: Term
    arg: Term


@dataclass(frozen=True, slots=True)
class NameAbs(_TermBase):
    var: str
    body: Term


@dataclass(frozen=True, slots=True)
class NameApp(_TermBase):
    fun: Term
    arg: str


Term = Union[Nil, Var, Input, Output, Par, ProcAbs, ProcApp, NameAbs, NameApp]

NIL = Nil()


def par(*terms: Term) -> Term:
    """Left-nested parallel composition; ``par()`` is ``0``."""
    if not terms:
        return NIL
    out = terms[0]
    for t in terms[1:]:
        out = Par(out, t)
    return out


def par_components(t: Term) -> list[Term]:
    """Flatten nested ``Par`` nodes (no other rewriting, zeros are kept)."""
    out: list[Term] = []
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Par):
            stack.append(s.right)
            stack.append(s.left)
        else:
            out.append(s)
    return out


def size(t: Term) -> int:
    """Number of AST constructors in ``t`` (names are not counted)."""
    n = 0
    stack = [t]
    while stack:
        s = stack.pop()
        n += 1
        match s:
            case Input(_, _, b) | Output(_, b) | ProcAbs(_, b) | NameAbs(_, b) | NameApp(b, _):
                stack.append(b)
            case Par(l, r):
                stack.append(l)
                stack.append(r)
            case ProcApp(f, a):
                stack.append(f)
                stack.append(a)
    return n


def spine_head(t: Term) -> str | None:
    """The variable heading an application spine ``X<..><..>``, if any."""
    while isinstance(t, (ProcApp, NameApp)):
        t = t.fun
    return t.name if isinstance(t, Var) else None


def is_abstraction(t: Term) -> bool:
    return isinstance(t, (ProcAbs, NameAbs))


# ---------------------------------------------------------------------------
# variables


def free_pvars(t: Term) -> frozenset[str]:
    match t:
        case Nil():
            return frozenset()
        case Var(x):
            return frozenset((x,))
        case Input(_, x, b) | ProcAbs(x, b):
            return free_pvars(b) - {x}
        case Output(_, b) | NameAbs(_, b) | NameApp(b, _):
            return free_pvars(b)
        case Par(l, r):
            return free_pvars(l) | free_pvars(r)
        case ProcApp(f, a):
            return free_pvars(f) | free_pvars(a)
    raise TypeError(f"not a term: {t!r}")


def free_names(t: Term) -> frozenset[str]:
    """All names occurring free: constants and unbound name variables alike."""
    match t:
        case Nil() | Var():
            return frozenset()
        case Input(c, _, b) | Output(c, b):
            return free_names(b) | {c}
        case NameAbs(x, b):
            return free_names(b) - {x}
        case ProcAbs(_, b):
            return free_names(b)
        case NameApp(f, n):
            return free_names(f) | {n}
        case Par(l, r) | ProcApp(l, r):
            return free_names(l) | free_names(r)
    raise TypeError(f"not a term: {t!r}")


def free_vars(t: Term, names: Iterable[str] = ()) -> tuple[frozenset[str], frozenset[str]]:
    """Free process variables and free name variables of ``t``.

    Which free lowercase identifiers count as name variables (rather than
    constants) is decided by ``names``, the caller's declared free names.
    """
    return free_pvars(t), free_names(t) & frozenset(names)


def all_identifiers(t: Term) -> set[str]:
    """Every identifier in ``t``, bound or free; used to pick fresh ones."""
    out: set[str] = set()
    stack = [t]
    while stack:
        s = stack.pop()
        match s:
            case Var(x):
                out.add(x)
            case Input(c, x, b):
                out.update((c, x))
                stack.append(b)
            case Output(c, b):
                out.add(c)
                stack.append(b)
            case ProcAbs(x, b) | NameAbs(x, b):
                out.add(x)
                stack.append(b)
            case NameApp(f, n):
                out.add(n)
                stack.append(f)
            case Par(l, r) | ProcApp(l, r):
                stack.append(l)
                stack.append(r)
    return out


def fresh(base: str, avoid: Iterable[str]) -> str:
    """``base`` itself if unused, else the first ``base_k`` not in ``avoid``."""
    avoid = avoid if isinstance(avoid, (set, frozenset)) else set(avoid)
    if base not in avoid:
        return base
    stem = base.split("_")[0] or base
    for k in itertools.count(1):
        cand = f"{stem}_{k}"
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# substitution


def subst_proc(t: Term, r: Term, x: str) -> Term:
    """Capture-avoiding ``t{r/x}`` for a process variable ``x``."""
    return _subst_proc(t, r, x, free_pvars(r), free_names(r))


def _subst_proc(t: Term, r: Term, x: str, fpv: frozenset, fnv: frozenset) -> Term:
    match t:
        case Nil():
            return t
        case Var(y):
            return r if y == x else t
        case Input(_, y, b) | ProcAbs(y, b):
            if y == x or x not in free_pvars(b):
                return t
            if y in fpv:
                y2 = fresh(y, fpv | all_identifiers(b) | {x})
                b = _subst_proc(b, Var(y2), y, frozenset((y2,)), frozenset())
                y = y2
            body = _subst_proc(b, r, x, fpv, fnv)
            return Input(t.chan, y, body) if isinstance(t, Input) else ProcAbs(y, body)
        case Output(c, p):
            return Output(c, _subst_proc(p, r, x, fpv, fnv))
        case Par(left, right):
            return Par(_subst_proc(left, r, x, fpv, fnv), _subst_proc(right, r, x, fpv, fnv))
        case NameAbs(y, b):
            if x not in free_pvars(b):
                return t
            if y in fnv:
                y2 = fresh(y, fnv | all_identifiers(b))
                b = _subst_name(b, y2, y)
                y = y2
            return NameAbs(y, _subst_proc(b, r, x, fpv, fnv))
        case ProcApp(f, a):
            return ProcApp(_subst_proc(f, r, x, fpv, fnv), _subst_proc(a, r, x, fpv, fnv))
        case NameApp(f, n):
            return NameApp(_subst_proc(f, r, x, fpv, fnv), n)
    raise TypeError(f"not a term: {t!r}")


def subst_name(t: Term, g: str, m: str) -> Term:
    """Capture-avoiding ``t{g/m}``: free occurrences of the name ``m`` become ``g``."""
    if g == m:
        return t
    return _subst_name(t, g, m)


def _subst_name(t: Term, g: str, m: str) -> Term:
    match t:
        case Nil() | Var():
            return t
        case Input(c, y, b):
            return Input(g if c == m else c, y, _subst_name(b, g, m))
        case Output(c, p):
            return Output(g if c == m else c, _subst_name(p, g, m))
        case Par(left, right):
            return Par(_subst_name(left, g, m), _subst_name(right, g, m))
        case ProcAbs(y, b):
            return ProcAbs(y, _subst_name(b, g, m))
        case ProcApp(f, a):
            return ProcApp(_subst_name(f, g, m), _subst_name(a, g, m))
        case NameAbs(y, b):
            if y == m or m not in free_names(b):
                return t
            if y == g:
                y2 = fresh(y, all_identifiers(b) | {g, m})
                b = _subst_name(b, y2, y)
                y = y2
            return NameAbs(y, _subst_name(b, g, m))
        case NameApp(f, n):
            return NameApp(_subst_name(f, g, m), g if n == m else n)
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# depth and guardedness


def _head_reduce(t: Term) -> Term:
    """Reduce the function position of an application until it is an
    abstraction or a variable-headed spine."""
    match t:
        case ProcApp(f, a):
            f = _head_reduce(f)
            if isinstance(f, ProcAbs):
                return _head_reduce(subst_proc(f.body, a, f.var))
            return ProcApp(f, a)
        case NameApp(f, n):
            f = _head_reduce(f)
            if isinstance(f, NameAbs):
                return _head_reduce(subst_name(f.body, n, f.var))
            return NameApp(f, n)
    return t


def depth(t: Term) -> int:
    """Depth of a term; applications of abstractions count as their reduct."""
    match t:
        case Nil():
            return 0
        case Var():
            return 1
        case Input(_, _, b) | Output(_, b) | ProcAbs(_, b) | NameAbs(_, b):
            return depth(b) + 1
        case Par(left, right):
            return depth(left) + depth(right)
        case ProcApp(f, a):
            f = _head_reduce(f)
            if isinstance(f, ProcAbs):
                return depth(subst_proc(f.body, a, f.var))
            if spine_head(f) is None:
                raise SortError("application of a non-abstraction", t)
            # X<A> has depth(A) + 1; longer spines accumulate argument depths
            return depth(f) + depth(a)
        case NameApp(f, n):
            f = _head_reduce(f)
            if isinstance(f, NameAbs):
                return depth(subst_name(f.body, n, f.var))
            if spine_head(f) is None:
                raise SortError("name application of a non-abstraction", t)
            return depth(f)
    raise TypeError(f"not a term: {t!r}")


def is_guarded(x: str, t: Term) -> bool:
    """True iff every free occurrence of ``x`` in ``t`` sits under an input
    prefix, inside an output, or inside the argument of ``Y<..>`` with ``Y != x``."""
    return _guarded(x, t, False)


def _guarded(x: str, t: Term, under: bool) -> bool:
    match t:
        case Nil():
            return True
        case Var(y):
            return under or y != x
        case Input(c, y, b):
            return y == x or _guarded(x, b, True)
        case Output(c, p):
            return _guarded(x, p, True)
        case Par(left, right):
            return _guarded(x, left, under) and _guarded(x, right, under)
        case ProcAbs(y, b) | NameAbs(y, b):
            return y == x or _guarded(x, b, under)
        case ProcApp(f, a):
            head = spine_head(f)
            arg_under = under or (head is not None and head != x)
            return _guarded(x, f, under) and _guarded(x, a, arg_under)
        case NameApp(f, n):
            head = spine_head(f)
            ok = n != x or under or (head is not None and head != x)
            return ok and _guarded(x, f, under)
    raise TypeError(f"not a term: {t!r}")


def term_is_guarded(t: Term) -> bool:
    return all(is_guarded(x, t) for x in free_pvars(t))


# ---------------------------------------------------------------------------
# sorts


@dataclass(frozen=True, slots=True)
class Proc:
    def __repr__(self):
        return "Proc"


@dataclass(frozen=True, slots=True)
class PAbs:
    arg: "Sort"
    result: "Sort"


@dataclass(frozen=True, slots=True)
class NAbs:
    result: "Sort"
    # payload sort of the abstracted name when it is used as a channel
    chan: "Sort" = Proc()


@dataclass(frozen=True, slots=True)
class SortVar:
    id: int


Sort = Union[Proc, PAbs, NAbs, SortVar]
PROC = Proc()


@dataclass
class SortContext:
    """Sorts of free process variables and payload sorts of channels."""

    procs: dict[str, Sort] = field(default_factory=dict)
    chans: dict[str, Sort] = field(default_factory=dict)
    names: set[str] = field(default_factory=set)


@dataclass
class Typing:
    sort: Sort
    procs: dict[str, Sort]
    chans: dict[str, Sort]


class _Inference:
    def __init__(self, ctx: SortContext | None):
        ctx = ctx or SortContext()
        self.binding: dict[int, Sort] = {}
        self.counter = itertools.count()
        self.procs: dict[str, Sort] = dict(ctx.procs)
        self.chans: dict[str, Sort] = dict(ctx.chans)
        self.free_procs: dict[str, Sort] = dict(ctx.procs)
        self.bound_names: dict[str, list[Sort]] = {}

    def fresh(self) -> SortVar:
        return SortVar(next(self.counter))

    def resolve(self, s: Sort) -> Sort:
        while isinstance(s, SortVar) and s.id in self.binding:
            s = self.binding[s.id]
        return s

    def occurs(self, v: SortVar, s: Sort) -> bool:
        s = self.resolve(s)
        match s:
            case SortVar(i):
                return i == v.id
            case PAbs(a, r):
                return self.occurs(v, a) or self.occurs(v, r)
            case NAbs(r, c):
                return self.occurs(v, r) or self.occurs(v, c)
        return False

    def unify(self, s: Sort, t: Sort, where: Term) -> None:
        s, t = self.resolve(s), self.resolve(t)
        if s == t:
            return
        if isinstance(s, SortVar) or isinstance(t, SortVar):
            v, other = (s, t) if isinstance(s, SortVar) else (t, s)
            if self.occurs(v, other):
                raise SortError("cyclic sort (self-application)", where)
            self.binding[v.id] = other
            return
        match s, t:
            case PAbs(a1, r1), PAbs(a2, r2):
                self.unify(a1, a2, where)
                self.unify(r1, r2, where)
                return
            case NAbs(r1, c1), NAbs(r2, c2):
                self.unify(r1, r2, where)
                self.unify(c1, c2, where)
                return
        raise SortError(f"sort mismatch: {self.show(s)} vs {self.show(t)}", where)

    def chan(self, name: str) -> Sort:
        stack = self.bound_names.get(name)
        if stack:
            return stack[-1]
        if name not in self.chans:
            self.chans[name] = self.fresh()
        return self.chans[name]

    def infer(self, t: Term) -> Sort:
        match t:
            case Nil():
                return PROC
            case Var(x):
                if x not in self.procs:
                    s = self.fresh()
                    self.procs[x] = s
                    self.free_procs[x] = s
                return self.procs[x]
            case Input(c, x, b):
                payload = self.chan(c)
                self._scoped_proc(x, payload, lambda: self.unify(self.infer(b), PROC, b))
                return PROC
            case Output(c, p):
                self.unify(self.chan(c), self.infer(p), t)
                return PROC
            case Par(left, right):
                self.unify(self.infer(left), PROC, left)
                self.unify(self.infer(right), PROC, right)
                return PROC
            case ProcAbs(x, b):
                arg = self.fresh()
                res: list[Sort] = []
                self._scoped_proc(x, arg, lambda: res.append(self.infer(b)))
                return PAbs(arg, res[0])
            case ProcApp(f, a):
                fs = self.infer(f)
                res = self.fresh()
                self.unify(fs, PAbs(self.infer(a), res), t)
                return res
            case NameAbs(x, b):
                payload = self.fresh()
                self.bound_names.setdefault(x, []).append(payload)
                try:
                    body = self.infer(b)
                finally:
                    self.bound_names[x].pop()
                return NAbs(body, payload)
            case NameApp(f, n):
                fs = self.infer(f)
                res = self.fresh()
                self.unify(fs, NAbs(res, self.chan(n)), t)
                return res
        raise TypeError(f"not a term: {t!r}")

    def _scoped_proc(self, x: str, s: Sort, k) -> None:
        missing = object()
        old = self.procs.get(x, missing)
        self.procs[x] = s
        try:
            k()
        finally:
            if old is missing:
                del self.procs[x]
            else:
                self.procs[x] = old

    def zonk(self, s: Sort) -> Sort:
        """Fully resolve ``s``; unconstrained sort variables default to ``Proc``."""
        s = self.resolve(s)
        match s:
            case SortVar():
                return PROC
            case PAbs(a, r):
                return PAbs(self.zonk(a), self.zonk(r))
            case NAbs(r, c):
                return NAbs(self.zonk(r), self.zonk(c))
        return s

    def show(self, s: Sort) -> str:
        return format_sort(self.zonk(s))


def infer_sorts(
    terms: Iterable[Term], ctx: SortContext | None = None, share_channels: bool = False
) -> list[Typing]:
    """Sort-check several terms under one shared context.

    Free process variables get one sort across all terms. Channel payload
    sorts are per term unless ``share_channels`` is set: two terms being
    compared need not use a channel at the same sort.
    """
    inf = _Inference(ctx)
    base = dict(inf.chans)
    raw, tables = [], []
    for t in terms:
        if not share_channels:
            inf.chans = dict(base)
        raw.append(inf.infer(t))
        tables.append(inf.chans)
    procs = {k: inf.zonk(v) for k, v in inf.free_procs.items()}
    return [
        Typing(inf.zonk(s), procs, {k: inf.zonk(v) for k, v in chans.items()})
        for s, chans in zip(raw, tables)
    ]


def sort_check(t: Term, ctx: SortContext | None = None) -> Sort:
    """The sort of ``t``; raises :class:`SortError` if ``t`` is ill-sorted."""
    return infer_sorts([t], ctx)[0].sort


def format_sort(s: Sort) -> str:
    match s:
        case Proc():
            return "proc"
        case PAbs(a, r):
            arg = format_sort(a)
            if not isinstance(a, Proc):
                arg = f"({arg})"
            return f"{arg}->{format_sort(r)}"
        case NAbs(r, _):
            return f"name->{format_sort(r)}"
        case SortVar(i):
            return f"?{i}"
    raise TypeError(s)


def parse_sort(text: str) -> Sort:
    """Inverse of :func:`format_sort`: ``proc``, ``proc->proc``, ``name->proc``, ``(proc->proc)->proc``."""
    toks = text.replace("->", " -> ").replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def expect(tok: str) -> None:
        nonlocal pos
        if pos >= len(toks) or toks[pos] != tok:
            raise ValueError(f"bad sort {text!r}: expected {tok!r}")
        pos += 1

    def sort() -> Sort:
        nonlocal pos
        if pos >= len(toks):
            raise ValueError(f"bad sort {text!r}")
        tok = toks[pos]
        if tok == "name":
            pos += 1
            expect("->")
            return NAbs(sort())
        if tok == "(":
            pos += 1
            base = sort()
            expect(")")
        elif tok == "proc":
            pos += 1
            base = PROC
        else:
            raise ValueError(f"bad sort {text!r}: unexpected {tok!r}")
        if pos < len(toks) and toks[pos] == "->":
            pos += 1
            return PAbs(base, sort())
        return base

    out = sort()
    if pos != len(toks):
        raise ValueError(f"bad sort {text!r}: trailing input")
    return out
