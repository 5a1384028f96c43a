"""Term generators for differential testing and benchmarks.

Random terms are well-sorted by construction against a fixed channel table:

    a, b : proc          c : proc -> proc          d : name -> proc

Names bound by a name abstraction are used as channels carrying processes.
"""

from __future__ import annotations

import random
from functools import lru_cache

from .syntax import (
    NIL,
    PROC,
    Input,
    NAbs,
    NameAbs,
    NameApp,
    Nil,
    Output,
    PAbs,
    Par,
    ProcAbs,
    ProcApp,
    SortContext,
    SortError,
    Term,
    Var,
    all_identifiers,
    fresh,
    free_names,
    par_components,
    size,
    sort_check,
    subst_name,
    subst_proc,
)

PROC_ABS_SORT = PAbs(PROC, PROC)
NAME_ABS_SORT = NAbs(PROC)
CHANNELS = {"a": PROC, "b": PROC, "c": PROC_ABS_SORT, "d": NAME_ABS_SORT}
PROC_CHANNELS = ("a", "b")


def channel_context(**procs) -> SortContext:
    """Sort context matching the random generator's channel table."""
    return SortContext(procs=dict(procs), chans=dict(CHANNELS))


class TermGen:
    """Random well-sorted terms of roughly a requested size."""

    def __init__(self, rng: random.Random, free: dict[str, object] | None = None, abstractions: bool = True):
        self.rng = rng
        self.free = dict(free or {})
        self.abstractions = abstractions

    # scope: list of (var, sort) for process variables, names: bound name variables
    def proc(self, budget: int, scope=None, names=()) -> Term:
        scope = list(self.free.items()) + list(scope or [])
        return self._proc(budget, scope, tuple(names))

    def _vars(self, scope, sort):
        seen, out = set(), []
        for x, s in reversed(scope):
            if x not in seen:
                seen.add(x)
                if s == sort:
                    out.append(x)
        return out

    def _binder(self, scope, stem: str) -> str:
        # occasionally shadow an outer binder to exercise alpha-renaming
        taken = {x for x, _ in scope}
        if taken and self.rng.random() < 0.15:
            cands = [x for x in taken if x[0] == stem[0] and x not in self.free]
            if cands:
                return self.rng.choice(sorted(cands))
        return fresh(stem, taken | set(self.free))

    def _proc(self, budget: int, scope, names) -> Term:
        rng = self.rng
        leaves = self._vars(scope, PROC)
        if budget <= 1:
            return Var(rng.choice(leaves)) if leaves and rng.random() < 0.5 else NIL
        chans = list(PROC_CHANNELS) + list(names)
        kinds = ["in", "in", "out", "out", "par", "par", "par"]
        if self.abstractions:
            kinds += ["papp", "napp", "in_hi", "out_hi"]
            if self._vars(scope, PROC_ABS_SORT):
                kinds.append("var_app")
            if self._vars(scope, NAME_ABS_SORT):
                kinds.append("var_napp")
        kind = rng.choice(kinds)
        if kind == "in":
            x = self._binder(scope, "X")
            return Input(rng.choice(chans), x, self._proc(budget - 1, scope + [(x, PROC)], names))
        if kind == "out":
            return Output(rng.choice(chans), self._proc(budget - 1, scope, names))
        if kind == "par":
            k = rng.randint(1, budget - 1)
            return Par(self._proc(k, scope, names), self._proc(budget - k, scope, names))
        if kind == "in_hi":
            c = rng.choice("cd")
            x = self._binder(scope, "F")
            return Input(c, x, self._proc(budget - 1, scope + [(x, CHANNELS[c])], names))
        if kind == "out_hi":
            c = rng.choice("cd")
            payload = self._pabs(budget - 1, scope, names) if c == "c" else self._nabs(budget - 1, scope, names)
            return Output(c, payload)
        if kind == "papp":
            k = rng.randint(1, max(1, budget - 2))
            return ProcApp(self._pabs(k + 1, scope, names, literal=True), self._proc(max(1, budget - 1 - k), scope, names))
        if kind == "napp":
            return NameApp(self._nabs(budget - 1, scope, names, literal=True), rng.choice(chans))
        if kind == "var_app":
            f = rng.choice(self._vars(scope, PROC_ABS_SORT))
            return ProcApp(Var(f), self._proc(budget - 1, scope, names))
        f = rng.choice(self._vars(scope, NAME_ABS_SORT))
        return NameApp(Var(f), rng.choice(chans))

    def _pabs(self, budget: int, scope, names, literal: bool = False) -> Term:
        vars_ = self._vars(scope, PROC_ABS_SORT)
        if vars_ and not literal and self.rng.random() < 0.3:
            return Var(self.rng.choice(vars_))
        x = self._binder(scope, "Y")
        return ProcAbs(x, self._proc(max(budget - 1, 1), scope + [(x, PROC)], names))

    def _nabs(self, budget: int, scope, names, literal: bool = False) -> Term:
        vars_ = self._vars(scope, NAME_ABS_SORT)
        if vars_ and not literal and self.rng.random() < 0.3:
            return Var(self.rng.choice(vars_))
        taken = set(names) | set(CHANNELS)
        y = fresh("y", taken)
        return NameAbs(y, self._proc(max(budget - 1, 1), scope, names + (y,)))


def random_term(rng: random.Random, budget: int = 8, free=None, abstractions: bool = True) -> Term:
    return TermGen(rng, free, abstractions).proc(budget)


def random_closed(rng: random.Random, budget: int = 8) -> Term:
    return TermGen(rng, {}, True).proc(budget)


# ---------------------------------------------------------------------------
# exhaustive small terms


def enumerate_terms(max_nodes: int = 6, free: tuple[str, ...] = ("X",), channels=("a", "b"), max_abs: int = 1) -> list[Term]:
    """Every well-sorted term with at most ``max_nodes`` constructors.

    Binders are named by nesting level, so each alpha-class appears once.
    Channels are drawn from ``channels`` and names bound by an abstraction;
    the free process variables have sort ``proc``. At most ``max_abs``
    abstraction nodes occur in a term.
    """
    ctx = SortContext(procs={x: PROC for x in free})
    out = []
    for n in range(1, max_nodes + 1):
        for t in _enum(n, tuple(free), (), tuple(channels), 0, max_abs):
            try:
                sort_check(t, ctx)
            except SortError:
                continue
            out.append(t)
    return out


@lru_cache(maxsize=None)
def _enum(n: int, pvars: tuple, nvars: tuple, consts: tuple, level: int, abs_left: int) -> tuple:
    if n == 1:
        return (NIL, *(Var(x) for x in pvars))
    out = []
    chans = consts + nvars
    y = f"Y{level + 1}"
    body_p = _enum(n - 1, pvars + (y,), nvars, consts, level + 1, abs_left)
    for c in chans:
        out.extend(Input(c, y, b) for b in body_p)
    same = _enum(n - 1, pvars, nvars, consts, level, abs_left)
    for c in chans:
        out.extend(Output(c, p) for p in same)
    if abs_left:
        out.extend(ProcAbs(y, b) for b in _enum(n - 1, pvars + (y,), nvars, consts, level + 1, abs_left - 1))
        z = f"y{level + 1}"
        out.extend(NameAbs(z, b) for b in _enum(n - 1, pvars, nvars + (z,), consts, level + 1, abs_left - 1))
    for c in chans:
        out.extend(NameApp(f, c) for f in same if _app_head(f))
    for k in range(1, n - 1):
        for spent in range(abs_left + 1):
            lefts = _exact_abs(k, pvars, nvars, consts, level, spent)
            rights = _enum(n - 1 - k, pvars, nvars, consts, level, abs_left - spent)
            out.extend(Par(l, r) for l in lefts for r in rights)
            out.extend(ProcApp(l, r) for l in lefts if _app_head(l) for r in rights)
    return tuple(out)


def _app_head(f: Term) -> bool:
    return isinstance(f, (Var, ProcAbs, NameAbs, ProcApp, NameApp))


def _exact_abs(n, pvars, nvars, consts, level, k) -> tuple:
    return tuple(t for t in _enum(n, pvars, nvars, consts, level, k) if _abs_count(t) == k)


def _abs_count(t: Term) -> int:
    stack, k = [t], 0
    while stack:
        s = stack.pop()
        match s:
            case ProcAbs(_, b) | NameAbs(_, b):
                k += 1
                stack.append(b)
            case Input(_, _, b) | Output(_, b) | NameApp(b, _):
                stack.append(b)
            case Par(l, r) | ProcApp(l, r):
                stack += [l, r]
    return k


# ---------------------------------------------------------------------------
# bisimilarity-preserving rewrites


def dis_lhs(chan: str, var: str, body: Term, k: int) -> Term:
    """``chan(var).(body | chan(var).body | ...)`` with ``k - 1`` inner copies."""
    inner = [Input(chan, var, body) for _ in range(k - 1)]
    return Input(chan, var, _compose([body, *inner]))


def dis_rhs(chan: str, var: str, body: Term, k: int) -> Term:
    return _compose([Input(chan, var, body) for _ in range(k)])


def _compose(terms: list[Term]) -> Term:
    if not terms:
        return NIL
    out = terms[-1]
    for t in reversed(terms[:-1]):
        out = Par(t, out)
    return out


def balanced_par(terms: list[Term]) -> Term:
    """Parallel composition as a balanced tree (keeps recursion shallow)."""
    if not terms:
        return NIL
    while len(terms) > 1:
        nxt = [Par(terms[i], terms[i + 1]) for i in range(0, len(terms) - 1, 2)]
        if len(terms) % 2:
            nxt.append(terms[-1])
        terms = nxt
    return terms[0]


def bisimilar_variant(rng: random.Random, t: Term, steps: int = 3) -> Term:
    """A term bisimilar to ``t`` obtained by random law applications."""
    for _ in range(steps):
        t = _rewrite_somewhere(rng, t)
    return t


def _rewrite_somewhere(rng: random.Random, t: Term) -> Term:
    match t:
        case Input(c, x, b) if rng.random() < 0.5:
            return Input(c, x, _rewrite_somewhere(rng, b))
        case Output(c, p) if rng.random() < 0.5:
            return Output(c, _rewrite_somewhere(rng, p))
        case Par(left, right) if rng.random() < 0.5:
            if rng.random() < 0.5:
                return Par(_rewrite_somewhere(rng, left), right)
            return Par(left, _rewrite_somewhere(rng, right))
        case ProcAbs(x, b) if rng.random() < 0.5:
            return ProcAbs(x, _rewrite_somewhere(rng, b))
        case NameAbs(x, b) if rng.random() < 0.5:
            return NameAbs(x, _rewrite_somewhere(rng, b))
    return _rewrite_here(rng, t)


def _rewrite_here(rng: random.Random, t: Term) -> Term:
    from .semantics import beta_normalize

    # an applied abstraction may itself reduce to an abstraction
    is_proc = not isinstance(beta_normalize(t), (ProcAbs, NameAbs))
    options = ["alpha", "beta", "name_beta"]
    if is_proc:
        options += ["zero", "shuffle", "dis", "identity"]
    avoid = all_identifiers(t) | set(CHANNELS)
    match rng.choice(options):
        case "zero":
            return Par(t, NIL) if rng.random() < 0.5 else Par(NIL, t)
        case "shuffle":
            comps = par_components(t)
            rng.shuffle(comps)
            return _compose(comps)
        case "dis":
            return _dis_step(t)
        case "identity":
            z = fresh("Z", avoid)
            return ProcApp(ProcAbs(z, Var(z)), t)
        case "beta":
            # vacuous abstraction applied to 0
            return ProcApp(ProcAbs(fresh("Z", avoid), t), NIL)
        case "name_beta":
            names = sorted(free_names(t))
            if not names:
                return _alpha(t)
            m = rng.choice(names)
            z = fresh("z", avoid)
            return NameApp(NameAbs(z, subst_name(t, z, m)), m)
    return _alpha(t)


def _alpha(t: Term) -> Term:
    match t:
        case Input(c, x, b):
            y = fresh(x + "r", all_identifiers(b))
            return Input(c, y, subst_proc(b, Var(y), x))
        case ProcAbs(x, b):
            y = fresh(x + "r", all_identifiers(b))
            return ProcAbs(y, subst_proc(b, Var(y), x))
        case NameAbs(x, b):
            y = fresh(x + "r", all_identifiers(b) | set(CHANNELS))
            return NameAbs(y, subst_name(b, y, x))
    return t


def _dis_step(t: Term) -> Term:
    """Fold two alpha-equal input components into a distribution-law redex."""
    from .semantics import canonical_key

    comps = par_components(t)
    seen: dict[tuple, int] = {}
    for i, c in enumerate(comps):
        if not isinstance(c, Input):
            continue
        key = canonical_key(c)
        if key in seen:
            j = seen[key]
            rest = [d for k, d in enumerate(comps) if k not in (i, j)]
            return _compose([dis_lhs(c.chan, c.var, c.body, 2), *rest])
        seen[key] = i
    # a single input a(X).P becomes a(X).P with P's zero-padding, still bisimilar
    return t


# ---------------------------------------------------------------------------
# benchmark synthesis


def bench_pair(n: int, rng: random.Random | None = None) -> tuple[Term, Term]:
    """Two bisimilar closed terms; the left one has about ``n`` tree nodes.

    The left term is a balanced parallel composition of distribution-law and
    application redex blocks over distinct channels; the right term lists the
    same blocks already rewritten, in shuffled order.
    """
    from .normalizer import NodeTable, to_tree, tree_size

    rng = rng or random.Random(0)
    scratch = NodeTable()
    lhs, rhs = [], []
    total = 0
    i = 0
    while total < n:
        i += 1
        a, b = f"a{i}", f"b{i}"
        payload = Output(b, NIL)
        if i % 2:
            k = 2 + i % 3
            lhs.append(dis_lhs(a, "X", payload, k))
            rhs.extend(Input(a, "X", payload) for _ in range(k))
        else:
            lhs.append(ProcApp(ProcAbs("X", Par(Var("X"), Par(Input(a, "Z", Var("X")), Var("X")))), payload))
            rhs.extend([payload, Input(a, "Z", payload), payload])
        total += tree_size(to_tree(lhs[-1], scratch))
    rng.shuffle(rhs)
    return balanced_par(lhs), balanced_par(rhs)


__all__ = [
    "CHANNELS",
    "TermGen",
    "balanced_par",
    "bench_pair",
    "bisimilar_variant",
    "channel_context",
    "dis_lhs",
    "dis_rhs",
    "enumerate_terms",
    "random_closed",
    "random_term",
]
