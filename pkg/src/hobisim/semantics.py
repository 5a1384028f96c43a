"""Structural congruence and the labelled transition system.

Structural congruence is decided by canonicalization: reduce every
application of an explicit abstraction, flatten parallel composition, drop
``0`` components and compare the resulting multisets up to alpha-renaming.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .syntax import (
    NIL,
    Input,
    NameAbs,
    NameApp,
    Nil,
    Output,
    Par,
    ProcAbs,
    ProcApp,
    SortError,
    Term,
    Var,
    all_identifiers,
    free_pvars,
    fresh,
    par,
    par_components,
    spine_head,
    subst_name,
    subst_proc,
)


def beta_normalize(t: Term) -> Term:
    """Apply the two application laws left to right everywhere."""
    match t:
        case Nil() | Var():
            return t
        case Input(c, x, b):
            return Input(c, x, beta_normalize(b))
        case Output(c, p):
            return Output(c, beta_normalize(p))
        case Par(left, right):
            return Par(beta_normalize(left), beta_normalize(right))
        case ProcAbs(x, b):
            return ProcAbs(x, beta_normalize(b))
        case NameAbs(x, b):
            return NameAbs(x, beta_normalize(b))
        case ProcApp(f, a):
            f, a = beta_normalize(f), beta_normalize(a)
            if isinstance(f, ProcAbs):
                return beta_normalize(subst_proc(f.body, a, f.var))
            if spine_head(f) is None:
                raise SortError("application of a non-abstraction", t)
            return ProcApp(f, a)
        case NameApp(f, n):
            f = beta_normalize(f)
            if isinstance(f, NameAbs):
                return beta_normalize(subst_name(f.body, n, f.var))
            if spine_head(f) is None:
                raise SortError("name application of a non-abstraction", t)
            return NameApp(f, n)
    raise TypeError(f"not a term: {t!r}")


def compose(terms) -> Term:
    """Left-nested parallel composition of ``terms``, or ``0`` when empty."""
    return par(*terms)


# ---------------------------------------------------------------------------
# canonical keys: De Bruijn levels for binders, sorted multisets for Par


def canonical_key(t: Term) -> tuple:
    """Hashable key with ``canonical_key(p) == canonical_key(q)`` iff ``p`` and
    ``q`` are structurally congruent."""
    return _key(beta_normalize(t), {}, 0)


def _key(t: Term, env: dict[str, int], lvl: int) -> tuple:
    match t:
        case Par() | Nil():
            keys = [_key(c, env, lvl) for c in par_components(t) if not isinstance(c, Nil)]
            if not keys:
                return ("0",)
            if len(keys) == 1:
                return keys[0]
            keys.sort()
            return ("|", tuple(keys))
        case Var(x):
            return ("v", lvl - env[x]) if x in env else ("V", x)
        case Input(c, x, b):
            return ("i", _chan(c, env, lvl), _bind(b, x, env, lvl))
        case Output(c, p):
            return ("o", _chan(c, env, lvl), _key(p, env, lvl))
        case ProcAbs(x, b):
            return ("P", _bind(b, x, env, lvl))
        case NameAbs(x, b):
            return ("N", _bind(b, x, env, lvl))
        case ProcApp(f, a):
            return ("@", _key(f, env, lvl), _key(a, env, lvl))
        case NameApp(f, n):
            return ("@n", _key(f, env, lvl), _chan(n, env, lvl))
    raise TypeError(f"not a term: {t!r}")


def _chan(n: str, env: dict[str, int], lvl: int) -> tuple:
    return ("b", lvl - env[n]) if n in env else ("f", n)


def _bind(b: Term, x: str, env: dict[str, int], lvl: int) -> tuple:
    missing = object()
    old = env.get(x, missing)
    env[x] = lvl + 1
    try:
        return _key(b, env, lvl + 1)
    finally:
        if old is missing:
            del env[x]
        else:
            env[x] = old


@dataclass(frozen=True, eq=False)
class CanonicalForm:
    """Multiset of parallel components: no ``0``, no ``Par``, no redex.

    Components are kept sorted by their canonical key; equality is by key.
    """

    components: tuple[Term, ...]
    keys: tuple[tuple, ...]

    @property
    def key(self) -> tuple:
        if not self.keys:
            return ("0",)
        if len(self.keys) == 1:
            return self.keys[0]
        return ("|", self.keys)

    def term(self) -> Term:
        return compose(self.components)

    def __eq__(self, other):
        return isinstance(other, CanonicalForm) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __len__(self):
        return len(self.components)


def _form(comps: list[Term]) -> CanonicalForm:
    keyed = sorted(((_key(c, {}, 0), c) for c in comps), key=lambda kc: kc[0])
    return CanonicalForm(tuple(c for _, c in keyed), tuple(k for k, _ in keyed))


def canonicalize(t: Term) -> CanonicalForm:
    comps = [c for c in par_components(beta_normalize(t)) if not isinstance(c, Nil)]
    return _form(comps)


def struct_congruent(p: Term, q: Term) -> bool:
    return canonical_key(p) == canonical_key(q)


# ---------------------------------------------------------------------------
# transitions


@dataclass(frozen=True)
class In:
    chan: str
    var: str

    def __str__(self):
        return f"{self.chan}({self.var})"


@dataclass(frozen=True)
class Out:
    chan: str
    payload: Term

    def __str__(self):
        return f"{self.chan}!({self.payload})"


@dataclass(frozen=True)
class Tau:
    def __str__(self):
        return "tau"


Action = Union[In, Out, Tau]


def _fresh_input(c: Input, rest: list[Term]) -> Input:
    """Rename the bound variable of ``c`` away from the free variables of ``rest``."""
    busy = set().union(*(free_pvars(r) for r in rest)) if rest else set()
    if c.var not in busy:
        return c
    x = fresh(c.var, busy | all_identifiers(c.body))
    return Input(c.chan, x, subst_proc(c.body, Var(x), c.var))


def transitions(t: Term | CanonicalForm) -> list[tuple[Action, Term]]:
    """All one-step transitions of ``t`` up to structural congruence.

    Input transitions are late: the target keeps the bound variable free.
    Targets are returned in canonical (sorted, redex-free) form.
    """
    comps = list(t.components if isinstance(t, CanonicalForm) else canonicalize(t).components)
    out: list[tuple[Action, Term]] = []
    seen: set = set()

    def emit(action: Action, target: Term, key) -> None:
        if key not in seen:
            seen.add(key)
            out.append((action, target))

    for i, c in enumerate(comps):
        rest = comps[:i] + comps[i + 1 :]
        if isinstance(c, Input):
            c = _fresh_input(c, rest)
            target = canonicalize(compose([c.body, *rest])).term()
            emit(In(c.chan, c.var), target, ("in", canonical_key(Input(c.chan, c.var, target))))
        elif isinstance(c, Output):
            target = compose(rest)
            emit(Out(c.chan, c.payload), target, ("out", c.chan, canonical_key(c.payload), canonical_key(target)))
    for i, o in enumerate(comps):
        if not isinstance(o, Output):
            continue
        for j, r in enumerate(comps):
            if j == i or not isinstance(r, Input) or r.chan != o.chan:
                continue
            rest = [c for k, c in enumerate(comps) if k not in (i, j)]
            received = subst_proc(r.body, o.payload, r.var)
            form = canonicalize(compose([received, *rest]))
            emit(Tau(), form.term(), ("tau", form.key))
    return out


def open_decompositions(t: Term | CanonicalForm):
    """Top-level open components of ``t`` with their parallel remainders.

    Returns three lists: ``(X, rest)`` for bare variables, ``(F, A, rest)``
    for process applications ``F<A>`` and ``(F, n, rest)`` for name
    applications ``F<n>``, where ``F`` is a variable-headed term (usually just
    ``Var(X)``).
    """
    comps = list(t.components if isinstance(t, CanonicalForm) else canonicalize(t).components)
    bare, apps, napps = [], [], []
    for i, c in enumerate(comps):
        rest = compose(comps[:i] + comps[i + 1 :])
        match c:
            case Var(x):
                bare.append((x, rest))
            case ProcApp(f, a):
                apps.append((f, a, rest))
            case NameApp(f, n):
                napps.append((f, n, rest))
    return bare, apps, napps
