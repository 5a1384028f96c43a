"""Naive reference implementations used to cross-check the library.

Everything here is written from the definitions directly, favouring
obviousness over speed: substitution renames every binder apart first,
beta-reduction contracts one redex at a time, alpha-equivalence goes through
a separate De Bruijn encoding.
"""

from __future__ import annotations

import itertools

from hobisim.syntax import (
    Input,
    NameAbs,
    NameApp,
    Nil,
    Output,
    Par,
    ProcAbs,
    ProcApp,
    Term,
    Var,
)

_counter = itertools.count()


def _fresh() -> str:
    return f"Ref_{next(_counter)}"


def _fresh_name() -> str:
    return f"ref_{next(_counter)}"


# ---------------------------------------------------------------------------
# alpha-equivalence through De Bruijn indices


def _lookup(env: tuple, kind: str, x: str):
    for i, (k, y) in enumerate(env):
        if k == kind and y == x:
            return ("#", i)
    return ("free", x)


def debruijn(t: Term, env: tuple = ()) -> tuple:
    match t:
        case Nil():
            return ("0",)
        case Var(x):
            return ("var", _lookup(env, "p", x))
        case Input(c, x, b):
            return ("in", _lookup(env, "n", c), debruijn(b, (("p", x),) + env))
        case Output(c, p):
            return ("out", _lookup(env, "n", c), debruijn(p, env))
        case Par(left, right):
            return ("par", debruijn(left, env), debruijn(right, env))
        case ProcAbs(x, b):
            return ("pabs", debruijn(b, (("p", x),) + env))
        case NameAbs(x, b):
            return ("nabs", debruijn(b, (("n", x),) + env))
        case ProcApp(f, a):
            return ("app", debruijn(f, env), debruijn(a, env))
        case NameApp(f, n):
            return ("napp", debruijn(f, env), _lookup(env, "n", n))
    raise TypeError(t)


def alpha_equal(s: Term, t: Term) -> bool:
    return debruijn(s) == debruijn(t)


# ---------------------------------------------------------------------------
# free identifiers


def free_pvars(t: Term, bound: frozenset = frozenset()) -> set[str]:
    match t:
        case Nil():
            return set()
        case Var(x):
            return set() if x in bound else {x}
        case Input(_, x, b) | ProcAbs(x, b):
            return free_pvars(b, bound | {x})
        case Output(_, b) | NameAbs(_, b) | NameApp(b, _):
            return free_pvars(b, bound)
        case Par(left, right) | ProcApp(left, right):
            return free_pvars(left, bound) | free_pvars(right, bound)
    raise TypeError(t)


def free_names(t: Term, bound: frozenset = frozenset()) -> set[str]:
    match t:
        case Nil() | Var():
            return set()
        case Input(c, _, b) | Output(c, b):
            return ({c} - bound) | free_names(b, bound)
        case ProcAbs(_, b):
            return free_names(b, bound)
        case NameAbs(x, b):
            return free_names(b, bound | {x})
        case Par(left, right) | ProcApp(left, right):
            return free_names(left, bound) | free_names(right, bound)
        case NameApp(f, n):
            return ({n} - bound) | free_names(f, bound)
    raise TypeError(t)


# ---------------------------------------------------------------------------
# substitution: rename every binder apart, then replace textually


def rename_apart(t: Term, pmap: dict | None = None, nmap: dict | None = None) -> Term:
    pmap, nmap = pmap or {}, nmap or {}
    match t:
        case Nil():
            return t
        case Var(x):
            return Var(pmap.get(x, x))
        case Input(c, x, b):
            y = _fresh()
            return Input(nmap.get(c, c), y, rename_apart(b, {**pmap, x: y}, nmap))
        case Output(c, p):
            return Output(nmap.get(c, c), rename_apart(p, pmap, nmap))
        case Par(left, right):
            return Par(rename_apart(left, pmap, nmap), rename_apart(right, pmap, nmap))
        case ProcAbs(x, b):
            y = _fresh()
            return ProcAbs(y, rename_apart(b, {**pmap, x: y}, nmap))
        case NameAbs(x, b):
            y = _fresh_name()
            return NameAbs(y, rename_apart(b, pmap, {**nmap, x: y}))
        case ProcApp(f, a):
            return ProcApp(rename_apart(f, pmap, nmap), rename_apart(a, pmap, nmap))
        case NameApp(f, n):
            return NameApp(rename_apart(f, pmap, nmap), nmap.get(n, n))
    raise TypeError(t)


def _replace(t: Term, x: str, r: Term) -> Term:
    match t:
        case Var(y):
            return r if y == x else t
        case Nil():
            return t
        case Input(c, y, b):
            return Input(c, y, _replace(b, x, r))
        case Output(c, p):
            return Output(c, _replace(p, x, r))
        case Par(left, right):
            return Par(_replace(left, x, r), _replace(right, x, r))
        case ProcAbs(y, b):
            return ProcAbs(y, _replace(b, x, r))
        case NameAbs(y, b):
            return NameAbs(y, _replace(b, x, r))
        case ProcApp(f, a):
            return ProcApp(_replace(f, x, r), _replace(a, x, r))
        case NameApp(f, n):
            return NameApp(_replace(f, x, r), n)
    raise TypeError(t)


def _replace_name(t: Term, m: str, g: str) -> Term:
    sw = lambda c: g if c == m else c  # noqa: E731
    match t:
        case Var() | Nil():
            return t
        case Input(c, y, b):
            return Input(sw(c), y, _replace_name(b, m, g))
        case Output(c, p):
            return Output(sw(c), _replace_name(p, m, g))
        case Par(left, right):
            return Par(_replace_name(left, m, g), _replace_name(right, m, g))
        case ProcAbs(y, b):
            return ProcAbs(y, _replace_name(b, m, g))
        case NameAbs(y, b):
            return NameAbs(y, _replace_name(b, m, g))
        case ProcApp(f, a):
            return ProcApp(_replace_name(f, m, g), _replace_name(a, m, g))
        case NameApp(f, n):
            return NameApp(_replace_name(f, m, g), sw(n))
    raise TypeError(t)


def subst_proc(t: Term, r: Term, x: str) -> Term:
    """``t{r/x}``: after renaming apart, bound names are globally fresh, so
    plain replacement cannot capture."""
    return _replace(rename_apart(t), x, r)


def subst_name(t: Term, g: str, m: str) -> Term:
    return _replace_name(rename_apart(t), m, g)


# ---------------------------------------------------------------------------
# beta-reduction, one redex at a time


def _step(t: Term) -> Term | None:
    match t:
        case ProcApp(ProcAbs(x, b), a):
            return subst_proc(b, a, x)
        case NameApp(NameAbs(x, b), n):
            return subst_name(b, n, x)
    for i, child in enumerate(_children(t)):
        s = _step(child)
        if s is not None:
            return _with_child(t, i, s)
    return None


def _children(t: Term) -> tuple:
    match t:
        case Input(_, _, b) | Output(_, b) | ProcAbs(_, b) | NameAbs(_, b) | NameApp(b, _):
            return (b,)
        case Par(left, right) | ProcApp(left, right):
            return (left, right)
    return ()


def _with_child(t: Term, i: int, s: Term) -> Term:
    match t:
        case Input(c, x, _):
            return Input(c, x, s)
        case Output(c, _):
            return Output(c, s)
        case ProcAbs(x, _):
            return ProcAbs(x, s)
        case NameAbs(x, _):
            return NameAbs(x, s)
        case NameApp(_, n):
            return NameApp(s, n)
        case Par(left, right):
            return Par(s, right) if i == 0 else Par(left, s)
        case ProcApp(f, a):
            return ProcApp(s, a) if i == 0 else ProcApp(f, s)
    raise TypeError(t)


def beta(t: Term, limit: int = 10_000) -> Term:
    for _ in range(limit):
        s = _step(t)
        if s is None:
            return t
        t = s
    raise RuntimeError("beta-reduction did not terminate")


# ---------------------------------------------------------------------------
# depth, straight from the defining table (on the beta-normal form)


def depth(t: Term) -> int:
    return _depth(beta(t))


def _depth(t: Term) -> int:
    match t:
        case Nil():
            return 0
        case Var():
            return 1
        case Input(_, _, b) | Output(_, b) | ProcAbs(_, b) | NameAbs(_, b):
            return _depth(b) + 1
        case Par(left, right):
            return _depth(left) + _depth(right)
        case ProcApp(f, a):
            # variable-headed spine: X<A> is depth(A) + 1, X<n> is 1
            return _depth(f) + _depth(a)
        case NameApp(f, _):
            return _depth(f)
    raise TypeError(t)


# ---------------------------------------------------------------------------
# guardedness by enumerating occurrences


def occurrences(t: Term, x: str, path: tuple = ()) -> list[tuple]:
    """Context paths of the free occurrences of process variable ``x``."""
    match t:
        case Var(y):
            return [path] if y == x else []
        case Nil():
            return []
        case Input(_, y, b):
            return [] if y == x else occurrences(b, x, path + ("input",))
        case Output(_, p):
            return occurrences(p, x, path + ("output",))
        case Par(left, right):
            return occurrences(left, x, path + ("par",)) + occurrences(right, x, path + ("par",))
        case ProcAbs(y, b):
            return [] if y == x else occurrences(b, x, path + ("abs",))
        case NameAbs(_, b):
            return occurrences(b, x, path + ("abs",))
        case ProcApp(f, a):
            head = _head(f)
            arg = "arg-other" if head is not None and head != x else "arg"
            return occurrences(f, x, path + ("fun",)) + occurrences(a, x, path + (arg,))
        case NameApp(f, _):
            return occurrences(f, x, path + ("fun",))
    raise TypeError(t)


def _head(f: Term) -> str | None:
    while isinstance(f, (ProcApp, NameApp)):
        f = f.fun
    return f.name if isinstance(f, Var) else None


def guarded(x: str, t: Term) -> bool:
    """Every free occurrence lies under an input, an output, or in the
    argument of an application headed by another variable."""
    shields = {"input", "output", "arg-other"}
    return all(shields & set(p) for p in occurrences(t, x))
