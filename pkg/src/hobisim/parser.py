"""Concrete syntax: parsing and printing.

Grammar (``|`` binds loosest, postfix application tightest)::

    term := app ("|" app)*
    app  := atom ("<" arg ">")*
    atom := "0" | PVAR | NAME "(" PVAR ")" "." app | NAME "!" "(" term ")"
          | "<" PVAR ">" atom | "<" NAME ">" atom | "(" term ")"
    arg  := NAME | term

Sugar: ``a.P`` is ``a(X).P`` with ``X`` fresh, ``a`` is ``a.0`` and ``a!`` is
``a!(0)``. In argument position a lone lowercase identifier is a name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

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
    SortContext,
    Term,
    Var,
    all_identifiers,
    fresh,
    infer_sorts,
    parse_sort,
)


class ParseError(Exception):
    def __init__(self, message: str, pos: int, expected: tuple[str, ...] = ()):
        self.pos = pos
        self.expected = expected
        detail = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"at offset {pos}: {message}{detail}")


@dataclass
class SourceTerm:
    text: str
    declared_free: list[tuple[str, str]] = field(default_factory=list)


_TOKEN = re.compile(r"\s*(?:(?P<id>[A-Za-z][A-Za-z0-9_]*)|(?P<zero>0)|(?P<sym>[|<>()!.]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        if m.lastgroup == "id":
            word = m.group("id")
            kind = "PVAR" if word[0].isupper() else "NAME"
            toks.append((kind, word, start))
        else:
            toks.append((m.group(m.lastgroup), m.group(m.lastgroup), start))
        pos = m.end()
    toks.append(("EOF", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k: int = 0) -> tuple[str, str, int]:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, kind: str) -> str:
        tok = self.peek()
        if tok[0] != kind:
            raise ParseError(f"unexpected {tok[1] or 'end of input'!r}", tok[2], (kind,))
        self.i += 1
        return tok[1]

    def term(self) -> Term:
        t = self.app()
        while self.peek()[0] == "|":
            self.i += 1
            t = Par(t, self.app())
        return t

    def app(self) -> Term:
        t = self.atom()
        while self.peek()[0] == "<":
            self.i += 1
            if self.peek()[0] == "NAME" and self.peek(1)[0] == ">":
                t = NameApp(t, self.take("NAME"))
            else:
                t = ProcApp(t, self.term())
            self.take(">")
        return t

    def atom(self) -> Term:
        kind, text, pos = self.peek()
        if kind == "0":
            self.i += 1
            return NIL
        if kind == "PVAR":
            self.i += 1
            return Var(text)
        if kind == "(":
            self.i += 1
            t = self.term()
            self.take(")")
            return t
        if kind == "<":
            self.i += 1
            k2, x, _ = self.peek()
            if k2 not in ("PVAR", "NAME"):
                raise ParseError("expected a variable after '<'", self.peek()[2], ("PVAR", "NAME"))
            self.i += 1
            self.take(">")
            body = self.atom()
            return ProcAbs(x, body) if k2 == "PVAR" else NameAbs(x, body)
        if kind == "NAME":
            self.i += 1
            nxt = self.peek()[0]
            if nxt == "(":
                self.i += 1
                x = self.take("PVAR")
                self.take(")")
                self.take(".")
                return Input(text, x, self.app())
            if nxt == "!":
                self.i += 1
                if self.peek()[0] == "(":
                    self.i += 1
                    payload = self.term()
                    self.take(")")
                    return Output(text, payload)
                return Output(text, NIL)
            if nxt == ".":
                self.i += 1
                body = self.app()
                return Input(text, fresh("X", all_identifiers(body)), body)
            return Input(text, "X", NIL)
        raise ParseError(
            f"unexpected {text or 'end of input'!r}", pos, ("0", "PVAR", "NAME", "<", "(")
        )


def parse_context(spec: str | list[tuple[str, str]] | None) -> SortContext:
    """Build a sort context from ``"X:proc,y:name"`` or a list of pairs."""
    ctx = SortContext()
    if not spec:
        return ctx
    pairs = spec
    if isinstance(spec, str):
        pairs = []
        for item in spec.split(","):
            if not item.strip():
                continue
            ident, _, sort = item.partition(":")
            pairs.append((ident.strip(), sort.strip() or "proc"))
    for ident, sort in pairs:
        if ident[:1].isupper():
            ctx.procs[ident] = parse_sort(sort)
        else:
            if sort != "name":
                raise ValueError(f"name {ident!r} must be declared with sort 'name'")
            ctx.names.add(ident)
    return ctx


def parse_raw(text: str) -> Term:
    """Parse without sort checking."""
    p = _Parser(text)
    t = p.term()
    kind, val, pos = p.peek()
    if kind != "EOF":
        raise ParseError(f"trailing input {val!r}", pos, ("EOF", "|"))
    return t


def parse(src: str | SourceTerm, ctx: SortContext | None = None) -> Term:
    """Parse and sort-check a term."""
    if isinstance(src, SourceTerm):
        ctx = parse_context(src.declared_free)
        src = src.text
    t = parse_raw(src)
    infer_sorts([t], ctx)
    return t


def parse_many(texts: list[str], ctx: SortContext | None = None) -> list[Term]:
    """Parse several terms and sort-check them under one shared context."""
    terms = [parse_raw(s) for s in texts]
    infer_sorts(terms, ctx)
    return terms


# ---------------------------------------------------------------------------
# printing

_PAR, _APP, _ATOM = 0, 1, 2


def _ends_open(t: Term) -> bool:
    # a trailing prefix or abstraction would swallow a following "<..>"
    while isinstance(t, (ProcAbs, NameAbs)):
        t = t.body
    return isinstance(t, Input)


def print_term(t: Term) -> str:
    """Canonical text with minimal parentheses; ``parse(print_term(t)) == t``."""
    return _show(t, _PAR)


def _show(t: Term, level: int) -> str:
    match t:
        case Nil():
            return "0"
        case Var(x):
            return x
        case Input(c, x, b):
            return f"{c}({x}).{_show(b, _APP)}"
        case Output(c, p):
            return f"{c}!({_show(p, _PAR)})"
        case Par(left, right):
            s = f"{_show(left, _PAR)} | {_show(right, _APP)}"
            return s if level == _PAR else f"({s})"
        case ProcAbs(x, b) | NameAbs(x, b):
            return f"<{x}>{_show(b, _ATOM)}"
        case ProcApp(f, a):
            s = f"{_fun(f)}<{_show(a, _PAR)}>"
            return s if level <= _APP else f"({s})"
        case NameApp(f, n):
            s = f"{_fun(f)}<{n}>"
            return s if level <= _APP else f"({s})"
    raise TypeError(f"not a term: {t!r}")


def _fun(f: Term) -> str:
    s = _show(f, _APP)
    if isinstance(f, Par) or _ends_open(f):
        return f"({_show(f, _PAR)})"
    return s
