import pytest
from hypothesis import given

from hobisim import (
    NIL,
    PROC,
    Input,
    NameAbs,
    NameApp,
    Output,
    Par,
    ParseError,
    ProcAbs,
    ProcApp,
    SortError,
    SourceTerm,
    Var,
    parse,
    parse_context,
    parse_many,
    parse_raw,
    print_term,
)
from hobisim.syntax import PAbs
from strategies import closed_terms, terms


def test_parse_examples():
    assert parse("a(X).0") == Input("a", "X", NIL)
    assert parse("(<X>(X | X))<b!(0)>") == ProcApp(ProcAbs("X", Par(Var("X"), Var("X"))), Output("b", NIL))
    a = NameAbs("x", Output("b", ProcAbs("Z", Output("x", Var("Z")))))
    assert parse("a!(<x>(b!(<Z> x!(Z))))") == Output("a", a)


def test_print_examples():
    assert print_term(NIL) == "0"
    assert print_term(Par(Output("a", NIL), Input("b", "X", Var("X")))) == "a!(0) | b(X).X"
    assert print_term(ProcApp(Var("X"), NIL)) == "X<0>"


@pytest.mark.parametrize(
    "src, expected",
    [
        ("a(X).X | b!(0)", Par(Input("a", "X", Var("X")), Output("b", NIL))),
        ("a | b", Par(Input("a", "X", NIL), Input("b", "X", NIL))),
        ("a!", Output("a", NIL)),
        ("a.b!", Input("a", "X", Output("b", NIL))),
        ("0 | 0 | 0", Par(Par(NIL, NIL), NIL)),
        ("(<x>x!(0))<c>", NameApp(NameAbs("x", Output("x", NIL)), "c")),
    ],
)
def test_grammar(src, expected):
    assert parse_raw(src) == expected


def test_prefix_scope_stops_at_parallel():
    t = parse_raw("a(X).X | X")
    assert isinstance(t, Par) and t.right == Var("X")


@pytest.mark.parametrize("src", ["", "a(", "a!(0", "a(x).0", "<X>", "a!(0) |", "0 0", "a(X).0)"])
def test_parse_errors_carry_a_position(src):
    with pytest.raises(ParseError) as err:
        parse_raw(src)
    assert err.value.pos >= 0
    assert "offset" in str(err.value)


def test_sort_errors_are_forwarded():
    with pytest.raises(SortError):
        parse("(<X>X<X>)<<X>X<X>>")


def test_declared_free_variables():
    ctx = parse_context("F:proc->proc,y:name")
    assert ctx.procs == {"F": PAbs(PROC, PROC)}
    assert ctx.names == {"y"}
    parse("F<0> | y!(0)", ctx)
    with pytest.raises(SortError):
        parse("F | 0", ctx)
    assert parse(SourceTerm("F<a!(0)>", [("F", "proc->proc")])) == ProcApp(Var("F"), Output("a", NIL))


def test_parse_many_shares_free_variables():
    with pytest.raises(SortError):
        parse_many(["X<0>", "X | 0"])
    # channels may carry different sorts in different terms
    parse_many(["a!(<Y>0)", "a!(<y>0)"])


@given(terms(1, 14))
def test_round_trip(t):
    assert parse_raw(print_term(t)) == t


@given(closed_terms(1, 14))
def test_printing_is_deterministic(t):
    assert print_term(t) == print_term(parse_raw(print_term(t)))
