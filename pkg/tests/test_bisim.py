import random

import pytest
from hypothesis import given, settings

import props
from hobisim import (
    NIL,
    BisimOracle,
    Distinguisher,
    Output,
    Var,
    bounded_ctx_probe,
    hoio_bisimilar,
    parse,
    parse_many,
    parse_raw,
    prime_factors,
    print_term,
    struct_congruent,
)
from hobisim.bisim import DepthBudgetExceeded
from strategies import rngs, terms


@pytest.mark.parametrize(
    "p, q, expected",
    [
        ("0", "0", True),
        ("a(X).a(X).0", "a(X).0 | a(X).0", True),
        ("a(X).(b!(0) | a(X).b!(0))", "a(X).b!(0) | a(X).b!(0)", True),
        ("a(X).a(X).0", "a(X).0", False),
        ("a!(0)", "b!(0)", False),
        ("a!(0)", "a!(0) | a!(0)", False),
        ("a(X).X", "a(Y).(Y | 0)", True),
        ("(<X>(X | X))<b!(0)>", "b!(0) | b!(0)", True),
        ("(<x>x!(0))<c>", "c!(0)", True),
        ("<X>a!(X)", "<Y>a!(Y)", True),
        ("<X>a!(X)", "<X>a!(0)", False),
        ("<x>x!(0)", "<y>y!(0)", True),
        ("<x>x!(0)", "<x>a!(0)", False),
        ("X | a!(0)", "a!(0) | X", True),
        ("X", "0", False),
        ("X<a!(0)>", "X<a!(0) | 0>", True),
        ("X<a!(0)>", "X<b!(0)>", False),
        ("X<d>", "X<e>", False),
    ],
)
def test_oracle_examples(p, q, expected):
    tp, tq = parse_many([p, q])
    verdict = hoio_bisimilar(tp, tq)
    assert verdict.equal is expected
    assert bool(verdict) is expected
    if not expected:
        assert isinstance(verdict.witness, Distinguisher) and verdict.witness.steps


def test_distinguisher_for_abstraction_shapes():
    p, q = parse_many(["a!(<Y>0)", "a!(<y>0)"])
    verdict = hoio_bisimilar(p, q)
    assert not verdict
    clauses = [s.clause for s in verdict.witness.steps]
    assert clauses[0] == 4 and clauses[-1] in (2, 3)
    assert "process abstraction" in str(verdict.witness)


def test_equal_verdict_carries_canonical_forms():
    p, q = parse_many(["a!(0) | 0", "a!(0)"])
    verdict = hoio_bisimilar(p, q)
    assert verdict and all(struct_congruent(w, q) for w in verdict.witness)


@given(terms())
def test_oracle_is_reflexive_and_never_trips_the_depth_guard(t):
    try:
        assert hoio_bisimilar(t, t)
    except DepthBudgetExceeded:  # pragma: no cover
        pytest.fail("depth guard tripped")


@given(terms(), terms())
def test_oracle_is_symmetric(p, q):
    oracle = BisimOracle()
    assert oracle.bisimilar(p, q) == oracle.bisimilar(q, p)


@settings(max_examples=100)
@given(rngs)
def test_oracle_is_transitive_along_variants(rng):
    p = props.term(rng)
    q = props.bisimilar_variant(rng, p)
    r = props.bisimilar_variant(rng, q)
    assert props.ORACLE.bisimilar(p, r)


@pytest.mark.parametrize("name", sorted(props.META))
@settings(max_examples=60)
@given(rng=rngs)
def test_meta_property(name, rng):
    props.META[name](rng)


# -- context probes -------------------------------------------------------------


def test_probe_examples():
    assert bounded_ctx_probe(NIL, NIL, [NIL, Output("c", NIL)])
    assert not bounded_ctx_probe(Output("a", NIL), Output("b", NIL), [Var("X")])
    assert bounded_ctx_probe(parse("a(X).X"), parse("a(X).(X | 0)"), [NIL, Output("c", NIL)], depth=3)


def test_probe_refutes_through_contexts():
    # the payloads differ, which a receiving context running them exposes
    p, q = parse("a!(b!(0))"), parse("a!(c!(0))")
    assert not bounded_ctx_probe(p, q, [Var("X")])


def test_probe_refutes_through_instantiation():
    p, q = parse("a(X).X"), parse("a(X).0")
    assert not bounded_ctx_probe(p, q, [Output("c", NIL)])


@settings(max_examples=40)
@given(rngs)
def test_probes_never_refute_bisimilar_pairs(rng):
    p = props.term(rng, free={})
    q = props.bisimilar_variant(rng, p)
    assert bounded_ctx_probe(p, q, PROBES, depth=3)


PROBES = [parse_raw(s) for s in ["0", "c!(0)", "a!(0)", "b(Y).Y", "X | X", "a!(X)", "<Y>a!(Y)"]]


# -- primes ------------------------------------------------------------------------


def test_prime_examples():
    assert prime_factors(NIL) == []
    assert [print_term(f) for f in prime_factors(parse("a!(0) | a!(0)"))] == ["a!(0)", "a!(0)"]
    factors = prime_factors(parse("a(X).(0 | a(X).0)"))
    assert len(factors) == 2 and all(struct_congruent(f, parse("a(X).0")) for f in factors)


def test_primes_of_a_redex():
    factors = prime_factors(parse("(<X>(X | a(Y).X))<b!(0)>"))
    expected = [parse("b!(0)"), parse("a(X).b!(0)")]
    assert len(factors) == 2
    assert all(any(struct_congruent(f, e) for f in factors) for e in expected)


def test_oracle_memo_is_reusable():
    oracle = BisimOracle()
    rng = random.Random(7)
    pairs = [(props.term(rng), props.term(rng)) for _ in range(30)]
    first = [oracle.bisimilar(p, q) for p, q in pairs]
    assert first == [oracle.bisimilar(p, q) for p, q in pairs]
    assert first == [BisimOracle().bisimilar(p, q) for p, q in pairs]
