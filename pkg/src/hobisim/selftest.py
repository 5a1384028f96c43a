"""Differential testing of the normalizer against the oracle.

Comparing every pair of a corpus directly is quadratic, so the corpus is
first split into normal-form classes. Bisimilarity is an equivalence, so it
is enough that

* every member of a class is bisimilar to the class representative, and
* no two representatives are bisimilar.

Representatives are only compared when they have the same observation
signature, which any bisimulation preserves; representatives with different
signatures are non-bisimilar by the definition itself. A random sample of
such pairs is still put to the oracle as a check on that argument.
"""

from __future__ import annotations

import random
from collections import defaultdict

from .bisim import BisimOracle
from .generate import bisimilar_variant, enumerate_terms, random_term
from .normalizer import NodeTable, nf
from .semantics import (
    In,
    Out,
    beta_normalize,
    canonical_key,
    canonicalize,
    open_decompositions,
    transitions,
)
from .syntax import (
    PROC,
    NameAbs,
    NameApp,
    ProcAbs,
    ProcApp,
    SortContext,
    SortError,
    Term,
    Var,
    depth,
    infer_sorts,
    subst_name,
    subst_proc,
)


def signature(t: Term, memo: dict | None = None, level: int = 0) -> int:
    """A hash-consed observation signature; bisimilar terms get equal ones.

    The signature of a term is its shape, its depth, and the *set* of its
    observations paired with the signatures of what remains, exactly the data
    each clause compares. Sets (not multisets) make it blind to the
    distribution law. Bound variables are opened with level-indexed names
    that cannot occur in source text, so alpha-variants agree.
    """
    memo = {} if memo is None else memo
    return _sig(beta_normalize(t), memo, level)


def _sig(t: Term, memo: dict, level: int) -> int:
    key = (canonical_key(t), level)
    hit = memo.get(key)
    if hit is not None:
        return hit
    z = f"%{level}"
    if isinstance(t, ProcAbs):
        obs = ("P", _sig(subst_proc(t.body, Var(z), t.var), memo, level + 1))
    elif isinstance(t, NameAbs):
        obs = ("N", _sig(subst_name(t.body, z.lower(), t.var), memo, level + 1))
    else:
        form = canonicalize(t)
        items = set()
        for act, rest in transitions(form):
            if isinstance(act, In):
                items.add(("in", act.chan, _sig(subst_proc(rest, Var(z), act.var), memo, level + 1)))
            elif isinstance(act, Out):
                items.add(("out", act.chan, _sig(act.payload, memo, level), _sig(rest, memo, level)))
        bare, apps, napps = open_decompositions(form)
        for x, rest in bare:
            items.add(("var", x, _sig(rest, memo, level)))
        for f, arg, rest in apps:
            items.add(("app", _spine(f, memo, level), _sig(arg, memo, level), _sig(rest, memo, level)))
        for f, n, rest in napps:
            items.add(("napp", _spine(f, memo, level), n, _sig(rest, memo, level)))
        obs = ("proc", depth(t), frozenset(items))
    out = memo.setdefault(("obs", obs), len(memo))
    memo[key] = out
    return out


def coarse_invariants(t: Term) -> tuple:
    """Top-level observations only: shape, depth, channels, open heads."""
    form = canonicalize(t)
    moves = transitions(form)
    bare, apps, napps = open_decompositions(form)
    shape = type(form.components[0]).__name__ if len(form) == 1 else "proc"
    return (
        shape if shape in ("ProcAbs", "NameAbs") else "proc",
        depth(t),
        frozenset(a.chan for a, _ in moves if isinstance(a, In)),
        frozenset(a.chan for a, _ in moves if isinstance(a, Out)),
        frozenset(x for x, _ in bare),
        len(apps),
        frozenset(n for _, n, _ in napps),
    )


def _spine(f: Term, memo: dict, level: int) -> tuple:
    match f:
        case ProcApp(g, a):
            return ("@", _spine(g, memo, level), _sig(a, memo, level))
        case NameApp(g, n):
            return ("@n", _spine(g, memo, level), n)
        case Var(x):
            return ("v", x)
    raise TypeError(f"not a spine: {f}")


def differential(max_nodes: int = 4, seed: int = 0, random_pairs: int = 0, terms: list[Term] | None = None, cross_samples: int = 2000) -> dict:
    """Check ``nf_equal <=> oracle`` on all pairs of a corpus.

    The corpus is the exhaustive small-term corpus (or ``terms``), plus
    ``random_pairs`` random terms each paired with a bisimilar variant.
    """
    corpus = list(terms) if terms is not None else enumerate_terms(max_nodes)
    rng = random.Random(seed)
    ctx = SortContext(procs={"X": PROC})
    for _ in range(random_pairs):
        t = random_term(rng, rng.randint(2, 8), free={"X": PROC})
        v = bisimilar_variant(rng, t)
        try:
            infer_sorts([t, v], ctx)
        except SortError:
            continue
        corpus += [t, v]

    table = NodeTable()
    oracle = BisimOracle()
    classes: dict[int, list[Term]] = defaultdict(list)
    for t in corpus:
        classes[nf(t, table).id].append(t)

    disagreements: list[str] = []
    calls = 0
    for members in classes.values():
        rep = members[0]
        for m in members[1:]:
            calls += 1
            if not oracle.bisimilar(rep, m):
                disagreements.append(f"same normal form, oracle says different: {rep}  vs  {m}")

    sig_memo: dict = {}
    buckets: dict[int, list[Term]] = defaultdict(list)
    for members in classes.values():
        buckets[signature(members[0], sig_memo)].append(members[0])
    for reps in buckets.values():
        for i in range(len(reps)):
            for j in range(i + 1, len(reps)):
                calls += 1
                if oracle.bisimilar(reps[i], reps[j]):
                    disagreements.append(f"different normal forms, oracle says bisimilar: {reps[i]}  vs  {reps[j]}")

    # Spot-check the signature argument with the oracle itself, on pairs from
    # different buckets that agree on the top-level observations (the pairs
    # most likely to be confused).
    near: dict[tuple, list[Term]] = defaultdict(list)
    for members in classes.values():
        near[coarse_invariants(members[0])].append(members[0])
    pools = [g for g in near.values() if len(g) > 1]
    sampled = 0
    for _ in range(cross_samples if pools else 0):
        p, q = rng.sample(rng.choice(pools), 2)
        calls += 1
        sampled += 1
        if oracle.bisimilar(p, q):
            disagreements.append(f"different normal forms, oracle says bisimilar: {p}  vs  {q}")

    return {
        "terms": len(corpus),
        "classes": len(classes),
        "buckets": len(buckets),
        "oracle_calls": calls,
        "cross_samples": sampled,
        "disagreements": disagreements,
    }
