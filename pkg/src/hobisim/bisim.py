"""Strong HO-IO bisimilarity by induction on depth, plus derived utilities.

The oracle follows the clauses of the bisimulation directly. Each clause
offers only finitely many candidates on the other side (transitions and
parallel decompositions of a term are finite up to structural congruence),
and every recursive question is about terms of strictly smaller depth, so
the search terminates. Clause numbers in distinguishers:

1. non-abstraction shape      5. input ``a(X)``
2. process abstraction         6. bare variable ``X | P'``
3. name abstraction            7. application ``X<A> | P'``
4. output ``a!(A)``            8. name application ``X<d> | P'``
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .semantics import (
    In,
    Out,
    Tau,
    beta_normalize,
    canonical_key,
    canonicalize,
    compose,
    open_decompositions,
    transitions,
)
from .syntax import (
    NameAbs,
    NameApp,
    ProcAbs,
    ProcApp,
    SortError,
    Term,
    Var,
    all_identifiers,
    depth,
    free_pvars,
    fresh,
    infer_sorts,
    subst_name,
    subst_proc,
)


class DepthBudgetExceeded(RuntimeError):
    """A recursive question did not get smaller; this is a bug, not an input error."""


@dataclass(frozen=True)
class Step:
    clause: int
    side: str
    observation: str

    def __str__(self):
        return f"clause {self.clause} ({self.side}): {self.observation}"


@dataclass(frozen=True)
class Distinguisher:
    """Clauses followed from the root to an unmatched observation."""

    steps: tuple[Step, ...]

    def __str__(self):
        return " / ".join(str(s) for s in self.steps)


@dataclass(frozen=True)
class Verdict:
    """``equal`` plus a witness: two normal forms, or a :class:`Distinguisher`."""

    equal: bool
    witness: object = None

    def __bool__(self):
        return self.equal


@dataclass(frozen=True)
class _Obligation:
    clause: int
    side: str
    observation: str
    # each candidate is a list of pairs that must all be bisimilar
    candidates: tuple[tuple[tuple[Term, Term], ...], ...]


def _shape(t: Term) -> str:
    if isinstance(t, ProcAbs):
        return "process abstraction"
    if isinstance(t, NameAbs):
        return "name abstraction"
    return "non-abstraction"


def _heads(f: Term, g: Term) -> tuple[tuple[Term, Term], ...] | None:
    """Pairs that must be bisimilar for spines ``f`` and ``g`` to match, or None."""
    pairs: list[tuple[Term, Term]] = []
    while True:
        match f, g:
            case Var(x), Var(y):
                return tuple(pairs) if x == y else None
            case ProcApp(f1, a1), ProcApp(g1, b1):
                pairs.append((a1, b1))
                f, g = f1, g1
            case NameApp(f1, n), NameApp(g1, m) if n == m:
                f, g = f1, g1
            case _:
                return None


class BisimOracle:
    """Decision procedure with a session-local memo of verdicts."""

    def __init__(self):
        self._memo: dict[tuple, bool] = {}
        self._forms: dict[int, tuple] = {}

    def __len__(self) -> int:
        return len(self._memo)

    # -- public --------------------------------------------------------------

    def check(self, p: Term, q: Term) -> Verdict:
        p, q = beta_normalize(p), beta_normalize(q)
        if self._bisim(p, q, depth(p)):
            return Verdict(True, (canonicalize(p).term(), canonicalize(q).term()))
        return Verdict(False, Distinguisher(tuple(self._explain(p, q))))

    def bisimilar(self, p: Term, q: Term) -> bool:
        p, q = beta_normalize(p), beta_normalize(q)
        return self._bisim(p, q, depth(p))

    # -- core ----------------------------------------------------------------

    def _bisim(self, p: Term, q: Term, bound: int) -> bool:
        kp, kq = canonical_key(p), canonical_key(q)
        if kp == kq:
            return True
        memo_key = (kp, kq) if kp <= kq else (kq, kp)
        hit = self._memo.get(memo_key)
        if hit is not None:
            return hit
        dp = depth(p)
        if dp > bound:
            raise DepthBudgetExceeded(f"depth {dp} exceeds bound {bound}")
        result = dp == depth(q) and all(
            self._discharged(ob, dp - 1) for ob in self._obligations(p, q)
        )
        self._memo[memo_key] = result
        return result

    def _discharged(self, ob: _Obligation, bound: int) -> bool:
        return any(all(self._bisim(u, v, bound) for u, v in cand) for cand in ob.candidates)

    def _explain(self, p: Term, q: Term) -> Iterator[Step]:
        dp, dq = depth(p), depth(q)
        bound = max(dp, dq) - 1
        for ob in self._obligations(p, q):
            if self._discharged(ob, bound):
                continue
            yield Step(ob.clause, ob.side, ob.observation)
            if len(ob.candidates) == 1:
                for u, v in ob.candidates[0]:
                    if not self._bisim(u, v, bound):
                        yield from self._explain(u, v)
                        break
            return
        # unreachable when depth is a bisimulation invariant
        yield Step(0, "both", f"depths differ ({dp} vs {dq})")

    # -- clauses ---------------------------------------------------------------

    def _obligations(self, p: Term, q: Term) -> Iterator[_Obligation]:
        sp, sq = _shape(p), _shape(q)
        if sp != sq:
            clause = {"non-abstraction": 1, "process abstraction": 2, "name abstraction": 3}[sp]
            yield _Obligation(clause, "left", f"left is a {sp}, right is a {sq}", ())
            return
        if sp != "non-abstraction":
            yield self._abstraction(p, q)
            return
        fp, fq = canonicalize(p), canonicalize(q)
        for side, a, b in (("left", fp, fq), ("right", fq, fp)):
            ta, tb = transitions(a), transitions(b)
            yield from self._outputs(side, ta, tb)
            yield from self._inputs(side, ta, tb, a.term(), b.term())
            yield from self._open(side, a, b)

    def _abstraction(self, p: Term, q: Term) -> _Obligation:
        avoid = all_identifiers(p) | all_identifiers(q)
        if isinstance(p, ProcAbs):
            z = fresh("Y", avoid)
            bp, bq = subst_proc(p.body, Var(z), p.var), subst_proc(q.body, Var(z), q.var)
            return _Obligation(2, "both", f"bodies of <{z}>", (((bp, bq),),))
        z = fresh("y", avoid)
        bp, bq = subst_name(p.body, z, p.var), subst_name(q.body, z, q.var)
        return _Obligation(3, "both", f"bodies of <{z}>", (((bp, bq),),))

    def _outputs(self, side, ta, tb) -> Iterator[_Obligation]:
        for act, rest in ta:
            if not isinstance(act, Out):
                continue
            cands = tuple(
                ((act.payload, act2.payload), (rest, rest2))
                for act2, rest2 in tb
                if isinstance(act2, Out) and act2.chan == act.chan
            )
            if side == "right":
                cands = tuple(tuple((v, u) for u, v in c) for c in cands)
            yield _Obligation(4, side, f"{act} then {rest}", cands)

    def _inputs(self, side, ta, tb, a: Term, b: Term) -> Iterator[_Obligation]:
        if not any(isinstance(act, In) for act, _ in ta):
            return
        # one variable for both sides, fresh for everything in sight
        avoid = all_identifiers(a) | all_identifiers(b)
        for _, r in (*ta, *tb):
            avoid |= all_identifiers(r)
        z = fresh("X", avoid)
        for act, rest in ta:
            if not isinstance(act, In):
                continue
            mine = subst_proc(rest, Var(z), act.var)
            cands = []
            for act2, rest2 in tb:
                if isinstance(act2, In) and act2.chan == act.chan:
                    theirs = subst_proc(rest2, Var(z), act2.var)
                    cands.append(((mine, theirs),) if side == "left" else ((theirs, mine),))
            yield _Obligation(5, side, f"{act} then {rest}", tuple(cands))

    def _open(self, side, a, b) -> Iterator[_Obligation]:
        bare_a, apps_a, napps_a = open_decompositions(a)
        bare_b, apps_b, napps_b = open_decompositions(b)

        def orient(pairs):
            return pairs if side == "left" else tuple((v, u) for u, v in pairs)

        for x, rest in bare_a:
            cands = tuple(orient(((rest, r2),)) for y, r2 in bare_b if y == x)
            yield _Obligation(6, side, f"{x} | {rest}", cands)
        for f, arg, rest in apps_a:
            cands = []
            for g, arg2, r2 in apps_b:
                heads = _heads(f, g)
                if heads is not None:
                    cands.append(orient(heads + ((arg, arg2), (rest, r2))))
            yield _Obligation(7, side, f"{ProcApp(f, arg)} | {rest}", tuple(cands))
        for f, n, rest in napps_a:
            cands = []
            for g, m, r2 in napps_b:
                heads = _heads(f, g) if n == m else None
                if heads is not None:
                    cands.append(orient(heads + ((rest, r2),)))
            yield _Obligation(8, side, f"{NameApp(f, n)} | {rest}", tuple(cands))


def hoio_bisimilar(p: Term, q: Term, oracle: BisimOracle | None = None) -> Verdict:
    """Reference check of strong HO-IO bisimilarity."""
    return (oracle or BisimOracle()).check(p, q)


# ---------------------------------------------------------------------------
# bounded context probes


HOLE = "X"


def bounded_ctx_probe(p: Term, q: Term, probes, depth: int = 4) -> bool:
    """Look for a refutation of context bisimilarity using only ``probes``.

    Closed probes instantiate received variables and abstraction bodies;
    probes with the single free variable ``X`` act as receiving contexts
    ``E(X)`` (``X`` itself is always included). Ill-sorted instantiations are
    skipped. Returns False only when some move of one side has no answer on
    the other side within ``depth`` rounds, which refutes bisimilarity.
    """
    closed = [t for t in probes if not free_pvars(t)]
    contexts = [Var(HOLE)] + [t for t in probes if free_pvars(t) == {HOLE} and t != Var(HOLE)]
    memo: dict[tuple, bool] = {}

    def instances(u: Term, v: Term, x: str) -> list[tuple[Term, Term]]:
        out = []
        for a in closed:
            u2, v2 = subst_proc(u, a, x), subst_proc(v, a, x)
            if _well_sorted(u2, v2):
                out.append((u2, v2))
        return out

    def wrapped(ctxs, a, ra, b, rb) -> list[tuple[Term, Term]]:
        out = []
        for e in ctxs:
            u = compose([subst_proc(e, a, HOLE), ra])
            v = compose([subst_proc(e, b, HOLE), rb])
            if _well_sorted(u, v):
                out.append((u, v))
        return out

    def sim(u: Term, v: Term, d: int) -> bool:
        if d == 0:
            return True
        key = (canonical_key(u), canonical_key(v), d)
        if key in memo:
            return memo[key]
        memo[key] = True
        result = one_way(u, v, d) and one_way(v, u, d, swap=True)
        memo[key] = result
        return result

    def pair(u, v, d, swap):
        return sim(v, u, d) if swap else sim(u, v, d)

    def one_way(u: Term, v: Term, d: int, swap: bool = False) -> bool:
        u, v = beta_normalize(u), beta_normalize(v)
        su, sv = _shape(u), _shape(v)
        if su != sv:
            return False
        if isinstance(u, ProcAbs):
            z = fresh("Y", all_identifiers(u) | all_identifiers(v))
            bu, bv = subst_proc(u.body, Var(z), u.var), subst_proc(v.body, Var(z), v.var)
            return all(pair(a, b, d - 1, swap) for a, b in instances(bu, bv, z))
        if isinstance(u, NameAbs):
            z = fresh("y", all_identifiers(u) | all_identifiers(v))
            return pair(subst_name(u.body, z, u.var), subst_name(v.body, z, v.var), d - 1, swap)
        tv = transitions(v)
        for act, ru in transitions(u):
            if isinstance(act, In):
                ok = any(
                    all(
                        pair(a, b, d - 1, swap)
                        for a, b in instances(ru, subst_proc(rv, Var(act.var), act2.var), act.var)
                    )
                    for act2, rv in tv
                    if isinstance(act2, In) and act2.chan == act.chan
                    and act.var not in free_pvars(rv) - {act2.var}
                )
            elif isinstance(act, Out):
                ok = any(
                    all(pair(a, b, d - 1, swap) for a, b in wrapped(contexts, act.payload, ru, act2.payload, rv))
                    for act2, rv in tv
                    if isinstance(act2, Out) and act2.chan == act.chan
                    and _shape(beta_normalize(act2.payload)) == _shape(beta_normalize(act.payload))
                )
            else:
                ok = any(pair(ru, rv, d - 1, swap) for act2, rv in tv if isinstance(act2, Tau))
            if not ok:
                return False
        return True

    return sim(p, q, depth)


def _well_sorted(*terms: Term) -> bool:
    try:
        infer_sorts(terms)
        for t in terms:
            beta_normalize(t)
    except SortError:
        return False
    return True


# ---------------------------------------------------------------------------
# primes


def prime_factors(p: Term) -> list[Term]:
    """Prime decomposition: the parallel components of the normal form."""
    from .normalizer import NodeTable, from_tree, nf

    root = nf(p, NodeTable())
    if root.type == "zero":
        return []
    kids = root.children if root.type == "par" else (root,)
    return [from_tree(k) for k in kids]
