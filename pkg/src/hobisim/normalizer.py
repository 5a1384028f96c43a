"""Tree normalization: the fast bisimilarity check.

A term becomes a tree of interned nodes with De Bruijn indices for every bound
variable (input-bound, process-abstraction-bound and name-abstraction-bound
share one index space, 1 being the innermost binder). Three bottom-up passes
bring it to normal form:

* ``ns1`` executes applications of abstractions (the two application laws);
* ``ns2`` flattens parallel nodes, drops ``0`` children and sorts them;
* ``ns3`` applies the distribution law left to right.

Two terms are bisimilar iff their normal trees are the same interned node.
"""

from __future__ import annotations

import gc
import itertools
from operator import attrgetter
from collections import Counter
from contextlib import contextmanager

from .syntax import (
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
    par_components,
)

ZERO, VAR, INP, OUT, PAR, ABS, APP, NAME = "zero", "var", "inp", "out", "par", "abs", "app", "name"
_RANK = {ZERO: 0, VAR: 1, INP: 2, OUT: 3, PAR: 4, ABS: 5, APP: 6, NAME: 7}

# labels of abs nodes: which kind of variable the abstraction binds
PROC_ABS, NAME_ABS = "P", "N"


class KindError(Exception):
    """A process was substituted for a name, or the other way round."""


class Node:
    """An interned tree node; build through :meth:`NodeTable.make` only.

    ``free`` is the largest De Bruijn index free in the subtree (0 if none);
    ``apps`` tells whether the subtree contains an application.
    """

    __slots__ = ("type", "label", "children", "id", "free", "apps", "order")

    def __repr__(self):
        kids = ", ".join(repr(c) for c in self.children)
        label = "" if self.label is None else f"({self.label})"
        return f"{self.type}{label}[{kids}]"

    # tuples of nodes compare elementwise: identity first, then this order
    def __lt__(self, other: "Node") -> bool:
        return self is not other and self.order < other.order

    def __gt__(self, other: "Node") -> bool:
        return self is not other and other.order < self.order


_NO_LABEL = (0,)
# labels are None, De Bruijn indices or channel strings; no two of these
# compare equal, so the label itself is the cache key
_LABEL_KEYS: dict = {None: _NO_LABEL}


def _label_key(label) -> tuple:
    key = _LABEL_KEYS.get(label)
    if key is None:
        key = (1, label) if isinstance(label, int) else (2, label)
        _LABEL_KEYS[label] = key
    return key


_order = attrgetter("order")


class NodeTable:
    """Hash-consing table. Structurally equal trees are the same object.

    One table per checking session; trees from different tables never compare
    equal by identity.
    """

    def __init__(self):
        self._nodes: dict[tuple, Node] = {}
        self._ids = itertools.count()
        self._shift: dict[tuple, Node] = {}
        self.zero = self.make(ZERO)

    def __len__(self) -> int:
        return len(self._nodes)

    def rebuild(self, node: Node, children: tuple[Node, ...]) -> Node:
        """``node`` with new children; no table lookup if nothing changed."""
        old = node.children
        if len(old) == len(children) and all(a is b for a, b in zip(old, children)):
            return node
        return self.make(node.type, node.label, children)

    def make(self, type: str, label=None, children: tuple[Node, ...] = ()) -> Node:
        # the sort key doubles as the interning key (it determines type,
        # label and children); nodes hash by identity
        key = (_RANK[type], _label_key(label), len(children), children)
        node = self._nodes.get(key)
        if node is not None:
            return node
        node = Node()
        node.type, node.label, node.children = type, label, children
        node.id = next(self._ids)
        node.free = _free_index(type, label, children)
        node.apps = type == APP or any(c.apps for c in children)
        node.order = key
        self._nodes[key] = node
        return node

    def par(self, children) -> Node:
        """NS2 normalization of a parallel node whose children are already normal."""
        flat: list[Node] = []
        for c in children:
            if c.type == PAR:
                flat.extend(c.children)
            elif c.type != ZERO:
                flat.append(c)
        if not flat:
            return self.zero
        if len(flat) == 1:
            return flat[0]
        flat.sort(key=_order)
        return self.make(PAR, None, tuple(flat))

    def shift(self, node: Node, by: int, cutoff: int = 1) -> Node:
        """Add ``by`` to every De Bruijn index ``>= cutoff``."""
        if by == 0 or node.free < cutoff:
            return node
        key = (node.id, by, cutoff)
        hit = self._shift.get(key)
        if hit is not None:
            return hit
        t, label = node.type, node.label
        if isinstance(label, int) and label >= cutoff and t in (VAR, NAME, INP, OUT):
            label += by
        inner = cutoff + 1 if t in (INP, ABS) else cutoff
        kids = tuple(self.shift(c, by, inner) for c in node.children)
        out = self.make(t, label, kids)
        self._shift[key] = out
        return out


def _free_index(type: str, label, children) -> int:
    own = label if isinstance(label, int) and type in (VAR, NAME, INP, OUT) else 0
    kids = max((c.free for c in children), default=0)
    if type in (INP, ABS):
        kids = max(kids - 1, 0)
    return max(own, kids)


# ---------------------------------------------------------------------------
# terms <-> trees


def to_tree(t: Term, table: NodeTable) -> Node:
    return _tree(t, table, {}, 0)


def _tree(t: Term, table: NodeTable, env: dict[str, list[int]], lvl: int) -> Node:
    # env maps a bound identifier to the levels of its enclosing binders
    cls = type(t)
    if cls is Par:
        kids = tuple(_tree(c, table, env, lvl) for c in par_components(t))
        return table.make(PAR, None, kids)
    if cls is Input:
        return table.make(INP, _label(t.chan, env, lvl), (_bound(t.body, t.var, table, env, lvl),))
    if cls is Output:
        return table.make(OUT, _label(t.chan, env, lvl), (_tree(t.payload, table, env, lvl),))
    if cls is Nil:
        return table.zero
    if cls is Var:
        return table.make(VAR, _label(t.name, env, lvl))
    if cls is ProcAbs:
        return table.make(ABS, PROC_ABS, (_bound(t.body, t.var, table, env, lvl),))
    if cls is NameAbs:
        return table.make(ABS, NAME_ABS, (_bound(t.body, t.var, table, env, lvl),))
    if cls is ProcApp:
        return table.make(APP, None, (_tree(t.fun, table, env, lvl), _tree(t.arg, table, env, lvl)))
    if cls is NameApp:
        leaf = table.make(NAME, _label(t.arg, env, lvl))
        return table.make(APP, None, (_tree(t.fun, table, env, lvl), leaf))
    raise TypeError(f"not a term: {t!r}")


def _label(n: str, env: dict[str, list[int]], lvl: int):
    levels = env.get(n)
    return lvl - levels[-1] + 1 if levels else n


def _bound(b: Term, x: str, table: NodeTable, env: dict[str, list[int]], lvl: int) -> Node:
    levels = env.setdefault(x, [])
    levels.append(lvl + 1)
    node = _tree(b, table, env, lvl + 1)
    levels.pop()
    return node


def free_labels(node: Node) -> set[str]:
    out: set[str] = set()
    seen: set[int] = set()
    stack = [node]
    while stack:
        n = stack.pop()
        if n.id in seen:
            continue
        seen.add(n.id)
        if isinstance(n.label, str) and n.type in (VAR, NAME, INP, OUT):
            out.add(n.label)
        stack.extend(n.children)
    return out


def from_tree(node: Node) -> Term:
    """Rebuild a term, naming binders ``X1, X2, ...`` / ``x1, x2, ...`` by depth."""
    taken = free_labels(node)
    return _term(node, [], taken)


def _binder_name(stem: str, depth: int, taken: set[str]) -> str:
    name = f"{stem}{depth}"
    while name in taken:
        name += "_"
    return name


def _term(n: Node, scope: list[str], taken: set[str]) -> Term:
    def name_of(label):
        return scope[-label] if isinstance(label, int) else label

    match n.type:
        case "zero":
            return Nil()
        case "var":
            return Var(name_of(n.label))
        case "inp":
            x = _binder_name("X", len(scope) + 1, taken)
            chan = name_of(n.label)
            return Input(chan, x, _term(n.children[0], scope + [x], taken))
        case "out":
            return Output(name_of(n.label), _term(n.children[0], scope, taken))
        case "par":
            kids = [_term(c, scope, taken) for c in n.children]
            out = kids[-1]
            for k in reversed(kids[:-1]):
                out = Par(k, out)
            return out
        case "abs":
            if n.label == PROC_ABS:
                x = _binder_name("X", len(scope) + 1, taken)
                return ProcAbs(x, _term(n.children[0], scope + [x], taken))
            x = _binder_name("x", len(scope) + 1, taken)
            return NameAbs(x, _term(n.children[0], scope + [x], taken))
        case "app":
            f, a = n.children
            if a.type == NAME:
                return NameApp(_term(f, scope, taken), name_of(a.label))
            return ProcApp(_term(f, scope, taken), _term(a, scope, taken))
    raise ValueError(f"cannot rebuild a term from a bare {n.type} node")


# ---------------------------------------------------------------------------
# the three normalization steps


def app_substitute(n_raw: Node, ind: int, n_eval: Node, table: NodeTable) -> Node:
    """Replace index ``ind`` in ``n_raw`` by ``n_eval`` and drop that binder.

    Process occurrences (``var`` nodes) take ``n_eval`` wholesale; channel
    labels and name leaves take the name carried by a ``name`` leaf. Indices
    above ``ind`` are decremented and free indices of ``n_eval`` are lifted
    by the number of binders crossed. The replacement is shared, not copied.
    """
    memo: dict[tuple[int, int], Node] = {}
    is_name = n_eval.type == NAME

    def replacement(k: int) -> Node:
        return table.shift(n_eval, k - 1)

    def go(n: Node, k: int) -> Node:
        if n.free < k:
            return n
        key = (n.id, k)
        hit = memo.get(key)
        if hit is not None:
            return hit
        t, label = n.type, n.label
        if t in (VAR, NAME):
            if label == k:
                if (t == NAME) != is_name:
                    raise KindError(f"cannot substitute a {n_eval.type} node for a {t} node")
                out = replacement(k)
            else:
                out = table.make(t, label - 1)
        else:
            if t in (INP, OUT) and isinstance(label, int) and label >= k:
                if label == k:
                    if not is_name:
                        raise KindError("cannot use a process as a channel")
                    label = replacement(k).label
                else:
                    label -= 1
            inner = k + 1 if t in (INP, ABS) else k
            out = table.make(t, label, tuple(go(c, inner) for c in n.children))
        memo[key] = out
        return out

    return go(n_raw, ind)


def ns1(root: Node, table: NodeTable) -> Node:
    """Execute every application whose function is an abstraction, bottom-up.

    Applications headed by a variable stay. A substitution can create new
    redexes (a variable in function position replaced by an abstraction), so
    the result of each step is normalized again.
    """
    memo: dict[int, Node] = {}

    def go(n: Node) -> Node:
        if not n.apps:
            return n
        hit = memo.get(n.id)
        if hit is not None:
            return hit
        if n.type == APP:
            f, a = go(n.children[0]), go(n.children[1])
            if f.type == ABS:
                if (f.label == NAME_ABS) != (a.type == NAME):
                    raise KindError("abstraction applied to the wrong kind of argument")
                out = go(app_substitute(f.children[0], 1, a, table))
            else:
                out = table.make(APP, None, (f, a))
        elif n.children:
            out = table.rebuild(n, tuple(go(c) for c in n.children))
        else:
            out = n
        memo[n.id] = out
        return out

    return go(root)


def ns2(root: Node, table: NodeTable) -> Node:
    """Flatten parallel nodes, remove ``0`` children, collapse and sort."""
    memo: dict[int, Node] = {}

    def go(n: Node) -> Node:
        hit = memo.get(n.id)
        if hit is not None:
            return hit
        if not n.children:
            out = n
        elif n.type == PAR:
            kids = tuple(go(c) for c in n.children)
            out = n if _is_normal_par(n, kids) else table.par(kids)
        else:
            out = table.rebuild(n, tuple(go(c) for c in n.children))
        memo[n.id] = out
        return out

    return go(root)


def _is_normal_par(n: Node, kids: tuple[Node, ...]) -> bool:
    """True if ``n`` already is the NS2 form of a par with children ``kids``."""
    if len(kids) < 2 or any(a is not b for a, b in zip(n.children, kids)):
        return False
    prev = None
    for k in kids:
        if k.type in (PAR, ZERO) or (prev is not None and k.order < prev.order):
            return False
        prev = k
    return True


def _components(n: Node) -> tuple[Node, ...]:
    if n.type == PAR:
        return n.children
    if n.type == ZERO:
        return ()
    return (n,)


def dis_rewrite(n: Node, table: NodeTable) -> Node:
    """One application of the distribution law at an input node, if it matches.

    ``a(X).(P | a(X).P | ... | a(X).P)`` with ``k-1`` inner copies becomes
    ``k`` parallel copies of ``a(X).P``; ``P`` may be ``0`` or a parallel
    composition. The inner copies sit under one more binder than the
    outer prefix, so they are compared after lifting.
    """
    if n.type != INP:
        return n
    comps = _components(n.children[0])
    if not comps:
        return n
    chan = n.label
    inner_chan = chan + 1 if isinstance(chan, int) else chan
    counts = Counter(comps)
    for big, m in counts.items():
        if big.type != INP or big.label != inner_chan:
            continue
        if len(_components(big.children[0])) != len(comps) - m:
            continue
        rest = [c for c in comps if c is not big]
        small = table.par(rest)
        copy = table.make(INP, chan, (small,))
        if table.shift(copy, 1) is big:
            return table.make(PAR, None, (copy,) * (m + 1))
    return n


def ns3(root: Node, table: NodeTable) -> Node:
    """Apply the distribution law bottom-up, keeping parallel nodes flat and sorted."""
    memo: dict[int, Node] = {}

    def go(n: Node) -> Node:
        hit = memo.get(n.id)
        if hit is not None:
            return hit
        if not n.children:
            out = n
        elif n.type == PAR:
            kids = tuple(go(c) for c in n.children)
            out = n if _is_normal_par(n, kids) else table.par(kids)
        else:
            out = table.rebuild(n, tuple(go(c) for c in n.children))
            if out.type == INP:
                out = dis_rewrite(out, table)
        memo[n.id] = out
        return out

    return go(root)


def normalize_tree(tree: Node, table: NodeTable) -> Node:
    """NS1, then NS3 with NS2 maintenance.

    ``ns3`` rebuilds bottom-up and re-normalizes every parallel node it
    produces, so each node is final once its children are; one pass reaches
    the fixpoint of NS2;NS3.
    """
    return ns3(ns1(tree, table), table)


@contextmanager
def _collector_paused():
    # interned nodes never form reference cycles; pausing the cyclic
    # collector avoids repeated full scans of a large, growing table
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was_enabled:
            if gc.get_freeze_count() == 0:
                # promote what was allocated meanwhile to the oldest
                # generation instead of scanning it all as young objects;
                # cyclic garbage among it still goes at the next full pass
                gc.freeze()
                gc.unfreeze()
            gc.enable()


def nf(t: Term, table: NodeTable | None = None) -> Node:
    """Normal form of ``t`` as an interned tree."""
    table = table if table is not None else NodeTable()
    with _collector_paused():
        return normalize_tree(to_tree(t, table), table)


def nf_equal(p: Term, q: Term, table: NodeTable | None = None):
    """Fast check: ``p ~ q`` iff both normal forms are the same node."""
    from .bisim import Verdict

    table = table if table is not None else NodeTable()
    with _collector_paused():
        np_, nq = nf(p, table), nf(q, table)
    return Verdict(np_ is nq, (np_, nq))


# ---------------------------------------------------------------------------
# inspection


def node_count(*roots: Node) -> int:
    """Distinct nodes reachable from ``roots`` (shared nodes count once)."""
    seen: set[int] = set()
    stack = list(roots)
    while stack:
        n = stack.pop()
        if n.id in seen:
            continue
        seen.add(n.id)
        stack.extend(n.children)
    return len(seen)


def tree_size(node: Node) -> int:
    """Nodes of the unshared tree, i.e. counting every occurrence."""
    memo: dict[int, int] = {}

    def go(n: Node) -> int:
        hit = memo.get(n.id)
        if hit is None:
            hit = 1 + sum(go(c) for c in n.children)
            memo[n.id] = hit
        return hit

    return go(node)


def dump(root: Node) -> list[str]:
    """One line per distinct node, children first: ``id type label child-ids``."""
    ids: dict[int, int] = {}
    lines: list[str] = []

    def go(n: Node) -> int:
        if n.id in ids:
            return ids[n.id]
        kids = [go(c) for c in n.children]
        local = len(ids)
        ids[n.id] = local
        label = "-" if n.label is None else str(n.label)
        lines.append(" ".join([str(local), n.type, label, *map(str, kids)]))
        return local

    go(root)
    return lines
