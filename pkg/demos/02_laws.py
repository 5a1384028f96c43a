"""The two laws behind the normal forms, checked by both engines.

Distribution: an input whose continuation re-offers the same input k-1
times, a(X).(P | a(X).P | ...), behaves like k parallel copies of a(X).P.
The normalizer rewrites the nested form into the flat one. Application:
applying an abstraction is the same as substituting.

    python3 demos/02_laws.py
"""

from hobisim import BisimOracle, NodeTable, dump, from_tree, nf, nf_equal, parse, parse_context, print_term, prime_factors
from hobisim.generate import dis_lhs, dis_rhs

ORACLE = BisimOracle()


def show(label, p_src, q_src, free=None):
    p, q = parse(p_src, free), parse(q_src, free)
    fast = nf_equal(p, q, NodeTable())
    slow = ORACLE.check(p, q)
    print(f"{label}")
    print(f"  {p_src}")
    print(f"  {q_src}")
    print(f"  normalizer: {fast.equal}   oracle: {slow.equal}")
    if not slow.equal:
        print(f"  distinguisher: {slow.witness}")
    print()


def main():
    body = parse("b!(X) | c!(0)", parse_context("X:proc"))
    for k in (2, 3, 4):
        lhs, rhs = dis_lhs("a", "X", body, k), dis_rhs("a", "X", body, k)
        show(f"distribution with k = {k}", print_term(lhs), print_term(rhs))
    show("distribution needs the same channel", "a(X).(X | b(X).X)", "a(X).X | b(X).X")

    show("application of a process abstraction", "(<X>(X | a!(X)))<b!(0)>", "b!(0) | a!(b!(0))")
    show("application of a name abstraction", "(<x>(x!(0) | x(Y).Y))<c>", "c!(0) | c(Y).Y")
    show("parallel laws hold up to congruence", "a!(0) | 0 | b!(0)", "b!(0) | a!(0)")
    show("but sending is not receiving", "a!(0)", "a(X).0")
    show("and the payload matters", "a!(b!(0))", "a!(c!(0))")

    src = "a(X).b!(X) | a!(a(Y).b!(Y)) | c!(0)"
    table = NodeTable()
    root = nf(parse(src), table)
    print("normal form of", src)
    print("  ", print_term(from_tree(root)))
    print("interned tree (index, type, label, children):")
    for line in dump(root):
        print("  ", line)
    print()
    print("prime factors:", ", ".join(print_term(f) for f in prime_factors(parse(src))))


if __name__ == "__main__":
    main()
