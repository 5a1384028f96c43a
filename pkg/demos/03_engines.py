"""Oracle against normalizer on every small term.

The oracle decides bisimilarity from the transition relation; the
normalizer compares interned normal forms. This enumerates all terms up to a
few constructors, groups them by normal form, and has the oracle confirm
each group and spot-check pairs across groups.

    python3 demos/03_engines.py [max_nodes]
"""

import sys
import time

from hobisim import BisimOracle, parse
from hobisim.selftest import differential


def main():
    max_nodes = int(sys.argv[1]) if len(sys.argv) > 1 else 5
    start = time.perf_counter()
    result = differential(max_nodes=max_nodes, seed=0, random_pairs=200, cross_samples=5000)
    elapsed = time.perf_counter() - start
    print(f"terms up to {max_nodes} constructors plus 200 random pairs")
    print(f"  terms            {result['terms']}")
    print(f"  normal forms     {result['classes']}")
    print(f"  oracle calls     {result['oracle_calls']}")
    print(f"  disagreements    {len(result['disagreements'])}")
    print(f"  time             {elapsed:.1f} s")

    # when the oracle says no, it says why
    oracle = BisimOracle()
    for p, q in [
        ("a(X).X", "a(X).0"),
        ("<X>a!(X)", "<x>x!(0)"),
        ("a!(0) | a!(0)", "a!(0)"),
    ]:
        verdict = oracle.check(parse(p), parse(q))
        print(f"\n{p}  vs  {q}\n  {verdict.witness}")


if __name__ == "__main__":
    main()
