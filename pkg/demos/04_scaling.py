"""How normalization time grows with term size.

Each pair is a large random parallel composition and a bisimilar
rearrangement of it. Interning keeps the number of distinct nodes well below
the tree size, and the time per decade of size grows roughly like n log n.

    python3 demos/04_scaling.py [sizes]
"""

import json
import math
import subprocess
import sys


def main():
    sizes = sys.argv[1] if len(sys.argv) > 1 else "1000,10000,100000"
    out = subprocess.run(
        [sys.executable, "-m", "hobisim.cli", "bench", "--sizes", sizes, "--repeat", "5", "--json"],
        check=True, capture_output=True, text=True,
    )
    rows = json.loads(out.stdout)["rows"]
    print(f"{'n':>8} {'ms':>9} {'nodes':>7} {'nodes/n':>8} {'growth':>7} {'n log n':>8}")
    prev = None
    for r in rows:
        growth = model = ""
        if prev:
            growth = f"{r['time_ms'] / prev['time_ms']:.1f}x"
            model = f"{r['n'] * math.log(r['n']) / (prev['n'] * math.log(prev['n'])):.1f}x"
        print(f"{r['n']:>8} {r['time_ms']:>9.1f} {r['nodes']:>7} {r['nodes'] / r['n']:>8.2f} {growth:>7} {model:>8}")
        prev = r
    assert all(r["verdict_count"] == 1 for r in rows), "a bisimilar pair was rejected"


if __name__ == "__main__":
    main()
