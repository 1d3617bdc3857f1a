#!/usr/bin/env python3
"""Exact search on a few small layers, checked against the independent oracle."""
import time

from multipart_ekr.core import structure
from multipart_ekr.formulas import frankl_bound, m_max
from multipart_ekr.oracle import oracle_max
from multipart_ekr.search import Mode, max_family, ratio_bound

CASES = [([5], [2]), ([3, 3, 3], [1, 1, 1]), ([4, 3], [2, 1]), ([2, 4, 5], [1, 2, 2]), ([5, 5], [2, 2])]


def main():
    print(f"{'n':>10} {'k':>10} {'mode':>13} {'bb':>4} {'oracle':>6}  closed form")
    for n, k in CASES:
        ps = structure(n, k)
        for mode in Mode:
            t = time.perf_counter()
            res = max_family(ps, mode)
            ref = oracle_max(ps, mode)
            if mode is Mode.INTERSECTING:
                note = f"Frankl {frankl_bound(ps)}, ratio bound {ratio_bound(ps)}"
            else:
                try:
                    note = f"M^max {m_max(ps)[0]}"
                except ValueError:
                    note = "no admissible construction"
            print(f"{str(n):>10} {str(k):>10} {mode.value:>13} {res.size:>4} {ref.size:>6}  {note}"
                  f"  [{time.perf_counter() - t:.2f}s, {ref.engine}]")


if __name__ == "__main__":
    main()
