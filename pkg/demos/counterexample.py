#!/usr/bin/env python3
"""Two parts of size 5, sets of size 2: a non-trivial family beating the naive product.

The obvious candidate puts a Hilton-Milner family on one part and allows
anything on the other.  Fixing part 1 to contain 1 and routing the rest
through part 2 does better.
"""
from multipart_ekr import (
    TSPair,
    binomial,
    classify,
    f_hm_t_S,
    m_hm,
    m_hm_t_S,
    max_family,
    structure,
)


def main():
    ps = structure([5, 5], [2, 2])
    naive = m_hm(5, 2) * binomial(5, 2)
    print(f"Hilton-Milner on one part times C(5,2): {m_hm(5, 2)} * {binomial(5, 2)} = {naive}")

    ts = TSPair(ps, 1, {2})
    fam = f_hm_t_S(ps, ts)
    print(f"t=1, S={{2}}: closed form {m_hm_t_S(ps, ts)}, built {len(fam)} sets, {classify(fam).value}")
    for member in fam.as_lists()[:6]:
        print("  ", member)
    print("   ...")

    best = max_family(ps, "nontrivial")
    print(f"exact non-trivial optimum: {best.size} ({best.nodes_explored} nodes, {best.ms} ms)")


if __name__ == "__main__":
    main()
