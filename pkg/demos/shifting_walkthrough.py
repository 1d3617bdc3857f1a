#!/usr/bin/env python3
"""Shift a small intersecting family step by step until it is shifted."""
from multipart_ekr.core import Family, classify, structure
from multipart_ekr.shifting import (
    check_projection_lemma,
    family_order,
    is_shifted,
    shift_family,
    shift_indices,
    stabilize_nontrivial,
)


def show(ps, fam, label):
    sets = " ".join(str(m) for m in fam.as_lists())
    print(f"{label:<14} order={family_order(fam):<6} {classify(fam).value:<11} {sets}")


def main():
    ps = structure([5, 3], [2, 1])
    # pairwise intersecting through the triangle 34, 35, 45 in part 1
    fam = Family.from_parts(ps, [[[3, 4], [2]], [[3, 5], [2]], [[4, 5], [2]], [[3, 4], [3]], [[3, 5], [3]]])
    show(ps, fam, "start")
    changed = True
    while changed:
        changed = False
        for idx in shift_indices(ps):
            nxt = shift_family(ps, idx, fam)
            if nxt != fam:
                fam = nxt
                changed = True
                show(ps, fam, f"S({idx.t};{idx.i},{idx.j})")
    print("shifted:", is_shifted(ps, fam), " projection check:", check_projection_lemma(ps, fam))

    # A shift can also collapse a family into a star.  Stabilizing only
    # takes the shifts that keep it non-trivial.
    start = Family.from_parts(ps, [[[1, 2], [2]], [[1, 3], [3]], [[2, 3], [1]], [[1, 4], [1]]])
    rep = stabilize_nontrivial(ps, start)
    show(ps, start, "non-trivial")
    show(ps, rep.family, "stabilized")
    print("parts where every shift is safe:", sorted(rep.Q))


if __name__ == "__main__":
    main()
