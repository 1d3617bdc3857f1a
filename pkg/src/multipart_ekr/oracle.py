"""Independent verification engines for :mod:`multipart_ekr.search`.

Nothing here reuses the primary engine's graph, ordering or bounds.
Adjacency is rebuilt from pairwise ``a & b`` tests on the raw members.

* up to :data:`ORACLE_ENUM_CAP` vertices: enumeration of all maximal
  cliques (Bron-Kerbosch with pivoting), filtered by non-triviality;
  this also yields every optimal family;
* up to :data:`ORACLE_MILP_CAP` vertices: a 0/1 integer program solved by
  HiGHS through :func:`scipy.optimize.milp`.
"""
from __future__ import annotations

import time
from typing import Iterator

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import coo_matrix

from .core import Family, PartStructure, common_bits, iter_layer_bits
from .search import ORACLE_ENUM_CAP, ORACLE_MILP_CAP, Mode, SearchResult, Status, TooLarge


def _neighbourhoods(members: list[int]) -> list[set[int]]:
    n = len(members)
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for a in range(n):
        ma = members[a]
        for b in range(a + 1, n):
            if ma & members[b]:
                nbrs[a].add(b)
                nbrs[b].add(a)
    return nbrs


def maximal_cliques(members: list[int]) -> Iterator[list[int]]:
    """Every maximal clique of the intersection graph, as member index lists."""
    nbrs = _neighbourhoods(members)

    def bk(R: list[int], P: set[int], X: set[int]):
        if not P and not X:
            yield list(R)
            return
        pivot = max(P | X, key=lambda u: len(nbrs[u] & P))
        for v in list(P - nbrs[pivot]):
            R.append(v)
            yield from bk(R, P & nbrs[v], X & nbrs[v])
            R.pop()
            P.discard(v)
            X.add(v)

    if members:
        yield from bk([], set(range(len(members))), set())


def optimal_cliques(ps: PartStructure, mode: Mode | str) -> tuple[int, list[Family]]:
    """All optimal families by full maximal-clique enumeration (tiny instances).

    Every optimum is a maximal clique: an intersecting family of maximum size
    cannot be extended, and a maximum non-trivial one stays non-trivial when
    extended, so it cannot be extended either.
    """
    mode = Mode(mode)
    if ps.layer_size > ORACLE_ENUM_CAP:
        raise TooLarge(f"{ps.layer_size} vertices exceed the enumeration cap {ORACLE_ENUM_CAP}")
    members = list(iter_layer_bits(ps, cap=None))
    best, found = 0, []
    for clique in maximal_cliques(members):
        bits = [members[i] for i in clique]
        if mode is Mode.NONTRIVIAL and common_bits(bits):
            continue
        if len(bits) > best:
            best, found = len(bits), [bits]
        elif len(bits) == best:
            found.append(bits)
    return best, [Family._trusted(ps, sorted(f)) for f in found]


def milp_max(ps: PartStructure, mode: Mode | str) -> tuple[int, list[int]]:
    """Maximum family as a 0/1 program.

    Constraints: ``x_a + x_b <= 1`` for disjoint members, a greedy
    pairwise-disjoint group per vertex as a clique cut, and in non-trivial
    mode ``sum(x_v : e not in v) >= 1`` for every ground element ``e``.
    The layer is vertex-transitive under per-part permutations, which
    preserve both modes, so ``x_0 = 1`` loses no optimum.
    """
    mode = Mode(mode)
    members = list(iter_layer_bits(ps, cap=None))
    n = len(members)
    rows: list[int] = []
    cols: list[int] = []
    lo: list[float] = []
    hi: list[float] = []

    def add(idx, low, high):
        rows.extend([len(lo)] * len(idx))
        cols.extend(idx)
        lo.append(low)
        hi.append(high)

    for a in range(n):
        for b in range(a + 1, n):
            if not members[a] & members[b]:
                add([a, b], -np.inf, 1)
    for a in range(n):
        group, acc = [a], members[a]
        for b in range(n):
            if not acc & members[b]:
                group.append(b)
                acc |= members[b]
        if len(group) > 2:
            add(group, -np.inf, 1)
    if mode is Mode.NONTRIVIAL:
        for e in range(ps.ground_size):
            add([v for v in range(n) if not members[v] >> e & 1], 1, np.inf)

    lower = np.zeros(n)
    lower[0] = 1
    constraints = []
    if lo:
        A = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(lo), n)).tocsr()
        constraints = [LinearConstraint(A, lo, hi)]
    res = milp(-np.ones(n), constraints=constraints, integrality=np.ones(n), bounds=Bounds(lower, 1))
    if res.status == 2:  # infeasible: no non-trivial family exists
        return 0, []
    if res.status != 0 or res.x is None:
        raise RuntimeError(f"MILP oracle did not finish: {res.message}")
    chosen = [members[v] for v in range(n) if res.x[v] > 0.5]
    return len(chosen), chosen


def oracle_max(ps: PartStructure, mode: Mode | str = Mode.INTERSECTING) -> SearchResult:
    mode = Mode(mode)
    start = time.perf_counter()
    size = ps.layer_size
    if size <= ORACLE_ENUM_CAP:
        best, families = optimal_cliques(ps, mode)
        witness = families[0] if families else Family(ps)
        engine, nodes = "maximal-clique-enumeration", len(families)
    elif size <= ORACLE_MILP_CAP:
        best, bits = milp_max(ps, mode)
        witness = Family._trusted(ps, sorted(bits))
        engine, nodes = "milp-highs", 0
    else:
        raise TooLarge(f"{size} vertices exceed the oracle cap {ORACLE_MILP_CAP}")
    status = Status.OPTIMAL if best > 0 else Status.INFEASIBLE
    return SearchResult(status, best, witness, mode, nodes, time.perf_counter() - start, engine)
