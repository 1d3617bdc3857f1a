"""Exact maximum (non-trivially) intersecting families on small instances.

Intersecting families are cliques of the intersection graph, the complement
of the tensor product of Kneser graphs.  The primary engine is a bitset
branch and bound with greedy-colouring bounds; :func:`oracle_max` is an
independent checker that shares none of its pruning code.
"""
from __future__ import annotations

import enum
import itertools
import math
import os
import time
from dataclasses import dataclass, field

from .core import (
    Family,
    FamilyClass,
    FamilyError,
    PartStructure,
    classify_bits,
    iter_layer_bits,
)

DEFAULT_VERTEX_CAP = 5000
VERTEX_CAP_ENV = "MULTIPART_EKR_VERTEX_CAP"
ORACLE_ENUM_CAP = 32
ORACLE_MILP_CAP = 128


class TooLarge(FamilyError):
    pass


class Mode(str, enum.Enum):
    INTERSECTING = "intersecting"
    NONTRIVIAL = "nontrivial"


def vertex_cap() -> int:
    raw = os.environ.get(VERTEX_CAP_ENV)
    return int(raw) if raw else DEFAULT_VERTEX_CAP


@dataclass(frozen=True)
class IntersectionGraph:
    """Layer members as vertices, joined when they intersect.

    ``adj[v]`` is a bitmask over vertex indices without the self-loop;
    ``stars[e]`` is the mask of vertices containing ground element bit ``e``.
    """

    ps: PartStructure
    vertices: tuple[int, ...]
    adj: tuple[int, ...]
    stars: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def all_mask(self) -> int:
        return (1 << len(self.vertices)) - 1

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def edges(self) -> int:
        return sum(a.bit_count() for a in self.adj) // 2

    def non_edges(self) -> list[tuple[int, int]]:
        """Pairs of disjoint members, i.e. the Kneser-product edges."""
        full = self.all_mask
        out = []
        for v, row in enumerate(self.adj):
            miss = full & ~row & ~(1 << v) & ~((1 << (v + 1)) - 1)
            while miss:
                low = miss & -miss
                out.append((v, low.bit_length() - 1))
                miss ^= low
        return out


def build_intersection_graph(ps: PartStructure, cap: int | None = None) -> IntersectionGraph:
    cap = vertex_cap() if cap is None else cap
    if ps.layer_size > cap:
        raise TooLarge(f"{ps.layer_size} vertices exceed the cap of {cap}")
    vertices = tuple(iter_layer_bits(ps, cap=None))
    stars = [0] * ps.ground_size
    for idx, b in enumerate(vertices):
        vbit = 1 << idx
        while b:
            low = b & -b
            stars[low.bit_length() - 1] |= vbit
            b ^= low
    adj = []
    for idx, b in enumerate(vertices):
        row = 0
        while b:
            low = b & -b
            row |= stars[low.bit_length() - 1]
            b ^= low
        adj.append(row & ~(1 << idx))
    return IntersectionGraph(ps, vertices, tuple(adj), tuple(stars))


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"


@dataclass
class SearchResult:
    status: Status
    size: int
    witness: Family
    mode: Mode
    nodes_explored: int = 0
    elapsed: float = 0.0
    engine: str = ""

    @property
    def ms(self) -> int:
        return round(self.elapsed * 1000)


def kneser_product_spectrum(ps: PartStructure) -> list[int]:
    """Distinct eigenvalues of the disjointness graph (tensor product of Kneser graphs).

    K(n, k) has eigenvalues (-1)^j C(n-k-j, k-j) for j = 0..k, and a tensor
    product's eigenvalues are the products of one eigenvalue per factor.
    """
    per_part = [[(-1) ** j * math.comb(n - k - j, k - j) if n - k - j >= 0 else 0 for j in range(k + 1)]
                for n, k in zip(ps.n, ps.k)]
    return sorted({math.prod(c) for c in itertools.product(*per_part)}, reverse=True)


def ratio_bound(ps: PartStructure) -> int | None:
    """Hoffman ratio bound on the largest intersecting family, exact.

    The disjointness graph is d-regular, so its independence number is at
    most N * (-lmin) / (d - lmin).  None when the graph has no edges.
    """
    eigen = kneser_product_spectrum(ps)
    d, lmin = eigen[0], eigen[-1]
    if d == 0:
        return None
    return ps.layer_size * -lmin // (d - lmin)


class _Ceiling(Exception):
    pass


def _bits_of(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class _BranchAndBound:
    """Colour-bounded clique search on a relabelled copy of the graph.

    Vertices are renumbered by descending degree (colex tie-break) so that
    the lowest bit is the highest-priority vertex.  In non-trivial mode the
    incumbent only accepts cliques with empty common intersection, and a
    node is cut when some element shared by the whole current clique is
    missed by none of the candidates.  With ``force_avoid`` the search
    instead branches only on candidates avoiding one shared element, which
    never enumerates large sub-stars and is much faster.

    Near the root the layer's symmetry is used through orbital branching.
    Intersecting searches start from the largest star, and a known upper
    bound (``ceiling``) stops the search as soon as the incumbent meets it.
    """

    def __init__(self, graph: IntersectionGraph, mode: Mode, force_avoid: bool = False,
                 ceiling: int | None = None):
        self.graph = graph
        self.mode = mode
        self.force_avoid = force_avoid
        n = len(graph)
        order = sorted(range(n), key=lambda v: (-graph.degree(v), graph.vertices[v]))
        self.order = order
        pos = {v: i for i, v in enumerate(order)}
        self.adj = [0] * n
        for v in range(n):
            row = 0
            for u in _bits_of(graph.adj[v]):
                row |= 1 << pos[u]
            self.adj[pos[v]] = row
        self.members = [graph.vertices[v] for v in order]
        ground = graph.ps.ground_size
        full = (1 << n) - 1
        # avoid[e]: relabelled vertices missing ground element e
        self.avoid = []
        for e in range(ground):
            star = 0
            for u in _bits_of(graph.stars[e]):
                star |= 1 << pos[u]
            self.avoid.append(full & ~star)
        self.ground_all = (1 << ground) - 1
        self.best_size = 0
        self.best_clique: list[int] = []
        self.nodes = 0
        # a proven upper bound: reaching it ends the search
        self.ceiling = ceiling

    def _colour(self, P: int, kmin: int) -> tuple[list[int], list[int]]:
        adj = self.adj
        verts: list[int] = []
        bounds: list[int] = []
        colour = 0
        U = P
        while U:
            colour += 1
            Q = U
            while Q:
                low = Q & -Q
                v = low.bit_length() - 1
                Q &= ~adj[v]
                Q ^= low
                U ^= low
                if colour >= kmin:
                    verts.append(v)
                    bounds.append(colour)
        return verts, bounds

    def _cover_prunes(self, P: int, slack: int) -> bool:
        """True if the number of classes in a greedy cover of ``P`` by independent sets,
        after trying to absorb each singleton class into another one (directly,
        or by moving its single conflict elsewhere first), is at most ``slack``.
        Any such cover bounds the clique size, and the repair matters when the
        disjointness graph is close to a matching.
        """
        adj = self.adj
        classes: list[int] = []
        U = P
        while U:
            Q = U
            C = 0
            while Q:
                low = Q & -Q
                Q &= ~adj[low.bit_length() - 1]
                Q ^= low
                C |= low
            U &= ~C
            classes.append(C)
        count = len(classes)
        if count <= slack:
            return True
        # A singleton can only go if some class meets its neighbourhood at most once.
        movable = []
        for i, S in enumerate(classes):
            if S & (S - 1) == 0:
                row = adj[S.bit_length() - 1]
                for j, C in enumerate(classes):
                    if j != i:
                        conf = row & C
                        if conf & (conf - 1) == 0:
                            movable.append(i)
                            break
        if count - len(movable) > slack:
            return False
        stuck = set()  # conflicts that found no class to move into; not re-tried
        left = len(movable)
        for i in movable:
            left -= 1
            S = classes[i]
            if S.bit_count() != 1:
                continue
            v = S.bit_length() - 1
            done = False
            for j, C in enumerate(classes):
                if j == i or not C:
                    continue
                conf = adj[v] & C
                if not conf:
                    classes[j] = C | S
                    done = True
                elif conf & (conf - 1) == 0:
                    w = conf.bit_length() - 1
                    if w in stuck:
                        continue
                    row = adj[w]
                    for h, D in enumerate(classes):
                        if h != i and h != j and D and not row & D:
                            classes[h] = D | conf
                            classes[j] = (C ^ conf) | S
                            done = True
                            break
                    else:
                        stuck.add(w)
                if done:
                    classes[i] = 0
                    count -= 1
                    if count <= slack:
                        return True
                    break
            if count - left > slack:
                return False
        return False

    def _accept(self, clique: list[int], common: int) -> None:
        if len(clique) <= self.best_size:
            return
        if self.mode is Mode.NONTRIVIAL and common:
            return
        self.best_size = len(clique)
        self.best_clique = list(clique)
        if self.ceiling is not None and self.best_size >= self.ceiling:
            raise _Ceiling

    def _doomed(self, P: int, common: int) -> bool:
        """True if every extension stays inside one star."""
        while common:
            low = common & -common
            if not P & self.avoid[low.bit_length() - 1]:
                return True
            common ^= low
        return False

    def run(self, symmetric: bool = True) -> None:
        full = (1 << len(self.adj)) - 1
        if self.mode is Mode.INTERSECTING:
            # Seed with the largest star; the ceiling often proves it optimal.
            star = max((full & ~a for a in self.avoid), key=int.bit_count, default=0)
            self.best_size = star.bit_count()
            self.best_clique = _bits_of(star)
            if self.ceiling is not None and self.best_size >= self.ceiling:
                return
        try:
            if symmetric:
                self._orbital([], self.ground_all, full, self.graph.ps.part_masks)
            else:
                self._inner([], self.ground_all, full)
        except _Ceiling:
            pass

    def _inner(self, clique: list[int], common: int, P: int) -> None:
        if self.force_avoid and self.mode is Mode.NONTRIVIAL:
            self._expand_avoid(clique, common, P)
        else:
            self._expand(clique, common, P)

    def _orbital(self, clique: list[int], common: int, P: int, atoms) -> None:
        """Orbital branching while the symmetry left is worth it.

        The part-preserving permutations fixing every member of ``clique``
        permute each atom of the Boolean algebra the members generate inside
        a part, so two candidates share an orbit iff they meet every atom in
        the same number of points.  ``P`` is invariant under that group as
        long as whole orbits are removed, and both modes are preserved, so
        one representative per orbit suffices.
        """
        self.nodes += 1
        branch = P
        if self.mode is Mode.NONTRIVIAL and common:
            if clique and self._doomed(P, common):
                return
            if self.force_avoid:
                # A non-trivial completion must avoid every point of a shared
                # atom, so it meets W.  W is a union of orbits: branch on it.
                best = None
                for a in atoms:
                    if a & common:
                        w = 0
                        for e in _bits_of(a):
                            w |= self.avoid[e]
                        w &= P
                        if best is None or w.bit_count() < best.bit_count():
                            best = w
                if not best:
                    return
                branch = best
        members = self.members
        orbits: dict[tuple[int, ...], int] = {}
        for u in _bits_of(branch):
            m = members[u]
            key = tuple((m & a).bit_count() for a in atoms)
            orbits[key] = orbits.get(key, 0) | 1 << u
        if 2 * len(orbits) > branch.bit_count():
            self._inner(clique, common, P)
            return
        size = len(clique)
        order = sorted(orbits.items(), key=lambda kv: (-(members[(kv[1] & -kv[1]).bit_length() - 1] & common).bit_count(), kv[0]))
        for _, orbit in order:
            _, bounds = self._colour(P, 1)
            if size + max(bounds) <= self.best_size or self._cover_prunes(P, self.best_size - size):
                return
            u = (orbit & -orbit).bit_length() - 1
            mu = members[u]
            clique.append(u)
            NP = P & self.adj[u]
            new_common = common & mu
            self._accept(clique, new_common)
            if NP:
                refined = [piece for a in atoms for piece in (a & mu, a & ~mu) if piece]
                self._orbital(clique, new_common, NP, refined)
            clique.pop()
            P &= ~orbit
            if not P:
                return

    def _expand(self, clique: list[int], common: int, P: int) -> None:
        self.nodes += 1
        nontrivial = self.mode is Mode.NONTRIVIAL
        if nontrivial and clique and self._doomed(P, common):
            return
        size = len(clique)
        verts, bounds = self._colour(P, self.best_size - size + 1)
        if not verts or self._cover_prunes(P, self.best_size - size):
            return
        adj, members = self.adj, self.members
        for idx in range(len(verts) - 1, -1, -1):
            if size + bounds[idx] <= self.best_size:
                return
            v = verts[idx]
            clique.append(v)
            new_common = common & members[v]
            NP = P & adj[v]
            if NP:
                self._expand(clique, new_common, NP)
            else:
                self._accept(clique, new_common)
            # Early incumbent: an interior clique that is already non-trivial.
            if NP and nontrivial and not new_common:
                self._accept(clique, new_common)
            clique.pop()
            P &= ~(1 << v)

    def _expand_avoid(self, clique: list[int], common: int, P: int) -> None:
        self.nodes += 1
        size = len(clique)
        if not common:
            # Already non-trivial: any clique extension qualifies, use the plain engine.
            self._accept(clique, common)
            if P:
                self._expand(clique, common, P)
            return
        if not P:
            return
        # Pick the shared element with the fewest candidates avoiding it.
        best_e, best_cnt = -1, None
        c = common
        while c:
            low = c & -c
            e = low.bit_length() - 1
            cnt = (P & self.avoid[e]).bit_count()
            if best_cnt is None or cnt < best_cnt:
                best_e, best_cnt = e, cnt
            c ^= low
        if best_cnt == 0:
            return
        _, bounds = self._colour(P, 1)
        if size + max(bounds) <= self.best_size or self._cover_prunes(P, self.best_size - size):
            return
        branch = P & self.avoid[best_e]
        adj, members = self.adj, self.members
        for v in _bits_of(branch):
            # Everything skipped so far avoids best_e too, and was branched on already.
            if size + 1 + (P & adj[v]).bit_count() <= self.best_size:
                P &= ~(1 << v)
                continue
            clique.append(v)
            self._expand_avoid(clique, common & members[v], P & adj[v])
            clique.pop()
            P &= ~(1 << v)

    def witness(self) -> Family:
        return Family._trusted(self.graph.ps, (self.members[v] for v in self.best_clique))


def _result(graph: IntersectionGraph, mode: Mode, size: int, witness: Family,
            nodes: int, start: float, engine: str) -> SearchResult:
    status = Status.OPTIMAL if size > 0 else Status.INFEASIBLE
    return SearchResult(status, size, witness, mode, nodes, time.perf_counter() - start, engine)


def max_family(ps: PartStructure, mode: Mode | str = Mode.INTERSECTING, *,
               graph: IntersectionGraph | None = None, strategy: str = "avoid",
               cap: int | None = None, symmetric: bool = True, ceiling: bool = True) -> SearchResult:
    """Exact maximum intersecting (or non-trivially intersecting) family.

    ``strategy`` only matters in non-trivial mode: ``"avoid"`` branches on
    candidates missing a shared element, ``"filter"`` runs the plain search
    and only lets non-trivial cliques become the incumbent.  Both are exact.
    ``symmetric=False`` turns off orbital branching, and ``ceiling=False``
    stops using the ratio bound as an early exit.
    """
    mode = Mode(mode)
    if strategy not in ("avoid", "filter"):
        raise ValueError(f"unknown strategy {strategy!r}")
    start = time.perf_counter()
    graph = graph or build_intersection_graph(ps, cap)
    top = ratio_bound(graph.ps) if ceiling else None
    bb = _BranchAndBound(graph, mode, force_avoid=strategy == "avoid", ceiling=top)
    bb.run(symmetric)
    engine = "bitset-bb" if mode is Mode.INTERSECTING else f"bitset-bb-{strategy}"
    return _result(graph, mode, bb.best_size, bb.witness(), bb.nodes, start, engine)


# ------------------------------------------------------------------ reports


def instance_dict(ps: PartStructure) -> dict:
    return {"n": list(ps.n), "k": list(ps.k)}


def _m_max_or_none(ps: PartStructure):
    from .formulas import NoAdmissiblePair, m_max

    try:
        return m_max(ps)[0]
    except NoAdmissiblePair:
        return None


def result_to_dict(ps: PartStructure, result: SearchResult) -> dict:
    """JSON form of a search result, with the matching closed-form value."""
    out = {"instance": instance_dict(ps), "mode": result.mode.value, "size": result.size,
           "status": result.status.value}
    if result.mode is Mode.NONTRIVIAL:
        target = _m_max_or_none(ps)
        out["m_max"] = target
        out["matches_m_max"] = None if target is None else result.size == target
    elif ps.ekr_regime:
        from .formulas import frankl_bound

        out["frankl_bound"] = frankl_bound(ps)
        out["matches_frankl"] = result.size == out["frankl_bound"]
    out["ratio_bound"] = ratio_bound(ps)
    out["nodes"] = result.nodes_explored
    out["ms"] = result.ms
    out["engine"] = result.engine
    return out


@dataclass
class InstanceReport:
    """Search results for one instance next to the closed forms.

    ``nontrivial_vs_m_max`` is ``"equal"``, ``"exceeds"`` (search beat the
    construction), ``"below"`` (would contradict the construction) or
    ``"undefined"`` when no admissible pair exists.
    """

    ps: PartStructure
    intersecting: SearchResult
    nontrivial: SearchResult
    frankl: int | None
    m_max: int | None
    oracle_sizes: dict = field(default_factory=dict)
    witnesses_ok: bool = True

    @property
    def frankl_ok(self) -> bool | None:
        if self.frankl is None:
            return None
        return self.intersecting.size == self.frankl

    @property
    def nontrivial_vs_m_max(self) -> str:
        if self.m_max is None:
            return "undefined"
        size = self.nontrivial.size
        return "equal" if size == self.m_max else ("exceeds" if size > self.m_max else "below")

    @property
    def oracle_ok(self) -> bool | None:
        if not self.oracle_sizes:
            return None
        return (self.oracle_sizes["intersecting"] == self.intersecting.size
                and self.oracle_sizes["nontrivial"] == self.nontrivial.size)

    @property
    def ok(self) -> bool:
        # "exceeds" is a finding about the construction, not a failure.
        return (self.frankl_ok is not False and self.oracle_ok is not False
                and self.witnesses_ok and self.nontrivial_vs_m_max != "below")

    def to_dict(self) -> dict:
        return {
            "instance": instance_dict(self.ps),
            "ekr_regime": self.ps.ekr_regime,
            "intersecting": self.intersecting.size,
            "frankl_bound": self.frankl,
            "frankl_ok": self.frankl_ok,
            "nontrivial": self.nontrivial.size,
            "nontrivial_status": self.nontrivial.status.value,
            "m_max": self.m_max,
            "nontrivial_vs_m_max": self.nontrivial_vs_m_max,
            "witnesses_ok": self.witnesses_ok,
            "oracle": self.oracle_sizes or None,
            "oracle_ok": self.oracle_ok,
            "ok": self.ok,
        }


def witness_ok(result: SearchResult) -> bool:
    cls = classify_bits(result.witness.bits)
    if len(result.witness) != result.size:
        return False
    if result.size == 0:
        return result.status is Status.INFEASIBLE
    if result.mode is Mode.NONTRIVIAL:
        return cls is FamilyClass.NONTRIVIAL
    return cls in (FamilyClass.TRIVIAL, FamilyClass.NONTRIVIAL)


def verify_instance(ps: PartStructure, *, oracle: bool = True, cap: int | None = None) -> InstanceReport:
    """Run both modes, compare with the Frankl bound and M^max, and cross-check with the oracle when small enough."""
    from .formulas import frankl_bound

    graph = build_intersection_graph(ps, cap)
    inter = max_family(ps, Mode.INTERSECTING, graph=graph)
    nontriv = max_family(ps, Mode.NONTRIVIAL, graph=graph)
    report = InstanceReport(
        ps, inter, nontriv,
        frankl_bound(ps) if ps.ekr_regime else None,
        _m_max_or_none(ps),
        witnesses_ok=witness_ok(inter) and witness_ok(nontriv),
    )
    if oracle and ps.layer_size <= ORACLE_MILP_CAP:
        from .oracle import oracle_max

        report.oracle_sizes = {m.value: oracle_max(ps, m).size for m in Mode}
    return report
