"""Exact size formulas and bounds.

Every value here is an ``int`` or a :class:`fractions.Fraction`; there is no
floating point in this module, so each (in)equality it reports is decided
exactly.
"""
from __future__ import annotations

import itertools
import math
import warnings
from fractions import Fraction
from math import prod
from typing import Iterable, Sequence

from .core import FamilyError, PartStructure, StructureMismatch


class NegativeN(FamilyError, ValueError):
    pass


class OutOfRange(FamilyError, ValueError):
    pass


class NotInLt(FamilyError, ValueError):
    pass


class NoAdmissiblePair(FamilyError, ValueError):
    pass


class BadParameters(FamilyError, ValueError):
    pass


class ExcludedPair(FamilyError, ValueError):
    pass


class OutsideEKRRegime(UserWarning):
    pass


def binomial(n: int, k: int) -> int:
    """``C(n, k)``, zero when ``k < 0`` or ``k > n``."""
    if n < 0:
        raise NegativeN(f"binomial with negative n={n}")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def _c(n: int, k: int) -> int:
    # Boundary-tolerant variant used inside the size formulas: any n < 0 counts as empty.
    return 0 if n < 0 or k < 0 or k > n else math.comb(n, k)


def m_ekr(n: int, k: int) -> int:
    return binomial(n - 1, k - 1)


def m_hm(n: int, k: int) -> int:
    """Largest non-trivially intersecting k-uniform family on ``[n]`` (for 2 <= k < n/2)."""
    if not 1 <= k <= n:
        raise OutOfRange(f"m_hm needs 1 <= k <= n, got n={n}, k={k}")
    return _c(n - 1, k - 1) - _c(n - k - 1, k - 1) + 1


# ----------------------------------------------------------------- (t, S) pairs


class TSPair:
    """A star part ``t`` and a set ``S`` of other parts (1-based)."""

    __slots__ = ("t", "S", "excluded")

    def __init__(self, ps: PartStructure, t: int, S: Iterable[int] = ()):
        S = frozenset(int(s) for s in S)
        if not 1 <= t <= ps.p:
            raise StructureMismatch(f"t={t} is not a part of a {ps.p}-part structure")
        if t in S:
            raise StructureMismatch(f"S must not contain t={t}")
        if any(not 1 <= s <= ps.p for s in S):
            raise StructureMismatch(f"S={sorted(S)} contains an invalid part")
        self.t = t
        self.S = S
        kt = ps.k[t - 1]
        self.excluded = (not S and kt == 1) or (
            len(S) == 1 and kt == 1 and ps.k[next(iter(S)) - 1] == 1
        )

    def key(self) -> tuple:
        return (self.t, len(self.S), tuple(sorted(self.S)))

    def __eq__(self, other) -> bool:
        return isinstance(other, TSPair) and (self.t, self.S) == (other.t, other.S)

    def __hash__(self) -> int:
        return hash((self.t, self.S))

    def __repr__(self) -> str:
        return f"TSPair(t={self.t}, S={{{','.join(map(str, sorted(self.S)))}}})"


def ts_pairs(ps: PartStructure, include_excluded: bool = False) -> list[TSPair]:
    """All ``(t, S)`` pairs in canonical order: ``t``, then ``|S|``, then sorted ``S``."""
    out = []
    for t in ps.parts():
        others = [s for s in ps.parts() if s != t]
        for r in range(len(others) + 1):
            for S in itertools.combinations(others, r):
                pair = TSPair(ps, t, S)
                if include_excluded or not pair.excluded:
                    out.append(pair)
    return out


def m_hm_t_S(ps: PartStructure, ts: TSPair) -> int:
    n, k, t, S = ps.n, ps.k, ts.t, ts.S
    rest = prod(_c(n[s - 1], k[s - 1]) for s in ps.parts() if s != t and s not in S)
    full_S = prod(_c(n[s - 1], k[s - 1]) for s in S)
    avoid_S = prod(_c(n[s - 1] - k[s - 1], k[s - 1]) for s in S)
    nt, kt = n[t - 1], k[t - 1]
    if kt > 1:
        core = _c(nt - 1, kt - 1) * full_S - _c(nt - kt - 1, kt - 1) * avoid_S + 1
    else:
        core = full_S - avoid_S + (nt - 1)
    return core * rest


# ------------------------------------------------------------------ L_t vectors


def in_L(ps: PartStructure, t: int, ell: Sequence[int]) -> bool:
    if len(ell) != ps.p or any(not 0 <= e <= k for e, k in zip(ell, ps.k)):
        return False
    total = sum(ell)
    kt, lt = ps.k[t - 1], ell[t - 1]
    if total < 2:
        return False
    if kt == 1 and lt != 0:
        return False
    if total > 2 and kt > 1 and lt != kt:
        return False
    return True


def check_L(ps: PartStructure, t: int, ell: Sequence[int]) -> tuple[int, ...]:
    if not 1 <= t <= ps.p:
        raise StructureMismatch(f"t={t} is not a part")
    if not in_L(ps, t, ell):
        raise NotInLt(f"ell={tuple(ell)} is not in L_{t} for k={ps.k}")
    return tuple(int(e) for e in ell)


def L_vectors(ps: PartStructure, t: int) -> list[tuple[int, ...]]:
    ranges = [range(k + 1) for k in ps.k]
    return [ell for ell in itertools.product(*ranges) if in_L(ps, t, ell)]


def ell_of_S(ps: PartStructure, ts: TSPair) -> tuple[int, ...]:
    t = ts.t
    return tuple(
        k if (s == t and k > 1) or s in ts.S else 0
        for s, k in zip(ps.parts(), ps.k)
    )


def m_t_ell(ps: PartStructure, t: int, ell: Sequence[int]) -> int:
    ell = check_L(ps, t, ell)
    n, k = ps.n, ps.k
    nt, kt, lt = n[t - 1], k[t - 1], ell[t - 1]
    others = [s for s in ps.parts() if s != t]
    inside = _c(nt - lt - 1, kt - lt) * prod(_c(n[s - 1] - ell[s - 1], k[s - 1] - ell[s - 1]) for s in others)
    star = _c(nt - 1, kt - 1) * prod(_c(n[s - 1], k[s - 1]) for s in others)
    star_avoiding = _c(nt - lt - 1, kt - 1) * prod(_c(n[s - 1] - ell[s - 1], k[s - 1]) for s in others)
    return inside + star - star_avoiding


# ------------------------------------------------------------- bounds, maxima


def m_max(ps: PartStructure) -> tuple[int, list[TSPair]]:
    """Maximum of ``m_hm_t_S`` over admissible pairs, with every maximiser."""
    pairs = ts_pairs(ps)
    if not pairs:
        raise NoAdmissiblePair(f"no admissible (t, S) for k={ps.k}")
    values = [(m_hm_t_S(ps, ts), ts) for ts in pairs]
    best = max(v for v, _ in values)
    return best, [ts for v, ts in values if v == best]


def frankl_bound(ps: PartStructure) -> int:
    if not ps.ekr_regime:
        warnings.warn(f"k={ps.k}, n={ps.n} is outside the EKR regime; the bound is not extremal there",
                      OutsideEKRRegime, stacklevel=2)
    return max(
        _c(ps.n[t - 1] - 1, ps.k[t - 1] - 1)
        * prod(_c(ps.n[s - 1], ps.k[s - 1]) for s in ps.parts() if s != t)
        for t in ps.parts()
    )


def k1_formula(n: int, p: int) -> int:
    """Largest non-trivially intersecting family in ``[n]^p`` with all k=1 (p >= 3)."""
    return n ** (p - 1) - (n - 1) ** (p - 1) + n - 1


def alon_katona_value(ps: PartStructure) -> int:
    """Best single-part Hilton-Milner product, ``max_t m_hm(n_t, k_t) * prod_{s != t} C(n_s, k_s)``."""
    return max(
        m_hm(ps.n[t - 1], ps.k[t - 1]) * prod(_c(ps.n[s - 1], ps.k[s - 1]) for s in ps.parts() if s != t)
        for t in ps.parts()
    )


# ----------------------------------------------------- finite numeric checks


def g_values(b: int, d: int, gamma: Fraction, y_max: int) -> list[Fraction]:
    gamma = Fraction(gamma)
    return [math.comb(y, b) - gamma * math.comb(y, b + d) for y in range(y_max + 1)]


def is_unimodal_g(b: int, d: int, gamma, y_max: int) -> bool:
    """Whether ``C(y, b) - gamma C(y, b + d)`` on ``0..y_max`` never rises after falling."""
    gamma = Fraction(gamma)
    if b < 1 or d < 0 or gamma <= 0 or y_max < b + d:
        raise BadParameters(f"need b>=1, d>=0, gamma>0, y_max>=b+d; got {b}, {d}, {gamma}, {y_max}")
    seq = g_values(b, d, gamma, y_max)
    fallen = False
    for prev, cur in zip(seq, seq[1:]):
        if cur < prev:
            fallen = True
        elif cur > prev and fallen:
            return False
    return True


def case2_f(k1: int, k2: int, k3: int) -> Fraction:
    if min(k1, k2, k3) < 1:
        raise BadParameters("all arguments must be positive")
    return Fraction(k1 * k1 + k2 * k2 + k1 * k3 + k2 * k3, 2 * (k1 + k2 + k3))


CASE2_THRESHOLD = Fraction(11, 10)


def triangle_size(ps: PartStructure, x, y, z) -> int:
    """Layer members containing at least two of three elements, by inclusion-exclusion."""
    def supersets(*elems) -> int:
        bits = 0
        for e in elems:
            bits |= ps.element_bit(e)
        sizes = ps.part_sizes(bits)
        return prod(_c(n - zs, k - zs) for n, k, zs in zip(ps.n, ps.k, sizes))

    pairs = supersets(x, y) + supersets(x, z) + supersets(y, z)
    return pairs - 2 * supersets(x, y, z)
