"""Explicit (near-)extremal families.

Every constructor builds a membership predicate on bitmasks and then either
materialises the family (layer under the cap) or hands back a
:class:`~multipart_ekr.core.FamilyView` over the same predicate.
"""
from __future__ import annotations

from typing import Callable, Sequence

from .core import (
    Element,
    Family,
    FamilyError,
    FamilyView,
    PartStructure,
    StructureMismatch,
    iter_layer_bits,
    layer_cap,
    structure,
)
from .formulas import ExcludedPair, TSPair, check_L


class InfeasibleWitnesses(FamilyError, ValueError):
    pass


def _build(ps: PartStructure, pred: Callable[[int], bool], label: str, lazy: bool | None):
    too_big = ps.layer_size > layer_cap()
    if lazy or (lazy is None and too_big):
        return FamilyView(ps, pred, label)
    return Family._trusted(ps, (b for b in iter_layer_bits(ps) if pred(b)))


def _first(ps: PartStructure, s: int, m: int) -> int:
    """Mask of ``[m]`` in part ``s``."""
    return ((1 << m) - 1) << ps.offsets[s - 1]


def _span(ps: PartStructure, s: int, lo: int, hi: int) -> int:
    """Mask of ``{lo, ..., hi}`` in part ``s`` (empty when ``hi < lo``)."""
    return _first(ps, s, hi) & ~_first(ps, s, lo - 1) if hi >= lo else 0


def ekr_family(n: int, k: int, lazy: bool | None = None):
    ps = structure([n], [k])
    return frankl_product(ps, 1, lazy=lazy)


def frankl_product(ps: PartStructure, t: int, lazy: bool | None = None):
    """All members whose part-``t`` set contains 1."""
    if not 1 <= t <= ps.p:
        raise StructureMismatch(f"t={t} is not a part")
    one = ps.bit(t, 1)
    return _build(ps, lambda b: bool(b & one), f"frankl t={t}", lazy)


def hilton_milner_family(n: int, k: int, lazy: bool | None = None):
    """``{2..k+1}`` together with every set containing 1 that meets it."""
    ps = structure([n], [k])
    return f_hm_t_S(ps, TSPair(ps, 1, ()), allow_trivial=True, lazy=lazy)


def f_hm_t_S(ps: PartStructure, ts: TSPair, allow_trivial: bool = False, lazy: bool | None = None):
    if ts.excluded and not allow_trivial:
        raise ExcludedPair(f"{ts} gives a trivially intersecting family for k={ps.k}")
    t, S = ts.t, sorted(ts.S)
    kt = ps.k[t - 1]
    one = ps.bit(t, 1)
    tmask = ps.part_masks[t - 1]
    s_first = [(ps.part_masks[s - 1], _first(ps, s, ps.k[s - 1])) for s in S]

    if kt > 1:
        avoid_t = _span(ps, t, 2, kt + 1)

        def pred(b: int) -> bool:
            if b & tmask == avoid_t and all(b & pm == m for pm, m in s_first):
                return True
            return bool(b & one) and (bool(b & avoid_t) or any(b & m for _, m in s_first))
    else:
        def pred(b: int) -> bool:
            if all(b & pm == m for pm, m in s_first):
                return True
            return b & tmask == one and any(b & m for _, m in s_first)

    return _build(ps, pred, repr(ts), lazy)


def alt_family(n1: int, n2: int, k1: int, k2: int, lazy: bool | None = None):
    """The two-part counterexample family: ``f_hm_t_S`` with ``t=1, S={2}``."""
    ps = structure([n1, n2], [k1, k2])
    return f_hm_t_S(ps, TSPair(ps, 1, {2}), lazy=lazy)


def y_ell(ps: PartStructure, t: int, ell: Sequence[int]) -> int:
    """Witness mask: ``{2..ell_t+1}`` in part ``t`` and ``[ell_s]`` elsewhere."""
    mask = 0
    for s, e in zip(ps.parts(), ell):
        mask |= _span(ps, s, 2, e + 1) if s == t else _first(ps, s, e)
    return mask


def f_t_ell(ps: PartStructure, t: int, ell: Sequence[int], lazy: bool | None = None):
    ell = check_L(ps, t, ell)
    one = ps.bit(t, 1)
    y = y_ell(ps, t, ell)
    return _build(ps, lambda b: (bool(b & one) and bool(b & y)) or b & y == y,
                  f"F_t,ell t={t} ell={ell}", lazy)


def triangle_family(ps: PartStructure, x: Element, y: Element, z: Element, lazy: bool | None = None):
    """All members containing at least two of ``x, y, z``."""
    witnesses = [x, y, z]
    for e in witnesses:
        ps.check_element(e)
    if len(set(witnesses)) < 3:
        raise InfeasibleWitnesses("witnesses must be pairwise distinct")
    for s in ps.parts():
        here = sum(1 for e in witnesses if e.part == s)
        if here >= 2 and ps.k[s - 1] < 2:
            raise InfeasibleWitnesses(f"part {s} holds {here} witnesses but k={ps.k[s - 1]} < 2")
    masks = [ps.element_bit(e) for e in witnesses]
    return _build(ps, lambda b: sum(1 for m in masks if b & m) >= 2,
                  f"triangle {x},{y},{z}", lazy)
