"""Shifts ``S_t^{i,j}``, shiftedness, closures and projections.

All work is done on bitmask members; a shift in part ``t`` moves bit ``j``
to bit ``i`` of that part when the target is free and the result is not
already in the family.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .core import (
    Family,
    FamilyClass,
    FamilyError,
    MultiPartSet,
    PartialSet,
    PartStructure,
    StructureMismatch,
    classify_bits,
    common_bits,
)


class InvalidShiftIndex(FamilyError, ValueError):
    pass


class NotNontrivial(FamilyError, ValueError):
    pass


@dataclass(frozen=True, order=True)
class ShiftIndex:
    t: int
    i: int
    j: int

    def validate(self, ps: PartStructure) -> None:
        if not 1 <= self.t <= ps.p:
            raise InvalidShiftIndex(f"part {self.t} does not exist")
        if not 1 <= self.i < self.j <= ps.n[self.t - 1]:
            raise InvalidShiftIndex(f"need 1 <= i < j <= {ps.n[self.t - 1]}, got i={self.i}, j={self.j}")

    def masks(self, ps: PartStructure) -> tuple[int, int]:
        return ps.bit(self.t, self.i), ps.bit(self.t, self.j)


def shift_indices(ps: PartStructure, parts: Iterable[int] | None = None) -> Iterator[ShiftIndex]:
    """Every shift of the requested parts in sweep order (t, then i, then j)."""
    for t in sorted(parts) if parts is not None else ps.parts():
        n = ps.n[t - 1]
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                yield ShiftIndex(t, i, j)


def _shift_bits(b: int, bi: int, bj: int) -> int:
    return b ^ bi ^ bj if b & bj and not b & bi else b


def _shift_family_bits(members: frozenset[int], bi: int, bj: int) -> frozenset[int]:
    out = set()
    for b in members:
        moved = _shift_bits(b, bi, bj)
        out.add(b if moved != b and moved in members else moved)
    return frozenset(out)


def _is_stable(members: frozenset[int], bi: int, bj: int) -> bool:
    for b in members:
        if b & bj and not b & bi and (b ^ bi ^ bj) not in members:
            return False
    return True


def shift_set(ps: PartStructure, idx: ShiftIndex, F: MultiPartSet) -> MultiPartSet:
    idx.validate(ps)
    if F.ps != ps:
        raise StructureMismatch("set belongs to a different part structure")
    return MultiPartSet(ps, _shift_bits(F.bits, *idx.masks(ps)))


def shift_family(ps: PartStructure, idx: ShiftIndex, family: Family) -> Family:
    idx.validate(ps)
    if family.ps != ps:
        raise StructureMismatch("family belongs to a different part structure")
    return Family._trusted(ps, _shift_family_bits(family.bitset, *idx.masks(ps)))


def is_shifted(ps: PartStructure, family: Family, parts: Iterable[int] | None = None) -> bool:
    members = family.bitset
    return all(_is_stable(members, *idx.masks(ps)) for idx in shift_indices(ps, parts))


def unstable_parts(ps: PartStructure, family: Family) -> list[int]:
    return [t for t in ps.parts() if not is_shifted(ps, family, [t])]


def shifted_closure(ps: PartStructure, family: Family) -> Family:
    """Sweep all shifts until a full pass changes nothing."""
    members = family.bitset
    indices = [idx.masks(ps) for idx in shift_indices(ps)]
    changed = True
    while changed:
        changed = False
        for bi, bj in indices:
            if not _is_stable(members, bi, bj):
                members = _shift_family_bits(members, bi, bj)
                changed = True
    return Family._trusted(ps, members)


def family_order(family: Family) -> int:
    """Sum of all element values (1-based, within their part) over all members."""
    total = 0
    ps = family.ps
    for b in family.bits:
        for vals in ps.unpack(b):
            total += sum(vals)
    return total


@dataclass
class QReport:
    family: Family
    Q: frozenset[int]
    witnesses: dict[int, ShiftIndex] = field(default_factory=dict)
    steps: int = 0


def _nontrivial_after_shift(members: frozenset[int]) -> bool:
    # Shifts preserve the intersecting property, so only the common part can change.
    return common_bits(members) == 0


def stabilize_nontrivial(ps: PartStructure, family: Family) -> QReport:
    """Apply shifts that keep the family non-trivially intersecting until none is left.

    Shifts are tried in sweep order and the first admissible one is applied,
    after which the sweep restarts.  The result is ``Q``-shifted: shifted in
    every part of ``Q``, and for each other part ``s`` the reported witness
    shift makes the family trivially intersecting.
    """
    if classify_bits(family.bits) is not FamilyClass.NONTRIVIAL:
        raise NotNontrivial(f"input classifies as {classify_bits(family.bits).value}")
    members = family.bitset
    indices = [(idx, *idx.masks(ps)) for idx in shift_indices(ps)]
    steps = 0
    progress = True
    while progress:
        progress = False
        for _, bi, bj in indices:
            if _is_stable(members, bi, bj):
                continue
            shifted = _shift_family_bits(members, bi, bj)
            if _nontrivial_after_shift(shifted):
                members = shifted
                steps += 1
                progress = True
                break
    result = Family._trusted(ps, members)
    Q = set()
    witnesses = {}
    for t in ps.parts():
        movers = [idx for idx, bi, bj in indices if idx.t == t and not _is_stable(members, bi, bj)]
        if not movers:
            Q.add(t)
        else:
            # Every remaining effective shift trivialises; the least one is the witness.
            witnesses[t] = min((idx.i, idx.j, idx) for idx in movers)[2]
    return QReport(result, frozenset(Q), witnesses, steps)


# ---------------------------------------------------------------- projections


def project(ps: PartStructure, F) -> PartialSet:
    """Restriction of every part ``s`` to its first ``2 k_s`` values."""
    return PartialSet(ps, F.bits & ps.projection_mask)


def project_family(ps: PartStructure, family: Family) -> frozenset[PartialSet]:
    return frozenset(PartialSet(ps, b & ps.projection_mask) for b in family.bits)


def check_projection_lemma(ps: PartStructure, family: Family) -> bool:
    """Whether every pair of projections (a member with itself included) intersects."""
    projections = list({b & ps.projection_mask for b in family.bits})
    if any(q == 0 for q in projections):
        return False
    for i, a in enumerate(projections):
        for b in projections[i + 1:]:
            if not a & b:
                return False
    return True
