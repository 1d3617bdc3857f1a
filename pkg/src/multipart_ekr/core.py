"""Ground-set model, multi-part sets, families and layer enumeration.

A part structure fixes ``p`` parts of sizes ``n_1..n_p`` and uniformities
``k_1..k_p``.  Element ``(s, v)`` of the disjoint union lives at bit
``offset(s) + v - 1`` of a Python int, so a multi-part set is a bitmask and
two sets intersect iff ``a & b`` is non-zero.  Comparing those ints gives the
colexicographic order used everywhere as the canonical order.

Part indices and element values are 1-based throughout.
"""
from __future__ import annotations

import enum
import itertools
import json
import os
from dataclasses import dataclass, field
from functools import cached_property
from math import comb, prod
from typing import Callable, Iterable, Iterator, Sequence

DEFAULT_LAYER_CAP = 10**7
LAYER_CAP_ENV = "MULTIPART_EKR_LAYER_CAP"


class FamilyError(Exception):
    """Base class for all errors raised by this package."""


class ZeroOrNegative(FamilyError, ValueError):
    pass


class UniformityTooLarge(FamilyError, ValueError):
    pass


class StructureMismatch(FamilyError, ValueError):
    pass


class LayerTooLarge(FamilyError):
    pass


class ParseError(FamilyError, ValueError):
    pass


def layer_cap() -> int:
    """The enumeration cap, overridable through ``MULTIPART_EKR_LAYER_CAP``."""
    raw = os.environ.get(LAYER_CAP_ENV)
    return int(raw) if raw else DEFAULT_LAYER_CAP


@dataclass(frozen=True)
class Element:
    part: int
    value: int

    def __str__(self) -> str:
        return f"{self.value}@{self.part}"


@dataclass(frozen=True)
class PartStructure:
    """Instance parameters ``(n_s)`` and ``(k_s)``; use :func:`make_part_structure`."""

    n: tuple[int, ...]
    k: tuple[int, ...]

    @property
    def p(self) -> int:
        return len(self.n)

    @property
    def ekr_regime(self) -> bool:
        return all(2 * k <= n for n, k in zip(self.n, self.k))

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        return tuple(itertools.accumulate(self.n[:-1], initial=0))

    @property
    def ground_size(self) -> int:
        return sum(self.n)

    @cached_property
    def part_masks(self) -> tuple[int, ...]:
        return tuple(((1 << n) - 1) << off for n, off in zip(self.n, self.offsets))

    @cached_property
    def projection_mask(self) -> int:
        """Bits of the first ``2 k_s`` elements of every part."""
        mask = 0
        for n, k, off in zip(self.n, self.k, self.offsets):
            mask |= ((1 << min(2 * k, n)) - 1) << off
        return mask

    @property
    def layer_size(self) -> int:
        return prod(comb(n, k) for n, k in zip(self.n, self.k))

    def parts(self) -> range:
        return range(1, self.p + 1)

    def bit(self, part: int, value: int) -> int:
        return 1 << (self.offsets[part - 1] + value - 1)

    def element_bit(self, e: Element) -> int:
        self.check_element(e)
        return self.bit(e.part, e.value)

    def check_element(self, e: Element) -> None:
        if not 1 <= e.part <= self.p or not 1 <= e.value <= self.n[e.part - 1]:
            raise StructureMismatch(f"element {e} outside the ground set")

    def elements(self) -> Iterator[Element]:
        for s in self.parts():
            for v in range(1, self.n[s - 1] + 1):
                yield Element(s, v)

    def element_of_bit(self, index: int) -> Element:
        for s, off in enumerate(self.offsets, start=1):
            if index < off + self.n[s - 1]:
                return Element(s, index - off + 1)
        raise StructureMismatch(f"bit {index} outside the ground set")

    def pack(self, parts: Sequence[Iterable[int]]) -> int:
        if len(parts) != self.p:
            raise StructureMismatch(f"expected {self.p} parts, got {len(parts)}")
        bits = 0
        for s, values in enumerate(parts, start=1):
            for v in values:
                if not 1 <= v <= self.n[s - 1]:
                    raise StructureMismatch(f"value {v} outside part {s} of size {self.n[s - 1]}")
                bits |= self.bit(s, v)
        return bits

    def unpack(self, bits: int) -> tuple[tuple[int, ...], ...]:
        out = []
        for n, off in zip(self.n, self.offsets):
            chunk = (bits >> off) & ((1 << n) - 1)
            out.append(tuple(v + 1 for v in range(n) if chunk >> v & 1))
        return tuple(out)

    def part_sizes(self, bits: int) -> tuple[int, ...]:
        return tuple((bits & m).bit_count() for m in self.part_masks)

    def is_member_bits(self, bits: int) -> bool:
        return self.part_sizes(bits) == self.k and bits >> self.ground_size == 0

    def make_set(self, parts: Sequence[Iterable[int]]) -> MultiPartSet:
        return MultiPartSet.from_bits(self, self.pack(parts))

    def make_partial(self, parts: Sequence[Iterable[int]]) -> PartialSet:
        return PartialSet.from_bits(self, self.pack(parts))


def make_part_structure(p: int, n: Sequence[int], k: Sequence[int]) -> PartStructure:
    if p < 1:
        raise ZeroOrNegative("p must be at least 1")
    if len(n) != p or len(k) != p:
        raise StructureMismatch(f"n and k must have length p={p}")
    for s, (ns, ks) in enumerate(zip(n, k), start=1):
        if ns < 1 or ks < 1:
            raise ZeroOrNegative(f"part {s}: n={ns}, k={ks} must be positive")
        if ks > ns:
            raise UniformityTooLarge(f"part {s}: k={ks} exceeds n={ns}")
    return PartStructure(tuple(int(x) for x in n), tuple(int(x) for x in k))


def structure(n: Sequence[int], k: Sequence[int]) -> PartStructure:
    """Shorthand for ``make_part_structure(len(n), n, k)``."""
    return make_part_structure(len(n), n, k)


@dataclass(frozen=True, eq=False)
class _PackedSet:
    ps: PartStructure
    bits: int

    @classmethod
    def from_bits(cls, ps: PartStructure, bits: int):
        obj = cls(ps, bits)
        obj._validate()
        return obj

    def _validate(self) -> None:
        if self.bits < 0 or self.bits >> self.ps.ground_size:
            raise StructureMismatch("bits outside the ground set")

    @property
    def parts(self) -> tuple[tuple[int, ...], ...]:
        return self.ps.unpack(self.bits)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __eq__(self, other) -> bool:
        if not isinstance(other, _PackedSet):
            return NotImplemented
        return self.ps == other.ps and self.bits == other.bits

    def __hash__(self) -> int:
        return hash((self.ps, self.bits))

    def __lt__(self, other: _PackedSet) -> bool:
        return self.bits < other.bits

    def __contains__(self, e: Element) -> bool:
        return bool(self.bits & self.ps.element_bit(e))

    def elements(self) -> list[Element]:
        return [Element(s, v) for s, vals in enumerate(self.parts, start=1) for v in vals]

    def __repr__(self) -> str:
        inner = " | ".join("{" + ",".join(map(str, vals)) + "}" for vals in self.parts)
        return f"{type(self).__name__}({inner})"


class MultiPartSet(_PackedSet):
    """A member of the layer: exactly ``k_s`` values in every part ``s``."""

    def _validate(self) -> None:
        super()._validate()
        sizes = self.ps.part_sizes(self.bits)
        if sizes != self.ps.k:
            raise StructureMismatch(f"part sizes {sizes} do not match k={self.ps.k}")


class PartialSet(_PackedSet):
    """At most ``k_s`` values in part ``s`` (projections, witness sets)."""

    def _validate(self) -> None:
        super()._validate()
        sizes = self.ps.part_sizes(self.bits)
        if any(z > k for z, k in zip(sizes, self.ps.k)):
            raise StructureMismatch(f"part sizes {sizes} exceed k={self.ps.k}")


class Family:
    """Deduplicated collection of layer members, kept in colex order."""

    __slots__ = ("ps", "_bits", "_bitset")

    def __init__(self, ps: PartStructure, members: Iterable[MultiPartSet | int] = ()):
        bits = set()
        for m in members:
            if isinstance(m, _PackedSet):
                if m.ps != ps:
                    raise StructureMismatch("member belongs to a different part structure")
                b = m.bits
            else:
                b = int(m)
            if not ps.is_member_bits(b):
                raise StructureMismatch(f"{ps.unpack(b)} is not a layer member")
            bits.add(b)
        self.ps = ps
        self._bitset = frozenset(bits)
        self._bits = tuple(sorted(bits))

    @classmethod
    def _trusted(cls, ps: PartStructure, bits: Iterable[int]) -> Family:
        obj = cls.__new__(cls)
        obj.ps = ps
        obj._bitset = frozenset(bits)
        obj._bits = tuple(sorted(obj._bitset))
        return obj

    @classmethod
    def from_parts(cls, ps: PartStructure, sets: Iterable[Sequence[Iterable[int]]]) -> Family:
        return cls(ps, (ps.pack(s) for s in sets))

    @property
    def bits(self) -> tuple[int, ...]:
        return self._bits

    @property
    def bitset(self) -> frozenset[int]:
        return self._bitset

    def members(self) -> list[MultiPartSet]:
        return [MultiPartSet(self.ps, b) for b in self._bits]

    def __iter__(self) -> Iterator[MultiPartSet]:
        return (MultiPartSet(self.ps, b) for b in self._bits)

    def __len__(self) -> int:
        return len(self._bits)

    def __contains__(self, item) -> bool:
        if isinstance(item, _PackedSet):
            return item.ps == self.ps and item.bits in self._bitset
        return item in self._bitset

    def __eq__(self, other) -> bool:
        if not isinstance(other, Family):
            return NotImplemented
        return self.ps == other.ps and self._bitset == other._bitset

    def __hash__(self) -> int:
        return hash((self.ps, self._bitset))

    def __repr__(self) -> str:
        return f"Family(n={self.ps.n}, k={self.ps.k}, size={len(self)})"

    def as_lists(self) -> list[list[list[int]]]:
        return [[list(vals) for vals in self.ps.unpack(b)] for b in self._bits]


class FamilyView:
    """Predicate-backed family over a layer too large to materialise.

    Supports membership tests and a streaming count; :meth:`materialize`
    builds a real :class:`Family` when the layer fits under the cap.
    """

    def __init__(self, ps: PartStructure, predicate: Callable[[int], bool], label: str = ""):
        self.ps = ps
        self.predicate = predicate
        self.label = label

    def __contains__(self, item) -> bool:
        bits = item.bits if isinstance(item, _PackedSet) else int(item)
        return self.ps.is_member_bits(bits) and self.predicate(bits)

    def count(self) -> int:
        return sum(1 for b in iter_layer_bits(self.ps, cap=None) if self.predicate(b))

    def materialize(self, cap: int | None = None) -> Family:
        return Family._trusted(self.ps, (b for b in iter_layer_bits(self.ps, cap=cap) if self.predicate(b)))

    def __repr__(self) -> str:
        return f"FamilyView({self.label or 'predicate'}, n={self.ps.n}, k={self.ps.k})"


class FamilyClass(str, enum.Enum):
    EMPTY = "empty"
    NOT_INTERSECTING = "not_intersecting"
    TRIVIAL = "trivial"
    NONTRIVIAL = "nontrivial"


class _Empty:
    """Marker returned by :func:`common_elements` for the empty family."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "EMPTY"

    def __bool__(self) -> bool:
        return False


EMPTY = _Empty()


def _check_same(a: _PackedSet, b: _PackedSet) -> None:
    if a.ps != b.ps:
        raise StructureMismatch("sets belong to different part structures")


def intersects(a: _PackedSet, b: _PackedSet) -> bool:
    _check_same(a, b)
    return bool(a.bits & b.bits)


def common_bits(bits: Iterable[int]) -> int | None:
    """AND of all masks, or ``None`` if there are none."""
    acc = None
    for b in bits:
        acc = b if acc is None else acc & b
        if acc == 0:
            return 0
    return acc


def common_elements(family: Family) -> frozenset[Element] | _Empty:
    acc = common_bits(family.bits)
    if acc is None:
        return EMPTY
    return frozenset(family.ps.element_of_bit(i) for i in range(acc.bit_length()) if acc >> i & 1)


def is_intersecting_bits(bits: Sequence[int]) -> bool:
    # Deduplicate first: equal members trivially intersect each other.
    distinct = list(set(bits))
    for i, a in enumerate(distinct):
        for b in distinct[i + 1:]:
            if not a & b:
                return False
    return True


def classify_bits(bits: Sequence[int]) -> FamilyClass:
    if not bits:
        return FamilyClass.EMPTY
    if not is_intersecting_bits(bits):
        return FamilyClass.NOT_INTERSECTING
    return FamilyClass.TRIVIAL if common_bits(bits) else FamilyClass.NONTRIVIAL


def classify(family: Family) -> FamilyClass:
    return classify_bits(family.bits)


def _colex_combinations(n: int, k: int) -> list[int]:
    """All ``k``-subsets of ``range(n)`` as bitmasks, in increasing (colex) order."""
    return sorted(sum(1 << i for i in c) for c in itertools.combinations(range(n), k))


def iter_layer_bits(ps: PartStructure, cap: int | None = -1) -> Iterator[int]:
    """Stream layer members as bitmasks in colex order.

    ``cap=-1`` uses :func:`layer_cap`; ``cap=None`` disables the check.
    """
    if cap == -1:
        cap = layer_cap()
    if cap is not None and ps.layer_size > cap:
        raise LayerTooLarge(f"layer has {ps.layer_size} members, cap is {cap}")
    per_part = [[c << off for c in _colex_combinations(n, k)]
                for n, k, off in zip(ps.n, ps.k, ps.offsets)]
    # The last part holds the most significant bits, so it varies slowest.
    for combo in itertools.product(*reversed(per_part)):
        yield sum(combo)


def enumerate_layer(ps: PartStructure, cap: int | None = -1) -> Iterator[MultiPartSet]:
    for b in iter_layer_bits(ps, cap):
        yield MultiPartSet(ps, b)


def full_layer(ps: PartStructure, cap: int | None = -1) -> Family:
    return Family._trusted(ps, iter_layer_bits(ps, cap))


def count_supersets(ps: PartStructure, z: _PackedSet) -> int:
    """Number of layer members containing ``z``."""
    if z.ps != ps:
        raise StructureMismatch("partial set belongs to a different part structure")
    return prod(comb(n - zs, k - zs) for n, k, zs in zip(ps.n, ps.k, ps.part_sizes(z.bits)))


def star_bits(ps: PartStructure, e: Element, cap: int | None = -1) -> list[int]:
    mask = ps.element_bit(e)
    return [b for b in iter_layer_bits(ps, cap) if b & mask]


# ---------------------------------------------------------------- JSON format


def family_to_dict(family: Family) -> dict:
    return {
        "parts": [{"n": n, "k": k} for n, k in zip(family.ps.n, family.ps.k)],
        "sets": family.as_lists(),
    }


def dumps_family(family: Family, indent: int | None = None) -> str:
    return json.dumps(family_to_dict(family), indent=indent, separators=None if indent else (",", ":"))


def family_from_dict(data: dict) -> Family:
    try:
        parts = data["parts"]
        n = [int(part["n"]) for part in parts]
        k = [int(part["k"]) for part in parts]
        sets = data["sets"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed family document: {exc}") from exc
    ps = make_part_structure(len(n), n, k)
    if not isinstance(sets, list):
        raise ParseError("'sets' must be a list")
    members = []
    for entry in sets:
        if not isinstance(entry, list) or not all(isinstance(x, list) for x in entry):
            raise ParseError(f"set {entry!r} must be a list of per-part lists")
        for vals in entry:
            if list(vals) != sorted(set(vals)):
                raise ParseError(f"part values {vals!r} must be strictly increasing")
        members.append(ps.pack(entry))
    return Family(ps, members)


def loads_family(text: str) -> Family:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc)) from exc
    if not isinstance(data, dict):
        raise ParseError("family document must be a JSON object")
    return family_from_dict(data)


def permute_ground_set(family: Family, perms: dict[int, dict[int, int]]) -> Family:
    """Relabel values inside parts; ``perms[s]`` maps old value to new value.

    Parts missing from ``perms`` keep the identity labelling.
    """
    ps = family.ps
    out = []
    for parts in map(ps.unpack, family.bits):
        new_parts = []
        for s, vals in enumerate(parts, start=1):
            mapping = perms.get(s, {})
            new_parts.append(sorted(mapping.get(v, v) for v in vals))
        out.append(ps.pack(new_parts))
    return Family(ps, out)
