"""One-shot reproduction bundles: each claim is recomputed and compared."""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .constructions import f_hm_t_S, triangle_family
from .core import Element, FamilyClass, classify, structure
from .formulas import (
    CASE2_THRESHOLD,
    TSPair,
    binomial,
    case2_f,
    is_unimodal_g,
    k1_formula,
    m_hm,
    m_hm_t_S,
    triangle_size,
)
from .search import Mode, max_family

SUITES = ("counterexample", "k1-table", "hm-table", "identities")
HM_CASES = ((5, 2), (6, 2), (7, 3), (8, 3))


@dataclass
class Claim:
    id: str
    anchor: str
    computed: object
    expected: object
    status: str  # pass | fail | recorded

    def to_dict(self) -> dict:
        return {"id": self.id, "anchor": self.anchor, "computed": _plain(self.computed),
                "expected": _plain(self.expected), "status": self.status}


def _plain(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, FamilyClass):
        return value.value
    return value


def _check(id: str, anchor: str, computed, expected) -> Claim:
    return Claim(id, anchor, computed, expected, "pass" if computed == expected else "fail")


@dataclass
class ReproductionReport:
    suite: str
    claims: list[Claim] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def failed(self) -> list[Claim]:
        return [c for c in self.claims if c.status == "fail"]

    @property
    def ok(self) -> bool:
        return not self.failed

    def to_dict(self) -> dict:
        return {"suite": self.suite, "ok": self.ok, "elapsed_ms": round(self.elapsed * 1000),
                "claims": [c.to_dict() for c in self.claims]}

    def table(self) -> str:
        rows = [("claim", "anchor", "computed", "expected", "status")]
        for c in self.claims:
            rows.append((c.id, c.anchor, str(_plain(c.computed)), str(_plain(c.expected)), c.status))
        widths = [max(len(r[i]) for r in rows) for i in range(5)]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
        lines.insert(1, "  ".join("-" * w for w in widths))
        verdict = "PASS" if self.ok else f"FAIL ({len(self.failed)} claims)"
        lines.append(f"{self.suite}: {verdict} in {self.elapsed:.2f}s")
        return "\n".join(lines)


# ------------------------------------------------------------------- suites


def counterexample(exact: bool = True) -> list[Claim]:
    ps = structure([5, 5], [2, 2])
    ts = TSPair(ps, 1, {2})
    value = m_hm_t_S(ps, ts)
    fam = f_hm_t_S(ps, ts)
    product = [m_hm_t_S(ps, TSPair(ps, t, ())) for t in (1, 2)]
    claims = [
        _check("counterexample.m_hm_t_S", "(5,5,2,2) t=1 S={2}", value, 35),
        _check("counterexample.family_size", "(5,5,2,2) t=1 S={2}", len(fam), 35),
        _check("counterexample.family_class", "(5,5,2,2) t=1 S={2}", classify(fam), FamilyClass.NONTRIVIAL),
        _check("counterexample.product_values", "m_hm(5,2)*C(5,2) per side", product,
               [m_hm(5, 2) * binomial(5, 2)] * 2),
        _check("counterexample.inequality", "35 > 30", value > max(product), True),
    ]
    if exact:
        res = max_family(ps, Mode.NONTRIVIAL)
        # Only recorded: the construction is not claimed optimal at n=5.
        claims.append(Claim("counterexample.exact_optimum", "exact non-trivial optimum",
                            res.size, value, "recorded"))
    return claims


def k1_table(ps_list=(3, 4), n_max: int = 4, n_min: int = 2) -> list[Claim]:
    claims = []
    for p in ps_list:
        for n in range(n_min, n_max + 1):
            ps = structure([n] * p, [1] * p)
            got = max_family(ps, Mode.NONTRIVIAL).size
            claims.append(_check(f"k1.p{p}.n{n}", "n^(p-1)-(n-1)^(p-1)+n-1", got, k1_formula(n, p)))
    return claims


def hm_table(cases=HM_CASES) -> list[Claim]:
    claims = []
    for n, k in cases:
        got = max_family(structure([n], [k]), Mode.NONTRIVIAL).size
        claims.append(_check(f"hm.n{n}.k{k}", "Hilton-Milner value", got, m_hm(n, k)))
    return claims


def triangle_grid() -> tuple[int, list]:
    bad, checked = [], 0
    x, y, z = Element(1, 1), Element(2, 1), Element(3, 1)
    for n1 in range(3, 9):
        for n2 in range(2, 9):
            for n3 in range(n2, 9):
                ps = structure([n1, n2, n3], [2, 1, 1])
                size = len(triangle_family(ps, x, y, z))
                checked += 1
                if size != triangle_size(ps, x, y, z) or \
                        m_hm_t_S(ps, TSPair(ps, 2, {1, 3})) - size != (n3 - n2) * (n1 - 2):
                    bad.append((n1, n2, n3))
    return checked, bad


def q2_grid() -> tuple[int, list]:
    bad, checked = [], 0
    x, y, z = Element(1, 1), Element(1, 2), Element(2, 1)
    for n1 in range(4, 9):
        for n2 in range(2, 9):
            ps = structure([n1, n2], [2, 1])
            checked += 1
            if len(triangle_family(ps, x, y, z)) != m_hm_t_S(ps, TSPair(ps, 2, {1})):
                bad.append((n1, n2))
    return checked, bad


def case2_scan(top: int = 6) -> tuple[list, list]:
    """Triples in ``[1, top]^3`` with at most one 1: (below threshold, exactly at it)."""
    below, equal = [], []
    for ks in itertools.product(range(1, top + 1), repeat=3):
        if ks.count(1) > 1:
            continue
        value = case2_f(*ks)
        if value < CASE2_THRESHOLD:
            below.append(ks)
        elif value == CASE2_THRESHOLD:
            equal.append(ks)
    return below, equal


UNIMODAL_GAMMAS = (Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(4))


def unimodal_scan(y_max: int = 200) -> list:
    return [(b, d, g) for b in range(1, 6) for d in range(0, 5) for g in UNIMODAL_GAMMAS
            if not is_unimodal_g(b, d, g, y_max)]


def identities() -> list[Claim]:
    n_tri, bad_tri = triangle_grid()
    n_q2, bad_q2 = q2_grid()
    below, equal = case2_scan()
    bad_g = unimodal_scan()
    return [
        _check("identities.triangle", f"(n3-n2)(n1-2) over {n_tri} instances", bad_tri, []),
        _check("identities.triangle_q2", f"q=2 size equals t=2 S={{1}} over {n_q2} instances", bad_q2, []),
        _check("identities.case2_threshold", "f >= 11/10 on [1,6]^3 with at most one 1", below, []),
        _check("identities.case2_equality", "f(1,2,2) = 11/10", (1, 2, 2) in equal, True),
        _check("identities.unimodality", "g_{b,d,gamma} unimodal, y <= 200", bad_g, []),
    ]


def run(suite: str, p=(3, 4), n_max: int = 4) -> ReproductionReport:
    if suite != "all" and suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES + ('all',))}")
    start = time.perf_counter()
    report = ReproductionReport(suite)
    wanted = SUITES if suite == "all" else (suite,)
    for name in wanted:
        if name == "counterexample":
            report.claims += counterexample()
        elif name == "k1-table":
            report.claims += k1_table(p, n_max)
        elif name == "hm-table":
            report.claims += hm_table()
        else:
            report.claims += identities()
    report.elapsed = time.perf_counter() - start
    return report
