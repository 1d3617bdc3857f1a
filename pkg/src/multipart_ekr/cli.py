"""Command-line entry point: ``multipart-ekr <subcommand> ...``.

Exit codes: 0 success, 1 a verification failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from . import constructions as C
from . import formulas as fm
from .core import (
    Element,
    Family,
    FamilyError,
    FamilyView,
    classify,
    dumps_family,
    loads_family,
    structure,
)
from .reproduce import SUITES, run as run_suite
from .search import Mode, max_family, result_to_dict, verify_instance, witness_ok
from .shifting import (
    ShiftIndex,
    check_projection_lemma,
    family_order,
    is_shifted,
    shift_family,
    shifted_closure,
    stabilize_nontrivial,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class UsageError(Exception):
    pass


def int_list(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def element(text: str) -> Element:
    """``part:value``, e.g. ``2:1``."""
    try:
        s, v = text.split(":")
        return Element(int(s), int(v))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected part:value, got {text!r}")


def _instance(args):
    if args.n is None or args.k is None:
        raise UsageError("--n and --k are required")
    return structure(args.n, args.k)


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def _fmt(value) -> str:
    if isinstance(value, dict) and set(value) == {"n", "k"}:
        return f"n={value['n']} k={value['k']}"
    return str(value)


def _read_family(path: str) -> Family:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}")
    return loads_family(text)


def _write_family(family: Family, out: str | None) -> None:
    text = dumps_family(family)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


# ------------------------------------------------------------- subcommands


def cmd_formula(args) -> int:
    ps = _instance(args)
    if args.t is not None and args.ell is not None:
        value = fm.m_t_ell(ps, args.t, args.ell)
        _emit(args, {"t": args.t, "ell": args.ell, "m_t_ell": value}, f"M_(t={args.t}, ell={args.ell}) = {value}")
        return EXIT_OK
    if args.t is not None:
        ts = fm.TSPair(ps, args.t, args.S or ())
        value = fm.m_hm_t_S(ps, ts)
        payload = {"t": ts.t, "S": sorted(ts.S), "excluded": ts.excluded, "m_hm_t_S": value}
        note = " (excluded pair)" if ts.excluded else ""
        _emit(args, payload, f"M^HM_(t={ts.t}, S={sorted(ts.S)}) = {value}{note}")
        return EXIT_OK
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", fm.OutsideEKRRegime)
        frankl = fm.frankl_bound(ps)
    try:
        best, args_max = fm.m_max(ps)
    except fm.NoAdmissiblePair:
        best, args_max = None, []
    payload = {
        "instance": {"n": list(ps.n), "k": list(ps.k)},
        "layer_size": ps.layer_size,
        "ekr_regime": ps.ekr_regime,
        "frankl_bound": frankl,
        "m_max": best,
        "maximisers": [{"t": a.t, "S": sorted(a.S)} for a in args_max],
    }
    lines = [
        f"instance     n={list(ps.n)} k={list(ps.k)}",
        f"layer size   {ps.layer_size}",
        f"EKR regime   {ps.ekr_regime}",
        f"Frankl bound {frankl}" + ("" if ps.ekr_regime else "  (not extremal outside the EKR regime)"),
        f"M^max        {best if best is not None else 'undefined (no admissible pair)'}",
    ]
    if args_max:
        lines.append("maximisers   " + ", ".join(f"t={a.t} S={sorted(a.S)}" for a in args_max))
    if args.table:
        rows = [{"t": ts.t, "S": sorted(ts.S), "excluded": ts.excluded, "value": fm.m_hm_t_S(ps, ts)}
                for ts in fm.ts_pairs(ps, include_excluded=True)]
        payload["pairs"] = rows
        lines.append("")
        lines.append(f"{'t':>3}  {'S':<14} {'M^HM_(t,S)':>12}")
        for r in rows:
            flag = "  excluded" if r["excluded"] else ""
            lines.append(f"{r['t']:>3}  {str(r['S']):<14} {r['value']:>12}{flag}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _construct(args):
    kind = args.kind
    if kind == "star":
        if len(args.n) != 1:
            raise UsageError("star takes a single part")
        return C.ekr_family(args.n[0], args.k[0])
    if kind == "hm":
        if len(args.n) != 1:
            raise UsageError("hm takes a single part")
        return C.hilton_milner_family(args.n[0], args.k[0])
    ps = _instance(args)
    if kind == "frankl":
        return C.frankl_product(ps, args.t or 1)
    if kind == "hm-ts":
        if args.t is None:
            raise UsageError("hm-ts needs --t")
        return C.f_hm_t_S(ps, fm.TSPair(ps, args.t, args.S or ()), allow_trivial=args.allow_trivial)
    if kind == "t-ell":
        if args.t is None or args.ell is None:
            raise UsageError("t-ell needs --t and --ell")
        return C.f_t_ell(ps, args.t, args.ell)
    if kind == "triangle":
        if not (args.x and args.y and args.z):
            raise UsageError("triangle needs --x, --y and --z")
        return C.triangle_family(ps, args.x, args.y, args.z)
    raise UsageError(f"unknown construction {kind!r}")


def cmd_construct(args) -> int:
    family = _construct(args)
    if isinstance(family, FamilyView):
        raise UsageError(f"layer too large to materialise ({family.ps.layer_size} members); raise the cap")
    _write_family(family, args.out)
    if args.out:
        print(f"wrote {len(family)} sets to {args.out}", file=sys.stderr)
    return EXIT_OK


def describe(family: Family) -> dict:
    ps = family.ps
    cls = classify(family)
    shifted = is_shifted(ps, family)
    out = {
        "instance": {"n": list(ps.n), "k": list(ps.k)},
        "size": len(family),
        "class": cls.value,
        "shifted": shifted,
        "order": family_order(family),
    }
    # The projection statement is about shifted intersecting families only.
    if shifted and cls.value in ("trivial", "nontrivial"):
        out["projection_lemma"] = check_projection_lemma(ps, family)
    else:
        out["projection_lemma"] = None
    return out


def cmd_verify(args) -> int:
    info = describe(_read_family(args.path))
    proj = info["projection_lemma"]
    text = (f"size {info['size']}, {info['class']}, shifted={str(info['shifted']).lower()}, "
            f"projection lemma={'n/a' if proj is None else str(proj).lower()}")
    _emit(args, info, text)
    return EXIT_OK


def cmd_shift(args) -> int:
    family = _read_family(args.path)
    idx = ShiftIndex(args.t, args.i, args.j)
    idx.validate(family.ps)
    _write_family(shift_family(family.ps, idx, family), args.out)
    return EXIT_OK


def cmd_closure(args) -> int:
    family = _read_family(args.path)
    ps = family.ps
    if args.nontrivial:
        rep = stabilize_nontrivial(ps, family)
        _write_family(rep.family, args.out)
        wit = ", ".join(f"part {s}: ({w.i},{w.j})" for s, w in sorted(rep.witnesses.items()))
        print(f"Q={sorted(rep.Q)} steps={rep.steps}" + (f" blocking shifts: {wit}" if wit else ""),
              file=sys.stderr)
    else:
        _write_family(shifted_closure(ps, family), args.out)
    return EXIT_OK


def cmd_search(args) -> int:
    ps = _instance(args)
    if args.verify:
        rep = verify_instance(ps, oracle=not args.no_oracle)
        d = rep.to_dict()
        lines = [f"{key:<20} {_fmt(value)}" for key, value in d.items()]
        _emit(args, d, "\n".join(lines))
        return EXIT_OK if rep.ok else EXIT_FAIL
    res = max_family(ps, args.mode, strategy=args.strategy,
                     symmetric=not args.no_orbits, ceiling=not args.no_ceiling)
    d = result_to_dict(ps, res)
    if args.witness:
        d["witness"] = json.loads(dumps_family(res.witness))
    lines = [f"{key:<14} {_fmt(value)}" for key, value in d.items() if key != "witness"]
    if args.witness:
        lines += ["witness"] + [f"  {m}" for m in res.witness.as_lists()]
    _emit(args, d, "\n".join(lines))
    return EXIT_OK if witness_ok(res) else EXIT_FAIL


def cmd_reproduce(args) -> int:
    report = run_suite(args.suite, p=tuple(args.p), n_max=args.n_max)
    _emit(args, report.to_dict(), report.table())
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_selftest(args) -> int:
    """Quick smoke check of each module against known values."""
    checks = []
    ps = structure([5, 5], [2, 2])
    fam = C.f_hm_t_S(ps, fm.TSPair(ps, 1, {2}))
    checks.append(("binomial(50,25)", fm.binomial(50, 25), 126410606437752))
    checks.append(("m_hm(7,3)", fm.m_hm(7, 3), 13))
    checks.append(("|F_(1,{2})| on (5,5,2,2)", len(fam), 35))
    checks.append(("round trip", dumps_family(loads_family(dumps_family(fam))), dumps_family(fam)))
    hm = C.hilton_milner_family(5, 2)
    checks.append(("HM(5,2) shifted", is_shifted(hm.ps, hm), True))
    checks.append(("search (3,3,3,1,1,1) nontrivial", max_family(structure([3] * 3, [1] * 3), Mode.NONTRIVIAL).size, 7))
    checks.append(("search (5,5,2,2) intersecting", max_family(ps).size, 40))
    failed = 0
    for name, got, want in checks:
        ok = got == want
        failed += not ok
        if not args.json:
            print(f"{'ok ' if ok else 'FAIL'} {name}")
    if args.json:
        print(json.dumps({"checks": len(checks), "failed": failed}))
    return EXIT_OK if not failed else EXIT_FAIL


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multipart-ekr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def instance_args(p, required=True):
        p.add_argument("--n", type=int_list, required=required, help="part sizes, e.g. 5,5")
        p.add_argument("--k", type=int_list, required=required, help="uniformities, e.g. 2,2")

    def json_flag(p):
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("formula", help="evaluate closed forms")
    instance_args(p)
    p.add_argument("--t", type=int)
    p.add_argument("--S", type=int_list)
    p.add_argument("--ell", type=int_list)
    p.add_argument("--table", action="store_true", help="list every (t,S) value")
    json_flag(p)
    p.set_defaults(func=cmd_formula)

    p = sub.add_parser("construct", help="build a family and write it as JSON")
    p.add_argument("kind", choices=["star", "hm", "frankl", "hm-ts", "t-ell", "triangle"])
    instance_args(p)
    p.add_argument("--t", type=int, help="special part")
    p.add_argument("--S", type=int_list, help="part set S, e.g. 2,3")
    p.add_argument("--ell", type=int_list, help="l-vector, e.g. 2,1")
    p.add_argument("--x", type=element, help="triangle witness as part:value")
    p.add_argument("--y", type=element, help="triangle witness as part:value")
    p.add_argument("--z", type=element, help="triangle witness as part:value")
    p.add_argument("--allow-trivial", action="store_true", help="permit excluded (t,S) pairs")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="classify a family file")
    p.add_argument("path", help="family JSON, or - for stdin")
    json_flag(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("shift", help="apply one shift S_t^(i,j)")
    p.add_argument("path")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_shift)

    p = sub.add_parser("closure", help="shift until stable")
    p.add_argument("path")
    p.add_argument("--nontrivial", action="store_true",
                   help="only take shifts that keep the family non-trivial and report Q")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("search", help="exact maximum family by branch and bound")
    instance_args(p)
    p.add_argument("--mode", choices=[m.value for m in Mode], default="nontrivial")
    p.add_argument("--strategy", choices=["avoid", "filter"], default="avoid")
    p.add_argument("--witness", action="store_true", help="include an optimal family")
    p.add_argument("--verify", action="store_true", help="both modes, closed forms and oracle")
    p.add_argument("--no-oracle", action="store_true")
    p.add_argument("--no-orbits", action="store_true", help="plain branch and bound, no orbital branching")
    p.add_argument("--no-ceiling", action="store_true", help="do not stop early at the ratio bound")
    json_flag(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("reproduce", help="recompute a bundle of claims")
    p.add_argument("suite", choices=SUITES + ("all",))
    p.add_argument("--p", type=int_list, default=[3, 4], help="part counts for k1-table")
    p.add_argument("--n-max", type=int, default=4)
    json_flag(p)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("selftest", help="fast smoke check")
    json_flag(p)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (FamilyError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
