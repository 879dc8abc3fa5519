"""Command-line harness: ``obstrukt <command> [flags]``.

JSON goes to stdout by default; ``--csv`` switches tables to CSV and
``--md`` switches the report to markdown.  The exit status is 1 when a
stored expectation is contradicted, 2 on usage errors, 0 otherwise.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field

from sympy import primerange

from . import actions, brauer, reproduce, treecompat as tc
from .groups import GroupError, build_tilde_a5, sl2
from .nielsen import Q0, class_record, enumerate_classes, orbits, product_order_census


@dataclass
class RunReport:
    command: str
    inputs: dict
    computed: dict
    expectations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def expect(self, name: str, expected, computed):
        row = reproduce.expectations()
        cite = next((r["citation"] for r in row.values() if r["name"] == name), name)
        self.expectations.append({"check": name, "citation": cite, "expected": expected,
                                  "computed": computed, "match": expected == computed})

    @property
    def ok(self) -> bool:
        return all(e["match"] for e in self.expectations)

    def to_json(self) -> dict:
        return {"command": self.command, "inputs": self.inputs, "computed": self.computed,
                "expectations": self.expectations, "warnings": self.warnings, "ok": self.ok}


class UsageError(Exception):
    pass


def _group(name: str):
    """'a5tilde' -> (group, extension); 'sl2:l' -> (group, None)."""
    if name == "a5tilde":
        ext = build_tilde_a5()
        return ext.total, ext
    if name.startswith("sl2:"):
        try:
            return sl2(int(name[4:])), None
        except (ValueError, GroupError) as exc:
            raise UsageError(str(exc)) from None
    raise UsageError(f"unknown group {name!r}; use a5tilde or sl2:<odd prime>")


def _classes(G, text: str) -> list[str]:
    labels = [x.strip() for x in text.split(",") if x.strip()]
    known = [c.label for c in G.conjugacy_classes]
    for lbl in labels:
        if lbl not in known:
            raise UsageError(f"unknown class label {lbl!r}; known labels: {', '.join(known)}")
        try:
            G.class_by_label(lbl)
        except GroupError as exc:
            raise UsageError(str(exc)) from None
    return labels


def _fmt(G, ext):
    return ext.format_lift if ext is not None else G.format


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: ";".join(map(str, v)) if isinstance(v, list) else v for k, v in r.items()})
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands


def cmd_census(args) -> tuple[RunReport, list[dict]]:
    G, ext = _group(args.group)
    cv = _classes(G, args.classes)
    found = enumerate_classes(G, cv, jobs=args.jobs)
    records = [class_record(G, t, cv, fmt=_fmt(G, ext)) for t in found]
    computed = {"count": len(found)}
    if len(cv) == 4:
        computed["census"] = {str(k): v for k, v in product_order_census(G, found).items()}
    computed["classes"] = records
    rep = RunReport("census", {"group": args.group, "classes": cv}, computed)
    if args.group == "a5tilde" and cv == ["3A"] * 4:
        exp = reproduce.expectations()[1]["expected"]
        rep.expect("nielsen_census", exp, {"count": computed["count"], "census": computed["census"]})
    if G.kind == "sl2" and cv == ["4A", f"{G.param}A", f"{G.param}B"]:
        rep.expect("sl2_rigidity", 1, len(found))
    return rep, records


def cmd_orbits(args):
    G, ext = _group(args.group)
    cv = _classes(G, args.classes)
    found = enumerate_classes(G, cv, jobs=args.jobs)
    try:
        orbs = orbits(G, Q0, found)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = []
    for n, orb in enumerate(orbs):
        for t in orb:
            rec = class_record(G, t, cv, orbit_id=n, fmt=_fmt(G, ext))
            if len(t) == 4:
                rec["g5_class"] = G.class_of(G.mul(t[0], t[1])).label
            rows.append(rec)
    computed = {"orbit_lengths": [len(o) for o in orbs], "classes": rows}
    rep = RunReport("orbits", {"group": args.group, "classes": cv, "braid": "Q1 Q3"}, computed)
    if args.group == "a5tilde" and cv == ["3A"] * 4:
        chk = reproduce.check_orbits()
        rep.expect("inertia_orbits", chk.expected, chk.computed)
    return rep, rows


_VALUE = {
    2: ("(-1,-d)", 5),
    3: ("(-1,d)", -3),
}


def cmd_case_analysis(args):
    ext = build_tilde_a5()
    G = ext.total
    d = args.d
    if d == 0 or brauer.squarefree_part(d) != d:
        raise UsageError(f"--d must be a squarefree nonzero integer, got {d}")
    found = reproduce.census_classes(args.jobs)
    orbs = orbits(G, Q0, found)
    orbit_of = {t: n for n, o in enumerate(orbs) for t in o}
    rows = []
    for t in found:
        case = actions.case_of(G, t)
        if args.case and case != args.case:
            continue
        prof = actions.moduli_profile(G, t)
        D = actions.constant_field(prof)
        row = class_record(G, t, ["3A"] * 4, orbit_id=orbit_of[t], fmt=ext.format_lift)
        row.update({
            "case": case,
            "k_min": prof.k_min,
            "chi_modulus": prof.modulus,
            "admissible_chi_eps": sorted([list(x) for x in prof.chi_constraints]),
            "constant_field": "Q" if D == 1 else f"Q(sqrt({D}))",
        })
        if case == 1:
            res = actions.case1_residue_class(d)
            row["residue"] = str(res.value) if not res.is_trivial else "0"
            if res.is_trivial:
                val = brauer.witt_obstruction(-1, 3)
                row["value"] = {"symbol": "(-1,-1)", **val.to_json()}
                row["value_nonzero"] = not val.is_zero
            else:
                row["value"] = None
        else:
            vanish = actions.residue_vanishes_by_order(prof.witnesses_k, ext)
            row["residue"] = "0" if vanish else "undecided"
            sym, field = _VALUE[case]
            a, b = (-1, -d) if case == 2 else (-1, d)
            s = brauer.symbol(a, b, brauer.FieldLabel.quadratic(field))
            row["value"] = {"symbol": sym, "field": str(s.field), "arguments": [s.a, s.b],
                            "trivial_by_squares": brauer.symbol_trivial_given_squares(s)}
        rows.append(row)
    rep = RunReport("case-analysis", {"case": args.case, "d": d}, {"classes": rows})
    counts = {str(c): sum(r["case"] == c for r in rows) for c in (1, 2, 3)}
    rep.computed["case_counts"] = counts
    if not args.case:
        exp = reproduce.expectations()[1]["expected"]["census"]
        rep.expect("nielsen_census", {"1": exp["1"], "2": exp["10"], "3": exp["6"]}, counts)
    for r in rows:
        if r["case"] == 1 and d == -1:
            rep.expect("residue_cocycle", {"residue": "0", "value_nonzero": True},
                       {"residue": r["residue"], "value_nonzero": r.get("value_nonzero")})
        if r["case"] in (2, 3):
            rep.expect("cases_2_3", {"k_min": {2: 5, 3: 3}[r["case"]], "residue": "0"},
                       {"k_min": r["k_min"], "residue": r["residue"]})
    return rep, rows


def cmd_specialize(args):
    d = args.d
    if d == 0 or brauer.squarefree_part(d) != d:
        raise UsageError(f"--d must be a squarefree nonzero integer, got {d}")
    rows = []
    for p in primerange(7, args.pmax + 1):
        if d % p == 0:
            continue
        rows.append(actions.specialization_obstruction(d, p).csv_row())
    rep = RunReport("specialize", {"d": d, "pmax": args.pmax}, {"rows": rows})
    rep.expect("specialization_table", True, all(r["agrees_with_standard_convention"] for r in rows))
    if d == 1:
        rep.expect("specialization_table", True,
                   all((r["obstruction"] == -1) == (r["p"] % 4 == 3) for r in rows))
    return rep, rows


def cmd_rigidity(args):
    ell = args.ell
    try:
        G = sl2(ell)
        G.class_by_label("4A")
    except GroupError as exc:
        raise UsageError(str(exc)) from None
    found = enumerate_classes(G, ["4A", f"{ell}A", f"{ell}B"], jobs=args.jobs)
    computed = {"count": len(found), "classes": [[G.format(g) for g in t] for t in found]}
    rep = RunReport("rigidity", {"ell": ell}, computed)
    if len(found) == 1:
        ch = actions.normalizer_chain(G, jobs=args.jobs)
        computed.update({"n": ch.n, "normalizer_order": ch.normalizer_order,
                         "nbar": ch.nbar_type, "n_over_h": ch.n_over_h_type,
                         "obstruction": {"symbol": "(-1,-1)", **ch.obstruction.to_json()}})
    if ell in (5, 11, 13):
        rep.expect("sl2_rigidity", 1, len(found))
    if str(ell) in reproduce.expectations()[9]["expected"] and len(found) == 1:
        rep.expect("normalizer_chain", reproduce.expectations()[9]["expected"][str(ell)],
                   {"n": computed["n"], "nbar": computed["nbar"], "n_over_h": computed["n_over_h"]})
    return rep, []


def cmd_tree_check(args):
    try:
        with open(args.tree, encoding="utf-8") as fh:
            data = json.load(fh)
        tree, endo = tc.load_tree_check(data)
    except (OSError, json.JSONDecodeError, tc.TreeError, KeyError) as exc:
        raise UsageError(f"cannot load {args.tree}: {exc}") from None
    res = tc.is_compatible(tree, endo, window=data.get("window"))
    computed = tc.compatibility_json(endo.F, res)
    computed["verified"] = tc.verify_compatibility(tree, endo, res) if res.compatible else None
    computed["order_valid"] = tc.validate_order(tree)
    rep = RunReport("tree-check", {"tree": os.path.basename(args.tree)}, computed)
    if res.status == "undecided":
        rep.warnings.append(f"undecided: {res.reason}")
    if res.compatible:
        rep.expect("tree_compatibility", True, computed["verified"])
    if "expect" in data and res.status != "undecided":
        rep.expect("tree_compatibility", data["expect"], res.status)
    return rep, []


def cmd_report(args):
    checks = reproduce.run_all(jobs=args.jobs)
    rep = RunReport("report", {}, {"checks": [c.to_json() for c in checks]})
    for c in checks:
        rep.expectations.append({"check": c.name, "citation": c.citation, "expected": c.expected,
                                 "computed": c.computed, "match": c.passed})
    if not args.timings:
        for c in rep.computed["checks"]:
            c.pop("seconds")
    return rep, checks


COMMANDS = {
    "census": cmd_census,
    "orbits": cmd_orbits,
    "case-analysis": cmd_case_analysis,
    "specialize": cmd_specialize,
    "rigidity": cmd_rigidity,
    "tree-check": cmd_tree_check,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="obstrukt", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--jobs", type=int, default=1, help="worker processes (OBSTRUKT_JOBS overrides)")
        p.add_argument("--csv", action="store_true", help="emit the table as CSV")
        return p

    p = add("census", "count inner Nielsen classes for a class vector")
    p.add_argument("--group", default="a5tilde")
    p.add_argument("--classes", default="3A,3A,3A,3A")
    p = add("orbits", "orbits of the inertia braid Q1 Q3")
    p.add_argument("--group", default="a5tilde")
    p.add_argument("--classes", default="3A,3A,3A,3A")
    p = add("case-analysis", "moduli, residue and value per class of 3A^4")
    p.add_argument("--case", type=int, choices=(1, 2, 3))
    p.add_argument("--d", type=int, default=-1)
    p = add("specialize", "obstruction at t = p for primes 5 < p <= pmax")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--pmax", type=int, default=100)
    p = add("rigidity", "rigid triple (4A, lA, lB) in SL2(l) and its normalizer chain")
    p.add_argument("--ell", type=int, required=True)
    p = add("tree-check", "compatibility of an endomorphism with an ordered tree")
    p.add_argument("--tree", required=True, help="JSON with children, leaves, images")
    p = add("report", "run every check against the stored expectations")
    p.add_argument("--md", action="store_true", help="markdown table instead of JSON")
    p.add_argument("--timings", action="store_true", help="include wall times (output no longer byte-stable)")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    env = os.environ.get("OBSTRUKT_JOBS")
    if env:
        try:
            args.jobs = int(env)
        except ValueError:
            ap.error(f"OBSTRUKT_JOBS must be an integer, got {env!r}")
    if args.jobs < 1:
        ap.error("--jobs must be positive")
    try:
        rep, table = COMMANDS[args.command](args)
    except UsageError as exc:
        ap.error(str(exc))
    if args.command == "report" and args.md:
        out = reproduce.report_markdown(table, timings=args.timings)
    elif args.csv and table and isinstance(table[0], dict):
        out = _csv(table)
    else:
        out = json.dumps(rep.to_json(), indent=2, ensure_ascii=False, default=str) + "\n"
    sys.stdout.write(out)
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)
    for e in rep.expectations:
        if not e["match"]:
            print(f"MISMATCH {e['check']}: expected {e['expected']}, got {e['computed']} "
                  f"[{e['citation']}]", file=sys.stderr)
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
