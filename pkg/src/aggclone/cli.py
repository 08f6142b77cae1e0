"""Command-line front end.

Exit codes: 0 success, 1 negative verdict on valid input, 2 structurally
invalid input (not a lattice, lattice too small), 3 I/O or parse error,
4 size guard exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import basis as B
from .clone import closure, contains, find_violation, read_rel, unary_insufficiency_witness, unary_lattice_basis
from .errors import (
    AggCloneError,
    CycleInCovers,
    FormatError,
    LatticeTooSmall,
    NotAggregation,
    NotALattice,
    NotBounded,
    SizeGuardExceeded,
    TermSyntaxError,
    UnknownElementName,
    VerificationFailed,
)
from .fntable import (
    DEFAULT_MAX_CELLS,
    FnTable,
    enumerate_aggregation,
    format_fn,
    is_aggregation,
    is_monotone,
    random_monotone_aggregation,
    read_fn,
    satisfies_boundary,
)
from .hypercube import f_v, median_is_optimal, median_rule, median_table, oplus_from_fv, vertices
from .lattice import DEFAULT_MAX_ELEMENTS, Lattice, boolean, chain, format_lat, m3, n5, read_lat
from .terms import (
    evaluate,
    format_term,
    g_terms,
    h_terms,
    parse_term,
    synthesize,
    synthesize_dual,
    term_to_table,
)

EXIT_OK, EXIT_NEGATIVE, EXIT_INVALID, EXIT_IO, EXIT_GUARD = 0, 1, 2, 3, 4


class Report:
    """Collects text lines and a JSON payload; printed once at the end."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        self.lines: list[str] = []
        self.data: dict = {}

    def line(self, text: str) -> None:
        self.lines.append(text)

    def emit(self, out) -> None:
        if self.fmt == "json":
            out.write(json.dumps(self.data, indent=2) + "\n")
        else:
            for s in self.lines:
                out.write(s + "\n")


def _yn(flag: bool) -> str:
    return "yes" if flag else "no"


def _values(f: FnTable) -> str:
    return " ".join(f.lattice.names[v] for v in f.values.tolist())


def _externals(specs, lattice: Lattice) -> dict[str, FnTable]:
    reg = {}
    for spec in specs or []:
        name, sep, path = spec.partition("=")
        if not sep:
            raise FormatError(f"--ext expects NAME=PATH, got {spec!r}")
        reg[name] = read_fn(path, lattice)
    return reg


# lattice -------------------------------------------------------------------


def cmd_lattice_check(args, rep: Report) -> int:
    lat = read_lat(args.lattice, max_elements=args.max_elements)
    rep.line(f"valid bounded lattice, n={lat.size}, bottom={lat.names[lat.bottom]}, top={lat.names[lat.top]}")
    rep.data = {
        "lattice": lat.name,
        "valid": True,
        "size": lat.size,
        "bottom": lat.names[lat.bottom],
        "top": lat.names[lat.top],
    }
    return EXIT_OK


def cmd_lattice_gen(args, rep: Report) -> int:
    kind = args.kind
    if kind == "chain":
        lat = chain(args.size)
    elif kind == "boolean":
        lat = boolean(args.size, max_elements=args.max_elements)
    elif kind == "n5":
        lat = n5()
    else:
        lat = m3()
    text = format_lat(lat)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        rep.line(f"wrote {args.output}")
    else:
        rep.lines.append(text.rstrip("\n"))
    rep.data = {"lattice": lat.name, "size": lat.size, "text": text}
    return EXIT_OK


# fn --------------------------------------------------------------------------


def cmd_fn_check(args, rep: Report) -> int:
    lat = read_lat(args.lattice)
    f = read_fn(args.fn, lat)
    mono, bound = is_monotone(f), satisfies_boundary(f)
    rep.line(f"monotone: {_yn(mono)}")
    rep.line(f"boundary: {_yn(bound)}")
    rep.line(f"aggregation: {_yn(mono and bound)}")
    rep.data = {"lattice": lat.name, "arity": f.arity, "monotone": mono, "boundary": bound, "aggregation": mono and bound}
    return EXIT_OK if mono and bound else EXIT_NEGATIVE


def cmd_fn_enumerate(args, rep: Report) -> int:
    lat = read_lat(args.lattice)
    method = "dfs" if args.dfs else "naive"
    kw = {"max_cells": args.max_cells} if method == "naive" else {"max_results": args.max_tables}
    listing = []
    count = 0
    for f in enumerate_aggregation(lat, args.arity, method=method, **kw):
        count += 1
        if not args.count_only:
            listing.append(_values(f))
    if args.count_only:
        rep.line(str(count))
    else:
        rep.lines.extend(listing)
        rep.line(f"# {count} aggregation function(s)")
    rep.data = {"lattice": lat.name, "arity": args.arity, "count": count}
    if not args.count_only:
        rep.data["functions"] = listing
    return EXIT_OK


def cmd_fn_sample(args, rep: Report) -> int:
    lat = read_lat(args.lattice)
    f = random_monotone_aggregation(lat, args.arity, args.seed)
    rep.lines.append(format_fn(f).rstrip("\n"))
    rep.data = {"lattice": lat.name, "arity": f.arity, "seed": args.seed, "values": [lat.names[v] for v in f.values]}
    return EXIT_OK


# decompose -----------------------------------------------------------------


def cmd_decompose(args, rep: Report) -> int:
    lat = read_lat(args.lattice)
    f = read_fn(args.fn, lat)
    if not is_aggregation(f):
        raise NotAggregation("input table is not an aggregation function")
    term = synthesize_dual(f) if args.dual else synthesize(f)
    blocks = g_terms(f) if args.dual else h_terms(f)
    text = format_term(term, lat)
    rep.line(text)
    verified = None
    if args.verify:
        verified = term_to_table(term, lat, f.arity) == f
        if not verified:
            raise VerificationFailed("synthesized term does not reproduce the table")
        rep.line("verified")
    rep.data = {
        "lattice": lat.name,
        "arity": f.arity,
        "term": text,
        "joinands": [{"a": [lat.names[x] for x in a], "term": format_term(t, lat)} for a, t in blocks],
        "verified": verified,
    }
    return EXIT_OK


# term ------------------------------------------------------------------------


def cmd_term_eval(args, rep: Report) -> int:
    lat = read_lat(args.lattice)
    reg = _externals(args.ext, lat)
    t = parse_term(args.term, lat)
    env = [lat.index(e) for e in args.env]
    value = lat.names[evaluate(t, lat, env, reg)]
    rep.line(value)
    rep.data = {"lattice": lat.name, "term": format_term(t, lat), "env": args.env, "value": value}
    return EXIT_OK


def cmd_term_check(args, rep: Report) -> int:
    lat = read_lat(args.lattice)
    reg = _externals(args.ext, lat)
    t = parse_term(args.term, lat)
    f = term_to_table(t, lat, args.arity, reg)
    agg = is_aggregation(f)
    rep.line(f"term: {format_term(t, lat)}")
    rep.line(f"table: {_values(f)}")
    rep.line(f"aggregation: {_yn(agg)}")
    rep.data = {"lattice": lat.name, "arity": args.arity, "term": format_term(t, lat), "aggregation": agg}
    ok = agg
    if args.against:
        same = f == read_fn(args.against, lat)
        rep.line(f"equals {args.against}: {_yn(same)}")
        rep.data["equal"] = same
        ok = same
    return EXIT_OK if ok else EXIT_NEGATIVE


# clone -----------------------------------------------------------------------


def _basis_tables(choice: str, lat: Lattice) -> list[FnTable]:
    if choice in ("standard", "theorem1"):
        return [d.table(lat) for d in B.standard_basis(lat)]
    if choice == "dual":
        return [d.table(lat) for d in B.dual_basis(lat)]
    if choice == "unary":
        return unary_lattice_basis(lat)
    if choice.startswith("custom:"):
        paths = [p for p in choice[len("custom:") :].split(",") if p]
        if not paths:
            raise FormatError("custom basis needs at least one .fn file")
        return [read_fn(p, lat) for p in paths]
    raise FormatError(f"unknown basis {choice!r}")


def _describe(f: FnTable) -> str:
    lat = f.lattice
    if f.arity == 2:
        if f == B.meet_fn(lat):
            return "/\\"
        if f == B.join_fn(lat):
            return "\\/"
        for b in range(lat.size):
            if f == B.oplus(lat, b):
                return f"(+)[{lat.names[b]}]"
    return f"table {_values(f)}"


def cmd_clone_close(args, rep: Report) -> int:
    lat = read_lat(args.lattice)
    base = _basis_tables(args.basis, lat)
    s = closure(base, k_max=args.k_max, max_cells=args.max_cells, max_tables=args.max_tables)
    counts = s.counts()
    rep.line(f"basis: {args.basis} ({len(base)} tables)")
    for n, c in counts.items():
        rep.line(f"arity {n}: {c} members")
    rep.data = {"lattice": lat.name, "k_max": args.k_max, "counts": {str(n): c for n, c in counts.items()}}
    if not args.compare_enumeration:
        return EXIT_OK
    missing = []
    extra = 0
    for n in range(1, args.k_max + 1):
        every = list(enumerate_aggregation(lat, n, method="dfs", max_results=args.max_tables))
        keys = {f.key() for f in every}
        missing += [f for f in every if not contains(s, f)]
        extra += sum(1 for f in s.tables(n) if f.key() not in keys)
    equal = not missing and extra == 0
    if equal:
        rep.line("equals all aggregation functions: yes")
    else:
        named = [f for f in missing if _describe(f).startswith("(+)")]
        example = _describe((named or missing)[0]) if missing else "non-aggregation member"
        rep.line(f"equals all aggregation functions: no; missing example: {example}")
        rep.data["missing_example"] = example
    rep.data["equal"] = equal
    return EXIT_OK if equal else EXIT_NEGATIVE


def cmd_clone_preserves(args, rep: Report) -> int:
    lat = read_lat(args.lattice)
    f = read_fn(args.fn, lat)
    rel = read_rel(args.rel, lat)
    hit = find_violation(f, rel)
    rep.line(f"preserves: {_yn(hit is None)}")
    rep.data = {"lattice": lat.name, "arity": f.arity, "preserves": hit is None}
    if hit is not None:
        cols, image = hit
        names = lat.names
        cols_txt = ", ".join("(" + ",".join(names[x] for x in c) + ")" for c in cols)
        img_txt = "(" + ",".join(names[x] for x in image) + ")"
        rep.line(f"columns {cols_txt} give {img_txt}")
        rep.data["columns"] = [[names[x] for x in c] for c in cols]
        rep.data["image"] = [names[x] for x in image]
    return EXIT_OK if hit is None else EXIT_NEGATIVE


def cmd_clone_witness(args, rep: Report) -> int:
    lat = read_lat(args.lattice)
    w = unary_insufficiency_witness(lat)
    names = lat.names
    tup = lambda t: "(" + ",".join(names[x] for x in t) + ")"
    rep.line("B = {" + ", ".join(tup(t) for t in w.relation.sorted_tuples()) + "}")
    rep.line(f"unary aggregation functions: {w.unary_count}, all preserve B: {_yn(w.unary_preserve)}")
    rep.line(f"meet and join preserve B: {_yn(w.lattice_ops_preserve)}")
    rep.line(f"(+)[{names[w.a]}] preserves B: {_yn(w.violator_preserves)}")
    if w.columns:
        rep.line(f"columns {', '.join(tup(c) for c in w.columns)} give {tup(w.image)}")
    rep.data = {
        "lattice": lat.name,
        "relation": [[names[x] for x in t] for t in w.relation.sorted_tuples()],
        "violator": f"(+)[{names[w.a]}]",
        "image": [names[x] for x in w.image],
        "unary_preserve": w.unary_preserve,
        "lattice_ops_preserve": w.lattice_ops_preserve,
        "violator_preserves": w.violator_preserves,
        "verified": w.holds,
    }
    return EXIT_OK if w.holds else EXIT_NEGATIVE


# median ----------------------------------------------------------------------


def cmd_median_demo(args, rep: Report) -> int:
    r = args.r
    lat = boolean(r)
    vs = vertices(r)
    med = median_table(r)
    triples = [(x, y, z) for x in vs for y in vs for z in vs]
    rule_ok = all(med(x.bits, y.bits, z.bits) == median_rule(x, y, z).bits for x, y, z in triples)
    maj_ok = med == B.majority_meetjoin(lat) == B.majority_joinmeet(lat)
    agg_ok = is_aggregation(med)
    opt_ok = all(median_is_optimal(x, y, z) for x, y, z in triples)
    fv_ok = all(is_aggregation(f_v(v, lat)) for v in vs)
    oplus_ok = all(oplus_from_fv(v, lat)[1] for v in vs)
    checks = {
        "median rule matches its table": rule_ok,
        "median equals both majority terms": maj_ok,
        "median is an aggregation function": agg_ok,
        "every f_v is an aggregation function": fv_ok,
        "fv(chi[0](x1 \\/ x2), chi[1](x1 /\\ x2)) equals (+)[v] for every v": oplus_ok,
        "median uniquely minimises the distance sum": opt_ok,
    }
    rep.line(f"Q_{r}: {len(vs)} vertices, {len(triples)} triples")
    for label, ok in checks.items():
        rep.line(f"{'ok  ' if ok else 'FAIL'} {label}")
    every = all(checks.values())
    rep.line("all identities verified" if every else "some identities failed")
    rep.data = {"r": r, "checks": checks, "verified": every}
    return EXIT_OK if every else EXIT_NEGATIVE


# parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("text", "json"), default="text")
    guards = argparse.ArgumentParser(add_help=False)
    guards.add_argument("--max-cells", type=int, default=DEFAULT_MAX_CELLS)
    guards.add_argument("--max-tables", type=int, default=10**5)
    guards.add_argument("--max-elements", type=int, default=DEFAULT_MAX_ELEMENTS)
    common = [fmt, guards]

    p = argparse.ArgumentParser(prog="aggclone", description="Aggregation clones on finite bounded lattices.")
    top = p.add_subparsers(dest="group", required=True)

    lat = top.add_parser("lattice").add_subparsers(dest="cmd", required=True)
    s = lat.add_parser("check", parents=common)
    s.add_argument("lattice")
    s.set_defaults(func=cmd_lattice_check)
    s = lat.add_parser("gen", parents=common)
    s.add_argument("kind", choices=("chain", "boolean", "n5", "m3"))
    s.add_argument("--size", type=int, default=3, help="chain length or boolean rank")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_lattice_gen)

    fn = top.add_parser("fn").add_subparsers(dest="cmd", required=True)
    s = fn.add_parser("check", parents=common)
    s.add_argument("lattice")
    s.add_argument("fn")
    s.set_defaults(func=cmd_fn_check)
    s = fn.add_parser("enumerate", parents=common)
    s.add_argument("lattice")
    s.add_argument("--arity", type=int, required=True)
    s.add_argument("--count-only", action="store_true")
    s.add_argument("--dfs", action="store_true", help="pruned depth-first enumeration instead of brute force")
    s.set_defaults(func=cmd_fn_enumerate)
    s = fn.add_parser("sample", parents=common)
    s.add_argument("lattice")
    s.add_argument("--arity", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_fn_sample)

    s = top.add_parser("decompose", parents=common)
    s.add_argument("lattice")
    s.add_argument("fn")
    s.add_argument("--dual", action="store_true", help="meet of g_a terms instead of join of h_a terms")
    s.add_argument("--verify", action=argparse.BooleanOptionalAction, default=True)
    s.set_defaults(func=cmd_decompose)

    term = top.add_parser("term").add_subparsers(dest="cmd", required=True)
    s = term.add_parser("eval", parents=common)
    s.add_argument("lattice")
    s.add_argument("term")
    s.add_argument("--env", nargs="*", default=[])
    s.add_argument("--ext", action="append", metavar="NAME=PATH")
    s.set_defaults(func=cmd_term_eval)
    s = term.add_parser("check", parents=common)
    s.add_argument("lattice")
    s.add_argument("term")
    s.add_argument("--arity", type=int, required=True)
    s.add_argument("--ext", action="append", metavar="NAME=PATH")
    s.add_argument("--against", metavar="FN", help="compare the compiled table with a .fn file")
    s.set_defaults(func=cmd_term_check)

    cl = top.add_parser("clone").add_subparsers(dest="cmd", required=True)
    s = cl.add_parser("close", parents=common)
    s.add_argument("lattice")
    s.add_argument("--basis", default="standard", help="standard | dual | unary | custom:<f1.fn,f2.fn,...>")
    s.add_argument("--k-max", type=int, default=2)
    s.add_argument("--compare-enumeration", action="store_true")
    s.set_defaults(func=cmd_clone_close)
    s = cl.add_parser("preserves", parents=common)
    s.add_argument("lattice")
    s.add_argument("fn")
    s.add_argument("rel")
    s.set_defaults(func=cmd_clone_preserves)
    s = cl.add_parser("witness", parents=common)
    s.add_argument("lattice")
    s.set_defaults(func=cmd_clone_witness)

    med = top.add_parser("median").add_subparsers(dest="cmd", required=True)
    s = med.add_parser("demo", parents=common)
    s.add_argument("--r", type=int, default=3)
    s.set_defaults(func=cmd_median_demo)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    rep = Report(args.format)
    try:
        code = args.func(args, rep)
    except (OSError, FormatError, TermSyntaxError, UnknownElementName) as e:
        err.write(f"{type(e).__name__}: {e}\n")
        return EXIT_IO
    except (NotALattice, NotBounded, CycleInCovers, LatticeTooSmall) as e:
        err_line = f"{type(e).__name__}: {e}"
        if args.format == "json":
            out.write(json.dumps({"valid": False, "error": type(e).__name__, "message": str(e)}) + "\n")
        else:
            out.write(err_line + "\n")
        return EXIT_INVALID
    except SizeGuardExceeded as e:
        err.write(f"SizeGuardExceeded: {e}\n")
        return EXIT_GUARD
    except (NotAggregation, VerificationFailed) as e:
        err.write(f"{type(e).__name__}: {e}\n")
        return EXIT_NEGATIVE
    except AggCloneError as e:
        err.write(f"{type(e).__name__}: {e}\n")
        return EXIT_IO
    rep.emit(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
