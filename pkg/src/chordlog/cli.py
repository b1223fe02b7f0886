"""chordlog command line."""
from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .apoly import APolynomial, UnassignedSymbol, format_apoly
from .asymptotics import HypothesisViolated, convergence_report, report_to_csv, report_to_json
from .diagrams import iter_connected_flat
from .expansions import SCHEMA, green_series, hk_bruteforce, hk_closed_form, hk_series, p_series


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonnegative(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return v


def load_avalues(path: str) -> Dict[Tuple[int, int], Fraction]:
    with open(path) as fh:
        data = json.load(fh)
    return {(int(e["i"]), int(e["j"])): Fraction(str(e["v"])) for e in data["a"]}


def _apoly_list_json(coeffs: List[APolynomial]) -> list:
    return [{"n": n, "coeff": c.to_json()} for n, c in enumerate(coeffs, 1)]


def _frac(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}" if c.denominator != 1 else str(c.numerator)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chordlog", description="N^kLL expansions from decorated chord diagrams")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, order=False, k=True, fmts=("text", "json")):
        p.add_argument("--s", type=_positive, default=2)
        if k:
            p.add_argument("--k", type=_nonnegative, default=0)
        if order:
            p.add_argument("--order", type=_positive, required=True)
        p.add_argument("--format", choices=fmts, default="text")
        p.add_argument("--threads", type=_positive, default=1)

    common(sub.add_parser("expand", help="closed form of H_k"), fmts=("text", "latex", "json"))
    p = sub.add_parser("series", help="Taylor coefficients of H_k")
    common(p, order=True, fmts=("text", "json", "csv"))
    p.add_argument("--a", dest="afile")
    common(sub.add_parser("check", help="closed form against diagram enumeration"), order=True)
    common(sub.add_parser("green", help="truncated Green function"), order=True, k=False)
    common(sub.add_parser("pfun", help="P(x) coefficients"), order=True, k=False)
    p = sub.add_parser("count", help="connected diagram census")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--threads", type=_positive, default=1)
    p = sub.add_parser("asymptotics", help="exact coefficients against asymptotic estimates")
    common(p, fmts=("text", "json", "csv"))
    p.add_argument("--nmax", type=_positive, required=True)
    p.add_argument("--a", dest="afile", required=True)
    return parser


def _emit(out, text: str):
    out.write(text)
    if not text.endswith("\n"):
        out.write("\n")


def cmd_expand(args, out) -> int:
    form = hk_closed_form(args.k, args.s)
    if args.format == "json":
        _emit(out, json.dumps(form.to_json()))
    elif args.format == "latex":
        _emit(out, form.to_latex())
    else:
        _emit(out, f"H_{args.k}(z) = {form.to_text()}")
    return 0


def cmd_series(args, out) -> int:
    coeffs = hk_series(args.k, args.s, args.order)
    avals = load_avalues(args.afile) if args.afile else None
    values = [c.evaluate(avals) for c in coeffs] if avals is not None else None
    if args.format == "json":
        doc = {"schema": SCHEMA, "k": args.k, "s": args.s, "order": args.order}
        if values is not None:
            doc["coefficients"] = [{"n": n, "value": _frac(v)} for n, v in enumerate(values, 1)]
        else:
            doc["coefficients"] = _apoly_list_json(coeffs)
        _emit(out, json.dumps(doc))
    elif args.format == "csv":
        lines = [f"# schema={SCHEMA}", "n,coefficient"]
        for n, c in enumerate(coeffs, 1):
            cell = _frac(values[n - 1]) if values is not None else format_apoly(c)
            lines.append(f'{n},"{cell}"')
        _emit(out, "\n".join(lines))
    else:
        lines = [f"# schema={SCHEMA} k={args.k} s={args.s}"]
        for n, c in enumerate(coeffs, 1):
            cell = _frac(values[n - 1]) if values is not None else format_apoly(c)
            lines.append(f"[z^{n}] {cell}")
        _emit(out, "\n".join(lines))
    return 0


def cmd_check(args, out) -> int:
    closed = hk_series(args.k, args.s, args.order)
    brute = hk_bruteforce(args.k, args.s, args.order, threads=args.threads)
    diffs = [(n, c, b) for n, (c, b) in enumerate(zip(closed, brute), 1) if c != b]
    if args.format == "json":
        _emit(out, json.dumps({
            "schema": SCHEMA, "k": args.k, "s": args.s, "order": args.order,
            "identical": not diffs,
            "mismatches": [{"n": n, "closed": c.to_json(), "diagrams": b.to_json()} for n, c, b in diffs],
        }))
    else:
        lines = [f"# schema={SCHEMA} check k={args.k} s={args.s} order={args.order}"]
        for n, c, b in diffs:
            lines.append(f"[z^{n}] closed form: {format_apoly(c)}")
            lines.append(f"[z^{n}] diagrams:    {format_apoly(b)}")
        lines.append("identical" if not diffs else f"{len(diffs)} coefficient(s) differ")
        _emit(out, "\n".join(lines))
    return 0 if not diffs else 1


def cmd_green(args, out) -> int:
    series = green_series(args.s, args.order, threads=args.threads)
    if args.format == "json":
        _emit(out, json.dumps(series.to_json()))
        return 0
    lines = [f"# schema={SCHEMA} green s={args.s} order={args.order}"]
    for j in range(1, args.order + 1):
        for i in range(0, j + 1):
            c = series.g[i][j]
            if c:
                lines.append(f"L^{i} x^{j}: {format_apoly(c)}")
    _emit(out, "\n".join(lines))
    return 0


def cmd_pfun(args, out) -> int:
    coeffs = p_series(args.s, args.order, threads=args.threads)
    if args.format == "json":
        _emit(out, json.dumps({"schema": SCHEMA, "s": args.s, "order": args.order, "coefficients": _apoly_list_json(coeffs)}))
        return 0
    lines = [f"# schema={SCHEMA} pfun s={args.s} order={args.order}"]
    lines += [f"[x^{n}] {format_apoly(c)}" for n, c in enumerate(coeffs, 1)]
    _emit(out, "\n".join(lines))
    return 0


def census(n_max: int) -> List[dict]:
    rows = []
    for n in range(1, n_max + 1):
        by_terminals: Counter = Counter()
        for _, terms in iter_connected_flat(n):
            by_terminals[len(terms)] += 1
        rows.append({
            "n": n,
            "connected": sum(by_terminals.values()),
            "one_terminal": by_terminals[1],
            "by_terminal_count": {str(k): v for k, v in sorted(by_terminals.items())},
        })
    return rows


def cmd_count(args, out) -> int:
    rows = census(args.n)
    if args.format == "json":
        _emit(out, json.dumps({"schema": SCHEMA, "census": rows}))
    elif args.format == "csv":
        lines = [f"# schema={SCHEMA}", "n,connected,one_terminal"]
        lines += [f"{r['n']},{r['connected']},{r['one_terminal']}" for r in rows]
        _emit(out, "\n".join(lines))
    else:
        lines = [f"# schema={SCHEMA} census"]
        for r in rows:
            lines.append(f"n={r['n']}: {r['connected']} connected diagrams, {r['one_terminal']} with one terminal chord")
        _emit(out, "\n".join(lines))
    return 0


def cmd_asymptotics(args, out) -> int:
    avals = load_avalues(args.afile)
    if args.nmax < 10:
        raise ValueError("--nmax must be at least 10")
    report = convergence_report(args.k, args.s, args.nmax, avals)
    if args.format == "csv":
        _emit(out, f"# schema={SCHEMA}\n" + report_to_csv(report))
    elif args.format == "json":
        _emit(out, json.dumps(report_to_json(report)))
    else:
        import mpmath

        lines = [f"# schema={SCHEMA} asymptotics k={args.k} s={args.s}", f"estimate: {report['estimate']}"]
        for r in report["rows"]:
            nb = mpmath.nstr(r.neighbor_ratio, 10) if r.neighbor_ratio is not None else "-"
            lines.append(f"n={r.n}: ratio={mpmath.nstr(r.ratio, 12)} neighbor={nb} (limit {report['neighbor_limit']})")
        _emit(out, "\n".join(lines))
    return 0


COMMANDS = {
    "expand": cmd_expand,
    "series": cmd_series,
    "check": cmd_check,
    "green": cmd_green,
    "pfun": cmd_pfun,
    "count": cmd_count,
    "asymptotics": cmd_asymptotics,
}


def main(argv: Optional[List[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except (OSError, ValueError, KeyError, UnassignedSymbol, HypothesisViolated) as exc:
        err.write(f"chordlog: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
