"""Command-line front end.

Exit codes: 0 success, 1 law violation or mismatch, 2 usage error,
3 horizon or size budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from pathlib import Path

from . import cgt
from .core import (
    SET_GRAMMAR,
    BudgetExceeded,
    GameSpec,
    SpecError,
    SubtractionSet,
    TerminalRule,
    oracle_outcome,
    outcome_table,
    parse_set,
)
from .laws import check_carret, check_mirrored, check_psym, check_structure
from .periodicity import DEFAULT_HORIZON, HorizonExceeded, detect_period, tail_from_certificate, verify_certificate
from .survey import SurveyConfig, run_survey, spot_check

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
HORIZON_ENV = "EPSNIM_HORIZON"

EXPR_GRAMMAR = """\
expression syntax:
  terms c[n+k] joined by + or -, with integer coefficient c (default 1)
  and integer offset k, e.g.  [n+9]-[n]   or   [n+18]-2[n+9]+[n]
range syntax:
  a..b  (inclusive)   or   a..b:step"""

_TERM = re.compile(r"\s*([+-]?)\s*(\d*)\s*\[\s*n\s*(?:([+-])\s*(\d+))?\s*\]\s*")


def parse_expression(text: str) -> list[tuple[int, int]]:
    """``"[n+18]-2[n+9]+[n]"`` -> ``[(1, 18), (-2, 9), (1, 0)]``."""
    terms = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or (terms and not m.group(1)):
            raise SpecError(f"bad expression {text!r}\n{EXPR_GRAMMAR}")
        sign = -1 if m.group(1) == "-" else 1
        coeff = int(m.group(2)) if m.group(2) else 1
        offset = int(m.group(4) or 0) * (-1 if m.group(3) == "-" else 1)
        terms.append((sign * coeff, offset))
        pos = m.end()
    if not terms:
        raise SpecError(f"empty expression\n{EXPR_GRAMMAR}")
    return terms


def parse_range(text: str) -> range:
    m = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*(?::\s*(\d+))?\s*", text)
    if not m:
        raise SpecError(f"bad range {text!r}\n{EXPR_GRAMMAR}")
    step = int(m.group(3) or 1)
    if step < 1:
        raise SpecError("range step must be >= 1")
    return range(int(m.group(1)), int(m.group(2)) + 1, step)


def _default_horizon() -> int:
    raw = os.environ.get(HORIZON_ENV)
    if not raw:
        return DEFAULT_HORIZON
    try:
        return int(raw)
    except ValueError:
        raise SpecError(f"{HORIZON_ENV} must be an integer, got {raw!r}") from None


def _spec(args) -> GameSpec:
    s = parse_set(args.set)
    if getattr(args, "terminal", None):
        return GameSpec(s, TerminalRule.parse(args.terminal))
    return GameSpec.lr(s)


def _emit(args, data, plain: str) -> None:
    print(plain if args.plain else json.dumps(data))


def cmd_outcomes(args) -> int:
    spec = _spec(args)
    seq = outcome_table(spec, args.n)
    _emit(args, {"set": str(spec.s), "terminal": str(spec.terminal), "n": args.n, "outcomes": seq.to_string()}, seq.to_string())
    return EXIT_OK


def cmd_period(args) -> int:
    spec = _spec(args)
    horizon = args.horizon if args.horizon is not None else _default_horizon()
    if not spec.s.is_finite() and args.horizon is None:
        horizon = min(horizon, 3000)
    cert = detect_period(spec, horizon)
    data = cert.to_dict()
    data["tail_class"] = str(tail_from_certificate(cert))
    code = EXIT_OK
    if args.verify:
        report = verify_certificate(spec, cert, max(4 * cert.horizon, cert.preperiod + 2 * cert.period))
        data["verified"] = report.passed
        if not report:
            data["verify_detail"] = report.detail
            code = EXIT_FAIL
    plain = f"preperiod={cert.preperiod} period={cert.period} proved={cert.proved} tail={data['tail_class']}"
    _emit(args, data, plain)
    return code


def cmd_laws(args) -> int:
    spec = _spec(args)
    seq = outcome_table(spec, args.horizon + 1)
    reports = []
    if spec.is_lr():
        reports += check_structure(spec, args.horizon, seq)
        if spec.s.is_finite():
            reports.append(check_carret(spec.s, args.horizon, seq))
    if args.p is not None:
        reports += check_psym(spec, args.p, args.horizon, seq)
    probes = check_mirrored(spec, args.horizon, seq) if spec.is_lr() else []
    ok = all(r.passed for r in reports)
    data = {
        "set": str(spec.s),
        "terminal": str(spec.terminal),
        "horizon": args.horizon,
        "passed": ok,
        "laws": [r.to_dict() for r in reports],
        "asymmetry_probes": [
            {"law_id": r.law_id, "violations": len(r.violations), "first": r.first and r.first.position} for r in probes
        ],
    }
    lines = [f"{'law':<22}{'result':<8}{'violations':>10}  first"]
    for r in reports:
        verdict = "skip" if r.skipped else ("pass" if r.passed else "FAIL")
        first = "" if r.first is None else f"n={r.first.position} {r.first.observed}"
        lines.append(f"{r.law_id:<22}{verdict:<8}{len(r.violations):>10}  {first}")
    for r in probes:
        first = "" if r.first is None else f"n={r.first.position} {r.first.observed}"
        lines.append(f"{r.law_id:<22}{'probe':<8}{len(r.violations):>10}  {first}")
    _emit(args, data, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_values(args) -> int:
    spec = _spec(args)
    values = cgt.nowakowski_values(spec, args.n)
    data = {
        "set": str(spec.s),
        "n": args.n,
        "values": [cgt.to_bracket(v) for v in values.values],
        "outcomes": values.outcomes(),
    }
    code = EXIT_OK
    lines = [f"{n}: {v}" for n, v in enumerate(data["values"])]
    if data["outcomes"] != outcome_table(spec, args.n).to_string():
        data["outcome_mismatch"] = True
        code = EXIT_FAIL
    if args.check_period is not None:
        window = args.window if args.window is not None else max(0, (args.n - args.check_period) // 2)
        report = cgt.check_value_period(values, args.check_period, window)
        data["period_check"] = report.to_dict()
        lines.append(f"period {args.check_period}: {'pass' if report.passed else 'FAIL'} (preperiod={report.preperiod})")
        if not report.passed:
            code = EXIT_FAIL
    _emit(args, data, "\n".join(lines))
    return code


def cmd_diff(args) -> int:
    spec = _spec(args)
    terms = parse_expression(args.expr)
    positions = parse_range(args.range)
    if not positions:
        raise SpecError("empty range")
    need = max(positions) + max(off for _, off in terms) + 1
    values = cgt.nowakowski_values(spec, need)
    result = cgt.difference_outcomes(values, terms, positions)
    data = {
        "set": str(spec.s),
        "expr": args.expr,
        "outcomes": {str(n): o.value for n, o in result.items()},
        "P_positions": [n for n, o in result.items() if o.value == "P"],
    }
    _emit(args, data, " ".join(f"{n}:{o.value}" for n, o in result.items()))
    return EXIT_OK


def cmd_survey(args) -> int:
    horizon = args.horizon if args.horizon is not None else _default_horizon()
    config = SurveyConfig(args.min, args.max_bound, horizon, args.workers, Path(args.out) if args.out else None, args.chunk_size)
    report = run_survey(config, resume=not args.no_resume)
    data = report.to_dict()
    code = EXIT_OK
    if args.spot_check:
        problems = spot_check(config, args.spot_check)
        data["spot_check"] = {"sampled": args.spot_check, "problems": problems}
        if problems:
            code = EXIT_FAIL
    if report.horizon_exceeded_count and code == EXIT_OK:
        code = EXIT_BUDGET
    plain = (
        f"{report.all_L_count} of {report.total_sets} sets are eventually all-L ({report.fraction:.2%}); "
        f"{report.horizon_exceeded_count} exceeded horizon {horizon}"
    )
    _emit(args, data, plain)
    return code


def cmd_oracle_check(args) -> int:
    elements = list(range(2, args.max_set + 1))
    mismatches = []
    count = 0
    for mask in range(1, 1 << len(elements)):
        s = SubtractionSet(frozenset(e for i, e in enumerate(elements) if mask >> i & 1))
        spec = GameSpec.lr(s)
        count += 1
        table = outcome_table(spec, args.max_n + 1).to_string()
        for n in range(args.max_n + 1):
            o = oracle_outcome(spec, n, cap=max(args.max_n, 200)).value
            if o != table[n]:
                mismatches.append({"set": str(s), "n": n, "table": table[n], "oracle": o})
                break
    data = {"sets": count, "max_n": args.max_n, "mismatches": mismatches}
    _emit(args, data, f"{count} sets, {len(mismatches)} mismatches")
    return EXIT_FAIL if mismatches else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epsnim",
        description="Outcomes, periods, laws and game values of ending partizan subtraction nim.",
        epilog=SET_GRAMMAR,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, *, needs_set=True):
        p = sub.add_parser(name, help=help_text, epilog=SET_GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
        p.set_defaults(func=func)
        p.add_argument("--plain", action="store_true", help="human-readable text instead of JSON")
        if needs_set:
            p.add_argument("--set", required=True, help='removable set, e.g. "{2,3,6}"')
            p.add_argument("--terminal", help='terminal outcomes from position 0, e.g. "NL" (default: LR parity rule)')
        return p

    p = add("outcomes", cmd_outcomes, "print the outcome string for positions 0..n-1")
    p.add_argument("--n", type=int, required=True)

    p = add("period", cmd_period, "detect the least eventual period")
    p.add_argument("--horizon", type=int, help=f"positions to scan (default ${HORIZON_ENV} or {DEFAULT_HORIZON})")
    p.add_argument("--verify", action="store_true", help="replay the certificate to 4x its detection horizon")

    p = add("laws", cmd_laws, "check the structural laws; exit 1 on any violation")
    p.add_argument("--horizon", type=int, default=1000)
    p.add_argument("--p", type=int, help="also run the p-symmetric checks for this p")

    p = add("values", cmd_values, "normal-play game values of positions 0..n-1")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--check-period", type=int)
    p.add_argument("--window", type=int)

    p = add("diff", cmd_diff, "outcomes of a signed sum of position values")
    p.add_argument("--expr", required=True, help='e.g. "[n+9]-[n]"')
    p.add_argument("--range", required=True, help='e.g. "0..40" or "10..55:9"')

    p = add("survey", cmd_survey, "classify every set with a given minimum", needs_set=False)
    p.add_argument("--min", type=int, default=2)
    p.add_argument("--max-bound", type=int, required=True)
    p.add_argument("--horizon", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--chunk-size", type=int, default=256)
    p.add_argument("--out", help="directory for sets.csv, checkpoint.json and summary.json")
    p.add_argument("--no-resume", action="store_true", help="ignore an existing checkpoint")
    p.add_argument("--spot-check", type=int, default=0, metavar="K", help="re-derive K random sets independently")

    p = add("oracle-check", cmd_oracle_check, "compare the recurrence with exhaustive search", needs_set=False)
    p.add_argument("--max-set", type=int, default=8)
    p.add_argument("--max-n", type=int, default=60)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if "syntax" not in str(exc):
            print(SET_GRAMMAR, file=sys.stderr)
            print(EXPR_GRAMMAR, file=sys.stderr)
        return EXIT_USAGE
    except (HorizonExceeded, BudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
