"""``prscore`` command-line front end.

Exit codes: 0 success, 2 unreadable or unparsable input, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .distribution import Dataset, ThresholdSummary, dump_dataset, load_dataset, rank, reconstruct, summarize
from .errors import InvariantError, ParseError
from .indicators import aggregate, theoretical_r
from .report import render_paper_table, render_scores, reports_json
from .schemes import ALL_SCHEMES, ClassScheme, SchemeId, assign, parse_scheme_ids

EXIT_OK, EXIT_PARSE, EXIT_INVARIANT = 0, 2, 3


def _read_bytes(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _class_scheme(value: str) -> ClassScheme:
    if value == "default6":
        return ClassScheme.default()
    return ClassScheme.from_json(_read_bytes(value))


def _summary(path: str, lenient: bool) -> ThresholdSummary:
    return ThresholdSummary.from_json(_read_bytes(path), strict=not lenient)


def _dataset(args) -> Dataset:
    if args.input:
        return load_dataset(_read_bytes(args.input), args.format)
    if getattr(args, "summary", None):
        return reconstruct(_summary(args.summary, args.lenient), strict=not args.lenient)
    raise ParseError("--input is required")


def _write(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _reports(ranked, s, schemes):
    return [aggregate(assign(ranked, s, sid)) for sid in schemes]


def run_score(args) -> int:
    s = _class_scheme(args.classes)
    ranked = rank(_dataset(args))
    reports = _reports(ranked, s, parse_scheme_ids(args.scheme))
    if args.out == "json":
        text = reports_json(reports)
    else:
        text = render_scores(reports, args.out, args.round).to_text()
    _write(text, args.output)
    return EXIT_OK


def run_table(args) -> int:
    s = _class_scheme(args.classes)
    ranked = rank(_dataset(args))
    summary = summarize(ranked, s)
    reports = _reports(ranked, s, parse_scheme_ids(args.scheme))
    if args.out == "json":
        text = reports_json(reports, summary)
    else:
        text = render_paper_table(summary, reports, args.out, args.round).to_text()
    _write(text, args.output)
    return EXIT_OK


def run_reconstruct(args) -> int:
    if not args.summary:
        raise ParseError("--summary is required")
    d = reconstruct(_summary(args.summary, args.lenient), strict=not args.lenient)
    _write(dump_dataset(d, args.format), args.output)
    return EXIT_OK


def check_all(d: Dataset, s: ClassScheme, expected: ThresholdSummary | None = None) -> list[str]:
    """Run every invariant check; raise InvariantError on the first failure."""
    done = []
    d.validate()
    done.append("dataset")
    ranked = rank(d)
    ranked.validate()
    done.append("tie groups")
    summarize(ranked, s).validate()
    done.append("threshold summary")
    totals = {}
    for sid in ALL_SCHEMES:
        res = assign(ranked, s, sid)
        res.validate()
        rep = aggregate(res)
        rep.validate()
        totals[sid] = rep.r
    done.append("scheme results")
    if totals[SchemeId.WS] != theoretical_r(s):
        raise InvariantError(f"WS total {totals[SchemeId.WS]} differs from theoretical {theoretical_r(s)}")
    if s.strict_weights and not totals[SchemeId.LB] <= totals[SchemeId.WS] <= totals[SchemeId.R]:
        raise InvariantError("ordering LB <= WS <= R violated")
    done.append("indicator totals")
    if expected is not None:
        boundaries = tuple(r.p for r in expected.rows)
        got = summarize(ranked, ClassScheme(boundaries, tuple(range(1, len(boundaries) + 1))))
        if got != expected:
            for k, (a, b) in enumerate(zip(got.rows, expected.rows), 1):
                if a != b:
                    raise InvariantError(f"summary round-trip mismatch at row k={k}: got {a}, expected {b}")
            raise InvariantError("summary round-trip mismatch")
        done.append("summary round-trip")
    return done


def run_validate(args) -> int:
    s = _class_scheme(args.classes)
    d = load_dataset(_read_bytes(args.input), args.format) if args.input else None
    if d is None:
        raise ParseError("--input is required")
    expected = _summary(args.summary, args.lenient) if args.summary else None
    done = check_all(d, s, expected)
    _write(f"ok: n={d.n}; checked {', '.join(done)}\n", args.output)
    return EXIT_OK


COMMANDS = {
    "score": run_score,
    "table": run_table,
    "reconstruct": run_reconstruct,
    "validate": run_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prscore",
        description="Percentile rank class scores under competing tie-handling schemes.",
        epilog=(
            "Schemes: LB, R, PG_MID, PG_AVG (alias PG), AW_CEIL (aliases S, AW), AW_FLOOR, WS. "
            "PG variants put a group whose selector lies exactly on a boundary into the higher class."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="dataset CSV")
    common.add_argument("--format", choices=("per-record", "frequency"), default="per-record",
                        help="dataset CSV layout (default: per-record)")
    common.add_argument("--scheme", default="all", help="comma-separated scheme ids, or 'all' (default)")
    common.add_argument("--classes", default="default6", help="class scheme JSON, or 'default6'")
    common.add_argument("--out", choices=("md", "csv", "tsv", "json"), default="md")
    common.add_argument("--round", type=int, default=2, metavar="N",
                        help="decimals for percent cells; R is printed with N+2 decimals")
    common.add_argument("--summary", help="threshold summary JSON")
    common.add_argument("--output", help="write to this file instead of stdout")
    common.add_argument("--lenient", action="store_true",
                        help="accept summaries whose threshold groups miss rank ceil(p*n)")
    for name, helptext in [
        ("score", "print R and I3 per scheme"),
        ("table", "render the full threshold table"),
        ("reconstruct", "write a dataset matching a threshold summary"),
        ("validate", "check all invariants of a dataset (and optional summary round-trip)"),
    ]:
        sub.add_parser(name, parents=[common], help=helptext)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.round < 0:
        print("prscore: error: --round must be non-negative", file=sys.stderr)
        return EXIT_PARSE
    try:
        return COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"prscore: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InvariantError as exc:
        print(f"prscore: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
