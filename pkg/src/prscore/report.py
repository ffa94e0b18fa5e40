"""Rendering of exact results as paper-style tables and JSON.

Nothing here touches binary floating point: every decimal cell comes from
:func:`round_exact` applied to a Fraction.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .distribution import ThresholdSummary, TieGroup
from .errors import InvariantError
from .indicators import IndicatorReport
from .schemes import group_average_quantile

__all__ = ["round_exact", "percent", "RenderedTable", "render_paper_table", "render_scores", "reports_json"]

TABLE_FORMATS = ("md", "csv", "tsv")


def round_exact(x, places: int = 2) -> str:
    """Round a rational to ``places`` decimals, ties away from zero.

    >>> round_exact(Fraction(1, 8), 2)
    '0.13'
    >>> round_exact(Fraction(-1, 8), 2)
    '-0.13'
    """
    if places < 0:
        raise ValueError("places must be non-negative")
    x = Fraction(x)
    scaled = abs(x) * 10**places
    q, rem = divmod(scaled.numerator, scaled.denominator)
    if 2 * rem >= scaled.denominator:
        q += 1
    digits = str(q).rjust(places + 1, "0")
    text = digits if places == 0 else f"{digits[:-places]}.{digits[-places:]}"
    return f"-{text}" if x < 0 and q else text


def percent(x, places: int = 2) -> str:
    return round_exact(Fraction(x) * 100, places)


@dataclass(frozen=True)
class RenderedTable:
    header: tuple[str, ...]
    rows: tuple[tuple[str, tuple[str, ...]], ...]
    format: str = "md"

    def to_text(self, format: str | None = None) -> str:
        fmt = format or self.format
        lines = [list(self.header)] + [[label, *cells] for label, cells in self.rows]
        if fmt == "md":
            out = ["| " + " | ".join(lines[0]) + " |", "|" + "---|" * len(lines[0])]
            out += ["| " + " | ".join(row) + " |" for row in lines[1:]]
            return "\n".join(out) + "\n"
        if fmt in ("csv", "tsv"):
            buf = io.StringIO()
            writer = csv.writer(buf, delimiter="," if fmt == "csv" else "\t", lineterminator="\n")
            writer.writerows(lines)
            return buf.getvalue()
        raise ValueError(f"unknown table format {fmt!r}")

    def row(self, label: str) -> tuple[str, ...]:
        for lab, cells in self.rows:
            if lab == label:
                return cells
        raise KeyError(label)


def _check_consistent(t: ThresholdSummary, reports: Sequence[IndicatorReport]) -> None:
    if not reports:
        return
    s = reports[0].class_scheme
    for rep in reports:
        if rep.n != t.n:
            raise InvariantError(f"report {rep.scheme} has n={rep.n}, summary has n={t.n}")
        if rep.class_scheme != s:
            raise InvariantError(f"report {rep.scheme} uses a different class scheme")
    if tuple(r.p for r in t.rows) != s.boundaries:
        raise InvariantError("summary boundaries differ from the reports' class scheme")


def render_paper_table(
    t: ThresholdSummary,
    reports: Sequence[IndicatorReport] = (),
    format: str = "md",
    places: int = 2,
) -> RenderedTable:
    """Lay out a summary and any number of scheme reports like the published tables."""
    _check_consistent(t, reports)
    n = t.n
    K = len(t.rows)
    blank = ""
    pct = lambda x: percent(x, places)  # noqa: E731

    def p_label(p: Fraction) -> str:
        x = p * 100
        return (round_exact(x, 0) if x.denominator == 1 else round_exact(x, places)) + "%"

    header = ("Percentile interval k", *map(str, range(K + 1)), "total")
    rows: list[tuple[str, tuple[str, ...]]] = []

    def add(label, cells, total=blank):
        rows.append((label, (*cells, total)))

    add("Threshold p_k", ["0%"] + [p_label(r.p) for r in t.rows])
    add("No. citations at threshold", [str(t.bottom_citations)] + [str(r.citations) for r in t.rows])
    add("No. pubs. below threshold", ["0"] + [str(r.below) for r in t.rows])
    add("No. pubs. at threshold", [str(t.bottom_count)] + [str(r.at) for r in t.rows])
    add("No. pubs. above threshold", [str(n - t.bottom_count)] + [str(r.above) for r in t.rows])
    add("% pubs. below threshold", [pct(0)] + [pct(Fraction(r.below, n)) for r in t.rows])
    add("% pubs. at threshold", [pct(Fraction(t.bottom_count, n))] + [pct(Fraction(r.at, n)) for r in t.rows])
    add(
        "% pubs. above threshold",
        [pct(Fraction(n - t.bottom_count, n))] + [pct(Fraction(r.above, n)) for r in t.rows],
    )
    add(
        "Av. quantile of pubs. at threshold",
        [blank] + [pct(group_average_quantile(TieGroup(r.citations, r.at, r.below), n)) for r in t.rows],
    )
    for rep in reports:
        add(f"Factual threshold ({rep.scheme})", [pct(0)] + [pct(x) for x in rep.factual_thresholds])
    for rep in reports:
        add(
            f"% pubs. in k-th PR class ({rep.scheme})",
            [blank] + [pct(x) for x in rep.class_shares],
            pct(sum(rep.class_shares)),
        )
    for rep in reports:
        add(
            f"Contribution to R({K}) ({rep.scheme})",
            [blank] + [pct(x) for x in rep.contributions],
            pct(rep.r),
        )
    return RenderedTable(header, tuple(rows), format)


def render_scores(reports: Sequence[IndicatorReport], format: str = "md", places: int = 2) -> RenderedTable:
    """One line per scheme: exact I3 and R, and R rounded to ``places + 2`` decimals."""
    header = ("scheme", "n", "I3", "R (exact)", "R")
    rows = tuple(
        (str(rep.scheme), (str(rep.n), str(rep.i3), str(rep.r), round_exact(rep.r, places + 2)))
        for rep in reports
    )
    return RenderedTable(header, rows, format)


def reports_json(reports: Sequence[IndicatorReport], summary: ThresholdSummary | None = None) -> str:
    obj: dict = {"reports": [rep.to_dict() for rep in reports]}
    if summary is not None:
        obj["summary"] = summary.to_dict()
    return json.dumps(obj, indent=2) + "\n"
