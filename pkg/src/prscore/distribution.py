"""Citation datasets, tie-group ranking and threshold summaries.

A dataset is a multiset of non-negative citation counts. Ranking sorts it
ascending and compresses equal counts into tie groups; a group of ``m``
papers preceded by ``b`` papers with fewer citations occupies ranks
``b+1 .. b+m`` and the quantile interval ``(b/n, (b+m)/n]``.

A :class:`ThresholdSummary` records, for every class boundary, the tie
group holding the paper at rank ``ceil(p*n)``. It is all that the published
tables carry, and :func:`reconstruct` turns it back into a dataset whose
scores under every scheme equal those of the original data.
"""

from __future__ import annotations

import bisect
import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import InvariantError, ParseError

__all__ = [
    "Record",
    "Dataset",
    "TieGroup",
    "RankedDistribution",
    "ThresholdRow",
    "ThresholdSummary",
    "load_dataset",
    "dump_dataset",
    "rank",
    "summarize",
    "reconstruct",
    "parse_rational",
]

FORMATS = ("per-record", "frequency")


def parse_rational(value) -> Fraction:
    """Convert an int, ``"3/4"``, ``"0.75"`` or a Fraction to an exact Fraction.

    Floats are rejected; ``0.1`` has no exact binary representation and
    silently accepting it would defeat the point of rational arithmetic.
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise ParseError(f"expected an exact rational, got {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"not a rational number: {value!r}") from None
    raise ParseError(f"expected an exact rational, got {type(value).__name__}")


@dataclass(frozen=True)
class Record:
    citations: int
    id: str | None = None


@dataclass(frozen=True)
class Dataset:
    """An immutable collection of citation records."""

    records: tuple[Record, ...]

    @classmethod
    def from_counts(cls, counts: Iterable[int], ids: Iterable[str] | None = None) -> "Dataset":
        counts = list(counts)
        ids = [None] * len(counts) if ids is None else list(ids)
        if len(ids) != len(counts):
            raise ValueError("ids and counts differ in length")
        return cls(tuple(Record(int(c), i) for c, i in zip(counts, ids)))

    @property
    def n(self) -> int:
        return len(self.records)

    @property
    def counts(self) -> list[int]:
        return [r.citations for r in self.records]

    def validate(self) -> None:
        if self.n < 1:
            raise InvariantError("dataset is empty")
        for i, rec in enumerate(self.records, 1):
            if not isinstance(rec.citations, int) or isinstance(rec.citations, bool):
                raise InvariantError(f"record {i}: citation count is not an integer")
            if rec.citations < 0:
                raise InvariantError(f"record {i}: negative citation count {rec.citations}")


def _parse_int(text: str, what: str, line: int) -> int:
    text = text.strip()
    try:
        value = int(text)
    except ValueError:
        raise ParseError(f"{what} is not an integer: {text!r}", line) from None
    if value < 0:
        raise InvariantError(f"negative {what} {value}", line)
    return value


def _read_text(source) -> str:
    if isinstance(source, bytes):
        data = source
    elif isinstance(source, str):
        return source
    else:
        data = source.read()
        if isinstance(data, str):
            return data
    try:
        return data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise ParseError(f"input is not valid UTF-8: {exc}") from None


def load_dataset(source, format: str = "per-record") -> Dataset:
    """Parse a dataset from a byte stream (or bytes / str).

    ``per-record``: one paper per line, ``<citations>`` or ``<id>,<citations>``.
    ``frequency``: ``<citations>,<count>`` per line, expanded into ``count``
    anonymous records. Blank lines and lines starting with ``#`` are skipped.
    """
    if format not in FORMATS:
        raise ValueError(f"unknown dataset format {format!r}")
    text = _read_text(source)
    records: list[Record] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            row = next(csv.reader([stripped]))
        except csv.Error as exc:
            raise ParseError(str(exc), lineno) from None
        if format == "per-record":
            if len(row) == 1:
                records.append(Record(_parse_int(row[0], "citation count", lineno)))
            elif len(row) == 2:
                ident = row[0].strip() or None
                records.append(Record(_parse_int(row[1], "citation count", lineno), ident))
            else:
                raise ParseError(f"expected 1 or 2 fields, got {len(row)}", lineno)
        else:
            if len(row) != 2:
                raise ParseError(f"expected <citations>,<count>, got {len(row)} fields", lineno)
            value = _parse_int(row[0], "citation count", lineno)
            count = _parse_int(row[1], "frequency", lineno)
            records.extend([Record(value)] * count)
    if not records:
        raise ParseError("empty input: no records")
    return Dataset(tuple(records))


def dump_dataset(d: Dataset, format: str = "per-record") -> str:
    """Serialise a dataset in one of the formats accepted by :func:`load_dataset`."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if format == "per-record":
        for rec in d.records:
            writer.writerow([rec.citations] if rec.id is None else [rec.id, rec.citations])
    elif format == "frequency":
        # run-length encode in record order so the expansion reproduces it
        runs: list[list[int]] = []
        for c in d.counts:
            if runs and runs[-1][0] == c:
                runs[-1][1] += 1
            else:
                runs.append([c, 1])
        writer.writerows(runs)
    else:
        raise ValueError(f"unknown dataset format {format!r}")
    return buf.getvalue()


@dataclass(frozen=True)
class TieGroup:
    """A maximal run of papers with equal citation count."""

    citations: int
    m: int
    b: int
    ids: tuple[str, ...] = field(default=(), compare=False, repr=False)

    @property
    def end(self) -> int:
        """Rank of the group's last paper (``b + m``)."""
        return self.b + self.m

    def interval(self, n: int) -> tuple[Fraction, Fraction]:
        return Fraction(self.b, n), Fraction(self.end, n)


@dataclass(frozen=True)
class RankedDistribution:
    groups: tuple[TieGroup, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "_ends", tuple(g.end for g in self.groups))

    def group_index_at_rank(self, rank: int) -> int:
        """Index of the group containing 1-based ``rank``."""
        if not 1 <= rank <= self.n:
            raise ValueError(f"rank {rank} outside 1..{self.n}")
        return bisect.bisect_left(self._ends, rank)

    def group_at_rank(self, rank: int) -> TieGroup:
        return self.groups[self.group_index_at_rank(rank)]

    def validate(self) -> None:
        if self.n < 1 or not self.groups:
            raise InvariantError("ranked distribution is empty")
        expected_b = 0
        prev = None
        for g in self.groups:
            if g.m < 1:
                raise InvariantError(f"tie group at {g.citations} citations has size {g.m}")
            if g.citations < 0:
                raise InvariantError(f"tie group has negative citations {g.citations}")
            if prev is not None and g.citations <= prev:
                raise InvariantError("tie groups are not strictly increasing in citations")
            if g.b != expected_b:
                raise InvariantError(
                    f"tie group at {g.citations} citations: b={g.b}, expected {expected_b}"
                )
            expected_b += g.m
            prev = g.citations
        if expected_b != self.n:
            raise InvariantError(f"group sizes sum to {expected_b}, not n={self.n}")


def rank(d: Dataset) -> RankedDistribution:
    """Sort ``d`` ascending and compress equal citation counts into tie groups."""
    if d.n < 1:
        raise InvariantError("cannot rank an empty dataset")
    # sorted() is stable, so ids within a group keep their input order
    ordered = sorted(d.records, key=lambda r: r.citations)
    groups = []
    b = 0
    i = 0
    while i < len(ordered):
        c = ordered[i].citations
        j = i
        while j < len(ordered) and ordered[j].citations == c:
            j += 1
        ids = tuple(r.id for r in ordered[i:j] if r.id is not None)
        groups.append(TieGroup(c, j - i, b, ids))
        b += j - i
        i = j
    return RankedDistribution(tuple(groups), d.n)


@dataclass(frozen=True)
class ThresholdRow:
    p: Fraction
    citations: int
    below: int
    at: int
    above: int


@dataclass(frozen=True)
class ThresholdSummary:
    """Per-boundary view of a distribution, in the layout of the published tables."""

    n: int
    bottom_citations: int
    bottom_count: int
    rows: tuple[ThresholdRow, ...]

    def validate(self, check_thresholds: bool = True) -> None:
        """Raise :class:`InvariantError` naming the first violated invariant.

        ``check_thresholds=False`` skips only the requirement that each row's
        group contain rank ``ceil(p*n)``; structural consistency is still checked.
        """
        n = self.n
        if n < 1:
            raise InvariantError(f"summary n must be positive, got {n}")
        if self.bottom_citations < 0:
            raise InvariantError("bottom group has negative citations")
        if not 1 <= self.bottom_count <= n:
            raise InvariantError(f"bottom count {self.bottom_count} outside 1..{n}")
        prev_p = Fraction(0)
        # the bottom group acts as the row preceding k=1
        prev = ThresholdRow(prev_p, self.bottom_citations, 0, self.bottom_count, n - self.bottom_count)
        for k, row in enumerate(self.rows, 1):
            tag = f"row k={k}"
            if not prev_p < row.p <= 1:
                raise InvariantError(f"{tag}: boundary {row.p} not increasing within (0, 1]")
            if row.below < 0 or row.at < 1 or row.above < 0:
                raise InvariantError(f"{tag}: counts must be below>=0, at>=1, above>=0")
            if row.below + row.at + row.above != n:
                raise InvariantError(f"{tag}: below + at + above != n")
            if check_thresholds and not row.below < math.ceil(row.p * n) <= row.below + row.at:
                raise InvariantError(
                    f"{tag}: group ({row.below}, {row.below + row.at}] misses rank ceil(p*n)"
                )
            if row.citations < prev.citations:
                raise InvariantError(f"{tag}: citations at threshold decrease")
            if row.citations == prev.citations:
                if (row.below, row.at) != (prev.below, prev.at):
                    raise InvariantError(f"{tag}: equal citations but different tie group")
            elif row.below < prev.below + prev.at:
                raise InvariantError(f"{tag}: tie group overlaps the previous one")
            prev_p = row.p
            prev = row

    @classmethod
    def from_dict(cls, obj, strict: bool = True) -> "ThresholdSummary":
        try:
            n = obj["n"]
            bottom = obj["bottom"]
            rows = []
            for item in obj["rows"]:
                below, at = item["below"], item["at"]
                above = n - below - at
                if "above" in item and item["above"] != above:
                    raise InvariantError(
                        f"row p={item['p']}: above={item['above']} inconsistent with n - below - at = {above}"
                    )
                rows.append(ThresholdRow(parse_rational(item["p"]), item["citations"], below, at, above))
            for value in [n, bottom["citations"], bottom["count"]] + [
                x for r in rows for x in (r.citations, r.below, r.at)
            ]:
                if not isinstance(value, int) or isinstance(value, bool):
                    raise ParseError(f"expected an integer, got {value!r}")
            summary = cls(n, bottom["citations"], bottom["count"], tuple(rows))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed threshold summary: {exc!r}") from None
        summary.validate(check_thresholds=strict)
        return summary

    @classmethod
    def from_json(cls, text: str | bytes, strict: bool = True) -> "ThresholdSummary":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
        return cls.from_dict(obj, strict=strict)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "bottom": {"citations": self.bottom_citations, "count": self.bottom_count},
            "rows": [
                {"p": str(r.p), "citations": r.citations, "below": r.below, "at": r.at, "above": r.above}
                for r in self.rows
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def summarize(r: RankedDistribution, s) -> ThresholdSummary:
    """Locate the tie group holding rank ``ceil(p_k * n)`` for every boundary of ``s``."""
    n = r.n
    rows = []
    for p in s.boundaries:
        g = r.group_at_rank(math.ceil(p * n))
        rows.append(ThresholdRow(p, g.citations, g.b, g.m, n - g.end))
    first = r.groups[0]
    return ThresholdSummary(n, first.citations, first.m, tuple(rows))


def _gap_values(lo: int, hi: int, count: int) -> list[int]:
    """``count`` values strictly between lo and hi, cycling from hi-1 down to lo+1."""
    pool = list(range(hi - 1, lo, -1))
    if count and not pool:
        raise InvariantError(
            f"infeasible gap: {count} papers must lie strictly between {lo} and {hi} citations"
        )
    return [pool[i % len(pool)] for i in range(count)]


def reconstruct(t: ThresholdSummary, strict: bool = True) -> Dataset:
    """Build a dataset of size ``t.n`` whose summary equals ``t``.

    The threshold groups are reproduced verbatim. Papers between two threshold
    groups get citation values strictly between theirs, so they never merge
    with a threshold group and all lie inside a single class interval.

    ``strict=False`` accepts a summary whose threshold groups do not contain
    rank ``ceil(p*n)`` (a published table computed with rounded
    percentages can be like that). The result then no longer round-trips,
    and scores near the offending boundary depend on the gap fill.
    """
    t.validate(check_thresholds=strict)
    groups: list[tuple[int, int, int]] = [(t.bottom_citations, 0, t.bottom_count)]
    for row in t.rows:
        g = (row.citations, row.below, row.at)
        if g != groups[-1]:
            groups.append(g)

    counts: list[int] = []
    prev_c, prev_end = None, 0
    for c, below, at in groups:
        if prev_c is not None:
            counts.extend(_gap_values(prev_c, c, below - prev_end))
        counts.extend([c] * at)
        prev_c, prev_end = c, below + at
    # Only reachable when the last boundary is below 1.
    counts.extend([prev_c + 1] * (t.n - prev_end))
    return Dataset.from_counts(counts)
