"""Tie-handling rules for attributing papers to percentile rank classes.

Every rule works on tie groups and yields, per group, the fraction of the
group's papers credited to each class plus the (possibly fractional) weight
every paper of the group receives. All arithmetic is on
:class:`fractions.Fraction`, so totals are exact.

The rules, by :class:`SchemeId`:

``LB``
    percentile = papers with fewer citations, ``b/n``; the whole group goes
    to the class containing it (lower-closed intervals).
``R``
    percentile = papers with fewer or equal citations, ``(b+m)/n``;
    upper-closed intervals.
``PG_AVG`` / ``PG_MID``
    whole group by its average quantile ``(b + (m+1)/2)/n`` or by the middle
    of its uncertainty interval ``(b + m/2)/n``. A selector lying exactly on a
    boundary the group straddles goes to the higher class.
``AW_CEIL`` / ``AW_FLOOR``
    every rank ``i`` is classified on its own, by ``(i-1)/n`` (lower-closed)
    or ``i/n`` (upper-closed); the group shares the average of those weights.
``WS``
    fractional scoring: the group's quantile interval is split between the
    classes it overlaps.
"""

from __future__ import annotations

import bisect
import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .distribution import RankedDistribution, TieGroup, parse_rational
from .errors import InvariantError, ParseError

__all__ = [
    "ClassScheme",
    "SchemeId",
    "SchemeResult",
    "ALL_SCHEMES",
    "LOWER_CLOSED",
    "UPPER_CLOSED",
    "group_percentile_lower",
    "group_percentile_lower_equal",
    "group_average_quantile",
    "group_uncertainty_midpoint",
    "classify_point",
    "assign_lb",
    "assign_r",
    "assign_pg",
    "assign_aw",
    "assign_ws",
    "assign_ws_per_rank",
    "assign",
    "parse_scheme_ids",
]

LOWER_CLOSED = "lower-closed"
UPPER_CLOSED = "upper-closed"


class SchemeId(str, enum.Enum):
    LB = "LB"
    R = "R"
    PG_MID = "PG_MID"
    PG_AVG = "PG_AVG"
    AW_CEIL = "AW_CEIL"
    AW_FLOOR = "AW_FLOOR"
    WS = "WS"

    def __str__(self):
        return self.value


ALL_SCHEMES = tuple(SchemeId)

# Table labels used in the literature for the same rules.
_ALIASES = {"PG": SchemeId.PG_AVG, "S": SchemeId.AW_CEIL, "AW": SchemeId.AW_CEIL}


def parse_scheme_ids(spec: str) -> tuple[SchemeId, ...]:
    """Parse ``"ws,lb"`` or ``"all"`` (case-insensitive) into scheme ids."""
    if spec.strip().lower() == "all":
        return ALL_SCHEMES
    out = []
    for token in spec.split(","):
        key = token.strip().upper().replace("-", "_")
        if not key:
            continue
        if key in _ALIASES:
            sid = _ALIASES[key]
        else:
            try:
                sid = SchemeId(key)
            except ValueError:
                raise ParseError(f"unknown scheme {token.strip()!r}") from None
        if sid not in out:
            out.append(sid)
    if not out:
        raise ParseError("no scheme selected")
    return tuple(out)


@dataclass(frozen=True)
class ClassScheme:
    """Class boundaries ``p_1 < ... < p_K = 1`` and per-class weights.

    Class ``k`` is the quantile interval ``(p_{k-1}, p_k]`` with ``p_0 = 0``.
    Weights must increase strictly unless ``strict_weights=False``; without
    that, the LB <= WS <= R ordering of totals no longer holds.
    """

    boundaries: tuple[Fraction, ...]
    weights: tuple[Fraction, ...]
    strict_weights: bool = field(default=True, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "boundaries", tuple(parse_rational(p) for p in self.boundaries))
        object.__setattr__(self, "weights", tuple(parse_rational(w) for w in self.weights))
        self.validate()

    def validate(self) -> None:
        p, w = self.boundaries, self.weights
        if not p:
            raise InvariantError("class scheme needs at least one boundary")
        if len(w) != len(p):
            raise InvariantError(f"{len(p)} boundaries but {len(w)} weights")
        if p[0] <= 0 or any(a >= b for a, b in zip(p, p[1:])):
            raise InvariantError("boundaries must increase strictly within (0, 1]")
        if p[-1] != 1:
            raise InvariantError(f"last boundary must be 1, got {p[-1]}")
        if self.strict_weights and any(a >= b for a, b in zip(w, w[1:])):
            raise InvariantError("weights must increase strictly")

    @property
    def K(self) -> int:
        return len(self.boundaries)

    def lower(self, k: int) -> Fraction:
        """Lower edge ``p_{k-1}`` of 1-based class ``k``."""
        return Fraction(0) if k == 1 else self.boundaries[k - 2]

    def upper(self, k: int) -> Fraction:
        return self.boundaries[k - 1]

    def weight(self, k: int) -> Fraction:
        return self.weights[k - 1]

    @classmethod
    def default(cls) -> "ClassScheme":
        """Six classes: bottom 50%, 50-75, 75-90, 90-95, 95-99, top 1%; weights 1..6."""
        return cls(
            tuple(Fraction(x, 100) for x in (50, 75, 90, 95, 99, 100)),
            tuple(Fraction(k) for k in range(1, 7)),
        )

    @classmethod
    def from_dict(cls, obj) -> "ClassScheme":
        try:
            boundaries, weights = obj["boundaries"], obj["weights"]
        except (KeyError, TypeError):
            raise ParseError("class scheme needs 'boundaries' and 'weights'") from None
        if not isinstance(boundaries, list) or not isinstance(weights, list):
            raise ParseError("'boundaries' and 'weights' must be lists")
        return cls(tuple(boundaries), tuple(weights), strict_weights=obj.get("strict_weights", True))

    @classmethod
    def from_json(cls, text: str | bytes) -> "ClassScheme":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
        return cls.from_dict(obj)

    def to_dict(self) -> dict:
        return {
            "boundaries": [str(p) for p in self.boundaries],
            "weights": [str(w) for w in self.weights],
        }


@dataclass(frozen=True)
class SchemeResult:
    """Per-group class shares and per-paper weights under one scheme."""

    scheme: SchemeId
    ranked: RankedDistribution
    class_scheme: ClassScheme
    shares: tuple[tuple[Fraction, ...], ...]
    paper_weight: tuple[Fraction, ...]

    @property
    def n(self) -> int:
        return self.ranked.n

    def validate(self) -> None:
        s = self.class_scheme
        if len(self.shares) != len(self.ranked.groups) or len(self.paper_weight) != len(self.shares):
            raise InvariantError(f"{self.scheme}: result does not cover every tie group")
        prev = None
        for g, sh, pw in zip(self.ranked.groups, self.shares, self.paper_weight):
            tag = f"{self.scheme}: group at {g.citations} citations"
            if len(sh) != s.K or any(x < 0 for x in sh) or sum(sh) != 1:
                raise InvariantError(f"{tag}: shares do not form a distribution over {s.K} classes")
            if pw != sum(w * x for w, x in zip(s.weights, sh)):
                raise InvariantError(f"{tag}: paper weight is not the share-weighted mean")
            if self.scheme in _WHOLE_GROUP and sorted(sh)[-1] != 1:
                raise InvariantError(f"{tag}: group is split across classes")
            if prev is not None and s.strict_weights and pw < prev:
                raise InvariantError(f"{tag}: paper weight decreases with citations")
            prev = pw


# ---------------------------------------------------------------------------
# per-group selectors


def group_percentile_lower(g: TieGroup, n: int) -> Fraction:
    """Share of papers with strictly fewer citations than the group."""
    return Fraction(g.b, n)


def group_percentile_lower_equal(g: TieGroup, n: int) -> Fraction:
    return Fraction(g.b + g.m, n)


def group_average_quantile(g: TieGroup, n: int) -> Fraction:
    """Mean of ``i/n`` over the group's ranks ``b+1 .. b+m``."""
    return Fraction(2 * g.b + g.m + 1, 2 * n)


def group_uncertainty_midpoint(g: TieGroup, n: int) -> Fraction:
    """Centre of ``(b/n, (b+m)/n]``; always ``1/(2n)`` below the average quantile."""
    return Fraction(2 * g.b + g.m, 2 * n)


def classify_point(q: Fraction, s: ClassScheme, closure: str = LOWER_CLOSED) -> int:
    """1-based class index of quantile ``q``.

    lower-closed: ``p_{k-1} <= q < p_k`` (``q == 1`` maps to K).
    upper-closed: ``p_{k-1} < q <= p_k`` (``q == 0`` maps to 1).
    """
    if not 0 <= q <= 1:
        raise ValueError(f"quantile {q} outside [0, 1]")
    p = s.boundaries
    if closure == LOWER_CLOSED:
        return min(bisect.bisect_right(p, q) + 1, s.K)
    if closure == UPPER_CLOSED:
        return bisect.bisect_left(p, q) + 1
    raise ValueError(f"unknown closure {closure!r}")


# ---------------------------------------------------------------------------
# scheme implementations


_WHOLE_GROUP = {SchemeId.LB, SchemeId.R, SchemeId.PG_AVG, SchemeId.PG_MID}


_ZERO, _ONE = Fraction(0), Fraction(1)


def _units(K: int) -> list[tuple[Fraction, ...]]:
    """``_units(K)[k-1]`` is the share vector putting everything in class k."""
    return [tuple(_ONE if j == k else _ZERO for j in range(K)) for k in range(K)]


def _whole_group(sid, r, s, selector, closure) -> SchemeResult:
    units = _units(s.K)
    shares, weights = [], []
    for g in r.groups:
        k = classify_point(selector(g, r.n), s, closure)
        shares.append(units[k - 1])
        weights.append(s.weight(k))
    return SchemeResult(sid, r, s, tuple(shares), tuple(weights))


def _from_shares(sid, r, s, shares: Sequence[tuple[Fraction, ...]]) -> SchemeResult:
    weights = tuple(sum((w * x for w, x in zip(s.weights, sh) if x), _ZERO) for sh in shares)
    return SchemeResult(sid, r, s, tuple(shares), weights)


def assign_lb(r: RankedDistribution, s: ClassScheme) -> SchemeResult:
    """Tied papers at a border all fall into the lower class."""
    return _whole_group(SchemeId.LB, r, s, group_percentile_lower, LOWER_CLOSED)


def assign_r(r: RankedDistribution, s: ClassScheme) -> SchemeResult:
    """Tied papers at a border all fall into the higher class."""
    return _whole_group(SchemeId.R, r, s, group_percentile_lower_equal, UPPER_CLOSED)


def _pg_class(g: TieGroup, n: int, s: ClassScheme, q: Fraction) -> int:
    k = classify_point(q, s, LOWER_CLOSED)
    # q == p_{k-1} and the group ends there: it does not straddle, keep it below
    if k > 1 and q == s.lower(k) and g.end <= q * n:
        k -= 1
    return k


def assign_pg(r: RankedDistribution, s: ClassScheme, variant: str = "average-quantile") -> SchemeResult:
    """Whole-group attribution by average quantile or by uncertainty midpoint.

    ``variant`` is ``"average-quantile"`` or ``"midpoint"``. A selector lying
    exactly on a boundary that the group straddles sends the group to the
    higher class. A singleton whose rank ends on the boundary has its average
    quantile there too; it does not straddle and stays in the lower class.
    """
    if variant == "average-quantile":
        sid, selector = SchemeId.PG_AVG, group_average_quantile
    elif variant == "midpoint":
        sid, selector = SchemeId.PG_MID, group_uncertainty_midpoint
    else:
        raise ValueError(f"unknown PG variant {variant!r}")
    units = _units(s.K)
    shares, weights = [], []
    for g in r.groups:
        k = _pg_class(g, r.n, s, selector(g, r.n))
        shares.append(units[k - 1])
        weights.append(s.weight(k))
    return SchemeResult(sid, r, s, tuple(shares), tuple(weights))


def assign_aw(r: RankedDistribution, s: ClassScheme, variant: str = "ceiling") -> SchemeResult:
    """Average of individually assigned weights over each tie group.

    With the ceiling variant rank ``i`` lies in class k iff
    ``ceil(p_{k-1} n) < i <= ceil(p_k n)``; the floor variant uses floor.
    """
    if variant == "ceiling":
        sid, rnd = SchemeId.AW_CEIL, math.ceil
    elif variant == "floor":
        sid, rnd = SchemeId.AW_FLOOR, math.floor
    else:
        raise ValueError(f"unknown AW variant {variant!r}")
    n = r.n
    cuts = [0] + [rnd(p * n) for p in s.boundaries]
    units = _units(s.K)
    shares = []
    for g in r.groups:
        # first class whose cut reaches the group's last rank
        k = bisect.bisect_left(cuts, g.end)
        if cuts[k - 1] <= g.b:
            shares.append(units[k - 1])
            continue
        shares.append(tuple(
            Fraction(max(0, min(g.end, cuts[k]) - max(g.b, cuts[k - 1])), g.m)
            for k in range(1, s.K + 1)
        ))
    return _from_shares(sid, r, s, shares)


def _overlap(lo: Fraction, hi: Fraction, a: Fraction, b: Fraction) -> Fraction:
    return max(Fraction(0), min(hi, b) - max(lo, a))


def assign_ws(r: RankedDistribution, s: ClassScheme) -> SchemeResult:
    """Fractional scoring on each group's aggregated quantile interval."""
    n = r.n
    units = _units(s.K)
    # integer rank bounds of the boundaries: group (b, end] lies in class k
    # iff ceil(p_{k-1} n) <= b and end <= floor(p_k n)
    floors = [math.floor(p * n) for p in s.boundaries]
    ceils = [0] + [math.ceil(p * n) for p in s.boundaries[:-1]]
    shares, weights = [], []
    for g in r.groups:
        k = bisect.bisect_left(floors, g.end)
        if ceils[k] <= g.b:
            shares.append(units[k])
            weights.append(s.weights[k])
            continue
        lo, hi = g.interval(n)
        sh = tuple(_overlap(lo, hi, s.lower(j), s.upper(j)) * n / g.m for j in range(1, s.K + 1))
        shares.append(sh)
        weights.append(sum((w * x for w, x in zip(s.weights, sh) if x), _ZERO))
    return SchemeResult(SchemeId.WS, r, s, tuple(shares), tuple(weights))


def assign_ws_per_rank(r: RankedDistribution, s: ClassScheme) -> SchemeResult:
    """Fractional scoring paper by paper, then averaged within each group.

    O(n*K); kept as an independent formulation to check :func:`assign_ws`.
    """
    n = r.n
    shares = []
    for g in r.groups:
        acc = [Fraction(0)] * s.K
        for i in range(g.b + 1, g.end + 1):
            lo, hi = Fraction(i - 1, n), Fraction(i, n)
            for k in range(1, s.K + 1):
                acc[k - 1] += _overlap(lo, hi, s.lower(k), s.upper(k)) * n
        shares.append(tuple(x / g.m for x in acc))
    return _from_shares(SchemeId.WS, r, s, shares)


def assign(r: RankedDistribution, s: ClassScheme, scheme: SchemeId | str) -> SchemeResult:
    """Dispatch to the rule named by ``scheme``."""
    sid = SchemeId(scheme)
    if sid is SchemeId.LB:
        return assign_lb(r, s)
    if sid is SchemeId.R:
        return assign_r(r, s)
    if sid is SchemeId.PG_AVG:
        return assign_pg(r, s, "average-quantile")
    if sid is SchemeId.PG_MID:
        return assign_pg(r, s, "midpoint")
    if sid is SchemeId.AW_CEIL:
        return assign_aw(r, s, "ceiling")
    if sid is SchemeId.AW_FLOOR:
        return assign_aw(r, s, "floor")
    return assign_ws(r, s)
