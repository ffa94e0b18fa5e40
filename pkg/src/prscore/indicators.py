"""Aggregate scheme results into class shares, thresholds, I3 and R."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate

from .errors import InvariantError
from .schemes import ClassScheme, SchemeId, SchemeResult

__all__ = ["IndicatorReport", "aggregate", "theoretical_r"]


@dataclass(frozen=True)
class IndicatorReport:
    scheme: SchemeId
    class_scheme: ClassScheme
    n: int
    class_shares: tuple[Fraction, ...]
    factual_thresholds: tuple[Fraction, ...]
    contributions: tuple[Fraction, ...]
    i3: Fraction
    r: Fraction

    def validate(self) -> None:
        s = self.class_scheme
        tag = str(self.scheme)
        if sum(self.class_shares) != 1:
            raise InvariantError(f"{tag}: class shares do not sum to 1")
        ft = self.factual_thresholds
        if any(a > b for a, b in zip(ft, ft[1:])) or ft[-1] != 1:
            raise InvariantError(f"{tag}: factual thresholds not non-decreasing up to 1")
        if self.r != sum(self.contributions) or self.i3 != self.r * self.n:
            raise InvariantError(f"{tag}: r, i3 and contributions disagree")
        if not min(s.weights) <= self.r <= max(s.weights):
            raise InvariantError(f"{tag}: r={self.r} outside the weight range")

    def to_dict(self) -> dict:
        """JSON-ready dict; every rational is an exact string such as ``"191/100"``."""
        return {
            "scheme": str(self.scheme),
            "n": self.n,
            "r": str(self.r),
            "i3": str(self.i3),
            "class_shares": [str(x) for x in self.class_shares],
            "factual_thresholds": [str(x) for x in self.factual_thresholds],
            "contributions": [str(x) for x in self.contributions],
            "class_scheme": self.class_scheme.to_dict(),
        }


def aggregate(res: SchemeResult) -> IndicatorReport:
    s = res.class_scheme
    n = res.n
    whole = [0] * s.K
    partial = [Fraction(0)] * s.K
    # runs of equal per-paper weight, so i3 needs one product per run
    runs: list[list] = []
    for g, sh, pw in zip(res.ranked.groups, res.shares, res.paper_weight):
        for k, x in enumerate(sh):
            if not x:
                continue
            if x == 1:
                whole[k] += g.m
            else:
                partial[k] += g.m * x
        if runs and runs[-1][0] == pw:
            runs[-1][1] += g.m
        else:
            runs.append([pw, g.m])
    mass = [w + x for w, x in zip(whole, partial)]
    i3 = sum((w * c for w, c in runs), Fraction(0))
    class_shares = tuple(x / n for x in mass)
    contributions = tuple(w * x for w, x in zip(s.weights, class_shares))
    r = sum(contributions, Fraction(0))
    if r * n != i3:
        raise InvariantError(f"{res.scheme}: per-paper weights disagree with class totals")
    return IndicatorReport(
        scheme=res.scheme,
        class_scheme=s,
        n=n,
        class_shares=class_shares,
        factual_thresholds=tuple(accumulate(class_shares)),
        contributions=contributions,
        i3=i3,
        r=r,
    )


def theoretical_r(s: ClassScheme) -> Fraction:
    """Expected relative score when every class holds exactly its nominal share."""
    return sum((s.weight(k) * (s.upper(k) - s.lower(k)) for k in range(1, s.K + 1)), Fraction(0))
