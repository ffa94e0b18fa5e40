"""Percentile rank class scores and I3/R indicators with exact tie handling."""

from .distribution import (
    Dataset,
    RankedDistribution,
    Record,
    ThresholdRow,
    ThresholdSummary,
    TieGroup,
    dump_dataset,
    load_dataset,
    rank,
    reconstruct,
    summarize,
)
from .errors import InvariantError, ParseError, PrscoreError
from .indicators import IndicatorReport, aggregate, theoretical_r
from .report import RenderedTable, render_paper_table, round_exact
from .schemes import (
    ALL_SCHEMES,
    ClassScheme,
    SchemeId,
    SchemeResult,
    assign,
    assign_aw,
    assign_lb,
    assign_pg,
    assign_r,
    assign_ws,
    assign_ws_per_rank,
    classify_point,
)

__version__ = "0.1.0"
