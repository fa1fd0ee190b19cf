"""Interestingness statistics over a profiled dataset.

These functions back both chart construction and recommendation
parameterization. Degenerate inputs never raise or return NaN: an
undefined correlation comes back as None and is excluded from ranking,
while a degenerate sigma comes back as None and ranks last.

Tie handling is part of the contract. Candidate tuples are enumerated in
dataset column order, ranked by metric value descending with competition
ranks (equal values share a rank), and selection among equals falls back
to enumeration order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .charts import Agg, ChartSpec, aggregate, filter_rows
from .profiling import Dataset, Kind, equal_width_bins

TOP_N_DEFAULT = 3


@dataclass(frozen=True)
class PairStat:
    """One candidate tuple with its metric value and competition rank."""

    attributes: tuple[str, ...]
    metric: str
    value: Optional[float]
    rank: int

    def rank_score(self, total: int) -> float:
        return (total - self.rank + 1) / total


@dataclass(frozen=True)
class FilterBand:
    """A quartile band of a numeric or temporal attribute."""

    attribute: str
    label: str
    low: float
    high: float
    low_open: bool
    high_open: bool
    degenerate: bool = False


def _pairs(d: Dataset, a: str, b: str, row_ids: Optional[Sequence[int]] = None):
    rows = d.rows if row_ids is None else [d.rows[i] for i in row_ids]
    return [
        (row[a], row[b])
        for row in rows
        if row[a] is not None and row[b] is not None
    ]


def pearson_r(
    d: Dataset, a: str, b: str, row_ids: Optional[Sequence[int]] = None
) -> Optional[float]:
    """Pearson correlation over pairwise-complete rows.

    Returns None (never NaN) when fewer than two complete pairs exist or
    either column has zero variance among them.
    """
    pairs = _pairs(d, a, b, row_ids)
    n = len(pairs)
    if n < 2:
        return None
    mean_a = sum(p[0] for p in pairs) / n
    mean_b = sum(p[1] for p in pairs) / n
    sab = math.fsum((x - mean_a) * (y - mean_b) for x, y in pairs)
    saa = math.fsum((x - mean_a) ** 2 for x, _ in pairs)
    sbb = math.fsum((y - mean_b) ** 2 for _, y in pairs)
    if saa == 0 or sbb == 0:
        return None
    return sab / math.sqrt(saa * sbb)


def _population_sigma(values: Sequence[float]) -> float:
    n = len(values)
    mean = sum(values) / n
    return math.sqrt(math.fsum((v - mean) ** 2 for v in values) / n)


def _grouped(d: Dataset, dimension: str, row_ids: Optional[Sequence[int]] = None):
    ids = range(len(d.rows)) if row_ids is None else row_ids
    groups: dict = {}
    for rid in ids:
        key = d.rows[rid][dimension]
        if key is None:
            continue
        groups.setdefault(key, []).append(rid)
    return groups


def group_sigma(
    d: Dataset,
    dimension: str,
    measure: str,
    agg: Agg = Agg.MEAN,
    row_ids: Optional[Sequence[int]] = None,
) -> Optional[float]:
    """Population sigma of the per-group aggregated measure.

    Groups are the distinct non-null values of the dimension (temporal
    dimensions group by timestamp). Null measure cells are ignored within
    a group; groups left empty by that are dropped. Fewer than two usable
    groups is a zero-signal: None, ranked last by callers.
    """
    groups = _grouped(d, dimension, row_ids)
    per_group = []
    for rids in groups.values():
        value = aggregate([d.rows[rid][measure] for rid in rids], agg)
        if value is not None:
            per_group.append(value)
    if len(per_group) < 2:
        return None
    return _population_sigma(per_group)


def normalized_group_sigma(
    d: Dataset, dimension: str, measure: str, row_ids: Optional[Sequence[int]] = None
) -> Optional[float]:
    """group_sigma of the z-scored measure, comparable across measures.

    The measure column is standardized over its non-null cells before
    grouping so that sigma rankings do not just reflect units. None when
    the column is constant or the grouping is degenerate.
    """
    column = [v for v in d.column(measure) if v is not None]
    if len(column) < 2:
        return None
    spread = _population_sigma(column)
    if spread == 0:
        return None
    raw = group_sigma(d, dimension, measure, Agg.MEAN, row_ids)
    if raw is None:
        return None
    return raw / spread


def distribution_sigma(d: Dataset, attribute: str) -> Optional[float]:
    """Population sigma of per-group (or per-bin) item counts.

    Categorical and temporal attributes group by distinct value;
    quantitative attributes use ten equal-width bins. A single group or
    bin is a zero-signal: None.
    """
    profile = d.attribute(attribute)
    if profile.kind is Kind.QUANTITATIVE:
        values = [v for v in d.column(attribute) if v is not None]
        if not values:
            return None
        bins = equal_width_bins(values)
        counts = [float(c) for _, _, c in bins]
    else:
        counts = [float(c) for _, c in profile.values]
    if len(counts) < 2:
        return None
    return _population_sigma(counts)


def quartiles(values: Sequence[float]) -> tuple[float, float, float]:
    """Q1, median, Q3 by linear interpolation on the sorted values."""
    ordered = sorted(values)
    n = len(ordered)

    def at(p: float) -> float:
        pos = (n - 1) * p
        lo = int(pos)
        frac = pos - lo
        if lo + 1 < n:
            return ordered[lo] + (ordered[lo + 1] - ordered[lo]) * frac
        return ordered[-1]

    return at(0.25), at(0.5), at(0.75)


def quartile_filter_ranges(d: Dataset, attribute: str) -> list[FilterBand]:
    """Four labeled quartile bands of a numeric or temporal attribute.

    Bands partition [min, max]: the low band is closed, later bands are
    open at the bottom, and the high band is (Q3, max]. When Q1 equals Q3
    the quartiles carry no information and a single full-range band is
    returned with its degenerate flag set.
    """
    values = [v for v in d.column(attribute) if isinstance(v, (int, float))]
    if len(values) < 4:
        raise ValueError(f"{attribute!r} needs at least 4 numeric values for quartiles")
    q1, q2, q3 = quartiles(values)
    low, high = min(values), max(values)
    if q1 == q3:
        return [FilterBand(attribute, "all", low, high, False, False, degenerate=True)]
    return [
        FilterBand(attribute, "low", low, q1, False, False),
        FilterBand(attribute, "lower middle", q1, q2, True, False),
        FilterBand(attribute, "upper middle", q2, q3, True, False),
        FilterBand(attribute, "high", q3, high, True, False),
    ]


def top_n_categories(d: Dataset, chart: ChartSpec, n: int = TOP_N_DEFAULT) -> list:
    """Top categories of the chart's categorical axis by its own measure.

    Bars rank by the aggregated y value (or item count for count charts)
    over the chart's filtered rows, descending; ties keep first-appearance
    order. Asking for more categories than exist returns them all.
    """
    dimension = None
    for enc in (chart.x, chart.color):
        if enc and enc.attribute and d.attribute(enc.attribute).kind is Kind.CATEGORICAL:
            dimension = enc.attribute
            break
    if dimension is None:
        raise ValueError("chart has no categorical axis to take categories from")

    row_ids = filter_rows(d, chart.filters)
    groups = _grouped(d, dimension, row_ids)
    y = chart.y
    appearance = {v: i for i, (v, _) in enumerate(d.attribute(dimension).values)}

    scored = []
    for value, rids in groups.items():
        if y is not None and y.attribute:
            score = aggregate([d.rows[rid][y.attribute] for rid in rids], y.aggregate or Agg.MEAN)
        else:
            score = float(len(rids))
        if score is None:
            continue
        scored.append((value, score))
    scored.sort(key=lambda vs: (-vs[1], appearance.get(vs[0], len(appearance))))
    return [value for value, _ in scored[:n]]


def ranked(
    tuples: Sequence[tuple[tuple[str, ...], Optional[float]]], metric: str
) -> list[PairStat]:
    """Attach competition ranks, best value first; None values rank last.

    The returned list preserves enumeration order so callers can use
    position as the deterministic tiebreak among equal ranks.
    """
    defined = sorted({v for _, v in tuples if v is not None}, reverse=True)
    last_rank = len([v for _, v in tuples if v is not None]) + 1
    stats = []
    for attrs, value in tuples:
        if value is None:
            rank = last_rank
        else:
            rank = 1 + sum(
                1 for _, other in tuples if other is not None and other > value
            )
        stats.append(PairStat(attrs, metric, value, rank))
    return stats


def correlate_tuples(d: Dataset) -> list[PairStat]:
    """All quantitative pairs by |r|, column order; undefined r excluded."""
    quantitative = [a.name for a in d.by_kind(Kind.QUANTITATIVE)]
    out = []
    for i, a in enumerate(quantitative):
        for b in quantitative[i + 1 :]:
            r = pearson_r(d, a, b)
            if r is not None:
                out.append(((a, b), abs(r)))
    return ranked(out, "abs_r")


def group_tuples(d: Dataset) -> list[PairStat]:
    """(dimension, measure) pairs by normalized sigma of group means."""
    out = []
    for dim in d.by_kind(Kind.CATEGORICAL):
        for m in d.by_kind(Kind.QUANTITATIVE):
            out.append(((dim.name, m.name), normalized_group_sigma(d, dim.name, m.name)))
    return ranked(out, "group_sigma")


def trend_tuples(d: Dataset) -> list[PairStat]:
    """(temporal, measure) pairs by normalized sigma of per-timestamp means."""
    out = []
    for t in d.by_kind(Kind.TEMPORAL):
        for m in d.by_kind(Kind.QUANTITATIVE):
            out.append(((t.name, m.name), normalized_group_sigma(d, t.name, m.name)))
    return ranked(out, "trend_sigma")


def distribution_tuples(d: Dataset) -> list[PairStat]:
    """Single attributes by sigma of their group/bin counts."""
    out = []
    for a in d.attributes:
        out.append(((a.name,), distribution_sigma(d, a.name)))
    return ranked(out, "count_sigma")


class MetricsTable:
    """Lazily computed, cached candidate tables for one dataset."""

    def __init__(self, d: Dataset):
        self._d = d
        self._cache: dict[str, list[PairStat]] = {}

    def _get(self, key: str, fn: Callable[[Dataset], list[PairStat]]) -> list[PairStat]:
        if key not in self._cache:
            self._cache[key] = fn(self._d)
        return self._cache[key]

    @property
    def correlate(self) -> list[PairStat]:
        return self._get("correlate", correlate_tuples)

    @property
    def group(self) -> list[PairStat]:
        return self._get("group", group_tuples)

    @property
    def trend(self) -> list[PairStat]:
        return self._get("trend", trend_tuples)

    @property
    def distribution(self) -> list[PairStat]:
        return self._get("distribution", distribution_tuples)


_TABLES: dict[int, MetricsTable] = {}


def metrics_for(d: Dataset) -> MetricsTable:
    key = id(d)
    table = _TABLES.get(key)
    if table is None or table._d is not d:
        table = MetricsTable(d)
        _TABLES[key] = table
    return table
