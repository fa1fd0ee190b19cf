"""Chart specifications and the default mark/encoding rules.

A ChartSpec is deliberately small: a mark, up to three channel encodings
(x, y, color), filters, and an optional sort. It carries no data; the
rows a chart displays are computed on demand by chart_data so the spec
can be serialized, diffed, and snapshotted cheaply.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

from .profiling import Dataset, Kind, equal_width_bins


class Mark(str, Enum):
    BAR = "bar"
    LINE = "line"
    POINT = "point"


class Agg(str, Enum):
    MEAN = "mean"
    SUM = "sum"
    COUNT = "count"
    MIN = "min"
    MAX = "max"
    MEDIAN = "median"


class ChartBuildError(ValueError):
    """Raised when no chart can be assembled from the requested attributes."""


@dataclass(frozen=True)
class Encoding:
    """One channel binding. attribute None + COUNT means 'count of rows'."""

    attribute: Optional[str] = None
    aggregate: Optional[Agg] = None
    binned: bool = False

    def to_dict(self) -> dict:
        return {
            "attribute": self.attribute,
            "aggregate": self.aggregate.value if self.aggregate else None,
            "binned": self.binned,
        }

    @staticmethod
    def from_dict(d: Optional[dict]) -> Optional["Encoding"]:
        if d is None:
            return None
        agg = Agg(d["aggregate"]) if d.get("aggregate") else None
        return Encoding(d.get("attribute"), agg, bool(d.get("binned", False)))


@dataclass(frozen=True)
class Filter:
    """A row predicate: either a value set or a (possibly open) range.

    Ranges use low/high with per-end open flags; a missing end means
    unbounded. The label records how the filter was phrased ("high",
    "before", ...) for explanations and feedback.
    """

    attribute: str
    kind: str  # "values" | "range"
    values: tuple = ()
    low: Optional[float] = None
    high: Optional[float] = None
    low_open: bool = False
    high_open: bool = False
    label: Optional[str] = None

    def matches(self, value) -> bool:
        if value is None:
            return False
        if self.kind == "values":
            return value in self.values
        if self.low is not None:
            if self.low_open and not value > self.low:
                return False
            if not self.low_open and not value >= self.low:
                return False
        if self.high is not None:
            if self.high_open and not value < self.high:
                return False
            if not self.high_open and not value <= self.high:
                return False
        return True

    def to_dict(self) -> dict:
        out: dict = {"attribute": self.attribute, "kind": self.kind}
        if self.kind == "values":
            out["values"] = list(self.values)
        else:
            out.update(
                {
                    "low": self.low,
                    "high": self.high,
                    "low_open": self.low_open,
                    "high_open": self.high_open,
                }
            )
        if self.label:
            out["label"] = self.label
        return out

    @staticmethod
    def from_dict(d: dict) -> "Filter":
        return Filter(
            attribute=d["attribute"],
            kind=d["kind"],
            values=tuple(d.get("values", ())),
            low=d.get("low"),
            high=d.get("high"),
            low_open=bool(d.get("low_open", False)),
            high_open=bool(d.get("high_open", False)),
            label=d.get("label"),
        )


@dataclass(frozen=True)
class ChartSpec:
    mark: Mark
    x: Optional[Encoding] = None
    y: Optional[Encoding] = None
    color: Optional[Encoding] = None
    filters: tuple = ()
    sort: Optional[str] = None  # "ascending" | "descending", by y value

    def encoded_attributes(self) -> list[str]:
        out = []
        for enc in (self.x, self.y, self.color):
            if enc is not None and enc.attribute is not None:
                out.append(enc.attribute)
        return out

    def channel_of(self, attribute: str) -> Optional[str]:
        for name, enc in (("x", self.x), ("y", self.y), ("color", self.color)):
            if enc is not None and enc.attribute == attribute:
                return name
        return None

    def with_filters(self, filters: Sequence[Filter]) -> "ChartSpec":
        return replace(self, filters=tuple(filters))

    def to_dict(self) -> dict:
        return {
            "mark": self.mark.value,
            "x": self.x.to_dict() if self.x else None,
            "y": self.y.to_dict() if self.y else None,
            "color": self.color.to_dict() if self.color else None,
            "filters": [f.to_dict() for f in self.filters],
            "sort": self.sort,
        }

    @staticmethod
    def from_dict(d: Optional[dict]) -> Optional["ChartSpec"]:
        if d is None:
            return None
        return ChartSpec(
            mark=Mark(d["mark"]),
            x=Encoding.from_dict(d.get("x")),
            y=Encoding.from_dict(d.get("y")),
            color=Encoding.from_dict(d.get("color")),
            filters=tuple(Filter.from_dict(f) for f in d.get("filters", [])),
            sort=d.get("sort"),
        )


def aggregate(values: list, agg: Agg) -> Optional[float]:
    values = [v for v in values if v is not None]
    if agg is Agg.COUNT:
        return float(len(values))
    if not values:
        return None
    if agg is Agg.MEAN:
        return sum(values) / len(values)
    if agg is Agg.SUM:
        return float(sum(values))
    if agg is Agg.MIN:
        return float(min(values))
    if agg is Agg.MAX:
        return float(max(values))
    if agg is Agg.MEDIAN:
        ordered = sorted(values)
        n = len(ordered)
        mid = n // 2
        return float(ordered[mid]) if n % 2 else (ordered[mid - 1] + ordered[mid]) / 2
    raise ValueError(f"unknown aggregation {agg}")


def filter_rows(d: Dataset, filters: Sequence[Filter]) -> list[int]:
    """Row ids passing every filter."""
    ids = []
    for rid, row in enumerate(d.rows):
        if all(f.matches(row[f.attribute]) for f in filters):
            ids.append(rid)
    return ids


def _split_by_kind(d: Dataset, attributes: Sequence[str]):
    temporal, categorical, quantitative = [], [], []
    for name in attributes:
        kind = d.attribute(name).kind
        if kind is Kind.TEMPORAL:
            temporal.append(name)
        elif kind is Kind.CATEGORICAL:
            categorical.append(name)
        else:
            quantitative.append(name)
    return temporal, categorical, quantitative


def default_chart(
    d: Dataset,
    attributes: Sequence[str],
    aggregation: Optional[Agg] = None,
    extremum: Optional[str] = None,
    filters: Sequence[Filter] = (),
    measure_order: Optional[Sequence[str]] = None,
) -> ChartSpec:
    """Pick mark and channels for a set of attributes.

    Two quantitative attributes make a scatterplot, a temporal plus a
    quantitative a line, a categorical plus a quantitative an aggregated
    bar. Single attributes chart their distribution. A third attribute
    lands on color. More than three is an error, as is an empty set.
    measure_order fixes the x/y assignment for scatterplots.
    """
    attrs = list(dict.fromkeys(attributes))
    if not attrs:
        raise ChartBuildError("no attributes to chart")
    if len(attrs) > 3:
        raise ChartBuildError(
            f"cannot encode {len(attrs)} attributes; x, y, and color are the only channels"
        )
    for name in attrs:
        if not d.has_attribute(name):
            raise ChartBuildError(f"unknown attribute {name!r}")

    temporal, categorical, quantitative = _split_by_kind(d, attrs)
    if measure_order:
        quantitative = [m for m in measure_order if m in quantitative] + [
            m for m in quantitative if m not in measure_order
        ]
    sort = None
    if extremum:
        sort = "descending" if extremum == "highest" else "ascending"
    base = dict(filters=tuple(filters), sort=sort)

    if temporal:
        if len(temporal) > 1:
            raise ChartBuildError("more than one temporal attribute requested")
        x = Encoding(temporal[0])
        if quantitative and categorical:
            if len(quantitative) > 1 or len(categorical) > 1:
                raise ChartBuildError("channels exhausted")
            y = Encoding(quantitative[0], aggregation or Agg.MEAN)
            return ChartSpec(Mark.LINE, x, y, Encoding(categorical[0]), **base)
        if quantitative:
            y = Encoding(quantitative[0], aggregation or Agg.MEAN)
            color = Encoding(quantitative[1]) if len(quantitative) > 1 else None
            return ChartSpec(Mark.LINE, x, y, color, **base)
        if categorical:
            return ChartSpec(
                Mark.LINE, x, Encoding(None, Agg.COUNT), Encoding(categorical[0]), **base
            )
        return ChartSpec(Mark.LINE, x, Encoding(None, Agg.COUNT), None, **base)

    if len(quantitative) >= 2:
        x, y = Encoding(quantitative[0]), Encoding(quantitative[1])
        color = None
        if categorical:
            color = Encoding(categorical[0])
        elif len(quantitative) == 3:
            color = Encoding(quantitative[2])
        return ChartSpec(Mark.POINT, x, y, color, **base)

    if categorical and quantitative:
        x = Encoding(categorical[0])
        y = Encoding(quantitative[0], aggregation or Agg.MEAN)
        color = Encoding(categorical[1]) if len(categorical) > 1 else None
        return ChartSpec(Mark.BAR, x, y, color, **base)

    if len(categorical) >= 2:
        return ChartSpec(
            Mark.BAR,
            Encoding(categorical[0]),
            Encoding(None, Agg.COUNT),
            Encoding(categorical[1]),
            **base,
        )
    if categorical:
        return ChartSpec(Mark.BAR, Encoding(categorical[0]), Encoding(None, Agg.COUNT), None, **base)

    # single quantitative: binned distribution
    return ChartSpec(
        Mark.BAR, Encoding(quantitative[0], binned=True), Encoding(None, Agg.COUNT), None, **base
    )


def chart_from_channels(
    d: Dataset,
    x: Optional[str],
    y: Optional[str],
    color: Optional[str],
    aggregation: Optional[Agg] = None,
    filters: Sequence[Filter] = (),
    sort: Optional[str] = None,
) -> Optional[ChartSpec]:
    """Build a chart from explicit shelf assignments (GUI path).

    Returns None when every channel is empty. Color without both axes
    violates the channel invariant and raises.
    """
    if x is None and y is None:
        if color is None:
            return None
        raise ChartBuildError("color requires both x and y to be bound")
    attrs = [a for a in (x, y, color) if a is not None]
    order = [a for a in (x, y) if a is not None and d.attribute(a).kind is Kind.QUANTITATIVE]
    chart = default_chart(
        d, attrs, aggregation=aggregation, filters=filters, measure_order=order or None
    )
    return ChartSpec(
        mark=chart.mark,
        x=chart.x,
        y=chart.y,
        color=chart.color,
        filters=tuple(filters),
        sort=sort,
    )


def _bin_label(low: float, high: float) -> str:
    def fmt(v: float) -> str:
        return f"{v:g}"

    return f"{fmt(low)}–{fmt(high)}"


def chart_data(d: Dataset, chart: ChartSpec) -> dict:
    """Materialize the marks a chart displays, with contributing row ids.

    Point charts list one item per visible row; bar and line charts list
    one item per group (or per group and series when color is bound).
    """
    ids = filter_rows(d, chart.filters)
    rows = [(rid, d.rows[rid]) for rid in ids]

    if chart.mark is Mark.POINT:
        items = []
        for rid, row in rows:
            xv, yv = row[chart.x.attribute], row[chart.y.attribute]
            if xv is None or yv is None:
                continue
            item = {"row_id": rid, "x": xv, "y": yv}
            if chart.color and chart.color.attribute:
                item["color"] = row[chart.color.attribute]
            items.append(item)
        return {"kind": "point", "items": items}

    # grouped marks: bar and line
    x_attr = chart.x.attribute if chart.x else None
    color_attr = chart.color.attribute if chart.color else None
    groups: dict = {}
    order: list = []

    if chart.x is not None and chart.x.binned and x_attr:
        values = [row[x_attr] for _, row in rows if row[x_attr] is not None]
        if values:
            for low, high, _count in equal_width_bins(values):
                key = (_bin_label(low, high), None)
                groups[key] = {"rows": [], "low": low, "high": high}
                order.append(key)
            lows = [groups[k]["low"] for k in order]
            width = order and (groups[order[-1]]["high"] - lows[0]) / len(order) or 1.0
            for rid, row in rows:
                v = row[x_attr]
                if v is None:
                    continue
                idx = int((v - lows[0]) / width) if width else 0
                idx = min(max(idx, 0), len(order) - 1)
                groups[order[idx]]["rows"].append((rid, row))
    else:
        for rid, row in rows:
            xv = row[x_attr] if x_attr else None
            if x_attr and xv is None:
                continue
            cv = row[color_attr] if color_attr else None
            if color_attr and cv is None:
                continue
            key = (xv, cv)
            if key not in groups:
                groups[key] = {"rows": []}
                order.append(key)
            groups[key]["rows"].append((rid, row))

    y_attr = chart.y.attribute if chart.y else None
    y_agg = (chart.y.aggregate if chart.y and chart.y.aggregate else Agg.COUNT)
    items = []
    for key in order:
        bucket = groups[key]
        member_rows = bucket["rows"]
        if y_attr:
            value = aggregate([row[y_attr] for _, row in member_rows], y_agg)
        else:
            value = float(len(member_rows))
        item = {
            "x": key[0],
            "value": value,
            "row_ids": [rid for rid, _ in member_rows],
        }
        if color_attr:
            item["color"] = key[1]
        if "low" in bucket:
            item["bin"] = [bucket["low"], bucket["high"]]
        items.append(item)

    if chart.mark is Mark.LINE:
        items.sort(key=lambda it: (str(type(it["x"])), it["x"], str(it.get("color"))))
    elif chart.sort:
        items.sort(
            key=lambda it: (it["value"] is None, it["value"] or 0.0),
            reverse=(chart.sort == "descending"),
        )
    return {"kind": chart.mark.value, "items": items}


def visible_row_ids(d: Dataset, chart: ChartSpec) -> set[int]:
    """Row ids contributing to the chart's marks (selection targets)."""
    data = chart_data(d, chart)
    if data["kind"] == "point":
        return {item["row_id"] for item in data["items"]}
    out: set[int] = set()
    for item in data["items"]:
        out.update(item["row_ids"])
    return out
