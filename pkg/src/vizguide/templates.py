"""Surface templates for generated utterances.

Each family is one parameterization of one (or two) analytic intents;
its variants are alternative phrasings of the same request. A variant is
a plain format string whose slots are filled from the candidate's
parameters, so every generated utterance can be parsed back to the exact
intents and parameters it came from. Flags mark where a phrasing is
usable: some lean on the conversation ("instead", "how about") and only
work as follow-ups, some fit a particular chart shape, and the sorted
"top N groups" phrasing only reads right on a chart that is actually
sorted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .lexicon import pluralize

# surface spellings for aggregate terms used in generation
AGG_SPELLINGS = {
    "mean": ("average", "mean"),
    "sum": ("total",),
    "count": ("count",),
    "min": ("minimum",),
    "max": ("maximum",),
    "median": ("median",),
}

# wording for deictic computations
STAT_WORDS = {
    "mean": "average",
    "sum": "total",
    "correlation": "correlation",
    "difference": "difference",
}

SLOT_RE = re.compile(r"\{(\w+)\}")


@dataclass(frozen=True)
class Variant:
    """One phrasing of a template family.

    marks restricts the ACTIVE chart's mark (for follow-ups and deictics);
    aggs restricts which aggregation parameter the phrasing can voice;
    swap marks "instead" phrasings that replace something already on the
    chart; fixed pins slots that are part of the surface form (timewords)
    rather than parameters.
    """

    family: str
    template: str
    followup_only: bool = False
    marks: tuple[str, ...] = ()
    aggs: tuple[str, ...] = ()
    sorted_only: bool = False
    swap: bool = False
    categorical_only: bool = False
    fixed: tuple[tuple[str, str], ...] = ()


REGISTRY: tuple[Variant, ...] = (
    # ----- correlation: {measure1, measure2} --------------------------
    Variant("correlation", "How does {measure1} vary with {measure2}?"),
    Variant("correlation", "How are {measure1} and {measure2} correlated?"),
    Variant("correlation", "Show the relationship between {measure1} and {measure2}"),
    Variant("correlation", "What is the correlation between {measure1} and {measure2}?"),
    Variant("correlation", "Plot {measure1} versus {measure2}"),
    Variant("correlation", "How about {measure1} and {measure2}?", followup_only=True),
    Variant("correlation", "Now how about {measure1} and {measure2}?", followup_only=True),
    # ----- trend: {measure, temporal} ---------------------------------
    Variant("trend", "What is the trend of {measure} over the {timeword}?",
            fixed=(("timeword", "years"),)),
    Variant("trend", "What is the trend of {measure} over the {temporal_pl}?"),
    Variant("trend", "How does {measure} vary over {temporal_pl}?"),
    Variant("trend", "Plot changes in {measure_pl} over {timeword}",
            fixed=(("timeword", "time"),)),
    Variant("trend", "Show change in {measure} over {timeword}",
            fixed=(("timeword", "time"),)),
    Variant("trend", "Show the change in {measure} over the {timeword}",
            fixed=(("timeword", "years"),)),
    Variant("trend", "Show the trend for {measure} instead",
            followup_only=True, swap=True),
    Variant("trend", "Now show changes in {measure} instead",
            followup_only=True, swap=True),
    # ----- group: {dimension, measure, aggregation} -------------------
    Variant("group", "What is the {aggword} {measure} by {dimension}?",
            aggs=("mean",)),
    Variant("group", "Compare {aggword} {measure_pl} across {dimension_pl}",
            aggs=("mean",)),
    Variant("group", "Compare {aggword} {measure} across {dimension_pl}",
            aggs=("mean",)),
    Variant("group", "On average, what is the {measure} for each {dimension}?",
            aggs=("mean",)),
    Variant("group", "Show {aggword} {measure} by {dimension}",
            aggs=("mean", "sum")),
    Variant("group", "Show {aggword} {measure} by {dimension_pl}",
            aggs=("sum",)),
    Variant("group", "Show {aggword} {measure} across {dimension_pl}",
            aggs=("mean",)),
    # ----- add-dimension follow-up: {dimension} -----------------------
    Variant("add-dimension", "Compare across {dimension_pl}", followup_only=True),
    Variant("add-dimension", "Break down by {dimension}", followup_only=True),
    Variant("add-dimension", "Also compare across {dimension_pl}", followup_only=True),
    # ----- distribution: {attribute} ----------------------------------
    Variant("distribution", "Show the spread of values for {attribute}"),
    Variant("distribution", "What is the spread of values for {attribute}?"),
    Variant("distribution", "What is the distribution of values for {attribute}?"),
    Variant("distribution", "How many items exist for each {attribute}?",
            categorical_only=True),
    Variant("distribution", "Count items by {attribute}", categorical_only=True),
    Variant("distribution", "Show the count of items by {attribute}",
            categorical_only=True),
    # ----- filters -----------------------------------------------------
    Variant("filter-values", "Just show {values}", followup_only=True),
    Variant("filter-values", "Only show {values}", followup_only=True),
    Variant("filter-topn", "Just show the {topn_phrase}",
            followup_only=True, sorted_only=True),
    Variant("filter-topn", "Only show the {topn_phrase}",
            followup_only=True, sorted_only=True),
    Variant("filter-drill", "Drill down into {value}", followup_only=True),
    Variant("filter-band", "Focus on {band_phrase}",
            followup_only=True, marks=("line", "point")),
    Variant("filter-years", "Focus on the spike between {y1} and {y2}",
            followup_only=True, marks=("line",)),
    Variant("filter-years", "Focus on the years between {y1} and {y2}",
            followup_only=True, marks=("point",)),
    # ----- aggregation change: {aggregation} (+ the chart's measure) --
    Variant("aggregation", "Show the {aggword} values instead",
            followup_only=True, swap=True),
    Variant("aggregation", "How about the {aggword} values?", followup_only=True),
    Variant("aggregation", "How about the {aggword} of values?", followup_only=True),
    Variant("aggregation", "Show the {aggword} {measure} instead",
            followup_only=True, swap=True),
    # ----- deictic computations: {stat} --------------------------------
    Variant("deictic-mean", "What are the {statword} values?",
            followup_only=True),
    Variant("deictic-correlation", "What is the {statword} between these points?",
            followup_only=True, marks=("point",)),
    Variant("deictic-sum", "What is the {statword}?",
            followup_only=True, marks=("bar", "line")),
    Variant("deictic-sum", "What are the {statword} values?",
            followup_only=True, marks=("bar", "line")),
    Variant("deictic-difference", "What is the {statword} between these points?",
            followup_only=True, marks=("bar", "line")),
    # ----- combined intents --------------------------------------------
    Variant("trend-group",
            "How has the {measure} changed over the {temporal_pl} for each {dimension}?"),
    Variant("correlation-group",
            "Show the relationship between {measure1} and {measure2} by {dimension_pl}"),
)


def variants_of(family: str) -> list[Variant]:
    return [v for v in REGISTRY if v.family == family]


def oxford_list(values) -> str:
    """Comma-join with a final ", and": Adventure, Action, and Musical."""
    items = [str(v) for v in values]
    if len(items) == 1:
        return items[0]
    if len(items) == 2:
        return f"{items[0]} and {items[1]}"
    return ", ".join(items[:-1]) + f", and {items[-1]}"


def _year(value) -> str:
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def slot_values(variant: Variant, params: dict, aggword: str | None) -> dict[str, str]:
    """Resolve every slot the variant's template can mention."""
    out: dict[str, str] = dict(variant.fixed)
    for key in ("measure", "measure1", "measure2", "dimension", "attribute",
                "temporal", "value"):
        if key in params:
            out[key] = str(params[key])
    for key, slot in (("measure", "measure_pl"), ("dimension", "dimension_pl"),
                      ("temporal", "temporal_pl")):
        if key in params:
            out[slot] = pluralize(str(params[key]))
    if "values" in params:
        out["values"] = oxford_list(params["values"])
    if "top_n" in params:
        out["topn_phrase"] = f"top {params['top_n']} groups"
    if "band" in params:
        out["band_phrase"] = f"{params['band']} {params['measure']}"
    if "low" in params and "high" in params:
        out["y1"] = _year(params["low"])
        out["y2"] = _year(params["high"])
    if "stat" in params:
        out["statword"] = STAT_WORDS[params["stat"]]
    if aggword is not None:
        out["aggword"] = aggword
    return out


def fill(variant: Variant, params: dict, aggword: str | None = None):
    """Render the variant; returns (text, spans) with one span per slot."""
    values = slot_values(variant, params, aggword)
    pieces: list[str] = []
    spans: list[dict] = []
    pos = 0
    cursor = 0
    for m in SLOT_RE.finditer(variant.template):
        literal = variant.template[cursor:m.start()]
        pieces.append(literal)
        pos += len(literal)
        filled = values[m.group(1)]
        pieces.append(filled)
        spans.append({"start": pos, "end": pos + len(filled), "text": filled})
        pos += len(filled)
        cursor = m.end()
    pieces.append(variant.template[cursor:])
    return "".join(pieces), spans
