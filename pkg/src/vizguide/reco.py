"""Utterance recommendations from the conversation state.

Three stages turn a session into a ranked list of suggested utterances:

1. shortlist: decide which kinds of suggestion apply right now. A live
   selection asks for deictic computations; an active chart asks for
   follow-ups (add an attribute, change the aggregation, add a filter);
   new inquiries are always on the table.
2. rank: within each section, least-covered intents come first
   (ascending intent score, then the fixed intent order, then
   construction order).
3. parameterize + realize: pick the data tuple for each candidate by
   adjusted score (metric rank scaled by novelty), then render one
   phrasing with the seeded generator. Every rendered utterance must
   parse back to the candidate's intents and parameters with zero
   diagnostics, or the candidate is dropped; nothing unparseable is
   ever suggested.

The whole pipeline is a pure function of (state, dataset, seed).
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .charts import Agg, ChartSpec, Filter, Mark, chart_data, filter_rows
from .metrics import (
    TOP_N_DEFAULT,
    metrics_for,
    normalized_group_sigma,
    pearson_r,
    quartile_filter_ranges,
    quartiles,
    ranked,
    top_n_categories,
)
from .parsing import INTENT_ORDER, ParsedUtterance, parse
from .profiling import Dataset, Kind
from .state import (
    ContextState,
    Transition,
    classify_transition,
    entity_tokens,
    filter_tokens,
)
from .templates import AGG_SPELLINGS, STAT_WORDS, Variant, fill, variants_of

K_FOLLOWUP_DEFAULT = 3
K_NEW_DEFAULT = 3
SIMILAR_DEFAULT = 3
# combined-intent templates unlock once the conversation has this much
# total intent interaction behind it
COMBINED_INTENT_THRESHOLD = 5.0
# widest year window the spike finder considers
SPIKE_MAX_STEPS = 3

NEW_INQUIRY_FAMILIES = ("correlation", "distribution", "trend", "group")
COMBINED_FAMILIES = ("trend-group", "correlation-group")

FAMILY_INTENTS = {
    "correlation": ("correlation",),
    "distribution": ("distribution",),
    "trend": ("trend",),
    "group": ("group",),
    "trend-group": ("trend", "group"),
    "correlation-group": ("correlation", "group"),
    "add-dimension": ("group",),
    "aggregation": ("aggregation",),
    "filter": ("filter",),
    "deictic-mean": ("aggregation",),
    "deictic-sum": ("aggregation",),
    "deictic-difference": ("aggregation",),
    "deictic-correlation": ("correlation",),
}


@dataclass
class Candidate:
    """One shortlisted suggestion type, before data is chosen."""

    section: str  # "deictics" | "followups" | "new_inquiries"
    rtype: str  # "deictic" | "followup" | "new_inquiry"
    family: str
    intents: tuple[str, ...]
    order: int


@dataclass
class Option:
    """One admissible parameterization of a candidate."""

    params: dict
    attrs: tuple[str, ...]  # attributes whose scores drive novelty
    value: Optional[float]  # interestingness metric, when one applies
    rank_score: float = 0.0
    novelty: float = 1.0

    @property
    def adjusted(self) -> float:
        return self.rank_score * self.novelty


@dataclass
class Realized:
    """A rendered recommendation plus what similar() needs to vary it."""

    rec: dict
    candidate: Candidate
    options: list[Option]
    chosen: int


# ----- stage 1: shortlist ----------------------------------------------


def _selected_group_count(state: ContextState) -> int:
    data = chart_data(state.dataset, state.chart)
    chosen = set(state.selection)
    return sum(1 for item in data["items"] if chosen & set(item["row_ids"]))


def shortlist(state: ContextState) -> dict[str, list[Candidate]]:
    """Candidate types for the current state, in construction order."""
    sections: dict[str, list[Candidate]] = {
        "deictics": [],
        "followups": [],
        "new_inquiries": [],
    }
    chart = state.chart

    if state.selection and chart is not None:
        # averaging needs a quantitative target; totals fall back to counts
        families = []
        if _chart_measure(chart, state.dataset) is not None:
            families.append("deictic-mean")
        if chart.mark is Mark.POINT:
            if len(state.selection) >= 2:
                families.append("deictic-correlation")
        else:
            families.append("deictic-sum")
            if _selected_group_count(state) == 2:
                families.append("deictic-difference")
        for family in families:
            sections["deictics"].append(
                Candidate("deictics", "deictic", family, FAMILY_INTENTS[family], 0)
            )
    elif chart is not None:
        families = []
        if chart.color is None and chart.x is not None and chart.y is not None:
            families.append("add-dimension")
        y = chart.y
        if y is not None and y.attribute is not None and y.aggregate in (Agg.MEAN, Agg.SUM):
            families.append("aggregation")
        families.append("filter")
        for family in families:
            sections["followups"].append(
                Candidate("followups", "followup", family, FAMILY_INTENTS[family], 0)
            )

    families = list(NEW_INQUIRY_FAMILIES)
    if sum(state.intent_scores.values()) >= COMBINED_INTENT_THRESHOLD:
        families.extend(COMBINED_FAMILIES)
    for family in families:
        sections["new_inquiries"].append(
            Candidate("new_inquiries", "new_inquiry", family, FAMILY_INTENTS[family], 0)
        )

    for cands in sections.values():
        for i, cand in enumerate(cands):
            cand.order = i
    return sections


# ----- stage 2: rank ----------------------------------------------------


def rank(candidates: Sequence[Candidate], intent_scores: dict[str, float]) -> list[Candidate]:
    """Least-covered intents first; fixed intent order breaks ties.

    Combined-intent candidates rank by the smaller of their scores.
    The sort is stable, so construction order is the final tiebreak.
    """

    def key(cand: Candidate):
        score = min(intent_scores.get(i, 0.0) for i in cand.intents)
        order = min(INTENT_ORDER.index(i) for i in cand.intents)
        return (score, order)

    return sorted(candidates, key=key)


# ----- stage 3a: parameterize -------------------------------------------


def _novelty(state: ContextState, attrs: Sequence[str]) -> float:
    return 1.0 / (1.0 + sum(state.attribute_scores.get(a, 0.0) for a in attrs))


def _attach_value_ranks(options: list[Option]) -> None:
    stats = ranked([(o.attrs, o.value) for o in options], "m")
    total = len(stats)
    for option, stat in zip(options, stats):
        option.rank_score = stat.rank_score(total)


def _attach_position_ranks(options: list[Option]) -> None:
    total = len(options)
    for i, option in enumerate(options):
        option.rank_score = (total - i) / total


def _chart_measure(chart: ChartSpec, d: Dataset) -> Optional[str]:
    for enc in (chart.y, chart.x, chart.color):
        if (
            enc is not None
            and enc.attribute is not None
            and d.attribute(enc.attribute).kind is Kind.QUANTITATIVE
        ):
            return enc.attribute
    return None


def _chart_temporal(chart: ChartSpec, d: Dataset) -> Optional[str]:
    for enc in (chart.x, chart.y, chart.color):
        if (
            enc is not None
            and enc.attribute is not None
            and d.attribute(enc.attribute).kind is Kind.TEMPORAL
        ):
            return enc.attribute
    return None


def _chart_categorical(chart: ChartSpec, d: Dataset) -> Optional[str]:
    for enc in (chart.color, chart.x):
        if (
            enc is not None
            and enc.attribute is not None
            and d.attribute(enc.attribute).kind is Kind.CATEGORICAL
        ):
            return enc.attribute
    return None


def _new_inquiry_options(state: ContextState, family: str) -> list[Option]:
    d = state.dataset
    table = metrics_for(d)
    current = set(state.chart.encoded_attributes()) if state.chart else None
    options: list[Option] = []

    if family == "correlation":
        for stat in table.correlate:
            a, b = stat.attributes
            options.append(Option({"measure1": a, "measure2": b}, (a, b), stat.value))
    elif family == "trend":
        for stat in table.trend:
            if stat.value is None:
                continue
            t, m = stat.attributes
            options.append(Option({"measure": m, "temporal": t}, (t, m), stat.value))
    elif family == "group":
        for stat in table.group:
            if stat.value is None:
                continue
            dim, m = stat.attributes
            options.append(
                Option(
                    {"dimension": dim, "measure": m, "aggregation": "mean"},
                    (dim, m),
                    stat.value,
                )
            )
    elif family == "distribution":
        for stat in table.distribution:
            if stat.value is None:
                continue
            options.append(Option({"attribute": stat.attributes[0]}, stat.attributes, stat.value))
    elif family == "trend-group":
        cats = [a.name for a in d.by_kind(Kind.CATEGORICAL)]
        for stat in table.trend:
            if stat.value is None:
                continue
            t, m = stat.attributes
            for dim in cats:
                grp = normalized_group_sigma(d, dim, m)
                if grp is None:
                    continue
                options.append(
                    Option(
                        {"measure": m, "temporal": t, "dimension": dim},
                        (t, m, dim),
                        min(stat.value, grp),
                    )
                )
    elif family == "correlation-group":
        cats = [a.name for a in d.by_kind(Kind.CATEGORICAL)]
        for stat in table.correlate:
            a, b = stat.attributes
            for dim in cats:
                parts = [stat.value]
                for m in (a, b):
                    grp = normalized_group_sigma(d, dim, m)
                    if grp is None:
                        parts = None
                        break
                    parts.append(grp)
                if parts is None:
                    continue
                options.append(
                    Option(
                        {"measure1": a, "measure2": b, "dimension": dim},
                        (a, b, dim),
                        min(parts),
                    )
                )

    if current is not None:
        options = [o for o in options if set(o.attrs) != current]
    _attach_value_ranks(options)
    return options


def _drill_options(state: ContextState) -> list[Option]:
    """One option per visible category of the chart's categorical channel.

    Scatterplots rate a category by the strength of the x/y relationship
    inside it; lines by how much the series moves within it.
    """
    d = state.dataset
    chart = state.chart
    cat = _chart_categorical(chart, d)
    if cat is None:
        return []
    visible = filter_rows(d, chart.filters)
    by_value: dict = {}
    for rid in visible:
        v = d.rows[rid][cat]
        if v is not None:
            by_value.setdefault(v, []).append(rid)

    measure = _chart_measure(chart, d)
    temporal = _chart_temporal(chart, d)
    scored = []
    for i, v in enumerate(d.attribute(cat).value_list()):
        rids = by_value.get(v)
        if not rids:
            continue
        if chart.mark is Mark.POINT:
            r = pearson_r(d, chart.x.attribute, chart.y.attribute, row_ids=rids)
            metric = abs(r) if r is not None else None
        elif temporal and measure:
            metric = normalized_group_sigma(d, temporal, measure, row_ids=rids)
        else:
            metric = None
        if metric is None:
            continue
        scored.append((i, v, metric))
    scored.sort(key=lambda item: (-item[2], item[0]))
    return [
        Option({"attribute": cat, "value": v}, (cat,), metric)
        for _, v, metric in scored
    ]


def _spike_option(state: ContextState) -> Optional[Option]:
    """The steepest short run of a plain (uncolored) line chart."""
    chart = state.chart
    if chart.color is not None:
        return None
    temporal = _chart_temporal(chart, state.dataset)
    if temporal is None:
        return None
    items = [
        (item["x"], item["value"])
        for item in chart_data(state.dataset, chart)["items"]
        if item["value"] is not None
    ]
    if len(items) < 2:
        return None
    best = None
    for i in range(len(items) - 1):
        for j in range(i + 1, min(i + 1 + SPIKE_MAX_STEPS, len(items))):
            delta = abs(items[j][1] - items[i][1])
            if best is None or delta > best[0]:
                best = (delta, items[i][0], items[j][0])
    _, low, high = best
    return Option({"low": low, "high": high}, (temporal,), None)


def _band_options(state: ContextState, measures: Sequence[str]) -> list[Option]:
    d = state.dataset
    out = []
    for m in measures:
        bands = quartile_filter_ranges(d, m)
        if not bands or bands[0].degenerate:
            continue
        for band in (bands[-1], bands[0]):  # high end first
            out.append(Option({"measure": m, "band": band.label}, (m,), None))
    return out


def _years_window_option(state: ContextState) -> Optional[Option]:
    """The middle half of the temporal column, for scatterplot focusing.

    The temporal attribute does not need to be on the chart; filtering
    by year still narrows the visible rows.
    """
    d = state.dataset
    profile = d.temporal_attribute()
    if profile is None:
        return None
    temporal = profile.name
    values = sorted(v for v in d.column(temporal) if v is not None)
    if len(values) < 4:
        return None
    q1, _, q3 = quartiles(values)
    low, high = int(q1), int(q3)
    if low >= high:
        return None
    return Option({"low": low, "high": high}, (temporal,), None)


def _filter_options(state: ContextState) -> list[Option]:
    """Admissible filters for the active chart, best kind first.

    Bar charts only ever get categorical filters (their own top groups);
    lines prefer drilling into a series, then the sharpest spike, then a
    quartile band; scatterplots prefer drilling, then bands, then a year
    window when a temporal axis is bound.
    """
    d = state.dataset
    chart = state.chart
    options: list[Option] = []

    if chart.mark is Mark.BAR:
        cat = _chart_categorical(chart, d)
        if cat is not None:
            if chart.sort is not None:
                options.append(Option({"top_n": TOP_N_DEFAULT}, (cat,), None))
            else:
                values = top_n_categories(d, chart, TOP_N_DEFAULT)
                if values:
                    options.append(
                        Option(
                            {"attribute": cat, "values": tuple(values)}, (cat,), None
                        )
                    )
        _attach_position_ranks(options)
        return options

    options.extend(_drill_options(state))
    if chart.mark is Mark.LINE:
        spike = _spike_option(state)
        if spike is not None:
            options.append(spike)
        measure = _chart_measure(chart, d)
        if measure:
            options.extend(_band_options(state, [measure]))
    else:  # point
        axis_measures = [
            enc.attribute
            for enc in (chart.y, chart.x)
            if enc is not None
            and enc.attribute is not None
            and d.attribute(enc.attribute).kind is Kind.QUANTITATIVE
        ]
        options.extend(_band_options(state, axis_measures))
        window = _years_window_option(state)
        if window is not None:
            options.append(window)
    _attach_position_ranks(options)
    return options


def parameterize(state: ContextState, candidate: Candidate) -> list[Option]:
    """All admissible options for a candidate, rank scores attached."""
    chart = state.chart
    if candidate.family.startswith("deictic-"):
        stat = candidate.family.split("-", 1)[1]
        option = Option({"stat": stat}, (), None, rank_score=1.0)
        return [option]

    if candidate.family == "aggregation":
        current = chart.y.aggregate
        flipped = "sum" if current is Agg.MEAN else "mean"
        option = Option(
            {"aggregation": flipped, "measure": chart.y.attribute},
            (),
            None,
            rank_score=1.0,
        )
        return [option]

    if candidate.family == "add-dimension":
        d = state.dataset
        encoded = set(chart.encoded_attributes())
        measure = _chart_measure(chart, d)
        options = []
        spread = {s.attributes[0]: s.value for s in metrics_for(d).distribution}
        for dim in d.by_kind(Kind.CATEGORICAL):
            if dim.name in encoded:
                continue
            if measure:
                metric = normalized_group_sigma(d, dim.name, measure)
            else:
                metric = spread.get(dim.name)
            if metric is None:
                continue
            options.append(Option({"dimension": dim.name}, (dim.name,), metric))
        _attach_value_ranks(options)
        return options

    if candidate.family == "filter":
        return _filter_options(state)

    return _new_inquiry_options(state, candidate.family)


def choose(state: ContextState, options: list[Option]) -> Optional[int]:
    """Index of the novelty-adjusted best option; None when empty."""
    best = None
    for i, option in enumerate(options):
        option.novelty = _novelty(state, option.attrs)
        if best is None or option.adjusted > options[best].adjusted:
            best = i
    return best


# ----- stage 3b: realize -------------------------------------------------


def _candidate_id(candidate: Candidate, params: dict) -> str:
    family = candidate.family
    if family == "correlation":
        core = f"{params['measure1']}&{params['measure2']}"
    elif family == "trend":
        core = f"{params['measure']}@{params['temporal']}"
    elif family == "group":
        core = f"{params['aggregation']} {params['measure']} by {params['dimension']}"
    elif family == "distribution":
        core = params["attribute"]
    elif family == "trend-group":
        core = f"{params['measure']}@{params['temporal']} by {params['dimension']}"
    elif family == "correlation-group":
        core = f"{params['measure1']}&{params['measure2']} by {params['dimension']}"
    elif family == "add-dimension":
        core = params["dimension"]
    elif family == "aggregation":
        core = params["aggregation"]
    elif family == "filter":
        if "top_n" in params:
            core = f"topn:{params['top_n']}"
        elif "values" in params:
            core = f"values:{params['attribute']}=" + "|".join(
                str(v) for v in params["values"]
            )
        elif "value" in params:
            core = f"drill:{params['attribute']}={params['value']}"
        elif "band" in params:
            core = f"band:{params['band']} {params['measure']}"
        else:
            core = f"years:{params['low']}-{params['high']}"
    else:  # deictic-*
        core = params["stat"]
    prefix = {"deictic": "deictic", "followup": "fup", "new_inquiry": "new"}[
        candidate.rtype
    ]
    return f"{prefix}:{family}:{core}"


def _rid(candidate_id: str) -> str:
    return hashlib.sha1(candidate_id.encode("utf-8")).hexdigest()[:12]


def _filter_variant_family(params: dict) -> str:
    if "top_n" in params:
        return "filter-topn"
    if "values" in params:
        return "filter-values"
    if "value" in params:
        return "filter-drill"
    if "band" in params:
        return "filter-band"
    return "filter-years"


def _variant_eligible(
    variant: Variant, candidate: Candidate, state: ContextState, params: dict
) -> bool:
    chart = state.chart
    if variant.followup_only and chart is None:
        return False
    if variant.marks and (chart is None or chart.mark.value not in variant.marks):
        return False
    if variant.sorted_only and (chart is None or chart.sort is None):
        return False
    if variant.aggs and params.get("aggregation") not in variant.aggs:
        return False
    if variant.categorical_only:
        attr = params.get("attribute")
        if attr is None or state.dataset.attribute(attr).kind is not Kind.CATEGORICAL:
            return False
    if variant.swap and candidate.family == "trend":
        # "instead" swaps the measure on an existing temporal view
        if chart is None:
            return False
        if _chart_temporal(chart, state.dataset) != params["temporal"]:
            return False
        if _chart_measure(chart, state.dataset) in (None, params["measure"]):
            return False
    return True


def _fills_for(
    candidate: Candidate, state: ContextState, params: dict
) -> list[tuple[Variant, Optional[str]]]:
    family = candidate.family
    if family == "filter":
        family = _filter_variant_family(params)
    fills: list[tuple[Variant, Optional[str]]] = []
    for variant in variants_of(family):
        if not _variant_eligible(variant, candidate, state, params):
            continue
        if "{aggword}" in variant.template:
            for spelling in AGG_SPELLINGS[params["aggregation"]]:
                fills.append((variant, spelling))
        else:
            fills.append((variant, None))
    return fills


def _induced_filter(state: ContextState, params: dict) -> Filter:
    d = state.dataset
    if "top_n" in params:
        cat = _chart_categorical(state.chart, d)
        values = tuple(top_n_categories(d, state.chart, params["top_n"]))
        return Filter(cat, "values", values=values)
    if "values" in params:
        return Filter(params["attribute"], "values", values=tuple(params["values"]))
    if "value" in params:
        return Filter(params["attribute"], "values", values=(params["value"],))
    if "band" in params:
        bands = quartile_filter_ranges(d, params["measure"])
        band = bands[-1] if params["band"] == "high" else bands[0]
        return Filter(
            params["measure"],
            "range",
            low=band.low,
            high=band.high,
            low_open=band.low_open,
            high_open=band.high_open,
            label=band.label,
        )
    temporal = _chart_temporal(state.chart, d) or d.temporal_attribute().name
    return Filter(
        temporal, "range", low=params["low"], high=params["high"], label="between"
    )


def _params_attributes(params: dict) -> list[str]:
    out = []
    for key in ("measure", "measure1", "measure2", "temporal", "dimension", "attribute"):
        if key in params:
            out.append(params[key])
    return out


def _induced_transition(
    state: ContextState, candidate: Candidate, params: dict
) -> Transition:
    previous = entity_tokens(state.chart) if state.chart is not None else None
    if candidate.rtype == "deictic" or candidate.family == "aggregation":
        return classify_transition(previous, previous or set())
    if candidate.family == "add-dimension":
        tokens = set(previous) | {params["dimension"]}
        return classify_transition(previous, tokens)
    if candidate.family == "filter":
        new_filter = _induced_filter(state, params)
        merged = [f for f in state.filters if f.attribute != new_filter.attribute]
        merged.append(new_filter)
        tokens = set(state.chart.encoded_attributes()) | filter_tokens(merged)
        return classify_transition(previous, tokens)
    tokens = set(_params_attributes(params)) | filter_tokens(state.filters)
    return classify_transition(previous, tokens)


def _action(state: ContextState, candidate: Candidate, params: dict) -> dict:
    family = candidate.family
    if family.startswith("deictic-"):
        return {"type": "compute", "stat": params["stat"]}
    if family == "aggregation":
        return {"type": "set_aggregation", "aggregation": params["aggregation"]}
    if family == "add-dimension":
        return {
            "type": "add_attribute",
            "channel": "color",
            "attribute": params["dimension"],
        }
    if family == "filter":
        return {"type": "add_filter", "filter": _induced_filter(state, params).to_dict()}
    attributes = _params_attributes(params)
    action = {"type": "new_chart", "attributes": attributes}
    if "aggregation" in params:
        action["aggregation"] = params["aggregation"]
    return action


def _round_trip_ok(
    candidate: Candidate,
    params: dict,
    parsed: ParsedUtterance,
    state: ContextState,
) -> bool:
    if parsed.diagnostics:
        return False
    if set(parsed.intent_names()) != set(candidate.intents):
        return False
    lex = state.lexicon
    d = state.dataset
    measures = parsed.attributes_of_kind(lex, Kind.QUANTITATIVE)
    temporals = parsed.attributes_of_kind(lex, Kind.TEMPORAL)
    dims = parsed.attributes_of_kind(lex, Kind.CATEGORICAL)
    family = candidate.family

    if family in ("correlation", "correlation-group"):
        if set(measures) != {params["measure1"], params["measure2"]}:
            return False
        if family == "correlation-group" and dims != [params["dimension"]]:
            return False
        return True
    if family in ("trend", "trend-group"):
        if measures != [params["measure"]]:
            return False
        temporal = temporals[0] if temporals else _chart_temporal(state.chart, d) if state.chart else None
        if temporal != params["temporal"]:
            return False
        if family == "trend-group" and dims != [params["dimension"]]:
            return False
        return True
    if family == "group":
        agg = parsed.aggregation.value if parsed.aggregation else "mean"
        return (
            dims == [params["dimension"]]
            and measures == [params["measure"]]
            and agg == params["aggregation"]
        )
    if family == "distribution":
        attrs = [e.attribute for e in parsed.entities if e.kind == "attribute"]
        return attrs == [params["attribute"]]
    if family == "add-dimension":
        return dims == [params["dimension"]] and not measures
    if family == "aggregation":
        if parsed.aggregation is None or parsed.aggregation.value != params["aggregation"]:
            return False
        return not measures or measures == [params["measure"]]
    if family == "filter":
        if "top_n" in params:
            return parsed.top_n == params["top_n"] and not parsed.filters
        if parsed.top_n is not None or len(parsed.filters) != 1:
            return False
        f = parsed.filters[0]
        if "values" in params:
            return (
                f.kind == "values"
                and f.attribute == params["attribute"]
                and set(f.values) == set(params["values"])
            )
        if "value" in params:
            return (
                f.kind == "values"
                and f.attribute == params["attribute"]
                and f.values == (params["value"],)
            )
        if "band" in params:
            return (
                f.kind == "range"
                and f.attribute == params["measure"]
                and f.label == params["band"]
            )
        return (
            f.kind == "range"
            and f.temporal
            and f.low == params["low"]
            and f.high == params["high"]
        )
    # deictic families
    return parsed.calculation == params["stat"]


def _json_params(params: dict) -> dict:
    out = {}
    for key, value in params.items():
        out[key] = list(value) if isinstance(value, tuple) else value
    return out


def _explain(
    state: ContextState, candidate: Candidate, option: Option
) -> str:
    params = option.params
    family = candidate.family
    value = option.value

    if family == "correlation":
        base = (
            f"{params['measure1']} and {params['measure2']} show the strongest "
            f"pairwise relationship here (|r| = {value:.2f})"
        )
    elif family == "trend":
        base = (
            f"{params['measure']} moves noticeably across "
            f"{params['temporal']} (relative spread {value:.2f})"
        )
    elif family == "group":
        base = (
            f"average {params['measure']} differs sharply between "
            f"{params['dimension']} groups (relative spread {value:.2f})"
        )
    elif family == "distribution":
        base = f"items pile up very unevenly over {params['attribute']}"
    elif family == "trend-group":
        base = (
            f"{params['measure']} follows a different path over "
            f"{params['temporal']} for each {params['dimension']}"
        )
    elif family == "correlation-group":
        base = (
            f"the link between {params['measure1']} and {params['measure2']} "
            f"may differ by {params['dimension']}"
        )
    elif family == "add-dimension":
        base = f"splitting by {params['dimension']} shows how the groups differ"
    elif family == "aggregation":
        spoken = {"mean": "average", "sum": "total"}
        current = state.chart.y.aggregate.value
        base = (
            f"switches the chart from {spoken.get(current, current)} to "
            f"{spoken.get(params['aggregation'], params['aggregation'])} values"
        )
    elif family == "filter":
        if "top_n" in params:
            base = (
                f"the chart is already sorted, so the top {params['top_n']} "
                "groups are the standouts"
            )
        elif "values" in params:
            measure = _chart_measure(state.chart, state.dataset)
            listed = ", ".join(str(v) for v in params["values"])
            base = f"{listed} lead the chart on {measure or 'count'}"
        elif "value" in params:
            base = (
                f"{params['value']} is the most distinctive "
                f"{params['attribute']} group on this chart"
            )
        elif "band" in params:
            base = (
                f"isolates the {params['band']} quartile of {params['measure']}"
            )
        else:
            base = (
                f"the series changes most sharply between {params['low']} "
                f"and {params['high']}"
            )
    else:  # deictic
        base = (
            f"computes the {STAT_WORDS[params['stat']]} over the "
            f"{len(state.selection)} selected marks"
        )

    unexplored = [
        a for a in option.attrs if state.attribute_scores.get(a, 0.0) == 0.0
    ]
    if unexplored and state.history:
        base += f"; {unexplored[0]} has not come up in this conversation yet"
    return base


def realize(
    state: ContextState,
    candidate: Candidate,
    option: Option,
    seed,
) -> Optional[dict]:
    """Render one phrasing of the parameterized candidate.

    The seeded generator fixes the order phrasings are tried in; the
    first one that parses back to the candidate's intents and parameters
    with no diagnostics wins. None when no phrasing survives.
    """
    params = option.params
    fills = _fills_for(candidate, state, params)
    if not fills:
        return None
    cid = _candidate_id(candidate, params)
    rng = random.Random(f"{seed}|{cid}")
    center = state.center_view()
    for variant, aggword in rng.sample(fills, len(fills)):
        text, spans = fill(variant, params, aggword)
        parsed = parse(
            text, state.lexicon, center=center, attribute_scores=state.attribute_scores
        )
        if not _round_trip_ok(candidate, params, parsed, state):
            continue
        transition = _induced_transition(state, candidate, params)
        return {
            "id": _rid(cid),
            "text": text,
            "spans": spans,
            "rtype": candidate.rtype,
            "intents": list(candidate.intents),
            "transition": transition.value,
            "parameters": _json_params(params),
            "explanation": _explain(state, candidate, option),
            "action": _action(state, candidate, params),
        }
    return None


# ----- the pipeline -------------------------------------------------------


def _pipeline(
    state: ContextState,
    seed,
    k_followup: int = K_FOLLOWUP_DEFAULT,
    k_new: int = K_NEW_DEFAULT,
) -> dict[str, list[Realized]]:
    sections = shortlist(state)
    quotas = {"deictics": k_followup, "followups": k_followup, "new_inquiries": k_new}
    out: dict[str, list[Realized]] = {}
    for section, candidates in sections.items():
        realized: list[Realized] = []
        for candidate in rank(candidates, state.intent_scores):
            if len(realized) >= quotas[section]:
                break
            options = parameterize(state, candidate)
            chosen = choose(state, options)
            if chosen is None:
                continue
            rec = realize(state, candidate, options[chosen], seed)
            if rec is None:
                continue
            realized.append(Realized(rec, candidate, options, chosen))
        out[section] = realized
    return out


def recommend(
    state: ContextState,
    seed=0,
    k_followup: int = K_FOLLOWUP_DEFAULT,
    k_new: int = K_NEW_DEFAULT,
) -> dict:
    """The full recommendation payload for one conversation state."""
    sections = _pipeline(state, seed, k_followup, k_new)
    return {
        "seed": seed,
        "deictics": [r.rec for r in sections["deictics"]],
        "followups": [r.rec for r in sections["followups"]],
        "new_inquiries": [r.rec for r in sections["new_inquiries"]],
    }


def find_recommendation(
    state: ContextState,
    rec_id: str,
    seed=0,
    k_followup: int = K_FOLLOWUP_DEFAULT,
    k_new: int = K_NEW_DEFAULT,
) -> Optional[Realized]:
    sections = _pipeline(state, seed, k_followup, k_new)
    for realized in (r for section in sections.values() for r in section):
        if realized.rec["id"] == rec_id:
            return realized
    return None


def similar(
    state: ContextState,
    rec_id: str,
    seed=0,
    limit: int = SIMILAR_DEFAULT,
    k_followup: int = K_FOLLOWUP_DEFAULT,
    k_new: int = K_NEW_DEFAULT,
) -> Optional[list[dict]]:
    """Next-best parameterizations of one emitted recommendation.

    Alternatives come from the same candidate family, ranked by the same
    adjusted score with the original's tuple excluded. None when the id
    is unknown; empty when the family has nothing else to offer.
    """
    found = find_recommendation(state, rec_id, seed, k_followup, k_new)
    if found is None:
        return None
    order = sorted(
        (i for i in range(len(found.options)) if i != found.chosen),
        key=lambda i: (-found.options[i].adjusted, i),
    )
    alternatives = []
    for i in order:
        if len(alternatives) >= limit:
            break
        rec = realize(state, found.candidate, found.options[i], seed)
        if rec is not None:
            alternatives.append(rec)
    return alternatives
