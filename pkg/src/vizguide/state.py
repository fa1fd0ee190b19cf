"""Conversation state: the active chart, centering, and interest scores.

A session tracks one chart at a time plus everything needed to resolve
follow-ups against it: the persistent filter set, the current selection,
and running interest scores for attributes, filter values, and intents.
Every utterance moves the conversational center, and the move is
classified the way centering theory labels transitions between
utterances: the first center is INITIAL, growing the entity set is
CONTINUE, keeping it is RETAIN, and anything else is SHIFT.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

from .charts import (
    Agg,
    ChartBuildError,
    ChartSpec,
    Encoding,
    Filter,
    Mark,
    chart_from_channels,
    default_chart,
    visible_row_ids,
)
from .lexicon import Lexicon, build_lexicon
from .metrics import pearson_r, top_n_categories
from .parsing import INTENT_ORDER, FilterParse, ParsedUtterance, parse
from .profiling import Dataset, Kind


class Transition(str, Enum):
    INITIAL = "initial"
    CONTINUE = "continue"
    RETAIN = "retain"
    SHIFT = "shift"


class StateError(ValueError):
    """A user-facing problem; the session state is left untouched."""


class UnsupportedUtterance(StateError):
    pass


class NothingToFollowUp(StateError):
    pass


def classify_transition(
    previous: Optional[set], current: set
) -> Transition:
    if previous is None:
        return Transition.INITIAL
    if current == previous:
        return Transition.RETAIN
    if current > previous:
        return Transition.CONTINUE
    return Transition.SHIFT


def filter_tokens(filters: Sequence[Filter]) -> set[str]:
    """The entity terms a filter set contributes to the center."""
    tokens: set[str] = set()
    for f in filters:
        if f.kind == "values":
            tokens.update(str(v) for v in f.values)
        else:
            tokens.add(f"{f.attribute}:{f.label or 'range'}")
    return tokens


def entity_tokens(chart: Optional[ChartSpec]) -> set[str]:
    """The entity set a chart centers: attributes plus filter terms."""
    if chart is None:
        return set()
    return set(chart.encoded_attributes()) | filter_tokens(chart.filters)


@dataclass(frozen=True)
class _Center:
    """What parse() needs to know about the previous center."""

    attributes: tuple[str, ...]


@dataclass
class HistoryEntry:
    transition: Transition
    entities: tuple[str, ...]
    source: str  # "utterance" | "recommendation" | "manual"
    text: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "transition": self.transition.value,
            "entities": list(self.entities),
            "source": self.source,
            "text": self.text,
        }

    @staticmethod
    def from_dict(d: dict) -> "HistoryEntry":
        return HistoryEntry(
            Transition(d["transition"]),
            tuple(d["entities"]),
            d["source"],
            d.get("text"),
        )


@dataclass
class ApplyResult:
    parsed: Optional[ParsedUtterance] = None
    transition: Optional[Transition] = None
    messages: list[str] = field(default_factory=list)
    computed: Optional[dict] = None
    chart_changed: bool = False

    def to_dict(self) -> dict:
        return {
            "parsed": self.parsed.to_dict() if self.parsed else None,
            "transition": self.transition.value if self.transition else None,
            "messages": self.messages,
            "computed": self.computed,
            "chart_changed": self.chart_changed,
        }


def _fmt(value: float) -> str:
    if value is None:
        return "undefined"
    if isinstance(value, float) and value.is_integer():
        return f"{int(value):,}"
    if isinstance(value, float):
        return f"{value:,.4g}"
    return f"{value:,}"


def compute_selection_stat(
    d: Dataset,
    chart: ChartSpec,
    selection: Sequence[int],
    stat: str,
    measure: Optional[str] = None,
) -> dict:
    """Evaluate a statistic over the selected rows of the active chart."""
    from .charts import aggregate, chart_data

    rows = [d.rows[rid] for rid in selection]
    if stat == "count":
        return {"stat": "count", "value": len(rows)}

    if stat == "correlation":
        pair = [
            e.attribute
            for e in (chart.x, chart.y)
            if e and e.attribute and d.attribute(e.attribute).kind is Kind.QUANTITATIVE
        ]
        if len(pair) < 2:
            raise StateError(
                "correlation needs a scatterplot with two quantitative axes"
            )
        value = pearson_r(d, pair[0], pair[1], row_ids=selection)
        return {"stat": "correlation", "value": value, "attributes": pair}

    target = measure
    if target is None:
        for e in (chart.y, chart.x, chart.color):
            if e and e.attribute and d.attribute(e.attribute).kind is Kind.QUANTITATIVE:
                target = e.attribute
                break

    if stat == "difference":
        data = chart_data(d, chart)
        if data["kind"] == "point":
            if len(selection) != 2:
                raise StateError("pick exactly two points to compare")
            if target is None:
                raise StateError("the chart has no quantitative attribute to compare")
            a, b = (d.rows[rid][target] for rid in selection)
            if a is None or b is None:
                raise StateError("one of the selected points has no value")
            return {
                "stat": "difference", "value": abs(a - b), "measure": target,
            }
        chosen = set(selection)
        groups = [
            item for item in data["items"] if chosen & set(item["row_ids"])
        ]
        if len(groups) != 2:
            raise StateError("pick exactly two bars or points to compare")
        values = [g["value"] for g in groups]
        return {
            "stat": "difference",
            "value": abs(values[0] - values[1]),
            "groups": [g["x"] for g in groups],
        }

    agg = Agg(stat)
    # a scatterplot question like "what are the average values?" names no
    # measure, so answer for both axes
    if measure is None and chart is not None and chart.mark is Mark.POINT:
        axes = [
            e.attribute
            for e in (chart.x, chart.y)
            if e and e.attribute and d.attribute(e.attribute).kind is Kind.QUANTITATIVE
        ]
        if len(axes) == 2:
            return {
                "stat": stat,
                "values": [
                    {"measure": a, "value": aggregate([r[a] for r in rows], agg)}
                    for a in axes
                ],
            }
    if target is None:
        if agg in (Agg.SUM, Agg.COUNT):
            return {"stat": stat, "value": len(rows)}
        raise StateError("the chart has no quantitative attribute to aggregate")
    value = aggregate([r[target] for r in rows], agg)
    return {"stat": stat, "value": value, "measure": target}


class ContextState:
    """All per-session conversation state, undoable and serializable."""

    def __init__(self, dataset: Dataset, lexicon: Optional[Lexicon] = None):
        self.dataset = dataset
        self.lexicon = lexicon or build_lexicon(dataset)
        self.chart: Optional[ChartSpec] = None
        self.filters: tuple[Filter, ...] = ()
        self.selection: tuple[int, ...] = ()
        self.active_utterance: Optional[str] = None
        self.attribute_scores: dict[str, float] = {}
        self.value_scores: dict[str, float] = {}
        self.intent_scores: dict[str, float] = {i: 0.0 for i in INTENT_ORDER}
        self.history: list[HistoryEntry] = []
        self.undo_stack: list[dict] = []

    # ----- centering -------------------------------------------------

    def center_view(self) -> Optional[_Center]:
        if self.chart is None:
            return None
        return _Center(tuple(self.chart.encoded_attributes()))

    def _previous_tokens(self) -> Optional[set[str]]:
        if self.chart is None:
            return None
        return entity_tokens(self.chart)

    # ----- snapshots / undo -------------------------------------------

    def snapshot(self) -> dict:
        """Serialize everything except the undo stack itself."""
        return {
            "chart": self.chart.to_dict() if self.chart else None,
            "filters": [f.to_dict() for f in self.filters],
            "selection": list(self.selection),
            "active_utterance": self.active_utterance,
            "attribute_scores": {
                k: self.attribute_scores[k] for k in sorted(self.attribute_scores)
            },
            "value_scores": {
                k: self.value_scores[k] for k in sorted(self.value_scores)
            },
            "intent_scores": {i: self.intent_scores[i] for i in INTENT_ORDER},
            "history": [h.to_dict() for h in self.history],
        }

    def _restore(self, snap: dict) -> None:
        self.chart = ChartSpec.from_dict(snap["chart"]) if snap["chart"] else None
        self.filters = tuple(Filter.from_dict(f) for f in snap["filters"])
        self.selection = tuple(snap["selection"])
        self.active_utterance = snap["active_utterance"]
        self.attribute_scores = dict(snap["attribute_scores"])
        self.value_scores = dict(snap["value_scores"])
        self.intent_scores = {
            i: snap["intent_scores"].get(i, 0.0) for i in INTENT_ORDER
        }
        self.history = [HistoryEntry.from_dict(h) for h in snap["history"]]

    def _push_undo(self) -> None:
        self.undo_stack.append(self.snapshot())

    def undo(self) -> ApplyResult:
        if not self.undo_stack:
            raise StateError("nothing to undo")
        self._restore(self.undo_stack.pop())
        return ApplyResult(messages=["reverted the last step"], chart_changed=True)

    # ----- serialization ----------------------------------------------

    def to_dict(self) -> dict:
        out = self.snapshot()
        out["dataset"] = self.dataset.name
        out["undo_stack"] = copy.deepcopy(self.undo_stack)
        return out

    @classmethod
    def from_dict(cls, payload: dict, dataset: Dataset) -> "ContextState":
        state = cls(dataset)
        state._restore(payload)
        state.undo_stack = copy.deepcopy(payload.get("undo_stack", []))
        return state

    # ----- scoring ----------------------------------------------------

    def _score_intents(self, parsed: ParsedUtterance, override: Optional[float]) -> None:
        for m in parsed.intents:
            self.intent_scores[m.intent] += (
                override if override is not None else m.confidence
            )

    def _score_new_attributes(self, previous: Optional[ChartSpec]) -> None:
        before = set(previous.encoded_attributes()) if previous else set()
        after = self.chart.encoded_attributes() if self.chart else []
        for name in after:
            if name not in before:
                self.attribute_scores[name] = self.attribute_scores.get(name, 0.0) + 1.0

    def _score_filter_values(self, values: Sequence) -> None:
        for v in values:
            key = str(v)
            self.value_scores[key] = self.value_scores.get(key, 0.0) + 1.0

    # ----- filters ----------------------------------------------------

    def _filter_target(self, fp: FilterParse) -> str:
        if fp.attribute is not None:
            return fp.attribute
        # unbound numeric range: filter the chart's primary measure
        if self.chart is not None:
            for e in (self.chart.y, self.chart.x):
                if (
                    e
                    and e.attribute
                    and self.dataset.attribute(e.attribute).kind is Kind.QUANTITATIVE
                ):
                    return e.attribute
        raise StateError("could not tell which attribute to filter")

    def _merge_filters(
        self, parsed: ParsedUtterance
    ) -> tuple[tuple[Filter, ...], list]:
        """Fold the utterance's filter clauses into the persistent set.

        One filter per attribute: a new clause replaces the old one.
        Returns the merged set and the value terms it applied.
        """
        merged = {f.attribute: f for f in self.filters}
        applied_values: list = []
        for fp in parsed.filters:
            attr = self._filter_target(fp)
            if fp.kind == "values":
                merged[attr] = Filter(attr, "values", values=tuple(fp.values))
                applied_values.extend(fp.values)
            else:
                merged[attr] = Filter(
                    attr,
                    "range",
                    low=fp.low,
                    high=fp.high,
                    low_open=fp.low_open,
                    high_open=fp.high_open,
                    label=fp.label,
                )
        if parsed.top_n is not None:
            if self.chart is None:
                raise StateError("there is no chart to take the top groups from")
            dim = None
            for e in (self.chart.x, self.chart.color):
                if (
                    e is not None
                    and e.attribute is not None
                    and self.dataset.attribute(e.attribute).kind is Kind.CATEGORICAL
                ):
                    dim = e.attribute
                    break
            if dim is None:
                raise StateError("the chart has no category groups to rank")
            try:
                top = top_n_categories(self.dataset, self.chart, parsed.top_n)
            except ValueError as exc:
                raise StateError(str(exc)) from exc
            merged[dim] = Filter(dim, "values", values=tuple(top))
            applied_values.extend(top)
        ordered = sorted(
            merged.values(), key=lambda f: self.dataset.column_index(f.attribute)
        )
        return tuple(ordered), applied_values

    # ----- chart building ----------------------------------------------

    def _chart_roles(self) -> tuple[list[str], list[str], list[str]]:
        """Measures, temporals, dimensions currently encoded, in channel order."""
        measures, temporals, dims = [], [], []
        if self.chart is not None:
            for e in (self.chart.x, self.chart.y, self.chart.color):
                if e is None or e.attribute is None:
                    continue
                kind = self.dataset.attribute(e.attribute).kind
                if kind is Kind.QUANTITATIVE:
                    measures.append(e.attribute)
                elif kind is Kind.TEMPORAL:
                    temporals.append(e.attribute)
                else:
                    dims.append(e.attribute)
        return measures, temporals, dims

    def _parsed_roles(self, parsed: ParsedUtterance):
        measures = parsed.attributes_of_kind(self.lexicon, Kind.QUANTITATIVE)
        temporals = parsed.attributes_of_kind(self.lexicon, Kind.TEMPORAL)
        dims = parsed.attributes_of_kind(self.lexicon, Kind.CATEGORICAL)
        return measures, temporals, dims

    def _fresh_attributes(self, parsed: ParsedUtterance) -> list[str]:
        measures, temporals, dims = self._parsed_roles(parsed)
        intents = set(parsed.intent_names())
        if "correlation" in intents and len(measures) >= 2:
            return measures[:2] + dims[:1]
        if "trend" in intents and measures and temporals:
            return [measures[0], temporals[0]] + dims[:1]
        if parsed.extremum and measures and dims:
            return [dims[0], measures[0]]
        if "group" in intents and dims and measures:
            return [dims[0], measures[0]]
        if "distribution" in intents:
            attrs = [e.attribute for e in parsed.entities if e.kind == "attribute"]
            if attrs:
                return attrs[:1]
        out = list(dict.fromkeys(measures + temporals + dims))
        return out[:3]

    def _merged_attributes(self, parsed: ParsedUtterance) -> tuple[list[str], list[str]]:
        """Blend the utterance's attributes into the current chart's roles."""
        measures, temporals, dims = self._chart_roles()
        new_measures, new_temporals, new_dims = self._parsed_roles(parsed)

        for m in list(new_measures):
            if m in measures:
                new_measures.remove(m)
        if new_measures:
            if len(new_measures) >= 2:
                measures = new_measures[:2]
            elif measures:
                # swap the most recently added measure
                measures = measures[:-1] + [new_measures[0]]
            else:
                measures = [new_measures[0]]
        if new_temporals:
            temporals = [new_temporals[0]]
        for dim in new_dims:
            if dim in dims:
                continue
            if len(dims) >= 2:
                dims = dims[:-1] + [dim]
            else:
                dims = dims + [dim]

        while len(measures) + len(temporals) + len(dims) > 3:
            if len(dims) > 1:
                dims.pop(0)
            elif len(measures) > 2:
                measures.pop(0)
            elif dims:
                dims.pop()
            else:
                temporals.pop()
        return measures + temporals + dims, measures

    def _rebuild(
        self,
        attrs: list[str],
        parsed: ParsedUtterance,
        filters: tuple[Filter, ...],
        measure_order: Optional[list[str]] = None,
        keep_aggregate: bool = False,
        keep_sort: bool = False,
    ) -> ChartSpec:
        aggregation = parsed.aggregation
        if aggregation is None and keep_aggregate and self.chart is not None:
            y = self.chart.y
            if y is not None and y.attribute is not None:
                aggregation = y.aggregate
        try:
            chart = default_chart(
                self.dataset,
                attrs,
                aggregation=aggregation,
                extremum=parsed.extremum,
                filters=filters,
                measure_order=measure_order,
            )
        except ChartBuildError as exc:
            raise StateError(str(exc)) from exc
        if parsed.extremum is None and keep_sort and self.chart is not None:
            chart = replace(chart, sort=self.chart.sort)
        return chart

    # ----- main entry points --------------------------------------------

    def apply_utterance(
        self,
        text: str,
        source: str = "utterance",
        intent_confidence: Optional[float] = None,
    ) -> ApplyResult:
        parsed = parse(
            text,
            self.lexicon,
            center=self.center_view(),
            attribute_scores=self.attribute_scores,
        )
        for diag in parsed.diagnostics:
            if diag.code == "unsupported":
                raise UnsupportedUtterance(diag.message)
        if parsed.is_followup and self.chart is None:
            raise NothingToFollowUp(
                "there is nothing to follow up on yet; ask a full question first"
            )

        messages = [d.message for d in parsed.diagnostics]

        # deictic computations answer a question about the selection and
        # leave the view alone; "instead" always means change the view
        if (
            parsed.calculation is not None
            and self.selection
            and "instead" not in parsed.markers
        ):
            measures, _, dims = self._parsed_roles(parsed)
            if not dims and not parsed.filters and parsed.top_n is None:
                computed = compute_selection_stat(
                    self.dataset,
                    self.chart,
                    self.selection,
                    parsed.calculation,
                    measure=measures[0] if measures else None,
                )
                self._push_undo()
                self._score_intents(parsed, intent_confidence)
                if "values" in computed:
                    parts = [
                        f"the {computed['stat']} of {v['measure']} is "
                        f"{_fmt(v['value'])}"
                        for v in computed["values"]
                    ]
                    messages.append(
                        "for the selected items, " + " and ".join(parts)
                    )
                else:
                    label = computed.get("measure") or computed.get("attributes")
                    suffix = f" of {label}" if isinstance(label, str) else ""
                    messages.append(
                        f"the {computed['stat']}{suffix} for the selected "
                        f"items is {_fmt(computed['value'])}"
                    )
                return ApplyResult(parsed, None, messages, computed, False)

        if parsed.calculation is not None and parsed.referentials and not self.selection:
            raise StateError("select some marks on the chart first")

        # a follow-up that could stand alone starts a new inquiry; only
        # partial utterances merge into the current chart
        fresh = not parsed.is_followup or self._is_standalone(parsed)
        previous = self.chart
        previous_tokens = self._previous_tokens()

        filters, applied_values = self._merge_filters(parsed)
        if fresh:
            attrs = self._fresh_attributes(parsed)
            if not attrs:
                raise StateError(
                    "name at least one attribute to chart, like "
                    f"{self.dataset.attribute_names()[0]}"
                )
            measures, _, _ = self._parsed_roles(parsed)
            chart = self._rebuild(attrs, parsed, filters, measure_order=measures)
        else:
            attrs, measures = self._merged_attributes(parsed)
            if not attrs:
                raise StateError(
                    "could not find anything in that to update the chart with"
                )
            chart = self._rebuild(
                attrs,
                parsed,
                filters,
                measure_order=measures,
                keep_aggregate=True,
                keep_sort=True,
            )

        if (
            parsed.aggregation is not None
            and parsed.aggregation is not Agg.COUNT
            and (chart.y is None or chart.y.aggregate in (None, Agg.COUNT))
        ):
            messages.append(
                "this view shows raw values; select marks to aggregate them"
            )

        transition = classify_transition(previous_tokens, entity_tokens(chart))
        self._push_undo()
        self.filters = filters
        self.chart = chart
        # marks stay put when the entity set does, so a retained view keeps
        # its selection; any other rebuild invalidates it
        if transition is Transition.RETAIN and self.selection:
            visible = visible_row_ids(self.dataset, chart)
            self.selection = tuple(r for r in self.selection if r in visible)
        else:
            self.selection = ()
        self.active_utterance = text
        self._score_new_attributes(previous)
        self._score_filter_values(applied_values)
        self._score_intents(parsed, intent_confidence)
        self.history.append(
            HistoryEntry(transition, tuple(sorted(entity_tokens(chart))), source, text)
        )
        return ApplyResult(parsed, transition, messages, None, True)

    def _is_standalone(self, parsed: ParsedUtterance) -> bool:
        measures, temporals, dims = self._parsed_roles(parsed)
        intents = set(parsed.intent_names())
        if "correlation" in intents and len(measures) >= 2:
            return True
        if "trend" in intents and measures and temporals:
            return True
        if "group" in intents and measures and dims:
            return True
        if "distribution" in intents and (measures or temporals or dims):
            return True
        if parsed.extremum and measures and dims:
            return True
        return False

    def apply_selection(self, row_ids: Sequence[int]) -> ApplyResult:
        if self.chart is None:
            raise StateError("there is no chart to select from")
        visible = visible_row_ids(self.dataset, self.chart)
        bad = [r for r in row_ids if r not in visible]
        if bad:
            raise StateError(
                f"row {bad[0]} is not visible on the current chart"
            )
        self.selection = tuple(sorted(set(int(r) for r in row_ids)))
        return ApplyResult(
            messages=[f"{len(self.selection)} marks selected"], chart_changed=False
        )

    def apply_encodings(
        self,
        x: Optional[str] = None,
        y: Optional[str] = None,
        color: Optional[str] = None,
        aggregation: Optional[Agg] = None,
        filters: Optional[Sequence[Filter]] = None,
        sort: Optional[str] = None,
    ) -> ApplyResult:
        """Manual shelf edits from the GUI; bypasses the parser."""
        previous = self.chart
        previous_tokens = self._previous_tokens()
        new_filters = tuple(filters) if filters is not None else self.filters
        try:
            chart = chart_from_channels(
                self.dataset, x, y, color,
                aggregation=aggregation, filters=new_filters, sort=sort,
            )
        except ChartBuildError as exc:
            raise StateError(str(exc)) from exc

        self._push_undo()
        changed_filters = (
            filters is not None and set(new_filters) != set(self.filters)
        )
        if changed_filters:
            before = {f.attribute: f for f in self.filters}
            for f in new_filters:
                if before.get(f.attribute) == f:
                    continue
                self.intent_scores["filter"] += 1.0
                if f.kind == "values":
                    self._score_filter_values(
                        v for v in f.values
                        if before.get(f.attribute) is None
                        or v not in before[f.attribute].values
                    )
        self.filters = new_filters
        self.chart = chart
        transition = (
            classify_transition(previous_tokens, entity_tokens(chart))
            if chart is not None or previous is not None
            else None
        )
        if transition is Transition.RETAIN and self.selection and chart is not None:
            visible = visible_row_ids(self.dataset, chart)
            self.selection = tuple(r for r in self.selection if r in visible)
        else:
            self.selection = ()
        self.active_utterance = None
        self._score_new_attributes(previous)
        if transition is not None:
            self.history.append(
                HistoryEntry(
                    transition, tuple(sorted(entity_tokens(chart))), "manual"
                )
            )
        return ApplyResult(None, transition, [], None, True)


def new_session(dataset: Dataset) -> ContextState:
    return ContextState(dataset)
