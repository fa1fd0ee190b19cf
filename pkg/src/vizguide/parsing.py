"""Rule-based utterance parsing over the dataset lexicon.

Parsing is total: every string produces a ParsedUtterance, with problems
reported as diagnostics rather than exceptions. Entity matching is
greedy longest-first over the token stream, so full attribute names win
over their constituent words and spans never overlap. Intent detection
separates explicit keyword evidence (confidence 1.0) from implicit
phrasing cues (0.5).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .charts import Agg
from .lexicon import Lexicon, LexEntry, tokenize
from .metrics import quartile_filter_ranges
from .profiling import Kind

EXPLICIT_CONFIDENCE = 1.0
IMPLICIT_CONFIDENCE = 0.5

# Canonical intent order; also the ranking tiebreak order downstream.
INTENT_ORDER = ("correlation", "distribution", "trend", "group", "filter", "aggregation")

YEAR_MIN, YEAR_MAX = 1700, 2100


@dataclass(frozen=True)
class EntityMatch:
    kind: str  # "attribute" | "value"
    attribute: str
    value: object = None
    start: int = 0
    end: int = 0
    confidence: float = 1.0
    candidates: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "attribute": self.attribute,
            "start": self.start,
            "end": self.end,
            "confidence": self.confidence,
        }
        if self.kind == "value":
            out["value"] = self.value
        if len(self.candidates) > 1:
            out["candidates"] = list(self.candidates)
        return out


@dataclass(frozen=True)
class IntentMatch:
    intent: str
    explicit: bool
    confidence: float

    def to_dict(self) -> dict:
        return {
            "intent": self.intent,
            "explicit": self.explicit,
            "confidence": self.confidence,
        }


@dataclass(frozen=True)
class Diagnostic:
    code: str  # "ambiguous_reference" | "underspecified" | "unsupported"
    message: str
    subject: Optional[str] = None

    def to_dict(self) -> dict:
        out = {"code": self.code, "message": self.message}
        if self.subject:
            out["subject"] = self.subject
        return out


@dataclass(frozen=True)
class FilterParse:
    kind: str  # "values" | "range" | "top_n"
    attribute: Optional[str] = None
    values: tuple = ()
    low: Optional[float] = None
    high: Optional[float] = None
    low_open: bool = False
    high_open: bool = False
    label: Optional[str] = None
    temporal: bool = False
    n: Optional[int] = None

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind, "attribute": self.attribute}
        if self.kind == "values":
            out["values"] = list(self.values)
        elif self.kind == "range":
            out.update(
                {
                    "low": self.low,
                    "high": self.high,
                    "low_open": self.low_open,
                    "high_open": self.high_open,
                }
            )
        elif self.kind == "top_n":
            out["n"] = self.n
        if self.label:
            out["label"] = self.label
        if self.temporal:
            out["temporal"] = True
        return out


@dataclass
class ParsedUtterance:
    text: str
    intents: list[IntentMatch] = field(default_factory=list)
    entities: list[EntityMatch] = field(default_factory=list)
    aggregation: Optional[Agg] = None
    extremum: Optional[str] = None
    calculation: Optional[str] = None
    top_n: Optional[int] = None
    filters: list[FilterParse] = field(default_factory=list)
    markers: list[str] = field(default_factory=list)
    referentials: list[str] = field(default_factory=list)
    is_followup: bool = False
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def intent_names(self) -> list[str]:
        return [m.intent for m in self.intents]

    def has_diagnostic(self, code: str) -> bool:
        return any(d.code == code for d in self.diagnostics)

    def attributes_of_kind(self, lex: Lexicon, kind: Kind) -> list[str]:
        out = []
        for e in self.entities:
            if e.kind == "attribute" and lex.dataset.attribute(e.attribute).kind is kind:
                if e.attribute not in out:
                    out.append(e.attribute)
        return out

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "intents": [m.to_dict() for m in self.intents],
            "entities": [e.to_dict() for e in self.entities],
            "aggregation": self.aggregation.value if self.aggregation else None,
            "extremum": self.extremum,
            "calculation": self.calculation,
            "top_n": self.top_n,
            "filters": [f.to_dict() for f in self.filters],
            "markers": self.markers,
            "referentials": self.referentials,
            "is_followup": self.is_followup,
            "diagnostics": [d.to_dict() for d in self.diagnostics],
        }


@dataclass(frozen=True)
class _Match:
    """One lexicon hit (or bare number) over a token range."""

    tok_start: int
    tok_end: int
    start: int
    end: int
    entries: tuple[LexEntry, ...] = ()
    number: Optional[float] = None

    def kinds(self) -> set[str]:
        return {e.kind for e in self.entries}

    def entry(self, kind: str) -> Optional[LexEntry]:
        for e in self.entries:
            if e.kind == kind:
                return e
        return None


def _scan(text: str, lex: Lexicon):
    """Greedy longest-first match of lexicon phrases over the tokens."""
    tokens = tokenize(text)
    words = [t for t, _, _ in tokens]
    matches: list[_Match] = []
    limit = lex.max_phrase_len()
    i = 0
    while i < len(tokens):
        hit = None
        for j in range(min(len(tokens), i + limit), i, -1):
            phrase = tuple(words[i:j])
            entries = tuple(
                e for e in lex.starting_with(words[i]) if e.phrase == phrase
            )
            if entries:
                hit = _Match(i, j, tokens[i][1], tokens[j - 1][2], entries)
                break
        if hit is None:
            word = words[i]
            number = None
            if word[:1].isdigit():
                try:
                    number = float(word)
                except ValueError:
                    number = None
            if number is not None:
                hit = _Match(i, i + 1, tokens[i][1], tokens[i][2], (), number)
            else:
                i += 1
                continue
        matches.append(hit)
        i = hit.tok_end
    return tokens, matches


def _resolve_attribute(
    candidates: Sequence[str],
    lex: Lexicon,
    want: Optional[set[Kind]],
    scores: dict[str, float],
) -> str:
    pool = list(candidates)
    if want:
        narrowed = [c for c in pool if lex.dataset.attribute(c).kind in want]
        if narrowed:
            pool = narrowed
    pool.sort(key=lambda name: (-scores.get(name, 0.0), lex.dataset.column_index(name)))
    return pool[0]


def _is_year(number: Optional[float]) -> bool:
    return (
        number is not None
        and float(number).is_integer()
        and YEAR_MIN <= number <= YEAR_MAX
    )


class _Parse:
    """Working state for a single parse call."""

    def __init__(self, text, lex, center, attribute_scores):
        self.text = text
        self.lex = lex
        self.center = center
        self.scores = attribute_scores or {}
        self.tokens, self.matches = _scan(text, lex)
        self.out = ParsedUtterance(text=text)
        self.consumed: set[int] = set()  # match indices claimed by rules
        self.timeword_spans: list[tuple[int, int]] = []
        self.group_construction = False
        self.count_construction = False
        self.trend_cue = False
        self.corr_cue = False

    # ----- helpers -------------------------------------------------

    def dataset(self):
        return self.lex.dataset

    def word(self, tok_index: int) -> Optional[str]:
        if 0 <= tok_index < len(self.tokens):
            return self.tokens[tok_index][0]
        return None

    def match_at_token(self, tok_index: int) -> Optional[_Match]:
        for m in self.matches:
            if m.tok_start <= tok_index < m.tok_end:
                return m
        return None

    def entity_at_token(self, tok_index: int) -> Optional[EntityMatch]:
        m = self.match_at_token(tok_index)
        if m is None:
            return None
        for e in self.out.entities:
            if e.start == m.start and e.end == m.end:
                return e
        return None

    def entities_of_kind(self, kind: Kind) -> list[EntityMatch]:
        return [
            e
            for e in self.out.entities
            if e.kind == "attribute" and self.dataset().attribute(e.attribute).kind is kind
        ]

    def measures(self) -> list[str]:
        out = []
        for e in self.entities_of_kind(Kind.QUANTITATIVE):
            if e.attribute not in out:
                out.append(e.attribute)
        return out

    def dimensions(self) -> list[str]:
        out = []
        for e in self.entities_of_kind(Kind.CATEGORICAL):
            if e.attribute not in out:
                out.append(e.attribute)
        return out

    def temporals(self) -> list[str]:
        out = []
        for e in self.entities_of_kind(Kind.TEMPORAL):
            if e.attribute not in out:
                out.append(e.attribute)
        return out

    def center_has_temporal(self) -> bool:
        if self.center is None:
            return False
        d = self.dataset()
        return any(
            d.has_attribute(a) and d.attribute(a).kind is Kind.TEMPORAL
            for a in getattr(self.center, "attributes", ())
        )

    def add_intent(self, intent: str, explicit: bool) -> None:
        confidence = EXPLICIT_CONFIDENCE if explicit else IMPLICIT_CONFIDENCE
        for i, existing in enumerate(self.out.intents):
            if existing.intent == intent:
                if explicit and not existing.explicit:
                    self.out.intents[i] = IntentMatch(intent, True, EXPLICIT_CONFIDENCE)
                return
        self.out.intents.append(IntentMatch(intent, explicit, confidence))

    def diagnose(self, code: str, message: str, subject: Optional[str] = None) -> None:
        self.out.diagnostics.append(Diagnostic(code, message, subject))

    # ----- passes --------------------------------------------------

    def collect_entities(self) -> None:
        for idx, m in enumerate(self.matches):
            attr_entry = m.entry("attribute")
            value_entry = m.entry("value")
            if attr_entry is not None:
                candidates = tuple(attr_entry.payload)
                want = self._role_hint(m)
                chosen = _resolve_attribute(candidates, self.lex, want, self.scores)
                self.out.entities.append(
                    EntityMatch(
                        "attribute",
                        chosen,
                        start=m.start,
                        end=m.end,
                        confidence=attr_entry.confidence,
                        candidates=candidates,
                    )
                )
                if len(candidates) > 1:
                    names = ", ".join(candidates)
                    self.diagnose(
                        "ambiguous_reference",
                        f"\"{self.text[m.start:m.end]}\" could mean {names}; using {chosen}",
                        subject=self.text[m.start:m.end],
                    )
            elif value_entry is not None:
                owners = tuple(value_entry.payload)
                attrs = tuple(dict.fromkeys(a for a, _ in owners))
                chosen_attr = _resolve_attribute(attrs, self.lex, None, self.scores)
                value = next(v for a, v in owners if a == chosen_attr)
                self.out.entities.append(
                    EntityMatch(
                        "value",
                        chosen_attr,
                        value=value,
                        start=m.start,
                        end=m.end,
                        confidence=value_entry.confidence,
                        candidates=attrs,
                    )
                )
                if len(attrs) > 1:
                    self.diagnose(
                        "ambiguous_reference",
                        f"\"{self.text[m.start:m.end]}\" is a value of {', '.join(attrs)}; using {chosen_attr}",
                        subject=self.text[m.start:m.end],
                    )
            if "timeword" in m.kinds():
                self.timeword_spans.append((m.start, m.end))
            intent_entry = m.entry("intent")
            if (
                intent_entry is not None
                and intent_entry.payload == ("trend", False)
                and self.text[m.start:m.end].lower() == "over time"
            ):
                # the "time" in "over time" is a time reference too
                self.timeword_spans.append((m.start, m.end))
            marker = m.entry("marker")
            if marker is not None:
                self.out.markers.append(marker.payload)
            referential = m.entry("referential")
            if referential is not None:
                self.out.referentials.append(referential.payload)

        # a time word stands in for the dataset's single temporal attribute
        if self.timeword_spans and not self.temporals():
            temporal = self.dataset().temporal_attribute()
            if temporal is not None:
                start, end = self.timeword_spans[0]
                self.out.entities.append(
                    EntityMatch(
                        "attribute",
                        temporal.name,
                        start=start,
                        end=end,
                        confidence=0.8,
                        candidates=(temporal.name,),
                    )
                )
                self.out.entities.sort(key=lambda e: e.start)

    def _role_hint(self, m: _Match) -> Optional[set[Kind]]:
        """Kind expectation from the immediately preceding function words."""
        for back in (1, 2):
            prev = self.match_at_token(m.tok_start - back)
            if prev is None or prev.tok_end != m.tok_start - back + 1:
                continue
            kinds = prev.kinds()
            if kinds & {"agg", "extremum", "modifier", "comparator"}:
                return {Kind.QUANTITATIVE}
            if "groupword" in kinds:
                return {Kind.CATEGORICAL, Kind.TEMPORAL}
        return None

    def collect_numbers(self) -> None:
        """Claim top-N phrases, temporal ranges, and comparator thresholds."""
        d = self.dataset()
        has_temporal = d.temporal_attribute() is not None
        numbers = [
            (i, m) for i, m in enumerate(self.matches) if m.number is not None
        ]

        # "top 3 ..." : modifier 'top' directly before a number
        for i, m in enumerate(self.matches):
            mod = m.entry("modifier")
            if mod is not None and mod.payload == "top":
                nxt = self.match_at_token(m.tok_end)
                if nxt is not None and nxt.number is not None:
                    self.out.top_n = int(nxt.number)
                    self.consumed.add(i)
                    self.consumed.add(self.matches.index(nxt))

        # "between A and B"
        for i, m in enumerate(self.matches):
            if "between" not in m.kinds() or i in self.consumed:
                continue
            window = [
                (j, n)
                for j, n in numbers
                if j not in self.consumed and m.tok_end <= n.tok_start <= m.tok_end + 3
            ]
            if len(window) >= 2:
                (j1, n1), (j2, n2) = window[0], window[1]
                lo, hi = sorted((n1.number, n2.number))
                temporal = has_temporal and _is_year(lo) and _is_year(hi)
                attr = d.temporal_attribute().name if temporal else None
                self.out.filters.append(
                    FilterParse(
                        "range",
                        attribute=attr,
                        low=lo,
                        high=hi,
                        label="between",
                        temporal=temporal,
                    )
                )
                self.consumed.update({i, j1, j2})

        # temporal prepositions: in/before/after/since + year
        for i, m in enumerate(self.matches):
            prep = m.entry("temporal_prep")
            if prep is None or i in self.consumed:
                continue
            nxt = self.match_at_token(m.tok_end)
            if (
                nxt is None
                or nxt.number is None
                or not _is_year(nxt.number)
                or not has_temporal
            ):
                continue
            year = nxt.number
            attr = d.temporal_attribute().name
            op = prep.payload
            if op == "in":
                f = FilterParse("values", attribute=attr, values=(int(year),),
                                label="in", temporal=True)
            elif op == "before":
                f = FilterParse("range", attribute=attr, high=year, high_open=True,
                                label="before", temporal=True)
            elif op == "since":
                f = FilterParse("range", attribute=attr, low=year,
                                label="since", temporal=True)
            else:  # after: exclusive lower bound
                f = FilterParse("range", attribute=attr, low=year, low_open=True,
                                label="after", temporal=True)
            self.out.filters.append(f)
            self.consumed.update({i, self.matches.index(nxt)})

        # comparators: greater/less/at least/... + plain number
        for i, m in enumerate(self.matches):
            comp = m.entry("comparator")
            if comp is None or i in self.consumed:
                continue
            nxt = self.match_at_token(m.tok_end)
            if nxt is None or nxt.number is None:
                continue
            j = self.matches.index(nxt)
            if j in self.consumed:
                continue
            value = nxt.number
            attr = self._nearest_measure(m.tok_start)
            if attr is None:
                self.diagnose(
                    "underspecified",
                    f"Not sure which field '{self.text[m.start:nxt.end]}' "
                    "should be compared against; try naming the attribute",
                )
            op = comp.payload
            kwargs: dict = {"attribute": attr, "label": op}
            if op == "gt":
                kwargs.update(low=value, low_open=True)
            elif op == "ge":
                kwargs.update(low=value)
            elif op == "lt":
                kwargs.update(high=value, high_open=True)
            elif op == "le":
                kwargs.update(high=value)
            else:  # eq
                kwargs.update(low=value, high=value)
            self.out.filters.append(FilterParse("range", **kwargs))
            self.consumed.update({i, j})

    def _nearest_measure(self, tok_index: int) -> Optional[str]:
        best = None
        best_distance = None
        for e in self.out.entities:
            if e.kind != "attribute":
                continue
            if self.dataset().attribute(e.attribute).kind is not Kind.QUANTITATIVE:
                continue
            m = next(
                (mm for mm in self.matches if mm.start == e.start and mm.end == e.end),
                None,
            )
            if m is None:
                continue
            distance = abs(m.tok_start - tok_index)
            if best_distance is None or distance < best_distance:
                best, best_distance = e.attribute, distance
        return best

    def collect_band_filters(self) -> None:
        """Modifier low/high next to a measure becomes a quartile band."""
        for i, m in enumerate(self.matches):
            mod = m.entry("modifier")
            if mod is None or mod.payload == "top" or i in self.consumed:
                continue
            target = None
            for ahead in (0, 1):
                e = self.entity_at_token(m.tok_end + ahead)
                if (
                    e is not None
                    and e.kind == "attribute"
                    and self.dataset().attribute(e.attribute).kind is Kind.QUANTITATIVE
                ):
                    target = e.attribute
                    break
            if target is None:
                continue
            bands = quartile_filter_ranges(self.dataset(), target)
            band = bands[0] if mod.payload == "low" else bands[-1]
            self.out.filters.append(
                FilterParse(
                    "range",
                    attribute=target,
                    low=band.low,
                    high=band.high,
                    low_open=band.low_open,
                    high_open=band.high_open,
                    label=mod.payload,
                )
            )
            self.consumed.add(i)

    def collect_value_filters(self) -> None:
        grouped: dict[str, list] = {}
        for e in self.out.entities:
            if e.kind == "value":
                grouped.setdefault(e.attribute, []).append(e.value)
        for attr, values in grouped.items():
            self.out.filters.append(
                FilterParse("values", attribute=attr, values=tuple(values))
            )

    def collect_aggregation(self) -> None:
        for m in self.matches:
            agg_entry = m.entry("agg")
            if agg_entry is not None and self.out.aggregation is None:
                self.out.aggregation = agg_entry.payload

    def collect_extremum(self) -> None:
        for m in self.matches:
            entry = m.entry("extremum")
            if entry is None:
                continue
            self.out.extremum = entry.payload
            break

    def detect_intents(self) -> None:
        d = self.dataset()
        measures = self.measures()
        dimensions = self.dimensions()
        temporals = self.temporals()
        has_agg = self.out.aggregation is not None
        count_agg = self.out.aggregation is Agg.COUNT

        groupword_hits = [m for m in self.matches if "groupword" in m.kinds()]
        countword_hits = [
            m
            for m in self.matches
            if m.entry("intent") is not None
            and m.entry("intent").payload[0] == "distribution"
            and m.entry("intent").payload[1] is False
        ]
        itemword_present = any("itemword" in m.kinds() for m in self.matches)
        temporal_ref = bool(temporals) or bool(self.timeword_spans)

        # keyword-driven intents, with context gates for the implicit cues
        for m in self.matches:
            entry = m.entry("intent")
            if entry is None:
                continue
            intent, explicit = entry.payload
            if explicit:
                if intent == "filter" and not (
                    self.out.filters or self.out.top_n or measures or dimensions
                ):
                    # a bare filter verb with nothing to filter by
                    continue
                self.add_intent(intent, True)
                if intent == "trend":
                    self.trend_cue = True
                continue
            # implicit cues
            if intent == "trend":
                phrase = self.text[m.start:m.end].lower()
                if phrase == "over time" or temporal_ref:
                    self.trend_cue = True
                elif self.center_has_temporal() and any(
                    e.kind == "attribute" for e in self.out.entities
                ):
                    # "changes in X" continues an ongoing temporal view
                    self.trend_cue = True
            elif intent == "correlation":
                self.corr_cue = True
            elif intent == "distribution":
                # count questions: how many / number of
                self.count_construction = True

        # "vary with" vs "vary over": decided by the following word
        for i, (word, _s, _e) in enumerate(self.tokens):
            if word in ("vary", "varies", "varying"):
                nxt = self.word(i + 1)
                if nxt == "with":
                    self.corr_cue = True
                elif nxt in ("over", "across", "by"):
                    self.trend_cue = True

        # "over" + time reference reads as a trend cue, not a comparator
        for m in self.matches:
            comp = m.entry("comparator")
            if comp is not None and comp.payload == "gt":
                for ahead in (0, 1):
                    nxt = self.match_at_token(m.tok_end + ahead)
                    if nxt is not None and (
                        "timeword" in nxt.kinds()
                        or any(
                            e.kind == "attribute"
                            and d.attribute(e.attribute).kind is Kind.TEMPORAL
                            for e in self.out.entities
                            if e.start == nxt.start
                        )
                    ):
                        self.trend_cue = True

        if self.trend_cue and (temporal_ref or self.center_has_temporal()):
            self.add_intent("trend", any(
                m.entry("intent") is not None
                and m.entry("intent").payload == ("trend", True)
                for m in self.matches
            ))

        if self.corr_cue and len(measures) >= 2:
            self.add_intent("correlation", False)

        # group: explicit verb, or a grouping construction around a dimension
        group_keyword = any(
            m.entry("intent") is not None and m.entry("intent").payload == ("group", True)
            for m in self.matches
        )
        if groupword_hits and dimensions:
            if has_agg and not count_agg:
                self.add_intent("group", True)
                self.group_construction = True
            elif measures:
                self.add_intent("group", False)
                self.group_construction = True
                # scatter and line views carry their own reading of the
                # measure; only a bare "measure by dimension" needs the
                # default-aggregation warning
                other = {m.intent for m in self.out.intents} - {"group"}
                if not other & {"trend", "correlation"}:
                    self.diagnose(
                        "underspecified",
                        f"No aggregation given for {measures[0]} by "
                        f"{dimensions[0]}; defaulting to mean",
                        subject=measures[0],
                    )
        if group_keyword and dimensions:
            self.group_construction = True

        # count questions and count-aggregated dimensions are distributions
        if (self.count_construction or count_agg) and not measures:
            if dimensions or itemword_present:
                self.add_intent("distribution", True)
                if dimensions:
                    self.count_construction = True
                    self.out.aggregation = Agg.COUNT

        # extremum: with a dimension it is a sorted grouping; with a bare
        # measure it is a min/max computation; alone it asks to reorder
        # whatever is already in view
        if self.out.extremum is not None:
            if measures and dimensions:
                self.add_intent("group", False)
            elif measures:
                self.add_intent("aggregation", True)
                self.out.calculation = "max" if self.out.extremum == "highest" else "min"
            else:
                self.add_intent("filter", False)

        # two bare measures with nothing else claimed: implicit correlation
        if (
            len(measures) >= 2
            and not self.out.intents
            and not has_agg
            and not self.out.filters
        ):
            self.add_intent("correlation", False)

        # filters found anywhere make filter an intent
        if self.out.filters or self.out.top_n is not None:
            explicit_filter = (
                any(
                    m.entry("intent") is not None
                    and m.entry("intent").payload == ("filter", True)
                    for m in self.matches
                )
                or any(mk in ("just", "only") for mk in self.out.markers)
                or self.out.top_n is not None
                or any(f.kind == "range" or f.temporal for f in self.out.filters)
            )
            self.add_intent("filter", explicit_filter)

        # aggregation change / computation: an agg term outside any group
        # or count construction, with no dimension of its own
        if (
            has_agg
            and not count_agg
            and not self.group_construction
            and not dimensions
        ):
            self.add_intent("aggregation", True)
            if self.out.calculation is None:
                self.out.calculation = self.out.aggregation.value

        # explicit "difference" computation
        for m in self.matches:
            calc = m.entry("calc")
            if calc is not None:
                self.add_intent("aggregation", True)
                self.out.calculation = calc.payload

        # correlation named but underfilled: a deictic computation
        if (
            any(i.intent == "correlation" and i.explicit for i in self.out.intents)
            and len(measures) < 2
            and (self.out.referentials or itemword_present or not self.out.entities)
        ):
            self.out.calculation = "correlation"

        # single attribute with no other reading: show its distribution
        if not self.out.intents and not self.out.filters:
            attrs = [e for e in self.out.entities if e.kind == "attribute"]
            if len(attrs) == 1 and self.center is None:
                self.add_intent("distribution", False)

    def is_complete(self) -> bool:
        """Can this utterance stand alone, without a prior center?"""
        measures = self.measures()
        dimensions = self.dimensions()
        temporals = self.temporals()
        intents = {m.intent for m in self.out.intents}
        if "correlation" in intents and len(measures) >= 2:
            return True
        if "trend" in intents and measures and temporals:
            return True
        if "group" in intents and measures and dimensions:
            return True
        if "distribution" in intents and (measures or dimensions or temporals):
            return True
        if self.out.extremum and measures and dimensions:
            return True
        return False

    def finalize(self) -> ParsedUtterance:
        out = self.out
        actionable = (
            out.entities
            or out.intents
            or out.filters
            or out.aggregation is not None
            or out.extremum is not None
            or out.calculation is not None
            or out.top_n is not None
        )
        if not actionable:
            self.diagnose(
                "unsupported",
                "I can only answer questions about the data, like trends, "
                "comparisons, distributions, and filters",
            )
            return out

        complete = self.is_complete()
        if out.markers or out.referentials:
            out.is_followup = True
        elif not complete:
            if self.center is not None:
                out.is_followup = True
            else:
                self.diagnose(
                    "underspecified",
                    "There is no earlier question to build on; try naming the "
                    "attributes you want to see",
                )
        return out


def parse(
    text: str,
    lex: Lexicon,
    center=None,
    attribute_scores: Optional[dict[str, float]] = None,
) -> ParsedUtterance:
    """Parse one utterance against a lexicon.

    center, when given, is the previous conversational center (anything
    with an `attributes` iterable); attribute_scores bias ambiguous
    attribute references toward what the user has touched most.
    """
    p = _Parse(text, lex, center, attribute_scores)
    p.collect_entities()
    p.collect_aggregation()
    p.collect_extremum()
    p.collect_numbers()
    p.collect_band_filters()
    p.collect_value_filters()
    p.detect_intents()
    return p.finalize()


def classify_filter(
    text: str, lex: Lexicon, attribute_scores: Optional[dict[str, float]] = None
) -> list[FilterParse]:
    """The filter clauses of an utterance (value sets, ranges, top-N)."""
    parsed = parse(text, lex, attribute_scores=attribute_scores)
    out = list(parsed.filters)
    if parsed.top_n is not None:
        out.append(FilterParse("top_n", n=parsed.top_n))
    return out


def detect_extremum(text: str, lex: Lexicon) -> Optional[tuple[str, Optional[str]]]:
    """(direction, measure) when the utterance asks for an extremum."""
    parsed = parse(text, lex)
    if parsed.extremum is None:
        return None
    measures = [
        e.attribute
        for e in parsed.entities
        if e.kind == "attribute"
        and lex.dataset.attribute(e.attribute).kind is Kind.QUANTITATIVE
    ]
    return parsed.extremum, (measures[0] if measures else None)
