"""Phrase lexicon built from a dataset plus a fixed function vocabulary.

The lexicon maps token phrases to typed entries: attribute and value
references generated from the dataset (with plural and single-word
variants), and a static vocabulary of aggregation terms, intent keywords,
pragmatic markers, comparators, and friends. Matching is greedy longest
first, so a full attribute name always beats any of its words.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .charts import Agg
from .profiling import Dataset, Kind

# Match confidence tiers for entity references.
CONF_CANONICAL = 1.0
CONF_VARIANT = 0.95
CONF_WORD = 0.8

TOKEN_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9'.-]*")

# Words that stand in for "a row of this dataset" regardless of domain.
ITEM_WORDS = {
    "item", "items", "movie", "movies", "film", "films", "college", "colleges",
    "school", "schools", "point", "points", "value", "values", "record",
    "records", "data", "entry", "entries",
}

PRAGMATIC_MARKERS = ("what about", "how about", "also", "just", "only", "instead", "now")
REFERENTIALS = ("this", "that", "these", "those")

# intent keyword -> (intent, explicit)
INTENT_KEYWORDS = {
    "trend": ("trend", True),
    "trends": ("trend", True),
    "correlation": ("correlation", True),
    "correlations": ("correlation", True),
    "correlate": ("correlation", True),
    "correlated": ("correlation", True),
    "relationship": ("correlation", True),
    "scatterplot": ("correlation", True),
    "distribution": ("distribution", True),
    "spread": ("distribution", True),
    "histogram": ("distribution", True),
    "bin": ("distribution", True),
    "binned": ("distribution", True),
    "compare": ("group", True),
    "comparison": ("group", True),
    "break down": ("group", True),
    "group by": ("group", True),
    "filter": ("filter", True),
    "drill down": ("filter", True),
    "focus on": ("filter", True),
    # implicit cues; the parser checks context before firing the intent
    "change": ("trend", False),
    "changes": ("trend", False),
    "changed": ("trend", False),
    "changing": ("trend", False),
    "over time": ("trend", False),
    "versus": ("correlation", False),
    "vs": ("correlation", False),
    "against": ("correlation", False),
    "vary": ("correlation", False),
    "varies": ("correlation", False),
    "how many": ("distribution", False),
    "number of": ("distribution", False),
}

AGG_TERMS = {
    "average": Agg.MEAN,
    "mean": Agg.MEAN,
    "median": Agg.MEDIAN,
    "min": Agg.MIN,
    "minimum": Agg.MIN,
    "max": Agg.MAX,
    "maximum": Agg.MAX,
    "total": Agg.SUM,
    "sum": Agg.SUM,
    "count": Agg.COUNT,
}

EXTREMUM_TERMS = {
    "highest": "highest",
    "largest": "highest",
    "biggest": "highest",
    "most": "highest",
    "lowest": "lowest",
    "smallest": "lowest",
    "least": "lowest",
}

COMPARATORS = {
    "greater than": "gt",
    "more than": "gt",
    "above": "gt",
    "over": "gt",
    "less than": "lt",
    "fewer than": "lt",
    "below": "lt",
    "under": "lt",
    "at least": "ge",
    "at most": "le",
    "equal to": "eq",
}

TEMPORAL_PREPS = ("in", "before", "after", "since")

MODIFIERS = {
    "low": "low",
    "cheap": "low",
    "cheapest": "low",
    "high": "high",
    "expensive": "high",
    "top": "top",
}

GROUP_WORDS = ("by", "across", "per", "for each")

TIME_WORDS = ("time", "year", "years")

# deictic computations beyond plain aggregations
CALC_WORDS = {"difference": "difference"}


@dataclass(frozen=True)
class LexEntry:
    phrase: tuple[str, ...]
    kind: str
    payload: object = None
    confidence: float = 1.0


@dataclass
class Lexicon:
    dataset: Dataset
    entries: list[LexEntry] = field(default_factory=list)
    _index: dict[str, list[LexEntry]] = field(default_factory=dict, repr=False)

    def add(self, entry: LexEntry) -> None:
        self.entries.append(entry)
        bucket = self._index.setdefault(entry.phrase[0], [])
        bucket.append(entry)
        bucket.sort(key=lambda e: -len(e.phrase))

    def starting_with(self, token: str) -> list[LexEntry]:
        return self._index.get(token, [])

    def max_phrase_len(self) -> int:
        return max((len(e.phrase) for e in self.entries), default=1)


def tokenize(text: str) -> list[tuple[str, int, int]]:
    """Lowercased word tokens with their character spans."""
    return [(m.group(0).lower(), m.start(), m.end()) for m in TOKEN_RE.finditer(text)]


def _phrase(text: str) -> tuple[str, ...]:
    return tuple(tok for tok, _, _ in tokenize(text))


def pluralize(name: str) -> str:
    """Naive plural used both for generation and for matching variants."""
    words = name.split(" ")
    last = words[-1]
    if last.endswith("s"):
        return name
    if last.endswith("y") and len(last) > 1 and last[-2] not in "aeiou":
        words[-1] = last[:-1] + "ies"
    else:
        words[-1] = last + "s"
    return " ".join(words)


def _word_variants(word: str) -> set[str]:
    out = {word, pluralize(word).split(" ")[-1]}
    if len(word) > 3 and word[-1] not in "aeiou" and not word.endswith("ing"):
        out.add(word + "ing")
    return out


def build_lexicon(d: Dataset) -> Lexicon:
    """Assemble the phrase table for one dataset.

    Each attribute contributes its canonical name, a plural variant, and
    per-word synonyms (which may be ambiguous across attributes); each
    categorical value contributes its name and plural. The static
    function vocabulary is shared by all datasets. Deterministic for a
    given dataset.
    """
    lex = Lexicon(dataset=d)

    for marker in PRAGMATIC_MARKERS:
        lex.add(LexEntry(_phrase(marker), "marker", marker))
    for ref in REFERENTIALS:
        lex.add(LexEntry(_phrase(ref), "referential", ref))
    for keyword, (intent, explicit) in INTENT_KEYWORDS.items():
        lex.add(LexEntry(_phrase(keyword), "intent", (intent, explicit)))
    for term, agg in AGG_TERMS.items():
        lex.add(LexEntry(_phrase(term), "agg", agg))
    for term, direction in EXTREMUM_TERMS.items():
        lex.add(LexEntry(_phrase(term), "extremum", direction))
    for term, op in COMPARATORS.items():
        lex.add(LexEntry(_phrase(term), "comparator", op))
    for prep in TEMPORAL_PREPS:
        lex.add(LexEntry(_phrase(prep), "temporal_prep", prep))
    for term, band in MODIFIERS.items():
        lex.add(LexEntry(_phrase(term), "modifier", band))
    for word in GROUP_WORDS:
        lex.add(LexEntry(_phrase(word), "groupword", word))
    for word in TIME_WORDS:
        lex.add(LexEntry(_phrase(word), "timeword", word))
    for word in sorted(ITEM_WORDS):
        lex.add(LexEntry(_phrase(word), "itemword", word))
    for word, calc in CALC_WORDS.items():
        lex.add(LexEntry(_phrase(word), "calc", calc))
    lex.add(LexEntry(("between",), "between", "between"))

    # attribute names: canonical, plural, and single-word synonyms
    word_candidates: dict[str, list[str]] = {}
    for attr in d.attributes:
        canonical = _phrase(attr.name)
        lex.add(LexEntry(canonical, "attribute", (attr.name,), CONF_CANONICAL))
        plural = _phrase(pluralize(attr.name))
        if plural != canonical:
            lex.add(LexEntry(plural, "attribute", (attr.name,), CONF_VARIANT))
        for word in canonical:
            for variant in _word_variants(word):
                word_candidates.setdefault(variant, [])
                if attr.name not in word_candidates[variant]:
                    word_candidates[variant].append(attr.name)

    taken = {e.phrase for e in lex.entries}
    for word in sorted(word_candidates):
        phrase = (word,)
        if phrase in taken:
            continue
        lex.add(LexEntry(phrase, "attribute", tuple(word_candidates[word]), CONF_WORD))

    # categorical values, canonical and plural
    seen_values: dict[tuple[str, ...], list[tuple[str, str]]] = {}
    for attr in d.by_kind(Kind.CATEGORICAL):
        for value, _count in attr.values:
            text = str(value)
            seen_values.setdefault(_phrase(text), []).append((attr.name, value))
            plural = _phrase(pluralize(text))
            if plural != _phrase(text):
                seen_values.setdefault(plural, []).append((attr.name, value))
    for phrase, owners in seen_values.items():
        if not phrase or phrase in taken:
            continue
        conf = CONF_CANONICAL if phrase == _phrase(str(owners[0][1])) else CONF_VARIANT
        lex.add(LexEntry(phrase, "value", tuple(owners), conf))

    return lex
