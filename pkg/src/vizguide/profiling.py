"""Dataset ingestion and per-attribute profiling.

A Dataset is loaded once from CSV, typed, and treated as immutable from
then on. Attribute kinds are inferred with the precedence temporal >
quantitative > categorical so that year columns never masquerade as plain
numbers. All downstream statistics (metrics.py) operate on the typed rows
produced here.
"""

from __future__ import annotations

import csv
import io
import os
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Iterable, Optional

# Cell spellings treated as missing values, compared case-insensitively.
NULL_TOKENS = {"", "na", "n/a", "null", "nan"}

# A bare integer in this range is read as a calendar year.
YEAR_MIN = 1700
YEAR_MAX = 2100

# Header words that suggest a temporal column when its values are numeric.
DATE_HEADER_WORDS = ("year", "date", "month", "day", "time", "quarter")

ISO_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")

FIXTURE_NAMES = ("movies", "colleges")


class Kind(str, Enum):
    CATEGORICAL = "categorical"
    QUANTITATIVE = "quantitative"
    TEMPORAL = "temporal"


class IngestionError(ValueError):
    """Raised when a CSV cannot be loaded; the message names the line."""


@dataclass(frozen=True)
class AttributeProfile:
    """Summary of one column after type inference.

    For categorical and temporal attributes `values` holds the distinct
    non-null values in first-appearance order with their row counts. For
    quantitative attributes the summary statistics are populated instead.
    """

    name: str
    kind: Kind
    cardinality: int
    null_count: int
    all_null: bool = False
    values: tuple[tuple[object, int], ...] = ()
    minimum: Optional[float] = None
    maximum: Optional[float] = None
    mean: Optional[float] = None
    stddev: Optional[float] = None

    def value_list(self) -> list:
        return [v for v, _ in self.values]

    def to_dict(self) -> dict:
        out: dict = {
            "name": self.name,
            "kind": self.kind.value,
            "cardinality": self.cardinality,
            "null_count": self.null_count,
        }
        if self.all_null:
            out["all_null"] = True
        if self.kind is Kind.QUANTITATIVE:
            out["stats"] = {
                "min": self.minimum,
                "max": self.maximum,
                "mean": self.mean,
                "stddev": self.stddev,
            }
        else:
            out["values"] = [{"value": v, "count": c} for v, c in self.values]
        return out


@dataclass
class Dataset:
    """A typed, row-oriented table with per-attribute profiles.

    Row ids are the 0-based positions in the source file and stay stable
    for the lifetime of the dataset. Cells are float, int (years), str, or
    None for nulls.
    """

    name: str
    attributes: list[AttributeProfile]
    rows: list[dict[str, object]]

    _by_name: dict[str, AttributeProfile] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self._by_name = {a.name: a for a in self.attributes}

    @property
    def row_count(self) -> int:
        return len(self.rows)

    def attribute(self, name: str) -> AttributeProfile:
        return self._by_name[name]

    def has_attribute(self, name: str) -> bool:
        return name in self._by_name

    def attribute_names(self) -> list[str]:
        return [a.name for a in self.attributes]

    def column_index(self, name: str) -> int:
        return self.attribute_names().index(name)

    def by_kind(self, kind: Kind) -> list[AttributeProfile]:
        return [a for a in self.attributes if a.kind is kind]

    def column(self, name: str) -> list:
        return [row[name] for row in self.rows]

    def temporal_attribute(self) -> Optional[AttributeProfile]:
        """The dataset's single temporal attribute, if there is exactly one."""
        temporal = self.by_kind(Kind.TEMPORAL)
        return temporal[0] if len(temporal) == 1 else None

    def to_profile_dict(self) -> dict:
        return {
            "name": self.name,
            "row_count": self.row_count,
            "attributes": [a.to_dict() for a in self.attributes],
        }


def is_null_token(raw: str) -> bool:
    return raw.strip().lower() in NULL_TOKENS


def _parse_number(raw: str) -> Optional[float]:
    try:
        return float(raw.replace(",", "")) if raw else None
    except ValueError:
        return None


def _year_of(raw: str) -> Optional[int]:
    raw = raw.strip()
    if re.fullmatch(r"\d{4}", raw):
        year = int(raw)
        if YEAR_MIN <= year <= YEAR_MAX:
            return year
    return None


def infer_kind(values: Iterable[str], header: str) -> Kind:
    """Classify a column from its raw cell strings and header.

    Precedence is temporal > quantitative > categorical. A column whose
    non-null cells are all ISO dates or bare in-range years is temporal,
    as is an all-numeric column whose header uses date vocabulary. An
    all-null column falls back to categorical.
    """
    non_null = [v.strip() for v in values if not is_null_token(v)]
    if not non_null:
        return Kind.CATEGORICAL

    all_years = all(_year_of(v) is not None for v in non_null)
    all_iso = all(ISO_DATE_RE.match(v) for v in non_null)
    if all_years or all_iso:
        return Kind.TEMPORAL

    all_numeric = all(_parse_number(v) is not None for v in non_null)
    header_temporal = any(w in header.lower() for w in DATE_HEADER_WORDS)
    if all_numeric and header_temporal:
        return Kind.TEMPORAL
    if all_numeric:
        return Kind.QUANTITATIVE
    return Kind.CATEGORICAL


def _typed_cell(raw: str, kind: Kind):
    if is_null_token(raw):
        return None
    raw = raw.strip()
    if kind is Kind.TEMPORAL:
        year = _year_of(raw)
        if year is not None:
            return year
        if ISO_DATE_RE.match(raw):
            return raw
        number = _parse_number(raw)
        return number if number is not None else raw
    if kind is Kind.QUANTITATIVE:
        return _parse_number(raw)
    return raw


def _population_stddev(values: list[float]) -> float:
    n = len(values)
    mean = sum(values) / n
    return (sum((v - mean) ** 2 for v in values) / n) ** 0.5


def equal_width_bins(values: list[float], k: int = 10) -> list[tuple[float, float, int]]:
    """Split numeric values into k equal-width bins over [min, max].

    Returns (low, high, count) per bin; the last bin includes the maximum.
    Degenerate input (all values equal) collapses to a single bin.
    """
    if not values:
        return []
    low, high = min(values), max(values)
    if low == high:
        return [(low, high, len(values))]
    width = (high - low) / k
    counts = [0] * k
    for v in values:
        idx = min(int((v - low) / width), k - 1)
        counts[idx] += 1
    return [(low + i * width, low + (i + 1) * width, counts[i]) for i in range(k)]


def _profile_column(name: str, raw: list[str], typed: list) -> AttributeProfile:
    kind = infer_kind(raw, name)
    null_count = sum(1 for v in typed if v is None)
    non_null = [v for v in typed if v is not None]
    if not non_null:
        return AttributeProfile(
            name=name, kind=kind, cardinality=0, null_count=null_count, all_null=True
        )
    if kind is Kind.QUANTITATIVE:
        return AttributeProfile(
            name=name,
            kind=kind,
            cardinality=len(set(non_null)),
            null_count=null_count,
            minimum=min(non_null),
            maximum=max(non_null),
            mean=sum(non_null) / len(non_null),
            stddev=_population_stddev(non_null),
        )
    counts: dict = {}
    for v in non_null:
        counts[v] = counts.get(v, 0) + 1
    return AttributeProfile(
        name=name,
        kind=kind,
        cardinality=len(counts),
        null_count=null_count,
        values=tuple(counts.items()),
    )


def load_dataset(source, name: str) -> Dataset:
    """Load and profile a CSV from a path, file object, or raw text.

    Raises IngestionError naming the offending line for ragged rows,
    duplicate headers, or an empty file.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        source = str(source)
        if "\n" not in source and os.path.exists(source):
            with open(source, "r", encoding="utf-8") as fh:
                text = fh.read()
        else:
            text = source
    if isinstance(text, bytes):
        text = text.decode("utf-8")

    reader = csv.reader(io.StringIO(text))
    try:
        table = list(reader)
    except csv.Error as exc:
        raise IngestionError(f"line {reader.line_num}: {exc}") from exc

    table = [row for row in table if row]
    if not table:
        raise IngestionError("line 1: file is empty")
    header = [h.strip() for h in table[0]]
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise IngestionError(f"line 1: duplicate attribute names {dupes}")
    if any(not h for h in header):
        raise IngestionError("line 1: blank attribute name")

    width = len(header)
    raw_rows: list[list[str]] = []
    for line_no, row in enumerate(table[1:], start=2):
        if len(row) != width:
            raise IngestionError(
                f"line {line_no}: expected {width} fields, got {len(row)}"
            )
        raw_rows.append(row)
    if not raw_rows:
        raise IngestionError("line 1: no data rows")

    columns = {h: [row[i] for row in raw_rows] for i, h in enumerate(header)}
    kinds = {h: infer_kind(columns[h], h) for h in header}
    typed_rows = [
        {h: _typed_cell(row[i], kinds[h]) for i, h in enumerate(header)}
        for row in raw_rows
    ]
    profiles = [
        _profile_column(h, columns[h], [r[h] for r in typed_rows]) for h in header
    ]
    return Dataset(name=name, attributes=profiles, rows=typed_rows)


def load_fixture(name: str) -> Dataset:
    """Load one of the bundled demo datasets by short name."""
    if name not in FIXTURE_NAMES:
        raise IngestionError(f"unknown fixture {name!r}; pick from {FIXTURE_NAMES}")
    text = resources.files("vizguide").joinpath(f"fixtures/{name}.csv").read_text("utf-8")
    return load_dataset(text, name)
