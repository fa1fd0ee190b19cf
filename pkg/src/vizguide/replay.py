"""Scripted sessions: validate a step list, run it, report the outcome.

A script names a dataset and a seed, then applies utterances, selections,
shelf edits, undos, and recommendation picks in order, with optional
expectation steps asserting on the state in between. Execution stops at
the first failing step so the report always names exactly one culprit.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Optional

import jsonschema

from .charts import Agg
from .profiling import FIXTURE_NAMES, load_dataset, load_fixture
from .reco import K_FOLLOWUP_DEFAULT, K_NEW_DEFAULT, recommend
from .state import ApplyResult, ContextState, StateError

TRANSITION_KEY = "transition"


class ScriptError(ValueError):
    """The script is malformed; nothing was executed."""


def replay_schema() -> dict:
    ref = resources.files("vizguide").joinpath("schemas/replay.json")
    return json.loads(ref.read_text(encoding="utf-8"))


def validate_script(script: dict) -> dict:
    try:
        jsonschema.validate(script, replay_schema())
    except jsonschema.ValidationError as exc:
        path = ".".join(str(p) for p in exc.absolute_path) or "(root)"
        raise ScriptError(f"invalid script at {path}: {exc.message}") from exc
    return script


def load_script(path) -> dict:
    return validate_script(json.loads(Path(path).read_text(encoding="utf-8")))


def resolve_dataset(ref: str):
    if ref in FIXTURE_NAMES:
        return load_fixture(ref)
    p = Path(ref)
    return load_dataset(p.read_text(encoding="utf-8"), p.stem)


def _check_expectation(
    expect: dict,
    state: ContextState,
    last: Optional[ApplyResult],
    recs: dict,
) -> Optional[str]:
    """The first violated expectation as a message, or None."""
    chart = state.chart
    if TRANSITION_KEY in expect:
        got = (
            last.transition.value
            if last is not None and last.transition is not None
            else None
        )
        if got != expect[TRANSITION_KEY]:
            return f"transition is {got!r}, expected {expect[TRANSITION_KEY]!r}"
    if "has_chart" in expect and (chart is not None) != expect["has_chart"]:
        return f"has_chart is {chart is not None}, expected {expect['has_chart']}"
    if "mark" in expect:
        got = chart.mark.value if chart is not None else None
        if got != expect["mark"]:
            return f"mark is {got!r}, expected {expect['mark']!r}"
    if "sort" in expect:
        got = chart.sort if chart is not None else None
        if got != expect["sort"]:
            return f"sort is {got!r}, expected {expect['sort']!r}"
    if "encoded" in expect:
        got = set(chart.encoded_attributes()) if chart is not None else set()
        if got != set(expect["encoded"]):
            return f"encoded attributes are {sorted(got)}, expected {sorted(expect['encoded'])}"
    for field in ("attribute_scores", "intent_scores"):
        if field in expect:
            table = getattr(state, field)
            for key, want in expect[field].items():
                got = table.get(key, 0.0)
                if got != want:
                    return f"{field}[{key!r}] is {got}, expected {want}"
    if "selection" in expect and list(state.selection) != expect["selection"]:
        return f"selection is {list(state.selection)}, expected {expect['selection']}"
    if "filter_count" in expect and len(state.filters) != expect["filter_count"]:
        return f"filter count is {len(state.filters)}, expected {expect['filter_count']}"
    if "computed_stat" in expect:
        got = (last.computed or {}).get("stat") if last is not None else None
        if got != expect["computed_stat"]:
            return f"computed stat is {got!r}, expected {expect['computed_stat']!r}"
    if "diagnostic_codes" in expect:
        got = (
            [d.code for d in last.parsed.diagnostics]
            if last is not None and last.parsed is not None
            else []
        )
        if got != expect["diagnostic_codes"]:
            return f"diagnostics are {got}, expected {expect['diagnostic_codes']}"
    if "recommendations_include" in expect:
        texts = {
            r["text"]
            for section in ("deictics", "followups", "new_inquiries")
            for r in recs[section]
        }
        for want in expect["recommendations_include"]:
            if want not in texts:
                return f"no recommendation reads {want!r}"
    return None


def run_script(script: dict) -> dict:
    """Execute a validated script and report per-step outcomes.

    The report carries the recommendations visible after every step, so
    two runs of the same script and seed can be compared byte for byte.
    """
    validate_script(script)
    dataset = resolve_dataset(script["dataset"])
    seed = script.get("seed", 0)
    k_followup = script.get("k_followup", K_FOLLOWUP_DEFAULT)
    k_new = script.get("k_new", K_NEW_DEFAULT)

    state = ContextState(dataset)
    last: Optional[ApplyResult] = None
    recs = recommend(state, seed, k_followup, k_new)
    report: dict = {"dataset": dataset.name, "seed": seed, "steps": []}

    for index, step in enumerate(script["steps"]):
        kind, payload = next(iter(step.items()))
        entry: dict = {"index": index, "step": kind, "ok": True}
        try:
            if kind == "utterance":
                last = state.apply_utterance(payload)
                if last.parsed is not None and last.parsed.diagnostics:
                    entry["diagnostics"] = [
                        d.to_dict() for d in last.parsed.diagnostics
                    ]
            elif kind == "select_recommendation":
                ordered = (
                    recs["deictics"] + recs["followups"] + recs["new_inquiries"]
                )
                if isinstance(payload, int):
                    if not 0 <= payload < len(ordered):
                        raise StateError(
                            f"recommendation index {payload} out of range"
                        )
                    rec = ordered[payload]
                else:
                    match = [r for r in ordered if r["id"] == payload]
                    if not match:
                        raise StateError(f"unknown recommendation id {payload!r}")
                    rec = match[0]
                entry["text"] = rec["text"]
                last = state.apply_utterance(
                    rec["text"], source="recommendation", intent_confidence=1.0
                )
            elif kind == "encode":
                agg = payload.get("aggregation")
                last = state.apply_encodings(
                    x=payload.get("x"),
                    y=payload.get("y"),
                    color=payload.get("color"),
                    aggregation=Agg(agg) if agg else None,
                    sort=payload.get("sort"),
                )
            elif kind == "brush":
                last = state.apply_selection(payload)
            elif kind == "undo":
                last = state.undo()
            else:  # expect
                problem = _check_expectation(payload, state, last, recs)
                if problem is not None:
                    raise StateError(problem)
        except StateError as exc:
            entry["ok"] = False
            entry["error"] = str(exc)
            report["steps"].append(entry)
            report["ok"] = False
            report["failed_step"] = index
            return report

        if kind != "expect":
            recs = recommend(state, seed, k_followup, k_new)
            if last is not None and last.transition is not None:
                entry[TRANSITION_KEY] = last.transition.value
        entry["recommendations"] = recs
        report["steps"].append(entry)

    report["ok"] = True
    report["failed_step"] = None
    return report
