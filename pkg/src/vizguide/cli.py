"""Command line entry points: serve the API, poke the engine, run scripts."""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from .parsing import parse
from .profiling import FIXTURE_NAMES, load_dataset, load_fixture
from .reco import K_FOLLOWUP_DEFAULT, K_NEW_DEFAULT, recommend
from .replay import ScriptError, load_script, run_script
from .state import ContextState, StateError

HOST_ENV = "VIZGUIDE_HOST"
PORT_ENV = "VIZGUIDE_PORT"


def resolve_dataset(ref: str):
    """A bundled fixture name, or a path to a CSV file."""
    if ref in FIXTURE_NAMES:
        return load_fixture(ref)
    path = Path(ref)
    if not path.exists():
        raise click.BadParameter(
            f"{ref!r} is neither a bundled fixture {list(FIXTURE_NAMES)} "
            "nor an existing CSV path",
            param_hint="--dataset",
        )
    return load_dataset(path.read_text(encoding="utf-8"), path.stem)


dataset_option = click.option(
    "--dataset",
    default="movies",
    show_default=True,
    help="Bundled fixture name or CSV path",
)
seed_option = click.option(
    "--seed", default=0, show_default=True, help="Phrasing seed"
)
k_options = (
    click.option(
        "--k-followup",
        default=K_FOLLOWUP_DEFAULT,
        show_default=True,
        help="Follow-up / deictic section size",
    ),
    click.option(
        "--k-new",
        default=K_NEW_DEFAULT,
        show_default=True,
        help="New-inquiry section size",
    ),
)


def with_k(fn):
    for option in k_options:
        fn = option(fn)
    return fn


def emit(payload) -> None:
    click.echo(json.dumps(payload, indent=2))


@click.group()
def main():
    """Conversational visual analysis over CSV files."""


@main.command()
@click.option(
    "--host",
    default=lambda: os.environ.get(HOST_ENV, "127.0.0.1"),
    help=f"Bind address (or ${HOST_ENV})",
)
@click.option(
    "--port",
    default=lambda: int(os.environ.get(PORT_ENV, "8731")),
    type=int,
    help=f"Bind port (or ${PORT_ENV})",
)
@click.option(
    "--persist",
    default=None,
    type=click.Path(file_okay=False),
    help="Directory for JSON session persistence",
)
def serve(host: str, port: int, persist):
    """Run the HTTP session service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(persist_dir=persist), host=host, port=port)


@main.command("parse")
@dataset_option
@click.argument("text")
def parse_command(dataset: str, text: str):
    """Parse one utterance against a dataset's lexicon."""
    d = resolve_dataset(dataset)
    state = ContextState(d)
    emit(parse(text, state.lexicon).to_dict())


@main.command("profile")
@dataset_option
def profile_command(dataset: str):
    """Print attribute kinds, cardinalities, and value summaries."""
    emit(resolve_dataset(dataset).to_profile_dict())


@main.command("recommend")
@dataset_option
@seed_option
@with_k
@click.option(
    "--utterance",
    "utterances",
    multiple=True,
    help="Apply before recommending; repeatable",
)
def recommend_command(dataset, seed, k_followup, k_new, utterances):
    """Print the recommendation payload for a (possibly warmed-up) session."""
    state = ContextState(resolve_dataset(dataset))
    for text in utterances:
        state.apply_utterance(text)
    emit(recommend(state, seed, k_followup, k_new))


@main.command("replay")
@click.argument("script", type=click.Path(exists=True, dir_okay=False))
def replay_command(script):
    """Run a replay script; exit nonzero on the first failing step."""
    try:
        report = run_script(load_script(script))
    except ScriptError as exc:
        raise click.ClickException(str(exc)) from exc
    emit(report)
    if not report["ok"]:
        sys.exit(1)


@main.command("repl")
@dataset_option
@seed_option
@with_k
def repl_command(dataset, seed, k_followup, k_new):
    """Interactive loop: type utterances, get charts and suggestions.

    Commands: :recs, :state, :undo, :quit.
    """
    d = resolve_dataset(dataset)
    state = ContextState(d)
    click.echo(f"{d.name}: {d.row_count} rows, {len(d.attributes)} attributes")

    def show_recommendations():
        recs = recommend(state, seed, k_followup, k_new)
        for section in ("deictics", "followups", "new_inquiries"):
            if recs[section]:
                click.echo(f"  {section.replace('_', ' ')}:")
                for r in recs[section]:
                    click.echo(f"    - {r['text']}")

    show_recommendations()
    while True:
        try:
            line = click.prompt("you", prompt_suffix="> ").strip()
        except (EOFError, click.Abort):
            break
        if not line:
            continue
        if line in (":quit", ":q"):
            break
        if line == ":state":
            emit(state.to_dict())
            continue
        if line == ":recs":
            show_recommendations()
            continue
        try:
            if line == ":undo":
                result = state.undo()
            else:
                result = state.apply_utterance(line)
        except StateError as exc:
            click.echo(f"  ! {exc}")
            continue
        for message in result.messages:
            click.echo(f"  · {message}")
        if result.transition is not None:
            click.echo(f"  transition: {result.transition.value}")
        if state.chart is not None:
            click.echo(f"  chart: {json.dumps(state.chart.to_dict())}")
        show_recommendations()


if __name__ == "__main__":
    main()
