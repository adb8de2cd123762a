"""Command line entry points: REPL, HTTP server, theory dump, direct query."""

from __future__ import annotations

import logging
import os
import sys
from importlib import resources

import click

from .dialog import DialogEngine, build_engine
from .errors import DialogError
from .solver import display_constant, eval_query, load_facts, parse_query
from .translate import theory_text

LOG_LEVELS = {"off": None, "transcript": logging.INFO, "debug": logging.DEBUG}


def configure_logging() -> None:
    mode = os.environ.get("DIALOG_LOG", "off").lower()
    if mode not in LOG_LEVELS:
        mode = "off"
    level = LOG_LEVELS[mode]
    logger = logging.getLogger("dialog")
    logger.handlers.clear()
    if level is None:
        logger.addHandler(logging.NullHandler())
        return
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(handler)
    logger.setLevel(level)


def _default_path(name: str) -> str:
    return str(resources.files("dialogcore").joinpath("data", name))


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_engine(domain: str, facts: str) -> DialogEngine:
    try:
        return build_engine(_read(domain), _read(facts))
    except (OSError, DialogError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


domain_option = click.option(
    "--domain",
    default=None,
    help="Domain declaration file (defaults to the bundled train timetable).",
)
facts_option = click.option(
    "--facts",
    default=None,
    help="Fact file (defaults to the bundled train timetable).",
)


@click.group()
def main() -> None:
    """Dialog engine for definitional domains over partial information."""
    configure_logging()


@main.command()
@domain_option
@facts_option
def repl(domain: str | None, facts: str | None) -> None:
    """Interactive dialog loop on stdin/stdout."""
    engine = _load_engine(domain or _default_path("trains.domain"),
                          facts or _default_path("trains.facts"))
    state = engine.fresh_state()
    echo_input = not sys.stdin.isatty()
    while True:
        try:
            line = input("user> " if not echo_input else "")
        except EOFError:
            break
        if echo_input:
            click.echo(f"user> {line}")
        line = line.strip()
        if not line:
            continue
        if line == ":quit":
            break
        if line == ":state":
            for goal in state.agenda:
                for var, sort in goal.var_sorts.items():
                    click.echo(f"goal: {goal.origin_role} {var}:{sort}")
            if not state.agenda:
                click.echo("no open goals")
            for pred, tuples in sorted(state.shared.plus.items()):
                for row in sorted(tuples):
                    click.echo(f"shared+ {pred}({', '.join(row)})")
            for pred, tuples in sorted(state.shared.minus.items()):
                for row in sorted(tuples):
                    click.echo(f"shared- {pred}({', '.join(row)})")
            continue
        state, action = engine.interpret_turn(line, state)
        click.echo(f"system[{action.act}]> {action.text}")


@main.command()
@domain_option
@facts_option
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(domain: str | None, facts: str | None, host: str, port: int) -> None:
    """Run the HTTP dialog service."""
    import uvicorn

    from .service import create_app

    engine = _load_engine(domain or _default_path("trains.domain"),
                          facts or _default_path("trains.facts"))
    uvicorn.run(create_app(engine), host=host, port=port)


@main.command()
@domain_option
def translate(domain: str | None) -> None:
    """Print the logical theory for a domain's definitions."""
    from .dl import load_terminology
    from .translate import translate_terminology

    try:
        terminology = load_terminology(_read(domain or _default_path("trains.domain")))
    except (OSError, DialogError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    click.echo(theory_text(translate_terminology(terminology)))


@main.command()
@click.argument("query_text")
@domain_option
@facts_option
def query(query_text: str, domain: str | None, facts: str | None) -> None:
    """Evaluate a conjunctive query against the fact base.

    QUERY_TEXT is '&'-separated atoms, e.g. 'At(t, x) & To(t, Rome)'.
    Lowercase terms not present in the fact base are variables.
    """
    from .dl import load_terminology

    try:
        terminology = load_terminology(_read(domain or _default_path("trains.domain")))
        fact_base = load_facts(_read(facts or _default_path("trains.facts")),
                               terminology)
    except (OSError, DialogError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    try:
        parsed = parse_query(query_text, fact_base)
        rows = eval_query(parsed, fact_base, terminology)
    except DialogError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    if not rows:
        click.echo("no results")
        return
    for row in rows:
        click.echo("\t".join(display_constant(row[v]) for v in parsed.answer_vars))


if __name__ == "__main__":
    main()
