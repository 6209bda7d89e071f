"""Operator command line: build pipeline artifacts, serve, move sessions.

Typical flow:

    supportlens ingest --dump dump.jsonl --out store/
    supportlens index --store store/
    supportlens label --store store/
    supportlens pairs --store store/
    supportlens serve --store store/ --port 8000

`report` renders figures and CSV tables for a corpus (optionally scoped
to a query) without starting the server. `session export/import` talk to
a running server over HTTP.
"""
from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from . import corpus as corpus_mod
from .config import AppConfig, load_config
from .corpus import CorpusStore
from .errors import ValidationError
from .labeling import HeuristicProvider, import_labels, label_all
from .search import SearchConfig, SearchIndex, build_index
from .similarity import DEFAULT_THRESHOLD, ExternalHttpProvider, compute_pairs
from .topics import DEFAULT_ITERATIONS, sweep_k


def _load_store(store_dir: str) -> CorpusStore:
    try:
        return CorpusStore.load(store_dir)
    except FileNotFoundError:
        raise click.ClickException(
            f"no corpus store under {store_dir}; run `supportlens ingest` first"
        )


@click.group()
def main():
    """Explore support-community corpora: search, topics, notes, questions."""


@main.command()
@click.option("--dump", "dump", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Newline-delimited JSON dump.")
@click.option("--out", "store_dir", default="store", show_default=True,
              type=click.Path(file_okay=False), help="Store directory to write.")
def ingest(dump: str, store_dir: str):
    """Ingest a newline-delimited JSON dump into a corpus store."""
    stats = corpus_mod.ingest(dump, store_dir)
    click.echo(f"posts: {stats.n_posts}")
    click.echo(f"comments: {stats.n_comments}")
    dropped = (stats.n_dropped_tombstone_id + stats.n_dropped_tombstone_body
               + stats.n_dropped_orphan + stats.n_dropped_empty)
    click.echo(f"dropped: {dropped} (tombstone id {stats.n_dropped_tombstone_id}, "
               f"tombstone body {stats.n_dropped_tombstone_body}, "
               f"orphan {stats.n_dropped_orphan}, empty {stats.n_dropped_empty})")
    if stats.n_malformed:
        click.echo(f"malformed lines skipped: {stats.n_malformed}")


@main.command()
@click.option("--store", "store_dir", default="store", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--out", "index_dir", default=None,
              help="Index directory; defaults to the store directory.")
def index(store_dir: str, index_dir: str | None):
    """Build the full-text search index."""
    store = _load_store(store_dir)
    path = build_index(store).save(index_dir or store_dir)
    click.echo(f"indexed {len(store)} posts -> {path}")


@main.command()
@click.option("--store", "store_dir", default="store", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--provider", "provider_kind", default="heuristic", show_default=True,
              type=click.Choice(["heuristic", "file"]))
@click.option("--labels", "label_file", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="CSV of id,direction,kind,level; rows not covered fall "
                   "back to the heuristic labeler.")
def label(store_dir: str, provider_kind: str, label_file: str | None):
    """Label support levels for every post and comment."""
    store = _load_store(store_dir)
    if provider_kind == "file":
        if not label_file:
            raise click.ClickException("--provider file requires --labels <csv>")
        try:
            provider = import_labels(label_file)
        except ValidationError as exc:
            raise click.ClickException(str(exc))
    else:
        provider = HeuristicProvider()
    try:
        labels = label_all(store, provider)
    except ValidationError as exc:
        raise click.ClickException(str(exc))
    path = labels.save(store_dir)
    click.echo(f"labeled with {provider.name} -> {path}")


@main.command()
@click.option("--store", "store_dir", default="store", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--threshold", default=DEFAULT_THRESHOLD, show_default=True,
              help="Cosine similarity cut-off.")
def pairs(store_dir: str, threshold: float):
    """Compute the similar-post pair set.

    Uses the builtin TF-IDF vectorizer unless EMBED_URL points at an
    external embedding service.
    """
    store = _load_store(store_dir)
    provider = ExternalHttpProvider() if os.environ.get("EMBED_URL") else None
    try:
        pair_set = compute_pairs(store, provider, threshold)
    except ValidationError as exc:
        raise click.ClickException(str(exc))
    path = pair_set.save(store_dir)
    click.echo(f"{len(pair_set.pairs)} pairs at threshold {threshold} -> {path}")


def _parse_k_range(text: str) -> list[int]:
    """Accept "2..6" (inclusive) or an explicit "2,3,4,5,6" list."""
    try:
        if ".." in text:
            lo_s, hi_s = text.split("..", 1)
            lo, hi = int(lo_s), int(hi_s)
            if lo < 1 or hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        ks = [int(v) for v in text.split(",") if v.strip()]
        if not ks or any(k < 1 for k in ks):
            raise ValueError
        return ks
    except ValueError:
        raise click.ClickException(f"bad --k-range: {text!r} (want e.g. 1..10)")


@main.command(name="sweep-k")
@click.option("--store", "store_dir", default="store", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--query", default="", help="Sweep only the posts matching a "
              "search query; empty sweeps the whole corpus.")
@click.option("--k-range", "k_range", default="2..6", show_default=True,
              help='Candidate topic counts, "lo..hi" inclusive.')
@click.option("--index", "index_dir", default=None,
              help="Index directory; defaults to the store directory.")
@click.option("--seed", default=7, show_default=True)
@click.option("--iterations", default=DEFAULT_ITERATIONS, show_default=True)
def sweep_k_command(store_dir: str, query: str, k_range: str,
                    index_dir: str | None, seed: int, iterations: int):
    """Report topic coherence for candidate k values."""
    store = _load_store(store_dir)
    ks = _parse_k_range(k_range)
    if query.strip():
        try:
            search_index = SearchIndex.load(index_dir or store_dir)
        except FileNotFoundError as exc:
            raise click.ClickException(str(exc))
        response = search_index.search(query, SearchConfig())
        post_ids = [r.post_id for r in response.results]
        docs = [(pid, store.get_post(pid)[0].text) for pid in post_ids]
        if not docs:
            raise click.ClickException(f"query {query!r} matched no posts")
    else:
        docs = [(p.id, p.text) for p in store.iter_posts()]
    try:
        rows = sweep_k(docs, ks, seed=seed, iterations=iterations)
    except ValidationError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"{'k':>4}  {'umass coherence':>16}")
    for k, coherence in rows:
        click.echo(f"{k:>4}  {coherence:>16.4f}")


@main.command()
@click.option("--port", default=None, type=int,
              help="Override the configured port.")
@click.option("--store", "store_dir", default="store", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--index", "index_dir", default=None,
              help="Index directory; defaults to the store directory.")
@click.option("--config", "config_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="TOML config file.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--static", "static_dir", default=None,
              type=click.Path(file_okay=False),
              help="Directory of web client assets to serve at /.")
def serve(port: int | None, store_dir: str, index_dir: str | None,
          config_path: str | None, host: str, static_dir: str | None):
    """Serve the exploration API."""
    from .server import AppState, serve as run_server

    try:
        config = load_config(config_path)
        if port is not None:
            config.port = port
        state = AppState.from_dirs(store_dir, index_dir, config,
                                   static_dir=static_dir)
    except (ValidationError, FileNotFoundError) as exc:
        raise click.ClickException(str(exc))
    click.echo(f"serving on http://{host}:{config.port}")
    run_server(state, host=host)


@main.command()
@click.option("--store", "store_dir", default="store", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--out", "out_dir", default="report", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--query", default="", help="Scope topic tables to a search.")
@click.option("--config", "config_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
def report(store_dir: str, out_dir: str, query: str, config_path: str | None):
    """Render CSV tables and figures for a corpus."""
    from .report import generate_report

    try:
        config = load_config(config_path)
        written = generate_report(store_dir, out_dir, query, config)
    except FileNotFoundError as exc:
        raise click.ClickException(
            f"{exc}; run the pipeline commands (ingest/index/label) first"
        )
    except ValidationError as exc:
        raise click.ClickException(str(exc))
    for path in written:
        click.echo(str(path))


@main.group()
def session():
    """Move session state (highlights, boards) between servers."""


@session.command("export")
@click.option("--server", "server_url", default="http://127.0.0.1:8000",
              show_default=True)
@click.option("--session", "token", required=True, help="Session token.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def session_export(server_url: str, token: str, out_path: str):
    """Download a session document to a file."""
    import httpx

    try:
        response = httpx.get(
            f"{server_url.rstrip('/')}/api/session/{token}/export", timeout=30.0
        )
        response.raise_for_status()
    except httpx.HTTPError as exc:
        raise click.ClickException(f"export failed: {exc}")
    Path(out_path).write_text(
        json.dumps(response.json(), indent=2, ensure_ascii=False) + "\n", "utf-8"
    )
    click.echo(out_path)


@session.command("import")
@click.option("--server", "server_url", default="http://127.0.0.1:8000",
              show_default=True)
@click.option("--file", "in_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
def session_import(server_url: str, in_path: str):
    """Create a new session from an exported document; prints its token."""
    import httpx

    document = json.loads(Path(in_path).read_text("utf-8"))
    try:
        response = httpx.post(
            f"{server_url.rstrip('/')}/api/session/import", json=document,
            timeout=30.0,
        )
        response.raise_for_status()
    except httpx.HTTPError as exc:
        raise click.ClickException(f"import failed: {exc}")
    click.echo(response.json()["session"])


if __name__ == "__main__":
    sys.exit(main())
