"""Command-line entry points mirroring the HTTP endpoints.

Each pipeline stage also gets its own console script (fedsim, persona,
socialrank, feed, vidquery) for standalone use; `fedfeed` bundles serving and
the end-to-end commands.
"""

from __future__ import annotations

import dataclasses
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import feedfilter, fedsim as fedsim_mod, persona as persona_mod, socialrank as socialrank_mod, vidquery as vidquery_mod
from .config import AppConfig
from .corpus import FeedbackEvent, load_corpus
from .gateway import ServiceState, create_app


def _echo_json(data) -> None:
    click.echo(json.dumps(data, indent=2, sort_keys=True))


def _state(corpus_path: str, log_path: str | None, config_path: str | None) -> ServiceState:
    config = AppConfig.resolve(config_path)
    log = log_path or str(Path(corpus_path).with_suffix(".log.jsonl"))
    return ServiceState.build(corpus_path, log, config)


# --- fedsim ---------------------------------------------------------------

@click.group()
def fedsim_cli():
    """Federated training simulator."""


@fedsim_cli.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def fedsim_run(config_path: str, out_path: str):
    """Run a simulation from a JSON config and write the per-round trace."""
    with open(config_path, encoding="utf-8") as fh:
        raw = json.load(fh)
    clients = raw.pop("clients", 4)
    dim = raw.pop("dim", 8)
    cfg = fedsim_mod.FedConfig(**raw)
    if cfg.loss_model != "quadratic":
        raise click.ClickException("standalone fedsim runs support the quadratic model")
    rng = np.random.default_rng(cfg.seed)
    shards = [
        fedsim_mod.QuadraticShard(
            client_id=i,
            center=rng.uniform(-5.0, 5.0, size=dim),
            n_k=int(rng.integers(1, 101)),
        )
        for i in range(clients)
    ]
    trace = fedsim_mod.run_simulation(shards, cfg)
    with open(out_path, "w", encoding="utf-8") as fh:
        for rec in trace.records:
            fh.write(json.dumps(dataclasses.asdict(rec)) + "\n")
    report = fedsim_mod.check_descent(trace, cfg) if cfg.rounds >= 1 else None
    _echo_json(
        {
            "rounds": cfg.rounds,
            "final_loss": trace.records[-1].loss,
            "descent": dataclasses.asdict(report) if report else None,
            "trace": out_path,
        }
    )


# --- persona --------------------------------------------------------------

@click.group()
def persona_cli():
    """Persona profiling."""


@persona_cli.command("build")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--user", "user_id", required=True)
@click.option("--weights", "weights_path", type=click.Path(exists=True))
def persona_build(corpus_path: str, user_id: str, weights_path: str | None):
    corpus = load_corpus(corpus_path)
    wts = persona_mod.ScoringWeights()
    if weights_path:
        with open(weights_path, encoding="utf-8") as fh:
            wts = persona_mod.ScoringWeights(**json.load(fh))
    profile = persona_mod.build_profile(user_id, corpus, wts)
    _echo_json(
        {
            "user_id": profile.user_id,
            "cold_start": profile.cold_start,
            "categories": {c: dataclasses.asdict(s) for c, s in profile.categories.items()},
            "affinities": profile.affinities,
        }
    )


# --- socialrank -----------------------------------------------------------

@click.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--user", "user_id", required=True)
def socialrank_cli(corpus_path: str, user_id: str):
    """Rank the user's friends by engagement."""
    corpus = load_corpus(corpus_path)
    ranking = socialrank_mod.rank_friends(user_id, corpus)
    _echo_json([dataclasses.asdict(fe) for fe in ranking])


# --- feed -----------------------------------------------------------------

@click.group()
def feed_cli():
    """Feed filtering."""


@feed_cli.command("build")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--user", "user_id", required=True)
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--now", type=int, default=None, help="Override the clock (UTC seconds).")
def feed_build(corpus_path: str, user_id: str, config_path: str | None, now: int | None):
    state = _state(corpus_path, None, config_path)
    feed = state.feed(user_id, state.clock(now))
    _echo_json([dataclasses.asdict(c) for c in feed])


# --- vidquery -------------------------------------------------------------

@click.group()
def vidquery_cli():
    """Video description indexing and querying."""


@vidquery_cli.command("index")
@click.option("--store", "store_path", required=True, type=click.Path())
@click.option("--video", "video_id", required=True)
@click.option("--description", required=True)
def vidquery_index(store_path: str, video_id: str, description: str):
    path = Path(store_path)
    store = vidquery_mod.NodeStore.load(path) if path.exists() else vidquery_mod.NodeStore()
    node_id = vidquery_mod.index_video(store, video_id, description)
    store.save(path)
    _echo_json({"node_id": node_id, "nodes": len(store)})


@vidquery_cli.command("ask")
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--video", "video_id", required=True)
@click.option("--question", required=True)
def vidquery_ask(store_path: str, video_id: str, question: str):
    store = vidquery_mod.NodeStore.load(store_path)
    result = vidquery_mod.answer_query(store, video_id, question)
    _echo_json(dataclasses.asdict(result))


# --- fedfeed --------------------------------------------------------------

@click.group()
def fedfeed_cli():
    """End-to-end service commands."""


@fedfeed_cli.command("serve")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--log", "log_path", type=click.Path())
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--port", type=int, default=8000)
@click.option("--host", default="127.0.0.1")
def fedfeed_serve(corpus_path, log_path, config_path, port, host):
    import uvicorn

    app = create_app(_state(corpus_path, log_path, config_path))
    uvicorn.run(app, host=host, port=port)


@fedfeed_cli.command("feed")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--log", "log_path", type=click.Path())
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--user", "user_id", required=True)
@click.option("--limit", type=int, default=20)
@click.option("--now", type=int, default=None)
def fedfeed_feed(corpus_path, log_path, config_path, user_id, limit, now):
    state = _state(corpus_path, log_path, config_path)
    feed = state.feed(user_id, state.clock(now))
    _echo_json([dataclasses.asdict(c) for c in feed[:limit]])


@fedfeed_cli.command("feedback")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--log", "log_path", type=click.Path())
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--user", "user_id", required=True)
@click.option("--post", "post_id", required=True)
@click.option("--verdict", type=click.Choice(["like", "dislike"]), required=True)
@click.option("--now", type=int, default=None)
def fedfeed_feedback(corpus_path, log_path, config_path, user_id, post_id, verdict, now):
    state = _state(corpus_path, log_path, config_path)
    if state.corpus.post(post_id) is None:
        raise click.ClickException(f"unknown post {post_id}")
    event = FeedbackEvent(
        user_id=user_id, post_id=post_id, verdict=verdict, occurred_at=state.clock(now)
    )
    affinities = state.record_feedback(event)
    _echo_json({"user_id": user_id, "affinities": affinities})


@fedfeed_cli.command("persona")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--log", "log_path", type=click.Path())
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--user", "user_id", required=True)
def fedfeed_persona(corpus_path, log_path, config_path, user_id):
    state = _state(corpus_path, log_path, config_path)
    profile = state.profile(user_id)
    _echo_json(
        {
            "user_id": user_id,
            "cold_start": profile.cold_start,
            "categories": {c: dataclasses.asdict(s) for c, s in profile.categories.items()},
            "affinities": state.user_affinities(user_id),
        }
    )


def main():  # pragma: no cover
    fedfeed_cli()


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
