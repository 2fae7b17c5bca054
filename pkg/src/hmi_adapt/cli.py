"""Command-line pipeline driver.

Stages hand data to each other through files (JSONL logs and corpora, JSON
models and reports), so every stage can be rerun or inspected on its own.
All randomness flows from ``--seed``; rerunning any subcommand with the
same inputs and flags reproduces its output files byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Optional

from .events import load_vocabulary, save_vocabulary, ingest_event_log, write_event_log
from .evaluation import compare_orders, render_report_table, save_report
from .markov import (
    DEFAULT_MIN_SUPPORT,
    build_context_store,
    model_to_doc,
    save_snapshot,
    store_to_doc,
    train_markov,
)
from .sequences import corpus_stats, extract_corpus, read_corpus, write_corpus
from .service import ServiceConfig, create_app
from .simulate import (
    default_simulation_config,
    default_vocabulary,
    generate_interaction_log,
    simulation_sidecar,
)

_DEFAULTS = {
    "order": 2,
    "k": 3,
    "seed": 7,
    "context_mode": True,
    "backoff": True,
    "min_support": DEFAULT_MIN_SUPPORT,
    "user_count": 24,
    "sequences_per_user": 50,
    "memory_order": 2,
    "noise_rate": 0.1,
    "host": "127.0.0.1",
    "port": 8000,
}


class CliError(Exception):
    """Domain failure that should exit with status 1."""


def _load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    file = Path(path)
    if not file.exists():
        raise CliError(f"config file not found: {file}")
    try:
        loaded = json.loads(file.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CliError(f"config file is not valid JSON: {file}: {exc}") from exc
    if not isinstance(loaded, dict):
        raise CliError(f"config file must hold a JSON object: {file}")
    return loaded


def _setting(args: argparse.Namespace, config: dict, key: str):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return _DEFAULTS[key]


def _require_file(path: str, what: str) -> Path:
    file = Path(path)
    if not file.exists():
        raise CliError(f"{what} not found: {file}")
    return file


def _vocabulary_for(args: argparse.Namespace, config: dict, required: bool):
    path = getattr(args, "vocab", None) or config.get("vocabulary")
    if path is None:
        if required:
            raise CliError("a vocabulary file is required (--vocab or config 'vocabulary')")
        return None
    return load_vocabulary(str(_require_file(path, "vocabulary file")))


def _write_json(doc: dict, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fp:
        json.dump(doc, fp, indent=2, sort_keys=True)
        fp.write("\n")


def _truth_path(out: Path) -> Path:
    return out.with_name(out.stem + ".truth.json")


def _cmd_vocab(args: argparse.Namespace, config: dict) -> int:
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_vocabulary(default_vocabulary(), str(out))
    print(f"wrote vocabulary: {out}")
    return 0


def _cmd_simulate(args: argparse.Namespace, config: dict) -> int:
    seed = int(_setting(args, config, "seed"))
    sim = default_simulation_config(
        seed=seed,
        user_count=int(config.get("user_count", _DEFAULTS["user_count"])),
        sequences_per_user=int(
            config.get("sequences_per_user", _DEFAULTS["sequences_per_user"])
        ),
        memory_order=int(config.get("memory_order", _DEFAULTS["memory_order"])),
        noise_rate=float(config.get("noise_rate", _DEFAULTS["noise_rate"])),
    )
    log = generate_interaction_log(sim)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    events = [event for user in sorted(log) for event in log[user]]
    write_event_log(events, str(out))
    _write_json(simulation_sidecar(sim), _truth_path(out))
    print(f"wrote {len(events)} events for {sim.user_count} users: {out}")
    return 0


def _cmd_extract(args: argparse.Namespace, config: dict) -> int:
    vocabulary = _vocabulary_for(args, config, required=True)
    log_path = _require_file(args.log, "event log")
    with open(log_path, encoding="utf-8") as fp:
        result = ingest_event_log(fp, vocabulary, strict=False)
    corpus, stats = extract_corpus(result.events_by_user, vocabulary)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_corpus(corpus, str(out))
    summary = {
        "events_ingested": result.event_count,
        "records_skipped": result.skipped,
        "extraction": asdict(stats),
        "corpus": asdict(corpus_stats(corpus)),
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def _cmd_train(args: argparse.Namespace, config: dict) -> int:
    vocabulary = _vocabulary_for(args, config, required=False)
    corpus = read_corpus(str(_require_file(args.corpus, "sequence corpus")))
    if not corpus:
        raise CliError("sequence corpus is empty")
    order = int(_setting(args, config, "order"))
    context_mode = bool(_setting(args, config, "context_mode"))
    min_support = int(_setting(args, config, "min_support"))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if context_mode:
        store = build_context_store(
            corpus, order, min_support=min_support, vocabulary=vocabulary
        )
        save_snapshot(store_to_doc(store), str(out))
        tiers = len(store.per_context) + len(store.per_role) + 1
        print(f"trained order-{order} store ({tiers} models) on {len(corpus)} sequences: {out}")
    else:
        model = train_markov(corpus, order, vocabulary=vocabulary)
        save_snapshot(model_to_doc(model), str(out))
        print(f"trained order-{order} model on {len(corpus)} sequences: {out}")
    return 0


def _run_comparison(args: argparse.Namespace, config: dict, orders: list[int]) -> int:
    vocabulary = _vocabulary_for(args, config, required=False)
    corpus = read_corpus(str(_require_file(args.corpus, "sequence corpus")))
    if not corpus:
        raise CliError("sequence corpus is empty")
    comparison = compare_orders(
        corpus,
        orders,
        k=int(_setting(args, config, "k")),
        context_mode=bool(_setting(args, config, "context_mode")),
        min_support=int(_setting(args, config, "min_support")),
        backoff=bool(_setting(args, config, "backoff")),
        vocabulary=vocabulary,
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_report(comparison, str(out))
    sys.stdout.write(render_report_table(comparison))
    return 0


def _cmd_evaluate(args: argparse.Namespace, config: dict) -> int:
    order = int(_setting(args, config, "order"))
    return _run_comparison(args, config, [order])


def _cmd_compare(args: argparse.Namespace, config: dict) -> int:
    raw = args.orders if args.orders is not None else config.get("orders", "1,2,3")
    try:
        orders = sorted({int(token) for token in str(raw).split(",") if token.strip()})
    except ValueError as exc:
        raise CliError(f"--orders must be a comma-separated list of integers: {raw!r}") from exc
    if not orders or any(order < 1 for order in orders):
        raise CliError(f"--orders must name orders >= 1: {raw!r}")
    return _run_comparison(args, config, orders)


def _cmd_serve(args: argparse.Namespace, config: dict) -> int:
    vocabulary = _vocabulary_for(args, config, required=True)
    store_path = Path(args.store or config.get("store", "events.jsonl"))
    service_config = ServiceConfig(
        vocabulary=vocabulary,
        store_path=store_path,
        default_order=int(_setting(args, config, "order")),
        default_context_mode=bool(_setting(args, config, "context_mode")),
        default_min_support=int(_setting(args, config, "min_support")),
        default_k=int(_setting(args, config, "k")),
        surface_end_marker=bool(config.get("surface_end_marker", True)),
    )
    app = create_app(service_config)
    import uvicorn

    uvicorn.run(app, host=str(_setting(args, config, "host")), port=int(_setting(args, config, "port")))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hmi-adapt",
        description="Next-action prediction pipeline for industrial HMI interaction logs.",
    )
    parser.add_argument("--config", help="JSON config file; flags override its keys")
    sub = parser.add_subparsers(dest="command")

    def common(p: argparse.ArgumentParser, *names: str) -> None:
        if "order" in names:
            p.add_argument("--order", type=int)
        if "k" in names:
            p.add_argument("--k", type=int)
        if "seed" in names:
            p.add_argument("--seed", type=int)
        if "context_mode" in names:
            p.add_argument(
                "--context-mode", dest="context_mode", action=argparse.BooleanOptionalAction
            )
        if "backoff" in names:
            p.add_argument("--backoff", action=argparse.BooleanOptionalAction)
        if "min_support" in names:
            p.add_argument("--min-support", dest="min_support", type=int)
        if "vocab" in names:
            p.add_argument("--vocab", help="vocabulary JSON file")

    p = sub.add_parser("vocab", help="write the default control-panel vocabulary")
    p.add_argument("--out", default="vocabulary.json")
    p.set_defaults(func=_cmd_vocab)

    p = sub.add_parser("simulate", help="generate a synthetic interaction log")
    common(p, "seed")
    p.add_argument("--out", default="events.jsonl")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("extract", help="turn an event log into a sequence corpus")
    common(p, "vocab")
    p.add_argument("log", help="event log (JSONL)")
    p.add_argument("--out", default="corpus.jsonl")
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("train", help="train a model snapshot from a corpus")
    common(p, "order", "context_mode", "min_support", "vocab")
    p.add_argument("corpus", help="sequence corpus (JSONL)")
    p.add_argument("--out", default="model.json")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", help="hold out each user's last run and score one order")
    common(p, "order", "k", "context_mode", "backoff", "min_support", "vocab")
    p.add_argument("corpus", help="sequence corpus (JSONL)")
    p.add_argument("--out", default="report.json")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("compare", help="score several chain orders on one split")
    common(p, "k", "context_mode", "backoff", "min_support", "vocab")
    p.add_argument("corpus", help="sequence corpus (JSONL)")
    p.add_argument("--orders", help="comma-separated orders, e.g. 1,2,3")
    p.add_argument("--out", default="report.json")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("serve", help="run the recommendation service")
    common(p, "order", "k", "context_mode", "min_support", "vocab")
    p.add_argument("--store", help="event store path (JSONL)")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "func", None) is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        config = _load_config(args.config)
        return args.func(args, config)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())
