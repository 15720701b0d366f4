"""Command-line entry points.

    entail-ie serve --schema samples/schema.json --backend mock:samples/oracle.json
    entail-ie run   --schema ... [--mode e2e|task --task NER] [--out DIR|FILE] input.txt...
    entail-ie eval  --task NER --gold gold.conll (--pred preds.json | --live --schema ...)
    entail-ie tune-threshold --task NER --gold gold.json (--pred scored.json | --live ...)

Exit codes: 0 success, 1 at least one document failed, 2 configuration or
format error. Machine-readable output goes to stdout (or ``--out``);
diagnostics and tables go to stderr.

The backend flag accepts ``mock:<oracle-file>`` (default ``mock:`` = everything
neutral) or ``http:<url>``; the ``ENTAIL_IE_BACKEND`` and ``ENTAIL_IE_TAGGER``
environment variables override the config-file defaults when no flag is given.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from .backends import BackendError, OracleFormatError, make_backend
from .evaluate import (
    CorpusFormatError,
    DocumentMismatchError,
    GoldCorpus,
    annotation_items,
    corpus_keys,
    load_conll,
    load_corpus_json,
    load_scored_items,
    score_keys,
    score_task,
    tune_threshold,
)
from .pipeline import (
    MODE_E2E,
    MODE_TASK,
    TASKS,
    ConfigurationError,
    RunConfig,
    resolve_gold,
    run_e2e,
    run_task,
)
from .preprocess import make_tagger, preprocess
from .schema import SchemaParseError, SchemaValidationError, load_schema

EXIT_OK = 0
EXIT_DOC_FAILED = 1
EXIT_CONFIG = 2


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_CONFIG


def _load_schema_file(path: str):
    try:
        return load_schema(Path(path).read_bytes())
    except FileNotFoundError:
        raise ConfigurationError(f"schema file not found: {path}") from None
    except (SchemaParseError, SchemaValidationError) as exc:
        raise ConfigurationError(f"schema file {path}: {exc}") from None


def _build_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig.from_file(args.config) if getattr(args, "config", None) else RunConfig()
    updates = {}
    backend = getattr(args, "backend", None) or os.environ.get("ENTAIL_IE_BACKEND")
    tagger = getattr(args, "tagger", None) or os.environ.get("ENTAIL_IE_TAGGER")
    if backend:
        updates["backend"] = backend
    if tagger:
        updates["tagger"] = tagger
    if getattr(args, "threshold", None) is not None:
        updates["threshold"] = args.threshold
    if getattr(args, "jobs", None) is not None:
        updates["jobs"] = args.jobs
    return dataclasses.replace(config, **updates) if updates else config


def _load_gold_corpus(path: str) -> GoldCorpus:
    data = Path(path).read_bytes()
    if path.endswith((".conll", ".iob", ".txt")):
        return load_conll(data)
    return load_corpus_json(data)


# --- run ----------------------------------------------------------------------


def cmd_run(args: argparse.Namespace) -> int:
    try:
        schema = _load_schema_file(args.schema)
        config = _build_config(args)
        backend = make_backend(config.backend, max_batch=config.max_batch)
        tagger = make_tagger(config.tagger)
        gold_data = json.loads(Path(args.gold).read_text(encoding="utf-8")) if args.gold else None
        if gold_data is not None and len(args.inputs) > 1:
            raise ConfigurationError("--gold only applies to a single input file")
        out = Path(args.out) if args.out else None
        if out is not None and len(args.inputs) > 1 and not out.is_dir():
            out.mkdir(parents=True, exist_ok=True)
    except (ConfigurationError, OracleFormatError, ValueError, OSError) as exc:
        return _fail(str(exc))

    failed = 0
    for input_path in args.inputs:
        try:
            text = Path(input_path).read_text(encoding="utf-8").rstrip("\n")
        except OSError as exc:
            return _fail(str(exc))
        try:
            if args.mode == MODE_TASK:
                gold = None
                if gold_data is not None:
                    gold = resolve_gold(gold_data, preprocess(text, tagger))
                annotations = run_task(args.task, text, gold, schema, config, backend, tagger)
            else:
                annotations = run_e2e(text, schema, config, backend, tagger)
        except ConfigurationError as exc:
            return _fail(str(exc))
        if annotations.incomplete:
            print(f"error: {input_path}: {annotations.error}", file=sys.stderr)
            failed += 1
        payload = json.dumps(annotations.to_dict(), indent=2, ensure_ascii=False)
        if out is None:
            print(payload)
        elif out.is_dir():
            (out / (Path(input_path).stem + ".json")).write_text(payload + "\n", encoding="utf-8")
        else:
            out.write_text(payload + "\n", encoding="utf-8")
    return EXIT_DOC_FAILED if failed else EXIT_OK


# --- eval -----------------------------------------------------------------------


def _live_items(gold: GoldCorpus, args: argparse.Namespace, task: str) -> list:
    """Run the pipeline over each gold sentence and collect scored items."""
    schema = _load_schema_file(args.schema)
    config = _build_config(args)
    backend = make_backend(config.backend, max_batch=config.max_batch)
    tagger = make_tagger(config.tagger)
    items = []
    for doc in gold.documents:
        doc_items = []
        for si, sentence in enumerate(doc.sentences):
            annotations = run_e2e(sentence, schema, config, backend, tagger)
            if annotations.incomplete:
                raise BackendError(annotations.error or "incomplete run")
            ann = annotations.to_dict()
            for key, score in annotation_items(doc.doc_id, ann, task):
                # The per-sentence run indexes everything as sentence 0.
                doc_items.append(((key[0], si, *key[2:]), score))
        items.extend(doc_items)
    return items


def cmd_eval(args: argparse.Namespace) -> int:
    if args.task not in TASKS:
        return _fail(f"task must be one of {list(TASKS)}")
    try:
        gold = _load_gold_corpus(args.gold)
    except (OSError, CorpusFormatError) as exc:
        return _fail(str(exc))
    try:
        if args.pred:
            predictions = load_corpus_json(Path(args.pred).read_bytes())
            report = score_task(predictions, gold, args.task)
        elif args.live:
            items = _live_items(gold, args, args.task)
            report = score_keys([k for k, _ in items], corpus_keys(gold, args.task), args.task)
        else:
            return _fail("need --pred or --live")
    except (OSError, CorpusFormatError, DocumentMismatchError, ConfigurationError, BackendError) as exc:
        return _fail(str(exc))
    payload = json.dumps(report.to_dict(), indent=2)
    if args.out:
        Path(args.out).write_text(payload + "\n", encoding="utf-8")
    else:
        print(payload)
    print(report.to_text(), file=sys.stderr)
    return EXIT_OK


# --- tune-threshold ---------------------------------------------------------------


def cmd_tune(args: argparse.Namespace) -> int:
    if args.task not in TASKS:
        return _fail(f"task must be one of {list(TASKS)}")
    try:
        gold = _load_gold_corpus(args.gold)
        if args.pred:
            items = load_scored_items(Path(args.pred).read_bytes(), args.task)
        elif args.live:
            items = _live_items(gold, args, args.task)
        else:
            return _fail("need --pred or --live")
        best, report = tune_threshold(items, corpus_keys(gold, args.task), args.task, step=args.step)
    except (OSError, CorpusFormatError, ConfigurationError, BackendError, ValueError) as exc:
        return _fail(str(exc))
    payload = json.dumps({"best_threshold": best, "report": report.to_dict()}, indent=2)
    if args.out:
        Path(args.out).write_text(payload + "\n", encoding="utf-8")
    else:
        print(payload)
    print(f"best threshold: {best:.2f}", file=sys.stderr)
    print(report.to_text(), file=sys.stderr)
    return EXIT_OK


# --- serve ------------------------------------------------------------------------


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    try:
        schema = _load_schema_file(args.schema) if args.schema else None
        config = _build_config(args)
        ui_dir = args.ui_dir
        if ui_dir is None:
            default_ui = Path(__file__).resolve().parents[2] / "frontend" / "dist"
            ui_dir = default_ui if default_ui.is_dir() else None
    except ConfigurationError as exc:
        return _fail(str(exc))
    app = create_app(schema=schema, config=config, data_dir=args.data_dir, ui_dir=ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


# --- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entail-ie", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, schema_required: bool = True) -> None:
        p.add_argument("--schema", required=schema_required, help="schema JSON file")
        p.add_argument("--config", help="run config JSON file")
        p.add_argument("--backend", help="mock:<oracle-file> or http:<url>")
        p.add_argument("--tagger", help="builtin or http:<url>")
        p.add_argument("--threshold", type=float, help="decision threshold override")
        p.add_argument("--jobs", type=int, help="parallel workers within a stage")

    p_run = sub.add_parser("run", help="annotate text files")
    common(p_run)
    p_run.add_argument("--mode", choices=[MODE_E2E, MODE_TASK], default=MODE_E2E)
    p_run.add_argument("--task", choices=list(TASKS), help="task for --mode task")
    p_run.add_argument("--gold", help="gold spans JSON for task mode")
    p_run.add_argument("--out", help="output file (single input) or directory")
    p_run.add_argument("inputs", nargs="+", help="UTF-8 text files, one document each")
    p_run.set_defaults(func=cmd_run)

    p_eval = sub.add_parser("eval", help="score predictions against a gold corpus")
    common(p_eval, schema_required=False)
    p_eval.add_argument("--task", required=True, choices=list(TASKS))
    p_eval.add_argument("--gold", required=True, help="gold corpus (.conll or corpus JSON)")
    p_eval.add_argument("--pred", help="predictions in corpus JSON format")
    p_eval.add_argument("--live", action="store_true", help="run the pipeline over the gold sentences")
    p_eval.add_argument("--out", help="write the JSON report here instead of stdout")
    p_eval.set_defaults(func=cmd_eval)

    p_tune = sub.add_parser("tune-threshold", help="grid-search the decision threshold on a dev set")
    common(p_tune, schema_required=False)
    p_tune.add_argument("--task", required=True, choices=list(TASKS))
    p_tune.add_argument("--gold", required=True)
    p_tune.add_argument("--pred", help="scored predictions in corpus JSON format (records carry 'score')")
    p_tune.add_argument("--live", action="store_true")
    p_tune.add_argument("--step", type=float, default=0.01)
    p_tune.add_argument("--out", help="write the JSON result here instead of stdout")
    p_tune.set_defaults(func=cmd_tune)

    p_serve = sub.add_parser("serve", help="start the workbench HTTP service")
    common(p_serve, schema_required=False)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--data-dir", help="directory for per-session label logs")
    p_serve.add_argument("--ui-dir", help="built frontend assets to serve at /ui")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run" and args.mode == MODE_TASK and not args.task:
        return _fail("--mode task requires --task")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
