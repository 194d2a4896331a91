"""Command-line driver.

    wikivote build-kb --kb raw.tsv --out kb.tsv
    wikivote extract  --kb kb.tsv --records recs.tsv --out concepts.tsv
    wikivote collect  --kb kb.tsv --records recs.tsv --backend offline:docs.tsv --out cdors.tsv
    wikivote train    --kb kb.tsv --records train.tsv --model model.txt [--mode ec --backend ...]
    wikivote predict  --kb kb.tsv --records test.tsv --model model.txt --out preds.tsv
    wikivote eval     --kb kb.tsv --records test.tsv --model model.txt

Set WIKIVOTE_LOG=DEBUG (or INFO, ...) for progress logging on stderr.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile

from . import __version__
from .cdor import (
    DEFAULT_CDORS,
    DEFAULT_TOP_K,
    EmptyResults,
    NoClassifiedConcepts,
    OfflineBackend,
    format_cdor_cache,
    load_cdor_cache,
    load_corpus,
)
from .classify import DEFAULT_ALPHA, evaluate_map, format_model, load_model
from .extract import load_records, load_rules
from .kb import load_kb, serialize_kb
from .pipeline import Pipeline, categories_of

log = logging.getLogger("wikivote")


class CliError(Exception):
    pass


def write_atomic(path: str, text: str) -> None:
    """Write via a temp file in the target directory and rename over ``path``."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".wikivote-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(args, text: str) -> None:
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def open_backend(spec: str | None):
    if not spec:
        return None
    kind, sep, path = spec.partition(":")
    if not sep or not path:
        raise CliError(f"bad --backend {spec!r}; expected offline:<corpus> or fixture:<cache>")
    try:
        if kind == "offline":
            return OfflineBackend(load_corpus(path))
        if kind == "fixture":
            return load_cdor_cache(path)
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot construct backend {spec!r}: {exc}") from exc
    raise CliError(f"unknown backend kind {kind!r}")


def require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise CliError(f"--{name.replace('_', '-')} is required for '{args.command}'")


def make_pipeline(args, needs_source=False) -> Pipeline:
    require(args, "kb", "records")
    source = open_backend(args.backend)
    if (needs_source or args.mode == "ec") and source is None:
        raise CliError(f"'{args.command}' in {args.mode} mode needs --backend")
    return Pipeline(
        kb=load_kb(args.kb),
        rules=load_rules(args.rules),
        mode=args.mode,
        source=source,
        top_k=args.top_k,
        default_cdors=args.default_cdors,
        alpha=args.alpha,
    )


def cmd_build_kb(args) -> int:
    require(args, "kb")
    kb = load_kb(args.kb)
    log.info("loaded %d concepts (max %d words)", len(kb), kb.max_concept_words)
    emit(args, serialize_kb(kb))
    return 0


def cmd_extract(args) -> int:
    pipe = make_pipeline(args)
    lines = []
    for record in load_records(args.records):
        pairs = [f"{c.concept_class.value}:{c.surface}" for c in pipe.raw_concepts(record)]
        lines.append("\t".join([record.id, *pairs]) + "\n")
    emit(args, "".join(lines))
    return 0


def cmd_collect(args) -> int:
    require(args, "out")
    pipe = make_pipeline(args, needs_source=True)
    sets, skipped = [], []
    for record in load_records(args.records):
        try:
            sets.append(pipe.collect(record))
        except (NoClassifiedConcepts, EmptyResults) as exc:
            log.info("skipping %s: %s", record.id, exc)
            skipped.append(record.id)
    write_atomic(args.out, format_cdor_cache(sets))
    write_atomic(args.out + ".skipped", "".join(f"{rid}\n" for rid in skipped))
    log.info("collected CDORs for %d records, skipped %d", len(sets), len(skipped))
    return 0


def cmd_train(args) -> int:
    require(args, "model")
    pipe = make_pipeline(args)
    records = load_records(args.records)
    model = pipe.train(records, categories_of(records))
    write_atomic(args.model, format_model(model))
    log.info("trained on %d records, %d tokens", len(records), len(model.stats))
    return 0


def _check_labels(records, model):
    extra = sorted({r.label for r in records if r.label is not None} - set(model.categories))
    if extra:
        raise CliError(f"corpus labels not in model categories: {', '.join(extra)}")


def cmd_predict(args) -> int:
    require(args, "model")
    pipe = make_pipeline(args)
    model = load_model(args.model)
    records = load_records(args.records)
    _check_labels(records, model)
    lines = []
    for p in pipe.predict(records, model):
        scores = ",".join(repr(s) for s in p.scores)
        lines.append(f"{p.record_id}\t{p.predicted or '-'}\t{scores}\n")
    emit(args, "".join(lines))
    return 0


def cmd_eval(args) -> int:
    require(args, "model")
    pipe = make_pipeline(args)
    model = load_model(args.model)
    records = load_records(args.records)
    _check_labels(records, model)
    report = evaluate_map(pipe.predict(records, model), model.categories)
    text = report.format()
    sys.stdout.write(text)
    if args.out:
        write_atomic(args.out, text)
    return 0


COMMANDS = {
    "build-kb": cmd_build_kb,
    "extract": cmd_extract,
    "collect": cmd_collect,
    "train": cmd_train,
    "predict": cmd_predict,
    "eval": cmd_eval,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kb", help="KB flat file")
    common.add_argument("--rules", help="classifier rules override file")
    common.add_argument("--records", help="records file")
    common.add_argument("--backend", help="offline:<corpus-path> or fixture:<cache-path>")
    common.add_argument("--model", help="model file")
    common.add_argument("--out", help="output file (stdout if omitted, where allowed)")
    common.add_argument("--mode", choices=("rc", "ec"), default="rc")
    common.add_argument("--top-k", type=int, default=DEFAULT_TOP_K)
    common.add_argument("--default-cdors", type=int, default=DEFAULT_CDORS)
    common.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)

    parser = argparse.ArgumentParser(prog="wikivote", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def configure_logging() -> None:
    level = logging.getLevelName(os.environ.get("WIKIVOTE_LOG", "WARNING").upper())
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    log.setLevel(level)


def main(argv=None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (CliError, OSError, ValueError) as exc:
        print(f"wikivote {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
