"""Command-line pipeline: transactions, mining, inference, evaluation.

Every subcommand validates its whole configuration, including input paths,
before it writes any output.  Exit status 0 on success, 1 with a
diagnostic on pipeline errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from fractions import Fraction
from pathlib import Path

from .errors import XmrError
from .evaluation import (
    DEFAULT_GRID,
    EvalStream,
    evaluate,
    reference_labels,
    render_table,
    save_reports,
    threshold_sweep,
)
from .inference import infer_image, infer_stream, save_concepts
from .ingest import (
    AnnotationTable,
    FeatureTable,
    Vocabulary,
    build_vocabulary,
    load_annotations,
    load_features,
    load_vocabulary,
    save_vocabulary,
)
from .miner import mine_frequent
from .rules import RuleStore, generate_rules, load_store, merge_stores, save_store
from .transactions import (
    MiningParams,
    TEXT_MODES,
    build_database,
    build_image_transaction,
    load_database,
    save_database,
)

DEFAULT_TOP_K = 10
DEFAULT_SUPP_MIN = 3
DEFAULT_CONF_MIN = "0.6"
DEFAULT_FEATURE_DIM = 2048
DEFAULT_MIN_COUNT = 3
THREADS_ENV_VAR = "XMR_THREADS"


def _resolve_threads(flag_value: int | None) -> int:
    """--threads wins; otherwise the XMR_THREADS variable; otherwise 1."""
    if flag_value is not None:
        if flag_value < 1:
            raise XmrError(f"--threads must be >= 1, got {flag_value}")
        return flag_value
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise XmrError(f"{THREADS_ENV_VAR}={raw!r} is not an integer") from None
    if value < 1:
        raise XmrError(f"{THREADS_ENV_VAR} must be >= 1, got {value}")
    return value


def _parse_fraction(raw: str) -> Fraction:
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"{raw!r} is not a number") from exc


def _parse_grid(raw: str) -> list[tuple[int, Fraction]]:
    """Grid syntax: comma-separated supp:conf pairs, e.g. 3:0.6,3:0.7."""
    points = []
    for chunk in raw.split(","):
        chunk = chunk.strip()
        try:
            supp_text, conf_text = chunk.split(":")
            points.append((int(supp_text), Fraction(conf_text)))
        except (ValueError, ZeroDivisionError) as exc:
            raise XmrError(
                f"bad grid point {chunk!r}, expected supp:conf like 3:0.6"
            ) from exc
    return points


def _require_files(*paths) -> None:
    for path in paths:
        if path is not None and not Path(path).is_file():
            raise XmrError(f"input file not found: {path}")


def _load_or_build_vocab(args, annotations: AnnotationTable | None) -> Vocabulary:
    if args.vocab is not None:
        return load_vocabulary(args.vocab)
    if annotations is None:
        raise XmrError("need --vocab when no annotations are given")
    return build_vocabulary(annotations, min_count=args.min_count)


def _build_streams(
    annotations: AnnotationTable,
    features: FeatureTable,
    vocab: Vocabulary,
    top_k: int,
    text_mode: str,
) -> list[EvalStream]:
    """Group stories by their image-id tuple; stories sharing a photo
    stream pool their reference words under the first story's id."""
    order: list[tuple[str, ...]] = []
    stream_id: dict[tuple[str, ...], str] = {}
    refs: dict[tuple[str, ...], set[str]] = {}
    for story in annotations:
        key = story.image_ids()
        for image_id in key:
            if image_id not in features:
                raise XmrError(
                    f"annotated image {image_id!r} (story {story.story_id!r}) "
                    f"has no feature record"
                )
        if key not in refs:
            order.append(key)
            stream_id[key] = story.story_id
            refs[key] = set()
        refs[key] |= reference_labels(story, vocab, text_mode)
    streams = []
    for key in order:
        transactions = tuple(
            build_image_transaction(features[image_id], top_k, source_id=image_id)
            for image_id in key
        )
        streams.append(EvalStream(
            story_id=stream_id[key],
            transactions=transactions,
            reference=frozenset(refs[key]),
        ))
    return streams


def _sample_streams(
    streams: list[EvalStream], sample: int | None, seed: int
) -> list[EvalStream]:
    if sample is not None and sample < 1:
        raise XmrError(f"--sample must be >= 1, got {sample}")
    if sample is None or sample >= len(streams):
        return streams
    picked = random.Random(seed).sample(range(len(streams)), sample)
    return [streams[i] for i in sorted(picked)]


def _cmd_build_transactions(args) -> int:
    _require_files(args.features, args.annotations, args.vocab)
    annotations = load_annotations(args.annotations)
    vocab = _load_or_build_vocab(args, annotations)
    features = load_features(args.features, args.feature_dim)
    params = MiningParams(top_k=args.top_k)
    db = build_database(
        features, annotations, vocab,
        params, text_mode=args.text_mode, threads=args.threads,
    )
    save_database(db, args.out)
    if args.save_vocab:
        save_vocabulary(vocab, args.save_vocab)
    print(f"wrote {len(db)} transactions to {args.out}")
    return 0


def _cmd_mine(args) -> int:
    params = MiningParams(
        top_k=args.top_k,
        supp_min=args.min_support,
        conf_min=args.min_confidence,
        max_len=args.max_len,
    )
    if args.db is not None:
        if args.vocab is None:
            raise XmrError("--db requires --vocab (the database stores only its size)")
        _require_files(args.db, args.vocab)
        vocab = load_vocabulary(args.vocab)
        db = load_database(args.db, vocab)
    else:
        if args.features is None or args.annotations is None:
            raise XmrError("need --features and --annotations (or --db with --vocab)")
        _require_files(args.features, args.annotations, args.vocab)
        annotations = load_annotations(args.annotations)
        vocab = _load_or_build_vocab(args, annotations)
        features = load_features(args.features, args.feature_dim)
        db = build_database(
            features, annotations, vocab,
            params, text_mode=args.text_mode, threads=args.threads,
        )
    mining_floor = params.supp_min + 1 if args.strict_thresholds else params.supp_min
    freq = mine_frequent(db, mining_floor, max_len=params.max_len)
    tag = args.tag if args.tag is not None else Path(args.out).stem
    store = generate_rules(
        freq, params.conf_min, db.feature_dim, params.supp_min, vocab,
        tag=tag, strict=args.strict_thresholds, threads=args.threads,
    )
    save_store(store, args.out)
    print(f"wrote {len(store)} rules to {args.out}")
    return 0


def _cmd_infer(args) -> int:
    _require_files(args.rules, args.features, args.annotations)
    store = load_store(args.rules)
    features = load_features(args.features, store.feature_dim)
    concept_sets = []
    if args.annotations is not None:
        for story in load_annotations(args.annotations):
            transactions = []
            for img in story.images:
                if img.image_id not in features:
                    raise XmrError(
                        f"annotated image {img.image_id!r} (story "
                        f"{story.story_id!r}) has no feature record"
                    )
                transactions.append(build_image_transaction(
                    features[img.image_id], args.top_k, source_id=img.image_id
                ))
            concept_sets.append(infer_stream(story.story_id, transactions, store))
    else:
        for image_id, activation in features.entries.items():
            transaction = build_image_transaction(
                activation, args.top_k, source_id=image_id
            )
            concept_sets.append(infer_image(transaction, store))
    save_concepts(concept_sets, args.out, with_provenance=not args.no_provenance)
    print(f"wrote {len(concept_sets)} concept sets to {args.out}")
    return 0


def _cmd_eval(args) -> int:
    _require_files(args.rules, args.features, args.annotations, args.vocab)
    store = load_store(args.rules)
    annotations = load_annotations(args.annotations)
    vocab = _load_or_build_vocab(args, annotations)
    features = load_features(args.features, store.feature_dim)
    streams = _build_streams(annotations, features, vocab, args.top_k, args.text_mode)
    streams = _sample_streams(streams, args.sample, args.seed)
    inferences = [
        infer_stream(s.story_id, list(s.transactions), store) for s in streams
    ]
    report = evaluate(
        inferences,
        [(s.story_id, set(s.reference)) for s in streams],
        rule_count=len(store),
    )
    save_reports([report], args.out)
    if args.table:
        print(render_table([report]))
    print(f"wrote report for {report.n_streams} streams to {args.out}")
    return 0


def _cmd_sweep(args) -> int:
    _require_files(args.features, args.annotations, args.vocab)
    grid = _parse_grid(args.grid) if args.grid else list(DEFAULT_GRID)
    annotations = load_annotations(args.annotations)
    vocab = _load_or_build_vocab(args, annotations)
    features = load_features(args.features, args.feature_dim)
    db = build_database(
        features, annotations, vocab,
        MiningParams(top_k=args.top_k), text_mode=args.text_mode,
        threads=args.threads,
    )
    streams = _build_streams(annotations, features, vocab, args.top_k, args.text_mode)
    streams = _sample_streams(streams, args.sample, args.seed)
    reports = threshold_sweep(
        db, grid, streams,
        strict=args.strict_thresholds, threads=args.threads,
    )
    save_reports(reports, args.out)
    if args.table:
        print(render_table(reports))
    print(f"wrote {len(reports)} sweep rows to {args.out}")
    return 0


def _cmd_merge(args) -> int:
    if len(args.stores) < 2:
        raise XmrError("--in must be given at least twice")
    _require_files(*args.stores)
    merged = load_store(args.stores[0])
    for path in args.stores[1:]:
        merged = merge_stores(merged, load_store(path))
    save_store(merged, args.out)
    print(f"wrote {len(merged)} rules to {args.out}")
    return 0


def _add_threads_flag(parser) -> None:
    parser.add_argument("--threads", type=int, default=None,
                        help=f"worker threads (default: ${THREADS_ENV_VAR} or 1)")


def _add_common_data_flags(parser, with_mining: bool) -> None:
    parser.add_argument("--feature-dim", type=int, default=DEFAULT_FEATURE_DIM,
                        help="activation vector length (default %(default)s)")
    parser.add_argument("--top-k", type=int, default=DEFAULT_TOP_K,
                        help="activations kept per image (default %(default)s)")
    parser.add_argument("--text-mode", choices=TEXT_MODES, default="heuristic",
                        help="token preprocessing (default %(default)s)")
    parser.add_argument("--vocab", help="vocabulary JSON; built from the "
                        "annotations when omitted")
    parser.add_argument("--min-count", type=int, default=DEFAULT_MIN_COUNT,
                        help="minimum word frequency when building the "
                        "vocabulary (default %(default)s)")
    if with_mining:
        parser.add_argument("--min-support", type=int, default=DEFAULT_SUPP_MIN,
                            help="minimum support count (default %(default)s)")
        parser.add_argument("--min-confidence", type=_parse_fraction,
                            default=Fraction(DEFAULT_CONF_MIN),
                            help="minimum rule confidence (default 0.6)")
        parser.add_argument("--max-len", type=int, default=None,
                            help="cap on itemset size (default: none)")
        parser.add_argument("--strict-thresholds", action="store_true",
                            help="require support and confidence strictly "
                            "above the thresholds instead of at-or-above")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xmr",
        description="Cross-modal association rules between image activations "
        "and story words: mine, merge, infer, evaluate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-transactions",
                       help="join features with annotations into a "
                       "transaction database")
    p.add_argument("--features", required=True)
    p.add_argument("--annotations", required=True)
    _add_common_data_flags(p, with_mining=False)
    _add_threads_flag(p)
    p.add_argument("--save-vocab", help="also write the vocabulary used")
    p.add_argument("--out", required=True)
    p.set_defaults(run=_cmd_build_transactions)

    p = sub.add_parser("mine", help="mine cross-modal rules")
    p.add_argument("--features")
    p.add_argument("--annotations")
    p.add_argument("--db", help="pre-built transaction database "
                   "(alternative to --features/--annotations)")
    _add_common_data_flags(p, with_mining=True)
    _add_threads_flag(p)
    p.add_argument("--tag", default=None,
                   help="provenance tag (default: output file stem)")
    p.add_argument("--out", required=True)
    p.set_defaults(run=_cmd_mine)

    p = sub.add_parser("infer", help="infer concepts from image features")
    p.add_argument("--rules", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--annotations",
                   help="stories to infer per-stream; omit for per-image output")
    p.add_argument("--top-k", type=int, default=DEFAULT_TOP_K)
    p.add_argument("--no-provenance", action="store_true",
                   help="omit per-word rule provenance from the output")
    _add_threads_flag(p)
    p.add_argument("--out", required=True)
    p.set_defaults(run=_cmd_infer)

    p = sub.add_parser("eval", help="score a rule store against annotations")
    p.add_argument("--rules", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--top-k", type=int, default=DEFAULT_TOP_K)
    p.add_argument("--text-mode", choices=TEXT_MODES, default="heuristic")
    p.add_argument("--vocab", help="vocabulary JSON; built from the "
                   "annotations when omitted")
    p.add_argument("--min-count", type=int, default=DEFAULT_MIN_COUNT)
    p.add_argument("--sample", type=int, default=None,
                   help="evaluate on this many sampled streams")
    p.add_argument("--seed", type=int, default=0, help="sampling seed")
    p.add_argument("--table", action="store_true", help="print a text table")
    _add_threads_flag(p)
    p.add_argument("--out", required=True)
    p.set_defaults(run=_cmd_eval)

    p = sub.add_parser("sweep", help="mine and evaluate over a threshold grid")
    p.add_argument("--features", required=True)
    p.add_argument("--annotations", required=True)
    _add_common_data_flags(p, with_mining=False)
    p.add_argument("--grid", default=None,
                   help="comma-separated supp:conf pairs "
                   "(default 10:0.6,5:0.6,3:0.6,3:0.7,3:0.8)")
    p.add_argument("--strict-thresholds", action="store_true")
    p.add_argument("--sample", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--table", action="store_true")
    _add_threads_flag(p)
    p.add_argument("--out", required=True)
    p.set_defaults(run=_cmd_sweep)

    p = sub.add_parser("merge", help="merge rule stores")
    p.add_argument("--in", dest="stores", action="append", required=True,
                   help="input store (give at least twice)")
    _add_threads_flag(p)
    p.add_argument("--out", required=True)
    p.set_defaults(run=_cmd_merge)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.threads = _resolve_threads(args.threads)
        return args.run(args)
    except (XmrError, ValueError, OSError) as exc:
        print(f"xmr: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
