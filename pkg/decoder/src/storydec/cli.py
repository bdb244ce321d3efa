"""Command-line pipeline: synthesize a corpus, train, generate.

Exit status 0 on success, 1 with a diagnostic on pipeline errors, 2 on
usage errors.  The vocabulary is rebuilt from the stories file on every
run, so train and generate must see the same stories.
"""

from __future__ import annotations

import argparse
import sys

from .data import build_examples, synth_toy_corpus
from .errors import StorydecError
from .generate import MAX_SENTENCE_LENGTH, generate_story, save_stories
from .params import DecoderParams
from .train import TrainConfig, save_curve, train_toy

DEFAULT_FEATURE_DIM = 16
DEFAULT_ALBUM_SIZE = 16
DEFAULT_HIDDEN_SIZE = 32
DEFAULT_EMBED_SIZE = 16


def _cmd_synth(args) -> int:
    info = synth_toy_corpus(
        args.out_dir, seed=args.seed, n_stories=args.stories,
        n_words=args.words, feature_dim=args.feature_dim,
    )
    print(f"wrote {info['n_stories']} stories "
          f"(vocabulary {info['vocab_size']}) to {args.out_dir}")
    return 0


def _cmd_train(args) -> int:
    examples, vocab = build_examples(
        args.features, args.concepts, args.stories, args.feature_dim
    )
    params = DecoderParams.create(
        feature_dim=args.feature_dim, d=args.album_size,
        h=args.hidden_size, e=args.embed_size, v=vocab.size,
        seed=args.seed,
    )
    config = TrainConfig(
        epochs=args.epochs, learning_rate=args.learning_rate,
        optimizer=args.optimizer, scheduled_sampling=args.scheduled_sampling,
        seed=args.seed, target_loss=args.target_loss,
    )
    params, curve = train_toy(examples, params, config)
    params.save(args.params_out)
    if args.curve_out:
        save_curve(curve, args.curve_out)
    final = curve[-1][1] if curve else float("nan")
    print(f"trained {len(curve)} epochs on {len(examples)} examples, "
          f"final loss {final:.4f}; wrote {args.params_out}")
    return 0


def _cmd_generate(args) -> int:
    if args.beam_width < 1:
        raise StorydecError(f"--beam-width must be >= 1, got {args.beam_width}")
    params = DecoderParams.load(args.params)
    examples, vocab = build_examples(
        args.features, args.concepts, args.stories, params.feature_dim
    )
    if vocab.size != params.v:
        raise StorydecError(
            f"stories file yields a {vocab.size}-word vocabulary but the "
            f"model was trained with {params.v}"
        )
    stories = []
    for example in examples:
        sentences = generate_story(
            example.features, example.concepts, params,
            beam_width=args.beam_width, bos=vocab.bos, eos=vocab.eos,
            max_length=args.max_length,
        )
        decoded = [[vocab.decode(t) for t in s] for s in sentences]
        stories.append((example.story_id, decoded))
    save_stories(stories, args.out)
    print(f"wrote {len(stories)} stories to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="storydec",
        description="Toy album-to-story decoder with semantic attention "
        "over mined concepts: synthesize, train, generate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic toy corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stories", type=int, default=10,
                   help="number of stories (default %(default)s)")
    p.add_argument("--words", type=int, default=48,
                   help="word types before markers (default %(default)s)")
    p.add_argument("--feature-dim", type=int, default=DEFAULT_FEATURE_DIM)
    p.set_defaults(run=_cmd_synth)

    p = sub.add_parser("train", help="fit the decoder on a corpus")
    p.add_argument("--features", required=True)
    p.add_argument("--concepts", required=True)
    p.add_argument("--stories", required=True)
    p.add_argument("--feature-dim", type=int, default=DEFAULT_FEATURE_DIM)
    p.add_argument("--album-size", type=int, default=DEFAULT_ALBUM_SIZE,
                   help="album state size, must be even (default %(default)s)")
    p.add_argument("--hidden-size", type=int, default=DEFAULT_HIDDEN_SIZE)
    p.add_argument("--embed-size", type=int, default=DEFAULT_EMBED_SIZE)
    p.add_argument("--epochs", type=int, default=300)
    p.add_argument("--learning-rate", type=float, default=0.005)
    p.add_argument("--optimizer", choices=("adam", "sgd"), default="adam")
    p.add_argument("--scheduled-sampling", type=float, default=0.0,
                   help="final substitution probability, ramped linearly "
                   "from zero (default %(default)s)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target-loss", type=float, default=None,
                   help="stop once the epoch loss drops below this")
    p.add_argument("--params-out", required=True, help="model file (.npz)")
    p.add_argument("--curve-out", help="loss curve CSV")
    p.set_defaults(run=_cmd_train)

    p = sub.add_parser("generate", help="decode stories with a trained model")
    p.add_argument("--params", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--concepts", required=True)
    p.add_argument("--stories", required=True,
                   help="defines the albums and the vocabulary")
    p.add_argument("--beam-width", type=int, default=3)
    p.add_argument("--max-length", type=int, default=MAX_SENTENCE_LENGTH)
    p.add_argument("--out", required=True)
    p.set_defaults(run=_cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except (StorydecError, ValueError, OSError) as exc:
        print(f"storydec: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
