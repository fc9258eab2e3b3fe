"""Command line entry point: lsm-extract."""

import argparse
import sys

from .errors import ExtractorError
from .extract import extract, load_model


def parse_layers(text):
    """Parse '0,6,12' into a list of layer indices."""
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad layer list {text!r}") from exc


def build_parser():
    p = argparse.ArgumentParser(
        prog="lsm-extract",
        description="Dump per-layer hidden states, logits, and the "
        "unembedding head of a causal language model.",
    )
    p.add_argument("--model", required=True, help="model id or local path")
    p.add_argument("--corpus", required=True, help="plain UTF-8 text file")
    p.add_argument(
        "--layers", required=True, type=parse_layers,
        help="comma-separated layer indices, 0 = embedding output",
    )
    p.add_argument("--max", required=True, type=int, dest="max_vectors",
                   help="maximum number of sampled token positions")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        model, tokenizer = load_model(args.model)
        manifest = extract(
            model, tokenizer, args.corpus, args.layers,
            args.max_vectors, args.seed, args.out,
        )
    except (ExtractorError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {manifest['n_sampled']} vectors per layer to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
