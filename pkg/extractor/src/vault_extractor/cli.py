"""extract: dump image embeddings for a directory into the embeddings CSV."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .extractor import DEFAULT_ID_PATTERN, ExtractorConfig, extract


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="extract",
        description="Dump 4096-wide CNN embeddings for a directory of images.",
    )
    parser.add_argument("--images", required=True, help="directory of image files")
    parser.add_argument("--out", required=True, help="output embeddings CSV")
    parser.add_argument(
        "--id-pattern",
        default=DEFAULT_ID_PATTERN,
        help="regex with named groups 'object' and 'view' applied to filenames",
    )
    parser.add_argument("--weights", choices=["imagenet", "random"], default="imagenet")
    parser.add_argument("--torch-seed", type=int, default=0)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--batch-size", type=int, default=8)
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    config = ExtractorConfig(
        image_dir=Path(args.images),
        out_csv=Path(args.out),
        id_pattern=args.id_pattern,
        weights=args.weights,
        device=args.device,
        batch_size=args.batch_size,
        torch_seed=args.torch_seed,
    )
    try:
        out = extract(config)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"extract: {exc}", file=sys.stderr)
        return 2
    skipped = f", {len(config.skipped)} skipped" if config.skipped else ""
    print(f"wrote {out}{skipped}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
