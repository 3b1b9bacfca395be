"""Sidecar command line: annotate raw pairs, or serve the QA model."""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Sequence


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="qasidecar",
        description="Annotation and QA-model sidecar for the synthesis engine.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    annotate_p = subparsers.add_parser("annotate", help="raw pairs -> interchange JSONL")
    annotate_p.add_argument("--input", required=True)
    annotate_p.add_argument("--out", required=True)

    serve_p = subparsers.add_parser("serve", help="serve /predict, /train, /health")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8765)
    serve_p.add_argument("--batch-size", type=int, default=8)
    serve_p.add_argument("--epochs", type=int, default=1)
    serve_p.add_argument("--seed", type=int, default=0)

    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")

    if args.command == "annotate":
        from .annotate import annotate_file

        written, skipped = annotate_file(args.input, args.out)
        print(f"wrote {written} pairs to {args.out} ({skipped} skipped)")
        return 0

    import uvicorn

    from .qamodel import TinySpanModel
    from .server import create_app

    app = create_app(TinySpanModel(seed=args.seed), args.batch_size, args.epochs)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    sys.exit(main())
