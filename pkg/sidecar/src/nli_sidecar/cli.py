"""Run the sidecar: ``nli-sidecar --model dummy --port 8001``.

``--model`` takes ``dummy`` (deterministic hash model, no downloads) or a
transformers checkpoint id such as ``roberta-large-mnli``. ``--label-order``
overrides the checkpoint's output order when it cannot be inferred, e.g.
``--label-order contradiction,neutral,entailment``.
"""

from __future__ import annotations

import argparse
import sys

from .app import create_app
from .models import LabelOrderError, load_model


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nli-sidecar", description=__doc__)
    parser.add_argument("--model", default="dummy", help="'dummy' or a checkpoint id")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8001)
    parser.add_argument("--max-batch", type=int, default=32)
    parser.add_argument("--device", default="cpu", help="device hint, e.g. cpu or cuda")
    parser.add_argument(
        "--label-order",
        help="comma-separated output order of the checkpoint, e.g. contradiction,neutral,entailment",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    import uvicorn

    args = build_parser().parse_args(argv)
    try:
        model = load_model(args.model, device=args.device, label_order=args.label_order)
    except (LabelOrderError, RuntimeError, OSError) as exc:
        print(f"error: could not load model {args.model!r}: {exc}", file=sys.stderr)
        return 1
    app = create_app(model, max_batch=args.max_batch)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    sys.exit(main())
