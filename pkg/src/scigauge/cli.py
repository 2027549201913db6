"""Command line entry point for the pipeline stages and the review
service."""
from __future__ import annotations

import argparse
import sys

from .pipeline import STAGES, PipelineError, load_config, run


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="scigauge",
        description="Science-news quality pipeline and review service")
    parser.add_argument("--config", required=True,
                        help="path to the TOML pipeline config")
    parser.add_argument("--stage", default="all",
                        help=f"one of {', '.join(STAGES)}, 'all', or 'serve'")
    parser.add_argument("--port", type=int, default=8000,
                        help="port for --stage serve")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the pipeline seed from the config")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, seed_override=args.seed)
        if args.stage == "serve":
            import uvicorn

            from .service import create_app
            app = create_app(cfg, static_dir=cfg.static_dir)
            uvicorn.run(app, host="127.0.0.1", port=args.port)
        else:
            run(args.stage, cfg)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
