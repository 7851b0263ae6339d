"""Command-line entry points: serve, seed-demo, export, metrics."""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from . import demo, session, study
from .errors import PlannerError
from .provider import ProviderConfig
from .scaffold import default_catalog, load_catalog
from .service import ServiceSettings, create_app
from .store import ENV_STORE_DIR, ProjectStore

DEFAULT_STORE_DIR = "data"
DEFAULT_PORT = 8080


def _store_dir(value: str | None) -> Path:
    return Path(value or os.environ.get(ENV_STORE_DIR) or DEFAULT_STORE_DIR)


def _build_context(args: argparse.Namespace) -> session.AppContext:
    catalog = load_catalog(args.catalog) if getattr(args, "catalog", None) else default_catalog()
    provider = ProviderConfig.from_env()
    if getattr(args, "llm_mode", None):
        provider = dataclasses.replace(provider, mode=args.llm_mode)
    return session.AppContext(
        store=ProjectStore(_store_dir(args.store_dir)),
        catalog=catalog,
        provider=provider,
    )


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    ctx = _build_context(args)
    settings = ServiceSettings(ctx=ctx, ui_origin=args.ui_origin)
    if args.api_token:
        settings.api_token = args.api_token
    app = create_app(settings)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _cmd_seed_demo(args: argparse.Namespace) -> int:
    ctx = _build_context(args)
    envelopes = demo.seed_demo(ctx)
    for envelope in envelopes:
        print(f"created {envelope.project.id} ({envelope.project.title})")
    return 0


def _cmd_export(args: argparse.Namespace) -> int:
    ctx = _build_context(args)
    built, instruction = session.export_brief(ctx, args.project_id)
    document = {
        "brief": {
            "app_name": built.app_name,
            "problem_statement": built.problem_statement,
            "target_users": list(built.target_users),
            "contexts": list(built.contexts),
            "features": [
                {"name": f.name, "components": list(f.components), "behavior": f.behavior}
                for f in built.features
            ],
            "positive_impacts": list(built.positive_impacts),
            "negative_impacts": list(built.negative_impacts),
        },
        "instruction": instruction,
    }
    text = json.dumps(document, indent=2, ensure_ascii=False)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"brief written to {args.out}")
    else:
        print(text)
    return 0


def _cmd_metrics(args: argparse.Namespace) -> int:
    store = ProjectStore(_store_dir(args.store_dir))
    metrics = study.compute_metrics(store.load(args.project_id))
    print(json.dumps(dataclasses.asdict(metrics), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="app-planner")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=DEFAULT_PORT)
    serve.add_argument("--store-dir", default=None)
    serve.add_argument("--llm-mode", choices=["mock", "live"], default=None)
    serve.add_argument("--catalog", default=None, help="path to an edited catalog file")
    serve.add_argument("--ui-origin", default=None, help="CORS origin for the web UI")
    serve.add_argument("--api-token", default=None, help="require this bearer token")
    serve.set_defaults(func=_cmd_serve)

    seed = sub.add_parser("seed-demo", help="create the worked demo projects")
    seed.add_argument("--store-dir", default=None)
    seed.add_argument("--catalog", default=None)
    seed.set_defaults(func=_cmd_seed_demo)

    export = sub.add_parser("export", help="print or write a project's app brief")
    export.add_argument("project_id")
    export.add_argument("--store-dir", default=None)
    export.add_argument("--catalog", default=None)
    export.add_argument("--out", default=None, help="write the brief to this file")
    export.set_defaults(func=_cmd_export)

    metrics = sub.add_parser("metrics", help="print interaction metrics for a project")
    metrics.add_argument("project_id")
    metrics.add_argument("--store-dir", default=None)
    metrics.set_defaults(func=_cmd_metrics)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PlannerError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
