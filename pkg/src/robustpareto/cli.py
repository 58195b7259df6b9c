"""Command-line entry point: run fronts, compare artifacts, serve the UI.

The CLI is a thin shell over the library; every behavior is reachable
through library calls. Exit codes: 0 success, 2 configuration or validation
error, 3 empty front.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .artifact import ConfigError, RunConfig, execute_run, load_artifact, write_artifact
from .examples import UnknownProblemError
from .pareto import dominates

__all__ = ["main", "entry"]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_EMPTY_FRONT = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robustpareto", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="compute a front from a JSON config and write the artifact")
    run.add_argument("config", type=Path, help="path to the run configuration (JSON)")
    run.add_argument("--out", type=Path, default=None, help="artifact output path")
    run.add_argument("--seed", type=int, default=None, help="override the config seed")

    compare = sub.add_parser("compare", help="dominance and cost report across artifacts")
    compare.add_argument("artifacts", type=Path, nargs="+", help="artifact JSON files")
    compare.add_argument("--report", type=Path, required=True, help="CSV report output path")

    serve = sub.add_parser("serve", help="serve the HTTP API and the navigator UI")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--data", type=Path, required=True, help="directory for run artifacts")
    serve.add_argument("--ui", type=Path, default=None, help="directory with the built UI bundle")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        raw = json.loads(args.config.read_text(encoding="utf-8"))
    except FileNotFoundError:
        print(f"config file not found: {args.config}", file=sys.stderr)
        return EXIT_CONFIG
    except json.JSONDecodeError as exc:
        print(f"config is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        raw = dict(raw)
        raw["seed"] = args.seed
    try:
        config = RunConfig.from_dict(raw)
    except ConfigError as exc:
        for message in exc.messages:
            print(f"config error: {message}", file=sys.stderr)
        return EXIT_CONFIG

    out = args.out or Path(f"{config.problem}-{config.method.value}.json")
    run_id = out.stem
    try:
        document = execute_run(config, run_id)
    except (UnknownProblemError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    write_artifact(document, out)
    n_points = document["stats"]["n_points"]
    print(f"wrote {out} ({n_points} front points, {document['stats']['n_scenarios']} scenarios)")
    if n_points == 0:
        print(f"empty front: {document['stats'].get('diagnostic')}", file=sys.stderr)
        return EXIT_EMPTY_FRONT
    return EXIT_OK


def _displayed_objectives(artifact: dict) -> np.ndarray:
    key = "objectives_nominal" if artifact["method"] == "nominal" else "objectives_worst_case"
    return np.array([p[key] for p in artifact["front"]["points"]], dtype=float)


def _domination_count(a: np.ndarray, b: np.ndarray) -> int:
    """Number of rows of ``a`` strictly dominated by at least one row of ``b``."""
    count = 0
    for pa in a:
        if any(dominates(pb, pa) for pb in b):
            count += 1
    return count


def _cmd_compare(args: argparse.Namespace) -> int:
    artifacts = []
    for path in args.artifacts:
        try:
            artifacts.append((path, load_artifact(path)))
        except (OSError, json.JSONDecodeError) as exc:
            print(f"cannot read artifact {path}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    problems = {a["problem"]["id"] for _, a in artifacts}
    n_objs = {len(a["problem"]["objectives"]) for _, a in artifacts}
    if len(problems) != 1 or len(n_objs) != 1:
        print("artifacts must share the same problem and objective count", file=sys.stderr)
        return EXIT_CONFIG
    labels = list(artifacts[0][1]["problem"]["objectives"])

    rows: list[dict] = []
    lines: list[str] = []
    for path, art in artifacts:
        objs = _displayed_objectives(art)
        points = art["front"]["points"]
        row: dict = {
            "record": "artifact",
            "artifact_a": art["run_id"],
            "artifact_b": "",
            "method": art["method"],
            "n_points": len(points),
        }
        for m, label in enumerate(labels):
            gaps = [
                p["cost_of_robustness"]["gaps"][m]
                for p in points
                if p.get("cost_of_robustness") and p["cost_of_robustness"]["gaps"] is not None
            ]
            ranges = [p["scatter_stats"]["range"][m] for p in points]
            row[f"mean_cost_gap_{label}"] = float(np.mean(gaps)) if gaps else ""
            row[f"mean_scatter_range_{label}"] = float(np.mean(ranges)) if ranges else ""
        rows.append(row)
        lines.append(f"{art['run_id']}: method={art['method']}, points={len(points)}")

    for path_a, art_a in artifacts:
        for path_b, art_b in artifacts:
            if path_a == path_b:
                continue
            count = _domination_count(_displayed_objectives(art_a), _displayed_objectives(art_b))
            rows.append(
                {
                    "record": "pair",
                    "artifact_a": art_a["run_id"],
                    "artifact_b": art_b["run_id"],
                    "method": "",
                    "n_points": "",
                    "a_points_dominated_by_b": count,
                }
            )
            lines.append(f"{art_a['run_id']} vs {art_b['run_id']}: {count} points of A dominated by B")

    fieldnames = ["record", "artifact_a", "artifact_b", "method", "n_points", "a_points_dominated_by_b"]
    for label in labels:
        fieldnames += [f"mean_cost_gap_{label}", f"mean_scatter_range_{label}"]
    args.report.parent.mkdir(parents=True, exist_ok=True)
    with open(args.report, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames, restval="")
        writer.writeheader()
        writer.writerows(rows)
    print("\n".join(lines))
    print(f"wrote {args.report}")
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    ui_dir = args.ui
    if ui_dir is None:
        default_ui = Path("frontend") / "dist"
        if default_ui.is_dir():
            ui_dir = default_ui
    if ui_dir is not None:
        logger.info("serving UI bundle from %s", ui_dir)
    app = create_app(args.data, ui_dir=ui_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "compare":
        return _cmd_compare(args)
    return _cmd_serve(args)


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
