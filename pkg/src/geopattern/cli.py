"""Command-line entry points.

Subcommands: ``ingest`` registers a dataset manifest and reports the tensor
it would build; ``extract`` runs the full pipeline and persists a pattern
report with figures; ``bench`` runs a validation suite; ``serve`` starts
the HTTP API.

The output directory resolves as: ``--output-dir`` flag, then the config
file, then the ``GEOPATTERN_OUTPUT_DIR`` environment variable, then
``./geopattern-out``. Exit codes: 0 success, 1 input error, 2 internal
failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import geo
from .pipeline import PipelineConfig, PipelineError, load_manifest, run_pipeline

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INTERNAL = 2

REGISTRY_NAME = "datasets.json"


def _resolve_output_dir(args) -> Path:
    if getattr(args, "output_dir", None):
        return Path(args.output_dir)
    if getattr(args, "config", None):
        cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if "output_dir" in cfg:
            return Path(cfg["output_dir"])
    env = os.environ.get("GEOPATTERN_OUTPUT_DIR")
    if env:
        return Path(env)
    return Path("geopattern-out")


def _config_value(args, key, default):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if getattr(args, "config", None):
        cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if key in cfg:
            return cfg[key]
    return default


def _registry_path(out_dir: Path) -> Path:
    return out_dir / REGISTRY_NAME


def _load_registry(out_dir: Path) -> dict[str, str]:
    path = _registry_path(out_dir)
    if not path.exists():
        return {}
    return json.loads(path.read_text(encoding="utf-8")).get("datasets", {})


def _save_registry(out_dir: Path, registry: dict[str, str]) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    _registry_path(out_dir).write_text(
        json.dumps({"version": 1, "datasets": registry}, indent=2, sort_keys=True)
        + "\n",
        encoding="utf-8",
    )


def cmd_ingest(args) -> int:
    out_dir = _resolve_output_dir(args)
    try:
        manifest = load_manifest(args.manifest)
        sites, site_diags = geo.load_sites(manifest.sites_path)
        sources = []
        diags = list(site_diags)
        for src in manifest.sources:
            source, ev_diags = geo.load_events(
                manifest.base_dir / src["path"], str(src["name"]), src.get("kind")
            )
            sources.append(source)
            diags += [f"{source.name}: {d}" for d in ev_diags]
        rois = geo.build_rois(sites, manifest.radius_m)
        aggregates = geo.aggregate(rois, sources)
        specs = geo.mode_specs_for(sources, manifest.bins)
        dataset = geo.build_tensor(aggregates, specs)
    except (PipelineError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    registry = _load_registry(out_dir)
    registry[manifest.name] = str(Path(args.manifest).resolve())
    _save_registry(out_dir, registry)
    absorbed = sum(len(r.absorbed) for r in rois)
    print(f"dataset {manifest.name!r} registered in {out_dir}")
    print(
        f"sites: {len(sites)} ({len(rois)} retained ROIs, {absorbed} absorbed)"
    )
    print(f"tensor: order {dataset.tensor.ndim}, shape "
          f"{tuple(dataset.tensor.shape)}, {dataset.n_sites} sites")
    for enc in dataset.encodings:
        print(f"  mode {enc.mode_name}: {enc.kind}, size {enc.size}")
    for d in diags:
        print(f"  diagnostic: {d}")
    return EXIT_OK


def cmd_extract(args) -> int:
    out_dir = _resolve_output_dir(args)
    if args.manifest:
        manifest_path = args.manifest
    else:
        registry = _load_registry(out_dir)
        if args.dataset not in registry:
            print(
                f"error: dataset {args.dataset!r} not registered "
                f"(known: {sorted(registry) or 'none'}); run ingest first",
                file=sys.stderr,
            )
            return EXIT_INPUT
        manifest_path = registry[args.dataset]
    config = PipelineConfig(
        manifest=manifest_path,
        rank=int(_config_value(args, "rank", 3)),
        clusters=int(_config_value(args, "clusters", 3)),
        seed=int(_config_value(args, "seed", 0)),
        max_iters=int(_config_value(args, "max_iters", 200)),
        tol=float(_config_value(args, "tol", 1e-6)),
        init=str(_config_value(args, "init", "data-anchor")),
        output_dir=str(out_dir),
    )
    try:
        report = run_pipeline(config)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT if exc.stage == "ingest" else EXIT_INTERNAL
    run_dir = Path(out_dir) / "runs" / report["run_id"]
    print(f"run {report['run_id']} ({report['dataset']})")
    print(
        f"solver: {report['solver']['iterations']} iterations, relative "
        f"error {report['solver']['relative_error']:.4f}"
    )
    print(f"patterns: {len(report['patterns'])}, sites {report['n_sites']}")
    for p in report["patterns"]:
        print(f"  pattern {p['index']}: {p['site_count']} sites, "
              f"ids {p['ids']}")
    print(f"report: {run_dir / 'report.json'}")
    print(f"figures: {run_dir / 'patterns_radar.png'}, "
          f"{run_dir / 'sites_map.png'}")
    return EXIT_OK


def cmd_bench(args) -> int:
    out_dir = _resolve_output_dir(args)
    from . import bench

    if args.suite == "gaussian":
        seeds = range(int(args.seeds))
        summary = bench.run_gaussian_benchmark(
            out_dir,
            seeds=tuple(seeds),
            rank_values=tuple(int(r) for r in args.ranks.split(",")),
            n_clusters=int(args.clusters or 3),
        )
        for rank, errors in sorted(summary["mean_error_by_rank"].items()):
            shown = ["inf" if e is None else f"{e:.2f}" for e in errors]
            print(f"rank {rank}: mean recovery error per seed: {shown}")
    else:
        summary = bench.run_box_benchmark(
            out_dir,
            seed=int(args.seed or 0),
            rank=int(args.rank or 6),
            n_clusters=int(args.clusters or 10),
        )
        for method, scores in summary["scores"].items():
            print(
                f"{method}: ari={scores['ari']:.3f} fmi={scores['fmi']:.3f} "
                f"v={scores['v_measure']:.3f} "
                f"nmi={scores['mutual_info_normalized']:.3f}"
            )
    print(f"results under {out_dir}")
    return EXIT_OK


def cmd_serve(args) -> int:
    out_dir = _resolve_output_dir(args)
    from .server import AppState, serve_forever

    registry = _load_registry(out_dir)
    if not registry:
        print(
            "error: no datasets registered; run `geopattern ingest` first",
            file=sys.stderr,
        )
        return EXIT_INPUT
    host, _, port = args.bind.rpartition(":")
    if not host or not port.isdigit():
        print(f"error: --bind must be HOST:PORT, got {args.bind!r}",
              file=sys.stderr)
        return EXIT_INPUT
    serve_forever(host, int(port), AppState(out_dir, registry))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geopattern",
        description="Mine geospatial patterns with non-negative Tucker "
        "decomposition.",
    )
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--output-dir", help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="register a dataset manifest")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("extract", help="run the extraction pipeline")
    p.add_argument("--dataset", help="registered dataset name")
    p.add_argument("--manifest", help="manifest path (bypasses the registry)")
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--clusters", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--max-iters", dest="max_iters", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--init", default=None,
                   choices=["nonneg-hosvd", "uniform-random", "data-anchor"])
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("bench", help="run a validation suite")
    p.add_argument("--suite", choices=["gaussian", "boxes"], required=True)
    p.add_argument("--seeds", default="10", help="gaussian: number of seeds")
    p.add_argument("--ranks", default="1,3", help="gaussian: ranks to sweep")
    p.add_argument("--seed", default=None, help="boxes: dataset seed")
    p.add_argument("--rank", default=None, help="boxes: core rank")
    p.add_argument("--clusters", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="start the HTTP API")
    p.add_argument("--bind", default="127.0.0.1:8787")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    extract_needs_source = args.command == "extract" and not (
        args.dataset or args.manifest
    )
    if extract_needs_source:
        print("error: extract needs --dataset or --manifest", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
