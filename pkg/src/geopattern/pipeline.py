"""End-to-end orchestration: manifest-driven ingestion, factorization,
pattern extraction, and flat-file persistence of pattern reports.

A run is identified by a content hash over the dataset definition, the data
files, and the extraction parameters, so re-running an identical extraction
reuses (and byte-identically reproduces) the stored report. Reports land in
``<output_dir>/runs/<run_id>/`` as JSON plus delimited site assignments and
rendered figures; nothing is written when a stage fails.
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import geo
from .ntd import NTDConfig, fit, reconstruction_error
from .patterns import extract_patterns

__all__ = [
    "PipelineConfig",
    "PipelineError",
    "Manifest",
    "load_manifest",
    "run_pipeline",
    "run_id_for",
    "report_path",
]

MANIFEST_VERSION = 1
REPORT_VERSION = 1


class PipelineError(RuntimeError):
    """Failure wrapped with the pipeline stage that raised it."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    manifest: str
    rank: int = 3
    clusters: int = 3
    seed: int = 0
    radius_m: float | None = None  # None: manifest value (default 200)
    max_iters: int = 200
    tol: float = 1e-6
    init: str = "data-anchor"
    top_k: int = 512
    output_dir: str = "geopattern-out"

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        if self.clusters < 1:
            raise ValueError("clusters must be >= 1")
        if self.radius_m is not None and self.radius_m <= 0:
            raise ValueError("radius_m must be > 0")


@dataclass
class Manifest:
    name: str
    sites_path: Path
    radius_m: float
    sources: list[dict]
    base_dir: Path
    bins: dict[str, int] = field(default_factory=dict)


def load_manifest(path) -> Manifest:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise PipelineError("ingest", exc)
    except json.JSONDecodeError as exc:
        raise PipelineError("ingest", ValueError(f"{path}: invalid JSON ({exc})"))
    if raw.get("version") != MANIFEST_VERSION:
        raise PipelineError(
            "ingest",
            ValueError(f"{path}: unsupported manifest version {raw.get('version')!r}"),
        )
    for key in ("name", "sites", "sources"):
        if key not in raw:
            raise PipelineError("ingest", ValueError(f"{path}: missing {key!r}"))
    base = path.parent
    bins = {
        str(src["name"]): int(src["bins"])
        for src in raw["sources"]
        if "bins" in src
    }
    return Manifest(
        name=str(raw["name"]),
        sites_path=base / raw["sites"],
        radius_m=float(raw.get("radius_m", 200.0)),
        sources=list(raw["sources"]),
        base_dir=base,
        bins=bins,
    )


def _hash_file(h, path: Path) -> None:
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)


def run_id_for(manifest: Manifest, config: PipelineConfig) -> str:
    """Content hash over data files and extraction parameters."""
    h = hashlib.sha256()
    h.update(manifest.name.encode())
    _hash_file(h, manifest.sites_path)
    for src in manifest.sources:
        _hash_file(h, manifest.base_dir / src["path"])
        h.update(str(src.get("kind")).encode())
        h.update(str(src.get("bins")).encode())
    params = (
        config.rank,
        config.clusters,
        config.seed,
        config.radius_m if config.radius_m is not None else manifest.radius_m,
        config.max_iters,
        config.tol,
        config.init,
        config.top_k,
    )
    h.update(repr(params).encode())
    return h.hexdigest()[:16]


def report_path(output_dir, run_id: str) -> Path:
    return Path(output_dir) / "runs" / run_id / "report.json"


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat()


def run_pipeline(config: PipelineConfig, use_cache: bool = True) -> dict:
    """Execute ingest -> factorize -> extract and persist the report.

    Returns the report as a dict (identical to the stored JSON). Errors
    surface as :class:`PipelineError` with the failing stage named; no
    output files are produced for a failed run.
    """
    started = _now()
    manifest = load_manifest(config.manifest)
    run_id = run_id_for(manifest, config)
    out_file = report_path(config.output_dir, run_id)
    if use_cache and out_file.exists():
        return json.loads(out_file.read_text(encoding="utf-8"))

    diagnostics: list[str] = []
    try:
        sites, diags = geo.load_sites(manifest.sites_path)
        diagnostics += [f"sites: {d}" for d in diags]
        sources = []
        for src in manifest.sources:
            source, ev_diags = geo.load_events(
                manifest.base_dir / src["path"],
                name=str(src["name"]),
                kind=src.get("kind"),
            )
            diagnostics += [f"{source.name}: {d}" for d in ev_diags]
            sources.append(source)
        radius = config.radius_m if config.radius_m is not None else manifest.radius_m
        rois = geo.build_rois(sites, radius)
        aggregates = geo.aggregate(rois, sources)
        specs = geo.mode_specs_for(sources, manifest.bins)
        dataset = geo.build_tensor(aggregates, specs)
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError("ingest", exc)

    try:
        ranks = tuple(min(config.rank, s) for s in dataset.tensor.shape)
        if ranks != (config.rank,) * dataset.tensor.ndim:
            diagnostics.append(
                f"rank {config.rank} clamped per mode to {list(ranks)}"
            )
        model = fit(
            dataset.tensor,
            NTDConfig(
                ranks=ranks,
                max_iters=config.max_iters,
                tol=config.tol,
                seed=config.seed,
                init=config.init,
            ),
        )
        rel_error = reconstruction_error(model, dataset.tensor)
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError("solve", exc)

    try:
        patterns = extract_patterns(
            model, dataset, config.clusters, top_k=config.top_k
        )
        diagnostics += patterns.diagnostics
        site_coords = {s.site_id: (s.lat, s.lon) for s in sites}
        roi_of = {r.site_id: r for r in rois}
        site_rows = []
        pattern_counts = [0] * len(patterns.medoids)
        for cell, site_ids in sorted(dataset.site_index.items()):
            label = patterns.assignment[cell]
            for sid in sorted(site_ids):
                lat, lon = site_coords[sid]
                site_rows.append(
                    {
                        "site_id": sid,
                        "lat": lat,
                        "lon": lon,
                        "pattern": label,
                        "cell": list(cell),
                        "absorbed": sorted(roi_of[sid].absorbed),
                    }
                )
                pattern_counts[label] += 1
        site_rows.sort(key=lambda r: r["site_id"])
        medoid_rows = [
            {
                "index": i,
                "ids": list(m.ids),
                "labels": [
                    enc.label_of(sem) for enc, sem in zip(dataset.encodings, m.ids)
                ],
                "weight": m.weight,
                "site_count": pattern_counts[i],
                "cluster_size": len(patterns.cluster_members[i]),
            }
            for i, m in enumerate(patterns.medoids)
        ]
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError("extract", exc)

    report = {
        "version": REPORT_VERSION,
        "run_id": run_id,
        "dataset": manifest.name,
        "config": {
            "rank": config.rank,
            "clusters": config.clusters,
            "seed": config.seed,
            "radius_m": radius,
            "bins": manifest.bins,
            "solver": {
                "max_iters": config.max_iters,
                "tol": config.tol,
                "init": config.init,
            },
            "top_k": config.top_k,
        },
        "solver": {
            "iterations": model.iterations_used,
            "converged": model.converged,
            "relative_error": rel_error,
            "final_objective": (
                model.objective_trace[-1] if model.objective_trace else 0.0
            ),
        },
        "modes": [
            {
                "name": enc.mode_name,
                "kind": enc.kind,
                "size": enc.size,
                "labels": enc.labels,
            }
            for enc in dataset.encodings
        ],
        "patterns": medoid_rows,
        "sites": site_rows,
        "n_sites": dataset.n_sites,
        "diagnostics": diagnostics,
        "bench_scores": None,
        "timestamps": {"started": started, "finished": _now()},
    }

    try:
        _persist(report, dataset, config.output_dir)
    except Exception as exc:
        raise PipelineError("persist", exc)
    return report


def _persist(report: dict, dataset, output_dir) -> None:
    run_dir = Path(output_dir) / "runs" / report["run_id"]
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    lines = ["site_id,lat,lon,pattern"]
    for row in report["sites"]:
        lines.append(f"{row['site_id']},{row['lat']:.6f},{row['lon']:.6f},{row['pattern']}")
    (run_dir / "sites.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    log = [
        f"run {report['run_id']} dataset={report['dataset']}",
        f"started {report['timestamps']['started']}",
        f"solver iterations={report['solver']['iterations']} "
        f"converged={report['solver']['converged']} "
        f"relative_error={report['solver']['relative_error']:.6g}",
        f"patterns={len(report['patterns'])} sites={report['n_sites']}",
    ] + [f"diagnostic: {d}" for d in report["diagnostics"]]
    (run_dir / "run.log").write_text("\n".join(log) + "\n", encoding="utf-8")

    from .plotting import save_map_figure, save_radar_figure

    if report["patterns"]:
        save_radar_figure(
            report["patterns"],
            [m["name"] for m in report["modes"]],
            [m["size"] for m in report["modes"]],
            run_dir / "patterns_radar.png",
        )
    if report["sites"]:
        save_map_figure(report["sites"], run_dir / "sites_map.png")
