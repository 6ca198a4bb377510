"""Validation harness: synthetic pattern-recovery datasets, clustering
quality scores, least-squares regression, rank sweeps, and baseline
clusterers for comparison runs.

Synthetic points are discretized into count tensors before entering the
factorization pipeline: Gaussian recovery uses a fixed-width grid whose bin
width matches the sampling scale (so a target's signature is well defined),
and the box suite uses largest-gap ("natural breaks") edges, which keep the
dense value ranges of each dimension intact.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.optimize import linear_sum_assignment

from .geo import ModeEncoding, TensorDataset, assign_bin
from .ntd import NTDConfig, fit, reconstruction_error
from .patterns import PatternSignature, emd, extract_patterns

__all__ = [
    "GaussianPatternSpec",
    "BoxClusterSpec",
    "LabeledPoints",
    "ScoreReport",
    "OLSFit",
    "SweepPoint",
    "sample_gaussian_patterns",
    "generate_box_clusters",
    "default_gaussian_spec",
    "table_box_spec",
    "grid_dataset",
    "natural_breaks_dataset",
    "clustering_scores",
    "recovery_error",
    "ols_fit",
    "kmeans_labels",
    "ahc_euclidean_labels",
    "pipeline_labels",
    "run_rank_sweep",
    "run_gaussian_benchmark",
    "run_box_benchmark",
]


# --------------------------------------------------------------------------
# synthetic data


@dataclass(frozen=True)
class GaussianPatternSpec:
    """Isotropic normal clusters around target signatures (unit covariance);
    a share of each cluster is replaced by uniform outliers drawn over the
    data bounding box inflated by three sampling deviations."""

    targets: tuple[tuple[float, ...], ...]
    samples_per_target: tuple[int, ...]
    noise_fractions: tuple[float, ...]
    seed: int = 0

    def __post_init__(self):
        n = {len(self.targets), len(self.samples_per_target), len(self.noise_fractions)}
        if len(n) != 1:
            raise ValueError("targets, counts and noise fractions must align")
        if any(not 0.0 <= f <= 1.0 for f in self.noise_fractions):
            raise ValueError("noise fractions must lie in [0, 1]")

    @property
    def dimension(self) -> int:
        return len(self.targets[0])


@dataclass(frozen=True)
class BoxClusterSpec:
    """Uniform clusters inside axis-aligned boxes."""

    clusters: tuple[tuple[int, tuple[tuple[float, float], ...]], ...]
    seed: int = 0

    def __post_init__(self):
        for count, region in self.clusters:
            if count < 1:
                raise ValueError("cluster counts must be >= 1")
            if any(lo > hi for lo, hi in region):
                raise ValueError("box intervals need lower <= upper")


@dataclass
class LabeledPoints:
    points: np.ndarray  # (n, d)
    labels: np.ndarray  # (n,)


# grid used by the Gaussian recovery suite: levels 1..4 centered every
# 4 sigma starting at 2, so each cluster concentrates in one cell per mode
GAUSS_GRID_ORIGIN = 2.0
GAUSS_GRID_WIDTH = 4.0
GAUSS_GRID_LEVELS = 4

_GAUSS_TARGETS = (
    (2.0, 6.0, 10.0, 2.0, 6.0, 10.0, 2.0),
    (6.0, 10.0, 2.0, 10.0, 2.0, 6.0, 6.0),
    (10.0, 2.0, 6.0, 6.0, 10.0, 2.0, 10.0),
)


def default_gaussian_spec(seed: int = 0) -> GaussianPatternSpec:
    """Three targets in R^7, 500 samples each, 10/13/15% noise."""
    return GaussianPatternSpec(
        targets=_GAUSS_TARGETS,
        samples_per_target=(500, 500, 500),
        noise_fractions=(0.10, 0.13, 0.15),
        seed=seed,
    )


def initial_rank_guess(dimension: int) -> int:
    """Starting core rank for a tensor of the given order: floor(n / 2)."""
    if dimension < 1:
        raise ValueError("dimension must be >= 1")
    return max(dimension // 2, 1)


def sample_gaussian_patterns(spec: GaussianPatternSpec) -> LabeledPoints:
    rng = np.random.default_rng(spec.seed)
    chunks, labels = [], []
    for t, (mu, count) in enumerate(zip(spec.targets, spec.samples_per_target)):
        chunks.append(rng.normal(np.asarray(mu, float), 1.0, (count, len(mu))))
        labels.append(np.full(count, t))
    points = np.vstack(chunks)
    labels = np.concatenate(labels)
    lo = points.min(axis=0) - 3.0
    hi = points.max(axis=0) + 3.0
    for t, (count, frac) in enumerate(
        zip(spec.samples_per_target, spec.noise_fractions)
    ):
        n_noise = int(round(frac * count))
        rows = np.where(labels == t)[0][:n_noise]
        points[rows] = rng.uniform(lo, hi, (n_noise, points.shape[1]))
    return LabeledPoints(points, labels)


TABLE_BOX_CLUSTERS = (
    (500, ((1, 10), (1, 5), (1, 30000), (1, 50), (1, 60), (1, 7))),
    (600, ((11, 20), (6, 10), (31000, 60000), (51, 70), (61, 90), (8, 11))),
    (700, ((21, 30), (11, 15), (61000, 80000), (71, 90), (91, 120), (12, 16))),
    (800, ((31, 40), (16, 21), (81000, 100000), (91, 120), (121, 150), (17, 21))),
    (900, ((41, 50), (22, 30), (101000, 130000), (121, 150), (151, 180), (22, 27))),
    (10, ((51, 60), (1, 5), (61000, 80000), (91, 120), (121, 150), (22, 27))),
    (10, ((21, 30), (31, 40), (1, 30000), (71, 90), (151, 180), (17, 21))),
    (10, ((31, 40), (11, 15), (131000, 150000), (121, 150), (91, 120), (12, 16))),
    (10, ((41, 50), (1, 5), (101000, 130000), (151, 180), (61, 90), (17, 21))),
    (15, ((1, 10), (6, 10), (61000, 80000), (91, 120), (121, 150), (22, 27))),
)

# distinct value ranges per dimension in the box suite above
BOX_LEVEL_COUNTS = (6, 6, 6, 6, 5, 5)


def table_box_spec(seed: int = 0) -> BoxClusterSpec:
    """The ten-cluster box dataset: 3555 points in R^6."""
    return BoxClusterSpec(clusters=TABLE_BOX_CLUSTERS, seed=seed)


def generate_box_clusters(spec: BoxClusterSpec) -> LabeledPoints:
    rng = np.random.default_rng(spec.seed)
    chunks, labels = [], []
    for c, (count, region) in enumerate(spec.clusters):
        cols = [rng.uniform(lo, hi, count) for lo, hi in region]
        chunks.append(np.stack(cols, axis=1))
        labels.append(np.full(count, c))
    return LabeledPoints(np.vstack(chunks), np.concatenate(labels))


# --------------------------------------------------------------------------
# discretization into count tensors


def _dataset_from_cells(
    points: np.ndarray, positions: np.ndarray, encodings: list[ModeEncoding]
) -> tuple[TensorDataset, list[tuple[int, ...]]]:
    shape = tuple(e.size for e in encodings)
    X = np.zeros(shape)
    site_index: dict[tuple[int, ...], list[str]] = {}
    cells: list[tuple[int, ...]] = []
    for i, pos in enumerate(positions):
        cell = tuple(int(p) for p in pos)
        cells.append(cell)
        X[cell] += 1.0
        site_index.setdefault(cell, []).append(str(i))
    return TensorDataset(X, encodings, site_index), cells


def grid_dataset(
    points: np.ndarray,
    origin: float = GAUSS_GRID_ORIGIN,
    width: float = GAUSS_GRID_WIDTH,
    levels: int = GAUSS_GRID_LEVELS,
) -> tuple[TensorDataset, list[tuple[int, ...]]]:
    """Fixed-width binning: level i is centered at origin + (i-1)*width."""
    points = np.asarray(points, dtype=np.float64)
    positions = np.clip(
        np.rint((points - origin) / width), 0, levels - 1
    ).astype(int)
    encodings = [
        ModeEncoding(
            f"dim{k}",
            "binned-count",
            [f"~{origin + i * width:g}" for i in range(levels)],
            [origin + (i + 0.5) * width for i in range(levels - 1)],
        )
        for k in range(points.shape[1])
    ]
    return _dataset_from_cells(points, positions, encodings)


def grid_signature(mu: Sequence[float]) -> tuple[int, ...]:
    """Signature IDs of a target mean under the Gaussian-suite grid."""
    return tuple(
        int(np.clip(round((v - GAUSS_GRID_ORIGIN) / GAUSS_GRID_WIDTH), 0,
                    GAUSS_GRID_LEVELS - 1)) + 1
        for v in mu
    )


def natural_breaks_edges(values: Sequence[float], n_bins: int) -> list[float]:
    """Interior edges at the n_bins-1 widest gaps between adjacent distinct
    values (midpoints); ties keep the leftmost gaps."""
    v = np.unique(np.asarray(values, dtype=np.float64))
    if len(v) <= n_bins:
        return [float((a + b) / 2.0) for a, b in zip(v[:-1], v[1:])]
    gaps = v[1:] - v[:-1]
    chosen = np.sort(np.argsort(-gaps, kind="stable")[: n_bins - 1])
    return [float((v[i] + v[i + 1]) / 2.0) for i in chosen]


def natural_breaks_dataset(
    points: np.ndarray, bins_per_dim: Sequence[int]
) -> tuple[TensorDataset, list[tuple[int, ...]]]:
    points = np.asarray(points, dtype=np.float64)
    if points.shape[1] != len(bins_per_dim):
        raise ValueError("bins_per_dim must match the point dimension")
    positions = np.zeros(points.shape, dtype=int)
    encodings = []
    for k, b in enumerate(bins_per_dim):
        edges = natural_breaks_edges(points[:, k], int(b))
        positions[:, k] = np.searchsorted(np.asarray(edges), points[:, k],
                                          side="left")
        labels = [f"bin{i + 1}" for i in range(len(edges) + 1)]
        encodings.append(ModeEncoding(f"dim{k}", "binned-count", labels, edges))
    return _dataset_from_cells(points, positions, encodings)


# --------------------------------------------------------------------------
# clustering agreement scores


@dataclass(frozen=True)
class ScoreReport:
    fmi: float
    ari: float
    v_measure: float
    mutual_info: float  # raw, in nats
    mutual_info_normalized: float  # mi / sqrt(H_true * H_pred), in [0, 1]

    def as_dict(self) -> dict[str, float]:
        return {
            "fmi": self.fmi,
            "ari": self.ari,
            "v_measure": self.v_measure,
            "mutual_info": self.mutual_info,
            "mutual_info_normalized": self.mutual_info_normalized,
        }


def clustering_scores(labels_true, labels_pred) -> ScoreReport:
    """Pair-counting and entropy agreement scores from the contingency
    table; invariant to any renaming of the predicted labels."""
    lt = list(labels_true)
    lp = list(labels_pred)
    if len(lt) != len(lp):
        raise ValueError("label vectors differ in length")
    if not lt:
        raise ValueError("label vectors are empty")
    n = len(lt)
    table: dict[tuple, int] = {}
    for a, b in zip(lt, lp):
        table[(a, b)] = table.get((a, b), 0) + 1
    row: dict[object, int] = {}
    col: dict[object, int] = {}
    for (a, b), c in table.items():
        row[a] = row.get(a, 0) + c
        col[b] = col.get(b, 0) + c

    def comb2(x: int) -> float:
        return x * (x - 1) / 2.0

    pairs_both = sum(comb2(c) for c in table.values())
    pairs_true = sum(comb2(c) for c in row.values())
    pairs_pred = sum(comb2(c) for c in col.values())
    pairs_all = comb2(n)

    if pairs_true == 0.0 and pairs_pred == 0.0:
        fmi = 1.0
    elif pairs_true == 0.0 or pairs_pred == 0.0:
        fmi = 0.0
    else:
        fmi = pairs_both / math.sqrt(pairs_true * pairs_pred)

    expected = pairs_true * pairs_pred / pairs_all if pairs_all else 0.0
    max_index = 0.5 * (pairs_true + pairs_pred)
    ari = 1.0 if max_index == expected else (pairs_both - expected) / (
        max_index - expected
    )

    h_true = -sum((c / n) * math.log(c / n) for c in row.values())
    h_pred = -sum((c / n) * math.log(c / n) for c in col.values())
    mi = sum(
        (c / n) * math.log(n * c / (row[a] * col[b]))
        for (a, b), c in table.items()
    )
    mi = max(mi, 0.0)
    homogeneity = 1.0 if h_true == 0.0 else 1.0 - (h_true - mi) / h_true
    completeness = 1.0 if h_pred == 0.0 else 1.0 - (h_pred - mi) / h_pred
    if homogeneity + completeness == 0.0:
        v_measure = 0.0
    else:
        v_measure = 2.0 * homogeneity * completeness / (homogeneity + completeness)
    if h_true == 0.0 and h_pred == 0.0:
        nmi = 1.0
    elif h_true == 0.0 or h_pred == 0.0:
        nmi = 0.0
    else:
        nmi = mi / math.sqrt(h_true * h_pred)
    return ScoreReport(fmi, ari, v_measure, mi, nmi)


# --------------------------------------------------------------------------
# recovery error and OLS


def _sig_ids(s) -> tuple[int, ...]:
    return s.ids if isinstance(s, PatternSignature) else tuple(s)


def recovery_error(targets: Sequence, recovered: Sequence) -> list[float]:
    """Per-target EMD to its match under a minimal-cost one-to-one matching;
    targets left unmatched (fewer recovered than targets) get infinity."""
    if not targets:
        return []
    errors = [float("inf")] * len(targets)
    if not recovered:
        return errors
    cost = np.array(
        [[emd(_sig_ids(t), _sig_ids(r)) for r in recovered] for t in targets]
    )
    rows, cols = linear_sum_assignment(cost)
    for i, j in zip(rows, cols):
        errors[int(i)] = float(cost[i, j])
    return errors


@dataclass(frozen=True)
class OLSFit:
    slope: float
    intercept: float
    r_squared: float


def ols_fit(x: Sequence[float], y: Sequence[float]) -> OLSFit:
    """Closed-form least squares for y ~ slope * x + intercept.

    Degenerate x (all equal) is an error; a constant y gives slope 0 with
    r^2 defined as 0.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be equal-length 1-D sequences")
    if len(x) < 2:
        raise ValueError("need at least two points")
    xm, ym = x.mean(), y.mean()
    sxx = float(np.dot(x - xm, x - xm))
    if sxx == 0.0:
        raise ValueError("all x values are equal; slope undefined")
    slope = float(np.dot(x - xm, y - ym)) / sxx
    intercept = ym - slope * xm
    ss_res = float(np.sum((y - (slope * x + intercept)) ** 2))
    ss_tot = float(np.dot(y - ym, y - ym))
    r_squared = 0.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return OLSFit(slope, float(intercept), float(r_squared))


# --------------------------------------------------------------------------
# baseline clusterers


def kmeans_labels(
    points: np.ndarray, k: int, seed: int = 0, restarts: int = 10,
    max_iters: int = 300,
) -> np.ndarray:
    """Lloyd iterations from seeded random centers; best inertia of
    ``restarts`` runs. Deterministic under the seed."""
    points = np.asarray(points, dtype=np.float64)
    rng = np.random.default_rng(seed)
    n = len(points)
    best_inertia, best_labels = np.inf, np.zeros(n, dtype=int)
    for _ in range(restarts):
        centers = points[rng.choice(n, size=k, replace=False)]
        labels = np.zeros(n, dtype=int)
        for _ in range(max_iters):
            d = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            labels = d.argmin(axis=1)
            new_centers = np.stack(
                [
                    points[labels == j].mean(axis=0)
                    if np.any(labels == j)
                    else centers[j]
                    for j in range(k)
                ]
            )
            if np.allclose(new_centers, centers):
                break
            centers = new_centers
        inertia = float(((points - centers[labels]) ** 2).sum())
        if inertia < best_inertia:
            best_inertia, best_labels = inertia, labels.copy()
    return best_labels


def ahc_euclidean_labels(points: np.ndarray, k: int) -> np.ndarray:
    """Average-linkage agglomerative clustering on raw Euclidean distance."""
    Z = linkage(np.asarray(points, dtype=np.float64), method="average")
    return fcluster(Z, t=k, criterion="maxclust") - 1


# --------------------------------------------------------------------------
# pipeline runs over tensorized point sets


def pipeline_labels(
    dataset: TensorDataset,
    cells: Sequence[tuple[int, ...]],
    rank: int,
    n_clusters: int,
    seed: int = 0,
    top_k: int | None = 512,
    max_iters: int = 200,
    init: str = "data-anchor",
):
    """Factorize the count tensor, extract medoid patterns, and label every
    point by its cell's nearest medoid. Ranks clamp to each mode size."""
    ranks = tuple(min(rank, s) for s in dataset.tensor.shape)
    model = fit(
        dataset.tensor,
        NTDConfig(ranks=ranks, max_iters=max_iters, tol=1e-7, seed=seed,
                  init=init),
    )
    patterns = extract_patterns(model, dataset, n_clusters, top_k=top_k)
    labels = np.array(
        [patterns.assignment.get(cell, -1) for cell in cells], dtype=int
    )
    return labels, model, patterns


@dataclass
class SweepPoint:
    rank: int
    per_target_error: list[float]
    mean_error: float
    relative_reconstruction_error: float


def run_rank_sweep(
    data: LabeledPoints,
    targets: Sequence[Sequence[float]],
    rank_values: Sequence[int],
    n_clusters: int,
    seed: int = 0,
) -> tuple[list[SweepPoint], list[str]]:
    """Recovery error of the full pipeline across core ranks.

    Ranks above a mode size are skipped with a diagnostic; each retained
    rank reports per-target EMD between the grid-encoded targets and the
    recovered medoids under optimal matching.
    """
    dataset, cells = grid_dataset(data.points)
    target_sigs = [grid_signature(t) for t in targets]
    results: list[SweepPoint] = []
    diagnostics: list[str] = []
    for rank in rank_values:
        if any(rank > s for s in dataset.tensor.shape):
            diagnostics.append(
                f"rank {rank} exceeds a mode size "
                f"{tuple(dataset.tensor.shape)}; skipped"
            )
            continue
        _, model, patterns = pipeline_labels(
            dataset, cells, rank, n_clusters, seed=seed, top_k=n_clusters
        )
        errors = recovery_error(target_sigs, patterns.medoids)
        finite = [e for e in errors if math.isfinite(e)]
        mean = float(np.mean(errors)) if len(finite) == len(errors) else float("inf")
        results.append(
            SweepPoint(
                rank=rank,
                per_target_error=errors,
                mean_error=mean,
                relative_reconstruction_error=reconstruction_error(
                    model, dataset.tensor
                ),
            )
        )
    return results, diagnostics


# --------------------------------------------------------------------------
# benchmark orchestration (CSV + JSON + figures)

CSV_FIELDS = [
    "dataset",
    "method",
    "rank",
    "clusters",
    "seed",
    "per_target_error",
    "fmi",
    "ari",
    "v_measure",
    "mutual_info",
    "mutual_info_normalized",
    "runtime_s",
]


def _write_rows(path: Path, rows: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        writer.writerows(rows)


def _row(dataset, method, rank, clusters, seed, errors, scores, runtime):
    return {
        "dataset": dataset,
        "method": method,
        "rank": rank,
        "clusters": clusters,
        "seed": seed,
        "per_target_error": ";".join(f"{e:g}" for e in errors),
        "fmi": f"{scores.fmi:.6f}" if scores else "",
        "ari": f"{scores.ari:.6f}" if scores else "",
        "v_measure": f"{scores.v_measure:.6f}" if scores else "",
        "mutual_info": f"{scores.mutual_info:.6f}" if scores else "",
        "mutual_info_normalized": (
            f"{scores.mutual_info_normalized:.6f}" if scores else ""
        ),
        "runtime_s": f"{runtime:.3f}",
    }


def run_gaussian_benchmark(
    out_dir,
    seeds: Sequence[int] = tuple(range(10)),
    rank_values: Sequence[int] = (1, 3),
    n_clusters: int = 3,
) -> dict:
    """Recovery benchmark over seeds and ranks; writes CSV, a JSON summary,
    and an error-curve figure. Returns the summary dict."""
    out_dir = Path(out_dir)
    rows = []
    curves: dict[int, list[float]] = {r: [] for r in rank_values}
    for seed in seeds:
        spec = default_gaussian_spec(seed=seed)
        data = sample_gaussian_patterns(spec)
        sweep, diags = run_rank_sweep(
            data, spec.targets, rank_values, n_clusters, seed=seed
        )
        dataset, cells = grid_dataset(data.points)
        for point in sweep:
            t0 = time.perf_counter()
            labels, _, _ = pipeline_labels(
                dataset, cells, point.rank, n_clusters, seed=seed,
                top_k=n_clusters,
            )
            scores = clustering_scores(data.labels.tolist(), labels.tolist())
            rows.append(
                _row(
                    "gaussian", "ntd-pipeline", point.rank, n_clusters, seed,
                    point.per_target_error, scores,
                    time.perf_counter() - t0,
                )
            )
            curves[point.rank].append(point.mean_error)
    _write_rows(out_dir / "bench_gaussian.csv", rows)
    summary = {
        "version": 1,
        "suite": "gaussian",
        "rank_values": list(rank_values),
        "clusters": n_clusters,
        "seeds": list(seeds),
        "mean_error_by_rank": {
            str(r): [e if math.isfinite(e) else None for e in curve]
            for r, curve in curves.items()
        },
        "rows": rows,
    }
    (out_dir / "bench_gaussian.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True), encoding="utf-8"
    )
    from .plotting import save_rank_sweep_figure

    save_rank_sweep_figure(curves, out_dir / "bench_gaussian.png")
    _update_latest(out_dir, summary)
    return summary


def run_box_benchmark(out_dir, seed: int = 0, rank: int = 6,
                      n_clusters: int = 10) -> dict:
    """Score the pipeline against k-means and Euclidean agglomerative
    baselines on the box dataset; writes CSV, JSON, and a bar figure."""
    out_dir = Path(out_dir)
    spec = table_box_spec(seed=seed)
    data = generate_box_clusters(spec)
    rows = []

    t0 = time.perf_counter()
    dataset, cells = natural_breaks_dataset(data.points, BOX_LEVEL_COUNTS)
    labels, _, _ = pipeline_labels(dataset, cells, rank, n_clusters, seed=seed)
    pipe_scores = clustering_scores(data.labels.tolist(), labels.tolist())
    rows.append(
        _row("boxes", "ntd-pipeline", rank, n_clusters, seed, [],
             pipe_scores, time.perf_counter() - t0)
    )

    t0 = time.perf_counter()
    km = kmeans_labels(data.points, n_clusters, seed=seed)
    km_scores = clustering_scores(data.labels.tolist(), km.tolist())
    rows.append(
        _row("boxes", "kmeans", "", n_clusters, seed, [], km_scores,
             time.perf_counter() - t0)
    )

    t0 = time.perf_counter()
    ah = ahc_euclidean_labels(data.points, n_clusters)
    ah_scores = clustering_scores(data.labels.tolist(), ah.tolist())
    rows.append(
        _row("boxes", "ahc-euclidean", "", n_clusters, seed, [], ah_scores,
             time.perf_counter() - t0)
    )

    _write_rows(out_dir / "bench_boxes.csv", rows)
    summary = {
        "version": 1,
        "suite": "boxes",
        "rank": rank,
        "clusters": n_clusters,
        "seed": seed,
        "scores": {
            "ntd-pipeline": pipe_scores.as_dict(),
            "kmeans": km_scores.as_dict(),
            "ahc-euclidean": ah_scores.as_dict(),
        },
        "rows": rows,
    }
    (out_dir / "bench_boxes.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True), encoding="utf-8"
    )
    from .plotting import save_score_comparison_figure

    save_score_comparison_figure(summary["scores"], out_dir / "bench_boxes.png")
    _update_latest(out_dir, summary)
    return summary


def _update_latest(out_dir: Path, summary: dict) -> None:
    latest_path = out_dir / "bench_latest.json"
    merged: dict = {"version": 1, "suites": {}}
    if latest_path.exists():
        try:
            merged = json.loads(latest_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            pass
    merged.setdefault("suites", {})[summary["suite"]] = summary
    latest_path.write_text(
        json.dumps(merged, indent=2, sort_keys=True), encoding="utf-8"
    )
