"""Georeferenced ingestion: sites and event sources from CSV, circular
non-overlapping regions of interest, per-region aggregation, histogram
equalization, and assembly of the site-count tensor.

Distances are great-circle (haversine) on WGS84 coordinates with an Earth
radius of 6 371 000 m, accurate to well under a meter at city scale.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "SiteRecord",
    "EventSource",
    "ROI",
    "ROIAggregate",
    "ModeEncoding",
    "TensorDataset",
    "haversine_m",
    "load_sites",
    "load_events",
    "build_rois",
    "aggregate",
    "equalize_bins",
    "assign_bin",
    "build_tensor",
    "PERIODS",
    "NONE_LABEL",
]

EARTH_RADIUS_M = 6_371_000.0
PERIODS = ("dawn", "morning", "afternoon", "night")
NONE_LABEL = "none"

KIND_COUNT = "count"
KIND_CATEGORICAL = "categorical-indicator"
KIND_COUNT_PERIOD = "count-with-period"
SOURCE_KINDS = (KIND_COUNT, KIND_CATEGORICAL, KIND_COUNT_PERIOD)


@dataclass(frozen=True)
class SiteRecord:
    site_id: str
    lat: float
    lon: float
    attributes: tuple[tuple[str, str], ...] = ()


@dataclass
class EventSource:
    """A georeferenced point source that becomes one or two tensor modes."""

    name: str
    kind: str
    lat: np.ndarray
    lon: np.ndarray
    category: list[str] | None = None
    period: list[str] | None = None

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise ValueError(f"unknown source kind {self.kind!r}")


@dataclass
class ROI:
    """Circular region centered on a retained site; sites whose disks would
    overlap an earlier ROI are absorbed into it, not dropped."""

    site_id: str
    lat: float
    lon: float
    radius_m: float
    absorbed: list[str] = field(default_factory=list)


@dataclass
class ROIAggregate:
    site_id: str
    values: dict[str, object]  # mode name -> count | category label


@dataclass
class ModeEncoding:
    """Label encoding for one tensor mode.

    Positions are 1-based; ``phi`` maps a position to its semantic ID and
    ``labels`` carries the decoded meaning (bin interval or category name).
    IDs are the ordinal positions themselves, so they order bin levels and
    category ranks along the mode axis.
    """

    mode_name: str
    kind: str  # "binned-count" | "categorical"
    labels: list[str]
    bin_edges: list[float] | None = None

    @property
    def size(self) -> int:
        return len(self.labels)

    def phi(self, position: int) -> int:
        if not 1 <= position <= self.size:
            raise ValueError(
                f"position {position} outside [1, {self.size}] for mode "
                f"{self.mode_name!r}"
            )
        return position

    def label_of(self, semantic_id: int) -> str:
        return self.labels[semantic_id - 1]


@dataclass
class TensorDataset:
    """Count tensor plus the encodings and the cell-to-sites index."""

    tensor: np.ndarray
    encodings: list[ModeEncoding]
    site_index: dict[tuple[int, ...], list[str]]

    @property
    def n_sites(self) -> int:
        return int(round(float(self.tensor.sum())))


def haversine_m(lat1, lon1, lat2, lon2):
    """Great-circle distance in meters; accepts scalars or arrays."""
    p1, p2 = np.radians(lat1), np.radians(lat2)
    dphi = p2 - p1
    dlmb = np.radians(lon2) - np.radians(lon1)
    a = np.sin(dphi / 2.0) ** 2 + np.cos(p1) * np.cos(p2) * np.sin(dlmb / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))


def _check_coords(lat: float, lon: float) -> str | None:
    if not -90.0 <= lat <= 90.0:
        return f"latitude {lat} outside [-90, 90]"
    if not -180.0 <= lon <= 180.0:
        return f"longitude {lon} outside [-180, 180]"
    return None


def load_sites(path) -> tuple[list[SiteRecord], list[str]]:
    """Read a ``site_id,lat,lon[,attr...]`` CSV.

    Malformed rows are reported in the diagnostics list (1-based data row
    numbers), never silently dropped. An empty file is an error.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty sites file")
        header = [h.strip() for h in header]
        required = ["site_id", "lat", "lon"]
        if header[: len(required)] != required:
            raise ValueError(
                f"{path}: expected header starting with {required}, got {header}"
            )
        attr_names = header[3:]
        records: list[SiteRecord] = []
        diagnostics: list[str] = []
        seen: set[str] = set()
        for rownum, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 3:
                diagnostics.append(f"row {rownum}: expected >= 3 columns")
                continue
            site_id = row[0].strip()
            try:
                lat, lon = float(row[1]), float(row[2])
            except ValueError:
                diagnostics.append(f"row {rownum}: unparseable coordinates")
                continue
            problem = _check_coords(lat, lon)
            if problem:
                diagnostics.append(f"row {rownum}: {problem}")
                continue
            if site_id in seen:
                diagnostics.append(f"row {rownum}: duplicate site_id {site_id!r}")
                continue
            seen.add(site_id)
            attrs = tuple(
                (name, row[3 + i].strip() if 3 + i < len(row) else "")
                for i, name in enumerate(attr_names)
            )
            records.append(SiteRecord(site_id, lat, lon, attrs))
    if not records:
        raise ValueError(f"{path}: no valid site rows")
    return records, diagnostics


def load_events(path, name: str, kind: str | None = None) -> tuple[EventSource, list[str]]:
    """Read a ``lat,lon[,category][,period]`` CSV as an event source.

    When ``kind`` is not declared it is inferred: a period column selects
    count-with-period, otherwise plain count (a category column alone only
    means categorical-indicator when the manifest says so).
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ValueError(f"{path}: empty events file")
        if header[:2] != ["lat", "lon"]:
            raise ValueError(f"{path}: expected header lat,lon[,...], got {header}")
        col = {c: i for i, c in enumerate(header)}
        has_period = "period" in col
        has_category = "category" in col
        if kind is None:
            kind = KIND_COUNT_PERIOD if has_period else KIND_COUNT
        if kind == KIND_COUNT_PERIOD and not has_period:
            raise ValueError(f"{path}: kind {kind!r} requires a period column")
        if kind == KIND_CATEGORICAL and not has_category:
            raise ValueError(f"{path}: kind {kind!r} requires a category column")
        lats: list[float] = []
        lons: list[float] = []
        cats: list[str] = []
        periods: list[str] = []
        diagnostics: list[str] = []
        for rownum, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                lat, lon = float(row[col["lat"]]), float(row[col["lon"]])
            except (ValueError, IndexError):
                diagnostics.append(f"row {rownum}: unparseable coordinates")
                continue
            problem = _check_coords(lat, lon)
            if problem:
                diagnostics.append(f"row {rownum}: {problem}")
                continue
            if has_period:
                period = row[col["period"]].strip()
                if period not in PERIODS:
                    diagnostics.append(
                        f"row {rownum}: unknown period {period!r}"
                    )
                    continue
                periods.append(period)
            if has_category:
                cats.append(row[col["category"]].strip())
            lats.append(lat)
            lons.append(lon)
    source = EventSource(
        name=name,
        kind=kind,
        lat=np.asarray(lats),
        lon=np.asarray(lons),
        category=cats if has_category else None,
        period=periods if has_period else None,
    )
    return source, diagnostics


def build_rois(sites: Sequence[SiteRecord], radius_m: float = 200.0) -> list[ROI]:
    """Non-overlapping circular regions, one per retained site.

    Sites are swept in ascending ``site_id`` order; a site closer than
    2 * radius to an already accepted center is absorbed into that ROI.
    """
    if radius_m <= 0:
        raise ValueError("radius_m must be > 0")
    rois: list[ROI] = []
    acc_lat: list[float] = []
    acc_lon: list[float] = []
    for site in sorted(sites, key=lambda s: s.site_id):
        if acc_lat:
            d = haversine_m(
                np.asarray(acc_lat), np.asarray(acc_lon), site.lat, site.lon
            )
            nearest = int(np.argmin(d))
            if d[nearest] < 2.0 * radius_m:
                rois[nearest].absorbed.append(site.site_id)
                continue
        rois.append(ROI(site.site_id, site.lat, site.lon, radius_m))
        acc_lat.append(site.lat)
        acc_lon.append(site.lon)
    return rois


def _modal(values: Iterable[str], ordering: Sequence[str] | None = None) -> str:
    """Most frequent value; ties resolve to the smallest label in
    ``ordering`` (lexicographic when no ordering is given)."""
    counts: dict[str, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    if not counts:
        return NONE_LABEL
    if ordering is None:
        return min(counts, key=lambda v: (-counts[v], v))
    rank = {v: i for i, v in enumerate(ordering)}
    return min(counts, key=lambda v: (-counts[v], rank.get(v, len(rank))))


def aggregate(
    rois: Sequence[ROI], sources: Sequence[EventSource]
) -> list[ROIAggregate]:
    """Per-ROI aggregation: event counts inside the radius for count
    sources, the modal category (or modal period) for label-bearing ones."""
    if not sources:
        raise ValueError("no event sources to aggregate")
    aggs = [ROIAggregate(r.site_id, {}) for r in rois]
    for src in sources:
        for roi, agg in zip(rois, aggs):
            if len(src.lat):
                d = haversine_m(src.lat, src.lon, roi.lat, roi.lon)
                inside = d <= roi.radius_m
            else:
                inside = np.zeros(0, dtype=bool)
            if src.kind == KIND_COUNT:
                agg.values[src.name] = int(np.count_nonzero(inside))
            elif src.kind == KIND_CATEGORICAL:
                hits = [c for c, ok in zip(src.category, inside) if ok]
                agg.values[src.name] = _modal(hits)
            else:  # count with modal period
                agg.values[src.name] = int(np.count_nonzero(inside))
                hits = [p for p, ok in zip(src.period, inside) if ok]
                agg.values[f"{src.name}_period"] = _modal(hits, PERIODS)
    return aggs


def equalize_bins(values: Sequence[float], n_bins: int) -> list[float]:
    """Interior quantile edges at levels 1/B .. (B-1)/B.

    Duplicate quantiles collapse, so heavily skewed data may yield fewer
    bins than requested; every value falls into exactly one bin.
    """
    if n_bins < 1:
        raise ValueError("bin count must be >= 1")
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("cannot equalize an empty value list")
    if n_bins == 1:
        return []
    qs = np.quantile(values, [i / n_bins for i in range(1, n_bins)])
    vmax = float(values.max())
    edges: list[float] = []
    for q in qs:
        # an edge only separates bins when strictly below the maximum
        if (not edges or q > edges[-1]) and q < vmax:
            edges.append(float(q))
    return edges


def assign_bin(value: float, edges: Sequence[float]) -> int:
    """0-based bin index; bins are right-closed: (-inf, e0], (e0, e1], ..."""
    return int(np.searchsorted(np.asarray(edges), value, side="left"))


@dataclass(frozen=True)
class ModeSpec:
    """Declaration of one tensor mode derived from a source."""

    name: str
    kind: str  # "binned-count" | "categorical" | "period"
    n_bins: int = 4


def mode_specs_for(sources: Sequence[EventSource], bins: dict[str, int] | None = None) -> list[ModeSpec]:
    """Expand sources into tensor modes: count sources contribute one binned
    mode, count-with-period an extra modal-period mode, categorical ones a
    category mode."""
    bins = bins or {}
    specs: list[ModeSpec] = []
    for src in sources:
        b = int(bins.get(src.name, 4))
        if src.kind == KIND_COUNT:
            specs.append(ModeSpec(src.name, "binned-count", b))
        elif src.kind == KIND_COUNT_PERIOD:
            specs.append(ModeSpec(src.name, "binned-count", b))
            specs.append(ModeSpec(f"{src.name}_period", "period"))
        else:
            specs.append(ModeSpec(src.name, "categorical"))
    return specs


def _bin_labels(edges: Sequence[float]) -> list[str]:
    if not edges:
        return ["all"]
    labels = [f"<= {edges[0]:g}"]
    labels += [f"({edges[i - 1]:g}, {edges[i]:g}]" for i in range(1, len(edges))]
    labels.append(f"> {edges[-1]:g}")
    return labels


def build_tensor(
    aggregates: Sequence[ROIAggregate], mode_specs: Sequence[ModeSpec]
) -> TensorDataset:
    """Count sites per characteristic combination.

    Every aggregate must cover every declared mode; the tensor entry at a
    multi-index is the number of sites sharing that combination, so the
    entries sum to the retained site count.
    """
    if not aggregates:
        raise ValueError("no aggregates to tensorize")
    encodings: list[ModeEncoding] = []
    positions = np.zeros((len(aggregates), len(mode_specs)), dtype=int)
    for m, spec in enumerate(mode_specs):
        missing = [a.site_id for a in aggregates if spec.name not in a.values]
        if missing:
            raise ValueError(
                f"aggregate for site {missing[0]!r} lacks mode {spec.name!r}"
            )
        raw = [a.values[spec.name] for a in aggregates]
        if spec.kind == "binned-count":
            vals = np.asarray(raw, dtype=np.float64)
            if np.any(vals < 0):
                raise ValueError(f"negative count in mode {spec.name!r}")
            edges = equalize_bins(vals, spec.n_bins)
            positions[:, m] = np.searchsorted(np.asarray(edges), vals, side="left")
            encodings.append(
                ModeEncoding(spec.name, "binned-count", _bin_labels(edges), edges)
            )
        elif spec.kind == "period":
            labels = list(PERIODS) + [NONE_LABEL]
            lookup = {lab: i for i, lab in enumerate(labels)}
            for a, v in zip(aggregates, raw):
                if v not in lookup:
                    raise ValueError(
                        f"site {a.site_id!r}: unknown period {v!r} in mode "
                        f"{spec.name!r}"
                    )
            positions[:, m] = [lookup[v] for v in raw]
            encodings.append(ModeEncoding(spec.name, "categorical", labels))
        else:  # categorical
            cats = sorted({str(v) for v in raw if str(v) != NONE_LABEL})
            labels = cats + [NONE_LABEL]
            lookup = {lab: i for i, lab in enumerate(labels)}
            positions[:, m] = [lookup[str(v)] for v in raw]
            encodings.append(ModeEncoding(spec.name, "categorical", labels))
    shape = tuple(e.size for e in encodings)
    X = np.zeros(shape)
    site_index: dict[tuple[int, ...], list[str]] = {}
    for a, pos in zip(aggregates, positions):
        cell = tuple(int(p) for p in pos)
        X[cell] += 1.0
        site_index.setdefault(cell, []).append(a.site_id)
    return TensorDataset(X, encodings, site_index)
