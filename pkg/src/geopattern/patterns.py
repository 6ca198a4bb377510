"""Pattern signatures: extraction from a fitted model, EMD clustering,
medoid selection, and nearest-pattern assignment of data cells.

A signature is the per-mode vector of semantic IDs picked by the strongest
entry of each selected factor column; signatures are compared with a 1-D
earth mover's distance over the ordered ID vector. All tie-breaks are
deterministic so a fixed model and parameters always produce the same
pattern set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .ntd import NTDModel

__all__ = [
    "PatternSignature",
    "PatternSet",
    "emd",
    "core_signatures",
    "site_signatures",
    "cluster_signatures",
    "medoid",
    "assign",
    "extract_patterns",
]


@dataclass(frozen=True)
class PatternSignature:
    """Per-mode semantic ID vector with the weight of its source entry."""

    ids: tuple[int, ...]
    weight: float
    origin: str  # "core" | "data"

    def __post_init__(self):
        if self.weight < 0:
            raise ValueError("signature weight must be >= 0")
        if self.origin not in ("core", "data"):
            raise ValueError(f"unknown signature origin {self.origin!r}")


@dataclass
class PatternSet:
    """Clustered medoid signatures plus the cell-to-medoid assignment."""

    medoids: list[PatternSignature]
    cluster_members: list[list[PatternSignature]]
    assignment: dict[tuple[int, ...], int]  # data cell ids -> medoid index
    rank: int
    n_clusters: int
    diagnostics: list[str] = field(default_factory=list)


def _ids_of(sig) -> np.ndarray:
    ids = sig.ids if isinstance(sig, PatternSignature) else sig
    return np.asarray(ids, dtype=np.float64)


def emd(a, b) -> float:
    """1-D earth mover's distance between two ID vectors.

    The vectors are read as discrete distributions over the ordered mode
    axis; the distance is the summed absolute difference of their prefix
    sums, which equals the optimal-transport cost whenever both vectors
    carry the same total mass (and extends it unchanged when they do not).
    """
    va, vb = _ids_of(a), _ids_of(b)
    if va.shape != vb.shape:
        raise ValueError(f"signature lengths differ: {va.shape} vs {vb.shape}")
    return float(np.abs(np.cumsum(va - vb)).sum())


def _emd_matrix(rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    ca = np.cumsum(rows, axis=1)
    cb = np.cumsum(cols, axis=1)
    return np.abs(ca[:, None, :] - cb[None, :, :]).sum(axis=2)


def core_signatures(
    model: NTDModel,
    encodings: Sequence,
    top_k: int | None = 512,
    threshold_frac: float = 1e-6,
) -> list[PatternSignature]:
    """Signatures of significant core entries, heaviest first.

    Each core entry above ``threshold_frac * max(core)`` selects, per mode,
    the ID of the strongest entry of its factor column (argmax ties go to
    the smallest index). Entries that map to the same ID vector are merged
    with their weights summed; at most ``top_k`` signatures are returned.
    """
    if len(encodings) != model.core.ndim:
        raise ValueError(
            f"{len(encodings)} encodings for an order-{model.core.ndim} core"
        )
    gmax = float(model.core.max(initial=0.0))
    if gmax <= 0.0:
        return []
    argmax_ids = [
        [enc.phi(int(np.argmax(F[:, j])) + 1) for j in range(F.shape[1])]
        for enc, F in zip(encodings, model.factors)
    ]
    cutoff = threshold_frac * gmax
    merged: dict[tuple[int, ...], float] = {}
    flat = model.core.ravel()
    keep = np.nonzero(flat > cutoff)[0]
    for pos in keep:
        idx = np.unravel_index(pos, model.core.shape)
        ids = tuple(argmax_ids[k][j] for k, j in enumerate(idx))
        merged[ids] = merged.get(ids, 0.0) + float(flat[pos])
    ordered = sorted(merged.items(), key=lambda kv: (-kv[1], kv[0]))
    if top_k is not None:
        ordered = ordered[:top_k]
    return [PatternSignature(ids, w, "core") for ids, w in ordered]


def site_signatures(dataset) -> list[PatternSignature]:
    """One signature per populated tensor cell, weighted by its count."""
    X = dataset.tensor
    sigs = []
    for pos in np.nonzero(X.ravel())[0]:
        idx = np.unravel_index(pos, X.shape)
        ids = tuple(
            enc.phi(int(i) + 1) for enc, i in zip(dataset.encodings, idx)
        )
        sigs.append(PatternSignature(ids, float(X[idx]), "data"))
    return sigs


def cluster_signatures(
    sigs: Sequence[PatternSignature], n_clusters: int
) -> tuple[list[list[int]], list[str]]:
    """Average-linkage agglomeration of signatures under EMD.

    Returns index clusters sorted by first member. Merges always pick the
    smallest pair distance, ties by the smallest pair of active positions;
    if ``n_clusters`` exceeds the signature count every signature becomes
    its own cluster and a diagnostic is emitted.
    """
    n = len(sigs)
    diagnostics: list[str] = []
    if n == 0:
        return [], ["no signatures to cluster"]
    if n_clusters > n:
        diagnostics.append(
            f"requested {n_clusters} clusters from {n} signatures; "
            f"returning singletons"
        )
        n_clusters = n
    arr = np.stack([_ids_of(s) for s in sigs])
    work = _emd_matrix(arr, arr)
    np.fill_diagonal(work, np.inf)
    size = np.ones(n)
    members: list[list[int]] = [[i] for i in range(n)]
    active = np.ones(n, dtype=bool)
    for _ in range(n - n_clusters):
        # row-major argmin lands on the lexicographically smallest tied pair
        p, q = divmod(int(np.argmin(work)), n)
        if p > q:
            p, q = q, p
        merged_row = (size[p] * work[p] + size[q] * work[q]) / (size[p] + size[q])
        work[p], work[:, p] = merged_row, merged_row
        work[p, p] = np.inf
        work[q], work[:, q] = np.inf, np.inf
        size[p] += size[q]
        members[p].extend(members[q])
        active[q] = False
    return [sorted(members[i]) for i in range(n) if active[i]], diagnostics


def medoid(cluster: Sequence[PatternSignature]) -> PatternSignature:
    """Member minimizing total EMD to the cluster; ties prefer the heavier
    signature, then the lexicographically smallest ID vector."""
    if not cluster:
        raise ValueError("medoid of an empty cluster")
    arr = np.stack([_ids_of(s) for s in cluster])
    totals = _emd_matrix(arr, arr).sum(axis=1)
    best = min(
        range(len(cluster)),
        key=lambda i: (totals[i], -cluster[i].weight, cluster[i].ids),
    )
    return cluster[best]


def assign(
    site_sigs: Sequence[PatternSignature],
    medoids: Sequence[PatternSignature],
) -> list[int]:
    """Index of the EMD-nearest medoid for each site signature (ties to the
    lowest medoid index)."""
    if not medoids:
        raise ValueError("cannot assign against an empty medoid list")
    if not site_sigs:
        return []
    D = _emd_matrix(
        np.stack([_ids_of(s) for s in site_sigs]),
        np.stack([_ids_of(m) for m in medoids]),
    )
    return [int(i) for i in D.argmin(axis=1)]


def extract_patterns(
    model: NTDModel,
    dataset,
    n_clusters: int,
    top_k: int | None = 512,
    threshold_frac: float = 1e-6,
) -> PatternSet:
    """Full extraction: core signatures -> EMD clustering -> medoids ->
    assignment of every populated data cell to its nearest medoid."""
    rank = int(max(model.core.shape))
    sigs = core_signatures(model, dataset.encodings, top_k, threshold_frac)
    if not sigs:
        return PatternSet(
            medoids=[],
            cluster_members=[],
            assignment={},
            rank=rank,
            n_clusters=n_clusters,
            diagnostics=["degenerate fit: zero core tensor"],
        )
    clusters, diagnostics = cluster_signatures(sigs, n_clusters)
    member_lists = [[sigs[i] for i in cl] for cl in clusters]
    medoids = [medoid(cl) for cl in member_lists]
    data_sigs = site_signatures(dataset)
    labels = assign(data_sigs, medoids) if data_sigs else []
    X = dataset.tensor
    cells = [
        tuple(int(i) for i in np.unravel_index(pos, X.shape))
        for pos in np.nonzero(X.ravel())[0]
    ]
    assignment = {cell: lab for cell, lab in zip(cells, labels)}
    return PatternSet(
        medoids=medoids,
        cluster_members=member_lists,
        assignment=assignment,
        rank=rank,
        n_clusters=n_clusters,
        diagnostics=diagnostics,
    )
