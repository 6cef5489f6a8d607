"""Dataset ingestion, [0,1] normalization, multi-modal fusion, and a
synthetic Gaussian-cluster generator for desk-scale experiments."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .autodiff import Tensor
from .errors import DataError
from .hypergraph import Hypergraph, build_knn_hyperedges, concat_hypergraphs
from .seeding import substream


@dataclass
class Dataset:
    """Per-modality feature matrices plus one integer class label per vertex."""

    modalities: list[np.ndarray]
    labels: np.ndarray
    class_names: list[str]

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=int).reshape(-1)
        n = self.labels.shape[0]
        for i, X in enumerate(self.modalities):
            X = np.asarray(X, dtype=np.float64)
            if X.ndim != 2 or X.shape[0] != n:
                raise DataError(f"modality {i}: expected {n} rows")
            self.modalities[i] = X
        c = len(self.class_names)
        if self.labels.min() < 0 or self.labels.max() >= c:
            raise DataError("label out of range")

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    @property
    def num_classes(self) -> int:
        return len(self.class_names)


@dataclass
class SynthConfig:
    """Gaussian class clusters per modality, ADNI-shaped defaults."""

    n: int = 240
    dims: tuple[int, ...] = (16, 16, 8)
    num_classes: int = 3
    separation: float = 2.0      # min class-mean distance in within-std units per sqrt(dim)
    within_std: float = 1.0
    label_noise: float = 0.15    # fraction of labels resampled uniformly
    seed: int = 0

    def __post_init__(self):
        if self.n < 2 * self.num_classes:
            raise ValueError("need at least two vertices per class")
        if self.separation < 0 or self.within_std <= 0:
            raise ValueError("separation >= 0 and within_std > 0 required")
        if not 0.0 <= self.label_noise <= 1.0:
            raise ValueError("label_noise in [0, 1]")


def load_csv(feature_paths: list, label_path) -> Dataset:
    """Read one CSV per modality plus a labels CSV, aligning rows by the
    `id` column. Label values may be class names (mapped in sorted order)
    or integer indices."""
    if not feature_paths:
        raise DataError("no modality files given")
    ids = None
    modalities = []
    for path in feature_paths:
        file_ids, matrix = _read_feature_csv(path)
        if ids is None:
            ids = file_ids
        elif file_ids != ids:
            bad = next(
                (a for a, b in zip(file_ids, ids) if a != b),
                file_ids[-1] if len(file_ids) != len(ids) else "?",
            )
            raise DataError(f"{path}: row ids do not match (first offender: {bad})")
        modalities.append(matrix)

    label_map = _read_labels_csv(label_path)
    missing = [i for i in ids if i not in label_map]
    if missing:
        raise DataError(f"{label_path}: no label for id {missing[0]}")
    raw = [label_map[i] for i in ids]
    names = sorted(set(raw))
    if all(name.lstrip("-").isdigit() for name in names):
        labels = np.array([int(v) for v in raw])
        names = [str(c) for c in range(labels.max() + 1)]
    else:
        index = {name: i for i, name in enumerate(names)}
        labels = np.array([index[v] for v in raw])
    return Dataset(modalities=modalities, labels=labels, class_names=names)


def _read_feature_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if len(rows) < 2:
        raise DataError(f"{path}: no data rows")
    header = rows[0]
    if not header or header[0].strip().lower() != "id":
        raise DataError(f"{path}: first column must be 'id'")
    ids = [r[0] for r in rows[1:]]
    if len(set(ids)) != len(ids):
        dup = next(i for i in ids if ids.count(i) > 1)
        raise DataError(f"{path}: duplicate id {dup}")
    try:
        matrix = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    except ValueError as exc:
        raise DataError(f"{path}: unparsable value ({exc})") from exc
    if matrix.ndim != 2 or matrix.shape[1] == 0:
        raise DataError(f"{path}: expected at least one feature column")
    return ids, matrix


def _read_labels_csv(path) -> dict:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if len(rows) < 2 or [c.strip().lower() for c in rows[0][:2]] != ["id", "label"]:
        raise DataError(f"{path}: expected 'id,label' header")
    out = {}
    for r in rows[1:]:
        if r[0] in out:
            raise DataError(f"{path}: duplicate id {r[0]}")
        out[r[0]] = r[1].strip()
    return out


def normalize(dataset: Dataset) -> Dataset:
    """Per-column min-max scaling to [0,1]; constant columns map to 0.5."""
    scaled = []
    for X in dataset.modalities:
        if not np.isfinite(X).all():
            raise DataError("non-finite feature values")
        lo = X.min(axis=0)
        hi = X.max(axis=0)
        span = hi - lo
        constant = span == 0
        span = np.where(constant, 1.0, span)
        Y = (X - lo) / span
        Y[:, constant] = 0.5
        scaled.append(Y)
    return Dataset(
        modalities=scaled,
        labels=dataset.labels.copy(),
        class_names=list(dataset.class_names),
    )


def fuse_and_build(dataset: Dataset, k: int) -> tuple[Tensor, Hypergraph]:
    """Per-modality kNN hypergraphs concatenated edge-wise; features
    concatenated column-wise into the layer-1 input."""
    graphs = [build_knn_hyperedges(X, k) for X in dataset.modalities]
    fused = np.hstack(dataset.modalities)
    return Tensor(fused), concat_hypergraphs(graphs)


def generate_synthetic(cfg: SynthConfig) -> Dataset:
    """Balanced Gaussian clusters; class means scaled so their minimum
    pairwise distance is separation * within_std * sqrt(dim)."""
    rng = substream(cfg.seed, "synth")
    labels = np.arange(cfg.n) % cfg.num_classes
    labels = labels[rng.permutation(cfg.n)]

    modalities = []
    for d in cfg.dims:
        means = np.zeros((cfg.num_classes, d))
        if cfg.separation > 0:
            raw = rng.normal(size=(cfg.num_classes, d))
            dmin = min(
                np.linalg.norm(raw[a] - raw[b])
                for a in range(cfg.num_classes)
                for b in range(a + 1, cfg.num_classes)
            )
            means = raw * (cfg.separation * cfg.within_std * np.sqrt(d) / dmin)
        X = means[labels] + rng.normal(scale=cfg.within_std, size=(cfg.n, d))
        modalities.append(X)

    if cfg.label_noise > 0:
        flip = rng.choice(cfg.n, size=round(cfg.label_noise * cfg.n), replace=False)
        labels = labels.copy()
        labels[flip] = rng.integers(0, cfg.num_classes, size=flip.size)

    names = ["NC", "MCI", "AD"]
    if cfg.num_classes != 3:
        names = [f"class_{c}" for c in range(cfg.num_classes)]
    return normalize(
        Dataset(modalities=modalities, labels=labels, class_names=names)
    )
