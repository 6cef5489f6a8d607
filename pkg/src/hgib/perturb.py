"""Test-time robustness attacks: random hyperedge dropping and Gaussian
feature noise, plus re-evaluation of a trained model under either."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import metrics, model
from . import autodiff as ad
from .autodiff import Tensor
from .data import Dataset, fuse_and_build, normalize
from .errors import StructureError
from .hypergraph import Hypergraph
from .metrics import MetricsReport
from .seeding import substream

_DROP_RETRIES = 100


@dataclass
class AttackConfig:
    kind: str = "none"           # none | drop | noise
    drop_fraction: float = 0.2
    rho: float = 0.01
    seed: int = 0
    per_vertex_max: bool = False  # alternative reading of the noise scale r

    def __post_init__(self):
        if self.kind not in ("none", "drop", "noise"):
            raise ValueError(f"unknown attack kind {self.kind!r}")
        if not 0.0 <= self.drop_fraction < 1.0:
            raise ValueError("drop_fraction in [0, 1)")
        if self.rho < 0:
            raise ValueError("rho >= 0 required")


def drop_hyperedges(g: Hypergraph, fraction: float, seed: int) -> Hypergraph:
    """Remove a uniformly random floor(fraction * |E|) hyperedges, resampling
    (bounded) until every vertex keeps at least one membership."""
    if not 0.0 <= fraction < 1.0:
        raise ValueError("fraction in [0, 1)")
    n_drop = int(np.floor(fraction * g.num_hyperedges))
    if n_drop == 0:
        return g
    rng = substream(seed, "attack")
    for _ in range(_DROP_RETRIES):
        dropped = rng.choice(g.num_hyperedges, size=n_drop, replace=False)
        keep = np.ones(g.num_hyperedges, dtype=bool)
        keep[dropped] = False
        sub = g.incidence[:, keep]
        if sub.sum(axis=1).min() >= 1:
            return Hypergraph(sub)
    raise StructureError("could not drop hyperedges without uncovering a vertex")


def noise_scale(X: np.ndarray, per_vertex_max: bool = False) -> float:
    """The scale r: mean of the per-dimension feature maxima (default), or
    mean of the per-vertex maxima under the alternative reading."""
    axis = 1 if per_vertex_max else 0
    return float(X.max(axis=axis).mean())


def inject_feature_noise(
    X: np.ndarray, rho: float, seed: int, per_vertex_max: bool = False
) -> np.ndarray:
    """X + rho * r * E with E i.i.d. standard normal; identity at rho=0."""
    X = np.asarray(X, dtype=np.float64)
    if rho == 0.0:
        return X.copy()
    rng = substream(seed, "attack")
    r = noise_scale(X, per_vertex_max)
    return X + rho * r * rng.standard_normal(X.shape)


def attack_evaluate(
    dataset: Dataset,
    state: model.ModelState,
    cfg: AttackConfig,
    k_neighbors: int,
    test_mask: np.ndarray,
) -> MetricsReport:
    """Forward pass of the trained model under the configured perturbation;
    no retraining. The clean structure is kept for the noise attack and the
    clean features for the drop attack."""
    dataset = normalize(dataset)
    fused, graph = fuse_and_build(dataset, k_neighbors)
    if cfg.kind == "drop":
        graph = drop_hyperedges(graph, cfg.drop_fraction, cfg.seed)
    elif cfg.kind == "noise":
        fused = Tensor(
            inject_feature_noise(fused.data, cfg.rho, cfg.seed, cfg.per_vertex_max)
        )
    logits, _ = model.forward(fused, graph, state)
    probs = ad.row_softmax(logits)
    return metrics.evaluate(probs, dataset.labels, test_mask)
