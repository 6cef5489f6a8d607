"""Training objectives: cross-entropy, focal loss, the information-bottleneck
surrogates, and the total loss combining all three."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .autodiff import EPS, Tensor


@dataclass
class LossConfig:
    """Weights of the total objective."""

    mu: float = 1.0          # focal-loss weight
    xi: float = 10.0         # bottleneck-loss weight
    beta: float = 1.0        # compression weight inside the bottleneck term
    alpha: float = 2.0       # focal scaling
    gamma: float = 0.5       # focal exponent

    def __post_init__(self):
        for name in ("mu", "xi", "beta", "alpha", "gamma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


def _mask_column(mask: np.ndarray) -> tuple[Tensor, int]:
    mask = np.asarray(mask, dtype=bool).reshape(-1)
    count = int(mask.sum())
    if count == 0:
        raise ValueError("empty mask")
    return Tensor(mask.astype(np.float64).reshape(-1, 1)), count


def true_class_probs(logits: Tensor, labels: np.ndarray) -> Tensor:
    """Softmax probability of each vertex's labeled class, as an n x 1 column."""
    labels = np.asarray(labels, dtype=int).reshape(-1)
    n, c = logits.shape
    if labels.shape[0] != n:
        raise ValueError("label count does not match logit rows")
    if labels.min() < 0 or labels.max() >= c:
        raise ValueError("label out of range")
    onehot = np.zeros((n, c))
    onehot[np.arange(n), labels] = 1.0
    probs = ad.clip(ad.row_softmax(logits), EPS, 1.0 - EPS)
    return ad.matmul(ad.mul(probs, Tensor(onehot)), Tensor(np.ones((c, 1))))


def cross_entropy(logits: Tensor, labels: np.ndarray, mask: np.ndarray) -> Tensor:
    """Mean over masked vertices of -log p(true class)."""
    mcol, count = _mask_column(mask)
    p = true_class_probs(logits, labels)
    return ad.scale(ad.tsum(ad.mul(ad.neg(ad.log(p)), mcol)), 1.0 / count)


def focal_loss(
    p_true: Tensor, alpha: float, gamma: float, mask: np.ndarray
) -> Tensor:
    """Mean over masked vertices of -alpha (1 - p)^gamma log p."""
    mcol, count = _mask_column(mask)
    p = ad.clip(p_true, EPS, 1.0 - EPS)
    ones = Tensor(np.ones(p.shape))
    terms = ad.mul(ad.power(ad.sub(ones, p), gamma), ad.neg(ad.log(p)))
    return ad.scale(ad.tsum(ad.mul(terms, mcol)), alpha / count)


def kl_bernoulli_half(p: Tensor) -> Tensor:
    """Elementwise KL(Bernoulli(p) || Bernoulli(0.5)), inputs clamped away from {0,1}."""
    p = ad.clip(p, EPS, 1.0 - EPS)
    ones = Tensor(np.ones(p.shape))
    q = ad.sub(ones, p)
    return ad.add(
        ad.mul(p, ad.log(ad.scale(p, 2.0))),
        ad.mul(q, ad.log(ad.scale(q, 2.0))),
    )


def hgib_loss(
    per_layer: list[tuple[Tensor, Tensor]],
    labels: np.ndarray,
    mask: np.ndarray,
    beta: float,
) -> Tensor:
    """Bottleneck objective averaged over layers: per-layer CE on the projected
    logits plus beta times the mean Bernoulli-KL compression of sigmoid(Z)."""
    if not per_layer:
        raise ValueError("need at least one layer")
    total = None
    for z, logits in per_layer:
        term = cross_entropy(logits, labels, mask)
        if beta != 0.0:
            compression = ad.tmean(kl_bernoulli_half(ad.sigmoid(z)))
            term = ad.add(term, ad.scale(compression, beta))
        total = term if total is None else ad.add(total, term)
    return ad.scale(total, 1.0 / len(per_layer))


def total_loss(
    logits_final: Tensor,
    per_layer: list[tuple[Tensor, Tensor]],
    labels: np.ndarray,
    mask: np.ndarray,
    cfg: LossConfig,
) -> Tensor:
    """CE + mu * focal + xi * bottleneck, supervised terms over masked vertices."""
    loss = cross_entropy(logits_final, labels, mask)
    if cfg.mu != 0.0:
        p = true_class_probs(logits_final, labels)
        loss = ad.add(loss, ad.scale(focal_loss(p, cfg.alpha, cfg.gamma, mask), cfg.mu))
    if cfg.xi != 0.0:
        loss = ad.add(loss, ad.scale(hgib_loss(per_layer, labels, mask, cfg.beta), cfg.xi))
    return loss
