"""Representation-alignment and temporal-consistency losses, plus the hybrid weight update."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np


def hybrid_update(w, eta: float, delta_local, beta: float, delta_global):
    """Blend a local (STDP) and a global (error feedback) weight change.

    ``w_next = w + eta * delta_local + beta * delta_global``
    """
    terms = [np.asarray(x, dtype=float) for x in (w, delta_local, delta_global)]
    if not all(np.all(np.isfinite(t)) for t in terms) or not (math.isfinite(eta) and math.isfinite(beta)):
        raise ValueError("hybrid_update terms must be finite")
    out = terms[0] + eta * terms[1] + beta * terms[2]
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class HybridUpdateParams:
    eta: float
    beta: float
    delta_local: object
    delta_global: object

    def apply(self, w):
        return hybrid_update(w, self.eta, self.delta_local, self.beta, self.delta_global)


def linear_cka(x, y) -> float:
    """Linear centered kernel alignment between two feature batches (rows = samples).

    ``||Xc^T Yc||_F^2 / (||Xc^T Xc||_F ||Yc^T Yc||_F)`` with column-centred
    ``Xc, Yc``.  A batch with no variance gives 0 and a warning.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if y.ndim == 1:
        y = y[:, None]
    if x.shape[0] != y.shape[0]:
        raise ValueError("feature batches need the same number of rows")
    xc = x - x.mean(axis=0)
    yc = y - y.mean(axis=0)
    hsic_xy = float(np.sum((xc.T @ yc) ** 2))
    hsic_xx = float(np.sum((xc.T @ xc) ** 2))
    hsic_yy = float(np.sum((yc.T @ yc) ** 2))
    if hsic_xx == 0.0 or hsic_yy == 0.0:
        warnings.warn("linear_cka: zero-variance feature batch, returning 0", RuntimeWarning, stacklevel=2)
        return 0.0
    value = hsic_xy / math.sqrt(hsic_xx * hsic_yy)
    return min(1.0, max(0.0, value))


def sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


@dataclass
class TransferLossConfig:
    """Inputs of the knowledge-transfer loss.

    ``source_features[t]`` / ``target_features[t]`` are ``(rows, dim)`` batches
    at timestep ``t``; ``label_pairs`` lists ``(i, j)`` row pairs whose source
    and target labels agree; ``eta_t`` are the per-step gate logits and
    ``cls_loss`` the per-step classification losses on the target data.
    """

    source_features: Sequence
    target_features: Sequence
    label_pairs: Sequence[tuple[int, int]]
    eta_t: Sequence[float]
    cls_loss: Sequence[float]

    @property
    def timesteps_T(self) -> int:
        return len(self.eta_t)

    def validate(self) -> None:
        T = self.timesteps_T
        if T < 1:
            raise ValueError("need at least one timestep")
        if not (len(self.source_features) == len(self.target_features) == len(self.cls_loss) == T):
            raise ValueError("per-timestep inputs must all have length T")
        if len(self.label_pairs) == 0:
            raise ValueError("no matched label pairs")
        for s, t in zip(self.source_features, self.target_features):
            s, t = np.asarray(s), np.asarray(t)
            if s.shape[-1] != t.shape[-1]:
                raise ValueError("source and target features must share the feature dimension")
            for i, j in self.label_pairs:
                if not (0 <= i < s.shape[0] and 0 <= j < t.shape[0]):
                    raise ValueError(f"label pair {(i, j)} out of range")


def transfer_loss_from_alignment(gate_logits, alignments, cls_losses) -> float:
    """``1 - mean_t sigmoid(eta_t) * A_t + mean_t (1 - sigmoid(eta_t)) * cls_t``."""
    T = len(gate_logits)
    if T < 1 or len(alignments) != T or len(cls_losses) != T:
        raise ValueError("gate, alignment and classification sequences need equal length >= 1")
    gates = [sigmoid(float(e)) for e in gate_logits]
    aligned = sum(g * float(a) for g, a in zip(gates, alignments)) / T
    cls = sum((1.0 - g) * float(c) for g, c in zip(gates, cls_losses)) / T
    return 1.0 - aligned + cls


def transfer_loss(cfg: TransferLossConfig) -> float:
    """Time-gated CKA alignment between matched source/target rows plus gated event-data loss."""
    cfg.validate()
    src_rows = [i for i, _ in cfg.label_pairs]
    tgt_rows = [j for _, j in cfg.label_pairs]
    alignments = [
        linear_cka(np.asarray(s)[src_rows], np.asarray(t)[tgt_rows])
        for s, t in zip(cfg.source_features, cfg.target_features)
    ]
    return transfer_loss_from_alignment(cfg.eta_t, alignments, cfg.cls_loss)


def _log_softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def temporal_consistency_loss(per_timestep_logits, mode: str = "mean") -> float:
    """Mean KL divergence between each timestep's softmax output and a reference.

    ``mode="mean"`` compares every step against the softmax of the mean logits;
    ``mode="pairwise"`` averages KL over all ordered pairs of distinct steps.
    """
    logits = np.asarray(per_timestep_logits, dtype=float)
    if logits.ndim != 2 or logits.shape[0] < 1:
        raise ValueError("expected a (T, classes) logit array with T >= 1")
    if not np.all(np.isfinite(logits)):
        raise ValueError("logits must be finite")
    logp = _log_softmax(logits)
    p = np.exp(logp)
    T = logits.shape[0]
    if mode == "mean":
        logq = _log_softmax(logits.mean(axis=0))
        kl = np.sum(p * (logp - logq), axis=1)
        return float(max(0.0, kl.mean()))
    if mode == "pairwise":
        if T == 1:
            return 0.0
        total = 0.0
        for a in range(T):
            for b in range(T):
                if a != b:
                    total += float(np.sum(p[a] * (logp[a] - logp[b])))
        return max(0.0, total / (T * (T - 1)))
    raise ValueError("mode must be 'mean' or 'pairwise'")
