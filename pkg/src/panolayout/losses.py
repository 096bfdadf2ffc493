"""GAN / cycle / emptier losses as pure scalar functions.

Score batches are 1-D vectors of raw discriminator outputs (no clamping or
log). Squared-L2 image losses sum over elements and average over the batch;
external trainers can rescale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LossWeights:
    lambda_gan: float = 1.0
    lambda_cycle: float = 5.0

    def __post_init__(self):
        if self.lambda_gan < 0 or self.lambda_cycle < 0:
            raise ValueError("loss weights must be non-negative")


def _scores(x) -> np.ndarray:
    s = np.asarray(x, dtype=np.float64).ravel()
    if s.size == 0:
        raise ValueError("score batch must be non-empty")
    return s


def _batch(images) -> np.ndarray:
    arr = np.asarray(images, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("image batch must be non-empty")
    return arr


def loss_g(fake_scores) -> float:
    """Generator loss: mean over the batch of (1 - D(fake))."""
    return float(np.mean(1.0 - _scores(fake_scores)))


def loss_d(fake_scores, real_scores) -> float:
    """Discriminator loss: mean D(fake) + mean (1 - D(real))."""
    return float(np.mean(_scores(fake_scores)) + np.mean(1.0 - _scores(real_scores)))


def loss_recon(a, b) -> float:
    """Squared L2 distance, summed per sample and averaged over the batch."""
    a = _batch(a)
    b = _batch(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    per_sample = np.sum(diff.reshape(diff.shape[0], -1) ** 2, axis=1)
    return float(np.mean(per_sample))


def loss_cycle(x, emptied_fake) -> float:
    """Background cycle consistency: loss_recon(X, E(Y_hat))."""
    return loss_recon(x, emptied_fake)


def loss_emp(real_empty_scores, fake_empty_scores, x, emptied) -> float:
    """Emptier pretraining loss: L_Gemp + L_Demp + L_recon.

    L_Gemp = mean(1 - D_emp(E(Y))); L_Demp = mean(1 - D_emp(X)) +
    mean(D_emp(E(Y))); the reconstruction term compares X with E(Y).
    """
    fake = _scores(fake_empty_scores)
    real = _scores(real_empty_scores)
    l_gemp = float(np.mean(1.0 - fake))
    l_demp = float(np.mean(1.0 - real) + np.mean(fake))
    return l_gemp + l_demp + loss_recon(x, emptied)


def loss_total(g: float, d: float, cycle: float, w: LossWeights = LossWeights()) -> float:
    """lambda_gan * (L_G + L_D) + lambda_cycle * L_cycle."""
    return w.lambda_gan * (g + d) + w.lambda_cycle * cycle
