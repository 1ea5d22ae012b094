"""Equiprobable scalar quantization of centered Gaussian variables."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from ..errors import DegenerateVariance, DomainError

__all__ = ["Quantizer", "build_quantizer"]


@dataclass(frozen=True)
class Quantizer:
    """Partition of the real line into bins of equal Gaussian probability.

    boundaries has n_bins - 1 strictly increasing thresholds; bin i collects
    (boundaries[i-1], boundaries[i]] with open ends at the extremes.  Every
    bin has probability exactly 1/n_bins under N(0, variance) because the
    thresholds are inverse-CDF images of the uniform grid i/n_bins.
    """

    variance: float
    n_bins: int
    boundaries: np.ndarray

    @property
    def bin_probabilities(self) -> np.ndarray:
        return np.full(self.n_bins, 1.0 / self.n_bins)

    def indices(self, x: np.ndarray) -> np.ndarray:
        """Bin index of each sample (0 .. n_bins-1)."""
        return np.searchsorted(self.boundaries, np.asarray(x, dtype=float), side="left")


def build_quantizer(variance: float, n_bins: int) -> Quantizer:
    """Equiprobable quantizer for a centered Gaussian of the given variance."""
    variance = float(variance)
    if not np.isfinite(variance) or variance <= 0.0:
        raise DegenerateVariance(f"variance must be positive and finite, got {variance}")
    n_bins = int(n_bins)
    if n_bins < 2:
        raise DomainError("need at least two quantization bins")
    grid = np.arange(1, n_bins) / n_bins
    boundaries = np.sqrt(variance) * ndtri(grid)
    return Quantizer(variance=variance, n_bins=n_bins, boundaries=boundaries)
