"""Pairwise-error-probability union bound f(Q) and its gradients.

f(Q) = sum over unordered distinct pairs {x, y} of the rotated
constellation of prod_i 1 / (1 + (x_i - y_i)^2 / (8 N0)).

The self-pairs (a constant) and the double count of ordered summation
(a factor 2) are dropped; neither affects minimizers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constellation import Constellation
from .lie import _as_square

DEFAULT_FD_DELTA = 1e-5


@dataclass(frozen=True)
class NoiseLevel:
    """Linear noise spectral level N0 > 0; SNR = 1/N0 for unit-energy inputs."""

    n0: float

    def __post_init__(self):
        if not self.n0 > 0:
            raise ValueError(f"n0 must be positive, got {self.n0}")

    @property
    def snr_db(self) -> float:
        return 10.0 * np.log10(1.0 / self.n0)

    @classmethod
    def from_snr_db(cls, snr_db: float) -> "NoiseLevel":
        return cls(10.0 ** (-snr_db / 10.0))


class PairDiffCache:
    """Difference vectors x - y over unordered distinct pairs, precomputed."""

    def __init__(self, c: Constellation):
        if c.size < 1:
            raise ValueError("empty constellation")
        iu = np.triu_indices(c.size, 1)
        self.dim = c.dim
        self.diffs = c.points[iu[0]] - c.points[iu[1]]  # (K(K-1)/2, n)

    def __len__(self):
        return len(self.diffs)


def _check(cache: PairDiffCache, q: np.ndarray):
    if q.shape[0] != cache.dim:
        raise ValueError(f"dimension mismatch: matrix is {q.shape[0]}D, pairs are {cache.dim}D")


def pep_bound_from_cache(cache: PairDiffCache, q, noise: NoiseLevel) -> float:
    """f evaluated at an arbitrary square matrix (need not be a rotation)."""
    q = _as_square(q)
    _check(cache, q)
    if len(cache) == 0:
        return 0.0
    U = cache.diffs @ q.T
    return float(np.prod(1.0 / (1.0 + U**2 / (8.0 * noise.n0)), axis=1).sum())


def pep_bound(c: Constellation, q, noise: NoiseLevel) -> float:
    return pep_bound_from_cache(PairDiffCache(c), q, noise)


def pep_gradient_analytic_from_cache(cache: PairDiffCache, q, noise: NoiseLevel) -> np.ndarray:
    """Exact Euclidean gradient of pep_bound with respect to the entries of q."""
    q = _as_square(q)
    _check(cache, q)
    if len(cache) == 0:
        return np.zeros_like(q)
    D = cache.diffs
    scale = 8.0 * noise.n0
    U = D @ q.T
    G = 1.0 / (1.0 + U**2 / scale)
    T = G.prod(axis=1)
    W = T[:, None] * (-2.0 * U / scale) * G
    return W.T @ D


def pep_gradient_analytic(c: Constellation, q, noise: NoiseLevel) -> np.ndarray:
    return pep_gradient_analytic_from_cache(PairDiffCache(c), q, noise)


def pep_value_and_grad_from_cache(cache: PairDiffCache, q, noise: NoiseLevel):
    """(f, grad f) sharing one evaluation; used by the optimizer loop."""
    q = _as_square(q)
    _check(cache, q)
    if len(cache) == 0:
        return 0.0, np.zeros_like(q)
    D = cache.diffs
    scale = 8.0 * noise.n0
    U = D @ q.T
    G = 1.0 / (1.0 + U**2 / scale)
    T = G.prod(axis=1)
    W = T[:, None] * (-2.0 * U / scale) * G
    return float(T.sum()), W.T @ D


def pep_gradient_fd_from_cache(
    cache: PairDiffCache, q, noise: NoiseLevel, delta: float = DEFAULT_FD_DELTA
) -> np.ndarray:
    """Central-difference gradient, perturbing one entry of q at a time."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    q = _as_square(q)
    _check(cache, q)
    n = q.shape[0]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            H = np.zeros((n, n))
            H[i, j] = delta
            fp = pep_bound_from_cache(cache, q + H, noise)
            fm = pep_bound_from_cache(cache, q - H, noise)
            out[i, j] = (fp - fm) / (2.0 * delta)
    return out


def pep_gradient_fd(c: Constellation, q, noise: NoiseLevel, delta: float = DEFAULT_FD_DELTA):
    return pep_gradient_fd_from_cache(PairDiffCache(c), q, noise, delta)
