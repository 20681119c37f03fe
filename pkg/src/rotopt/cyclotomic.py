"""Rotated-Z^n ideal-lattice generator matrices from real cyclotomic subfields.

For prime m the degree-n = (m-1)/2 totally real subfield of the m-th
cyclotomic field carries a principal ideal, generated by 2 - 2cos(2*pi/m),
whose twisted embedding is an orthonormal basis of a rotated Z^n.  The
candidate entry formula is

    M[j, k] = sqrt(w_k) * s_k(e_j) / sqrt(m),   w_k = 2 - 2cos(2*pi*k/m)

over an integral basis e_j; several bases are tried and orthonormality is
always verified numerically, never assumed.
"""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np

from .constellation import make_hypercube, min_product_distance, rotate
from .lie import load_matrix, ortho_defect

GOLDEN_NAMES = ("M11", "Q30dB_5D", "Q24dB_4D")

_GOLDEN_FILES = {
    "M11": "golden_m11.txt",
    "Q30dB_5D": "golden_q30db_5d.txt",
    "Q24dB_4D": "golden_q24db_4d.txt",
}


class ConstructionError(RuntimeError):
    """No candidate basis produced an orthonormal generator."""


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    return all(m % p for p in range(2, int(m**0.5) + 1))


@dataclass(frozen=True)
class CyclotomicSpec:
    m: int

    def __post_init__(self):
        if not _is_prime(self.m):
            raise ValueError(f"m = {self.m} is not prime")
        if not 5 <= self.m <= 64:
            raise ValueError(f"m = {self.m} out of supported range [5, 64]")

    @property
    def degree(self) -> int:
        return (self.m - 1) // 2


def _candidate_bases(m: int, n: int):
    k = np.arange(1, n + 1)
    # (a) e_j = zeta^j + zeta^-j: s_k(e_j) = 2cos(2*pi*jk/m)
    j = np.arange(1, n + 1)
    yield "pair-sum", 2 * np.cos(2 * np.pi * np.outer(j, k) / m)
    # (b) power basis e_j = theta^(j-1)
    theta = 2 * np.cos(2 * np.pi * k / m)
    yield "power", theta[None, :] ** np.arange(n)[:, None]
    # (c) partial sums e_j = 1 + sum_{i<j} (zeta^i + zeta^-i):
    #     s_k(e_j) = 1 + sum_{i=1}^{j-1} 2cos(2*pi*ik/m)
    S = np.ones((n, n))
    for row in range(1, n):
        S[row] = S[row - 1] + 2 * np.cos(2 * np.pi * row * k / m)
    yield "partial-sum", S


def _canonicalize(M: np.ndarray) -> np.ndarray:
    """Flip rows to make the first nonzero entry positive, then sort rows."""
    M = M.copy()
    for i in range(M.shape[0]):
        lead = M[i][np.abs(M[i]) > 1e-12]
        if lead.size and lead[0] < 0:
            M[i] = -M[i]
    order = np.lexsort(M.T[::-1])
    M = M[order]
    if np.linalg.det(M) < 0:
        # restore orientation by swapping the last two rows
        M[[-2, -1]] = M[[-1, -2]]
    return M


def build_generator(m: int, ortho_tol: float = 1e-9) -> np.ndarray:
    """Generator matrix of the rotated-Z^n ideal lattice for prime m.

    Tries each candidate integral basis and returns the first whose
    twisted embedding verifies ||MM^t - I||_F <= ortho_tol.
    """
    spec = CyclotomicSpec(m)
    n = spec.degree
    k = np.arange(1, n + 1)
    w = np.sqrt(2 - 2 * np.cos(2 * np.pi * k / m)) / np.sqrt(m)
    residuals = {}
    for name, S in _candidate_bases(m, n):
        M = w[None, :] * S
        res = ortho_defect(M)
        residuals[name] = res
        if res <= ortho_tol:
            return _canonicalize(M)
    detail = ", ".join(f"{name}: {res:.3e}" for name, res in residuals.items())
    raise ConstructionError(
        f"no integral basis gave an orthonormal generator for m={m} "
        f"(residuals: {detail})"
    )


def golden_matrix(name: str) -> np.ndarray:
    """Verbatim 4-decimal matrices printed in the source material."""
    if name not in _GOLDEN_FILES:
        raise ValueError(f"unknown golden matrix {name!r}; choose from {GOLDEN_NAMES}")
    ref = resources.files("rotopt.data") / _GOLDEN_FILES[name]
    with resources.as_file(ref) as path:
        return load_matrix(path)


def full_diversity_floor(m: int) -> float:
    """Min product distance of the generator applied to the unit hypercube."""
    M = build_generator(m)
    c = rotate(make_hypercube(M.shape[0]), M)
    value, _ = min_product_distance(c)
    return value
