"""Finite constellations in R^n: builders, normalization, and metrics."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .lie import _as_square, assert_rotation

COORD_TOL = 1e-9
MAX_HYPERCUBE_DIM = 16


@dataclass(frozen=True)
class Constellation:
    """Ordered list of K distinct points in R^n, as rows of a (K, n) array."""

    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("points must be a nonempty (K, n) array")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points have non-finite entries")
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        if self.size > 1:
            dmin = min_pairwise_distance(pts)
            if dmin == 0.0:
                raise ValueError("constellation has duplicate points")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def energy(self) -> float:
        """Average squared norm E_s over the points."""
        return float(np.mean(np.sum(self.points**2, axis=1)))

    def normalized(self) -> "Constellation":
        """Scale to unit average energy."""
        return Constellation(self.points / np.sqrt(self.energy))


def min_pairwise_distance(pts: np.ndarray) -> float:
    d = pts[:, None, :] - pts[None, :, :]
    dist2 = np.sum(d**2, axis=-1)
    iu = np.triu_indices(len(pts), 1)
    return float(np.sqrt(dist2[iu].min()))


def make_hypercube(dim: int) -> Constellation:
    """The 2^dim points with coordinates +-1, normalized; lexicographic order."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if dim > MAX_HYPERCUBE_DIM:
        raise ValueError(f"dim = {dim} would give 2^{dim} points; limit is {MAX_HYPERCUBE_DIM}")
    pts = np.array(list(itertools.product((-1.0, 1.0), repeat=dim)))
    return Constellation(pts).normalized()


def make_nuqam16(gamma: float) -> Constellation:
    """16-point non-uniform QAM with coordinates {+-1, +-gamma}, normalized."""
    if not gamma > 1:
        raise ValueError(f"gamma must be > 1, got {gamma}")
    coords = (-gamma, -1.0, 1.0, gamma)
    pts = np.array(list(itertools.product(coords, repeat=2)))
    return Constellation(pts).normalized()


def rotate(c: Constellation, q) -> Constellation:
    """Apply the rotation q to every point (x -> Qx); order preserved."""
    q = _as_square(q)
    if q.shape[0] != c.dim:
        raise ValueError(f"dimension mismatch: rotation is {q.shape[0]}D, constellation {c.dim}D")
    return Constellation(c.points @ q.T)


def make_rotation_2d(theta: float) -> np.ndarray:
    """Counterclockwise rotation of R^2 by theta radians."""
    ct, st = np.cos(theta), np.sin(theta)
    return np.array([[ct, -st], [st, ct]])


def make_dvb_rotation_4d(r: float) -> np.ndarray:
    """The one-parameter DVB-NGH 4D rotation family, indexed by r = 3b^2/a^2.

    a, b >= 0 solve a^2 + 3b^2 = 1 with the given ratio.
    """
    if not 0 <= r <= 1:
        raise ValueError(f"rotation parameter must be in [0, 1], got {r}")
    a = np.sqrt(1.0 / (1.0 + r))
    b = np.sqrt(r / (3.0 * (1.0 + r)))
    Q = np.array(
        [
            [a, -b, -b, -b],
            [b, a, -b, b],
            [b, b, a, -b],
            [b, -b, b, a],
        ]
    )
    return assert_rotation(Q, ortho_tol=1e-12, det_tol=1e-12)


def min_product_distance(c: Constellation, coord_tol: float = COORD_TOL):
    """Minimum over distinct pairs of prod_i |x_i - y_i| over differing coords.

    Coordinates with |x_i - y_i| <= coord_tol are treated as equal and
    skipped.  Returns (value, (index_x, index_y)) for the achieving pair.
    """
    if c.size < 2:
        raise ValueError("need at least 2 points")
    pts = c.points
    best = np.inf
    best_pair = (0, 1)
    for i in range(c.size - 1):
        diff = np.abs(pts[i + 1 :] - pts[i])
        active = diff > coord_tol
        prods = np.where(active, diff, 1.0).prod(axis=1)
        j = int(np.argmin(prods))
        if prods[j] < best:
            best = float(prods[j])
            best_pair = (i, i + 1 + j)
    return best, best_pair


def _best_column_alignment(A: np.ndarray, B: np.ndarray):
    """Optimal signed column matching of A onto B; returns (cost, aligned A).

    For each column pair the cheaper of the two signs is taken; the
    assignment over column pairs is solved exactly.
    """
    n = A.shape[0]
    # cost[j, k] = min over sign s of ||s*A[:, j] - B[:, k]||^2
    dot = A.T @ B
    na = np.sum(A**2, axis=0)[:, None]
    nb = np.sum(B**2, axis=0)[None, :]
    cost = na + nb - 2 * np.abs(dot)
    rows, cols = linear_sum_assignment(cost)
    out = np.empty_like(A)
    for j, k in zip(rows, cols):
        s = 1.0 if dot[j, k] >= 0 else -1.0
        out[:, k] = s * A[:, j]
    return float(np.maximum(cost[rows, cols], 0.0).sum()), out


def signed_permutation_distance(a, b, exhaustive: bool | None = None):
    """min over signed permutations P, S of ||P a S - b||_F (heuristic bound).

    The default heuristic alternates optimal row and column signed
    assignments; it is an upper bound, not a certified global minimum.
    With exhaustive=True (dims <= 5) all signed row permutations are
    enumerated with the column assignment solved exactly for each.
    Returns (distance, aligned copy of a).
    """
    a = _as_square(a)
    b = _as_square(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    n = a.shape[0]
    if exhaustive is None:
        exhaustive = False
    if exhaustive and n > 5:
        raise ValueError("exhaustive mode supported only for dim <= 5")

    def rows_then_cols(M):
        c1, M1 = _best_column_alignment(M.T, b.T)  # rows of M onto rows of b
        M1 = M1.T
        c2, M2 = _best_column_alignment(M1, b)
        return np.linalg.norm(M2 - b), M2

    if exhaustive:
        best = (np.inf, a)
        for perm in itertools.permutations(range(n)):
            for signs in itertools.product((1.0, -1.0), repeat=n):
                M = np.array(signs)[:, None] * a[list(perm), :]
                cost, aligned = _best_column_alignment(M, b)
                d = np.linalg.norm(aligned - b)
                if d < best[0]:
                    best = (float(d), aligned)
        return best

    best = (np.inf, a)
    M = a.copy()
    for _ in range(10):
        d, M = rows_then_cols(M)
        if d < best[0] - 1e-15:
            best = (float(d), M)
        else:
            break
    return best


def save_constellation(c: Constellation, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# dim={c.dim} points={c.size}\n")
        for row in c.points:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def load_constellation(path) -> Constellation:
    rows = []
    dim = None
    with open(path) as fh:
        for lineno, ln in enumerate(fh, start=1):
            ln = ln.strip()
            if not ln or ln.startswith("#"):
                continue
            vals = ln.split()
            if dim is None:
                dim = len(vals)
            elif len(vals) != dim:
                raise ValueError(f"{path}:{lineno}: expected {dim} coordinates, found {len(vals)}")
            try:
                rows.append([float(v) for v in vals])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: unparsable coordinate") from None
    if not rows:
        raise ValueError(f"{path}: no points found")
    return Constellation(np.array(rows))
