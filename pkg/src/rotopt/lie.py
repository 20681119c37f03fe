"""Linear algebra on the rotation group SO(n) and its algebra so(n).

All functions operate on plain numpy arrays (float64, shape (n, n)),
with vectors understood to multiply on the right.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import expm

ORTHO_TOL = 1e-9
DET_TOL = 1e-9


class CorruptedStateError(RuntimeError):
    """Numerical state violated an invariant that should be structural."""


def _as_square(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def ortho_defect(Q: np.ndarray) -> float:
    """Frobenius norm of QQ^t - I."""
    Q = np.asarray(Q, dtype=float)
    return float(np.linalg.norm(Q @ Q.T - np.eye(Q.shape[0])))


def is_rotation(Q, ortho_tol: float = ORTHO_TOL, det_tol: float = DET_TOL) -> bool:
    Q = _as_square(Q)
    return ortho_defect(Q) <= ortho_tol and abs(np.linalg.det(Q) - 1.0) <= det_tol


def assert_rotation(Q, ortho_tol: float = ORTHO_TOL, det_tol: float = DET_TOL) -> np.ndarray:
    Q = _as_square(Q)
    d = ortho_defect(Q)
    if d > ortho_tol:
        raise ValueError(f"not orthogonal: ||QQ^t - I||_F = {d:.3e} > {ortho_tol:.1e}")
    det = np.linalg.det(Q)
    if abs(det - 1.0) > det_tol:
        raise ValueError(f"det(Q) = {det!r} is not 1 within {det_tol:.1e}")
    return Q


def mat_exp(A) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring (Pade core, via scipy)."""
    A = _as_square(A)
    return expm(A)


def skew_lift(G, Q) -> np.ndarray:
    """Lift a Euclidean gradient G at Q to the skew matrix G Q^t - Q G^t.

    Antisymmetry is structural: the result is stored as B - B^t.
    """
    G = _as_square(G)
    Q = _as_square(Q)
    if G.shape != Q.shape:
        raise ValueError(f"dimension mismatch: {G.shape} vs {Q.shape}")
    B = G @ Q.T
    return B - B.T


def random_skew(dim: int, rng: np.random.Generator, fro_norm: float = 1.0) -> np.ndarray:
    """Random skew matrix with the given Frobenius norm (zero for dim = 1)."""
    A = rng.standard_normal((dim, dim))
    S = A - A.T
    nrm = np.linalg.norm(S)
    if nrm > 0:
        S *= fro_norm / nrm
    return S


def project_to_rotation(A) -> np.ndarray:
    """Nearest rotation matrix (polar factor of A via SVD).

    Intended for drift repair only; raises if the polar factor has
    determinant -1, since drift cannot flip orientation.
    """
    A = _as_square(A)
    U, _, Vt = np.linalg.svd(A)
    Q = U @ Vt
    if np.linalg.det(Q) < 0:
        raise CorruptedStateError(
            "nearest orthogonal matrix has determinant -1; "
            "input is not a drifted rotation"
        )
    return Q


def random_rotation(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-uniform rotation: QR of a Gaussian matrix with canonical signs."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if dim == 1:
        return np.eye(1)
    A = rng.standard_normal((dim, dim))
    Q, R = np.linalg.qr(A)
    # fix the QR sign ambiguity so the distribution is exactly Haar
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def save_matrix(Q, path) -> None:
    """Shared matrix text format: first line n, then n space-separated rows."""
    Q = _as_square(Q)
    n = Q.shape[0]
    with open(path, "w") as fh:
        fh.write(f"{n}\n")
        for row in Q:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty matrix file")
    try:
        n = int(lines[0])
    except ValueError:
        raise ValueError(f"{path}: first line must be the dimension") from None
    if len(lines) != n + 1:
        raise ValueError(f"{path}: expected {n} rows, found {len(lines) - 1}")
    rows = []
    for i, ln in enumerate(lines[1:], start=2):
        vals = ln.split()
        if len(vals) != n:
            raise ValueError(f"{path}:{i}: expected {n} entries, found {len(vals)}")
        rows.append([float(v) for v in vals])
    return _as_square(np.array(rows))
