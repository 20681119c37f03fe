"""Geodesic-flow descent on SO(n): Q_{k+1} = exp(-h r_k) Q_k.

The skew direction r_k = G Q^t - Q G^t lifts the Euclidean gradient G of
the pairwise-error objective onto so(n), so every iterate stays a rotation.

Sign-symmetric constellations (hypercubes, NUQAM) make every signed
permutation matrix an exact critical point of the objective restricted to
SO(n): the Euclidean gradient there is symmetric and its skew lift is
bitwise zero, so the bare iteration can never leave the start.  When that
happens a deterministic, infinitesimal skew kick (a fixed direction of
norm STALL_KICK) is applied; descent from the resulting saddle then
proceeds normally.  The kick is recorded in the trace.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .constellation import Constellation
from .lie import mat_exp, ortho_defect, project_to_rotation, random_rotation, skew_lift
from .objective import (
    DEFAULT_FD_DELTA,
    NoiseLevel,
    PairDiffCache,
    pep_bound_from_cache,
    pep_gradient_fd_from_cache,
    pep_value_and_grad_from_cache,
)

STALL_KICK = 1e-6
DRIFT_LIMIT = 1e-10


@dataclass(frozen=True)
class OptimizerConfig:
    step_size: float = 0.01
    iterations: int = 10000
    gradient_mode: str = "analytic"  # or "central_difference"
    fd_delta: float = DEFAULT_FD_DELTA
    init: str = "identity"  # "identity" | "random" | "given"
    init_matrix: np.ndarray | None = None
    seed: int = 0
    reortho_period: int = 1000
    track_best: bool = True

    def __post_init__(self):
        if not self.step_size > 0:
            raise ValueError("step_size must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.gradient_mode not in ("analytic", "central_difference"):
            raise ValueError(f"unknown gradient_mode {self.gradient_mode!r}")
        if self.init not in ("identity", "random", "given"):
            raise ValueError(f"unknown init {self.init!r}")
        if self.init == "given" and self.init_matrix is None:
            raise ValueError("init='given' requires init_matrix")
        if self.reortho_period < 1:
            raise ValueError("reortho_period must be >= 1")


@dataclass
class OptimizerTrace:
    objective_history: list[float] = field(default_factory=list)
    drift_history: list[float] = field(default_factory=list)
    best_iteration: int = 0
    best_value: float = np.inf
    best_matrix: np.ndarray | None = None
    final_matrix: np.ndarray | None = None
    ortho_drift_max: float = 0.0
    projections: int = 0
    stall_kicks: int = 0

    def write_csv(self, path, every: int = 1) -> None:
        with open(path, "w") as fh:
            fh.write("iteration,f_value,ortho_drift\n")
            for k, (f, d) in enumerate(zip(self.objective_history, self.drift_history)):
                if k % every == 0 or k == len(self.objective_history) - 1:
                    fh.write(f"{k},{f:.17g},{d:.17g}\n")


def _stall_direction(n: int) -> np.ndarray:
    """Fixed unit-norm skew matrix used to leave exact critical points."""
    E = np.zeros((n, n))
    v = 1.0
    for i in range(n):
        for j in range(i + 1, n):
            E[i, j] = v
            E[j, i] = -v
            v += 1.0
    return E / np.linalg.norm(E)


def geodesic_flow(
    c: Constellation, noise: NoiseLevel, cfg: OptimizerConfig = OptimizerConfig()
) -> tuple[np.ndarray, OptimizerTrace]:
    """Run the fixed-step geodesic flow; returns (rotation, trace).

    The returned rotation is the best iterate visited when
    cfg.track_best, otherwise the final iterate.
    """
    if c.size < 2:
        raise ValueError("constellation needs at least 2 points")
    n = c.dim
    cache = PairDiffCache(c)

    if cfg.init == "identity":
        Q = np.eye(n)
    elif cfg.init == "random":
        Q = random_rotation(n, np.random.default_rng(cfg.seed))
    else:
        Q = np.array(cfg.init_matrix, dtype=float)

    if cfg.gradient_mode == "analytic":
        value_and_grad = lambda Q: pep_value_and_grad_from_cache(cache, Q, noise)
    else:
        value_and_grad = lambda Q: (
            pep_bound_from_cache(cache, Q, noise),
            pep_gradient_fd_from_cache(cache, Q, noise, cfg.fd_delta),
        )

    trace = OptimizerTrace()
    h = cfg.step_size
    kick = _stall_direction(n) if n > 1 else np.zeros((1, 1))
    trace.best_value = np.inf

    def record(k: int, f: float, drift: float, Q: np.ndarray):
        if not np.isfinite(f):
            raise FloatingPointError(f"objective became non-finite at iteration {k}")
        trace.objective_history.append(f)
        trace.drift_history.append(drift)
        trace.ortho_drift_max = max(trace.ortho_drift_max, drift)
        if f < trace.best_value:
            trace.best_value, trace.best_matrix, trace.best_iteration = f, Q.copy(), k

    for k in range(cfg.iterations):
        f, G = value_and_grad(Q)
        record(k, f, ortho_defect(Q), Q)
        if n == 1:
            continue
        r = skew_lift(G, Q)
        if np.linalg.norm(r) == 0.0:
            r = STALL_KICK * kick
            trace.stall_kicks += 1
        Q = mat_exp(-h * r) @ Q
        if (k + 1) % cfg.reortho_period == 0 and ortho_defect(Q) > DRIFT_LIMIT:
            Q = project_to_rotation(Q)
            trace.projections += 1

    record(cfg.iterations, pep_bound_from_cache(cache, Q, noise), ortho_defect(Q), Q)

    trace.final_matrix = Q
    result = trace.best_matrix if cfg.track_best else Q
    return result.copy(), trace


def geodesic_flow_continuation(
    c: Constellation,
    snr_schedule,
    final_cfg: OptimizerConfig = OptimizerConfig(),
    warmup_cfg: OptimizerConfig | None = None,
) -> tuple[np.ndarray, OptimizerTrace, dict[float, np.ndarray]]:
    """Run the flow over increasing SNRs, warm-starting each from the last.

    The objective sharpens as the noise level drops, so tracking the
    minimum found at a lower SNR reaches far better optima at high SNR
    than a cold start.  All but the last schedule entry use warmup_cfg
    (defaults to final_cfg); the last uses final_cfg.  Returns the final
    (rotation, trace) plus the per-SNR rotations.
    """
    snrs = [float(s) for s in snr_schedule]
    if snrs != sorted(snrs):
        raise ValueError("snr_schedule must be nondecreasing")
    warmup_cfg = warmup_cfg or final_cfg
    found: dict[float, np.ndarray] = {}
    Q = None
    trace = None
    for i, snr in enumerate(snrs):
        base = final_cfg if i == len(snrs) - 1 else warmup_cfg
        if Q is not None:
            base = replace(base, init="given", init_matrix=Q)
        Q, trace = geodesic_flow(c, NoiseLevel.from_snr_db(snr), base)
        found[snr] = Q
    return Q, trace, found


def check_two_param_family(q, tol: float) -> bool:
    """True iff q matches the signed-circulant 4D pattern

        [[ a,  b,  c,  d],
         [-d,  a,  b,  c],
         [-c, -d,  a,  b],
         [-b, -c, -d,  a]]

    within tol and (a, b, c, d) satisfy a^2+b^2+c^2+d^2 = 1 and
    ab - ad + cd + bc = 0 within tol.
    """
    q = np.asarray(q, dtype=float)
    if q.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {q.shape}")
    # entry (i, j) = +v[(j-i) % 4] for j >= i, -v[(j-i) % 4] for j < i
    sign = np.where(np.arange(4)[None, :] >= np.arange(4)[:, None], 1.0, -1.0)
    unsigned = q * sign
    vals = []
    for off in range(4):
        entries = np.array([unsigned[i, (i + off) % 4] for i in range(4)])
        mean = entries.mean()
        if np.abs(entries - mean).max() > tol:
            return False
        vals.append(mean)
    a, b, c, d = vals
    if abs(a * a + b * b + c * c + d * d - 1.0) > tol:
        return False
    if abs(a * b - a * d + c * d + b * c) > tol:
        return False
    return True
