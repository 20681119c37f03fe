"""Command-line front end.

Subcommands: optimize, simulate, mindist, compare, golden.  All options
can come from a TOML config file (--config); command-line flags override
config values.  Every run is deterministic given its config and seeds.

Reported objective values are sums over unordered distinct pairs; the
literal ordered-pair sum (with self terms) equals 2*f + K and has the
same minimizers.

Exit codes: 0 success, 1 usage/config error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

try:
    import tomllib
except ImportError:  # python < 3.11
    import tomli as tomllib

import numpy as np

from . import __version__
from .channel import SimulationConfig, estimate_cer
from .constellation import (
    Constellation,
    load_constellation,
    make_dvb_rotation_4d,
    make_hypercube,
    make_nuqam16,
    make_rotation_2d,
    min_product_distance,
    rotate,
)
from .cyclotomic import GOLDEN_NAMES, build_generator, golden_matrix
from .lie import CorruptedStateError, assert_rotation, load_matrix, save_matrix
from .objective import NoiseLevel, pep_bound
from .optimizer import OptimizerConfig, geodesic_flow


class UsageError(ValueError):
    pass


def parse_constellation(spec: str) -> Constellation:
    """'hypercube:N' | 'nuqam16:GAMMA' | 'file:PATH'."""
    kind, _, arg = spec.partition(":")
    if kind == "hypercube":
        return make_hypercube(int(arg))
    if kind == "nuqam16":
        return make_nuqam16(float(arg))
    if kind == "file":
        if not Path(arg).exists():
            raise UsageError(f"constellation file not found: {arg}")
        return load_constellation(arg)
    raise UsageError(f"unknown constellation spec {spec!r}")


def parse_rotation(spec: str, dim: int) -> np.ndarray:
    """'identity' | 'angle2d:DEG' | 'dvb:R' | 'cyclotomic:M' | 'golden:NAME' | 'file:PATH'."""
    kind, _, arg = spec.partition(":")
    if kind == "identity":
        return np.eye(dim)
    if kind == "angle2d":
        return make_rotation_2d(np.deg2rad(float(arg)))
    if kind == "dvb":
        return make_dvb_rotation_4d(float(arg))
    if kind == "cyclotomic":
        return build_generator(int(arg))
    if kind == "golden":
        return golden_matrix(arg)
    if kind == "file":
        if not Path(arg).exists():
            raise UsageError(f"rotation file not found: {arg}")
        return load_matrix(arg)
    raise UsageError(f"unknown rotation spec {spec!r}")


def _snr_grid(args) -> list[float]:
    if args.snr_grid:
        start, stop, step = (float(x) for x in args.snr_grid.split(":"))
        out = []
        s = start
        while s <= stop + 1e-9:
            out.append(round(s, 10))
            s += step
        return out
    return [float(args.snr_db)]


def _optimizer_config(args, init_matrix=None) -> OptimizerConfig:
    init = args.init
    kw = {}
    if init == "given":
        if init_matrix is None:
            raise UsageError("init='given' needs a rotation file via --init-file")
        kw["init_matrix"] = init_matrix
    return OptimizerConfig(
        step_size=args.step_size,
        iterations=args.iterations,
        gradient_mode=args.gradient,
        fd_delta=args.fd_delta,
        init=init,
        seed=args.seed,
        **kw,
    )


def cmd_optimize(args) -> int:
    c = parse_constellation(args.constellation)
    noise = NoiseLevel.from_snr_db(args.snr_db)
    init_matrix = load_matrix(args.init_file) if args.init_file else None
    if init_matrix is not None:
        args.init = "given"
    cfg = _optimizer_config(args, init_matrix)
    Q, trace = geodesic_flow(c, noise, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    assert_rotation(Q)
    save_matrix(Q, out / "rotation.txt")
    trace.write_csv(out / "trace.csv", every=args.trace_every)
    print(f"f(Q0) = {trace.objective_history[0]:.12g}")
    print(f"f(best) = {trace.best_value:.12g} at iteration {trace.best_iteration}")
    print(f"wrote {out / 'rotation.txt'} and {out / 'trace.csv'}")
    return 0


def cmd_simulate(args) -> int:
    c = parse_constellation(args.constellation)
    Q = parse_rotation(args.rotation, c.dim)
    if Q.shape[0] != c.dim:
        raise UsageError(f"rotation is {Q.shape[0]}D but constellation is {c.dim}D")
    cfg = SimulationConfig(
        snr_db_grid=tuple(_snr_grid(args)),
        trials_per_point=args.trials,
        seed=args.seed,
        shards=args.shards,
        threads=args.threads,
    )
    result = estimate_cer(c, Q, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result.write_csv(out / "cer.csv")
    for p in result.points:
        print(f"snr={p.snr_db:g} dB  cer={p.cer:.6f}  +-{p.std_error:.6f}")
    print(f"wrote {out / 'cer.csv'}")
    return 0


def cmd_mindist(args) -> int:
    c = parse_constellation(args.constellation)
    if args.unnormalized:
        # undo the unit-energy scaling for raw lattice-style coordinates
        c = Constellation(c.points * np.sqrt(c.dim) if args.constellation.startswith("hypercube") else c.points)
    if args.rotation != "identity":
        c = rotate(c, parse_rotation(args.rotation, c.dim))
    value, (i, j) = min_product_distance(c)
    print(f"min product distance = {value:.12g}")
    print(f"achieved by points {i} and {j}:")
    print(f"  x = {c.points[i]}")
    print(f"  y = {c.points[j]}")
    return 0


def cmd_compare(args) -> int:
    c = parse_constellation(args.constellation)
    QA = parse_rotation(args.rotation_a, c.dim)
    QB = parse_rotation(args.rotation_b, c.dim)
    if QA.shape != QB.shape or QA.shape[0] != c.dim:
        raise UsageError("rotations and constellation must share one dimension")
    grid = _snr_grid(args)
    sim = SimulationConfig(
        snr_db_grid=tuple(grid),
        trials_per_point=args.trials,
        seed=args.seed,
        shards=args.shards,
        threads=args.threads,
    )
    resA = estimate_cer(c, QA, sim)
    resB = estimate_cer(c, QB, sim)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "compare.csv"
    with open(path, "w") as fh:
        fh.write("snr_db,f_A,f_B,cer_A,cer_B,std_error_A,std_error_B\n")
        for snr, pa, pb in zip(grid, resA.points, resB.points):
            noise = NoiseLevel.from_snr_db(snr)
            fa = pep_bound(c, QA, noise)
            fb = pep_bound(c, QB, noise)
            fh.write(
                f"{snr:.17g},{fa:.17g},{fb:.17g},{pa.cer:.17g},{pb.cer:.17g},"
                f"{pa.std_error:.17g},{pb.std_error:.17g}\n"
            )
            print(
                f"snr={snr:g}  f_A={fa:.6g} f_B={fb:.6g}  "
                f"cer_A={pa.cer:.5f} cer_B={pb.cer:.5f}"
            )
    print(f"wrote {path}")
    return 0


def cmd_golden(args) -> int:
    Q = golden_matrix(args.name)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        save_matrix(Q, out / f"{args.name}.txt")
        print(f"wrote {out / (args.name + '.txt')}")
    else:
        print(Q.shape[0])
        for row in Q:
            print(" ".join(f"{v:.4f}" for v in row))
    return 0


def _apply_config_defaults(subparsers: dict, argv: list[str]):
    """Pre-parse --config and inject its values as subcommand defaults.

    Config keys mirror flag names one-to-one ('snr-db' or 'snr_db');
    sections are flattened.  Unknown keys are rejected by name.
    """
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    if not known.config:
        return
    path = Path(known.config)
    if not path.exists():
        raise UsageError(f"config file not found: {known.config}")
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    flat = {}
    for key, val in data.items():
        if isinstance(val, dict):
            for k2, v2 in val.items():
                flat[k2.replace("-", "_")] = v2
        else:
            flat[key.replace("-", "_")] = val
    command = next((a for a in rest if not a.startswith("-")), None)
    sp = subparsers.get(command)
    if sp is None:
        return
    valid = {a.dest for a in sp._actions}
    for key in flat:
        if key not in valid:
            raise UsageError(f"config file {path}: unknown field {key!r}")
    sp.set_defaults(**flat)
    for action in sp._actions:
        if action.dest in flat:
            action.required = False


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    p = argparse.ArgumentParser(
        prog="rotopt",
        description="Rotation search and fading-channel validation for finite constellations",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def shared(sp):
        sp.add_argument("--config", help="TOML config file; flags override its values")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default="out")
        sp.add_argument("--threads", type=int, default=1)

    o = sub.add_parser("optimize", help="search for a rotation by geodesic flow")
    shared(o)
    o.add_argument("--constellation", required=True)
    o.add_argument("--snr-db", type=float, required=True)
    o.add_argument("--step-size", type=float, default=0.01)
    o.add_argument("--iterations", type=int, default=10000)
    o.add_argument("--gradient", choices=("analytic", "central_difference"), default="analytic")
    o.add_argument("--fd-delta", type=float, default=1e-5)
    o.add_argument("--init", choices=("identity", "random"), default="identity")
    o.add_argument("--init-file", help="warm-start rotation matrix file")
    o.add_argument("--trace-every", type=int, default=1)
    o.set_defaults(func=cmd_optimize)

    s = sub.add_parser("simulate", help="Monte-Carlo codeword error rate")
    shared(s)
    s.add_argument("--constellation", required=True)
    s.add_argument("--rotation", default="identity")
    s.add_argument("--snr-db", type=float, default=24.0)
    s.add_argument("--snr-grid", help="START:STOP:STEP in dB")
    s.add_argument("--trials", type=int, default=100_000)
    s.add_argument("--shards", type=int, default=4)
    s.set_defaults(func=cmd_simulate)

    m = sub.add_parser("mindist", help="minimum product distance")
    shared(m)
    m.add_argument("--constellation", required=True)
    m.add_argument("--rotation", default="identity")
    m.add_argument("--unnormalized", action="store_true")
    m.set_defaults(func=cmd_mindist)

    cp = sub.add_parser("compare", help="side-by-side objective and CER of two rotations")
    shared(cp)
    cp.add_argument("--constellation", required=True)
    cp.add_argument("--rotation-a", required=True)
    cp.add_argument("--rotation-b", required=True)
    cp.add_argument("--snr-db", type=float, default=24.0)
    cp.add_argument("--snr-grid", help="START:STOP:STEP in dB")
    cp.add_argument("--trials", type=int, default=100_000)
    cp.add_argument("--shards", type=int, default=4)
    cp.set_defaults(func=cmd_compare)

    g = sub.add_parser("golden", help="dump an embedded reference matrix")
    g.add_argument("name", choices=GOLDEN_NAMES)
    g.add_argument("--out")
    g.set_defaults(func=cmd_golden)

    return p, {"optimize": o, "simulate": s, "mindist": m, "compare": cp, "golden": g}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subparsers = build_parser()
    try:
        _apply_config_defaults(subparsers, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FloatingPointError, CorruptedStateError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
