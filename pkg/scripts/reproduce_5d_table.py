#!/usr/bin/env python3
"""Codeword error rate of the 5D cyclotomic rotation at 20-28 dB.

Simulates the m=11 rotation of the normalized 5D hypercube and prints
one row per SNR; optionally writes the full CSV.
"""
import argparse

from rotopt import SimulationConfig, build_generator, estimate_cer, make_hypercube


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--threads", type=int, default=4)
    ap.add_argument("--out", help="optional CSV path")
    args = ap.parse_args()

    c = make_hypercube(5)
    Q = build_generator(11)
    cfg = SimulationConfig(
        snr_db_grid=tuple(float(s) for s in range(20, 29)),
        trials_per_point=args.trials,
        seed=args.seed,
        threads=args.threads,
    )
    result = estimate_cer(c, Q, cfg)
    print(f"{'snr_db':>7} {'cer':>9} {'std_err':>9}")
    for p in result.points:
        print(f"{p.snr_db:7.1f} {p.cer:9.4f} {p.std_error:9.5f}")
    if args.out:
        result.write_csv(args.out)
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
