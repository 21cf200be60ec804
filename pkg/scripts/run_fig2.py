#!/usr/bin/env python3
"""Average rate vs training payload (tau/T) for all three schemes.

Full run (50000 trials per point) takes a few minutes single-threaded;
pass --trials or --threads to trade accuracy for speed.
"""

import argparse

from jamsim import run_preset


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=50000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--out", default="fig2.csv")
    args = parser.parse_args()
    rows = run_preset("fig2", output_path=args.out, n_trials=args.trials,
                      master_seed=args.seed, n_workers=args.threads)
    print(f"wrote {len(rows)} rows to {args.out}")


if __name__ == "__main__":
    main()
