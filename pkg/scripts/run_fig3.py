#!/usr/bin/env python3
"""Average rate vs antenna count at 5 dB for all three schemes."""

import argparse

from jamsim import run_preset


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=50000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--out", default="fig3.csv")
    args = parser.parse_args()
    rows = run_preset("fig3", output_path=args.out, n_trials=args.trials,
                      master_seed=args.seed, n_workers=args.threads)
    print(f"wrote {len(rows)} rows to {args.out}")


if __name__ == "__main__":
    main()
