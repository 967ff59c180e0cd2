"""epsilon(H^D) / epsilon(H) along s in [0, 3.5] for a batch of random networks."""

import argparse

import numpy as np

from doobtransport.metrics import centrosymmetry_ratio_sweep
from doobtransport.netmodel import EnsembleConfig


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--networks", type=int, default=40)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--steps", type=int, default=8)
    args = ap.parse_args()

    cfg = EnsembleConfig(seed=args.seed)
    s_values = np.linspace(0.0, 3.5, args.steps)
    ratios = np.array([
        [p.ratio for p in centrosymmetry_ratio_sweep(cfg.network(i), s_values)]
        for i in range(args.networks)
    ])
    print("s        median   min      max      frac<1")
    for j, s in enumerate(s_values):
        col = ratios[:, j]
        print(f"{s:<8.3f} {np.median(col):<8.4f} {col.min():<8.4f} {col.max():<8.4f} {np.mean(col < 1):.3f}")


if __name__ == "__main__":
    main()
