"""Monte Carlo run over random 7-site networks at s=3.5 with a printed summary.

    python3 scripts/run_ensemble.py --samples 1000 --workers 4 --out runs/seed1
"""

import argparse
import json
import os
from pathlib import Path

from doobtransport.doob import VariantTag
from doobtransport.ensemble import (
    contingency,
    improvement_fraction,
    low_efficiency_bias,
    records_csv,
    run_ensemble,
    select_best_improvement,
    summary_json,
)
from doobtransport.netmodel import EnsembleConfig


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", default="runs/ensemble")
    args = ap.parse_args()

    cfg = EnsembleConfig(n_samples=args.samples, seed=args.seed)
    records = run_ensemble(cfg, workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "records.csv").write_text(records_csv(records))
    (out / "contingency.json").write_text(summary_json(records, cfg))

    for tag in VariantTag:
        print(f"{tag.value:14s} improved {improvement_fraction(records, tag):.3f}")
    for mode in ("larger", "smaller"):
        for tag in VariantTag:
            t = contingency(records, tag, mode)
            print(f"eps up = {mode:7s} {tag.value:14s} counts={t.counts} "
                  f"P(eps,J)={t.p_joint} P(J|eps)={t.p_j_given_eps}")
    print("best improvement sample:", select_best_improvement(records))
    print("spearman(J0, gain):", round(low_efficiency_bias(records), 4))
    print(json.dumps({"out": str(out)}))


if __name__ == "__main__":
    main()
