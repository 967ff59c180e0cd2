"""SCGF, current and trace-distance sweep for the sample with the largest Doob gain.

    python3 scripts/best_network_sweep.py --records runs/ensemble/records.csv
"""

import argparse
from pathlib import Path

from doobtransport import cli
from doobtransport.ensemble import read_records_csv, select_best_improvement


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--records", required=True)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", default="runs/best_sweep")
    args = ap.parse_args()

    best = select_best_improvement(read_records_csv(Path(args.records).read_text()))
    out = Path(args.out)
    common = ["--seed", str(args.seed), "--index", str(best)]
    cli.main(["sweep", *common, "--out", str(out / "sweep.csv")])
    cli.main(["doob", *common, "--out", str(out)])
    print(f"sample {best}: wrote {out}/sweep.csv, doob_network.json, deviation.csv")


if __name__ == "__main__":
    main()
