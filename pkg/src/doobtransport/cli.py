"""Command line entry point: ``doobtransport {gen,sweep,doob,centro,ensemble}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from doobtransport import errors
from doobtransport.doob import deviation_report, doob_transform, write_dynamics
from doobtransport.ensemble import records_csv, run_ensemble, summary_json
from doobtransport.metrics import centro_sweep_csv, centrosymmetry_ratio_sweep, trace_distance
from doobtransport.netmodel import EnsembleConfig, read_network, write_network
from doobtransport.spectral import format_float, scgf_sweep

MODULE_ERRORS = (
    errors.NetworkValidationError,
    errors.SizeError,
    errors.OverflowGuardError,
    errors.DegeneracyError,
    errors.PositivityError,
    errors.ConsistencyError,
    ValueError,
    ZeroDivisionError,
    OSError,
)


def _common(p: argparse.ArgumentParser, out_help: str) -> None:
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default 1)")
    p.add_argument("--n-sites", type=int, default=None, help="number of sites (default 7)")
    p.add_argument("--s", type=float, default=None, help="tilt parameter")
    p.add_argument("--out", default=None, help=out_help)
    p.add_argument("--link-rate", type=float, default=None, help="rate of the N->1 link (default 1)")
    p.add_argument("--config", default=None, help="JSON file with EnsembleConfig fields")


def _network_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--network", default=None, help="network JSON file; otherwise one is generated")
    p.add_argument("--index", type=int, default=0, help="ensemble sample index of the generated network")


def _range_args(p: argparse.ArgumentParser, s_min: float, s_max: float, steps: int) -> None:
    p.add_argument("--s-min", type=float, default=s_min)
    p.add_argument("--s-max", type=float, default=s_max)
    p.add_argument("--steps", type=int, default=steps)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="doobtransport", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a random network file")
    _common(p, "output JSON file (default stdout)")
    p.add_argument("--index", type=int, default=0)

    p = sub.add_parser("sweep", help="SCGF, current and trace-distance sweep -> CSV")
    _common(p, "output CSV file (default stdout)")
    _network_args(p)
    _range_args(p, -1.0, 3.5, 46)
    p.add_argument("--fd-step", type=float, default=1e-4)

    p = sub.add_parser("doob", help="Doob-transformed network JSON + deviation CSV")
    _common(p, "output directory (default .)")
    _network_args(p)

    p = sub.add_parser("centro", help="centrosymmetry ratio sweep -> CSV")
    _common(p, "output CSV file (default stdout)")
    _network_args(p)
    _range_args(p, 0.0, 3.5, 8)

    p = sub.add_parser("ensemble", help="Monte Carlo run -> records.csv + contingency.json")
    _common(p, "output directory (default .)")
    p.add_argument("--samples", type=int, default=None, help="number of samples M")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument(
        "--epsilon-up-means",
        choices=("larger", "smaller"),
        default="larger",
        help="whether 'centrosymmetry up' counts a larger or a smaller epsilon",
    )
    return parser


def _config(args) -> EnsembleConfig:
    cfg = EnsembleConfig()
    if args.config:
        cfg = EnsembleConfig.from_dict(json.loads(Path(args.config).read_text()))
    return cfg.updated(
        seed=args.seed,
        n_sites=args.n_sites,
        tilt=args.s,
        link_rate=args.link_rate,
        n_samples=getattr(args, "samples", None),
    )


def _network(args):
    if getattr(args, "network", None):
        return read_network(args.network)
    return _config(args).network(args.index)


def _s_values(args):
    if args.s is not None:
        return [args.s]
    if args.steps < 1:
        raise ValueError("--steps must be at least 1")
    return [float(x) for x in np.linspace(args.s_min, args.s_max, args.steps)]


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)


def cmd_gen(args) -> None:
    net = _config(args).network(args.index)
    if args.out is None:
        sys.stdout.write(json.dumps(net.to_dict(), indent=1) + "\n")
    else:
        write_network(net, args.out)


def cmd_sweep(args) -> None:
    net = _network(args)
    s_values = _s_values(args)
    sweep = scgf_sweep(net, s_values, args.fd_step)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([*sweep.COLUMNS, "td_hamiltonian", "td_jumps"])
    original_jumps = net.jump_operators()
    for row, s in zip(sweep.rows(), s_values):
        doob = doob_transform(net, s=s)
        td_h = trace_distance(doob.hamiltonian_d, net.hamiltonian)
        td_l = sum(trace_distance(a, b) for a, b in zip(doob.jumps_d, original_jumps))
        writer.writerow([format_float(x) for x in (*row, td_h, td_l)])
    _emit(buf.getvalue(), args.out)


def cmd_doob(args) -> None:
    net = _network(args)
    s = 3.5 if args.s is None else args.s
    doob = doob_transform(net, s=s)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    write_dynamics(doob, out / "doob_network.json")
    (out / "deviation.csv").write_text(deviation_report(doob))


def cmd_centro(args) -> None:
    net = _network(args)
    points = centrosymmetry_ratio_sweep(net, _s_values(args))
    _emit(centro_sweep_csv(points), args.out)


def cmd_ensemble(args) -> None:
    cfg = _config(args)
    records = run_ensemble(cfg, workers=args.workers)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    (out / "records.csv").write_text(records_csv(records))
    (out / "contingency.json").write_text(summary_json(records, cfg, args.epsilon_up_means))


COMMANDS = {
    "gen": cmd_gen,
    "sweep": cmd_sweep,
    "doob": cmd_doob,
    "centro": cmd_centro,
    "ensemble": cmd_ensemble,
}


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        COMMANDS[args.command](args)
    except MODULE_ERRORS as exc:
        print(f"doobtransport {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
