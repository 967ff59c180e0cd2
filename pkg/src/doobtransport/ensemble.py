"""Seeded Monte Carlo ensembles over random networks.

Each sample draws its network from a stream keyed by (seed, sample_index),
so a record depends only on the config and its index, never on worker count
or scheduling.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np
import scipy.stats

from doobtransport import __version__
from doobtransport.doob import VariantTag, build_variant, doob_transform, network_current, variant_current
from doobtransport.errors import ConsistencyError, DegeneracyError, OverflowGuardError, PositivityError
from doobtransport.metrics import centrosymmetry
from doobtransport.netmodel import EnsembleConfig
from doobtransport.spectral import leading_eigentriple

log = logging.getLogger(__name__)

SAMPLE_ERRORS = (DegeneracyError, PositivityError, ConsistencyError, OverflowGuardError)

# record field holding the variant current, and the epsilon it is compared with
VARIANT_FIELDS = {
    VariantTag.FULL_DOOB: ("j_full_doob", "eps_doob"),
    VariantTag.DOOB_H_ORIGINAL_L: ("j_doob_h", "eps_doob"),
    VariantTag.DOOB_H_RESTORED_LINK_ORIGINAL_L: ("j_restored_link", "eps_restored"),
}


@dataclass(frozen=True)
class EnsembleRecord:
    sample_index: int
    j_original: float
    j_full_doob: float
    j_doob_h: float
    j_restored_link: float
    eps_original: float
    eps_doob: float
    status: str = "ok"
    eps_restored: float = math.nan

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def evaluate_sample(config: EnsembleConfig, sample_index: int) -> EnsembleRecord:
    network = config.network(sample_index)
    try:
        triple = leading_eigentriple(network, config.tilt)
        doob = doob_transform(network, triple)
        variants = {
            tag: build_variant(network, triple, tag, doob=doob) for tag in VariantTag
        }
        currents = {tag: variant_current(v) for tag, v in variants.items()}
        j0 = network_current(network)
        eps0 = centrosymmetry(network.hamiltonian).epsilon
        eps_d = centrosymmetry(doob.hamiltonian_d).epsilon
        eps_r = centrosymmetry(
            variants[VariantTag.DOOB_H_RESTORED_LINK_ORIGINAL_L].hamiltonian
        ).epsilon
    except SAMPLE_ERRORS as exc:
        log.warning("sample %d failed: %s", sample_index, exc)
        nan = math.nan
        return EnsembleRecord(sample_index, nan, nan, nan, nan, nan, nan, type(exc).__name__)
    return EnsembleRecord(
        sample_index=sample_index,
        j_original=j0,
        j_full_doob=currents[VariantTag.FULL_DOOB],
        j_doob_h=currents[VariantTag.DOOB_H_ORIGINAL_L],
        j_restored_link=currents[VariantTag.DOOB_H_RESTORED_LINK_ORIGINAL_L],
        eps_original=eps0,
        eps_doob=eps_d,
        eps_restored=eps_r,
    )


def _evaluate_args(args):
    return evaluate_sample(*args)


def run_ensemble(config: EnsembleConfig, workers: int = 1) -> list[EnsembleRecord]:
    jobs = [(config, i) for i in range(config.n_samples)]
    if workers <= 1:
        records = [evaluate_sample(c, i) for c, i in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_evaluate_args, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    n_bad = sum(not r.ok for r in records)
    if n_bad:
        log.warning("%d of %d samples failed and are excluded from statistics", n_bad, len(records))
    return records


RECORD_COLUMNS = [f.name for f in fields(EnsembleRecord)]


def records_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RECORD_COLUMNS)
    for r in records:
        row = []
        for name in RECORD_COLUMNS:
            v = getattr(r, name)
            row.append(f"{v:.17g}" if isinstance(v, float) else v)
        writer.writerow(row)
    return buf.getvalue()


def read_records_csv(text: str) -> list[EnsembleRecord]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        kw = {}
        for f in fields(EnsembleRecord):
            v = row[f.name]
            kw[f.name] = int(v) if f.name == "sample_index" else v if f.name == "status" else float(v)
        out.append(EnsembleRecord(**kw))
    return out


def _ratio(num: int, den: int):
    return num / den if den else None


@dataclass(frozen=True)
class ContingencyTable:
    """2x2 counts: rows (eps up, eps down), columns (J up, J down)."""

    counts: tuple[tuple[int, int], tuple[int, int]]
    n_excluded: int = 0

    @property
    def total(self) -> int:
        return sum(map(sum, self.counts))

    @property
    def p_joint(self):
        return _ratio(self.counts[0][0], self.total)

    @property
    def p_j_given_eps(self):
        return _ratio(self.counts[0][0], sum(self.counts[0]))

    @property
    def p_eps_given_j(self):
        return _ratio(self.counts[0][0], self.counts[0][0] + self.counts[1][0])

    @property
    def p_eps_up(self):
        return _ratio(sum(self.counts[0]), self.total)

    @property
    def p_j_up(self):
        return _ratio(self.counts[0][0] + self.counts[1][0], self.total)

    def to_dict(self) -> dict:
        return {
            "counts": [list(row) for row in self.counts],
            "n_excluded": self.n_excluded,
            "p_eps_up_j_up": self.p_joint,
            "p_j_up_given_eps_up": self.p_j_given_eps,
            "p_eps_up_given_j_up": self.p_eps_given_j,
            "p_eps_up": self.p_eps_up,
            "p_j_up": self.p_j_up,
        }


def contingency(records, variant: VariantTag | str, epsilon_up_means: str = "larger") -> ContingencyTable:
    """Cross-tabulate centrosymmetry change against current change for one variant.

    ``epsilon_up_means="larger"`` counts a sample under "eps up" when the
    variant's epsilon exceeds the original one; ``"smaller"`` flips that.
    """
    records = list(records)
    if not records:
        raise ValueError("contingency needs at least one record")
    if epsilon_up_means not in ("larger", "smaller"):
        raise ValueError("epsilon_up_means must be 'larger' or 'smaller'")
    j_field, eps_field = VARIANT_FIELDS[VariantTag(variant)]
    counts = [[0, 0], [0, 0]]
    excluded = 0
    for r in records:
        if not r.ok:
            excluded += 1
            continue
        eps_v = getattr(r, eps_field)
        eps_up = eps_v > r.eps_original if epsilon_up_means == "larger" else eps_v < r.eps_original
        j_up = getattr(r, j_field) > r.j_original
        counts[0 if eps_up else 1][0 if j_up else 1] += 1
    return ContingencyTable((tuple(counts[0]), tuple(counts[1])), excluded)


def improvement_fraction(records, variant: VariantTag | str) -> float:
    j_field, _ = VARIANT_FIELDS[VariantTag(variant)]
    good = [r for r in records if r.ok]
    if not good:
        raise ValueError("no successful records")
    return sum(getattr(r, j_field) > r.j_original for r in good) / len(good)


def select_best_improvement(records) -> int:
    """Sample index with the largest j_full_doob / j_original (first on ties)."""
    good = [r for r in records if r.ok]
    if not good:
        raise ValueError("no successful records")
    best = max(good, key=lambda r: (r.j_full_doob / r.j_original, -r.sample_index))
    return best.sample_index


def low_efficiency_bias(records) -> float:
    """Spearman correlation between j_original and the full-Doob gain ratio."""
    good = [r for r in records if r.ok]
    j0 = np.array([r.j_original for r in good])
    gain = np.array([r.j_full_doob for r in good]) / j0
    return float(scipy.stats.spearmanr(j0, gain).statistic)


def summary(records, config: EnsembleConfig, epsilon_up_means: str = "larger") -> dict:
    n_bad = sum(not r.ok for r in records)
    return {
        "software_version": __version__,
        "seed": config.seed,
        "config": config.to_dict(),
        "n_samples": len(records),
        "n_excluded": n_bad,
        "epsilon_up_means": epsilon_up_means,
        "variants": {
            tag.value: {
                "improvement_fraction": improvement_fraction(records, tag),
                **contingency(records, tag, epsilon_up_means).to_dict(),
            }
            for tag in VariantTag
        },
    }


def summary_json(records, config: EnsembleConfig, epsilon_up_means: str = "larger") -> str:
    return json.dumps(summary(records, config, epsilon_up_means), indent=1, sort_keys=True) + "\n"
