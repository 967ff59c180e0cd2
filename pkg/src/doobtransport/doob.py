"""Quantum Doob transform and the constrained dynamics variants.

Given the leading left eigenmatrix l_s of the tilted generator, the Doob
dynamics is the GKSL generator with

    H^D = 1/2 l^{1/2} (H - i/2 sum_j R_j |j><j|) l^{-1/2} + h.c.
    L^D_k = exp(s O_k / 2) l^{1/2} L_k l^{-1/2}

which coincides with l^{1/2} L_s[l^{-1/2} . l^{-1/2}] l^{1/2} - theta(s).
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from doobtransport.errors import ConsistencyError
from doobtransport.liouville import Superoperator, build_tilted, gksl_matrix, vectorize
from doobtransport.netmodel import QuantumNetwork, matrix_to_pairs
from doobtransport.spectral import (
    SpectralTriple,
    hermitize,
    leading_eigentriple,
    matrix_sqrt,
    steady_state,
)

IDENTITY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class DoobDynamics:
    hamiltonian_d: np.ndarray
    jumps_d: tuple[np.ndarray, ...]
    counting_weights: np.ndarray
    s: float
    theta: float
    network: QuantumNetwork | None = None
    triple: SpectralTriple | None = None

    @property
    def n_sites(self) -> int:
        return self.hamiltonian_d.shape[0]


class VariantTag(str, enum.Enum):
    FULL_DOOB = "full_doob"
    DOOB_H_ORIGINAL_L = "doob_h"
    DOOB_H_RESTORED_LINK_ORIGINAL_L = "restored_link"


@dataclass(frozen=True, eq=False)
class DynamicsVariant:
    tag: VariantTag
    hamiltonian: np.ndarray
    jumps: tuple[np.ndarray, ...]
    counting_weights: np.ndarray


def dissipative_rates(network: QuantumNetwork) -> np.ndarray:
    """Diagonal of sum_k L_k^+ L_k, i.e. the total outgoing rate R_j of each site."""
    R = np.zeros(network.n_sites)
    for link in network.links:
        R[link.from_site - 1] += link.rate
    return R


def doob_hamiltonian(network: QuantumNetwork, triple: SpectralTriple) -> np.ndarray:
    sq, isq = matrix_sqrt(triple.left_eig)
    G = network.hamiltonian - 0.5j * np.diag(dissipative_rates(network))
    K = sq @ G @ isq
    return hermitize(K)


def doob_jumps(network: QuantumNetwork, triple: SpectralTriple) -> list[np.ndarray]:
    sq, isq = matrix_sqrt(triple.left_eig)
    return [
        np.exp(0.5 * triple.s * link.counting_weight) * (sq @ L @ isq)
        for link, L in zip(network.links, network.jump_operators())
    ]


def doob_transform(network: QuantumNetwork, triple: SpectralTriple | None = None, s: float | None = None) -> DoobDynamics:
    """Doob dynamics of ``network`` at the tilt of ``triple`` (or computed at ``s``)."""
    if triple is None:
        if s is None:
            raise ValueError("need a spectral triple or a tilt")
        triple = leading_eigentriple(network, s)
    return DoobDynamics(
        hamiltonian_d=doob_hamiltonian(network, triple),
        jumps_d=tuple(doob_jumps(network, triple)),
        counting_weights=network.counting_weights,
        s=triple.s,
        theta=triple.theta,
        network=network,
        triple=triple,
    )


def similarity_generator(network: QuantumNetwork, triple: SpectralTriple) -> Superoperator:
    """l^{1/2} L_s[l^{-1/2} X l^{-1/2}] l^{1/2} - theta X as a matrix."""
    sq, isq = matrix_sqrt(triple.left_eig)
    tilted = build_tilted(network, triple.s).matrix
    conj_in = np.kron(isq.T, isq)
    conj_out = np.kron(sq.T, sq)
    n = network.n_sites
    M = conj_out @ tilted @ conj_in - triple.theta * np.eye(n * n)
    return Superoperator(n, M)


def doob_generator(doob: DoobDynamics, tol: float = IDENTITY_TOL) -> Superoperator:
    """GKSL generator of (H^D, {L^D}).

    When the source network and triple are attached, the result is checked
    column by column (i.e. on every matrix unit) against the similarity form.
    """
    M = gksl_matrix(doob.hamiltonian_d, doob.jumps_d)
    gen = Superoperator(doob.n_sites, M)
    if doob.network is not None and doob.triple is not None:
        mismatch = generator_mismatch(gen, similarity_generator(doob.network, doob.triple))
        if mismatch > tol:
            raise ConsistencyError(
                f"GKSL and similarity forms of the Doob generator differ by {mismatch:.3g}"
            )
    return gen


def generator_mismatch(a: Superoperator, b: Superoperator) -> float:
    """Largest entry-wise difference; column (i, j) is the image of the unit |i><j|."""
    return float(np.abs(a.matrix - b.matrix).max())


def doob_steady_state(doob: DoobDynamics, triple: SpectralTriple, tol: float = IDENTITY_TOL) -> np.ndarray:
    sq, _ = matrix_sqrt(triple.left_eig)
    rho = hermitize(sq @ triple.right_eig @ sq)
    gen = gksl_matrix(doob.hamiltonian_d, doob.jumps_d)
    residual = float(np.abs(gen @ vectorize(rho)).max())
    if residual > tol:
        raise ConsistencyError(f"Doob steady state residual {residual:.3g} exceeds {tol:.1e}")
    return rho


def link_current(rho: np.ndarray, jumps, weights) -> float:
    """Stationary rate of counted events, sum_k O_k tr[L_k rho L_k^+]."""
    total = 0.0
    for L, w in zip(jumps, weights, strict=True):
        if w:
            total += w * np.trace(L @ rho @ L.conj().T).real
    return float(total)


def stationary_current(hamiltonian, jumps, weights) -> float:
    n = np.asarray(hamiltonian).shape[0]
    rho = steady_state(Superoperator(n, gksl_matrix(hamiltonian, jumps)))
    return link_current(rho, jumps, weights)


def network_current(network: QuantumNetwork) -> float:
    return stationary_current(network.hamiltonian, network.jump_operators(), network.counting_weights)


def build_variant(
    network: QuantumNetwork,
    triple: SpectralTriple,
    tag: VariantTag | str,
    restored_coupling: float = 1.0,
    doob: DoobDynamics | None = None,
) -> DynamicsVariant:
    tag = VariantTag(tag)
    if doob is None:
        doob = doob_transform(network, triple)
    weights = network.counting_weights
    if tag is VariantTag.FULL_DOOB:
        return DynamicsVariant(tag, doob.hamiltonian_d, doob.jumps_d, weights)
    original = tuple(network.jump_operators())
    if tag is VariantTag.DOOB_H_ORIGINAL_L:
        return DynamicsVariant(tag, doob.hamiltonian_d, original, weights)
    H = doob.hamiltonian_d.copy()
    H[0, -1] = H[-1, 0] = restored_coupling
    return DynamicsVariant(tag, H, original, weights)


def variant_current(variant: DynamicsVariant) -> float:
    return stationary_current(variant.hamiltonian, variant.jumps, variant.counting_weights)


def deviation_report(doob: DoobDynamics) -> str:
    """CSV of |H^D - H| and |L^D_k - L_k| per entry (sites 1-based)."""
    if doob.network is None:
        raise ValueError("deviation report needs the source network")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["operator", "row", "col", "abs_deviation"])
    pairs = [("H", doob.hamiltonian_d, doob.network.hamiltonian)]
    for k, (Ld, L) in enumerate(zip(doob.jumps_d, doob.network.jump_operators()), start=1):
        pairs.append((f"L{k}", Ld, L))
    for name, new, old in pairs:
        dev = np.abs(new - old)
        for i in range(dev.shape[0]):
            for j in range(dev.shape[1]):
                writer.writerow([name, i + 1, j + 1, f"{dev[i, j]:.17g}"])
    return buf.getvalue()


def dynamics_to_dict(doob: DoobDynamics) -> dict:
    """Network-file layout extended with the Doob jump matrices."""
    doc = {
        "n_sites": doob.n_sites,
        "hamiltonian": matrix_to_pairs(doob.hamiltonian_d),
        "links": doob.network.to_dict()["links"] if doob.network is not None else [],
        "s": doob.s,
        "theta": doob.theta,
        "jumps": [
            {"matrix": matrix_to_pairs(L), "weight": int(w)}
            for L, w in zip(doob.jumps_d, doob.counting_weights)
        ],
    }
    return doc


def write_dynamics(doob: DoobDynamics, path) -> None:
    Path(path).write_text(json.dumps(dynamics_to_dict(doob), indent=1) + "\n")
