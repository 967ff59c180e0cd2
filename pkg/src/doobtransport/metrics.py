"""Operator distances and the centrosymmetry measure."""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass

import numpy as np

from doobtransport.doob import doob_hamiltonian
from doobtransport.errors import SizeError
from doobtransport.netmodel import QuantumNetwork
from doobtransport.spectral import leading_eigentriple

MAX_EXHAUSTIVE_N = 10
_CHUNK = 5040


def hs_norm(O) -> float:
    """Hilbert-Schmidt (Frobenius) norm sqrt(tr[O^+ O])."""
    return float(np.linalg.norm(np.asarray(O), "fro"))


def trace_distance(A, B) -> float:
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {B.shape}")
    return 0.5 * float(np.linalg.svd(A - B, compute_uv=False).sum())


@dataclass(frozen=True)
class CentrosymmetryResult:
    epsilon: float
    best_permutation: tuple[int, ...]  # site order, 1-based, endpoints fixed


def centrosymmetry(H, max_exhaustive_n: int = MAX_EXHAUSTIVE_N) -> CentrosymmetryResult:
    """epsilon = min_P ||H_P - A H_P A|| / N over relabelings of sites 2..N-1.

    H_P[a, b] = H[p(a), p(b)].  The exchange matrix A is its own inverse, so
    A H_P A is just H_P with both axes reversed.  Ties go to the
    lexicographically smallest permutation.
    """
    H = np.asarray(H)
    n = H.shape[0]
    if n > max_exhaustive_n:
        raise SizeError(f"exhaustive centrosymmetry search limited to N <= {max_exhaustive_n}, got {n}")
    inner = range(1, n - 1)
    best_val = math.inf
    best_perm = None
    perms = itertools.permutations(inner)
    while True:
        chunk = list(itertools.islice(perms, _CHUNK))
        if not chunk:
            break
        idx = np.empty((len(chunk), n), dtype=np.intp)
        idx[:, 0] = 0
        idx[:, -1] = n - 1
        if n > 2:
            idx[:, 1:-1] = chunk
        HP = H[idx[:, :, None], idx[:, None, :]]
        diff = HP - HP[:, ::-1, ::-1]
        vals = np.sqrt(np.sum(np.abs(diff) ** 2, axis=(1, 2)))
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val = float(vals[k])
            best_perm = tuple(int(i) + 1 for i in idx[k])
    return CentrosymmetryResult(best_val / n, best_perm)


@dataclass(frozen=True)
class CentroPoint:
    s: float
    epsilon_doob: float
    epsilon_original: float
    ratio: float
    best_permutation: tuple[int, ...]


def centrosymmetry_ratio_sweep(network: QuantumNetwork, s_values) -> list[CentroPoint]:
    """epsilon(H^D_s) / epsilon(H) along a tilt sweep."""
    eps0 = centrosymmetry(network.hamiltonian).epsilon
    if eps0 == 0:
        raise ZeroDivisionError("original Hamiltonian is exactly centrosymmetric; ratio undefined")
    points = []
    for s in s_values:
        s = float(s)
        if s == 0:
            res = centrosymmetry(network.hamiltonian)
        else:
            res = centrosymmetry(doob_hamiltonian(network, leading_eigentriple(network, s)))
        points.append(CentroPoint(s, res.epsilon, eps0, res.epsilon / eps0, res.best_permutation))
    return points


def centro_sweep_csv(points: list[CentroPoint]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["s", "epsilon_doob", "epsilon_original", "ratio", "best_permutation"])
    for p in points:
        writer.writerow(
            [
                f"{p.s:.17g}",
                f"{p.epsilon_doob:.17g}",
                f"{p.epsilon_original:.17g}",
                f"{p.ratio:.17g}",
                " ".join(map(str, p.best_permutation)),
            ]
        )
    return buf.getvalue()
