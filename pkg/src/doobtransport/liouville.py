"""Vectorized GKSL generators.

Convention: column stacking, ``vec(A @ X @ B) == kron(B.T, A) @ vec(X)``.
Every superoperator in the package uses it.  Under this convention the
Hilbert-Schmidt inner product is ``vdot(vec(X), vec(Y))`` and the matrix of
the adjoint map is the conjugate transpose of the matrix of the map.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from doobtransport.errors import OverflowGuardError
from doobtransport.netmodel import QuantumNetwork, matrix_from_pairs, matrix_to_pairs

S_MAX = 10.0
CONVENTION = "column-stacking"


def vectorize(X) -> np.ndarray:
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {X.shape}")
    return X.reshape(-1, order="F")


def devectorize(v, n: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {v.shape}")
    if n is None:
        n = int(round(np.sqrt(v.size)))
    if n * n != v.size:
        raise ValueError(f"vector of length {v.size} is not a vectorized {n}x{n} matrix")
    return v.reshape(n, n, order="F")


def left_mul(A) -> np.ndarray:
    """Superoperator of X -> A X."""
    return np.kron(np.eye(A.shape[0]), A)


def right_mul(B) -> np.ndarray:
    """Superoperator of X -> X B."""
    return np.kron(B.T, np.eye(B.shape[0]))


def sandwich(A, B) -> np.ndarray:
    """Superoperator of X -> A X B."""
    return np.kron(B.T, A)


@dataclass(frozen=True, eq=False)
class Superoperator:
    dim_hilbert: int
    matrix: np.ndarray
    convention: str = CONVENTION

    def __post_init__(self):
        d = self.dim_hilbert**2
        if self.matrix.shape != (d, d):
            raise ValueError(
                f"superoperator for N={self.dim_hilbert} must be {d}x{d}, got {self.matrix.shape}"
            )

    def __call__(self, X) -> np.ndarray:
        return devectorize(self.matrix @ vectorize(X), self.dim_hilbert)

    def adjoint(self) -> "Superoperator":
        return Superoperator(self.dim_hilbert, self.matrix.conj().T)

    def to_dict(self) -> dict:
        """Debug dump; the matrix is written as nested [real, imag] pairs."""
        return {
            "dim_hilbert": self.dim_hilbert,
            "convention": self.convention,
            "matrix": matrix_to_pairs(self.matrix),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Superoperator":
        if doc.get("convention", CONVENTION) != CONVENTION:
            raise ValueError(f"unsupported vectorization convention {doc['convention']!r}")
        return cls(int(doc["dim_hilbert"]), matrix_from_pairs(doc["matrix"]))


@dataclass(frozen=True)
class TiltSpec:
    s: float

    def __post_init__(self):
        if not np.isfinite(self.s):
            raise OverflowGuardError(f"tilt must be finite, got {self.s}")
        if abs(self.s) > S_MAX:
            raise OverflowGuardError(f"|s| = {abs(self.s)} exceeds s_max = {S_MAX}")

    def jump_factors(self, network: QuantumNetwork) -> np.ndarray:
        return np.exp(self.s * network.counting_weights)


def gksl_matrix(
    hamiltonian, jumps: Sequence[np.ndarray], jump_factors: Sequence[float] | None = None
) -> np.ndarray:
    """Matrix of ``-i[H, .] + sum_k (f_k L_k . L_k^+ - 1/2 {L_k^+ L_k, .})``.

    With all ``f_k = 1`` this is an ordinary Lindbladian; other factors give
    the tilted generator.
    """
    H = np.asarray(hamiltonian, dtype=complex)
    n = H.shape[0]
    eye = np.eye(n)
    M = -1j * (np.kron(eye, H) - np.kron(H.T, eye))
    if jump_factors is None:
        jump_factors = np.ones(len(jumps))
    for L, f in zip(jumps, jump_factors, strict=True):
        L = np.asarray(L, dtype=complex)
        LdL = L.conj().T @ L
        M += f * np.kron(L.conj(), L)
        M -= 0.5 * (np.kron(eye, LdL) + np.kron(LdL.T, eye))
    return M


def adjoint_gksl_matrix(
    hamiltonian, jumps: Sequence[np.ndarray], jump_factors: Sequence[float] | None = None
) -> np.ndarray:
    """Matrix of ``i[H, .] + sum_k (f_k L_k^+ . L_k - 1/2 {L_k^+ L_k, .})``."""
    H = np.asarray(hamiltonian, dtype=complex)
    n = H.shape[0]
    eye = np.eye(n)
    M = 1j * (np.kron(eye, H) - np.kron(H.T, eye))
    if jump_factors is None:
        jump_factors = np.ones(len(jumps))
    for L, f in zip(jumps, jump_factors, strict=True):
        L = np.asarray(L, dtype=complex)
        LdL = L.conj().T @ L
        M += f * np.kron(L.T, L.conj().T)
        M -= 0.5 * (np.kron(eye, LdL) + np.kron(LdL.T, eye))
    return M


def build_tilted(network: QuantumNetwork, s: float) -> Superoperator:
    factors = TiltSpec(s).jump_factors(network)
    M = gksl_matrix(network.hamiltonian, network.jump_operators(), factors)
    return Superoperator(network.n_sites, M)


def build_liouvillian(network: QuantumNetwork) -> Superoperator:
    return build_tilted(network, 0.0)


def build_adjoint_tilted(network: QuantumNetwork, s: float) -> Superoperator:
    factors = TiltSpec(s).jump_factors(network)
    M = adjoint_gksl_matrix(network.hamiltonian, network.jump_operators(), factors)
    return Superoperator(network.n_sites, M)
