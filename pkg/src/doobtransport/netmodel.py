"""Network data model, random Hamiltonian generation and the network JSON format.

Sites are 1-based everywhere in the public interface.  A link ``j -> k`` with
rate ``gamma`` carries the jump operator ``sqrt(gamma) |k><j|``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from doobtransport.errors import NetworkValidationError, SizeError

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class IncoherentLink:
    from_site: int
    to_site: int
    rate: float
    counting_weight: int = 1

    def __post_init__(self):
        if self.from_site == self.to_site:
            raise NetworkValidationError(f"link {self.from_site}->{self.to_site} is a self loop")
        if not np.isfinite(self.rate) or self.rate < 0:
            raise NetworkValidationError(f"link rate must be nonnegative, got {self.rate}")
        if self.counting_weight not in (0, 1):
            raise NetworkValidationError(
                f"counting weight must be 0 or 1, got {self.counting_weight}"
            )

    def operator(self, n_sites: int) -> np.ndarray:
        L = np.zeros((n_sites, n_sites), dtype=complex)
        L[self.to_site - 1, self.from_site - 1] = np.sqrt(self.rate)
        return L


@dataclass(frozen=True, eq=False)
class QuantumNetwork:
    """N sites with a Hermitian coupling matrix and a list of incoherent links.

    Build through :func:`build_network`, which validates and freezes the
    Hamiltonian array.
    """

    n_sites: int
    hamiltonian: np.ndarray
    links: tuple[IncoherentLink, ...]

    def jump_operators(self) -> list[np.ndarray]:
        return [link.operator(self.n_sites) for link in self.links]

    @property
    def counting_weights(self) -> np.ndarray:
        return np.array([link.counting_weight for link in self.links], dtype=float)

    def with_hamiltonian(self, hamiltonian) -> "QuantumNetwork":
        return build_network(hamiltonian, self.links)

    def __eq__(self, other):
        if not isinstance(other, QuantumNetwork):
            return NotImplemented
        return (
            self.n_sites == other.n_sites
            and self.links == other.links
            and np.array_equal(self.hamiltonian, other.hamiltonian)
        )

    def to_dict(self) -> dict:
        return {
            "n_sites": self.n_sites,
            "hamiltonian": matrix_to_pairs(self.hamiltonian),
            "links": [
                {
                    "from": link.from_site,
                    "to": link.to_site,
                    "rate": float(link.rate),
                    "weight": int(link.counting_weight),
                }
                for link in self.links
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "QuantumNetwork":
        try:
            n = int(doc["n_sites"])
            H = matrix_from_pairs(doc["hamiltonian"])
            links = [
                IncoherentLink(int(d["from"]), int(d["to"]), float(d["rate"]), int(d["weight"]))
                for d in doc["links"]
            ]
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, NetworkValidationError):
                raise
            raise NetworkValidationError(f"malformed network document: {exc}") from exc
        if H.shape != (n, n):
            raise NetworkValidationError(
                f"hamiltonian has shape {H.shape} but n_sites is {n}"
            )
        return build_network(H, links)


def matrix_from_pairs(nested) -> np.ndarray:
    """Decode a nested list of ``[real, imag]`` pairs into a complex matrix."""
    arr = np.asarray(nested, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise NetworkValidationError(
            f"matrix must be a square nested array of [real, imag] pairs, got shape {arr.shape}"
        )
    return arr[..., 0] + 1j * arr[..., 1]


def matrix_to_pairs(M) -> list:
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def build_network(hamiltonian, links) -> QuantumNetwork:
    """Validate inputs and return an immutable :class:`QuantumNetwork`."""
    raw = np.array(hamiltonian, dtype=complex)
    if raw.ndim != 2 or raw.shape[0] != raw.shape[1]:
        raise NetworkValidationError(f"hamiltonian must be square, got shape {raw.shape}")
    n = raw.shape[0]
    if n < 2:
        raise NetworkValidationError("a network needs at least 2 sites")
    scale = max(1.0, float(np.max(np.abs(raw))))
    if np.max(np.abs(raw - raw.conj().T)) > HERMITIAN_TOL * scale:
        raise NetworkValidationError("hamiltonian is not Hermitian")
    if np.any(np.diag(raw) != 0):
        raise NetworkValidationError("hamiltonian must have a zero diagonal")
    H = 0.5 * (raw + raw.conj().T)
    if np.all(H.imag == 0):
        H = H.real.copy()
    H.setflags(write=False)

    links = tuple(links)
    for link in links:
        for site in (link.from_site, link.to_site):
            if not 1 <= site <= n:
                raise NetworkValidationError(f"link site {site} outside [1, {n}]")
    return QuantumNetwork(n, H, links)


def transport_link(n_sites: int, rate: float = 1.0) -> IncoherentLink:
    """The output-to-input link ``N -> 1`` whose events are counted."""
    return IncoherentLink(n_sites, 1, rate, 1)


def random_hamiltonian(
    n_sites: int, rng: np.random.Generator, low: float = 1.0, high: float = 216.0
) -> np.ndarray:
    """Random real symmetric coupling matrix.

    Entries of an auxiliary matrix X are drawn uniformly from ``[low, high)``,
    symmetrized as ``(X + X.T) / 2``, the diagonal is zeroed and the
    input/output coupling ``H[1, N]`` is pinned to 1.
    """
    if n_sites < 3:
        raise SizeError(f"random_hamiltonian needs n_sites >= 3, got {n_sites}")
    X = rng.uniform(low, high, size=(n_sites, n_sites))
    H = 0.5 * (X + X.T)
    np.fill_diagonal(H, 0.0)
    H[0, -1] = H[-1, 0] = 1.0
    return H


def sample_rng(seed: int, sample_index: int) -> np.random.Generator:
    """Independent stream for one ensemble member, keyed by (seed, index)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(sample_index,)))


def random_network(
    n_sites: int,
    rng: np.random.Generator,
    link_rate: float = 1.0,
    low: float = 1.0,
    high: float = 216.0,
) -> QuantumNetwork:
    H = random_hamiltonian(n_sites, rng, low, high)
    return build_network(H, [transport_link(n_sites, link_rate)])


def exchange_matrix(n_sites: int) -> np.ndarray:
    """Anti-diagonal permutation swapping site j with N - j + 1."""
    if n_sites < 2:
        raise SizeError(f"exchange_matrix needs n_sites >= 2, got {n_sites}")
    return np.eye(n_sites)[::-1].copy()


@dataclass(frozen=True)
class EnsembleConfig:
    n_sites: int = 7
    n_samples: int = 1000
    tilt: float = 3.5
    seed: int = 1
    entry_low: float = 1.0
    entry_high: float = 216.0
    link_rate: float = 1.0

    def __post_init__(self):
        if not self.entry_low < self.entry_high:
            raise ValueError("entry_low must be smaller than entry_high")
        if self.n_samples < 1:
            raise ValueError("n_samples must be at least 1")
        if self.n_sites < 3:
            raise SizeError("ensembles need n_sites >= 3")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, doc: dict) -> "EnsembleConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(doc) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc)

    def updated(self, **overrides) -> "EnsembleConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def network(self, sample_index: int) -> QuantumNetwork:
        rng = sample_rng(self.seed, sample_index)
        return random_network(
            self.n_sites, rng, self.link_rate, self.entry_low, self.entry_high
        )


def write_network(network: QuantumNetwork, path) -> None:
    Path(path).write_text(json.dumps(network.to_dict(), indent=1) + "\n")


def read_network(path) -> QuantumNetwork:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise NetworkValidationError(f"{path}: not valid JSON ({exc})") from exc
    return QuantumNetwork.from_dict(doc)
