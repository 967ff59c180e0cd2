"""Operator-form reference implementations used as independent oracles."""

import os

import numpy as np

from doobtransport.netmodel import random_network, sample_rng


def gksl_apply(H, jumps, factors, rho):
    out = -1j * (H @ rho - rho @ H)
    for L, f in zip(jumps, factors):
        LdL = L.conj().T @ L
        out = out + f * L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL)
    return out


def adjoint_apply(H, jumps, factors, X):
    out = 1j * (H @ X - X @ H)
    for L, f in zip(jumps, factors):
        LdL = L.conj().T @ L
        out = out + f * L.conj().T @ X @ L - 0.5 * (LdL @ X + X @ LdL)
    return out


def superop_from_map(fn, n):
    """Matrix of a linear map, one column per matrix unit, column-stacked."""
    M = np.zeros((n * n, n * n), dtype=complex)
    for j in range(n):
        for i in range(n):
            E = np.zeros((n, n), dtype=complex)
            E[i, j] = 1
            M[:, j * n + i] = fn(E).reshape(-1, order="F")
    return M


def nullspace_state(M, n):
    """Steady state by least squares with the trace constraint appended."""
    trace_row = np.zeros(n * n)
    trace_row[:: n + 1] = 1
    A = np.vstack([M, trace_row])
    b = np.zeros(n * n + 1, dtype=complex)
    b[-1] = 1
    v, *_ = np.linalg.lstsq(A, b, rcond=None)
    return v.reshape(n, n, order="F")


def random_networks(n_sites, count, seed=11):
    return [random_network(n_sites, sample_rng(seed, i)) for i in range(count)]


def random_density(rng, n):
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = Z @ Z.conj().T
    return rho / np.trace(rho).real


def n_workers():
    return max(1, min(4, os.cpu_count() or 1))
