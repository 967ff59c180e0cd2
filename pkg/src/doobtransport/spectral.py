"""Leading spectral data of tilted generators.

The dense eigendecomposition of the N^2 x N^2 generator is the reference path.
Raw eigenvectors carry an arbitrary complex scale; they are devectorized,
divided by their trace (fixes phase and sign), hermitized, repaired for
round-off negativity and then normalized so that tr[r] = tr[l r] = 1.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from doobtransport.errors import ConsistencyError, DegeneracyError, OverflowGuardError, PositivityError
from doobtransport.liouville import (
    S_MAX,
    Superoperator,
    TiltSpec,
    build_adjoint_tilted,
    build_tilted,
    devectorize,
    vectorize,
)
from doobtransport.netmodel import QuantumNetwork

GAP_TOL = 1e-8
POS_TOL = 1e-9
FD_STEP = 1e-4
RESIDUAL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class SpectralTriple:
    theta: float
    right_eig: np.ndarray
    left_eig: np.ndarray
    s: float
    residual_right: float = 0.0
    residual_left: float = 0.0


def hermitize(X) -> np.ndarray:
    return 0.5 * (X + X.conj().T)


def _leading_index(w: np.ndarray, gap_tol: float) -> int:
    order = np.argsort(-w.real, kind="stable")
    k = order[0]
    if w.size > 1:
        gap = w[k].real - w[order[1]].real
        if gap < gap_tol:
            raise DegeneracyError(
                f"leading eigenvalue not isolated: {w[k]:.6g} and {w[order[1]]:.6g} "
                f"(real-part gap {gap:.3g} < {gap_tol:.1e})"
            )
    return k


def _repair_psd(X: np.ndarray, pos_tol: float, what: str) -> np.ndarray:
    """Clip eigenvalues in (-pos_tol, 0) to zero; anything more negative is an error."""
    vals, vecs = np.linalg.eigh(X)
    scale = max(1.0, float(np.max(np.abs(vals))))
    if vals.min() < -pos_tol * scale:
        raise PositivityError(f"{what} has eigenvalue {vals.min():.3g} < -{pos_tol:.1e}")
    if vals.min() < 0:
        vals = np.clip(vals, 0.0, None)
        X = (vecs * vals) @ vecs.conj().T
    return X


def _eigenmatrix(vec: np.ndarray, n: int) -> np.ndarray:
    X = devectorize(vec, n)
    tr = np.trace(X)
    if abs(tr) == 0:
        raise PositivityError("leading eigenmatrix is traceless")
    return hermitize(X / tr)


def leading_eigentriple(
    network: QuantumNetwork,
    s: float,
    gap_tol: float = GAP_TOL,
    pos_tol: float = POS_TOL,
) -> SpectralTriple:
    """theta(s) with normalized right and left eigenmatrices of the tilted generator."""
    n = network.n_sites
    gen = build_tilted(network, s).matrix
    adj = build_adjoint_tilted(network, s).matrix

    w, V = scipy.linalg.eig(gen)
    k = _leading_index(w, gap_tol)
    theta = float(w[k].real)
    r = _repair_psd(_eigenmatrix(V[:, k], n), pos_tol, "right eigenmatrix")
    r = r / np.trace(r).real

    wa, Va = scipy.linalg.eig(adj)
    ka = _leading_index(wa, gap_tol)
    l = _eigenmatrix(Va[:, ka], n)
    lmin = np.linalg.eigvalsh(l).min()
    if lmin <= pos_tol * max(1.0, float(np.abs(l).max())):
        raise PositivityError(f"left eigenmatrix is not positive definite (min eigenvalue {lmin:.3g})")
    l = l / np.trace(l @ r).real

    scale = max(1.0, np.linalg.norm(gen, 2))
    res_r = float(np.linalg.norm(gen @ vectorize(r) - theta * vectorize(r)))
    res_l = float(np.linalg.norm(adj @ vectorize(l) - theta * vectorize(l)))
    if res_r > RESIDUAL_TOL * scale * np.linalg.norm(r) or res_l > RESIDUAL_TOL * scale * np.linalg.norm(l):
        raise ConsistencyError(
            f"eigen-residuals too large at s={s}: right {res_r:.3g}, left {res_l:.3g}"
        )
    return SpectralTriple(theta, r, l, float(s), res_r, res_l)


def scgf(network: QuantumNetwork, s: float) -> float:
    return leading_eigentriple(network, s).theta


def current_fd(network: QuantumNetwork, s: float, step: float = FD_STEP) -> float:
    """J(s) = theta'(s) by central differences."""
    if step <= 0:
        raise ValueError("finite-difference step must be positive")
    if abs(s) + step > S_MAX:
        raise OverflowGuardError(f"s +/- step leaves [-{S_MAX}, {S_MAX}]")
    return (scgf(network, s + step) - scgf(network, s - step)) / (2 * step)


def current_stationary(triple: SpectralTriple, network: QuantumNetwork) -> float:
    """theta'(s) from first-order perturbation: sum_k O_k e^{s O_k} tr[L_k^+ l L_k r]."""
    total = 0.0
    for link, L in zip(network.links, network.jump_operators()):
        if link.counting_weight == 0:
            continue
        w = np.exp(triple.s * link.counting_weight)
        total += w * np.trace(L.conj().T @ triple.left_eig @ L @ triple.right_eig).real
    return float(total)


def matrix_sqrt(M, pos_tol: float = POS_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Principal square root and inverse square root of a Hermitian positive-definite matrix."""
    M = np.asarray(M, dtype=complex)
    scale = max(1.0, float(np.abs(M).max()))
    if np.abs(M - M.conj().T).max() > 1e-10 * scale:
        raise PositivityError("matrix_sqrt needs a Hermitian matrix")
    vals, vecs = np.linalg.eigh(hermitize(M))
    if vals.min() <= pos_tol:
        raise PositivityError(f"matrix_sqrt needs eigenvalues > {pos_tol:.1e}, got {vals.min():.3g}")
    root = np.sqrt(vals)
    sq = (vecs * root) @ vecs.conj().T
    isq = (vecs / root) @ vecs.conj().T
    return sq, isq


def steady_state(superop: Superoperator, null_tol: float = 1e-10) -> np.ndarray:
    """Stationary density matrix from the null space of an untilted generator."""
    M = superop.matrix
    sv = scipy.linalg.svdvals(M)
    thresh = null_tol * max(1.0, sv[0])
    dim = int(np.sum(sv <= thresh))
    if dim != 1:
        raise DegeneracyError(f"null space of the generator has dimension {dim}, expected 1")
    kernel = scipy.linalg.null_space(M, rcond=thresh / sv[0])
    rho = _eigenmatrix(kernel[:, 0], superop.dim_hilbert)
    rho = _repair_psd(rho, POS_TOL, "steady state")
    return rho / np.trace(rho).real


def _propagate(M: np.ndarray, v: np.ndarray, t: float, n: int, max_step_norm: float):
    """Propagate vec(rho) for time t, renormalizing every step.

    Returns (log tr of the unnormalized result, renormalized state).
    """
    n_steps = max(1, int(np.ceil(t * np.linalg.norm(M, 1) / max_step_norm)))
    P = scipy.linalg.expm((t / n_steps) * M)
    diag = np.arange(n) * (n + 1)
    log_z = 0.0
    for _ in range(n_steps):
        v = P @ v
        tr = v[diag].sum().real
        if not np.isfinite(tr) or tr <= 0:
            raise OverflowGuardError(f"propagated trace became {tr!r}")
        log_z += np.log(tr)
        v = v / tr
    return log_z, v


def propagate_oracle(
    superop: Superoperator,
    rho0,
    t_final: float,
    burn_in: float = 0.0,
    max_step_norm: float = 20.0,
) -> float:
    """log(tr[exp(t L_s)[rho0]]) / t by direct propagation, no eigensolver involved.

    The estimate carries a bias log(tr[l_s rho0]) / t on top of the
    exponentially small gap term.  ``burn_in > 0`` first relaxes rho0 under
    the same generator (and renormalizes), which drives that overlap to 1.
    """
    if t_final <= 0:
        raise ValueError("t_final must be positive")
    if burn_in < 0:
        raise ValueError("burn_in must be nonnegative")
    n = superop.dim_hilbert
    v = vectorize(np.asarray(rho0, dtype=complex)).copy()
    if burn_in > 0:
        _, v = _propagate(superop.matrix, v, burn_in, n, max_step_norm)
    log_z, _ = _propagate(superop.matrix, v, t_final, n, max_step_norm)
    return log_z / t_final


@dataclass
class ScgfSweep:
    s_values: list[float]
    theta_values: list[float]
    current_values: list[float]
    current_stationary: list[float] = field(default_factory=list)
    residual_right: list[float] = field(default_factory=list)
    residual_left: list[float] = field(default_factory=list)

    COLUMNS = ("s", "theta", "current_fd", "current_stationary", "residual_right", "residual_left")

    def rows(self):
        return zip(
            self.s_values,
            self.theta_values,
            self.current_values,
            self.current_stationary,
            self.residual_right,
            self.residual_left,
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.COLUMNS)
        for row in self.rows():
            writer.writerow([format_float(x) for x in row])
        return buf.getvalue()


def format_float(x: float) -> str:
    return f"{x:.17g}"


def scgf_sweep(network: QuantumNetwork, s_values, step: float = FD_STEP) -> ScgfSweep:
    s_values = [float(s) for s in s_values]
    if any(b < a for a, b in zip(s_values, s_values[1:])):
        raise ValueError("s_values must be sorted")
    for s in s_values:
        TiltSpec(s)
    out = ScgfSweep([], [], [])
    for s in s_values:
        triple = leading_eigentriple(network, s)
        out.s_values.append(s)
        out.theta_values.append(triple.theta)
        out.current_values.append(current_fd(network, s, step))
        out.current_stationary.append(current_stationary(triple, network))
        out.residual_right.append(triple.residual_right)
        out.residual_left.append(triple.residual_left)
    return out
