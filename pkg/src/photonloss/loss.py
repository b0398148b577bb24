"""Uniform photon loss (amplitude damping), syndrome recovery and fidelity curves.

``gamma`` is the per-photon loss probability; each mode transmits with
probability ``1 - gamma``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, sqrt
from typing import Sequence

import numpy as np

from .codes import CodePair, require_g
from .fock import FockBasis, annihilation_matrix, enumerate_basis


@dataclass(frozen=True, eq=False)
class LossChannel:
    gamma: float
    basis: FockBasis
    kraus: dict[tuple[int, ...], np.ndarray]

    def completeness_error(self) -> float:
        total = sum(k.conj().T @ k for k in self.kraus.values())
        return float(np.max(np.abs(total - np.eye(self.basis.size))))

    def output_basis(self, loss: Sequence[int]) -> FockBasis:
        return enumerate_basis(self.basis.modes, self.basis.photons - sum(loss))


def _single_mode_amp(n: int, k: int, gamma: float) -> float:
    # 0.0 ** 0 == 1.0 covers gamma in {0, 1}
    return sqrt(comb(n, k) * (1.0 - gamma) ** (n - k) * gamma**k)


def build_channel(basis: FockBasis, gamma: float) -> LossChannel:
    """Kraus operators indexed by the vector of photons lost from each mode."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    kraus = {}
    for lost in range(basis.photons + 1):
        target = enumerate_basis(basis.modes, basis.photons - lost)
        for k in enumerate_basis(basis.modes, lost).elements:
            mat = np.zeros((target.size, basis.size), dtype=np.complex128)
            for col, occ in enumerate(basis.elements):
                if any(m < kj for m, kj in zip(occ, k)):
                    continue
                amp = 1.0
                for m, kj in zip(occ, k):
                    amp *= _single_mode_amp(m, kj, gamma)
                out = tuple(m - kj for m, kj in zip(occ, k))
                mat[target.index(out), col] = amp
            kraus[k] = mat
    return LossChannel(gamma, basis, kraus)


@dataclass(frozen=True, eq=False)
class RecoveryMap:
    """Recovery Kraus operators keyed by syndrome.

    Syndrome ``None`` is the no-loss projector on the code sector; syndrome
    ``mu`` maps the ``mu``-th whitened one-loss error space back onto the code.
    """

    code: CodePair
    kraus: dict[int | None, np.ndarray]
    error_states: np.ndarray  # columns |e_mu,X>, index 2*mu + logical
    weights: np.ndarray  # eigenvalues g_mu of G

    @property
    def syndromes(self) -> list[int | None]:
        return list(self.kraus)


def build_recovery(code: CodePair, tol: float | None = None) -> RecoveryMap:
    tol = code.tol if tol is None else tol
    g = require_g(code)
    weights, u = np.linalg.eigh((g + g.conj().T) / 2)
    if np.min(weights) < tol:
        raise ValueError("recovery undefined for zero-weight channel (G is singular)")
    w = code.encoder
    n_modes = code.modes
    a = [annihilation_matrix(code.basis, j) for j in range(n_modes)]
    # |e_mu,X> = sum_j U[j, mu] a_j |X> / sqrt(g_mu) diagonalizes the Gram matrix
    cols = []
    for mu in range(n_modes):
        e_mu = sum(u[j, mu] * (a[j] @ w) for j in range(n_modes)) / sqrt(weights[mu])
        cols.append(e_mu)
    errors = np.hstack(cols)
    kraus: dict[int | None, np.ndarray] = {None: code.projector}
    for mu in range(n_modes):
        e_mu = errors[:, 2 * mu:2 * mu + 2]
        kraus[mu] = w @ e_mu.conj().T
    return RecoveryMap(code, kraus, errors, weights)


@dataclass(frozen=True, eq=False)
class LogicalChannel:
    kraus: list[np.ndarray]
    leakage_weight: float
    gamma: float
    corrected: bool

    def completeness(self) -> np.ndarray:
        return sum(m.conj().T @ m for m in self.kraus)

    def entanglement_fidelity(self) -> float:
        return float(sum(abs(np.trace(m) / 2) ** 2 for m in self.kraus))

    def worst_case_fidelity(self, points: int = 200) -> float:
        """Minimum pure-state fidelity over a Fibonacci mesh of the Bloch sphere."""
        return float(min(
            sum(abs(np.vdot(psi, m @ psi)) ** 2 for m in self.kraus)
            for psi in bloch_mesh(points)
        ))


def bloch_mesh(points: int) -> list[np.ndarray]:
    golden = np.pi * (3.0 - np.sqrt(5.0))
    out = []
    for i in range(points):
        z = 1.0 - 2.0 * (i + 0.5) / points
        phi = golden * i
        theta = np.arccos(z)
        out.append(np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)]))
    return out


def logical_channel(
    code: CodePair,
    gamma: float,
    with_recovery: bool,
    recovery: RecoveryMap | None = None,
) -> LogicalChannel:
    """Logical Kraus operators ``W^dagger K W`` of damping (then recovery, if asked).

    Parts of the damped state that never return to the code sector are
    dropped and reported as ``leakage_weight``.
    """
    channel = build_channel(code.basis, gamma)
    w = code.encoder
    n = code.photons
    no_loss = w.conj().T @ channel.kraus[(0,) * code.modes] @ w
    # fixed photon number: the no-loss Kraus is (1 - gamma)^(n/2) times identity
    scalar = (1.0 - gamma) ** (n / 2)
    if float(np.max(np.abs(no_loss - scalar * np.eye(2)))) > 1e-10:
        raise AssertionError("no-loss Kraus is not a scalar on the code")
    if gamma == 0.0:
        return LogicalChannel([np.eye(2, dtype=np.complex128)], 0.0, gamma, with_recovery)

    kraus = [no_loss]
    if with_recovery:
        rec = recovery if recovery is not None else build_recovery(code)
        for k, a_k in channel.kraus.items():
            if sum(k) != 1:
                continue
            damaged = a_k @ w
            for mu in range(code.modes):
                m = w.conj().T @ rec.kraus[mu] @ damaged
                if np.any(m):
                    kraus.append(m)
    kept = sum(m.conj().T @ m for m in kraus)
    leakage = float(1.0 - np.real(np.trace(kept)) / 2)
    return LogicalChannel(kraus, max(leakage, 0.0), gamma, with_recovery)


@dataclass
class FidelityCurve:
    points: list[tuple[float, float]]
    corrected: bool
    leakage: list[float]
    worst_case: list[float] | None = None

    def slope(self, i: int = 0, j: int = 1) -> float:
        """Log-log slope of ``1 - F`` between points ``i`` and ``j``."""
        (g0, f0), (g1, f1) = self.points[i], self.points[j]
        return float(np.log(f1 / f0) / np.log(g1 / g0))


def fidelity_curve(
    code: CodePair,
    gammas: Sequence[float],
    with_recovery: bool,
    worst_case: bool = False,
) -> FidelityCurve:
    for g in gammas:
        if not 0.0 < g < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {g}")
    rec = build_recovery(code) if with_recovery else None
    points, leakage, worst = [], [], []
    for g in gammas:
        ch = logical_channel(code, g, with_recovery, recovery=rec)
        points.append((float(g), min(max(1.0 - ch.entanglement_fidelity(), 0.0), 1.0)))
        leakage.append(ch.leakage_weight)
        if worst_case:
            worst.append(min(max(1.0 - ch.worst_case_fidelity(), 0.0), 1.0))
    return FidelityCurve(points, with_recovery, leakage, worst if worst_case else None)


def multi_loss_bound(photons: int, gamma: float) -> float:
    """Union bound ``C(n, 2) gamma^2`` on the probability of losing two or more photons."""
    return comb(photons, 2) * gamma**2
