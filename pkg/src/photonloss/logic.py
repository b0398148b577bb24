"""Logical gates induced by passive networks on a code, and their group."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .codes import CodePair, require_g
from .linopt import HermitianGenerator, ModeUnitary, lift_generator, lift_unitary

DEDUP_TOL = 1e-8
DEFAULT_MAX_ELEMS = 10_000


class LeakyGeneratorError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LogicalGate:
    """2x2 block of a network in the ordered basis ``(|L>, |H>)``."""

    u: np.ndarray
    leakage: float

    def is_unitary(self, tol: float = 1e-9) -> bool:
        return float(np.max(np.abs(self.u.conj().T @ self.u - np.eye(2)))) < tol

    def to_json(self) -> dict:
        return {"re": self.u.real.tolist(), "im": self.u.imag.tolist(), "leakage": self.leakage}


@dataclass(frozen=True)
class BlochPoint:
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass
class GroupClosure:
    gates: list[LogicalGate]
    words: list[tuple[int, ...]]
    orbit: list[BlochPoint]
    orbit_words: list[tuple[int, ...]]
    saturated: bool
    generator_names: list[str] = field(default_factory=list)

    @property
    def order(self) -> int:
        return len(self.gates)

    def word_names(self, word: Sequence[int]) -> str:
        """Word as generator names in application order, ``e`` for the identity."""
        if not word:
            return "e"
        return ".".join(self.generator_names[k] for k in word)

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "saturated": self.saturated,
            "generators": self.generator_names,
            "gates": [
                {**g.to_json(), "word": self.word_names(w)}
                for g, w in zip(self.gates, self.words)
            ],
            "orbit": [
                {"x": p.x, "y": p.y, "z": p.z, "word": self.word_names(w)}
                for p, w in zip(self.orbit, self.orbit_words)
            ],
        }


def _lifted(code: CodePair, gamma: ModeUnitary) -> np.ndarray:
    if gamma.dim != code.modes:
        raise ValueError(f"network acts on {gamma.dim} modes, code has {code.modes}")
    return lift_unitary(gamma, code.basis).mat


def _off_block_norm(code: CodePair, op: np.ndarray) -> float:
    p = code.projector
    off = (np.eye(p.shape[0]) - p) @ op @ p
    return float(np.linalg.norm(off, ord=2))


def leakage_norm(code: CodePair, gamma: ModeUnitary) -> float:
    """Spectral norm of ``(I - P) R(gamma) P``; zero iff the network keeps the code."""
    return _off_block_norm(code, _lifted(code, gamma))


def extract_gate(code: CodePair, gamma: ModeUnitary) -> LogicalGate:
    r = _lifted(code, gamma)
    w = code.encoder
    return LogicalGate(w.conj().T @ r @ w, _off_block_norm(code, r))


def phase_distance(u: np.ndarray, v: np.ndarray) -> float:
    """``1 - |tr(u^dagger v)| / 2``, zero iff ``u`` and ``v`` agree up to a phase."""
    return 1.0 - abs(np.trace(u.conj().T @ v)) / 2.0


def bloch(alpha: complex, beta: complex, tol: float = 1e-10) -> BlochPoint:
    """Bloch vector of ``alpha|L> + beta|H>`` with ``|L>`` at the north pole."""
    norm2 = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm2 - 1.0) >= tol:
        raise ValueError(f"logical state is not normalized: |alpha|^2 + |beta|^2 = {norm2}")
    cross = np.conj(alpha) * beta
    return BlochPoint(
        float(2 * cross.real),
        float(2 * cross.imag),
        float(abs(alpha) ** 2 - abs(beta) ** 2),
    )


def group_closure(
    code: CodePair,
    generators: Sequence[ModeUnitary],
    max_elems: int = DEFAULT_MAX_ELEMS,
    tol: float | None = None,
    dedup_tol: float = DEDUP_TOL,
) -> GroupClosure:
    """Breadth-first closure of the logical gates of ``generators``.

    A word ``(k1, k2, ...)`` means generator ``k1`` is applied first. Products
    are formed on the 2x2 logical level, which is exact once every generator
    keeps the code. Exceeding ``max_elems`` returns an unsaturated result.
    """
    tol = code.tol if tol is None else tol
    names = []
    gen_gates = []
    for k, gamma in enumerate(generators):
        gate = extract_gate(code, gamma)
        label = gamma.name if gamma.name is not None else f"g{k}"
        if gate.leakage >= tol:
            raise LeakyGeneratorError(
                f"generator {label!r} leaks out of the code subspace (leakage {gate.leakage:.3e})"
            )
        names.append(label)
        gen_gates.append(gate.u)

    identity = LogicalGate(np.eye(2, dtype=np.complex128), 0.0)
    gates = [identity]
    words: list[tuple[int, ...]] = [()]
    queue = deque([0])
    saturated = True
    while queue:
        cur = queue.popleft()
        for k, g in enumerate(gen_gates):
            cand = g @ gates[cur].u
            if any(phase_distance(h.u, cand) < dedup_tol for h in gates):
                continue
            if len(gates) >= max_elems:
                saturated = False
                queue.clear()
                break
            gates.append(LogicalGate(cand, 0.0))
            words.append(words[cur] + (k,))
            queue.append(len(gates) - 1)

    orbit: list[BlochPoint] = []
    orbit_words: list[tuple[int, ...]] = []
    for gate, word in zip(gates, words):
        col = gate.u[:, 1]
        col = col / np.linalg.norm(col)
        p = bloch(col[0], col[1], tol=1e-8)
        if all(np.linalg.norm(p.as_array() - q.as_array()) > 1e-6 for q in orbit):
            orbit.append(p)
            orbit_words.append(word)
    return GroupClosure(gates, words, orbit, orbit_words, saturated, names)


def word_unitary(generators: Sequence[ModeUnitary], word: Sequence[int]) -> ModeUnitary:
    """Mode unitary of a generator word (first letter applied first)."""
    mat = np.eye(generators[0].dim, dtype=np.complex128)
    for k in word:
        mat = generators[k].mat @ mat
    return ModeUnitary(mat, tol=1e-8)


@dataclass(frozen=True)
class ObstructionRecord:
    lambda_scalar: float
    lambda_imag: float
    projection_residual: float
    first_order_leakage: float


def obstruction_check(code: CodePair, lam: HermitianGenerator) -> ObstructionRecord:
    """Compare the code block of ``R(Lambda)`` with ``Tr(Lambda G^T)`` times the projector."""
    g = require_g(code)
    if lam.dim != code.modes:
        raise ValueError(f"generator acts on {lam.dim} modes, code has {code.modes}")
    lam_scalar = complex(np.trace(lam.mat @ g.T))
    if abs(lam_scalar.imag) >= 1e-12 * max(1.0, abs(lam_scalar)):
        raise ValueError(f"Tr(Lambda G^T) has imaginary part {lam_scalar.imag:.3e}")
    r = lift_generator(lam, code.basis).mat
    p = code.projector
    residual = float(np.max(np.abs(p @ r @ p - lam_scalar.real * p)))
    return ObstructionRecord(
        lambda_scalar=lam_scalar.real,
        lambda_imag=lam_scalar.imag,
        projection_residual=residual,
        first_order_leakage=_off_block_norm(code, r),
    )


def phase_theorem_check(
    code: CodePair,
    lam: HermitianGenerator,
    s_grid: Sequence[float],
    tol: float | None = None,
    atol: float = 1e-9,
) -> bool:
    """Check ``R(exp(-i s Lambda)) P = exp(-i s lambda) P`` at every ``s``.

    Only meaningful for generators that keep the code to first order; others
    raise :class:`LeakyGeneratorError`.
    """
    tol = code.tol if tol is None else tol
    rec = obstruction_check(code, lam)
    if rec.first_order_leakage >= tol:
        raise LeakyGeneratorError(
            f"generator leaks at first order (leakage {rec.first_order_leakage:.3e})"
        )
    p = code.projector
    for s in s_grid:
        r = lift_unitary(lam.exp(s), code.basis).mat
        expected = np.exp(-1j * s * rec.lambda_scalar) * p
        if float(np.max(np.abs(r @ p - expected))) >= atol:
            return False
    return True

