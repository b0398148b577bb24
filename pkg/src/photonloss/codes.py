"""Photon-loss code pairs and the one-photon-loss correctability check."""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .fock import (
    DEFAULT_TOL,
    FockBasis,
    StateVector,
    annihilation_matrix,
    inner,
    terms_from_json,
    terms_to_json,
)
from .linopt import ModeUnitary, lift_unitary


class CodeValidationError(ValueError):
    pass


class NotCorrectableError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CodePair:
    """Logical states ``|L>`` and ``|H>`` spanning a two-dimensional code.

    Inputs are validated, never repaired: both states must be normalized,
    orthogonal and on the same fixed-photon-number basis.
    """

    L: StateVector
    H: StateVector
    tol: float = DEFAULT_TOL
    name: str | None = None

    def __post_init__(self):
        problems = []
        if self.L.basis != self.H.basis:
            problems.append(
                f"L and H live on different bases ({self.L.modes}, {self.L.photons}) "
                f"and ({self.H.modes}, {self.H.photons})"
            )
        else:
            overlap = abs(inner(self.L, self.H))
            if overlap >= self.tol:
                problems.append(f"L and H are not orthogonal: |<L|H>| = {overlap:.3e}")
        for label, state in (("L", self.L), ("H", self.H)):
            dev = abs(state.norm() - 1.0)
            if dev >= self.tol:
                problems.append(f"{label} is not normalized: |norm - 1| = {dev:.3e}")
        if problems:
            raise CodeValidationError("; ".join(problems))

    @property
    def basis(self) -> FockBasis:
        return self.L.basis

    @property
    def modes(self) -> int:
        return self.basis.modes

    @property
    def photons(self) -> int:
        return self.basis.photons

    @property
    def encoder(self) -> np.ndarray:
        """Isometry ``W`` with columns ``|L>, |H>``."""
        return np.column_stack([self.L.amp, self.H.amp])

    @property
    def projector(self) -> np.ndarray:
        w = self.encoder
        return w @ w.conj().T

    def with_tol(self, tol: float) -> "CodePair":
        return CodePair(self.L, self.H, tol=tol, name=self.name)


@dataclass(frozen=True)
class VerificationReport:
    correctable: bool
    g: np.ndarray | None
    max_offdiag_violation: float
    max_diag_violation: float
    gram_structure_violation: float
    hermiticity_violation: float
    psd_violation: float
    trace_violation: float
    tol: float

    def to_json(self) -> dict:
        out = {
            "correctable": self.correctable,
            "tol": self.tol,
            "max_offdiag_violation": self.max_offdiag_violation,
            "max_diag_violation": self.max_diag_violation,
            "gram_structure_violation": self.gram_structure_violation,
            "hermiticity_violation": self.hermiticity_violation,
            "psd_violation": self.psd_violation,
            "trace_violation": self.trace_violation,
            "G": None,
        }
        if self.g is not None:
            out["G"] = {"re": self.g.real.tolist(), "im": self.g.imag.tolist()}
        return out


def error_vectors(code: CodePair) -> np.ndarray:
    """Columns ``a_j|X>`` ordered (mode, logical) with logical order ``L, H``."""
    w = code.encoder
    cols = []
    for j in range(code.modes):
        a = annihilation_matrix(code.basis, j)
        cols.append(a @ w)
    return np.hstack(cols)


def gram_matrix(code: CodePair) -> np.ndarray:
    """``2N x 2N`` matrix of ``<a_i X, a_j Y>``, index ``2*mode + logical``."""
    e = error_vectors(code)
    return e.conj().T @ e


def verify_code(code: CodePair, tol: float | None = None) -> VerificationReport:
    tol = code.tol if tol is None else tol
    n_modes = code.modes
    if code.photons == 0:
        raise CodeValidationError("a vacuum code has no photons to lose")
    # blocks[i, j] = [[<L|a_i^+ a_j|L>, <L|..|H>], [<H|..|L>, <H|..|H>]]
    gram = gram_matrix(code)
    blocks = gram.reshape(n_modes, 2, n_modes, 2).transpose(0, 2, 1, 3)
    offdiag = max(
        float(np.max(np.abs(blocks[:, :, 1, 0]))),
        float(np.max(np.abs(blocks[:, :, 0, 1]))),
    )
    diag = float(np.max(np.abs(blocks[:, :, 1, 1] - blocks[:, :, 0, 0])))
    g = blocks[:, :, 0, 0].copy()
    gram_dev = float(np.max(np.abs(gram - np.kron(g, np.eye(2)))))
    herm = float(np.max(np.abs(g - g.conj().T)))
    min_eig = float(np.min(np.linalg.eigvalsh((g + g.conj().T) / 2)))
    psd = max(0.0, -min_eig)
    trace_dev = abs(complex(np.trace(g)) - code.photons)
    correctable = offdiag < tol and diag < tol
    g.setflags(write=False)
    return VerificationReport(
        correctable=correctable,
        g=g if correctable else None,
        max_offdiag_violation=offdiag,
        max_diag_violation=diag,
        gram_structure_violation=gram_dev,
        hermiticity_violation=herm,
        psd_violation=psd,
        trace_violation=trace_dev,
        tol=tol,
    )


def require_g(code: CodePair) -> np.ndarray:
    report = verify_code(code)
    if not report.correctable:
        raise NotCorrectableError(
            f"code is not one-photon-loss correctable (off-diagonal violation "
            f"{report.max_offdiag_violation:.3e}, diagonal violation "
            f"{report.max_diag_violation:.3e})"
        )
    return report.g


def transform_code(code: CodePair, gamma: ModeUnitary) -> CodePair:
    """Send both logical states through the network ``gamma``."""
    r = lift_unitary(gamma, code.basis).mat
    return CodePair(
        StateVector(code.basis, r @ code.L.amp),
        StateVector(code.basis, r @ code.H.amp),
        tol=code.tol,
        name=code.name,
    )


def transformed_g(g: np.ndarray, gamma: ModeUnitary) -> np.ndarray:
    """G of the code after the network ``gamma``: ``conj(gamma) @ G @ gamma.T``.

    Equivalently ``V.T @ G @ conj(V)`` with ``V = gamma^dagger``, the matrix
    relating old mode operators to new ones (``a = V b``).
    """
    m = gamma.mat
    return m.conj() @ g @ m.T


def builtin_code(name: str, tol: float = DEFAULT_TOL) -> CodePair:
    if name == "fourphoton":
        s = 1 / sqrt(2)
        L = StateVector.from_terms(2, 4, [((0, 4), s), ((4, 0), s)])
        H = StateVector.ket((2, 2))
    elif name == "threephoton":
        s = 1 / sqrt(3)
        L = StateVector.from_terms(3, 3, [((0, 0, 3), s), ((0, 3, 0), s), ((3, 0, 0), s)])
        H = StateVector.ket((1, 1, 1))
    else:
        raise ValueError(f"unknown code {name!r}; known: fourphoton, threephoton")
    return CodePair(L, H, tol=tol, name=name)


BUILTIN_CODES = ("fourphoton", "threephoton")


def code_to_json(code: CodePair) -> dict:
    return {
        "modes": code.modes,
        "photons": code.photons,
        "L": terms_to_json(code.L),
        "H": terms_to_json(code.H),
    }


def code_from_json(data: dict, tol: float = DEFAULT_TOL, name: str | None = None) -> CodePair:
    modes, photons = int(data["modes"]), int(data["photons"])
    return CodePair(
        terms_from_json(modes, photons, data["L"]),
        terms_from_json(modes, photons, data["H"]),
        tol=tol,
        name=name,
    )
