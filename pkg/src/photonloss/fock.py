"""Fixed-photon-number Fock bases, state vectors and ladder operators.

Modes are indexed from 0 throughout the Python API.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, sqrt
from typing import Iterable, Mapping, Sequence

import numpy as np

DEFAULT_TOL = 1e-10
MAX_BASIS_SIZE = 10**6


class CapacityError(ValueError):
    """Raised when a requested Fock basis exceeds the supported size."""


class BasisMismatchError(ValueError):
    pass


def _compositions(total: int, parts: int):
    # reverse-lexicographic: first entry runs from total down to 0
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


@dataclass(frozen=True, eq=False)
class FockBasis:
    """All occupation vectors of ``modes`` modes holding ``photons`` photons.

    Elements are kept in reverse-lexicographic order, so for two modes and
    four photons the order is ``(4,0), (3,1), (2,2), (1,3), (0,4)``.
    """

    modes: int
    photons: int
    elements: tuple[tuple[int, ...], ...] = field(repr=False)
    _index: Mapping[tuple[int, ...], int] = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def element(self, i: int) -> tuple[int, ...]:
        return self.elements[i]

    def index(self, occ: Sequence[int]) -> int:
        key = tuple(int(v) for v in occ)
        try:
            return self._index[key]
        except KeyError:
            raise KeyError(
                f"{list(key)} is not an element of the ({self.modes}, {self.photons}) basis"
            ) from None

    def __contains__(self, occ) -> bool:
        return tuple(int(v) for v in occ) in self._index

    def __eq__(self, other) -> bool:
        if not isinstance(other, FockBasis):
            return NotImplemented
        return self.modes == other.modes and self.photons == other.photons

    def __hash__(self) -> int:
        return hash((self.modes, self.photons))

    @property
    def occupations(self) -> np.ndarray:
        """Integer array of shape ``(size, modes)``."""
        return np.array(self.elements, dtype=np.int64).reshape(self.size, self.modes)


@lru_cache(maxsize=None)
def enumerate_basis(modes: int, photons: int) -> FockBasis:
    if modes < 1:
        raise ValueError(f"modes must be >= 1, got {modes}")
    if photons < 0:
        raise ValueError(f"photons must be >= 0, got {photons}")
    size = comb(photons + modes - 1, modes - 1)
    if size > MAX_BASIS_SIZE:
        raise CapacityError(
            f"basis ({modes} modes, {photons} photons) has {size} elements, "
            f"limit is {MAX_BASIS_SIZE}"
        )
    elements = tuple(_compositions(photons, modes))
    index = {occ: i for i, occ in enumerate(elements)}
    return FockBasis(modes, photons, elements, index)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes over a :class:`FockBasis` (stored dense, read-only)."""

    basis: FockBasis
    amp: np.ndarray

    def __post_init__(self):
        amp = np.array(self.amp, dtype=np.complex128).reshape(-1)
        if amp.shape[0] != self.basis.size:
            raise ValueError(
                f"amplitude vector has length {amp.shape[0]}, basis has {self.basis.size}"
            )
        amp.setflags(write=False)
        object.__setattr__(self, "amp", amp)

    @classmethod
    def from_terms(
        cls,
        modes: int,
        photons: int,
        terms: Iterable[tuple[Sequence[int], complex]],
    ) -> "StateVector":
        """Build a state from ``(occupation, amplitude)`` pairs; repeated kets add up."""
        basis = enumerate_basis(modes, photons)
        amp = np.zeros(basis.size, dtype=np.complex128)
        for occ, a in terms:
            if len(occ) != modes:
                raise ValueError(f"occupation {list(occ)} does not have {modes} entries")
            if any(v < 0 for v in occ):
                raise ValueError(f"occupation {list(occ)} has a negative entry")
            if sum(occ) != photons:
                raise ValueError(f"occupation {list(occ)} does not hold {photons} photons")
            amp[basis.index(occ)] += a
        return cls(basis, amp)

    @classmethod
    def ket(cls, occ: Sequence[int]) -> "StateVector":
        return cls.from_terms(len(occ), sum(occ), [(occ, 1.0)])

    @property
    def modes(self) -> int:
        return self.basis.modes

    @property
    def photons(self) -> int:
        return self.basis.photons

    def norm(self) -> float:
        return float(np.linalg.norm(self.amp))

    def is_normalized(self, tol: float = DEFAULT_TOL) -> bool:
        return abs(self.norm() - 1.0) < tol

    def terms(self, tol: float = 0.0) -> list[tuple[tuple[int, ...], complex]]:
        """Nonzero ``(occupation, amplitude)`` pairs in basis order."""
        return [
            (self.basis.element(i), complex(a))
            for i, a in enumerate(self.amp)
            if abs(a) > tol
        ]

    def __add__(self, other: "StateVector") -> "StateVector":
        _check_same_basis(self, other)
        return StateVector(self.basis, self.amp + other.amp)

    def __sub__(self, other: "StateVector") -> "StateVector":
        _check_same_basis(self, other)
        return StateVector(self.basis, self.amp - other.amp)

    def __mul__(self, scalar: complex) -> "StateVector":
        return StateVector(self.basis, self.amp * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> "StateVector":
        return StateVector(self.basis, self.amp / scalar)

    def __neg__(self) -> "StateVector":
        return StateVector(self.basis, -self.amp)

    def allclose(self, other: "StateVector", atol: float = DEFAULT_TOL) -> bool:
        return self.basis == other.basis and bool(np.allclose(self.amp, other.amp, rtol=0, atol=atol))


def _check_same_basis(a: StateVector, b: StateVector) -> None:
    if a.basis != b.basis:
        raise BasisMismatchError(
            f"states live on different bases: ({a.modes}, {a.photons}) vs ({b.modes}, {b.photons})"
        )


def inner(a: StateVector, b: StateVector) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    _check_same_basis(a, b)
    return complex(np.vdot(a.amp, b.amp))


def _check_mode(basis: FockBasis, mode: int) -> None:
    if not 0 <= mode < basis.modes:
        raise IndexError(f"mode {mode} out of range for {basis.modes} modes")


@lru_cache(maxsize=None)
def _annihilation_matrix(modes: int, photons: int, mode: int) -> np.ndarray:
    src = enumerate_basis(modes, photons)
    dst = enumerate_basis(modes, photons - 1)
    mat = np.zeros((dst.size, src.size), dtype=np.complex128)
    for col, occ in enumerate(src.elements):
        n = occ[mode]
        if n == 0:
            continue
        lowered = occ[:mode] + (n - 1,) + occ[mode + 1:]
        mat[dst.index(lowered), col] = sqrt(n)
    mat.setflags(write=False)
    return mat


def annihilation_matrix(basis: FockBasis, mode: int) -> np.ndarray:
    """Dense matrix of ``a_mode`` from the ``n``-photon to the ``(n-1)``-photon sector."""
    if basis.photons == 0:
        raise ValueError("no photons to annihilate")
    _check_mode(basis, mode)
    return _annihilation_matrix(basis.modes, basis.photons, mode)


def creation_matrix(basis: FockBasis, mode: int) -> np.ndarray:
    """Dense matrix of ``a_mode^dagger`` from the ``n``- to the ``(n+1)``-photon sector."""
    _check_mode(basis, mode)
    return _annihilation_matrix(basis.modes, basis.photons + 1, mode).conj().T


def annihilate(state: StateVector, mode: int) -> StateVector:
    mat = annihilation_matrix(state.basis, mode)
    return StateVector(enumerate_basis(state.modes, state.photons - 1), mat @ state.amp)


def create(state: StateVector, mode: int) -> StateVector:
    mat = creation_matrix(state.basis, mode)
    return StateVector(enumerate_basis(state.modes, state.photons + 1), mat @ state.amp)


def hop_matrix(basis: FockBasis, i: int, j: int) -> np.ndarray:
    """``a_i^dagger a_j`` restricted to the sector of ``basis``."""
    _check_mode(basis, i)
    _check_mode(basis, j)
    if basis.photons == 0:
        return np.zeros((1, 1), dtype=np.complex128)
    a_i = annihilation_matrix(basis, i)
    a_j = annihilation_matrix(basis, j)
    return a_i.conj().T @ a_j


# -- JSON form -----------------------------------------------------------------

def terms_to_json(state: StateVector) -> list[dict]:
    return [
        {"occ": list(occ), "re": a.real, "im": a.imag}
        for occ, a in state.terms()
    ]


def terms_from_json(modes: int, photons: int, terms: list[dict]) -> StateVector:
    pairs = []
    for t in terms:
        occ = [int(v) for v in t["occ"]]
        pairs.append((occ, complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))))
    return StateVector.from_terms(modes, photons, pairs)


def state_to_json(state: StateVector) -> dict:
    return {"modes": state.modes, "photons": state.photons, "terms": terms_to_json(state)}


def state_from_json(data: dict) -> StateVector:
    return terms_from_json(int(data["modes"]), int(data["photons"]), data["terms"])
