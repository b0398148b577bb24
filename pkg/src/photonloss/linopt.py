"""Passive linear-optics networks and their action on Fock sectors.

A mode unitary ``gamma`` is lifted so that ``R^dagger a_j R = sum_k gamma[j, k] a_k``;
on the one-photon sector the lift reproduces ``gamma`` itself.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from math import factorial, prod, sqrt

import numpy as np
import scipy.linalg

from .fock import DEFAULT_TOL, FockBasis, hop_matrix

MAX_PERMANENT_SIZE = 20


class ValidationError(ValueError):
    """An input matrix violates its structural invariant."""


def _as_square(mat, name: str) -> np.ndarray:
    arr = np.array(mat, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ModeUnitary:
    mat: np.ndarray
    tol: float = DEFAULT_TOL
    name: str | None = None

    def __post_init__(self):
        mat = _as_square(self.mat, "mode unitary")
        err = float(np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[0]))))
        if err >= self.tol:
            raise ValidationError(f"matrix is not unitary: max |G^+ G - I| = {err:.3e}")
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __matmul__(self, other: "ModeUnitary") -> "ModeUnitary":
        return ModeUnitary(self.mat @ other.mat, tol=max(self.tol, other.tol))

    @property
    def label(self) -> str:
        return self.name if self.name is not None else f"unitary{self.dim}"


@dataclass(frozen=True, eq=False)
class HermitianGenerator:
    mat: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        mat = _as_square(self.mat, "generator")
        err = float(np.max(np.abs(mat - mat.conj().T)))
        if err >= self.tol:
            raise ValidationError(f"matrix is not Hermitian: max |L - L^+| = {err:.3e}")
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def exp(self, s: float = 1.0) -> ModeUnitary:
        """The mode unitary ``exp(-i s Lambda)``."""
        w, v = np.linalg.eigh(self.mat)
        return ModeUnitary((v * np.exp(-1j * s * w)) @ v.conj().T)


@dataclass(frozen=True, eq=False)
class FockOperator:
    basis: FockBasis
    mat: np.ndarray

    def __post_init__(self):
        mat = np.array(self.mat, dtype=np.complex128)
        if mat.shape != (self.basis.size, self.basis.size):
            raise ValueError(
                f"operator shape {mat.shape} does not match basis size {self.basis.size}"
            )
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            if other.basis != self.basis:
                raise ValueError("operators act on different sectors")
            return FockOperator(self.basis, self.mat @ other.mat)
        return self.mat @ other


def permanent(mat) -> complex:
    """Permanent via Ryser's formula, visiting column subsets in Gray-code order."""
    a = np.asarray(mat, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got shape {a.shape}")
    k = a.shape[0]
    if k == 0:
        return 1.0 + 0j
    if k > MAX_PERMANENT_SIZE:
        raise ValueError(f"permanent limited to {MAX_PERMANENT_SIZE}x{MAX_PERMANENT_SIZE}")
    row_sums = np.zeros(k, dtype=np.complex128)
    in_subset = np.zeros(k, dtype=bool)
    total = 0j
    sign = -1.0 if k % 2 else 1.0  # (-1)^k
    for step in range(1, 1 << k):
        col = (step & -step).bit_length() - 1
        if in_subset[col]:
            row_sums -= a[:, col]
        else:
            row_sums += a[:, col]
        in_subset[col] = not in_subset[col]
        sign = -sign
        total += sign * np.prod(row_sums)
    return complex(total)


def _repeat_indices(occ) -> list[int]:
    return [mode for mode, count in enumerate(occ) for _ in range(count)]


def _check_dims(dim: int, basis: FockBasis) -> None:
    if dim != basis.modes:
        raise ValueError(f"matrix acts on {dim} modes, basis has {basis.modes}")


def lift_unitary(gamma: ModeUnitary, basis: FockBasis) -> FockOperator:
    """Matrix of the network on a fixed-photon-number sector via permanents.

    ``<m|R|n> = perm(gamma[m, n]) / sqrt(prod m_i! prod n_j!)`` with rows of
    ``gamma`` repeated by the output occupation ``m`` and columns by the input ``n``.
    """
    _check_dims(gamma.dim, basis)
    g = gamma.mat
    rows = [_repeat_indices(occ) for occ in basis.elements]
    norms = [sqrt(prod(factorial(v) for v in occ)) for occ in basis.elements]
    out = np.empty((basis.size, basis.size), dtype=np.complex128)
    for i, ri in enumerate(rows):
        sub_rows = g[ri, :]
        for j, cj in enumerate(rows):
            out[i, j] = permanent(sub_rows[:, cj]) / (norms[i] * norms[j])
    return FockOperator(basis, out)


def lift_generator(lam: HermitianGenerator, basis: FockBasis) -> FockOperator:
    """``sum_ij Lambda_ij a_i^dagger a_j`` on the sector of ``basis``."""
    _check_dims(lam.dim, basis)
    out = np.zeros((basis.size, basis.size), dtype=np.complex128)
    for i in range(basis.modes):
        for j in range(basis.modes):
            if lam.mat[i, j] != 0:
                out += lam.mat[i, j] * hop_matrix(basis, i, j)
    return FockOperator(basis, out)


def expm_hermitian(h: np.ndarray, s: float = 1.0) -> np.ndarray:
    """``exp(-i s h)`` for Hermitian ``h`` by eigendecomposition."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * s * w)) @ v.conj().T


def principal_generator(gamma: ModeUnitary) -> HermitianGenerator:
    """Hermitian ``Lambda`` with ``exp(-i Lambda) = gamma``, eigenphases in (-pi, pi].

    Eigenvalue -1 takes the phase +pi.
    """
    # complex Schur form of a normal matrix is diagonal with a unitary basis,
    # which stays orthonormal even for degenerate eigenvalues
    t, z = scipy.linalg.schur(gamma.mat, output="complex")
    phases = np.array([cmath.phase(x) for x in np.diag(t)])
    phases[phases <= -np.pi] += 2 * np.pi
    lam = -(z * phases) @ z.conj().T
    return HermitianGenerator((lam + lam.conj().T) / 2)


def lift_unitary_via_exp(gamma: ModeUnitary, basis: FockBasis) -> FockOperator:
    """Lift through the generator: ``exp(-i R(Lambda))`` with ``gamma = exp(-i Lambda)``."""
    _check_dims(gamma.dim, basis)
    lam = principal_generator(gamma)
    return FockOperator(basis, expm_hermitian(lift_generator(lam, basis).mat))


# -- named networks --------------------------------------------------------------

_W3 = np.exp(2j * np.pi / 3)

BUILTIN_UNITARIES: dict[str, np.ndarray] = {
    "bs50": np.array([[1, 1], [-1, 1]], dtype=np.complex128) / np.sqrt(2),
    "phase2:pi/2": np.diag([1, 1j]).astype(np.complex128),
    "tritter3": np.array(
        [[1, 1, 1], [1, _W3, _W3.conjugate()], [1, _W3.conjugate(), _W3]],
        dtype=np.complex128,
    ) / np.sqrt(3),
    "phase3:2pi/3": np.diag([1, 1, _W3]).astype(np.complex128),
}


def builtin_unitary(name: str, modes: int | None = None) -> ModeUnitary:
    """Named network. ``identity`` needs ``modes``; ``identityN`` fixes it."""
    if name.startswith("identity"):
        suffix = name[len("identity"):]
        n = int(suffix) if suffix else modes
        if n is None:
            raise ValueError("identity needs a mode count")
        return ModeUnitary(np.eye(n), name=name)
    try:
        return ModeUnitary(BUILTIN_UNITARIES[name], name=name)
    except KeyError:
        known = ", ".join(sorted(BUILTIN_UNITARIES) + ["identity"])
        raise ValueError(f"unknown unitary {name!r}; known: {known}") from None


def haar_unitary(dim: int, rng: np.random.Generator) -> ModeUnitary:
    from scipy.stats import unitary_group

    return ModeUnitary(unitary_group.rvs(dim, random_state=rng))


def random_hermitian(dim: int, rng: np.random.Generator) -> HermitianGenerator:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return HermitianGenerator((a + a.conj().T) / 2)


def unitary_to_json(gamma: ModeUnitary) -> dict:
    return {"dim": gamma.dim, "re": gamma.mat.real.tolist(), "im": gamma.mat.imag.tolist()}


def unitary_from_json(data: dict, tol: float = DEFAULT_TOL) -> ModeUnitary:
    re = np.array(data["re"], dtype=float)
    im = np.array(data.get("im", np.zeros_like(re)), dtype=float)
    mat = re + 1j * im
    if mat.shape != (int(data["dim"]), int(data["dim"])):
        raise ValueError(f"matrix shape {mat.shape} does not match dim {data['dim']}")
    return ModeUnitary(mat, tol=tol)
