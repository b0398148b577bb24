import itertools
from math import sqrt

import numpy as np
import pytest

from photonloss.fock import annihilation_matrix, enumerate_basis
from photonloss.linopt import (
    HermitianGenerator,
    ModeUnitary,
    ValidationError,
    builtin_unitary,
    expm_hermitian,
    haar_unitary,
    lift_generator,
    lift_unitary,
    lift_unitary_via_exp,
    permanent,
    principal_generator,
    random_hermitian,
    unitary_from_json,
    unitary_to_json,
)


def brute_permanent(a):
    k = a.shape[0]
    return sum(
        np.prod([a[i, p[i]] for i in range(k)]) for p in itertools.permutations(range(k))
    )


def near_minus_one(gamma, margin=1e-6):
    return np.min(np.abs(np.linalg.eigvals(gamma.mat) + 1)) < margin


class TestPermanent:
    def test_one_by_one(self):
        assert permanent([[3 - 2j]]) == 3 - 2j

    def test_two_by_two(self):
        a, b, c, d = 1.5, -2j, 0.25, 4 + 1j
        assert abs(permanent([[a, b], [c, d]]) - (a * d + b * c)) < 1e-14

    def test_all_ones(self):
        assert abs(permanent(np.ones((4, 4))) - 24) < 1e-12

    def test_empty(self):
        assert permanent(np.zeros((0, 0))) == 1

    def test_non_square(self):
        with pytest.raises(ValueError):
            permanent(np.ones((2, 3)))

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
    def test_against_brute_force(self, rng, k):
        a = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
        assert abs(permanent(a) - brute_permanent(a)) < 1e-10 * max(1, abs(brute_permanent(a)))


class TestValidation:
    def test_non_unitary(self):
        with pytest.raises(ValidationError):
            ModeUnitary([[1, 1], [0, 1]])

    def test_non_hermitian(self):
        with pytest.raises(ValidationError):
            HermitianGenerator([[0, 1], [0, 0]])

    def test_non_square(self):
        with pytest.raises(ValidationError):
            ModeUnitary(np.ones((2, 3)))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            lift_unitary(ModeUnitary(np.eye(3)), enumerate_basis(2, 2))


class TestLiftUnitary:
    def test_identity(self):
        basis = enumerate_basis(3, 3)
        assert np.allclose(lift_unitary(ModeUnitary(np.eye(3)), basis).mat, np.eye(10), atol=1e-15)

    def test_balanced_splitter_on_22(self):
        basis = enumerate_basis(2, 4)
        r = lift_unitary(builtin_unitary("bs50"), basis).mat
        out = r[:, basis.index((2, 2))]
        # (a1^2 - a2^2)^2 / 8 acting on vacuum
        expected = np.array([sqrt(3 / 8), 0, -0.5, 0, sqrt(3 / 8)])
        assert np.allclose(out, expected, atol=1e-14)

    def test_quarter_phase(self):
        basis = enumerate_basis(2, 4)
        r = lift_unitary(builtin_unitary("phase2:pi/2"), basis).mat
        assert np.allclose(r, np.diag([1, 1j, -1, -1j, 1]), atol=1e-15)

    def test_single_photon_sector_is_gamma(self, rng):
        gamma = haar_unitary(3, rng)
        assert np.allclose(lift_unitary(gamma, enumerate_basis(3, 1)).mat, gamma.mat, atol=1e-14)

    @pytest.mark.parametrize("modes,photons", [(2, 4), (3, 3), (3, 4)])
    def test_unitary_and_homomorphism(self, rng, modes, photons):
        basis = enumerate_basis(modes, photons)
        for _ in range(10):
            g1, g2 = haar_unitary(modes, rng), haar_unitary(modes, rng)
            r1, r2 = lift_unitary(g1, basis).mat, lift_unitary(g2, basis).mat
            r12 = lift_unitary(g1 @ g2, basis).mat
            assert np.max(np.abs(r12 - r1 @ r2)) < 1e-9
            assert np.max(np.abs(r1.conj().T @ r1 - np.eye(basis.size))) < 1e-9

    @pytest.mark.parametrize("modes,photons", [(2, 4), (3, 3)])
    def test_intertwining(self, rng, modes, photons):
        basis = enumerate_basis(modes, photons)
        lower = enumerate_basis(modes, photons - 1)
        for _ in range(5):
            gamma = haar_unitary(modes, rng)
            r = lift_unitary(gamma, basis).mat
            r_low = lift_unitary(gamma, lower).mat
            for j in range(modes):
                lhs = r_low.conj().T @ annihilation_matrix(basis, j) @ r
                rhs = sum(gamma.mat[j, k] * annihilation_matrix(basis, k) for k in range(modes))
                assert np.max(np.abs(lhs - rhs)) < 1e-9


class TestLiftGenerator:
    def test_identity_counts_photons(self):
        basis = enumerate_basis(2, 4)
        r = lift_generator(HermitianGenerator(np.eye(2)), basis).mat
        assert np.allclose(r, 4 * np.eye(5), atol=1e-14)

    def test_mode_number(self):
        basis = enumerate_basis(2, 4)
        r = lift_generator(HermitianGenerator(np.diag([1.0, 0.0])), basis).mat
        assert np.allclose(r, np.diag([4, 3, 2, 1, 0]), atol=1e-14)

    def test_hermitian(self, rng):
        basis = enumerate_basis(3, 3)
        r = lift_generator(random_hermitian(3, rng), basis).mat
        assert np.max(np.abs(r - r.conj().T)) < 1e-12

    @pytest.mark.parametrize("modes,photons", [(2, 4), (3, 3)])
    def test_exponential_matches_permanent(self, rng, modes, photons):
        basis = enumerate_basis(modes, photons)
        for _ in range(20):
            lam = random_hermitian(modes, rng)
            s = rng.uniform(0, np.pi)
            lhs = expm_hermitian(lift_generator(lam, basis).mat, s)
            rhs = lift_unitary(lam.exp(s), basis).mat
            assert np.max(np.abs(lhs - rhs)) < 1e-9


class TestLiftViaExp:
    def test_identity(self):
        basis = enumerate_basis(2, 3)
        assert np.allclose(lift_unitary_via_exp(ModeUnitary(np.eye(2)), basis).mat, np.eye(4), atol=1e-14)

    def test_third_phase(self):
        basis = enumerate_basis(3, 3)
        r = lift_unitary_via_exp(builtin_unitary("phase3:2pi/3"), basis).mat
        phases = [np.exp(2j * np.pi * occ[2] / 3) for occ in basis.elements]
        assert np.allclose(r, np.diag(phases), atol=1e-12)

    def test_principal_generator(self, rng):
        gamma = haar_unitary(3, rng)
        lam = principal_generator(gamma)
        assert np.max(np.abs(lam.exp(1.0).mat - gamma.mat)) < 1e-12
        assert np.all(np.abs(np.linalg.eigvalsh(lam.mat)) <= np.pi + 1e-12)

    def test_degenerate_eigenvalues(self):
        # beam splitter squared has a doubly degenerate spectrum
        gamma = builtin_unitary("bs50")
        sq = gamma @ gamma
        basis = enumerate_basis(2, 4)
        r = lift_unitary_via_exp(sq, basis).mat
        assert np.max(np.abs(r - lift_unitary(sq, basis).mat)) < 1e-9

    @pytest.mark.parametrize("name", ["bs50", "phase2:pi/2", "tritter3", "phase3:2pi/3"])
    def test_builtins_agree(self, name):
        gamma = builtin_unitary(name)
        basis = enumerate_basis(gamma.dim, 4 if gamma.dim == 2 else 3)
        diff = lift_unitary_via_exp(gamma, basis).mat - lift_unitary(gamma, basis).mat
        assert np.max(np.abs(diff)) < 1e-9

    @pytest.mark.parametrize("modes,photons", [(2, 4), (3, 3)])
    def test_random_agreement(self, rng, modes, photons):
        basis = enumerate_basis(modes, photons)
        checked = 0
        while checked < 25:
            gamma = haar_unitary(modes, rng)
            if near_minus_one(gamma):
                continue
            diff = lift_unitary_via_exp(gamma, basis).mat - lift_unitary(gamma, basis).mat
            assert np.max(np.abs(diff)) < 1e-9
            checked += 1


class TestBuiltins:
    @pytest.mark.parametrize("name", ["bs50", "phase2:pi/2", "tritter3", "phase3:2pi/3", "identity3"])
    def test_unitary(self, name):
        gamma = builtin_unitary(name)
        assert np.max(np.abs(gamma.mat.conj().T @ gamma.mat - np.eye(gamma.dim))) < 1e-15

    def test_identity_needs_modes(self):
        assert builtin_unitary("identity", modes=2).dim == 2
        with pytest.raises(ValueError):
            builtin_unitary("identity")

    def test_unknown(self):
        with pytest.raises(ValueError, match="unknown unitary"):
            builtin_unitary("bs33")

    def test_tritter_is_dft(self):
        w = np.exp(2j * np.pi / 3)
        dft = np.array([[w ** (j * k) for k in range(3)] for j in range(3)]) / np.sqrt(3)
        assert np.allclose(builtin_unitary("tritter3").mat, dft, atol=1e-15)


def test_unitary_json_round_trip(rng):
    gamma = haar_unitary(3, rng)
    back = unitary_from_json(unitary_to_json(gamma))
    assert np.array_equal(back.mat, gamma.mat)
