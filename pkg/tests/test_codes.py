import numpy as np
import pytest

from photonloss.codes import (
    CodePair,
    CodeValidationError,
    NotCorrectableError,
    builtin_code,
    code_from_json,
    code_to_json,
    error_vectors,
    gram_matrix,
    require_g,
    transform_code,
    transformed_g,
    verify_code,
)
from photonloss.fock import StateVector, annihilate, create, inner
from photonloss.linopt import ModeUnitary, builtin_unitary, haar_unitary


def dual_rail():
    return CodePair(StateVector.ket((1, 0)), StateVector.ket((0, 1)))


def expectation_g(code):
    """G_ij = <L| a_i^+ a_j |L> evaluated with explicit ladder actions."""
    n = code.modes
    return np.array(
        [[inner(code.L, create(annihilate(code.L, j), i)) for j in range(n)] for i in range(n)]
    )


class TestBuiltins:
    def test_fourphoton_states(self):
        code = builtin_code("fourphoton")
        s = 1 / np.sqrt(2)
        assert code.L.amp.tolist() == [s, 0, 0, 0, s]
        assert code.H.amp.tolist() == [0, 0, 1, 0, 0]

    def test_threephoton_states(self):
        code = builtin_code("threephoton")
        terms = dict(code.L.terms())
        assert set(terms) == {(3, 0, 0), (0, 3, 0), (0, 0, 3)}
        assert all(abs(a - 1 / np.sqrt(3)) < 1e-15 for a in terms.values())
        assert code.H.terms() == [((1, 1, 1), 1)]

    def test_unknown(self):
        with pytest.raises(ValueError):
            builtin_code("fivephoton")


class TestVerify:
    @pytest.mark.parametrize("name,g", [("fourphoton", 2 * np.eye(2)), ("threephoton", np.eye(3))])
    def test_builtin_correctable(self, name, g):
        code = builtin_code(name)
        report = verify_code(code)
        assert report.correctable
        assert np.max(np.abs(report.g - g)) < 1e-12
        assert np.max(np.abs(report.g - expectation_g(code))) < 1e-12
        assert report.max_offdiag_violation < 1e-12
        assert report.max_diag_violation < 1e-12

    def test_dual_rail_fails(self):
        report = verify_code(dual_rail())
        assert not report.correctable
        assert report.g is None
        assert abs(report.max_offdiag_violation - 1.0) < 1e-15
        # <H| a_2^+ a_1 |L> = <01|a_2^+ a_1|10>
        assert abs(inner(dual_rail().H, create(annihilate(dual_rail().L, 0), 1)) - 1) < 1e-15

    def test_require_g_raises(self):
        with pytest.raises(NotCorrectableError):
            require_g(dual_rail())

    def test_hermitian_psd_trace(self, builtin):
        report = verify_code(builtin)
        assert report.hermiticity_violation < 1e-12
        assert report.psd_violation == 0
        assert abs(np.trace(report.g) - builtin.photons) < 1e-10

    def test_gram_structure(self, builtin):
        report = verify_code(builtin)
        gram = gram_matrix(builtin)
        assert np.max(np.abs(gram - np.kron(report.g, np.eye(2)))) < 1e-12
        assert report.gram_structure_violation < 1e-12

    @pytest.mark.parametrize("name,norm", [("fourphoton", np.sqrt(2)), ("threephoton", 1.0)])
    def test_error_states_orthogonal_equal_norm(self, name, norm):
        e = error_vectors(builtin_code(name))
        gram = e.conj().T @ e
        off = gram - np.diag(np.diag(gram))
        assert np.max(np.abs(off)) < 1e-12
        assert np.allclose(np.linalg.norm(e, axis=0), norm, atol=1e-12)

    def test_spectator_code(self, spectator):
        report = verify_code(spectator)
        assert report.correctable
        assert np.allclose(report.g, np.diag([2, 2, 1]), atol=1e-12)

    def test_tolerance_override(self):
        report = verify_code(dual_rail(), tol=2.0)
        assert report.correctable

    def test_report_json(self, fourphoton):
        data = verify_code(fourphoton).to_json()
        assert data["correctable"] is True
        assert data["G"]["re"][0][0] == pytest.approx(2.0)


class TestValidation:
    def test_not_normalized(self):
        with pytest.raises(CodeValidationError, match="L is not normalized"):
            CodePair(2 * StateVector.ket((1, 0)), StateVector.ket((0, 1)))

    def test_not_orthogonal(self):
        L = StateVector.ket((1, 0))
        H = StateVector.from_terms(2, 1, [((1, 0), 0.6), ((0, 1), 0.8)])
        with pytest.raises(CodeValidationError, match="not orthogonal"):
            CodePair(L, H)

    def test_different_bases(self):
        with pytest.raises(CodeValidationError, match="different bases"):
            CodePair(StateVector.ket((1, 0)), StateVector.ket((0, 2)))


class TestTransform:
    def test_identity(self, builtin):
        out = transform_code(builtin, ModeUnitary(np.eye(builtin.modes)))
        assert out.L.allclose(builtin.L, 1e-14) and out.H.allclose(builtin.H, 1e-14)
        assert np.allclose(verify_code(out).g, verify_code(builtin).g, atol=1e-12)

    def test_random_networks_keep_code(self, builtin, rng):
        g = verify_code(builtin).g
        for _ in range(20):
            gamma = haar_unitary(builtin.modes, rng)
            report = verify_code(transform_code(builtin, gamma))
            assert report.correctable
            assert np.max(np.abs(report.g - transformed_g(g, gamma))) < 1e-9
            # G is a multiple of the identity here, so the ordering convention is moot
            assert np.max(np.abs(report.g - gamma.mat.T @ g @ gamma.mat.conj())) < 1e-9

    def test_tritter_phase_on_threephoton(self, threephoton):
        report = verify_code(transform_code(threephoton, builtin_unitary("phase3:2pi/3")))
        assert report.correctable
        assert np.allclose(report.g, np.eye(3), atol=1e-12)

    def test_law_with_nonscalar_g(self, spectator, rng):
        g = verify_code(spectator).g
        for _ in range(10):
            gamma = haar_unitary(3, rng)
            new = verify_code(transform_code(spectator, gamma))
            assert new.correctable
            assert np.max(np.abs(new.g - gamma.mat.conj() @ g @ gamma.mat.T)) < 1e-9
            # the transpose/conjugate form holds for the inverse network
            back = verify_code(transform_code(spectator, ModeUnitary(gamma.mat.conj().T)))
            assert np.max(np.abs(back.g - gamma.mat.T @ g @ gamma.mat.conj())) < 1e-9

    def test_dual_rail_stays_uncorrectable(self, rng):
        # a passive network cannot turn a non-code into a code
        for _ in range(10):
            assert not verify_code(transform_code(dual_rail(), haar_unitary(2, rng))).correctable


def test_code_json_round_trip(complex_g_code):
    back = code_from_json(code_to_json(complex_g_code))
    assert np.max(np.abs(back.L.amp - complex_g_code.L.amp)) <= 1e-15
    assert np.max(np.abs(back.H.amp - complex_g_code.H.amp)) <= 1e-15
