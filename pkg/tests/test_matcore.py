import numpy as np
import pytest

from cqbounds import ValidationError, eig_hermitian, kron, mat_pow, schatten_norm, support_projector
from cqbounds.matcore import require_density, require_hermitian, require_psd

from conftest import random_density


def random_hermitian(rng, d):
    A = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (A + A.conj().T)


class TestEigHermitian:
    def test_diagonal(self):
        w, V = eig_hermitian(np.diag([3.0, 1.0]))
        assert np.allclose(w, [3.0, 1.0])
        assert np.allclose(np.abs(V), np.eye(2))

    def test_pauli_x(self):
        w, _ = eig_hermitian(np.array([[0, 1], [1, 0]], dtype=float))
        assert np.allclose(w, [1.0, -1.0])

    def test_round_trip_random(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            H = random_hermitian(rng, 4)
            w, V = eig_hermitian(H)
            assert np.all(np.diff(w) <= 1e-14)
            recon = (V * w) @ V.conj().T
            assert np.abs(recon - H).max() <= 1e-10 * 4

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError):
            eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestMatPow:
    def test_sqrt_with_null_direction(self):
        out = mat_pow(np.diag([4.0, 0.0]), 0.5)
        assert np.allclose(out, np.diag([2.0, 0.0]))

    def test_rank_one_support_projector(self):
        rng = np.random.default_rng(1)
        u = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        u /= np.linalg.norm(u)
        P = np.outer(u, u.conj())
        assert np.abs(mat_pow(P, 0.0) - P).max() <= 1e-12

    def test_inverse_power_round_trip(self):
        rng = np.random.default_rng(2)
        S = random_density(rng, 4)
        back = mat_pow(mat_pow(S, 0.3), 1.0 / 0.3)
        assert np.abs(back - S).max() <= 1e-8

    def test_rejects_negative_exponent(self):
        with pytest.raises(ValueError):
            mat_pow(np.eye(2), -0.5)

    def test_rejects_indefinite_input(self):
        with pytest.raises(ValidationError):
            mat_pow(np.diag([1.0, -1.0]), 0.5)

    @pytest.mark.parametrize("a", [0.25, 0.5, 1.0])
    @pytest.mark.parametrize("b", [0.25, 0.5, 1.0])
    def test_power_addition_on_support(self, a, b):
        rng = np.random.default_rng(3)
        S = random_density(rng, 4, rank=3)
        lhs = mat_pow(S, a) @ mat_pow(S, b)
        assert np.abs(lhs - mat_pow(S, a + b)).max() <= 1e-9

    def test_support_projector_idempotent(self):
        rng = np.random.default_rng(4)
        for rank in (1, 2, 4):
            S = random_density(rng, 4, rank=rank)
            P = support_projector(S)
            assert np.abs(P @ P - P).max() <= 1e-10
            assert abs(np.trace(P @ S).real - np.trace(S).real) <= 1e-10
            assert abs(np.trace(P).real - rank) <= 1e-8


class TestKron:
    def test_identity(self):
        assert np.allclose(kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_diag_example(self):
        out = kron(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
        assert np.allclose(out, np.diag([0.0, 1.0, 0.0, 0.0]))

    def test_trace_tensor_identity(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            dA, dB = rng.choice([2, 3]), rng.choice([2, 3])
            A, B = random_hermitian(rng, dA), random_hermitian(rng, dB)
            C, D = random_hermitian(rng, dA), random_hermitian(rng, dB)
            lhs = np.trace(kron(A, B) @ kron(C, D))
            rhs = np.trace(A @ C) * np.trace(B @ D)
            assert abs(lhs - rhs) <= 1e-10


class TestSchattenNorm:
    def test_trace_norm(self):
        assert schatten_norm(np.diag([3.0, 4.0]), 1) == pytest.approx(7.0)

    def test_frobenius(self):
        assert schatten_norm(np.diag([3.0, 4.0]), 2) == pytest.approx(5.0)

    def test_eigenvalue_oracle(self):
        rng = np.random.default_rng(6)
        for r in (1.0, 1.7, 3.0):
            S = random_density(rng, 5)
            lam = np.linalg.eigvalsh(S)
            expected = np.sum(np.clip(lam, 0, None) ** r) ** (1.0 / r)
            assert abs(schatten_norm(S, r) - expected) <= 1e-12

    def test_rejects_r_below_one(self):
        with pytest.raises(ValueError):
            schatten_norm(np.eye(2), 0.5)

    def test_monotone_nonincreasing_in_r(self):
        rng = np.random.default_rng(7)
        S = random_density(rng, 4)
        vals = [schatten_norm(S, r) for r in (1, 2, 4, 10)]
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_operator_norm(self):
        S = np.diag([0.2, 0.5, 0.3])
        assert schatten_norm(S, np.inf) == pytest.approx(0.5)


class TestValidators:
    def test_require_hermitian_tolerance(self):
        A = np.array([[1.0, 1.0 + 5e-13j], [1.0 - 5e-13j, 1.0]])
        require_hermitian(A)
        with pytest.raises(ValidationError):
            require_hermitian(np.array([[1.0, 1e-6j], [0.0, 1.0]]))

    def test_require_psd(self):
        require_psd(np.diag([1.0, 0.0]))
        with pytest.raises(ValidationError):
            require_psd(np.diag([1.0, -1e-6]))

    def test_require_density(self):
        require_density(np.eye(2) / 2)
        with pytest.raises(ValidationError):
            require_density(np.eye(2))
