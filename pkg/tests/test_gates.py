import numpy as np
import pytest

from dupsff.gates import (
    DisorderSpec,
    LocalGate,
    disorder_unitary,
    du_gate,
    dual,
    folded,
    gellmann_basis,
    haar_unitary,
    is_dual_unitary,
    is_unitary,
    spin_z,
    swap_gate,
)


def sample_du(d=2, J=0.2, seed=0):
    rng = np.random.default_rng(seed)
    return du_gate(d, J, *(haar_unitary(d, rng) for _ in range(4)))


class TestSpinZ:
    def test_qubit(self):
        assert np.allclose(spin_z(2), np.diag([-0.5, 0.5]))

    def test_qutrit(self):
        assert np.allclose(spin_z(3), np.diag([-1.0, 0.0, 1.0]))

    def test_traceless(self):
        for d in range(2, 11):
            assert abs(np.trace(spin_z(d))) < 1e-14

    def test_rejects_small_d(self):
        with pytest.raises(ValueError):
            spin_z(1)


class TestSwap:
    def test_involution(self):
        for d in (2, 3):
            P = swap_gate(d)
            assert np.allclose(P @ P, np.eye(d * d))

    def test_action(self):
        P = swap_gate(2)
        ket01 = np.zeros(4)
        ket01[0 * 2 + 1] = 1.0
        ket10 = np.zeros(4)
        ket10[1 * 2 + 0] = 1.0
        assert np.allclose(P @ ket01, ket10)

    def test_swap_is_self_dual_and_dual_unitary(self):
        # dual(P) = P, so SWAP is dual-unitary; J = 0 is excluded by the gate
        # family for genericity, not because SWAP would fail this test.
        P = swap_gate(2)
        assert np.allclose(dual(P), P)
        assert is_dual_unitary(P)


class TestDual:
    def test_involution_on_random_matrices(self):
        rng = np.random.default_rng(9)
        for d in (2, 3):
            for _ in range(100):
                U = rng.normal(size=(d * d, d * d)) + 1j * rng.normal(size=(d * d, d * d))
                assert np.allclose(dual(dual(U)), U, atol=0)

    def test_dual_of_du_gate_is_unitary(self):
        gate = sample_du()
        assert is_unitary(dual(gate.matrix), 1e-12)

    def test_dual_of_identity_is_rank_deficient(self):
        d = 2
        cup = np.eye(d).reshape(-1)
        want = np.outer(cup, cup)  # d * |o><o| structure, rank one
        got = dual(np.eye(d * d))
        assert np.allclose(got, want)
        assert np.linalg.matrix_rank(got) == 1
        assert not is_unitary(got)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            dual(np.ones((4, 2)))
        with pytest.raises(ValueError):
            dual(np.ones((3, 3)))


class TestDuGate:
    def test_haar_dressed_gate_is_dual_unitary(self):
        gate = sample_du()
        assert is_unitary(gate.matrix, 1e-12)
        assert is_dual_unitary(gate.matrix, 1e-12)

    def test_plain_core_is_dual_unitary(self):
        gate = du_gate(2, np.pi / 2, *(np.eye(2),) * 4)
        assert is_dual_unitary(gate.matrix, 1e-12)

    def test_core_with_small_J(self):
        core = swap_gate(2) @ np.diag(np.exp(1j * 0.2 * np.outer([-0.5, 0.5], [-0.5, 0.5]).ravel()))
        assert is_dual_unitary(core)

    def test_generic_gate_not_symmetric(self):
        gate = sample_du(seed=3)
        assert np.abs(gate.matrix - gate.matrix.T).max() > 1e-3

    def test_rejects_J_zero(self):
        with pytest.raises(ValueError):
            du_gate(2, 0.0, *(np.eye(2),) * 4)
        with pytest.raises(ValueError):
            du_gate(2, 3.5, *(np.eye(2),) * 4)

    def test_rejects_non_unitary_dressing(self):
        with pytest.raises(ValueError):
            du_gate(2, 0.2, np.ones((2, 2)), np.eye(2), np.eye(2), np.eye(2))

    def test_certificates_over_random_draws(self):
        rng = np.random.default_rng(17)
        for d in (2, 3):
            for _ in range(50):
                J = rng.uniform(1e-3, np.pi)
                gate = du_gate(d, J, *(haar_unitary(d, rng) for _ in range(4)), tolerance=1e-12)
                assert gate.dual_unitary

    def test_dual_unitarity_survives_single_site_dressing(self):
        rng = np.random.default_rng(8)
        gate = sample_du()
        v, w = haar_unitary(2, rng), haar_unitary(2, rng)
        assert is_dual_unitary(np.kron(v, w) @ gate.matrix, 1e-12)


class TestIsUnitary:
    def test_zero_matrix(self):
        assert not is_unitary(np.zeros((4, 4)))

    def test_identity(self):
        assert is_unitary(np.eye(5))


class TestHaar:
    def test_every_sample_unitary(self):
        rng = np.random.default_rng(0)
        for d in (1, 2, 5):
            for _ in range(20):
                assert is_unitary(haar_unitary(d, rng), 1e-12)

    def test_d_one_is_a_phase(self):
        rng = np.random.default_rng(1)
        u = haar_unitary(1, rng)
        assert u.shape == (1, 1)
        assert abs(abs(u[0, 0]) - 1) < 1e-14

    def test_second_moment(self):
        # Haar moment E|U_ij|^2 = 1/d, checked entrywise at 3 sigma
        rng = np.random.default_rng(123)
        n = 10_000
        acc = np.zeros((2, 2))
        for _ in range(n):
            acc += np.abs(haar_unitary(2, rng)) ** 2
        mean = acc / n
        # per-entry variance of |U_ij|^2 for d=2 is 1/12 -> sigma of mean
        sigma = np.sqrt(1 / 12 / n)
        assert np.abs(mean - 0.5).max() < 3 * sigma


class TestGellmann:
    def test_qubit_gives_paulis(self):
        h = gellmann_basis(2)
        assert len(h) == 3
        paulis = [
            np.array([[0, 1], [1, 0]]),
            np.array([[0, -1j], [1j, 0]]),
            np.array([[1, 0], [0, -1]]),
        ]
        for a, b in zip(h, paulis):
            assert np.allclose(a, b)

    def test_count(self):
        assert len(gellmann_basis(3)) == 8

    def test_orthogonality(self):
        for d in (2, 3, 4):
            h = gellmann_basis(d)
            for a, ha in enumerate(h):
                for b, hb in enumerate(h):
                    want = 2.0 if a == b else 0.0
                    assert abs(np.trace(ha.conj().T @ hb).real - want) < 1e-12


class TestDisorder:
    def test_sigma_zero_gives_identity(self):
        rng = np.random.default_rng(0)
        spec = DisorderSpec(2, 0.0)
        assert np.allclose(disorder_unitary(spec, rng), np.eye(2), atol=1e-14)

    def test_samples_unitary(self):
        rng = np.random.default_rng(2)
        for d in (2, 3):
            spec = DisorderSpec(d, 1.0)
            for _ in range(20):
                assert is_unitary(disorder_unitary(spec, rng), 1e-12)

    def test_unit_determinant(self):
        # traceless exponent -> det exp(iH) = exp(i tr H) = 1
        rng = np.random.default_rng(3)
        spec = DisorderSpec(3, 0.7)
        for _ in range(10):
            assert abs(np.linalg.det(disorder_unitary(spec, rng)) - 1) < 1e-12

    def test_small_sigma_near_identity(self):
        rng = np.random.default_rng(4)
        spec = DisorderSpec(2, 1e-4)
        # ||v - 1|| <= sum |theta_j| ||h_j||; statistically ~ 3 sigma sqrt(3)
        devs = [
            np.abs(disorder_unitary(spec, rng) - np.eye(2)).max() for _ in range(200)
        ]
        assert np.mean(devs) < 5 * 1e-4

    def test_rejects_bad_basis(self):
        with pytest.raises(ValueError):
            DisorderSpec(2, 1.0, basis=[np.eye(2)] * 3)


class TestFolded:
    def test_identity(self):
        assert np.allclose(folded(np.eye(4)), np.eye(16))

    def test_unitality_relations(self):
        # all four contractions of the folded dual gate, at 1e-12
        d = 2
        gate = sample_du()
        W = folded(gate.matrix)
        cup2 = np.eye(d * d).reshape(-1) / d  # |o>|o> on the pair, sheet-major
        assert np.abs(W @ cup2 - cup2).max() < 1e-12
        assert np.abs(W.conj().T @ cup2 - cup2).max() < 1e-12
        # horizontal contractions (site-1 capped both sides) need the dual
        Wd = folded(dual(gate.matrix))
        for M in (W, Wd):
            assert np.abs(M @ cup2 - cup2).max() < 1e-12
            assert np.abs(M.conj().T @ cup2 - cup2).max() < 1e-12

    def test_vectorization_consistency(self):
        # folded(U) acts on vec(X) (a -> sum a_mn |m>|n>) as X -> U^T X U*
        rng = np.random.default_rng(5)
        U = haar_unitary(4, rng)
        X = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        got = (folded(U) @ X.reshape(-1)).reshape(4, 4)
        want = U.T @ X @ U.conj()
        assert np.allclose(got, want, atol=1e-12)
