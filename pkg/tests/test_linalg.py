"""Tests for the dense complex linear algebra kernel."""

import numpy as np
import pytest

from lfmsemi import linalg
from lfmsemi.errors import BranchError, DimensionError, DomainError


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(rng, n):
    q, r = np.linalg.qr(random_complex(rng, n, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def series_exp(m, terms=60):
    """Truncated Taylor series oracle for the matrix exponential."""
    n = m.shape[0]
    acc = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, terms + 1):
        term = term @ m / k
        acc = acc + term
    return acc


def power_iteration_norm(a, rng, iters=500):
    """Independent spectral-norm oracle: power iteration on A^H A."""
    samples = random_complex(rng, 10_000, a.shape[1])
    samples /= np.linalg.norm(samples, axis=1)[:, None]
    best = samples[np.argmax(np.linalg.norm(samples @ a.T, axis=1))]
    x = best / np.linalg.norm(best)
    for _ in range(iters):
        y = a.conj().T @ (a @ x)
        x = y / np.linalg.norm(y)
    return np.linalg.norm(a @ x)


class TestSpectralNorm:
    def test_identity(self):
        assert linalg.spectral_norm(np.eye(3)) == pytest.approx(1.0)

    def test_diagonal(self):
        assert linalg.spectral_norm(np.diag([2.0, 0.5])) == pytest.approx(2.0)

    def test_matches_sampling_oracle(self):
        rng = np.random.default_rng(7)
        a = random_complex(rng, 4, 4)
        oracle = power_iteration_norm(a, rng)
        assert abs(linalg.spectral_norm(a) - oracle) < 1e-6

    def test_empty_rejected(self):
        with pytest.raises(DimensionError):
            linalg.spectral_norm(np.zeros((0, 3)))


class TestSpectralRadius:
    def test_diagonal(self):
        assert linalg.spectral_radius(np.diag([0.5j, -1 / 3])) == pytest.approx(0.5)

    def test_nilpotent(self):
        assert linalg.spectral_radius([[0, 1], [0, 0]]) == pytest.approx(0.0)

    def test_companion_golden_ratio(self):
        # companion matrix of z^2 - z - 1; oracle is the closed-form root
        comp = np.array([[0.0, 1.0], [1.0, 1.0]])
        golden = (1 + np.sqrt(5)) / 2
        assert linalg.spectral_radius(comp) == pytest.approx(golden, abs=1e-10)

    def test_nonsquare_rejected(self):
        with pytest.raises(DimensionError):
            linalg.spectral_radius(np.ones((2, 3)))


class TestSchur:
    def test_diagonal_input(self):
        d = np.diag([2.0 + 0j, -1j, 0.5])
        form = linalg.schur_form(d)
        assert np.allclose(form.reconstruct(), d, atol=1e-12)
        assert sorted(np.diag(form.upper_triangular), key=abs) == pytest.approx(
            sorted(np.diag(d), key=abs)
        )

    def test_hermitian_triangularizes_diagonally(self):
        rng = np.random.default_rng(3)
        a = random_complex(rng, 4, 4)
        h = (a + a.conj().T) / 2
        t = linalg.schur_form(h).upper_triangular
        assert np.max(np.abs(t - np.diag(np.diag(t)))) < 1e-10

    def test_reconstruction_random(self):
        rng = np.random.default_rng(11)
        a = random_complex(rng, 5, 5)
        form = linalg.schur_form(a)
        assert np.linalg.norm(form.reconstruct() - a) < 1e-10 * np.linalg.norm(a)
        # strictly lower part of T vanishes
        t = form.upper_triangular
        assert np.max(np.abs(np.tril(t, -1))) < 1e-12
        # unitarity
        u = form.unitary
        assert np.linalg.norm(u @ u.conj().T - np.eye(5)) < 1e-12

    def test_sorting(self):
        a = np.diag([0.3, 1.0, 0.5, np.exp(0.4j)])
        form = linalg.schur_form(a, sort=lambda lam: abs(abs(lam) - 1) <= 1e-9)
        lead = np.abs(np.diag(form.upper_triangular)[:2])
        assert np.allclose(lead, 1.0, atol=1e-12)


class TestSvd:
    def test_zero(self):
        form = linalg.svd_form(np.zeros((3, 2)))
        assert np.allclose(form.singular_values, 0.0)

    def test_unitary(self):
        rng = np.random.default_rng(5)
        u = random_unitary(rng, 4)
        assert np.allclose(linalg.svd_form(u).singular_values, 1.0, atol=1e-12)

    def test_matches_eig_oracle(self):
        rng = np.random.default_rng(13)
        a = random_complex(rng, 3, 4)
        oracle = np.sqrt(np.maximum(np.linalg.eigvalsh(a.conj().T @ a), 0.0))[::-1]
        got = linalg.svd_form(a).singular_values
        assert np.allclose(got, oracle[: len(got)], atol=1e-9)

    def test_reconstruction_and_order(self):
        rng = np.random.default_rng(17)
        a = random_complex(rng, 4, 3)
        form = linalg.svd_form(a)
        assert np.linalg.norm(form.reconstruct() - a) < 1e-10 * np.linalg.norm(a)
        s = form.singular_values
        assert np.all(s[:-1] >= s[1:]) and np.all(s >= 0)


def penrose_residuals(a, ap):
    return (
        np.linalg.norm(a @ ap @ a - a),
        np.linalg.norm(ap @ a @ ap - ap),
        np.linalg.norm((a @ ap).conj().T - a @ ap),
        np.linalg.norm((ap @ a).conj().T - ap @ a),
    )


class TestPinv:
    def test_diagonal(self):
        got = linalg.pinv(np.diag([2.0, 0.0]))
        assert np.allclose(got, np.diag([0.5, 0.0]), atol=1e-14)

    def test_invertible(self):
        rng = np.random.default_rng(19)
        a = random_complex(rng, 3, 3) + 3 * np.eye(3)
        assert np.allclose(linalg.pinv(a), np.linalg.inv(a), atol=1e-9)

    def test_rank_one(self):
        rng = np.random.default_rng(23)
        u = random_complex(rng, 4)
        v = random_complex(rng, 3)
        a = np.outer(u, v.conj())
        expected = np.outer(v, u.conj()) / (np.linalg.norm(u) ** 2 * np.linalg.norm(v) ** 2)
        assert np.allclose(linalg.pinv(a), expected, atol=1e-12)
        assert max(penrose_residuals(a, linalg.pinv(a))) < 1e-9

    @pytest.mark.parametrize("m,n", [(3, 3), (4, 2), (2, 5)])
    def test_penrose_identities_all_ranks(self, m, n):
        rng = np.random.default_rng(100 * m + n)
        for rank in range(min(m, n) + 1):
            a = sum(
                (np.outer(random_complex(rng, m), random_complex(rng, n)) for _ in range(rank)),
                np.zeros((m, n), dtype=complex),
            )
            assert max(penrose_residuals(a, linalg.pinv(a))) < 1e-9

    def test_bad_tol(self):
        with pytest.raises(DomainError):
            linalg.pinv(np.eye(2), rank_tol=0.0)


class TestMatExp:
    def test_zero(self):
        assert np.allclose(linalg.mat_exp(np.zeros((3, 3))), np.eye(3), atol=1e-15)

    def test_rotation(self):
        got = linalg.mat_exp(np.diag([1j * np.pi]))
        assert abs(got[0, 0] + 1.0) < 1e-12

    def test_matches_series_oracle(self):
        rng = np.random.default_rng(29)
        m = random_complex(rng, 4, 4)
        m *= 2.0 / linalg.spectral_norm(m)
        assert np.linalg.norm(linalg.mat_exp(m) - series_exp(m)) < 1e-10

    def test_commuting_product_rule(self):
        rng = np.random.default_rng(31)
        m1 = random_complex(rng, 3, 3)
        m1 /= linalg.spectral_norm(m1)
        m2 = 0.7 * m1 + 0.3 * np.eye(3)  # commutes with m1
        lhs = linalg.mat_exp(m1 + m2)
        rhs = linalg.mat_exp(m1) @ linalg.mat_exp(m2)
        assert np.linalg.norm(lhs - rhs) < 1e-10


class TestMatLogPrincipal:
    def test_identity(self):
        assert np.allclose(linalg.mat_log_principal(np.eye(3)), 0.0, atol=1e-14)

    def test_scalar(self):
        a = np.diag([np.exp(-1 + 0.5j)])
        assert np.allclose(linalg.mat_log_principal(a), np.diag([-1 + 0.5j]), atol=1e-10)

    def test_round_trip_exp_of_log(self):
        rng = np.random.default_rng(37)
        for _ in range(10):
            m0 = random_complex(rng, 4, 4)
            m0 *= 2.9 / linalg.spectral_norm(m0)  # spectrum inside |Im| < 3
            a = linalg.mat_exp(m0)
            back = linalg.mat_exp(linalg.mat_log_principal(a))
            assert np.linalg.norm(back - a) < 1e-8 * max(1.0, np.linalg.norm(a))

    def test_principal_strip(self):
        rng = np.random.default_rng(41)
        a = random_complex(rng, 4, 4) + 4 * np.eye(4)
        logs = np.linalg.eigvals(linalg.mat_log_principal(a))
        assert np.all(logs.imag > -np.pi - 1e-12) and np.all(logs.imag <= np.pi + 1e-12)

    def test_singular_rejected(self):
        with pytest.raises(DomainError):
            linalg.mat_log_principal(np.diag([1.0, 0.0]))

    def test_negative_axis_rejected(self):
        with pytest.raises(BranchError) as err:
            linalg.mat_log_principal(np.diag([-2.0, 1.0]))
        assert "-2" in str(err.value)


class TestIsDissipative:
    def test_normal_left_halfplane(self):
        res = linalg.is_dissipative(np.diag([-1 + 5j, -0.2]))
        assert res.dissipative and res.witness is None

    def test_positive_scalar_witness(self):
        res = linalg.is_dissipative(np.diag([0.1]))
        assert not res.dissipative
        assert abs(abs(res.witness[0]) - 1.0) < 1e-12
        w = res.witness
        assert (w.conj() @ np.diag([0.1]) @ w).real > 0

    def test_agrees_with_sampling_oracle(self):
        rng = np.random.default_rng(43)
        for _ in range(6):
            m = random_complex(rng, 3, 3)
            # keep the hermitian spectrum away from zero so sampling decides
            shift = rng.choice([-1.0, 1.0]) * 0.5
            m = m + shift * np.eye(3) * linalg.spectral_norm(m)
            samples = random_complex(rng, 100_000, 3)
            samples /= np.linalg.norm(samples, axis=1)[:, None]
            best = np.max(np.einsum("ij,jk,ik->i", samples.conj(), m, samples).real)
            verdict = linalg.is_dissipative(m)
            if best > 1e-9:
                assert not verdict.dissipative
            else:
                assert verdict.dissipative

    def test_witness_direct(self):
        rng = np.random.default_rng(47)
        m = random_complex(rng, 4, 4) + 0.5 * np.eye(4)
        res = linalg.is_dissipative(m)
        if not res.dissipative:
            quad = (res.witness.conj() @ m @ res.witness).real
            assert quad > 0
            assert quad == pytest.approx(res.margin, rel=1e-9)


class TestModuleProperties:
    def test_normal_dissipative_iff_contraction_exp(self):
        rng = np.random.default_rng(53)
        for _ in range(30):
            n = int(rng.integers(1, 5))
            u = random_unitary(rng, n)
            eigs = rng.uniform(-2, 1, n) + 1j * rng.uniform(-4, 4, n)
            # keep real parts decisively signed so the equivalence is exact
            eigs.real = np.where(np.abs(eigs.real) > 1e-3, eigs.real, -0.5)
            m = u @ np.diag(eigs) @ u.conj().T
            dis = linalg.is_dissipative(m).dissipative
            contracts = linalg.spectral_norm(linalg.mat_exp(m)) <= 1 + 1e-10
            assert dis == contracts

    def test_dissipative_semigroup_contraction(self):
        rng = np.random.default_rng(59)
        for _ in range(10):
            m = random_complex(rng, 3, 3)
            m = m - (linalg.is_dissipative(m).margin + 0.1) * np.eye(3)
            assert linalg.is_dissipative(m).dissipative
            for t in np.arange(0.0, 5.01, 0.5):
                assert linalg.spectral_norm(linalg.mat_exp(t * m)) <= 1 + 1e-10

    def test_unimodular_row_decoupling(self):
        rng = np.random.default_rng(61)
        for _ in range(10):
            n = int(rng.integers(2, 6))
            u = random_unitary(rng, n)
            b = random_complex(rng, n - 1, n - 1)
            b *= rng.uniform(0.2, 0.9) / linalg.spectral_norm(b)
            theta = rng.uniform(0, 2 * np.pi)
            a = u.conj().T @ np.block([
                [np.array([[np.exp(1j * theta)]]), np.zeros((1, n - 1))],
                [np.zeros((n - 1, 1)), b],
            ]) @ u
            form = linalg.schur_form(a, sort=lambda lam: abs(abs(lam) - 1) <= 1e-9)
            t = form.upper_triangular
            assert np.max(np.abs(t[0, 1:])) < 1e-8

    def test_log_exp_identity_on_strip(self):
        rng = np.random.default_rng(67)
        for _ in range(10):
            m = random_complex(rng, 3, 3)
            m *= (np.pi - 0.2) / linalg.spectral_norm(m)
            back = linalg.mat_log_principal(linalg.mat_exp(m))
            assert np.linalg.norm(back - m) < 1e-8

    def test_log_exp_identity_arbitrary_real_parts(self):
        # imaginary parts stay in the strip; real parts roam freely
        rng = np.random.default_rng(73)
        for shift in (-4.0, 0.0, 3.0):
            m = random_complex(rng, 3, 3)
            m *= (np.pi - 0.3) / linalg.spectral_norm(m)
            m = m + shift * np.eye(3)
            back = linalg.mat_log_principal(linalg.mat_exp(m))
            assert np.linalg.norm(back - m) < 1e-8 * max(1.0, np.exp(shift))

    def test_unitary_first_column(self):
        rng = np.random.default_rng(71)
        for _ in range(10):
            v = random_complex(rng, int(rng.integers(1, 6)))
            q = linalg.unitary_with_first_column(v)
            assert np.linalg.norm(q @ q.conj().T - np.eye(len(v))) < 1e-12
            assert np.linalg.norm(q[:, 0] - v / np.linalg.norm(v)) < 1e-12
