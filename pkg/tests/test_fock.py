"""Tests for the truncated Fock-space core."""

import numpy as np
import pytest

from cubicgen import (
    ConfigurationError,
    CutoffError,
    FockSpace,
    NumericError,
    OperatorMatrix,
    StateVector,
    annihilator,
    creator,
    cubic_phase_target,
    fock_state,
    matrix_exp,
    number_operator,
    position_operator,
    squeezed_vacuum,
    tail_mass,
    wigner,
    xi_from_db,
)


class TestFockSpace:
    def test_dimensions(self):
        assert FockSpace(2).dim == 3
        assert FockSpace(2, 2).dim == 9
        assert FockSpace(30, 2).dim == 961

    def test_invalid(self):
        with pytest.raises(ConfigurationError):
            FockSpace(0)
        with pytest.raises(ConfigurationError):
            FockSpace(3, 3)

    def test_index_ordering(self):
        # two-mode index is mode-1 major
        sp = FockSpace(2, 2)
        assert sp.index(2, 0) == 6
        assert sp.index(0, 2) == 2
        with pytest.raises(ConfigurationError):
            sp.index(3, 0)


class TestLadderOperators:
    def test_annihilator_action(self):
        sp = FockSpace(2)
        a = annihilator(sp)
        one = fock_state(sp, 1)
        assert np.allclose(a.apply(one).amplitudes, fock_state(sp, 0).amplitudes)
        assert np.allclose(a.apply(fock_state(sp, 0)).amplitudes, 0)

    def test_number_operator_diagonal(self):
        sp = FockSpace(5)
        n = creator(sp).entries @ annihilator(sp).entries
        assert np.allclose(n, np.diag(np.arange(6)))

    def test_two_mode_tensor_placement(self):
        sp = FockSpace(1, 2)
        a2 = annihilator(sp, 2)
        out = a2.apply(fock_state(sp, 0, 1))
        assert out.amplitudes[sp.index(0, 0)] == pytest.approx(1)
        assert np.allclose(a2.apply(fock_state(sp, 1, 0)).amplitudes, 0)

    def test_mode_mismatch(self):
        with pytest.raises(ConfigurationError):
            annihilator(FockSpace(3, 1), mode=2)

    def test_space_mixing_rejected(self):
        a = annihilator(FockSpace(3))
        psi = fock_state(FockSpace(4), 0)
        with pytest.raises(ConfigurationError):
            a.apply(psi)

    def test_commutator_below_truncation(self):
        # last row is the known truncation artifact and is excluded
        sp = FockSpace(12)
        a = annihilator(sp).entries
        comm = a @ a.conj().T - a.conj().T @ a - np.eye(13)
        assert np.abs(comm[:12, :12]).max() < 1e-12

    def test_hermiticity(self):
        sp = FockSpace(8)
        q = position_operator(sp).entries
        n = number_operator(sp).entries
        assert np.array_equal(q, q.conj().T)
        assert np.array_equal(n, n.conj().T)


class TestMatrixExp:
    def test_zero(self):
        sp = FockSpace(4)
        z = OperatorMatrix(sp, np.zeros((5, 5)))
        assert np.allclose(matrix_exp(z).entries, np.eye(5), atol=1e-14)

    def test_diagonal(self):
        sp = FockSpace(3)
        d = np.diag([0.1, -0.5, 1.2j, 2.0])
        assert np.allclose(matrix_exp(OperatorMatrix(sp, d)).entries, np.diag(np.exp(d.diagonal())))

    def test_taylor_oracle(self):
        # exp(i theta n) against a 50-term Taylor sum
        sp = FockSpace(10)
        theta = 0.3
        gen = 1j * theta * number_operator(sp).entries
        term = np.eye(11, dtype=complex)
        total = term.copy()
        for k in range(1, 50):
            term = term @ gen / k
            total += term
        assert np.abs(matrix_exp(OperatorMatrix(sp, gen)).entries - total).max() < 1e-12

    def test_nonfinite_rejected(self):
        sp = FockSpace(2)
        m = np.zeros((3, 3))
        m[0, 0] = np.nan
        with pytest.raises(NumericError):
            matrix_exp(OperatorMatrix(sp, m))

    def test_subspace_unitarity(self):
        # exponential of an anti-Hermitian generator is unitary on low levels
        sp = FockSpace(20)
        a = annihilator(sp).entries
        u = matrix_exp(OperatorMatrix(sp, 0.8 * (a.conj().T - a))).entries
        resid = u.conj().T @ u - np.eye(21)
        assert np.linalg.norm(resid[:, :10]) < 1e-8


class TestStates:
    def test_fock_state_single(self):
        psi = fock_state(FockSpace(3), 2)
        assert psi.amplitudes[2] == 1
        assert psi.norm == pytest.approx(1)

    def test_fock_state_two_mode_index(self):
        psi = fock_state(FockSpace(2, 2), 2, 0)
        assert psi.amplitudes[6] == 1
        assert psi.amplitudes.size == 9

    def test_occupation_above_cutoff(self):
        with pytest.raises(ConfigurationError):
            fock_state(FockSpace(3), 4)

    def test_xi_from_db(self):
        assert xi_from_db(5.0) == pytest.approx(-0.25 * np.log(10), abs=1e-14)
        assert xi_from_db(0.0) == 0.0

    def test_squeezed_vacuum_closed_form(self):
        # <2n|S1(xi)|0> = (cosh|xi|)^(-1/2) (-e^{i phi} tanh|xi|)^n sqrt((2n)!)/(2^n n!)
        sp = FockSpace(30)
        xi = xi_from_db(5.0)  # negative real, phi = pi
        psi = squeezed_vacuum(sp, xi)
        from math import factorial

        r, phi = abs(xi), np.pi
        for n in range(8):
            expected = (
                np.cosh(r) ** -0.5
                * (-np.exp(1j * phi) * np.tanh(r)) ** n
                * np.sqrt(factorial(2 * n))
                / (2**n * factorial(n))
            )
            assert psi.amplitudes[2 * n] == pytest.approx(expected, abs=1e-8)
            assert abs(psi.amplitudes[2 * n + 1]) < 1e-12

    def test_cubic_target_degenerate_cases(self):
        sp = FockSpace(20)
        vac = cubic_phase_target(0.0, 0.0, sp)
        assert vac.amplitudes[0] == pytest.approx(1)
        sq = cubic_phase_target(0.0, 5.0, sp)
        assert np.allclose(sq.amplitudes, squeezed_vacuum(sp, xi_from_db(5.0)).amplitudes, atol=1e-12)

    def test_cubic_target_cutoff_consistency(self):
        # truncation error is concentrated at the edge: low-lying amplitudes
        # are stable and the overlap with the higher-cutoff state is ~1
        with pytest.warns(UserWarning):
            lo = cubic_phase_target(0.15, 5.0, FockSpace(30))
        hi = cubic_phase_target(0.15, 5.0, FockSpace(40))
        assert np.abs(lo.amplitudes[:12] - hi.amplitudes[:12]).max() < 2e-6
        assert abs(np.vdot(lo.amplitudes, hi.amplitudes[:31])) ** 2 > 1 - 1e-4

    def test_cubic_target_strict_mode(self):
        with pytest.raises(CutoffError):
            cubic_phase_target(0.3, 7.0, FockSpace(8), strict=True)

    def test_tail_mass(self):
        psi = fock_state(FockSpace(9), 9)
        assert tail_mass(psi) == pytest.approx(1.0)
        assert tail_mass(fock_state(FockSpace(9), 0)) == 0.0


class TestWigner:
    def test_vacuum_peak(self):
        sp = FockSpace(10)
        grid = wigner(fock_state(sp, 0), np.array([0.0]), np.array([0.0]))
        assert grid.values[0, 0] == pytest.approx(2 / np.pi, abs=1e-10)

    def test_fock1_negative_peak(self):
        sp = FockSpace(10)
        grid = wigner(fock_state(sp, 1), np.array([0.0]), np.array([0.0]))
        assert grid.values[0, 0] == pytest.approx(-2 / np.pi, abs=1e-10)

    def test_vacuum_normalization(self):
        sp = FockSpace(10)
        ax = np.linspace(-5, 5, 101)
        grid = wigner(fock_state(sp, 0), ax, ax)
        assert grid.integral() == pytest.approx(1.0, abs=1e-3)

    def test_gaussian_marginal(self):
        # integrating W over p gives |psi(q)|^2 = sqrt(2/pi) exp(-2 q^2)
        sp = FockSpace(12)
        ax = np.linspace(-5, 5, 161)
        grid = wigner(fock_state(sp, 0), ax, ax)
        marginal = np.trapezoid(grid.values, ax, axis=1)
        expected = np.sqrt(2 / np.pi) * np.exp(-2 * ax**2)
        assert np.abs(marginal - expected).max() < 1e-3

    def test_squeezed_normalization(self):
        sp = FockSpace(25)
        ax = np.linspace(-6, 6, 121)
        grid = wigner(squeezed_vacuum(sp, xi_from_db(5.0)), ax, ax)
        assert grid.integral() == pytest.approx(1.0, abs=1e-2)

    def test_empty_axes_rejected(self):
        with pytest.raises(ConfigurationError):
            wigner(fock_state(FockSpace(5), 0), np.array([]), np.array([0.0]))
