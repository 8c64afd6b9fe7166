"""Finite-difference validation of every analytic derivative.

Central differences with step h on the dense builders are the arbiter for
the per-factor derivative matrices; the workspace gradient of the projected
loss is then checked against finite differences of the loss itself.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubicgen import (
    FockSpace,
    ParamVector,
    TargetSpec,
    build_two_mode_squeezer,
    build_unitary,
    build_unitary_gradient,
    cubic_phase_target,
    fock_state,
    loss_and_grad,
    matrix_exp,
    number_operator,
    operator_gradient,
    projected_state_gradient,
    workspace_for,
)
from cubicgen.circuit import build_displacement

SP = FockSpace(10, 2)
X0 = ParamVector(0.31, 0.55, 1.2, 0.18, 0.8, 0.27, 2.3)
H = 1e-5


def _low_block(m, frac=0.5):
    d = SP.dim_per_mode
    keep = int(frac * d)
    idx = [n1 * d + n2 for n1 in range(keep) for n2 in range(keep)]
    return m[np.ix_(idx, idx)]


def _fd_factor(which, x):
    """Central difference of the circuit factor that depends on `which`."""
    from cubicgen.circuit import circuit_factors

    slot = {"beta_abs": 0, "phi_beta": 0, "xi_abs": 1, "phi_xi": 1, "theta": 2, "phi_bs": 3, "alpha": 4}[which]
    plus = circuit_factors(x.replace(**{which: getattr(x, which) + H}), SP)[slot].entries
    minus = circuit_factors(x.replace(**{which: getattr(x, which) - H}), SP)[slot].entries
    return (plus - minus) / (2 * H)


@pytest.mark.parametrize("which", ["alpha", "phi_bs", "theta", "xi_abs", "phi_xi", "beta_abs", "phi_beta"])
def test_operator_gradient_matches_fd(which):
    analytic = operator_gradient(which, X0, SP).entries
    fd = _fd_factor(which, X0)
    err = np.abs(_low_block(analytic - fd)).max()
    scale = max(np.abs(_low_block(fd)).max(), 1.0)
    assert err / scale < 1e-7


@pytest.mark.parametrize("which", ["alpha", "phi_bs", "theta", "xi_abs", "phi_xi", "beta_abs", "phi_beta"])
def test_unitary_gradient_matches_fd(which):
    analytic = build_unitary_gradient(which, X0, SP).entries
    plus = build_unitary(X0.replace(**{which: getattr(X0, which) + H}), SP).entries
    minus = build_unitary(X0.replace(**{which: getattr(X0, which) - H}), SP).entries
    fd = (plus - minus) / (2 * H)
    err = np.abs(_low_block(analytic - fd)).max()
    scale = max(np.abs(_low_block(fd)).max(), 1.0)
    assert err / scale < 1e-7


class TestSeparationIdentities:
    def test_squeezer_phase_separation(self):
        # S(|xi| e^{i phi}) = P(phi/2) S(|xi|) P(phi/2)^dag with P(t) = e^{i t (n1+n2)}
        xi_abs, phi = 0.3, 1.1
        ntot = number_operator(SP, 1).entries + number_operator(SP, 2).entries
        p = np.diag(np.exp(0.5j * phi * ntot.diagonal()))
        lhs = build_two_mode_squeezer(xi_abs, phi, SP).entries
        rhs = p @ build_two_mode_squeezer(xi_abs, 0.0, SP).entries @ p.conj().T
        assert np.abs(_low_block(lhs - rhs)).max() < 1e-10

    def test_displacement_phase_separation(self):
        # D(|b| e^{i phi}) = R(phi) D(|b|) R(phi)^dag
        b_abs, phi = 0.4, 2.0
        n2 = number_operator(SP, 2).entries
        r = np.diag(np.exp(1j * phi * n2.diagonal()))
        lhs = build_displacement(b_abs, phi, 2, SP).entries
        rhs = r @ build_displacement(b_abs, 0.0, 2, SP).entries @ r.conj().T
        assert np.abs(_low_block(lhs - rhs)).max() < 1e-10


class TestProjectedGradient:
    def _fd_loss(self, x, target, i):
        ws = workspace_for(SP.cutoff)
        tgt = target.amplitudes

        def loss(arr):
            out, n = ws.output(arr)
            return 1.0 - abs(np.vdot(out, tgt)) ** 2

        arr = x.to_array()
        plus, minus = arr.copy(), arr.copy()
        plus[i] += H
        minus[i] -= H
        return (loss(plus) - loss(minus)) / (2 * H)

    def test_all_components_match_fd(self):
        target = cubic_phase_target(0.1, 4.0, FockSpace(SP.cutoff, 1))
        bundle = projected_state_gradient(X0, target, SP)
        for i in range(7):
            fd = self._fd_loss(X0, target, i)
            assert abs(bundle.grad[i] - fd) / max(abs(fd), 1e-8) < 1e-5

    def test_fixed_mask_zeroes_entries(self):
        target = cubic_phase_target(0.1, 4.0, FockSpace(SP.cutoff, 1))
        x = X0.replace(fixed_mask=(False, True, False, False, True, False, False))
        bundle = projected_state_gradient(x, target, SP)
        assert bundle.grad[1] == 0.0 and bundle.grad[4] == 0.0
        free = projected_state_gradient(X0, target, SP)
        np.testing.assert_allclose(bundle.grad[[0, 2, 3, 5, 6]], free.grad[[0, 2, 3, 5, 6]])

    def test_loss_and_grad_wrapper(self):
        spec = TargetSpec(0.1, 4.0)
        x = X0.replace(fixed_mask=(True,) + (False,) * 6)
        bundle = loss_and_grad(x, spec, SP)
        assert bundle.grad[0] == 0.0
        assert 0.0 <= bundle.loss <= 1.0
        assert bundle.fidelity == pytest.approx(1.0 - bundle.loss, abs=1e-12)

    def test_degenerate_sentinel_path(self):
        spec = TargetSpec(0.1, 4.0)
        x = ParamVector(0.0, np.pi / 2, 0, 0, 0, 0, 0)
        bundle = loss_and_grad(x, spec, SP)
        assert bundle.degenerate
        assert bundle.loss == 1.0
        assert np.all(bundle.grad == 0.0)

    @settings(max_examples=15, deadline=None)
    @given(
        alpha=st.floats(-0.7, 0.7),
        phi_bs=st.floats(0.1, np.pi / 2 - 0.1),
        theta=st.floats(0.1, 6.0),
        xi_abs=st.floats(0.05, 0.4),
        phi_xi=st.floats(0.1, 6.0),
        beta_abs=st.floats(0.05, 0.5),
        phi_beta=st.floats(0.1, 6.0),
    )
    def test_gradient_fd_parity_random_points(self, alpha, phi_bs, theta, xi_abs, phi_xi, beta_abs, phi_beta):
        x = ParamVector(alpha, phi_bs, theta, xi_abs, phi_xi, beta_abs, phi_beta)
        target = cubic_phase_target(0.1, 4.0, FockSpace(SP.cutoff, 1))
        bundle = projected_state_gradient(x, target, SP)
        scale = max(np.abs(bundle.grad).max(), 1e-3)
        for i in (0, 3, 6):
            fd = self._fd_loss(x, target, i)
            assert abs(bundle.grad[i] - fd) / max(abs(fd), scale * 1e-3) < 1e-4


def test_gradient_of_rotation_is_diagonal():
    g = operator_gradient("theta", X0, SP).entries
    assert np.count_nonzero(g - np.diag(g.diagonal())) == 0
