"""Two-mode interferometer circuit, heralding projection, and analytic gradients.

The circuit acts on |2, 0> with the ordered product

    U(x) = D2(beta) S(xi) R2(theta) B(phi_bs) D2(alpha)

(rightmost factor first; the coherent seed |alpha> in mode 2 is produced by
the initial displacement).  The output is conditioned on detecting exactly
two photons in mode 1, leaving a single-mode state in mode 2.

Operator definitions:

    B(phi)  = exp(i phi (a1^dag a2 + a1 a2^dag))       transmission T = cos^2(phi)
    R_n(t)  = exp(i t a_n^dag a_n)
    S(xi)   = exp(xi* a1 a2 - xi a1^dag a2^dag),  xi = |xi| e^{i phi_xi}
    D_n(b)  = exp(b a_n^dag - b* a_n),            b  = |b| e^{i phi_b}

Analytic derivative matrices (all verified against central finite
differences; see tests):

    dR/dt        = i n R
    dB/dphi      = i (a1^dag a2 + a1 a2^dag) B
    dS/d|xi|     = (e^{-i phi_xi} a1 a2 - e^{i phi_xi} a1^dag a2^dag) S
    dS/dphi_xi   = (i/2) [n1 + n2, S]
    dD/d|b|      = (e^{i phi_b} a^dag - e^{-i phi_b} a) D
    dD/dphi_b    = i [n, D]
    dD/dalpha    = (a^dag - a) D           (alpha real)

The phase derivatives follow from the amplitude/phase separation identities

    S(xi)  = P(phi_xi/2) S(|xi|) P(phi_xi/2)^dag,   P(t) = exp(i t (n1 + n2))
    D(b)   = R(phi_b) D(|b|) R(phi_b)^dag
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh
from scipy.linalg import expm as _scipy_expm

from .exceptions import ConfigurationError, CutoffError, DegenerateProjectionError, NumericError
from .fock import FockSpace, OperatorMatrix, StateVector, annihilator, number_operator

__all__ = [
    "PARAM_NAMES",
    "HERALD_N",
    "ParamVector",
    "ProjectedOutput",
    "GradientBundle",
    "build_displacement",
    "build_beamsplitter",
    "build_rotation",
    "build_two_mode_squeezer",
    "build_unitary",
    "build_unitary_gradient",
    "circuit_factors",
    "project_and_normalize",
    "operator_gradient",
    "projected_state_gradient",
    "output_state",
    "CircuitWorkspace",
    "workspace_for",
]

PARAM_NAMES = ("alpha", "phi_bs", "theta", "xi_abs", "phi_xi", "beta_abs", "phi_beta")

#: heralding pattern: exactly this many photons detected in mode 1
HERALD_N = 2

#: heralding probabilities below this are treated as degenerate; the level is
#: far below any physical optimum yet above the squared rounding residue left
#: when the projected slice is analytically zero
DEGENERATE_PROB = 1e-24


@dataclass(frozen=True)
class ParamVector:
    """The 7 real interferometer parameters with a fixed-parameter mask.

    Angles are stored unwrapped; `canonicalized()` maps them into [0, 2pi)
    for reporting.  Parameters flagged in `fixed_mask` are excluded from
    optimization and their gradient entries are forced to zero.
    """

    alpha: float
    phi_bs: float
    theta: float
    xi_abs: float
    phi_xi: float
    beta_abs: float
    phi_beta: float
    fixed_mask: tuple = (False,) * 7

    def __post_init__(self):
        if self.xi_abs < 0 or self.beta_abs < 0:
            raise ConfigurationError("xi_abs and beta_abs must be non-negative")
        if len(self.fixed_mask) != 7:
            raise ConfigurationError("fixed_mask must have 7 entries")
        object.__setattr__(self, "fixed_mask", tuple(bool(b) for b in self.fixed_mask))

    def to_array(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in PARAM_NAMES], dtype=float)

    @classmethod
    def from_array(cls, values, fixed_mask=(False,) * 7) -> "ParamVector":
        values = np.asarray(values, dtype=float)
        if values.shape != (7,):
            raise ConfigurationError(f"expected 7 parameters, got shape {values.shape}")
        return cls(*values, fixed_mask=tuple(fixed_mask))

    def replace(self, **kwargs) -> "ParamVector":
        d = {n: getattr(self, n) for n in PARAM_NAMES}
        d["fixed_mask"] = self.fixed_mask
        d.update(kwargs)
        return ParamVector(**d)

    def canonicalized(self) -> "ParamVector":
        """Reporting form: alpha >= 0 and angles in [0, 2pi).

        A negative coherent seed is physically equivalent to a positive one
        with theta and phi_xi shifted by pi (both modes flipped in sign); the
        projected output, fidelity, and detection probability are unchanged.
        """
        two_pi = 2 * np.pi
        alpha, theta, phi_xi = self.alpha, self.theta, self.phi_xi
        if alpha < 0:
            alpha, theta, phi_xi = -alpha, theta + np.pi, phi_xi + np.pi
        return self.replace(
            alpha=alpha,
            phi_bs=self.phi_bs % two_pi,
            theta=theta % two_pi,
            phi_xi=phi_xi % two_pi,
            phi_beta=self.phi_beta % two_pi,
        )


@dataclass(frozen=True)
class ProjectedOutput:
    """Heralded single-mode output state and its norm coefficient.

    `norm_coefficient` is N = ||Pi U psi0|| = sqrt(<Psi|Pi|Psi>).  The
    detection probability reported throughout this package is N itself (the
    convention used for all tabulated reference values); the Born-rule
    probability of the heralding click is N^2, available as
    `born_probability`.
    """

    state: StateVector
    norm_coefficient: float

    @property
    def detection_probability(self) -> float:
        return self.norm_coefficient

    @property
    def born_probability(self) -> float:
        return self.norm_coefficient**2


@dataclass(frozen=True)
class GradientBundle:
    """Loss, its gradient and diagnostics at one parameter point."""

    loss: float
    grad: np.ndarray = field(repr=False)
    fidelity: float
    detection_probability: float
    degenerate: bool = False


def _require_two_mode(space: FockSpace):
    if space.modes != 2:
        raise ConfigurationError("a two-mode Fock space is required")


def build_displacement(beta_abs: float, phi_beta: float, mode: int, space: FockSpace) -> OperatorMatrix:
    """D_mode(beta) with beta = beta_abs * exp(i phi_beta)."""
    beta = beta_abs * np.exp(1j * phi_beta)
    a = annihilator(space, mode).entries
    return OperatorMatrix(space, _scipy_expm(beta * a.conj().T - np.conj(beta) * a))


def build_beamsplitter(phi_bs: float, space: FockSpace) -> OperatorMatrix:
    _require_two_mode(space)
    a1 = annihilator(space, 1).entries
    a2 = annihilator(space, 2).entries
    j = a1.conj().T @ a2 + a1 @ a2.conj().T
    return OperatorMatrix(space, _scipy_expm(1j * phi_bs * j))


def build_rotation(theta: float, mode: int, space: FockSpace) -> OperatorMatrix:
    """Phase shifter exp(i theta n) on the given mode (diagonal, exact)."""
    if mode not in (1, 2) or mode > space.modes:
        raise ConfigurationError(f"mode {mode} not available in a {space.modes}-mode space")
    n = number_operator(space, mode).entries.diagonal().real
    return OperatorMatrix(space, np.diag(np.exp(1j * theta * n)))


def build_two_mode_squeezer(
    xi_abs: float, phi_xi: float, space: FockSpace, strict: bool = False
) -> OperatorMatrix:
    _require_two_mode(space)
    xi = xi_abs * np.exp(1j * phi_xi)
    a1 = annihilator(space, 1).entries
    a2 = annihilator(space, 2).entries
    s = _scipy_expm(np.conj(xi) * a1 @ a2 - xi * a1.conj().T @ a2.conj().T)
    if strict:
        # tail mass of S|0,0> in the top 10% of either mode's levels
        d = space.dim_per_mode
        pop = np.abs(s[:, 0].reshape(d, d)) ** 2
        k = max(1, int(np.ceil(0.1 * d)))
        tm = pop[d - k:, :].sum() + pop[: d - k, d - k:].sum()
        if tm > 1e-6:
            raise CutoffError(f"two-mode squeezer tail mass {tm:.3e} at |xi|={xi_abs}")
    return OperatorMatrix(space, s)


def circuit_factors(x: ParamVector, space: FockSpace, strict: bool = False):
    """The five factor matrices (D_beta, S, R2, B, D_alpha), leftmost first."""
    _require_two_mode(space)
    return (
        build_displacement(x.beta_abs, x.phi_beta, 2, space),
        build_two_mode_squeezer(x.xi_abs, x.phi_xi, space, strict=strict),
        build_rotation(x.theta, 2, space),
        build_beamsplitter(x.phi_bs, space),
        build_displacement(abs(x.alpha), np.pi if x.alpha < 0 else 0.0, 2, space),
    )


def build_unitary(x: ParamVector, space: FockSpace) -> OperatorMatrix:
    """U(x) = D2(beta) S(xi) R2(theta) B(phi_bs) D2(alpha)."""
    db, s, r, b, da = circuit_factors(x, space)
    return OperatorMatrix(space, db.entries @ s.entries @ r.entries @ b.entries @ da.entries)


def operator_gradient(which: str, x: ParamVector, space: FockSpace) -> OperatorMatrix:
    """Analytic derivative of the circuit factor associated with `which`."""
    _require_two_mode(space)
    a1 = annihilator(space, 1).entries
    a2 = annihilator(space, 2).entries
    if which == "alpha":
        d = build_displacement(abs(x.alpha), np.pi if x.alpha < 0 else 0.0, 2, space).entries
        return OperatorMatrix(space, (a2.conj().T - a2) @ d)
    if which == "phi_bs":
        j = a1.conj().T @ a2 + a1 @ a2.conj().T
        return OperatorMatrix(space, 1j * j @ build_beamsplitter(x.phi_bs, space).entries)
    if which == "theta":
        n2 = number_operator(space, 2).entries
        return OperatorMatrix(space, 1j * n2 @ build_rotation(x.theta, 2, space).entries)
    if which == "xi_abs":
        g = np.exp(-1j * x.phi_xi) * a1 @ a2 - np.exp(1j * x.phi_xi) * a1.conj().T @ a2.conj().T
        return OperatorMatrix(space, g @ build_two_mode_squeezer(x.xi_abs, x.phi_xi, space).entries)
    if which == "phi_xi":
        ntot = number_operator(space, 1).entries + number_operator(space, 2).entries
        s = build_two_mode_squeezer(x.xi_abs, x.phi_xi, space).entries
        return OperatorMatrix(space, 0.5j * (ntot @ s - s @ ntot))
    if which == "beta_abs":
        d = build_displacement(x.beta_abs, x.phi_beta, 2, space).entries
        g = np.exp(1j * x.phi_beta) * a2.conj().T - np.exp(-1j * x.phi_beta) * a2
        return OperatorMatrix(space, g @ d)
    if which == "phi_beta":
        n2 = number_operator(space, 2).entries
        d = build_displacement(x.beta_abs, x.phi_beta, 2, space).entries
        return OperatorMatrix(space, 1j * (n2 @ d - d @ n2))
    raise ConfigurationError(f"unknown operator id {which!r}; expected one of {PARAM_NAMES}")


def build_unitary_gradient(which: str, x: ParamVector, space: FockSpace) -> OperatorMatrix:
    """dU/dx_i by the product rule: one factor replaced by its derivative."""
    db, s, r, b, da = (f.entries for f in circuit_factors(x, space))
    g = operator_gradient(which, x, space).entries
    slot = {"beta_abs": 0, "phi_beta": 0, "xi_abs": 1, "phi_xi": 1, "theta": 2, "phi_bs": 3, "alpha": 4}[which]
    factors = [db, s, r, b, da]
    factors[slot] = g
    out = factors[0]
    for f in factors[1:]:
        out = out @ f
    return OperatorMatrix(space, out)


def project_and_normalize(psi: StateVector, space: FockSpace) -> ProjectedOutput:
    """Condition on detecting HERALD_N photons in mode 1.

    Extracts phi_m = <HERALD_N, m|psi> and returns the normalized mode-2
    state along with N = ||phi||.
    """
    _require_two_mode(space)
    if psi.space != space:
        raise ConfigurationError("state does not live in the given space")
    d = space.dim_per_mode
    sl = psi.amplitudes.reshape(d, d)[HERALD_N, :]
    n_sq = float(np.vdot(sl, sl).real)
    if n_sq < DEGENERATE_PROB:
        raise DegenerateProjectionError(
            f"projection onto {HERALD_N} photons in mode 1 has probability {n_sq:.3e}"
        )
    n = np.sqrt(n_sq)
    single = FockSpace(space.cutoff, 1)
    return ProjectedOutput(StateVector(single, sl / n), n)


class CircuitWorkspace:
    """Precomputed spectral data for fast circuit evaluation at one cutoff.

    The beamsplitter and squeezer generators are diagonalized once; every
    subsequent forward or gradient evaluation costs only matrix-vector
    products.  Instances are immutable after construction and safe to share
    across threads; use one instance per process when multiprocessing.
    """

    def __init__(self, cutoff: int):
        self.space = FockSpace(cutoff, 2)
        d = cutoff + 1
        self.d = d
        self.a = np.diag(np.sqrt(np.arange(1, d, dtype=float)), 1).astype(complex)
        self.ad = self.a.conj().T
        self.nvec = np.arange(d, dtype=float)

        a1 = np.kron(self.a, np.eye(d, dtype=complex))
        a2 = np.kron(np.eye(d, dtype=complex), self.a)
        self.j_mat = a1.conj().T @ a2 + a1 @ a2.conj().T
        self.km = a1 @ a2                      # a1 a2
        self.kp = self.km.conj().T             # a1^dag a2^dag
        self.wj, self.vj = eigh(self.j_mat)
        self.ws, self.vs = eigh(-1j * (self.km - self.kp))

        n1g, n2g = np.meshgrid(self.nvec, self.nvec, indexing="ij")
        self.ntot = (n1g + n2g).ravel()
        self.n2flat = n2g.ravel()

        v0 = np.zeros(d * d, dtype=complex)
        v0[HERALD_N * d] = 1.0                 # |HERALD_N, 0>
        self.v0 = v0

    # -- factor applications (vectors of length d*d) --

    def _apply_bs(self, phi, v):
        return self.vj @ (np.exp(1j * phi * self.wj) * (self.vj.conj().T @ v))

    def _apply_sq(self, xi_abs, phi_xi, v):
        ph = np.exp(0.5j * phi_xi * self.ntot)
        u = np.conj(ph) * v
        u = self.vs @ (np.exp(1j * xi_abs * self.ws) * (self.vs.conj().T @ u))
        return ph * u

    def _mode2(self, m, v):
        return (v.reshape(self.d, self.d) @ m.T).ravel()

    def _disp_small(self, beta):
        return _scipy_expm(beta * self.ad - np.conj(beta) * self.a)

    def _chain(self, x: np.ndarray):
        """Intermediate states (v1..v4, Psi) and the small mode-2 matrices."""
        alpha, phi_bs, theta, xi_abs, phi_xi, beta_abs, phi_beta = x
        da = self._disp_small(alpha)
        db = self._disp_small(beta_abs * np.exp(1j * phi_beta))
        rot = np.exp(1j * theta * self.nvec)
        v1 = self._mode2(da, self.v0)
        v2 = self._apply_bs(phi_bs, v1)
        v3 = (v2.reshape(self.d, self.d) * rot[None, :]).ravel()
        v4 = self._apply_sq(xi_abs, phi_xi, v3)
        psi = self._mode2(db, v4)
        return v1, v2, v3, v4, psi, da, db, rot

    def output(self, x: np.ndarray):
        """Projected output amplitudes and norm coefficient N.

        Returns (None, 0.0) when the heralding probability underflows.
        """
        *_, psi, _, _, _ = self._chain(np.asarray(x, dtype=float))
        sl = psi.reshape(self.d, self.d)[HERALD_N, :]
        n_sq = float(np.vdot(sl, sl).real)
        if n_sq < DEGENERATE_PROB:
            return None, 0.0
        n = np.sqrt(n_sq)
        return sl / n, n

    def loss_and_grad(self, x: np.ndarray, target: np.ndarray):
        """Infidelity 1 - |<psi(x)|target>|^2 and its 7-component gradient.

        Degenerate heralding returns the documented sentinel
        (loss 1, zero gradient, degenerate=True) so line searches can back off.
        """
        x = np.asarray(x, dtype=float)
        alpha, phi_bs, theta, xi_abs, phi_xi, beta_abs, phi_beta = x
        d = self.d
        v1, v2, v3, v4, psi, da, db, rot = self._chain(x)

        sl = psi.reshape(d, d)[HERALD_N, :]
        n_sq = float(np.vdot(sl, sl).real)
        if n_sq < DEGENERATE_PROB:
            return GradientBundle(1.0, np.zeros(7), 0.0, 0.0, degenerate=True)
        n = np.sqrt(n_sq)
        out = sl / n

        # derivative of Psi with respect to each parameter
        gen_a = self.ad - self.a
        dpsis = []
        # alpha: replace D(alpha) by (a^dag - a) D(alpha)
        w = self._mode2(gen_a, v1)
        w = self._apply_bs(phi_bs, w)
        w = (w.reshape(d, d) * rot[None, :]).ravel()
        w = self._apply_sq(xi_abs, phi_xi, w)
        dpsis.append(self._mode2(db, w))
        # phi_bs: i J B applied after D(alpha)
        w = 1j * (self.j_mat @ v2)
        w = (w.reshape(d, d) * rot[None, :]).ravel()
        w = self._apply_sq(xi_abs, phi_xi, w)
        dpsis.append(self._mode2(db, w))
        # theta: i n2 R
        w = 1j * self.n2flat * v3
        w = self._apply_sq(xi_abs, phi_xi, w)
        dpsis.append(self._mode2(db, w))
        # xi_abs: (e^{-i phi} a1 a2 - e^{i phi} a1^dag a2^dag) S
        w = np.exp(-1j * phi_xi) * (self.km @ v4) - np.exp(1j * phi_xi) * (self.kp @ v4)
        dpsis.append(self._mode2(db, w))
        # phi_xi: (i/2)(Ntot S - S Ntot)
        w = 0.5j * (self.ntot * v4 - self._apply_sq(xi_abs, phi_xi, self.ntot * v3))
        dpsis.append(self._mode2(db, w))
        # beta_abs: (e^{i phi} a^dag - e^{-i phi} a) D(beta)
        g = np.exp(1j * phi_beta) * self.ad - np.exp(-1j * phi_beta) * self.a
        dpsis.append(self._mode2(g, psi))
        # phi_beta: i (n2 D - D n2)
        dpsis.append(1j * (self.n2flat * psi - self._mode2(db, self.n2flat * v4)))

        ov = complex(np.vdot(out, target))  # <psi(x)|target>
        fid = abs(ov) ** 2
        grad = np.empty(7)
        for i, dpsi in enumerate(dpsis):
            dsl = dpsi.reshape(d, d)[HERALD_N, :]
            a_i = 2.0 * np.vdot(sl, dsl).real
            dout = dsl / n - (a_i / (2.0 * n_sq * n)) * sl
            grad[i] = -2.0 * (ov * np.vdot(target, dout)).real
        if not (np.isfinite(grad).all() and np.isfinite(fid)):
            raise NumericError(f"non-finite gradient at x={x.tolist()}")
        return GradientBundle(1.0 - fid, grad, fid, n)


@lru_cache(maxsize=8)
def workspace_for(cutoff: int) -> CircuitWorkspace:
    """Per-process workspace cache keyed by cutoff."""
    return CircuitWorkspace(cutoff)


def output_state(x: ParamVector, space: FockSpace) -> ProjectedOutput:
    """Heralded output state of the circuit at parameters x (fast path)."""
    _require_two_mode(space)
    ws = workspace_for(space.cutoff)
    amps, n = ws.output(x.to_array())
    if amps is None:
        raise DegenerateProjectionError("heralding probability underflowed")
    return ProjectedOutput(StateVector(FockSpace(space.cutoff, 1), amps), n)


def projected_state_gradient(x: ParamVector, target: StateVector, space: FockSpace) -> GradientBundle:
    """Loss 1 - |<psi(x)|psi_target>|^2 with its analytic gradient.

    Entries of the gradient under the fixed mask are forced to zero.
    Degenerate heralding raises; use the optimizer path for the sentinel
    behaviour.
    """
    _require_two_mode(space)
    if target.space != FockSpace(space.cutoff, 1):
        raise ConfigurationError("target must be single-mode at the same cutoff")
    ws = workspace_for(space.cutoff)
    bundle = ws.loss_and_grad(x.to_array(), target.amplitudes)
    if bundle.degenerate:
        raise DegenerateProjectionError("heralding probability underflowed")
    grad = bundle.grad.copy()
    grad[np.array(x.fixed_mask)] = 0.0
    return GradientBundle(bundle.loss, grad, bundle.fidelity, bundle.detection_probability)
