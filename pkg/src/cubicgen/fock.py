"""Truncated Fock-space linear algebra.

Conventions used throughout:

* single-mode basis |0>, |1>, ..., |cutoff>; dimension d = cutoff + 1
* two-mode basis index = n1 * d + n2 (mode 1 major)
* quadratures q = (a + a^dag)/2, p = (a - a^dag)/(2i), so the vacuum has
  variance 1/4 in both and the vacuum Wigner function is (2/pi) exp(-2(q^2+p^2))
* single-mode squeezer S1(xi) = exp((xi* a^2 - xi a^dag^2)/2)
* squeezing in dB converts to the squeezer argument via
  xi = -ln(10^(dB/20)) (negative for positive dB, used as-is)
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm as _scipy_expm
from scipy.special import eval_genlaguerre, gammaln

from .exceptions import ConfigurationError, CutoffError, NumericError

__all__ = [
    "FockSpace",
    "StateVector",
    "OperatorMatrix",
    "WignerGrid",
    "annihilator",
    "creator",
    "number_operator",
    "position_operator",
    "matrix_exp",
    "fock_state",
    "squeezed_vacuum",
    "xi_from_db",
    "cubic_phase_target",
    "tail_mass",
    "wigner",
]

TAIL_WARN = 1e-6


@dataclass(frozen=True)
class FockSpace:
    """Truncated Fock space with `cutoff` photons per mode and 1 or 2 modes."""

    cutoff: int
    modes: int = 1

    def __post_init__(self):
        if self.cutoff < 1:
            raise ConfigurationError(f"cutoff must be >= 1, got {self.cutoff}")
        if self.modes not in (1, 2):
            raise ConfigurationError(f"modes must be 1 or 2, got {self.modes}")

    @property
    def dim_per_mode(self) -> int:
        return self.cutoff + 1

    @property
    def dim(self) -> int:
        return self.dim_per_mode**self.modes

    def index(self, n1: int, n2: int | None = None) -> int:
        """Flat basis index of |n1> or |n1, n2> (mode-1 major)."""
        if not 0 <= n1 <= self.cutoff:
            raise ConfigurationError(f"occupation {n1} exceeds cutoff {self.cutoff}")
        if self.modes == 1:
            if n2 is not None:
                raise ConfigurationError("n2 given for a single-mode space")
            return n1
        if n2 is None:
            raise ConfigurationError("two-mode space requires n2")
        if not 0 <= n2 <= self.cutoff:
            raise ConfigurationError(f"occupation {n2} exceeds cutoff {self.cutoff}")
        return n1 * self.dim_per_mode + n2


def _check_same_space(a: FockSpace, b: FockSpace):
    if a != b:
        raise ConfigurationError(f"Fock space mismatch: {a} vs {b}")


@dataclass(frozen=True)
class StateVector:
    """Complex amplitudes over a truncated Fock basis."""

    space: FockSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.space.dim,):
            raise ConfigurationError(
                f"amplitude vector has shape {amps.shape}, expected ({self.space.dim},)"
            )
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        n = self.norm
        if n == 0.0:
            raise NumericError("cannot normalize the zero vector")
        return StateVector(self.space, self.amplitudes / n)

    def overlap(self, other: "StateVector") -> complex:
        """<self|other>."""
        _check_same_space(self.space, other.space)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "StateVector") -> float:
        return abs(self.overlap(other)) ** 2


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense operator on a truncated Fock space."""

    space: FockSpace
    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise ConfigurationError(
                f"operator has shape {m.shape}, expected square of dim {self.space.dim}"
            )
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.entries.conj().T)

    def apply(self, state: StateVector) -> StateVector:
        _check_same_space(self.space, state.space)
        return StateVector(self.space, self.entries @ state.amplitudes)

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            _check_same_space(self.space, other.space)
            return OperatorMatrix(self.space, self.entries @ other.entries)
        if isinstance(other, StateVector):
            return self.apply(other)
        return NotImplemented


def _ladder(d: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, d, dtype=float)), 1).astype(complex)


def _embed(single: np.ndarray, mode: int, space: FockSpace) -> np.ndarray:
    """Tensor a single-mode matrix into `space` at the given mode."""
    if space.modes == 1:
        return single
    eye = np.eye(space.dim_per_mode, dtype=complex)
    if mode == 1:
        return np.kron(single, eye)
    return np.kron(eye, single)


def annihilator(space: FockSpace, mode: int = 1) -> OperatorMatrix:
    """Annihilation operator of the given mode, <n-1|a|n> = sqrt(n)."""
    if mode not in (1, 2) or mode > space.modes:
        raise ConfigurationError(f"mode {mode} not available in a {space.modes}-mode space")
    return OperatorMatrix(space, _embed(_ladder(space.dim_per_mode), mode, space))


def creator(space: FockSpace, mode: int = 1) -> OperatorMatrix:
    return annihilator(space, mode).dag()


def number_operator(space: FockSpace, mode: int = 1) -> OperatorMatrix:
    if mode not in (1, 2) or mode > space.modes:
        raise ConfigurationError(f"mode {mode} not available in a {space.modes}-mode space")
    nd = np.diag(np.arange(space.dim_per_mode, dtype=float)).astype(complex)
    return OperatorMatrix(space, _embed(nd, mode, space))


def position_operator(space: FockSpace) -> OperatorMatrix:
    """q = (a + a^dag)/2 on a single-mode space."""
    if space.modes != 1:
        raise ConfigurationError("position operator is defined on a single-mode space")
    a = _ladder(space.dim_per_mode)
    return OperatorMatrix(space, (a + a.conj().T) / 2)


def matrix_exp(m: OperatorMatrix) -> OperatorMatrix:
    """Matrix exponential (scaling-and-squaring with Pade kernel)."""
    if not np.all(np.isfinite(m.entries)):
        raise NumericError("matrix exponential of a non-finite matrix")
    return OperatorMatrix(m.space, _scipy_expm(m.entries))


def fock_state(space: FockSpace, n1: int, n2: int | None = None) -> StateVector:
    """Basis state |n1> or |n1, n2>."""
    amps = np.zeros(space.dim, dtype=complex)
    amps[space.index(n1, n2)] = 1.0
    return StateVector(space, amps)


def xi_from_db(xi_db: float) -> float:
    """Squeezer argument for a squeezing degree given in dB."""
    return -np.log(10 ** (xi_db / 20))


def squeezed_vacuum(space: FockSpace, xi: complex) -> StateVector:
    """S1(xi)|0> with S1(xi) = exp((xi* a^2 - xi a^dag^2)/2), renormalized."""
    if space.modes != 1:
        raise ConfigurationError("squeezed vacuum is a single-mode state")
    # the generator is exponentiated in a space twice as deep as requested so
    # that truncation edge effects stay below 1e-10 in the reported amplitudes
    d = space.dim_per_mode
    a = _ladder(2 * d)
    gen = 0.5 * (np.conj(xi) * a @ a - xi * a.conj().T @ a.conj().T)
    vec = _scipy_expm(gen)[:d, 0]
    return StateVector(space, vec / np.linalg.norm(vec))


def tail_mass(state: StateVector, fraction: float = 0.1) -> float:
    """Probability mass in the top `fraction` of single-mode Fock levels."""
    if state.space.modes != 1:
        raise ConfigurationError("tail mass is defined for single-mode states")
    d = state.space.dim
    k = max(1, int(np.ceil(fraction * d)))
    p = np.abs(state.amplitudes) ** 2
    return float(np.sum(p[d - k:]))


def cubic_phase_target(r: float, xi_db: float, space: FockSpace, strict: bool = False) -> StateVector:
    """Cubic phase state exp(i r q^3) S1(xi)|0> with xi = -ln(10^(xi_db/20)).

    The state is built from truncated generators and renormalized.  The
    probability mass in the top 10% of Fock levels is checked; a mass above
    1e-6 produces a warning, or a CutoffError in strict mode.
    """
    if space.modes != 1:
        raise ConfigurationError("the cubic phase target is a single-mode state")
    sq = squeezed_vacuum(space, xi_from_db(xi_db))
    q = position_operator(space).entries
    q3 = q @ q @ q
    vec = _scipy_expm(1j * r * q3) @ sq.amplitudes
    state = StateVector(space, vec / np.linalg.norm(vec))
    tm = tail_mass(state)
    if tm >= TAIL_WARN:
        msg = f"cubic phase target tail mass {tm:.3e} at cutoff {space.cutoff}; increase the cutoff"
        if strict:
            raise CutoffError(msg)
        warnings.warn(msg, stacklevel=2)
    return state


@dataclass(frozen=True)
class WignerGrid:
    """Wigner function samples W(q, p) on a rectangular grid."""

    q_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray = field(repr=False)

    def integral(self) -> float:
        """Trapezoidal integral of W over the grid."""
        return float(np.trapezoid(np.trapezoid(self.values, self.p_axis, axis=1), self.q_axis))


def wigner(state: StateVector, q_axis: np.ndarray, p_axis: np.ndarray) -> WignerGrid:
    """Wigner function via the displaced-parity formula.

    W(q, p) = (2/pi) sum_n (-1)^n |<n|D(-(q+ip))|psi>|^2, where the
    displacement matrix elements are evaluated with the closed-form
    associated-Laguerre expression.  In this convention the vacuum gives
    W(q, p) = (2/pi) exp(-2(q^2 + p^2)).
    """
    if state.space.modes != 1:
        raise ConfigurationError("Wigner evaluation takes a single-mode state")
    q_axis = np.asarray(q_axis, dtype=float)
    p_axis = np.asarray(p_axis, dtype=float)
    if q_axis.size == 0 or p_axis.size == 0:
        raise ConfigurationError("empty Wigner grid axes")

    d = state.space.dim
    c = state.amplitudes
    qg, pg = np.meshgrid(q_axis, p_axis, indexing="ij")
    gamma = -(qg + 1j * pg)  # displacement argument moving psi to the origin
    x = np.abs(gamma) ** 2
    env = np.exp(-x / 2)

    # The parity sum must run well past the largest |gamma|^2 on the grid,
    # not just to the state's cutoff: each Fock term carries alternating
    # integral weight, so a sum stopped before the displaced Poissonian tail
    # has died off corrupts W far from the origin.
    x_max = float(x.max())
    n_max = max(d, int(np.ceil(x_max + 12.0 * np.sqrt(x_max) + 25.0)))

    lg = gammaln(np.arange(n_max + 1) + 1.0)  # lg[k] = ln(k!)
    parity = np.empty(n_max)
    parity[::2] = 1.0
    parity[1::2] = -1.0

    # powers of gamma by iterated multiplication; gamma**k through cpow is
    # NaN at the origin (k * log 0)
    gpows = [np.ones_like(gamma)]
    for _ in range(n_max):
        gpows.append(gpows[-1] * gamma)

    w = np.zeros_like(qg)
    for n in range(n_max):
        phi_n = np.zeros_like(gamma)
        for m in range(d):
            if c[m] == 0:
                continue
            if n >= m:
                k = n - m
                pref = np.exp(0.5 * (lg[m] - lg[n]))
                el = pref * gpows[k] * env * eval_genlaguerre(m, k, x)
            else:
                k = m - n
                pref = np.exp(0.5 * (lg[n] - lg[m]))
                el = pref * (-1.0) ** k * np.conj(gpows[k]) * env * eval_genlaguerre(n, k, x)
            phi_n += el * c[m]
        w += parity[n] * np.abs(phi_n) ** 2
    return WignerGrid(q_axis, p_axis, (2 / np.pi) * w)
