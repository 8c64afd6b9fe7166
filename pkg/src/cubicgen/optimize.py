"""Bounded quasi-Newton minimization of the infidelity with analytic gradients.

Global search follows two strategies: random restarts (uniform samples within
the box bounds) and numerical continuation (warm-starting each target from the
optimum of the neighbouring one).  A multiplicative perturbation study
measures the sensitivity of an optimum to parameter errors.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
import scipy.optimize

from .circuit import PARAM_NAMES, GradientBundle, ParamVector, workspace_for
from .exceptions import ConfigurationError, DegenerateProjectionError, NumericError
from .fock import FockSpace, StateVector, cubic_phase_target

__all__ = [
    "DEFAULT_BOUNDS",
    "DEFAULT_CUTOFF",
    "TargetSpec",
    "OptConfig",
    "OptResult",
    "target_state",
    "loss_and_grad",
    "minimize",
    "random_restart",
    "continuation",
    "perturbation_study",
]

DEFAULT_CUTOFF = 30

#: box bounds per parameter, chosen to cover all reference optima with margin
#: while keeping truncation error controlled
DEFAULT_BOUNDS = np.array(
    [
        (-2.0, 2.0),          # alpha
        (0.0, np.pi / 2),     # phi_bs
        (0.0, 2 * np.pi),     # theta
        (0.0, 1.5),           # xi_abs
        (0.0, 2 * np.pi),     # phi_xi
        (0.0, 3.0),           # beta_abs
        (0.0, 2 * np.pi),     # phi_beta
    ]
)


@dataclass(frozen=True)
class TargetSpec:
    """One cubic phase target: cubicity r and squeezing degree in dB."""

    r: float
    xi_db: float

    def __post_init__(self):
        if not (np.isfinite(self.r) and np.isfinite(self.xi_db)):
            raise ConfigurationError("target parameters must be finite")
        if self.r < 0 or self.xi_db < 0:
            raise ConfigurationError("target parameters must be non-negative")


@dataclass(frozen=True)
class OptConfig:
    """Optimizer settings; defaults are declared here, not in the source data."""

    bounds: np.ndarray = field(default_factory=lambda: DEFAULT_BOUNDS.copy())
    max_iterations: int = 500
    gradient_tol: float = 1e-8
    loss_tol: float = 1e-12
    history_size: int = 10
    seed: int = 0

    def __post_init__(self):
        b = np.asarray(self.bounds, dtype=float)
        if b.shape != (7, 2) or not np.all(np.isfinite(b)):
            raise ConfigurationError("bounds must be a finite (7, 2) array")
        object.__setattr__(self, "bounds", b)
        if self.gradient_tol <= 0 or self.loss_tol <= 0:
            raise ConfigurationError("tolerances must be positive")


@dataclass(frozen=True)
class OptResult:
    """One optimization run: optimum, quality metrics, convergence metadata."""

    x_opt: ParamVector
    fidelity: float
    detection_probability: float
    loss_history: np.ndarray = field(repr=False)
    converged: bool
    iterations: int
    seed: int


@lru_cache(maxsize=256)
def _target_cached(r: float, xi_db: float, cutoff: int) -> StateVector:
    return cubic_phase_target(r, xi_db, FockSpace(cutoff, 1))


def target_state(target: TargetSpec, space: FockSpace) -> StateVector:
    """Cubic phase target state at the cutoff of `space` (cached)."""
    return _target_cached(target.r, target.xi_db, space.cutoff)


def loss_and_grad(x: ParamVector, target: TargetSpec, space: FockSpace) -> GradientBundle:
    """Infidelity and masked analytic gradient.

    A degenerate heralding event returns the sentinel bundle
    (loss 1, zero gradient, degenerate=True) instead of raising, so that
    bounded line searches can back off from pathological regions.
    """
    ws = workspace_for(space.cutoff)
    tgt = target_state(target, space)
    bundle = ws.loss_and_grad(x.to_array(), tgt.amplitudes)
    if bundle.degenerate:
        return bundle
    grad = bundle.grad.copy()
    grad[np.array(x.fixed_mask)] = 0.0
    return replace(bundle, grad=grad)


def minimize(x0: ParamVector, target: TargetSpec, config: OptConfig, space: FockSpace,
             seed: int = 0, objective=None) -> OptResult:
    """L-BFGS-B descent over the free parameters from x0.

    Deterministic given (x0, config).  Fixed-mask parameters are carried
    through bit-identically.  Non-finite losses abort with a NumericError
    naming the last good point.

    `objective` is a test seam: a callable x7 -> GradientBundle replacing the
    circuit loss (used for self-tests and gradient-fallback comparisons).
    """
    if objective is None:
        ws = workspace_for(space.cutoff)
        tgt = target_state(target, space).amplitudes
        objective = lambda x: ws.loss_and_grad(x, tgt)
    mask = np.array(x0.fixed_mask)
    free = ~mask
    full = x0.to_array()
    z0 = full[free]
    lo, hi = config.bounds[free, 0], config.bounds[free, 1]
    if np.any(z0 < lo - 1e-12) or np.any(z0 > hi + 1e-12):
        raise ConfigurationError("x0 outside bounds")
    z0 = np.clip(z0, lo, hi)

    last_good = {"z": z0.copy(), "loss": None}
    cache: dict[bytes, float] = {}

    def fun(z):
        x = full.copy()
        x[free] = z
        b = objective(x)
        if not np.isfinite(b.loss):
            raise NumericError(f"non-finite loss; last good x={_merge(full, free, last_good['z']).tolist()}")
        last_good["z"], last_good["loss"] = z.copy(), b.loss
        cache[z.tobytes()] = b.loss
        if len(cache) > 8:
            cache.pop(next(iter(cache)))
        return b.loss, b.grad[free]

    history: list[float] = []

    def cb(zk):
        key = zk.tobytes()
        history.append(cache[key] if key in cache else fun(zk)[0])

    opts = {
        "maxiter": config.max_iterations,
        "maxcor": config.history_size,
        "ftol": config.loss_tol,
        "gtol": config.gradient_tol,
    }
    res = scipy.optimize.minimize(
        fun, z0, jac=True, method="L-BFGS-B",
        bounds=list(zip(lo, hi)), callback=cb, options=opts,
    )
    converged = bool(res.success)
    iterations = int(res.nit)
    if not converged and iterations < config.max_iterations:
        # A stalled line search reports failure even when no loss decrease of
        # at least loss_tol remains.  Restart once with fresh curvature
        # memory; if that cannot improve the loss by loss_tol either, the
        # loss-change termination criterion is met.
        res2 = scipy.optimize.minimize(
            fun, res.x, jac=True, method="L-BFGS-B",
            bounds=list(zip(lo, hi)), callback=cb, options=opts,
        )
        iterations += int(res2.nit)
        if res2.fun <= res.fun:
            gain = res.fun - res2.fun
            stalled_out = gain <= config.loss_tol * max(1.0, abs(res2.fun))
            converged = bool(res2.success) or stalled_out
            res = res2
    x_arr = full.copy()
    x_arr[free] = res.x
    x_opt = ParamVector.from_array(x_arr, fixed_mask=x0.fixed_mask)
    final = objective(x_arr)
    return OptResult(
        x_opt=x_opt,
        fidelity=final.fidelity,
        detection_probability=final.detection_probability,
        loss_history=np.asarray(history if history else [final.loss]),
        converged=converged,
        iterations=iterations,
        seed=seed,
    )


def _merge(full, free, z):
    x = full.copy()
    x[free] = z
    return x


def _restart_task(args):
    x0_arr, mask, target, config, cutoff, seed = args
    x0 = ParamVector.from_array(x0_arr, fixed_mask=mask)
    return minimize(x0, target, config, FockSpace(cutoff, 2), seed=seed)


def random_restart(
    target: TargetSpec,
    n_starts: int,
    config: OptConfig,
    space: FockSpace,
    base: ParamVector | None = None,
    workers: int = 1,
):
    """Best-of-n independent minimizations from uniform samples within bounds.

    `base` supplies the fixed-parameter values and mask.  Returns
    (best, all_results) with all_results ordered by start index; the whole
    procedure is deterministic under config.seed.
    """
    if n_starts < 1:
        raise ConfigurationError("n_starts must be >= 1")
    if base is None:
        base = ParamVector.from_array(np.zeros(7))
    rng = np.random.default_rng(config.seed)
    mask = np.array(base.fixed_mask)
    full = base.to_array()
    x0s = []
    for k in range(n_starts):
        x = full.copy()
        draw = rng.uniform(config.bounds[:, 0], config.bounds[:, 1])
        x[~mask] = draw[~mask]
        x0s.append(x)
    tasks = [(x0s[k], base.fixed_mask, target, config, space.cutoff, config.seed + k) for k in range(n_starts)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_restart_task, tasks, chunksize=max(1, n_starts // (4 * workers))))
    else:
        results = [_restart_task(t) for t in tasks]
    best = max(results, key=lambda r: r.fidelity)
    if best.fidelity == 0.0:
        details = ", ".join(f"start {i}: F={r.fidelity}" for i, r in enumerate(results))
        raise DegenerateProjectionError(f"all restarts degenerate ({details})")
    return best, results


def continuation(
    targets: list[TargetSpec],
    x_seed: ParamVector,
    config: OptConfig,
    space: FockSpace,
) -> list[OptResult]:
    """Warm-started sequential optimization along an ordered target list.

    Result i seeds result i+1.  A step that fails numerically is recorded as
    non-converged and the chain continues from the last converged point.
    """
    results: list[OptResult] = []
    x = x_seed
    for t in targets:
        try:
            res = minimize(x, t, config, space)
        except (NumericError, DegenerateProjectionError):
            res = OptResult(x, 0.0, 0.0, np.array([1.0]), False, 0, config.seed)
        results.append(res)
        if res.converged and res.fidelity > 0:
            x = res.x_opt
    return results


def perturbation_study(
    x_opt: ParamVector,
    target: TargetSpec,
    epsilon: float,
    trials: int,
    seed: int,
    space: FockSpace,
) -> np.ndarray:
    """Fidelity samples under multiplicative parameter errors.

    Each trial multiplies every free parameter by (1 + u), u uniform in
    [-epsilon, epsilon] independently per parameter, and evaluates the
    fidelity without re-optimizing.
    """
    if epsilon < 0:
        raise ConfigurationError("epsilon must be non-negative")
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    ws = workspace_for(space.cutoff)
    tgt = target_state(target, space).amplitudes
    rng = np.random.default_rng(seed)
    mask = np.array(x_opt.fixed_mask)
    base = x_opt.to_array()
    fids = np.empty(trials)
    for k in range(trials):
        u = rng.uniform(-epsilon, epsilon, size=7)
        x = base * np.where(mask, 1.0, 1.0 + u)
        out, n = ws.output(x)
        fids[k] = 0.0 if out is None else abs(np.vdot(out, tgt)) ** 2
    return fids
