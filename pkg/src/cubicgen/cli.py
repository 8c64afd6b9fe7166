"""Command-line front end.

Subcommands: optimize, sweep, robustness, wigner, gradcheck.  All artifacts
embed the fully resolved configuration (as a leading ``# config`` comment in
CSV files, as a ``config`` field in JSON files) so runs are reproducible;
numeric CSV content is formatted with 10 significant digits and is
byte-identical across runs with the same config and seed.

Exit codes: 0 success, 2 configuration error, 3 convergence gaps, 4 numeric
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .circuit import PARAM_NAMES, ParamVector, workspace_for
from .exceptions import ConfigurationError, CubicgenError, NumericError
from .fock import FockSpace, cubic_phase_target, wigner
from .optimize import (
    DEFAULT_BOUNDS,
    OptConfig,
    OptResult,
    TargetSpec,
    continuation,
    minimize,
    perturbation_study,
    random_restart,
    target_state,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GAPS = 3
EXIT_NUMERIC = 4

FMT = "%.10g"

DEFAULT_CONFIG = {
    "schema_version": SCHEMA_VERSION,
    "cutoff": 30,
    "strict": False,
    "seed": 12345,
    "threads": 1,
    "transmission": {"mode": "fixed", "value": 0.5},
    "grid": {
        "r_min": 0.05,
        "r_max": 0.30,
        "r_step": 0.005,
        "xi_db_min": 3.0,
        "xi_db_max": 7.0,
        "xi_db_step": 0.25,
    },
    "anchor": {"r": 0.15, "xi_db": 5.0},
    "optimizer": {
        "max_iterations": 500,
        "gradient_tol": 1e-8,
        "loss_tol": 1e-12,
        "history_size": 10,
        "restarts": 30,
    },
    "robustness": {"epsilon": 0.02, "trials": 50},
}


def _fmt(v: float) -> str:
    return FMT % v


def _deep_update(base: dict, extra: dict) -> dict:
    out = dict(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _deep_update(out[k], v)
        else:
            out[k] = v
    return out


def load_config(args) -> dict:
    cfg = DEFAULT_CONFIG
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise ConfigurationError(f"config file not found: {path}")
        try:
            user = json.loads(path.read_text())
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"config {path}: invalid JSON at line {e.lineno}: {e.msg}") from e
        if not isinstance(user, dict):
            raise ConfigurationError(f"config {path}: top level must be an object")
        version = user.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigurationError(f"config {path}: unsupported schema_version {version}")
        cfg = _deep_update(cfg, user)
    for flag in ("seed", "cutoff", "threads"):
        v = getattr(args, flag, None)
        if v is not None:
            cfg[flag] = v
    if getattr(args, "strict", False):
        cfg["strict"] = True
    _validate_config(cfg)
    return cfg


def _validate_config(cfg: dict):
    g = cfg["grid"]
    for key in ("r_step", "xi_db_step"):
        if g[key] <= 0:
            raise ConfigurationError(f"grid.{key} must be > 0")
    if g["r_max"] < g["r_min"] or g["xi_db_max"] < g["xi_db_min"]:
        raise ConfigurationError("grid ranges must be non-empty")
    t = cfg["transmission"]
    if t["mode"] not in ("fixed", "free"):
        raise ConfigurationError(f"transmission.mode must be 'fixed' or 'free', got {t['mode']!r}")
    if t["mode"] == "fixed":
        if not 0.0 < float(t.get("value", 0.5)) <= 1.0:
            raise ConfigurationError("transmission.value must be in (0, 1]")
    if cfg["cutoff"] < 1:
        raise ConfigurationError("cutoff must be >= 1")


def _opt_config(cfg: dict, seed: int | None = None) -> OptConfig:
    o = cfg["optimizer"]
    return OptConfig(
        max_iterations=int(o["max_iterations"]),
        gradient_tol=float(o["gradient_tol"]),
        loss_tol=float(o["loss_tol"]),
        history_size=int(o["history_size"]),
        seed=int(cfg["seed"] if seed is None else seed),
    )


def _base_params(cfg: dict) -> ParamVector:
    """Base parameter vector implementing the transmission mode."""
    t = cfg["transmission"]
    if t["mode"] == "fixed":
        phi_bs = float(np.arccos(np.sqrt(float(t["value"]))))
        mask = (False, True, False, False, False, False, False)
        return ParamVector(0.0, phi_bs, 0.0, 0.0, 0.0, 0.0, 0.0, fixed_mask=mask)
    return ParamVector(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


def _params_json(x: ParamVector) -> dict:
    xc = x.canonicalized()
    return {
        "alpha": xc.alpha,
        "phi_bs": xc.phi_bs,
        "theta": xc.theta,
        "xi_abs": xc.xi_abs,
        "phi_xi": xc.phi_xi,
        "beta_abs": xc.beta_abs,
        "phi_beta": xc.phi_beta,
        "angles_in_pi": {
            "phi_bs": xc.phi_bs / np.pi,
            "theta": xc.theta / np.pi,
            "phi_xi": xc.phi_xi / np.pi,
            "phi_beta": xc.phi_beta / np.pi,
        },
    }


def _convergence_check(x: ParamVector, target: TargetSpec, cutoff: int) -> dict:
    """Re-evaluate the fidelity at cutoff+5; truncation error made observable."""
    fids = {}
    for c in (cutoff, cutoff + 5):
        space = FockSpace(c, 2)
        ws = workspace_for(c)
        tgt = target_state(target, space).amplitudes
        out, _ = ws.output(x.to_array())
        fids[c] = 0.0 if out is None else float(abs(np.vdot(out, tgt)) ** 2)
    delta = abs(fids[cutoff + 5] - fids[cutoff])
    return {
        "cutoff": cutoff,
        "cutoff_check": cutoff + 5,
        "fidelity": fids[cutoff],
        "fidelity_check": fids[cutoff + 5],
        "delta": delta,
        "passed": bool(delta < 1e-6),
    }


def _write_json(path: Path, payload: dict):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, cfg: dict, header: str, rows: list[str]):
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["# config " + json.dumps(cfg, sort_keys=True), header]
    lines.extend(rows)
    path.write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------- optimize

def cmd_optimize(args) -> int:
    cfg = load_config(args)
    out_dir = Path(args.out)
    target = TargetSpec(args.r, args.xi_db)
    space = FockSpace(cfg["cutoff"], 2)
    base = _base_params(cfg)
    n_restarts = int(args.restarts or cfg["optimizer"]["restarts"])
    best, allres = random_restart(
        target, n_restarts, _opt_config(cfg), space, base=base, workers=int(cfg["threads"])
    )
    check = _convergence_check(best.x_opt, target, cfg["cutoff"])
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "optimize",
        "config": cfg,
        "target": {"r": target.r, "xi_db": target.xi_db},
        "params": _params_json(best.x_opt),
        "fidelity": best.fidelity,
        "detection_probability": best.detection_probability,
        "born_probability": best.detection_probability**2,
        "converged": best.converged,
        "iterations": best.iterations,
        "seed": best.seed,
        "restarts": n_restarts,
        "convergence_check": check,
    }
    _write_json(out_dir / "result.json", payload)
    if not best.converged:
        print("optimize: best restart did not converge", file=sys.stderr)
        return EXIT_GAPS
    print(
        f"optimize: F={best.fidelity:.6f} N={best.detection_probability:.6f} "
        f"(r={target.r}, xi_db={target.xi_db})"
    )
    return EXIT_OK


# ---------------------------------------------------------------- sweep

def _grid_axis(lo: float, hi: float, step: float) -> np.ndarray:
    n = int(round((hi - lo) / step))
    return lo + step * np.arange(n + 1)

def _sweep_column(args_tuple):
    """Continuation along xi_db for one r value, seeded from the anchor row.

    The anchor-row point itself is already optimized by the row chain and is
    carried through unchanged; re-descending from its own optimum can only
    stall the line search without improving it.
    """
    r, xi_values, anchor_idx, row_res, cfg = args_tuple
    space = FockSpace(cfg["cutoff"], 2)
    config = _opt_config(cfg)
    x_seed = row_res.x_opt
    res_up = continuation(
        [TargetSpec(r, xi) for xi in xi_values[anchor_idx + 1:]], x_seed, config, space
    )
    res_dn = continuation(
        [TargetSpec(r, xi) for xi in xi_values[:anchor_idx][::-1]], x_seed, config, space
    )
    results = list(res_dn[::-1]) + [row_res] + list(res_up)
    return r, results


def cmd_sweep(args) -> int:
    cfg = load_config(args)
    out_dir = Path(args.out)
    g = cfg["grid"]
    r_values = _grid_axis(g["r_min"], g["r_max"], g["r_step"])
    xi_values = _grid_axis(g["xi_db_min"], g["xi_db_max"], g["xi_db_step"])
    anchor = cfg["anchor"]
    space = FockSpace(cfg["cutoff"], 2)
    base = _base_params(cfg)
    config = _opt_config(cfg)

    anchor_xi_idx = int(np.argmin(np.abs(xi_values - anchor["xi_db"])))
    anchor_r_idx = int(np.argmin(np.abs(r_values - anchor["r"])))
    anchor_target = TargetSpec(r_values[anchor_r_idx], xi_values[anchor_xi_idx])

    best, _ = random_restart(
        anchor_target, int(cfg["optimizer"]["restarts"]), config, space,
        base=base, workers=int(cfg["threads"]),
    )

    # anchor row: continuation left and right along r at the anchor xi_db
    row_up = continuation(
        [TargetSpec(r, anchor_target.xi_db) for r in r_values[anchor_r_idx:]],
        best.x_opt, config, space,
    )
    row_dn = continuation(
        [TargetSpec(r, anchor_target.xi_db) for r in r_values[:anchor_r_idx][::-1]],
        best.x_opt, config, space,
    )
    anchor_row = list(row_dn[::-1]) + list(row_up)

    # one vertical continuation chain per r, seeded from the anchor row
    tasks = [
        (r_values[i], xi_values, anchor_xi_idx, anchor_row[i], cfg)
        for i in range(len(r_values))
    ]
    workers = int(cfg["threads"])
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            columns = list(pool.map(_sweep_column, tasks))
    else:
        columns = [_sweep_column(t) for t in tasks]

    header = (
        "r,xi_dB,fidelity,detection_probability,alpha,phi_bs,theta,xi_abs,"
        "phi_xi,beta_abs,phi_beta,converged,iterations,seed"
    )
    rows = []
    gaps = []
    records: dict[tuple, OptResult] = {}
    for (r, col) in columns:
        for xi, res in zip(xi_values, col):
            records[(float(r), float(xi))] = res
    for r in r_values:
        for xi in xi_values:
            res = records[(float(r), float(xi))]
            xc = res.x_opt.canonicalized()
            if not res.converged:
                gaps.append({"r": float(r), "xi_db": float(xi)})
            rows.append(",".join(
                [_fmt(r), _fmt(xi), _fmt(res.fidelity), _fmt(res.detection_probability)]
                + [_fmt(v) for v in (xc.alpha, xc.phi_bs, xc.theta, xc.xi_abs,
                                     xc.phi_xi, xc.beta_abs, xc.phi_beta)]
                + [str(int(res.converged)), str(res.iterations), str(res.seed)]
            ))
    _write_csv(out_dir / "sweep.csv", cfg, header, rows)

    fids = [records[(float(r), float(xi))].fidelity for r in r_values for xi in xi_values]
    summary = {
        "schema_version": SCHEMA_VERSION,
        "command": "sweep",
        "config": cfg,
        "grid_size": [len(r_values), len(xi_values)],
        "fidelity_min": min(fids),
        "fidelity_max": max(fids),
        "anchor": {
            "r": anchor_target.r,
            "xi_db": anchor_target.xi_db,
            "fidelity": best.fidelity,
            "detection_probability": best.detection_probability,
            "params": _params_json(best.x_opt),
        },
        "gaps": gaps,
        "status": "complete" if not gaps else "complete-with-gaps",
    }
    _write_json(out_dir / "summary.json", summary)
    print(f"sweep: {len(rows)} grid points, {len(gaps)} gaps -> {out_dir / 'sweep.csv'}")
    return EXIT_OK if not gaps else EXIT_GAPS


# ---------------------------------------------------------------- robustness

def _read_sweep(path: Path) -> list[dict]:
    if not path.exists():
        raise ConfigurationError(f"missing sweep artifact: expected {path}")
    rows = []
    with path.open() as f:
        header = None
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                continue
            vals = line.split(",")
            rows.append(dict(zip(header, vals)))
    if header is None:
        raise ConfigurationError(f"sweep artifact {path} is empty")
    return rows


def cmd_robustness(args) -> int:
    cfg = load_config(args)
    out_dir = Path(args.out)
    sweep_path = Path(args.sweep) if args.sweep else out_dir / "sweep.csv"
    rows = _read_sweep(sweep_path)
    xi_row = float(args.xi_db)
    space = FockSpace(cfg["cutoff"], 2)
    eps = float(args.epsilon if args.epsilon is not None else cfg["robustness"]["epsilon"])
    trials = int(args.trials or cfg["robustness"]["trials"])

    selected = [r for r in rows if abs(float(r["xi_dB"]) - xi_row) < 1e-9]
    if not selected:
        raise ConfigurationError(f"no sweep rows at xi_dB={xi_row} in {sweep_path}")
    selected.sort(key=lambda r: float(r["r"]))

    out_rows = []
    for i, rec in enumerate(selected):
        x = ParamVector(
            float(rec["alpha"]), float(rec["phi_bs"]), float(rec["theta"]),
            float(rec["xi_abs"]), float(rec["phi_xi"]), float(rec["beta_abs"]),
            float(rec["phi_beta"]), fixed_mask=_base_params(cfg).fixed_mask,
        )
        target = TargetSpec(float(rec["r"]), xi_row)
        fids = perturbation_study(x, target, eps, trials, int(cfg["seed"]) + i, space)
        for t, f in enumerate(fids):
            out_rows.append(",".join([_fmt(float(rec["r"])), str(t), _fmt(f)]))
    _write_csv(out_dir / "robustness.csv", cfg, "r,trial,fidelity", out_rows)
    print(f"robustness: {len(selected)} r-values x {trials} trials -> {out_dir / 'robustness.csv'}")
    return EXIT_OK


# ---------------------------------------------------------------- wigner

def cmd_wigner(args) -> int:
    cfg = load_config(args)
    out_dir = Path(args.out)
    space1 = FockSpace(cfg["cutoff"], 1)
    if args.from_result:
        path = Path(args.from_result)
        if not path.exists():
            raise ConfigurationError(f"missing optimize artifact: expected {path}")
        payload = json.loads(path.read_text())
        p = payload["params"]
        x = ParamVector(p["alpha"], p["phi_bs"], p["theta"], p["xi_abs"],
                        p["phi_xi"], p["beta_abs"], p["phi_beta"])
        ws = workspace_for(cfg["cutoff"])
        amps, _ = ws.output(x.to_array())
        if amps is None:
            raise NumericError("stored parameters give a degenerate heralding event")
        from .fock import StateVector

        state = StateVector(space1, amps)
    elif args.vacuum:
        from .fock import fock_state

        state = fock_state(space1, 0)
    else:
        state = cubic_phase_target(args.r, args.xi_db, space1, strict=cfg["strict"])
    q_axis = np.linspace(args.qmin, args.qmax, args.points)
    p_axis = np.linspace(args.pmin, args.pmax, args.points)
    grid = wigner(state, q_axis, p_axis)
    rows = []
    for i, q in enumerate(grid.q_axis):
        for j, p in enumerate(grid.p_axis):
            rows.append(",".join([_fmt(q), _fmt(p), _fmt(grid.values[i, j])]))
    _write_csv(out_dir / "wigner.csv", cfg, "q,p,w", rows)
    print(f"wigner: {len(rows)} samples, integral={grid.integral():.4f} -> {out_dir / 'wigner.csv'}")
    return EXIT_OK


# ---------------------------------------------------------------- gradcheck

def cmd_gradcheck(args) -> int:
    cfg = load_config(args)
    cutoff = int(args.cutoff or 20)
    out_dir = Path(args.out)
    space = FockSpace(cutoff, 2)
    ws = workspace_for(cutoff)
    target = TargetSpec(args.r, args.xi_db)
    tgt = target_state(target, space).amplitudes
    rng = np.random.default_rng(int(cfg["seed"]))
    step = 1e-5

    max_rel = np.zeros(7)
    worst = [None] * 7
    for _ in range(int(args.points)):
        x = rng.uniform(DEFAULT_BOUNDS[:, 0], DEFAULT_BOUNDS[:, 1])
        bundle = ws.loss_and_grad(x, tgt)
        if bundle.degenerate:
            continue
        for i in range(7):
            xp, xm = x.copy(), x.copy()
            xp[i] += step
            xm[i] -= step
            lp = ws.loss_and_grad(xp, tgt).loss
            lm = ws.loss_and_grad(xm, tgt).loss
            fd = (lp - lm) / (2 * step)
            rel = abs(bundle.grad[i] - fd) / max(abs(fd), 1e-8)
            if rel > max_rel[i]:
                max_rel[i] = rel
                worst[i] = x.tolist()
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "gradcheck",
        "config": cfg,
        "cutoff": cutoff,
        "points": int(args.points),
        "step": step,
        "target": {"r": target.r, "xi_db": target.xi_db},
        "max_relative_error": dict(zip(PARAM_NAMES, max_rel.tolist())),
        "worst_points": dict(zip(PARAM_NAMES, worst)),
        "passed": bool(np.all(max_rel < 1e-5)),
    }
    _write_json(out_dir / "gradcheck.json", report)
    for name, v in zip(PARAM_NAMES, max_rel):
        print(f"gradcheck: {name:9s} max rel err {v:.3e}")
    if not report["passed"]:
        print("gradcheck: FAILED (relative error above 1e-5)", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


# ---------------------------------------------------------------- entry point

def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--seed", type=int, help="master RNG seed")
    p.add_argument("--cutoff", type=int, help="Fock cutoff per mode")
    p.add_argument("--strict", action="store_true", help="escalate truncation warnings to errors")
    p.add_argument("--threads", type=int, help="worker processes for independent runs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cubicgen",
        description="Cubic phase state generation via a post-selected two-mode interferometer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="optimize the circuit for one target state")
    _add_common(p)
    p.add_argument("--r", type=float, default=0.15, help="target cubicity")
    p.add_argument("--xi-db", type=float, default=5.0, help="target squeezing in dB")
    p.add_argument("--restarts", type=int, help="number of random restarts")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="continuation sweep over a target grid")
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("robustness", help="perturbation study along one squeezing row")
    _add_common(p)
    p.add_argument("--sweep", help="path to sweep.csv (default: <out>/sweep.csv)")
    p.add_argument("--xi-db", type=float, default=5.0, help="squeezing row to perturb")
    p.add_argument("--epsilon", type=float, help="relative error amplitude")
    p.add_argument("--trials", type=int, help="trials per grid point")
    p.set_defaults(func=cmd_robustness)

    p = sub.add_parser("wigner", help="export a Wigner function grid")
    _add_common(p)
    p.add_argument("--r", type=float, default=0.15, help="target cubicity")
    p.add_argument("--xi-db", type=float, default=5.0, help="target squeezing in dB")
    p.add_argument("--from-result", help="use the optimized circuit state from result.json")
    p.add_argument("--vacuum", action="store_true", help="use the vacuum state")
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--qmin", type=float, default=-5.0)
    p.add_argument("--qmax", type=float, default=5.0)
    p.add_argument("--pmin", type=float, default=-5.0)
    p.add_argument("--pmax", type=float, default=5.0)
    p.set_defaults(func=cmd_wigner)

    p = sub.add_parser("gradcheck", help="finite-difference validation of analytic gradients")
    _add_common(p)
    p.add_argument("--points", type=int, default=20, help="random parameter points")
    p.add_argument("--r", type=float, default=0.15)
    p.add_argument("--xi-db", type=float, default=5.0)
    p.set_defaults(func=cmd_gradcheck)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericError, CubicgenError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
