"""
Run pipelines behind the command-line interface.

Each function takes a RunConfig, performs the computation and returns plain
data (trajectories, reports, JSON-ready summaries). Writing files is left to
the CLI.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from . import gspt
from .analysis import PatternClass, classify_pattern, smoothed_R1
from .config import RunConfig, set_path
from .gspt import Branch, StabilityReport
from .laws import LinearFeedback, Target
from .meanfield import RHO_CEIL, RHO_FLOOR, MeanFieldSystem, integrate_meanfield
from .network import initial_network_state, integrate_network
from .trajectory import Trajectory


def _finite(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def decisions(cfg: RunConfig) -> dict:
    """Numerical choices that shape the outputs, recorded in every summary."""
    th = cfg.thresholds
    return {
        "integrator": "rk4-fixed-step",
        "dt": cfg.dt,
        "record_stride": cfg.record_stride,
        "rho_floor": RHO_FLOOR,
        "rho_ceiling": RHO_CEIL,
        "tol_h": cfg.doc["manifold"]["tol_h"],
        "filter": {"kind": "savitzky-golay", "window": th.filter_window, "order": th.filter_order},
        "transient_fraction": th.transient_fraction,
        "psi_convention": "arg z1 - arg z2 (network) = phi2 - phi1 (mean field)",
    }


def meanfield_system(cfg: RunConfig) -> MeanFieldSystem:
    if cfg.doc["meanfield"]["system"] == "full":
        return MeanFieldSystem.FULL
    return MeanFieldSystem.INTER if cfg.law.target is Target.INTER else MeanFieldSystem.INTRA


def run_meanfield(cfg: RunConfig) -> Trajectory:
    return integrate_meanfield(meanfield_system(cfg), cfg.params, cfg.meanfield_init, cfg.law,
                               cfg.dt, cfg.t_final, cfg.record_stride)


def run_network(cfg: RunConfig) -> Trajectory:
    init = cfg.meanfield_init
    params = cfg.params
    state = initial_network_state(params, init.rho1, init.psi, init.adaptive_value,
                                  init.rho2, cfg.seed)
    return integrate_network(params, cfg.law, state, cfg.dt, cfg.t_final, cfg.record_stride,
                             threads=cfg.threads)


def manifold_reports(cfg: RunConfig) -> List[StabilityReport]:
    grid = gspt.default_grid(cfg.doc["manifold"]["points"])
    tol = cfg.doc["manifold"]["tol_h"]
    kind = cfg.manifold_kind
    return [gspt.stability_report(cfg.params, kind, b, grid, tol) for b in (Branch.PLUS, Branch.MINUS)]


def equilibria(cfg: RunConfig) -> Optional[list]:
    """Predicted nullcline/manifold intersections on both branches, or None."""
    law = cfg.law
    if not isinstance(law.kind, LinearFeedback):
        return None
    out = []
    for b in (Branch.PLUS, Branch.MINUS):
        found = gspt.chimera_equilibrium(cfg.params, law, cfg.manifold_kind, b) or []
        for e in found:
            out.append({
                "branch": b.value,
                "rho1": e.rho1,
                "coupling": e.coupling,
                "psi": e.psi,
                "fast_stability": e.fast_stability.value,
                "slow_eigenvalue": _finite(e.slow_eigenvalue),
                "slow_stable": e.slow_stable,
                "crossing_slope": _finite(e.crossing_slope),
            })
    return out


def _tail(x):
    return _finite(x[-1]) if len(x) else None


def trajectory_summary(traj: Trajectory, pattern: PatternClass) -> dict:
    return {
        "n_rows": len(traj),
        "n_oscillators": traj.n_oscillators,
        "clamp_count": traj.clamp_count,
        "floor_count": traj.floor_count,
        "final": {"t": _tail(traj.times), "R1": _tail(traj.R1), "R2": _tail(traj.R2),
                  "psi": _tail(traj.psi), "coupling": _tail(traj.coupling)},
        "pattern": _pattern_dict(pattern),
    }


def _pattern_dict(p: PatternClass) -> dict:
    d = p.to_dict()
    d["osc_period"] = _finite(d["osc_period"])
    return d


def report_summary(reports: List[StabilityReport]) -> dict:
    return {
        "system": reports[0].kind.value,
        "hyperbolic_everywhere": all(r.hyperbolic_everywhere for r in reports),
        "branches": {
            r.grid[0].branch.value if r.grid else f"branch{i}": {
                "hyperbolic_everywhere": r.hyperbolic_everywhere,
                "fold_points": [float(f) for f in r.fold_points],
                "n_samples": len(r.grid),
                "n_gaps": len(r.gaps),
                "classes": sorted({s.stability.value for s in r.grid}),
            }
            for i, r in enumerate(reports)
        },
    }


@dataclass
class Comparison:
    network: Trajectory
    network_filtered: np.ndarray
    meanfield: Trajectory
    max_abs_diff: float
    window: slice


def compare(cfg: RunConfig) -> Comparison:
    """Network and mean field on one time grid, with the post-transient gap.

    The gap is measured where the smoothing filter has full support, i.e. it
    skips the final half window whose values are one-sided extrapolations.
    """
    net = run_network(cfg)
    mf = run_meanfield(cfg)
    if len(net) != len(mf) or not np.allclose(net.times, mf.times, rtol=0, atol=1e-9):
        raise RuntimeError("network and mean-field time grids differ")
    th = cfg.thresholds
    filt = smoothed_R1(net, th)
    start = int(math.floor(th.transient_fraction * len(net)))
    stop = len(net) - th.filter_window // 2
    window = slice(start, max(stop, start + 1))
    diff = float(np.max(np.abs(filt[window] - mf.R1[window])))
    return Comparison(net, filt, mf, diff, window)


def sweep_row(doc: dict, axis: str, value, run: str) -> dict:
    row = {"value": value}
    try:
        cfg = RunConfig.from_document(set_path(doc, axis, value))
        rep = report_summary(manifold_reports(cfg))
        row["hyperbolic_everywhere"] = rep["hyperbolic_everywhere"]
        folds = sorted({f for b in rep["branches"].values() for f in b["fold_points"]})
        row["fold_points"] = folds
        eq = equilibria(cfg)
        stable = [e for e in (eq or []) if e["slow_stable"] and e["fast_stability"] == "attracting"]
        row["equilibrium_rho1"] = stable[0]["rho1"] if stable else None
        row["equilibrium_coupling"] = stable[0]["coupling"] if stable else None
        if run != "none":
            traj = run_meanfield(cfg) if run == "meanfield" else run_network(cfg)
            pattern = classify_pattern(traj, cfg.thresholds)
            row["final_R1"] = _tail(traj.R1)
            row["final_coupling"] = _tail(traj.coupling)
            row["pattern"] = pattern.kind.value
            row["clamp_count"] = traj.clamp_count
        row["status"] = "ok"
    except Exception as exc:  # one failed row must not stop the sweep
        row["status"] = "error"
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _sweep_job(args):
    return sweep_row(*args)


def sweep(cfg: RunConfig, axis: str, values, run: Optional[str] = None, workers: int = 1) -> List[dict]:
    """One summary row per value, in input order."""
    run = run or cfg.doc["sweep"]["run"]
    jobs = [(cfg.doc, axis, v, run) for v in values]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(_sweep_job, jobs))
    return [_sweep_job(j) for j in jobs]
