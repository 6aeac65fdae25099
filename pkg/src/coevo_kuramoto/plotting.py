"""
Figures written next to the CSV/JSON outputs.

Layouts mirror the usual presentation of these runs: a projection of the
response onto the (R1, coupling) plane over the critical manifold, and the
order parameters against time.
"""

from __future__ import annotations

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .gspt import Stability, StabilityReport

STYLE = {
    Stability.ATTRACTING: dict(color="0.6", ls="-", lw=2.5, label="attracting"),
    Stability.SADDLE: dict(color="tab:green", ls="--", lw=1.5, label="saddle"),
    Stability.REPELLING: dict(color="tab:blue", ls=":", lw=1.8, label="repelling"),
    Stability.NON_HYPERBOLIC: dict(color="k", ls="none", marker="x", label="non-hyperbolic"),
}
PNG_META = {"Software": None}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=PNG_META)
    plt.close(fig)


def draw_manifold(ax, reports, nullcline=None):
    """Critical-manifold branches coloured by stability class."""
    seen = set()
    for rep in reports:
        rho = np.array([s.rho1 for s in rep.grid])
        val = np.array([s.coupling_value for s in rep.grid])
        cls = [s.stability for s in rep.grid]
        for st, style in STYLE.items():
            mask = np.array([c is st for c in cls])
            if not mask.any():
                continue
            y = np.where(mask, val, np.nan)
            kw = dict(style)
            if st in seen:
                kw.pop("label")
            seen.add(st)
            if st is Stability.NON_HYPERBOLIC:
                ax.plot(rho[mask], val[mask], **kw)
            else:
                ax.plot(rho, y, **kw)
    if nullcline is not None and nullcline.func is not None:
        r = np.linspace(0.0, 1.0, 200)
        ax.plot(r, nullcline(r), color="m", lw=1.5, label="slow nullcline")


def _limits(ax, *series):
    vals = np.concatenate([np.asarray(s, dtype=float).ravel() for s in series])
    vals = vals[np.isfinite(vals)]
    if vals.size:
        lo, hi = vals.min(), vals.max()
        pad = 0.15 * (hi - lo) + 0.1
        ax.set_ylim(lo - pad, hi + pad)


def draw_projection(ax, traj, reports, nullcline=None, r1=None, label="response"):
    draw_manifold(ax, reports, nullcline)
    x = traj.R1 if r1 is None else r1
    ax.plot(x, traj.coupling, color="r", lw=1.0, label=label)
    ax.set_xlim(0, 1)
    _limits(ax, traj.coupling)
    ax.set_xlabel(r"$R_1$ / $\rho_1$")
    ax.set_ylabel("coupling")
    ax.legend(loc="best", fontsize=7)


def draw_timeseries(ax, traj, filtered=None):
    if traj.n_oscillators is not None:
        ax.plot(traj.times, traj.R1, color="tab:orange", lw=0.6, label=r"$R_1$")
    else:
        ax.plot(traj.times, traj.R1, color="r", lw=1.0, label=r"$\rho_1$")
    if filtered is not None:
        ax.plot(traj.times, filtered, color="r", lw=1.2, label=r"$R_1$ filtered")
    ax.plot(traj.times, traj.R2, color="tab:blue", lw=0.8, label="population 2")
    ax.set_ylim(0, 1.05)
    ax.set_xlabel("t")
    ax.set_ylabel("synchronization level")
    ax.legend(loc="best", fontsize=7)


def run_figure(path, traj, reports, nullcline=None, filtered=None, title=None):
    fig, axes = plt.subplots(1, 3, figsize=(15, 4))
    draw_projection(axes[0], traj, reports, nullcline, r1=filtered)
    draw_timeseries(axes[1], traj, filtered)
    axes[2].plot(traj.times, traj.psi, color="k", lw=0.8)
    axes[2].set_xlabel("t")
    axes[2].set_ylabel(r"$\psi$")
    if title:
        fig.suptitle(title)
    _save(fig, path)


def compare_figure(path, net, net_filtered, mf, reports, nullcline=None, title=None):
    fig, axes = plt.subplots(2, 2, figsize=(12, 8))
    draw_projection(axes[0, 0], net, reports, nullcline, r1=net_filtered, label="network (filtered)")
    axes[0, 0].set_title("network")
    draw_projection(axes[0, 1], mf, reports, nullcline, label="mean field")
    axes[0, 1].set_title("mean field")
    draw_timeseries(axes[1, 0], net, net_filtered)
    draw_timeseries(axes[1, 1], mf)
    if title:
        fig.suptitle(title)
    _save(fig, path)


def manifold_figure(path, reports: list[StabilityReport], nullcline=None, title=None):
    fig, ax = plt.subplots(figsize=(6, 4.5))
    draw_manifold(ax, reports, nullcline)
    for rep in reports:
        for f in rep.fold_points:
            ax.axvline(f, color="0.3", lw=0.6, ls="-.")
    vals = np.concatenate([[s.coupling_value for s in rep.grid] for rep in reports] or [[0.0]])
    vals = vals[np.isfinite(vals)]
    if vals.size:
        lo, hi = np.percentile(vals, [2, 98])
        ax.set_ylim(lo - 0.5, hi + 0.5)
    ax.set_xlim(0, 1)
    ax.set_xlabel(r"$\rho_1$")
    ax.set_ylabel("coupling on manifold")
    ax.legend(loc="best", fontsize=7)
    if title:
        ax.set_title(title)
    _save(fig, path)


def sweep_figure(path, axis, rows, column):
    xs = [r["value"] for r in rows if r.get(column) is not None]
    ys = [r[column] for r in rows if r.get(column) is not None]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, ys, "o-")
    ax.set_xlabel(axis)
    ax.set_ylabel(column)
    ax.grid(True)
    _save(fig, path)
