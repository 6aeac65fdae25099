"""
Command-line entry point.

Subcommands write CSV tables, a JSON summary and (optionally) PNG figures to
an output directory. Exit codes: 0 success, 2 configuration error, 3
numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from . import runs
from .analysis import classify_pattern, smoothed_R1
from .config import PRESETS, RunConfig, set_path
from .core import ConfigError
from .gspt import NoRealBranch
from .laws import nullcline
from .trajectory import NumericalError, format_number

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

MANIFOLD_COLUMNS = ("rho1", "branch", "coupling", "psi", "eig1_re", "eig1_im", "eig2_re",
                    "eig2_im", "stability")
COMPARE_COLUMNS = ("t", "R1_network", "R1_network_filtered", "R2_network", "psi_network",
                   "coupling_network", "rho1_meanfield", "rho2_meanfield", "psi_meanfield",
                   "coupling_meanfield")


def _json_dump(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def _write(path, text):
    with open(path, "w") as fh:
        fh.write(text)


def _figures_dir(cfg, out):
    if not cfg.doc["figures"]:
        return None
    path = os.path.join(out, "figures")
    os.makedirs(path, exist_ok=True)
    return path


def _null(cfg):
    n = nullcline(cfg.law)
    return n if n.func is not None else None


def _base_summary(command, cfg):
    return {"command": command, "config": cfg.doc, "decisions": runs.decisions(cfg)}


def cmd_simulate(args, cfg, out, network: bool) -> dict:
    traj = runs.run_network(cfg) if network else runs.run_meanfield(cfg)
    pattern = classify_pattern(traj, cfg.thresholds)
    name = "network" if network else "meanfield"
    _write(os.path.join(out, f"{name}.csv"), traj.to_csv())
    summary = _base_summary(f"simulate-{name}", cfg)
    summary.update(runs.trajectory_summary(traj, pattern))
    if not network:
        summary["meanfield_system"] = runs.meanfield_system(cfg).value
    summary["equilibria"] = runs.equilibria(cfg)
    figs = _figures_dir(cfg, out)
    if figs:
        from . import plotting
        filtered = smoothed_R1(traj, cfg.thresholds) if network else None
        plotting.run_figure(os.path.join(figs, f"{name}.png"), traj, runs.manifold_reports(cfg),
                            _null(cfg), filtered, title=pattern.kind.value)
    return summary


def manifold_rows(reports) -> str:
    lines = [",".join(MANIFOLD_COLUMNS)]
    for rep in reports:
        for s in rep.grid:
            e1, e2 = s.eigenvalues
            nums = (s.rho1,)
            tail = (s.coupling_value, s.psi, e1.real, e1.imag, e2.real, e2.imag)
            lines.append(",".join([format_number(nums[0]), s.branch.value]
                                  + [format_number(v) for v in tail] + [s.stability.value]))
    return "\n".join(lines) + "\n"


def cmd_manifold(args, cfg, out) -> dict:
    reports = runs.manifold_reports(cfg)
    _write(os.path.join(out, "manifold.csv"), manifold_rows(reports))
    summary = _base_summary("manifold", cfg)
    summary.update(runs.report_summary(reports))
    summary["equilibria"] = runs.equilibria(cfg)
    figs = _figures_dir(cfg, out)
    if figs:
        from . import plotting
        plotting.manifold_figure(os.path.join(figs, "manifold.png"), reports, _null(cfg),
                                 title=f"{reports[0].kind.value} critical manifold")
    return summary


def cmd_compare(args, cfg, out) -> dict:
    cmp = runs.compare(cfg)
    net, mf = cmp.network, cmp.meanfield
    cols = [net.times, net.R1, cmp.network_filtered, net.R2, net.psi, net.coupling,
            mf.R1, mf.R2, mf.psi, mf.coupling]
    lines = [",".join(COMPARE_COLUMNS)]
    lines += [",".join(format_number(v) for v in row) for row in zip(*cols)]
    _write(os.path.join(out, "compare.csv"), "\n".join(lines) + "\n")
    th = cfg.thresholds
    summary = _base_summary("compare", cfg)
    summary.update({
        "max_abs_diff_R1": cmp.max_abs_diff,
        "diff_window": {"start_t": float(net.times[cmp.window][0]),
                        "end_t": float(net.times[cmp.window][-1])},
        "network": runs.trajectory_summary(net, classify_pattern(net, th)),
        "meanfield": runs.trajectory_summary(mf, classify_pattern(mf, th)),
        "meanfield_system": runs.meanfield_system(cfg).value,
        "equilibria": runs.equilibria(cfg),
    })
    figs = _figures_dir(cfg, out)
    if figs:
        from . import plotting
        plotting.compare_figure(os.path.join(figs, "compare.png"), net, cmp.network_filtered, mf,
                                runs.manifold_reports(cfg), _null(cfg))
    return summary


SWEEP_COLUMNS = ("value", "status", "hyperbolic_everywhere", "fold_points", "equilibrium_rho1",
                 "equilibrium_coupling", "final_R1", "final_coupling", "pattern", "clamp_count", "error")


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int, float)):
        return format_number(v)
    if isinstance(v, list):
        return ";".join(format_number(x) for x in v)
    text = str(v)
    return '"' + text.replace('"', '""') + '"' if ("," in text or '"' in text) else text


def _parse_values(text: str) -> List[float]:
    if not text.strip():
        return []
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError(f"--values must be a comma-separated list of numbers, got {text!r}") from None


def cmd_sweep(args, cfg, out) -> dict:
    axis = args.axis or cfg.doc["sweep"]["axis"]
    values = _parse_values(args.values) if args.values is not None else list(cfg.doc["sweep"]["values"])
    if values and not axis:
        raise ConfigError("sweep needs an axis (--axis or sweep.axis)")
    if axis:
        set_path(cfg.doc, axis, 0.0)  # reject a bad axis before any work
    rows = runs.sweep(cfg, axis, values, args.run, workers=cfg.threads)
    lines = [",".join(SWEEP_COLUMNS)]
    lines += [",".join(_cell(r.get(c)) for c in SWEEP_COLUMNS) for r in rows]
    _write(os.path.join(out, "sweep.csv"), "\n".join(lines) + "\n")
    summary = _base_summary("sweep", cfg)
    summary.update({"axis": axis, "values": values, "rows": rows,
                    "n_errors": sum(r["status"] == "error" for r in rows)})
    figs = _figures_dir(cfg, out)
    if figs and rows:
        from . import plotting
        column = "final_R1" if any(r.get("final_R1") is not None for r in rows) else "equilibrium_rho1"
        plotting.sweep_figure(os.path.join(figs, "sweep.png"), axis, rows, column)
    return summary


COMMANDS = {
    "simulate-network": lambda a, c, o: cmd_simulate(a, c, o, network=True),
    "simulate-meanfield": lambda a, c, o: cmd_simulate(a, c, o, network=False),
    "manifold": cmd_manifold,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--preset", choices=sorted(PRESETS), help="named starting configuration")
    common.add_argument("--out", metavar="DIR", help="output directory (default: config output_dir)")
    common.add_argument("--seed", type=int)
    common.add_argument("--dt", type=float)
    common.add_argument("--t-final", type=float)
    common.add_argument("--threads", type=int)
    common.add_argument("--no-figures", action="store_true", help="skip PNG output")

    parser = argparse.ArgumentParser(prog="coevo-kuramoto",
                                     description="Two-population Kuramoto networks with adaptive coupling.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate-network", parents=[common], help="integrate the oscillator network")
    sub.add_parser("simulate-meanfield", parents=[common], help="integrate the mean-field reduction")
    sub.add_parser("manifold", parents=[common], help="critical manifold and its stability")
    sub.add_parser("compare", parents=[common], help="network against mean field on one grid")
    sw = sub.add_parser("sweep", parents=[common], help="vary one config field")
    sw.add_argument("--axis", help="dotted config path, e.g. law.gamma")
    sw.add_argument("--values", help="comma-separated values")
    sw.add_argument("--run", choices=("meanfield", "network", "none"))
    return parser


def _error_record(kind: str, exc: Exception, code: int) -> dict:
    rec = {"error": kind, "message": str(exc), "exit_code": code}
    if isinstance(exc, NumericalError):
        rec["t"] = exc.t
    return rec


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    out = args.out
    try:
        cfg = RunConfig.load(args.config, args.preset, seed=args.seed, integrator__dt=args.dt,
                             integrator__t_final=args.t_final, threads=args.threads)
        if args.no_figures:
            cfg.doc["figures"] = False
        out = out or cfg.doc["output_dir"]
        os.makedirs(out, exist_ok=True)
        summary = COMMANDS[args.command](args, cfg, out)
        _json_dump(summary, os.path.join(out, "summary.json"))
        return EXIT_OK
    except ConfigError as exc:
        code, rec = EXIT_CONFIG, _error_record("config", exc, EXIT_CONFIG)
    except (NumericalError, NoRealBranch, ArithmeticError, FloatingPointError) as exc:
        code, rec = EXIT_NUMERICAL, _error_record("numerical", exc, EXIT_NUMERICAL)
    except ValueError as exc:
        code, rec = EXIT_NUMERICAL, _error_record("numerical", exc, EXIT_NUMERICAL)
    print(json.dumps(rec, sort_keys=True), file=sys.stderr)
    if out:
        try:
            os.makedirs(out, exist_ok=True)
            _json_dump(rec, os.path.join(out, "error.json"))
        except OSError:
            pass
    return code


if __name__ == "__main__":
    sys.exit(main())
