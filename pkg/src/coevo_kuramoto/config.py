"""
Run configuration: a versioned JSON document with strict keys.

Every section has materialized defaults; unknown keys anywhere are rejected
so a typo such as ``eta_mu`` for ``eta`` cannot slip through silently.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from typing import Any, Optional

from .analysis import PatternThresholds
from .core import (ConfigError, CouplingConfig, DeterministicQuantiles, PopulationSpec,
                   SeededRandom, SystemParams, validate_config)
from .gspt import Branch, ManifoldKind
from .laws import AdaptiveLawSpec, Constant, LinearFeedback, PeriodicDrive, PhaseFeedback, Target
from .meanfield import MeanFieldState

SCHEMA_VERSION = 1

_POP = {"size": 1000, "center_freq": 5.05, "width": 1.0, "sampling": "quantiles"}

DEFAULTS: dict = {
    "schema_version": SCHEMA_VERSION,
    "system": {
        "pop1": dict(_POP),
        "pop2": dict(_POP, center_freq=5.06, width=0.1),
        "coupling": {"k1": 0.9, "k2": 9.0, "mu": 0.0, "phase_lag": 0.0},
    },
    "law": {"target": "inter", "epsilon": 0.02, "kind": "constant",
            "gamma": None, "eta": None, "amplitude_scale": None, "drive_freq": None, "sign": None},
    "init": {"rho1": 0.99, "psi": -0.5, "coupling": 3.0, "rho2": 0.99},
    "integrator": {"dt": 0.01, "t_final": 2000.0, "record_stride": 10},
    "meanfield": {"system": "reduced"},
    "seed": 0,
    "threads": 1,
    "output_dir": "out",
    "figures": True,
    "filter": {"window": 101, "order": 3},
    "classifier": {
        "transient_fraction": 0.2, "sync_level": 0.9, "breathing_sync_level": 0.8,
        "chimera_upper": 0.85, "chimera_margin": 0.05, "stationary_amplitude": 0.05,
        "incoherence_floor": 0.1, "finite_size_factor": 1.5,
    },
    "manifold": {"points": 1000, "system": None, "tol_h": 1e-8},
    "sweep": {"axis": None, "values": [], "run": "meanfield"},
}

_LAW_FIELDS = {
    "constant": (),
    "linear_feedback": ("gamma", "eta"),
    "periodic_drive": ("amplitude_scale", "drive_freq"),
    "phase_feedback": ("sign",),
}

_CAPTION = {
    "system": {
        "pop1": {"size": 1000, "center_freq": 5.05, "width": 1.0},
        "pop2": {"size": 1000, "center_freq": 5.06, "width": 0.1},
    },
}

PRESETS: dict = {
    # stationary intercoupling chimera
    "stationary-inter": {
        **_CAPTION,
        "system": {**_CAPTION["system"], "coupling": {"k1": 0.9, "k2": 9.0, "mu": 3.0}},
        "law": {"target": "inter", "epsilon": 0.02, "kind": "linear_feedback",
                "gamma": 2.5, "eta": 10.0},
        "init": {"rho1": 0.99, "psi": -0.5, "coupling": 3.0},
        "integrator": {"t_final": 2000.0},
    },
    # breathing intercoupling chimera
    "breathing-inter": {
        "system": {**_CAPTION["system"], "coupling": {"k1": 0.9, "k2": 9.0, "mu": 1.1}},
        "law": {"target": "inter", "epsilon": 0.02, "kind": "periodic_drive",
                "amplitude_scale": 1.0, "drive_freq": 0.02},
        "init": {"rho1": 0.99, "psi": -0.5, "coupling": 1.1},
        "integrator": {"t_final": 3000.0},
    },
    # stationary intracoupling chimera
    "stationary-intra": {
        "system": {**_CAPTION["system"], "coupling": {"k1": 3.5, "k2": 9.0, "mu": 0.3}},
        "law": {"target": "intra1", "epsilon": 0.02, "kind": "linear_feedback",
                "gamma": 2.5, "eta": 10.0},
        "init": {"rho1": 0.99, "psi": -0.5, "coupling": 3.5},
        "integrator": {"t_final": 2000.0},
    },
    # canard exploration, non-hyperbolic intercoupling manifold
    "canard": {
        "system": {
            "pop1": {"size": 5000, "center_freq": 5.05, "width": 0.1},
            "pop2": {"size": 5000, "center_freq": 5.05, "width": 0.1},
            "coupling": {"k1": 5.0, "k2": 5.0, "mu": 0.5},
        },
        "law": {"target": "inter", "epsilon": 0.02, "kind": "phase_feedback", "sign": -1},
        "init": {"rho1": 0.99, "psi": 0.468, "coupling": 0.5},
        "integrator": {"t_final": 5000.0},
    },
}


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"unknown configuration key '{where}'")
        if isinstance(base[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"'{where}' must be an object")
            out[key] = _merge(base[key], val, where + ".")
        else:
            out[key] = copy.deepcopy(val)
    return out


def resolve(document: Optional[dict] = None, preset: Optional[str] = None) -> dict:
    """Defaults, then an optional preset, then the user document."""
    resolved = copy.deepcopy(DEFAULTS)
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset '{preset}' (choose from {sorted(PRESETS)})")
        resolved = _merge(resolved, PRESETS[preset])
    if document:
        version = document.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")
        resolved = _merge(resolved, document)
    return resolved


def set_path(doc: dict, dotted: str, value: Any) -> dict:
    """Copy of ``doc`` with the numeric field at ``dotted`` replaced."""
    out = copy.deepcopy(doc)
    keys = dotted.split(".")
    node = out
    for k in keys[:-1]:
        if not isinstance(node.get(k), dict):
            raise ConfigError(f"sweep axis '{dotted}' does not name a config field")
        node = node[k]
    leaf = keys[-1]
    if leaf not in node:
        raise ConfigError(f"sweep axis '{dotted}' does not name a config field")
    current = node[leaf]
    if current is not None and (isinstance(current, bool) or not isinstance(current, (int, float))):
        raise ConfigError(f"sweep axis '{dotted}' must name a numeric config field")
    node[leaf] = value
    return out


def _number(d: dict, key: str, where: str) -> float:
    v = d.get(key)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number")
    v = float(v)
    if not math.isfinite(v):
        raise ConfigError(f"{where}.{key} must be finite")
    return v


def _integer(d: dict, key: str, where: str, minimum: int) -> int:
    v = d.get(key)
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise ConfigError(f"{where}.{key} must be an integer ≥ {minimum}")
    return v


@dataclass(frozen=True)
class RunConfig:
    """Typed view over a resolved configuration document."""
    doc: dict

    @classmethod
    def from_document(cls, document: Optional[dict] = None, preset: Optional[str] = None,
                      **overrides) -> "RunConfig":
        doc = resolve(document, preset)
        for dotted, value in overrides.items():
            if value is not None:
                doc = set_path(doc, dotted.replace("__", "."), value)
        cfg = cls(doc)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: Optional[str] = None, preset: Optional[str] = None, **overrides) -> "RunConfig":
        document = None
        if path is not None:
            try:
                with open(path) as fh:
                    document = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config {path}: {exc}") from exc
            if not isinstance(document, dict):
                raise ConfigError("config document must be a JSON object")
        return cls.from_document(document, preset, **overrides)

    def validate(self) -> None:
        validate_config(self.params)
        self.law
        self.meanfield_init
        integ = self.doc["integrator"]
        if not _number(integ, "dt", "integrator") > 0:
            raise ConfigError("integrator.dt must be positive")
        if not _number(integ, "t_final", "integrator") > 0:
            raise ConfigError("integrator.t_final must be positive")
        _integer(integ, "record_stride", "integrator", 1)
        seed = self.doc["seed"]
        if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        _integer(self.doc, "threads", "config", 1)
        f = self.doc["filter"]
        w = _integer(f, "window", "filter", 1)
        o = _integer(f, "order", "filter", 0)
        if w % 2 == 0 or o >= w:
            raise ConfigError("filter.window must be odd and greater than filter.order")
        self.thresholds
        if self.doc["meanfield"]["system"] not in ("reduced", "full"):
            raise ConfigError("meanfield.system must be 'reduced' or 'full'")
        _integer(self.doc["manifold"], "points", "manifold", 2)
        if self.doc["sweep"]["run"] not in ("meanfield", "network", "none"):
            raise ConfigError("sweep.run must be 'meanfield', 'network' or 'none'")
        if not isinstance(self.doc["figures"], bool):
            raise ConfigError("figures must be true or false")

    # --- typed accessors ---

    def _population(self, name: str) -> PopulationSpec:
        d = self.doc["system"][name]
        where = f"system.{name}"
        size = d.get("size")
        if isinstance(size, bool) or not isinstance(size, int):
            raise ConfigError(f"{where}.size must be an integer")
        sampling = d.get("sampling")
        if sampling == "quantiles":
            mode = DeterministicQuantiles()
        elif sampling == "random":
            mode = SeededRandom(int(self.doc["seed"]) ^ (1 if name == "pop1" else 2))
        elif isinstance(sampling, dict) and set(sampling) == {"random"}:
            mode = SeededRandom(int(sampling["random"]))
        else:
            raise ConfigError(f"{where}.sampling must be 'quantiles', 'random' or {{\"random\": seed}}")
        return PopulationSpec(size, _number(d, "center_freq", where), _number(d, "width", where), mode)

    @property
    def params(self) -> SystemParams:
        c = self.doc["system"]["coupling"]
        coupling = CouplingConfig(*(_number(c, k, "system.coupling") for k in ("k1", "k2", "mu", "phase_lag")))
        return SystemParams(self._population("pop1"), self._population("pop2"), coupling)

    @property
    def law(self) -> AdaptiveLawSpec:
        d = self.doc["law"]
        kind_name = d.get("kind")
        if kind_name not in _LAW_FIELDS:
            raise ConfigError(f"law.kind must be one of {sorted(_LAW_FIELDS)}")
        needed = _LAW_FIELDS[kind_name]
        for other in set(k for v in _LAW_FIELDS.values() for k in v) - set(needed):
            if d.get(other) is not None:
                raise ConfigError(f"law.{other} is not used by law kind '{kind_name}'")
        vals = [_number(d, k, "law") for k in needed]
        if kind_name == "constant":
            kind = Constant()
        elif kind_name == "linear_feedback":
            kind = LinearFeedback(*vals)
        elif kind_name == "periodic_drive":
            kind = PeriodicDrive(*vals)
        else:
            if vals[0] not in (1.0, -1.0):
                raise ConfigError("law.sign must be +1 or -1")
            kind = PhaseFeedback(int(vals[0]))
        try:
            target = Target(d.get("target"))
        except ValueError:
            raise ConfigError("law.target must be 'inter' or 'intra1'") from None
        eps = _number(d, "epsilon", "law")
        if not eps > 0:
            raise ConfigError("law.epsilon must be positive")
        return AdaptiveLawSpec(target, eps, kind)

    @property
    def meanfield_init(self) -> MeanFieldState:
        d = self.doc["init"]
        rho1 = _number(d, "rho1", "init")
        rho2 = _number(d, "rho2", "init")
        for name, v in (("rho1", rho1), ("rho2", rho2)):
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"init.{name} must lie in [0, 1]")
        return MeanFieldState(rho1, _number(d, "psi", "init"), _number(d, "coupling", "init"), rho2)

    @property
    def thresholds(self) -> PatternThresholds:
        c = self.doc["classifier"]
        f = self.doc["filter"]
        vals = {k: _number(c, k, "classifier") for k in c}
        if not 0.0 <= vals["transient_fraction"] < 1.0:
            raise ConfigError("classifier.transient_fraction must lie in [0, 1)")
        return PatternThresholds(**vals, filter_window=f["window"], filter_order=f["order"])

    @property
    def manifold_kind(self) -> ManifoldKind:
        explicit = self.doc["manifold"]["system"]
        if explicit is not None:
            try:
                return ManifoldKind(explicit)
            except ValueError:
                raise ConfigError("manifold.system must be 'inter', 'intra' or null") from None
        return ManifoldKind.INTER if self.law.target is Target.INTER else ManifoldKind.INTRA

    @property
    def dt(self) -> float:
        return float(self.doc["integrator"]["dt"])

    @property
    def t_final(self) -> float:
        return float(self.doc["integrator"]["t_final"])

    @property
    def record_stride(self) -> int:
        return int(self.doc["integrator"]["record_stride"])

    @property
    def seed(self) -> int:
        return int(self.doc["seed"])

    @property
    def threads(self) -> int:
        return int(self.doc["threads"])

    def to_json(self) -> str:
        return json.dumps(self.doc, indent=2, sort_keys=True)


__all__ = ["RunConfig", "resolve", "set_path", "PRESETS", "DEFAULTS", "SCHEMA_VERSION", "Branch"]
