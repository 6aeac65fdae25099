"""
Shared domain types for two-population Kuramoto networks.

Populations draw natural frequencies from a Cauchy-Lorentz law, either on a
deterministic quantile grid (the default, free of sampling noise) or from a
seeded generator. Initial phases come from the wrapped-Cauchy family so a
finite network can start close to the Poisson-kernel (Ott-Antonsen) manifold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

TWO_PI = 2.0 * math.pi


class ConfigError(ValueError):
    """Raised when a parameter set violates a model invariant."""


@dataclass(frozen=True)
class DeterministicQuantiles:
    pass


@dataclass(frozen=True)
class SeededRandom:
    seed: int = 0


SamplingMode = Union[DeterministicQuantiles, SeededRandom]


@dataclass(frozen=True)
class PopulationSpec:
    """One oscillator layer.

    Attributes:
        size: number of oscillators (at least 2)
        center_freq: centre of the Cauchy-Lorentz frequency law
        width: half-width at half-maximum of the law (0 = identical oscillators)
        sampling_mode: ``DeterministicQuantiles()`` or ``SeededRandom(seed)``
    """
    size: int
    center_freq: float
    width: float
    sampling_mode: SamplingMode = field(default_factory=DeterministicQuantiles)


@dataclass(frozen=True)
class CouplingConfig:
    k1: float
    k2: float
    mu: float
    phase_lag: float = 0.0


@dataclass(frozen=True)
class SystemParams:
    pop1: PopulationSpec
    pop2: PopulationSpec
    coupling: CouplingConfig

    @property
    def omega_diff(self) -> float:
        """Difference of centre frequencies, pop2 minus pop1."""
        return self.pop2.center_freq - self.pop1.center_freq


@dataclass(frozen=True)
class OrderParameter:
    magnitude: float
    phase: float


def _check_population(name: str, pop: PopulationSpec) -> None:
    if not isinstance(pop.size, (int, np.integer)) or isinstance(pop.size, bool):
        raise ConfigError(f"{name}.size: population size must be an integer")
    if pop.size < 2:
        raise ConfigError(f"{name}.size: population size must be ≥ 2")
    if not math.isfinite(pop.center_freq):
        raise ConfigError(f"{name}.center_freq must be finite")
    if not math.isfinite(pop.width):
        raise ConfigError(f"{name}.width must be finite")
    if pop.width < 0:
        raise ConfigError(f"{name}.width: width must be non-negative")
    mode = pop.sampling_mode
    if isinstance(mode, SeededRandom):
        if not 0 <= int(mode.seed) < 2**64:
            raise ConfigError(f"{name}.sampling_mode: seed must be an unsigned 64-bit integer")
    elif not isinstance(mode, DeterministicQuantiles):
        raise ConfigError(f"{name}.sampling_mode: unknown sampling mode {mode!r}")


def validate_config(params: SystemParams) -> SystemParams:
    """Return ``params`` unchanged, or raise ConfigError naming the bad field."""
    _check_population("pop1", params.pop1)
    _check_population("pop2", params.pop2)
    c = params.coupling
    for name in ("k1", "k2", "mu", "phase_lag"):
        if not math.isfinite(getattr(c, name)):
            raise ConfigError(f"coupling.{name} must be finite")
    return params


def cauchy_quantile(p, center: float, width: float):
    """Inverse CDF of the Cauchy-Lorentz law, ``center + width*tan(pi*(p - 1/2))``.

    Accepts scalars or arrays; every ``p`` must lie strictly inside (0, 1).
    """
    p_arr = np.asarray(p, dtype=float)
    if np.any(~(p_arr > 0.0) | ~(p_arr < 1.0)):
        raise ValueError("quantile level p must lie in the open interval (0, 1)")
    q = center + width * np.tan(np.pi * (p_arr - 0.5))
    if q.ndim == 0:
        return float(q)
    return q


def sample_frequencies(spec: PopulationSpec) -> np.ndarray:
    """Natural frequencies for one population."""
    n = spec.size
    if spec.width == 0:
        return np.full(n, float(spec.center_freq))
    mode = spec.sampling_mode
    if isinstance(mode, SeededRandom):
        rng = np.random.default_rng(int(mode.seed))
        u = rng.random(n)
        # random() lies in [0, 1); reject the single excluded endpoint
        u[u == 0.0] = 0.5 / n
    else:
        u = (np.arange(1, n + 1) - 0.5) / n
    return cauchy_quantile(u, spec.center_freq, spec.width)


def sample_phases(n: int, concentration: float, center: float,
                  seed: Optional[int] = None) -> np.ndarray:
    """Draw ``n`` phases from a wrapped-Cauchy law.

    The law has mean resultant length ``concentration`` and mean direction
    ``center``. Sampling uses the half-angle identity: if ``u`` is uniform then
    ``center + 2*atan(s*tan(pi*(u - 1/2)))`` with ``s = (1-r)/(1+r)`` is
    wrapped-Cauchy with parameter ``r``. Output is wrapped to [0, 2pi).
    """
    if not 0.0 <= concentration <= 1.0:
        raise ValueError("concentration must lie in [0, 1]")
    if concentration == 1.0:
        return np.full(n, float(np.mod(center, TWO_PI)))
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    s = (1.0 - concentration) / (1.0 + concentration)
    theta = center + 2.0 * np.arctan(s * np.tan(np.pi * (u - 0.5)))
    return np.mod(theta, TWO_PI)


def order_parameter(phases: Sequence[float]) -> OrderParameter:
    """Magnitude and phase of the centroid ``(1/N) sum exp(i*theta_j)``."""
    theta = np.asarray(phases, dtype=float)
    if theta.size == 0:
        raise ValueError("order parameter of an empty phase list is undefined")
    z = complex(np.mean(np.cos(theta)), np.mean(np.sin(theta)))
    mag = min(abs(z), 1.0)
    return OrderParameter(mag, wrap_phase(math.atan2(z.imag, z.real)))


def wrap_phase(x):
    """Wrap angles to [0, 2pi)."""
    w = np.mod(x, TWO_PI)
    # mod can round a tiny negative up to exactly 2pi
    w = np.where(w >= TWO_PI, 0.0, w)
    if np.ndim(w) == 0:
        return float(w)
    return w
