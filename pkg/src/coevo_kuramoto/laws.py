"""
Slow coevolution laws for the adaptive coupling strength.

Every law is a function of macroscopic quantities only: the synchronization
level of the first population, the phase difference between the two order
parameters, the current coupling value and fast time.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union


class Target(str, enum.Enum):
    INTER = "inter"     # mu, coupling between the populations
    INTRA1 = "intra1"   # k1, coupling inside population 1


@dataclass(frozen=True)
class Constant:
    pass


@dataclass(frozen=True)
class LinearFeedback:
    gamma: float
    eta: float


@dataclass(frozen=True)
class PeriodicDrive:
    amplitude_scale: float = 1.0
    drive_freq: float = 0.02


@dataclass(frozen=True)
class PhaseFeedback:
    sign: int = -1


LawKind = Union[Constant, LinearFeedback, PeriodicDrive, PhaseFeedback]


@dataclass(frozen=True)
class AdaptiveLawSpec:
    target: Target
    epsilon: float
    kind: LawKind = field(default_factory=Constant)

    def __post_init__(self):
        object.__setattr__(self, "target", Target(self.target))
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise ValueError("epsilon must be a positive finite number")
        if isinstance(self.kind, PhaseFeedback) and self.kind.sign not in (-1, 1):
            raise ValueError("PhaseFeedback.sign must be +1 or -1")


def eval_law(spec: AdaptiveLawSpec, rho1: float, psi: float, coupling: float,
             t: float) -> float:
    """Time derivative of the adaptive coupling."""
    kind = spec.kind
    eps = spec.epsilon
    if isinstance(kind, LinearFeedback):
        return eps * (-coupling + kind.gamma - kind.eta * rho1)
    if isinstance(kind, PeriodicDrive):
        return eps * kind.amplitude_scale * math.cos(kind.drive_freq * t)
    if isinstance(kind, PhaseFeedback):
        return kind.sign * eps * math.cos(psi)
    if isinstance(kind, Constant):
        return 0.0
    raise TypeError(f"unknown law kind {kind!r}")


@dataclass(frozen=True)
class Nullcline:
    """Slow-equilibrium set of a law in the (rho1, coupling) plane.

    ``func`` is None when the law has no autonomous nullcline; ``flat`` marks
    the Constant law, for which every coupling value is stationary.
    """
    func: Optional[Callable[[float], float]]
    flat: bool = False
    slope: Optional[float] = None

    def __call__(self, rho1):
        if self.func is None:
            raise ValueError("this law has no nullcline curve")
        return self.func(rho1)


def nullcline(spec: AdaptiveLawSpec) -> Nullcline:
    kind = spec.kind
    if isinstance(kind, LinearFeedback):
        g, e = kind.gamma, kind.eta
        return Nullcline(lambda r: g - e * r, slope=-e)
    if isinstance(kind, Constant):
        return Nullcline(None, flat=True)
    return Nullcline(None)
