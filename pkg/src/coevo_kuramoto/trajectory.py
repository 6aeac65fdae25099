"""Time-indexed record of order parameters and coupling, plus a fixed-step RK4."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import wrap_phase

CSV_COLUMNS = ("t", "R1", "phi1", "R2", "phi2", "psi", "coupling")


class NumericalError(RuntimeError):
    """Integration produced a non-finite state."""

    def __init__(self, message: str, t: float):
        super().__init__(f"{message} at t={t:.12g}")
        self.t = t


def rk4_step(f: Callable[[float, np.ndarray], np.ndarray], t: float, y: np.ndarray,
             dt: float) -> np.ndarray:
    k1 = f(t, y)
    k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = f(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step_count(dt: float, t_final: float) -> int:
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not t_final > 0:
        raise ValueError("t_final must be positive")
    return int(round(t_final / dt))


@dataclass(frozen=True)
class Trajectory:
    """Recorded run.

    ``psi`` is unwrapped and follows the reduced-model sign convention
    (``arg z1 - arg z2`` for a network). ``phi1``/``phi2`` are NaN when the
    model does not resolve absolute phases.
    """
    times: np.ndarray
    R1: np.ndarray
    phi1: np.ndarray
    R2: np.ndarray
    phi2: np.ndarray
    psi: np.ndarray
    coupling: np.ndarray
    n_oscillators: Optional[int] = None
    clamp_count: int = 0
    floor_count: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.times)
        for name in CSV_COLUMNS[1:]:
            if len(getattr(self, name)) != n:
                raise ValueError(f"column {name} has length {len(getattr(self, name))}, expected {n}")
        if n > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self):
        return len(self.times)

    @property
    def psi_wrapped(self) -> np.ndarray:
        return wrap_phase(self.psi)

    def subsample(self, k: int) -> "Trajectory":
        sl = slice(None, None, k)
        return Trajectory(self.times[sl], self.R1[sl], self.phi1[sl], self.R2[sl],
                          self.phi2[sl], self.psi[sl], self.coupling[sl],
                          self.n_oscillators, self.clamp_count, self.floor_count,
                          dict(self.meta))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(CSV_COLUMNS) + "\n")
        cols = [self.times, self.R1, self.phi1, self.R2, self.phi2, self.psi, self.coupling]
        for row in zip(*cols):
            buf.write(",".join(format_number(v) for v in row) + "\n")
        return buf.getvalue()


def format_number(v) -> str:
    return f"{float(v):.12g}"


def read_trajectory_csv(path) -> Trajectory:
    data = np.genfromtxt(path, delimiter=",", names=True)
    return Trajectory(*(np.atleast_1d(data[c]) for c in CSV_COLUMNS))


class Recorder:
    """Accumulates samples into preallocated arrays."""

    def __init__(self, n_rows: int):
        self.buf = np.full((n_rows, len(CSV_COLUMNS)), np.nan)
        self.i = 0

    def add(self, t, R1, phi1, R2, phi2, psi, coupling):
        self.buf[self.i] = (t, R1, phi1, R2, phi2, psi, coupling)
        self.i += 1

    def build(self, **kwargs) -> Trajectory:
        b = self.buf[: self.i]
        return Trajectory(*(b[:, j].copy() for j in range(b.shape[1])), **kwargs)
