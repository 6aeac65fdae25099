"""
Ott-Antonsen mean fields.

Four systems share one RK4 driver:

* GENERAL  -- M populations, fixed coupling matrix, state (rho_s, phi_s)
* FULL     -- two populations, state (rho1, rho2, psi, coupling)
* INTER    -- rho2 pinned to 1, adaptive intercoupling mu
* INTRA    -- rho2 pinned to 1, adaptive intracoupling k1

Phases follow the reduced-model convention ``z = rho*exp(-i*phi)`` and
``psi = phi2 - phi1``; Omega is the centre-frequency difference pop2 - pop1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .core import SystemParams, wrap_phase
from .laws import AdaptiveLawSpec, Target, eval_law
from .trajectory import NumericalError, Recorder, Trajectory, rk4_step, step_count

RHO_FLOOR = 1e-6
RHO_CEIL = 1.0 - 1e-12


class MeanFieldSystem(str, enum.Enum):
    GENERAL = "general"
    FULL = "full"
    INTER = "inter"
    INTRA = "intra"


@dataclass
class Diagnostics:
    floor_count: int = 0
    clamp_count: int = 0


@dataclass(frozen=True)
class MeanFieldState:
    rho1: float
    psi: float
    adaptive_value: float
    rho2: float = 1.0
    t: float = 0.0


@dataclass(frozen=True)
class GeneralMeanFieldState:
    rho: np.ndarray
    phi: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "rho", np.asarray(self.rho, dtype=float))
        object.__setattr__(self, "phi", np.asarray(self.phi, dtype=float))
        if self.rho.shape != self.phi.shape:
            raise ValueError("rho and phi must have the same length")


@dataclass(frozen=True)
class MultiPopulationParams:
    """Coupling matrix ``K[s, s']``, widths Delta_s and centre frequencies."""
    K: np.ndarray
    widths: np.ndarray
    freqs: np.ndarray

    def __post_init__(self):
        for name in ("K", "widths", "freqs"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))


def general_meanfield_rhs(state: GeneralMeanFieldState, K, widths, freqs,
                          diag: Optional[Diagnostics] = None):
    """Return ``(drho, dphi)`` for M coupled populations.

    Below ``RHO_FLOOR`` the phase equation is singular (it divides by rho);
    there the phase derivative is frozen at 0 and ``diag.floor_count`` grows.
    """
    rho, phi = state.rho, state.phi
    K = np.asarray(K, dtype=float)
    d = phi[None, :] - phi[:, None]          # d[s, s'] = phi_s' - phi_s
    weighted = K * rho[None, :]
    cos_sum = np.sum(weighted * np.cos(d), axis=1)
    sin_sum = np.sum(weighted * np.sin(d), axis=1)
    drho = -np.asarray(widths) * rho + 0.5 * (1.0 - rho**2) * cos_sum
    dphi = np.empty_like(phi)
    for s in range(rho.size):
        if rho[s] < RHO_FLOOR:
            if sin_sum[s] != 0.0 and diag is not None:
                diag.floor_count += 1
            dphi[s] = 0.0
        else:
            dphi[s] = -freqs[s] + 0.5 * (rho[s]**2 + 1.0) / rho[s] * sin_sum[s]
    return drho, dphi


def _full_couplings(params: SystemParams, law: Optional[AdaptiveLawSpec], value: float):
    k1, k2, mu = params.coupling.k1, params.coupling.k2, params.coupling.mu
    if law is not None:
        if law.target is Target.INTER:
            mu = value
        else:
            k1 = value
    return k1, k2, mu


def full_two_pop_rhs(state: MeanFieldState, params: SystemParams,
                     law: Optional[AdaptiveLawSpec] = None,
                     diag: Optional[Diagnostics] = None) -> np.ndarray:
    """``[drho1, drho2, dpsi, dcoupling]`` for the two-population mean field.

    Without a law all couplings come from ``params`` and dcoupling is 0.
    """
    r1, r2, psi = state.rho1, state.rho2, state.psi
    k1, k2, mu = _full_couplings(params, law, state.adaptive_value)
    omega = params.omega_diff
    cp, sp = math.cos(psi), math.sin(psi)
    d1 = -params.pop1.width * r1 + 0.5 * (1 - r1 * r1) * (k1 * r1 + mu * r2 * cp)
    d2 = -params.pop2.width * r2 + 0.5 * (1 - r2 * r2) * (k2 * r2 + mu * r1 * cp)
    if r1 < RHO_FLOOR or r2 < RHO_FLOOR:
        if diag is not None:
            diag.floor_count += 1
        dpsi = 0.0
    else:
        r1s, r2s = r1 * r1, r2 * r2
        dpsi = -omega - 0.5 * mu * (r1s + r2s + 2 * r1s * r2s) / (r1 * r2) * sp
    dc = 0.0 if law is None else eval_law(law, r1, psi, state.adaptive_value, state.t)
    return np.array([d1, d2, dpsi, dc])


def _reduced_fast(rho1: float, psi: float, k1: float, mu: float, delta1: float,
                  omega: float, diag: Optional[Diagnostics]):
    d_rho = -delta1 * rho1 + 0.5 * (1 - rho1 * rho1) * (k1 * rho1 + mu * math.cos(psi))
    if rho1 < RHO_FLOOR:
        if diag is not None:
            diag.floor_count += 1
        return d_rho, 0.0
    d_psi = -omega - 0.5 * mu * (3 * rho1 * rho1 + 1) / rho1 * math.sin(psi)
    return d_rho, d_psi


def reduced_inter_rhs(state: MeanFieldState, params: SystemParams, law: Optional[AdaptiveLawSpec],
                      diag: Optional[Diagnostics] = None) -> np.ndarray:
    """``[drho1, dpsi, dmu]`` with rho2 = 1 and mu = ``state.adaptive_value``."""
    mu = state.adaptive_value
    d_rho, d_psi = _reduced_fast(state.rho1, state.psi, params.coupling.k1, mu,
                                 params.pop1.width, params.omega_diff, diag)
    d_mu = 0.0 if law is None else eval_law(law, state.rho1, state.psi, mu, state.t)
    return np.array([d_rho, d_psi, d_mu])


def reduced_intra_rhs(state: MeanFieldState, params: SystemParams, law: Optional[AdaptiveLawSpec],
                      diag: Optional[Diagnostics] = None) -> np.ndarray:
    """``[drho1, dpsi, dk1]`` with rho2 = 1 and k1 = ``state.adaptive_value``."""
    k1 = state.adaptive_value
    d_rho, d_psi = _reduced_fast(state.rho1, state.psi, k1, params.coupling.mu,
                                 params.pop1.width, params.omega_diff, diag)
    d_k = 0.0 if law is None else eval_law(law, state.rho1, state.psi, k1, state.t)
    return np.array([d_rho, d_psi, d_k])


def _clamp(y: np.ndarray, idx, diag: Diagnostics) -> None:
    for i in idx:
        if y[i] > RHO_CEIL:
            y[i] = RHO_CEIL
            diag.clamp_count += 1
        elif y[i] < 0.0:
            y[i] = 0.0
            diag.clamp_count += 1


def integrate_meanfield(system: Union[MeanFieldSystem, str],
                        params: Union[SystemParams, MultiPopulationParams],
                        init: Union[MeanFieldState, GeneralMeanFieldState],
                        law: Optional[AdaptiveLawSpec] = None, dt: float = 0.01,
                        t_final: float = 100.0, record_stride: int = 10) -> Trajectory:
    """RK4 integration of one of the mean-field systems.

    rho values leaving [0, 1 - 1e-12] after a step are clamped; the number of
    clamp events is returned in ``Trajectory.clamp_count``.
    """
    system = MeanFieldSystem(system)
    n_steps = step_count(dt, t_final)
    if record_stride < 1:
        raise ValueError("record_stride must be ≥ 1")
    diag = Diagnostics()
    rec = Recorder(n_steps // record_stride + 1)
    nan = math.nan

    if system is MeanFieldSystem.GENERAL:
        m = init.rho.size
        if not isinstance(params, MultiPopulationParams):
            raise TypeError("the general system needs MultiPopulationParams")

        def rhs(t, y):
            dr, dp = general_meanfield_rhs(GeneralMeanFieldState(y[:m], y[m:], t),
                                           params.K, params.widths, params.freqs, diag)
            return np.concatenate([dr, dp])

        def record(t, y):
            r, p = y[:m], y[m:]
            two = m > 1
            rec.add(t, r[0], wrap_phase(p[0]), r[1] if two else nan,
                    wrap_phase(p[1]) if two else nan, p[1] - p[0] if two else nan,
                    params.K[0, 1] if two else nan)

        y = np.concatenate([init.rho, init.phi])
        rho_idx = range(m)
    else:
        if law is not None and system is MeanFieldSystem.INTER and law.target is not Target.INTER:
            raise ValueError("the intercoupling system needs a law targeting mu")
        if law is not None and system is MeanFieldSystem.INTRA and law.target is not Target.INTRA1:
            raise ValueError("the intracoupling system needs a law targeting k1")

        if system is MeanFieldSystem.FULL:
            def rhs(t, y):
                return full_two_pop_rhs(MeanFieldState(y[0], y[2], y[3], y[1], t), params, law, diag)

            def record(t, y):
                rec.add(t, y[0], nan, y[1], nan, y[2], y[3])

            y = np.array([init.rho1, init.rho2, init.psi, init.adaptive_value], dtype=float)
            rho_idx = (0, 1)
        else:
            f = reduced_inter_rhs if system is MeanFieldSystem.INTER else reduced_intra_rhs

            def rhs(t, y):
                return f(MeanFieldState(y[0], y[1], y[2], 1.0, t), params, law, diag)

            def record(t, y):
                rec.add(t, y[0], nan, 1.0, nan, y[1], y[2])

            y = np.array([init.rho1, init.psi, init.adaptive_value], dtype=float)
            rho_idx = (0,)

    t0 = init.t
    record(t0, y)
    # overflow surfaces through the finiteness check, not as warnings
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(1, n_steps + 1):
            try:
                y = rk4_step(rhs, t0 + (i - 1) * dt, y, dt)
            except (ValueError, OverflowError):
                # math.sin/cos on an overflowed stage value
                y = np.full_like(y, np.nan)
            if not np.all(np.isfinite(y)):
                raise NumericalError(f"non-finite {system.value} mean-field state", t0 + i * dt)
            _clamp(y, rho_idx, diag)
            if i % record_stride == 0:
                record(t0 + i * dt, y)

    meta = {"system": system.value}
    if system is MeanFieldSystem.GENERAL:
        meta["final_rho"] = y[:init.rho.size].copy()
        meta["final_phi"] = y[init.rho.size:].copy()
    return rec.build(clamp_count=diag.clamp_count, floor_count=diag.floor_count, meta=meta)
