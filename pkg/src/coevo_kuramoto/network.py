"""
Finite-N integration of the two-population network with a slowly adapting
coupling, and of the general M-layer network at fixed coupling.

The all-to-all sums are never formed pairwise. With the order parameter
``z = R exp(i*phi)`` of a layer,

    (1/N) sum_j sin(theta_j - theta_i + beta) = Im(exp(i*beta) * z * exp(-i*theta_i)),

so one force evaluation costs O(N). Phasor sums are reduced over fixed-size
chunks in a fixed order, which makes the result independent of the number of
worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .core import SystemParams, sample_frequencies, sample_phases, validate_config, wrap_phase
from .laws import AdaptiveLawSpec, Target, eval_law
from .trajectory import NumericalError, Recorder, Trajectory, rk4_step, step_count

CHUNK = 4096


@dataclass(frozen=True)
class NetworkState:
    phases1: np.ndarray
    phases2: np.ndarray
    adaptive_value: float = 0.0
    t: float = 0.0

    def __post_init__(self):
        for name in ("phases1", "phases2"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")
            object.__setattr__(self, name, arr)


class PhasorEngine:
    """Chunked cos/sin evaluation and fixed-order chunked means."""

    def __init__(self, threads: int = 1, chunk: int = CHUNK):
        self.threads = max(1, int(threads))
        self.chunk = int(chunk)
        self._pool = ThreadPoolExecutor(self.threads) if self.threads > 1 else None

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def trig(self, theta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        n = theta.size
        if self._pool is None or n <= self.chunk:
            return np.cos(theta), np.sin(theta)
        c = np.empty(n)
        s = np.empty(n)

        def work(i):
            sl = slice(i, i + self.chunk)
            np.cos(theta[sl], out=c[sl])
            np.sin(theta[sl], out=s[sl])

        list(self._pool.map(work, range(0, n, self.chunk)))
        return c, s

    def mean(self, x: np.ndarray) -> float:
        n = x.size
        if n <= self.chunk:
            return float(np.sum(x)) / n
        partial = np.array([np.sum(x[i:i + self.chunk]) for i in range(0, n, self.chunk)])
        return float(np.sum(partial)) / n

    def phasor(self, c: np.ndarray, s: np.ndarray) -> complex:
        return complex(self.mean(c), self.mean(s))

    def evaluate(self, theta: np.ndarray) -> Tuple[np.ndarray, np.ndarray, complex]:
        """Return ``cos(theta)``, ``sin(theta)`` and the mean phasor."""
        c, s = self.trig(theta)
        return c, s, self.phasor(c, s)


def _drive(omega, c, s, h: complex):
    # omega + Im(h * exp(-i*theta))
    return omega + h.imag * c - h.real * s


def frequencies_for(params: SystemParams) -> Tuple[np.ndarray, np.ndarray]:
    return sample_frequencies(params.pop1), sample_frequencies(params.pop2)


def _couplings(params: SystemParams, target: Optional[Target], value: float):
    k1, k2, mu = params.coupling.k1, params.coupling.k2, params.coupling.mu
    if target is Target.INTER:
        mu = value
    elif target is Target.INTRA1:
        k1 = value
    return k1, k2, mu


def network_rhs(state: NetworkState, params: SystemParams, adaptive_target: Optional[Target],
                frequencies: Optional[Tuple[np.ndarray, np.ndarray]] = None,
                engine: Optional[PhasorEngine] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Phase velocities of both populations at ``state``.

    ``adaptive_target`` selects which coupling is read from
    ``state.adaptive_value`` (None: all couplings come from ``params``).
    """
    if frequencies is None:
        frequencies = frequencies_for(params)
    engine = engine or PhasorEngine()
    target = Target(adaptive_target) if adaptive_target is not None else None
    k1, k2, mu = _couplings(params, target, state.adaptive_value)
    lag = np.exp(1j * params.coupling.phase_lag)
    c1, s1, z1 = engine.evaluate(state.phases1)
    c2, s2, z2 = engine.evaluate(state.phases2)
    h1 = lag * (k1 * z1 + mu * z2)
    h2 = lag * (k2 * z2 + mu * z1)
    return _drive(frequencies[0], c1, s1, h1), _drive(frequencies[1], c2, s2, h2)


def reduced_phase_difference(z1: complex, z2: complex) -> float:
    """Phase difference in the sign convention of the mean-field equations.

    The reduced equations write ``z = rho*exp(-i*phi)``, so their
    ``psi = phi2 - phi1`` equals ``arg z1 - arg z2`` of the network.
    """
    return math.atan2(z1.imag, z1.real) - math.atan2(z2.imag, z2.real)


def _nearest(prev: float, angle: float) -> float:
    return prev + math.remainder(angle - prev, 2.0 * math.pi)


def initial_network_state(params: SystemParams, rho1: float, psi: float, coupling: float,
                          rho2: float = 0.99, seed: int = 0) -> NetworkState:
    """Wrapped-Cauchy phases matching a mean-field initial condition.

    Population 1 is centred at ``psi`` and population 2 at 0, so the network
    starts with reduced phase difference ``psi``.
    """
    ss = np.random.SeedSequence(seed)
    s1, s2 = ss.spawn(2)
    th1 = sample_phases(params.pop1.size, rho1, psi, s1)
    th2 = sample_phases(params.pop2.size, rho2, 0.0, s2)
    return NetworkState(th1, th2, coupling, 0.0)


def integrate_network(params: SystemParams, law: Optional[AdaptiveLawSpec], init: NetworkState,
                      dt: float = 0.01, t_final: float = 100.0, record_stride: int = 10,
                      threads: int = 1,
                      frequencies: Optional[Tuple[np.ndarray, np.ndarray]] = None) -> Trajectory:
    """Fixed-step RK4 on phases plus the adaptive coupling.

    The law sees the network's macroscopic state only: R1 in place of rho1
    and the order-parameter phase difference in place of psi.
    """
    validate_config(params)
    n_steps = step_count(dt, t_final)
    if record_stride < 1:
        raise ValueError("record_stride must be ≥ 1")
    if frequencies is None:
        frequencies = frequencies_for(params)
    n1, n2 = params.pop1.size, params.pop2.size
    if init.phases1.size != n1 or init.phases2.size != n2:
        raise ValueError("initial phase arrays do not match population sizes")
    target = law.target if law is not None else None
    w1, w2 = frequencies
    lag = np.exp(1j * params.coupling.phase_lag)

    with PhasorEngine(threads) as engine:

        def rhs(t, y):
            value = y[-1]
            k1, k2, mu = _couplings(params, target, value)
            c, s = engine.trig(y[:-1])
            z1 = engine.phasor(c[:n1], s[:n1])
            z2 = engine.phasor(c[n1:], s[n1:])
            out = np.empty_like(y)
            out[:n1] = _drive(w1, c[:n1], s[:n1], lag * (k1 * z1 + mu * z2))
            out[n1:-1] = _drive(w2, c[n1:], s[n1:], lag * (k2 * z2 + mu * z1))
            if law is None:
                out[-1] = 0.0
            else:
                out[-1] = eval_law(law, abs(z1), reduced_phase_difference(z1, z2), value, t)
            return out

        y = np.concatenate([init.phases1, init.phases2, [init.adaptive_value]])
        t0 = init.t
        rec = Recorder(n_steps // record_stride + 1)
        psi_prev = None

        def record(t, y):
            nonlocal psi_prev
            if not np.all(np.isfinite(y)):
                raise NumericalError("non-finite network state", t)
            _, _, z1 = engine.evaluate(y[:n1])
            _, _, z2 = engine.evaluate(y[n1:n1 + n2])
            psi = reduced_phase_difference(z1, z2)
            psi = psi if psi_prev is None else _nearest(psi_prev, psi)
            psi_prev = psi
            rec.add(t, abs(z1), wrap_phase(math.atan2(z1.imag, z1.real)),
                    abs(z2), wrap_phase(math.atan2(z2.imag, z2.real)), psi, y[-1])

        record(t0, y)
        for i in range(1, n_steps + 1):
            t = t0 + (i - 1) * dt
            y = rk4_step(rhs, t, y, dt)
            if i % record_stride == 0:
                record(t0 + i * dt, y)
        if not np.all(np.isfinite(y)):
            raise NumericalError("non-finite network state", t0 + n_steps * dt)

    return rec.build(n_oscillators=min(n1, n2),
                     meta={"final_phases1": y[:n1].copy(), "final_phases2": y[n1:n1 + n2].copy()})


def multilayer_rhs(phases: Sequence[np.ndarray], freqs: Sequence[np.ndarray], K,
                   beta=None, engine: Optional[PhasorEngine] = None):
    """Phase velocities of an M-layer all-to-all network with coupling matrix
    ``K[s, s']`` and phase lags ``beta[s, s']``."""
    K = np.asarray(K, dtype=float)
    m = K.shape[0]
    beta = np.zeros((m, m)) if beta is None else np.asarray(beta, dtype=float)
    engine = engine or PhasorEngine()
    evals = [engine.evaluate(np.asarray(p, dtype=float)) for p in phases]
    z = np.array([e[2] for e in evals])
    out = []
    for s in range(m):
        h = complex(np.sum(K[s] * np.exp(1j * beta[s]) * z))
        out.append(_drive(np.asarray(freqs[s]), evals[s][0], evals[s][1], h))
    return out


@dataclass(frozen=True)
class MultilayerRecord:
    times: np.ndarray
    R: np.ndarray      # (samples, M)
    phi: np.ndarray    # (samples, M), wrapped


def integrate_multilayer(phases: Sequence[np.ndarray], freqs: Sequence[np.ndarray], K,
                         beta=None, dt: float = 0.01, t_final: float = 10.0,
                         record_stride: int = 10, threads: int = 1) -> MultilayerRecord:
    sizes = [len(p) for p in phases]
    bounds = np.cumsum([0] + sizes)
    n_steps = step_count(dt, t_final)
    times, R, phi = [], [], []
    with PhasorEngine(threads) as engine:

        def split(y):
            return [y[bounds[s]:bounds[s + 1]] for s in range(len(sizes))]

        def rhs(t, y):
            return np.concatenate(multilayer_rhs(split(y), freqs, K, beta, engine))

        def record(t, y):
            if not np.all(np.isfinite(y)):
                raise NumericalError("non-finite network state", t)
            zs = [engine.evaluate(p)[2] for p in split(y)]
            times.append(t)
            R.append([abs(z) for z in zs])
            phi.append([wrap_phase(math.atan2(z.imag, z.real)) for z in zs])

        y = np.concatenate([np.asarray(p, dtype=float) for p in phases])
        record(0.0, y)
        for i in range(1, n_steps + 1):
            y = rk4_step(rhs, (i - 1) * dt, y, dt)
            if i % record_stride == 0:
                record(i * dt, y)
    return MultilayerRecord(np.array(times), np.array(R), np.array(phi))
