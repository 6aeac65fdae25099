"""
Smoothing and pattern classification of order-parameter traces.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy.signal import savgol_filter

from .trajectory import Trajectory

DEFAULT_WINDOW = 101
DEFAULT_ORDER = 3


def _fit_at(x: np.ndarray, y: np.ndarray, order: int, at: float) -> float:
    deg = min(order, len(x) - 1)
    coef = np.polynomial.polynomial.polyfit(x - at, y, deg)
    return float(coef[0])


def savitzky_golay(series, window: int = DEFAULT_WINDOW, poly_order: int = DEFAULT_ORDER) -> np.ndarray:
    """Least-squares polynomial smoothing over a sliding window.

    Interior points use the centred convolution of ``scipy.signal``.
    Within half a window of either end the window is truncated to the
    available samples and a polynomial of degree ``poly_order`` (or less, if
    the truncated window is too short) is fitted and evaluated in place.
    """
    y = np.asarray(series, dtype=float)
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be a positive odd integer")
    if not 0 <= poly_order < window:
        raise ValueError("poly_order must satisfy 0 <= poly_order < window")
    n = y.size
    if n < window:
        raise ValueError(f"series length {n} is shorter than the window {window}")
    half = window // 2
    scale = max(half, 1)
    # scipy's centred convolution is exact in the interior; the edges are refit below
    out = savgol_filter(y, window, poly_order, mode="interp")
    idx = np.arange(n, dtype=float)
    for i in range(min(half, n)):
        hi = min(n, i + half + 1)
        out[i] = _fit_at(idx[:hi] / scale, y[:hi], poly_order, i / scale)
        j = n - 1 - i
        lo = max(0, j - half)
        out[j] = _fit_at(idx[lo:] / scale, y[lo:], poly_order, j / scale)
    return out


@dataclass(frozen=True)
class OscillationMetrics:
    amplitude: float
    period: Optional[float]


def _post_transient(x: np.ndarray, transient_fraction: float) -> slice:
    if not 0.0 <= transient_fraction < 1.0:
        raise ValueError("transient_fraction must lie in [0, 1)")
    return slice(int(math.floor(transient_fraction * len(x))), None)


def dominant_period(series, times) -> Optional[float]:
    """Period of the strongest non-zero spectral peak, or None.

    The spectrum is zero-padded and the peak refined by a parabola through
    the log-magnitudes of the three bins around it. A peak slower than one
    cycle per analysed window is not counted as a period.
    """
    y = np.asarray(series, dtype=float)
    t = np.asarray(times, dtype=float)
    n = y.size
    if n < 4:
        return None
    dt = (t[-1] - t[0]) / (n - 1)
    if not np.allclose(np.diff(t), dt, rtol=1e-6, atol=1e-9):
        raise ValueError("spectral period estimate needs uniformly sampled times")
    y = y - y.mean()
    if np.max(np.abs(y)) <= 1e-12 * max(1.0, float(np.max(np.abs(series)))):
        return None
    n_fft = 1 << int(math.ceil(math.log2(16 * n)))
    mag = np.abs(np.fft.rfft(y, n_fft))
    freqs = np.fft.rfftfreq(n_fft, dt)
    k = int(np.argmax(mag[1:])) + 1
    f_peak = freqs[k]
    if 0 < k < len(mag) - 1:
        a, b, c = np.log(mag[k - 1:k + 2] + 1e-300)
        denom = a - 2 * b + c
        if denom != 0:
            f_peak = freqs[k] + 0.5 * (a - c) / denom * (freqs[1] - freqs[0])
    if f_peak * (n * dt) < 1.0:
        return None
    return float(1.0 / f_peak)


def oscillation_metrics(series, times, transient_fraction: float = 0.2) -> OscillationMetrics:
    y = np.asarray(series, dtype=float)
    t = np.asarray(times, dtype=float)
    if y.shape != t.shape or y.size < 16:
        raise ValueError("series and times must have equal length ≥ 16")
    sl = _post_transient(y, transient_fraction)
    seg, tseg = y[sl], t[sl]
    p10, p90 = np.percentile(seg, [10, 90])
    amp = 0.5 * float(p90 - p10)
    period = dominant_period(seg, tseg)
    return OscillationMetrics(amp, period)


class Pattern(str, enum.Enum):
    SYNCHRONIZED = "synchronized"
    INCOHERENT = "incoherent"
    STATIONARY_CHIMERA = "stationary_chimera"
    BREATHING_CHIMERA = "breathing_chimera"
    UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class PatternThresholds:
    transient_fraction: float = 0.2
    sync_level: float = 0.9
    breathing_sync_level: float = 0.8
    chimera_upper: float = 0.85
    chimera_margin: float = 0.05
    stationary_amplitude: float = 0.05
    incoherence_floor: float = 0.1
    finite_size_factor: float = 1.5
    filter_window: int = DEFAULT_WINDOW
    filter_order: int = DEFAULT_ORDER

    def floor(self, n: Optional[int]) -> float:
        if n is None:
            return self.incoherence_floor
        return max(self.incoherence_floor, self.finite_size_factor / math.sqrt(n))


@dataclass(frozen=True)
class PatternClass:
    kind: Pattern
    mean_R1: float
    mean_R2: float
    osc_amplitude: float
    osc_period: Optional[float]
    thresholds: PatternThresholds

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        return d


def smoothed_R1(traj: Trajectory, thresholds: PatternThresholds = PatternThresholds()) -> np.ndarray:
    """R1 passed through the Savitzky-Golay filter for finite networks."""
    if traj.n_oscillators is None or len(traj) < thresholds.filter_window:
        return np.asarray(traj.R1, dtype=float)
    return savitzky_golay(traj.R1, thresholds.filter_window, thresholds.filter_order)


def classify_pattern(traj: Trajectory, thresholds: PatternThresholds = PatternThresholds()) -> PatternClass:
    th = thresholds
    r1 = smoothed_R1(traj, th)
    r2 = np.asarray(traj.R2, dtype=float)
    sl = _post_transient(r1, th.transient_fraction)
    if len(r1[sl]) == 0:
        raise ValueError("post-transient segment is empty")
    mean1 = float(np.mean(r1[sl]))
    mean2 = float(np.mean(r2[sl]))
    if len(r1) >= 16:
        m1 = oscillation_metrics(r1, traj.times, th.transient_fraction)
        amp2 = oscillation_metrics(r2, traj.times, th.transient_fraction).amplitude
    else:
        seg = r1[sl]
        m1 = OscillationMetrics(0.5 * float(np.ptp(seg)), None)
        amp2 = 0.5 * float(np.ptp(r2[sl]))
    floor = th.floor(traj.n_oscillators)

    if mean1 > th.sync_level and mean2 > th.sync_level and max(m1.amplitude, amp2) < th.stationary_amplitude:
        kind = Pattern.SYNCHRONIZED
    elif mean1 < floor and mean2 < floor:
        kind = Pattern.INCOHERENT
    elif (mean2 > th.sync_level and floor + th.chimera_margin <= mean1 <= th.chimera_upper
          and m1.amplitude < th.stationary_amplitude):
        kind = Pattern.STATIONARY_CHIMERA
    elif mean2 > th.breathing_sync_level and m1.amplitude >= th.stationary_amplitude and m1.period is not None:
        kind = Pattern.BREATHING_CHIMERA
    else:
        kind = Pattern.UNCLASSIFIED
    return PatternClass(kind, mean1, mean2, m1.amplitude, m1.period, th)
