"""
Critical manifolds of the reduced fast-slow systems and their stability.

With rho2 pinned to 1, the fast subsystem in (rho1, psi) has equilibria

    mu*cos(psi) = rho1*(2*D1/(1 - rho1**2) - k1)
    mu*sin(psi) = -2*Omega*rho1/(3*rho1**2 + 1)

Solving for mu gives the intercoupling manifold (two branches, mu = +/-...),
solving for k1 at fixed mu gives the intracoupling manifold. Branch points
carry their fast Jacobian spectrum and a hyperbolicity class.
"""

from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from .core import SystemParams
from .laws import AdaptiveLawSpec, nullcline

RHO_FLOOR = 1e-6
GRID_LO = 1e-3
GRID_HI = 1.0 - 1e-3
GRID_POINTS = 1000
TOL_H = 1e-8


class Branch(str, enum.Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self) -> int:
        return 1 if self is Branch.PLUS else -1


class Stability(str, enum.Enum):
    ATTRACTING = "attracting"
    REPELLING = "repelling"
    SADDLE = "saddle"
    NON_HYPERBOLIC = "non_hyperbolic"


class ManifoldKind(str, enum.Enum):
    INTER = "inter"
    INTRA = "intra"


class NoRealBranch(ValueError):
    """The intracoupling discriminant is negative at ``rho1``."""

    def __init__(self, rho1: float, discriminant: float):
        super().__init__(f"no real manifold branch at rho1={rho1:.12g} "
                         f"(discriminant {discriminant:.3e} < 0)")
        self.rho1 = rho1
        self.discriminant = discriminant


class BoundaryDegeneracyWarning(UserWarning):
    """A fold sits exactly on the boundary rho1 = 0 and is not reported."""


@dataclass(frozen=True)
class ManifoldSample:
    rho1: float
    branch: Branch
    coupling_value: float
    psi: float
    eigenvalues: Tuple[complex, complex]
    stability: Stability


@dataclass(frozen=True)
class StabilityReport:
    kind: ManifoldKind
    grid: List[ManifoldSample]
    fold_points: np.ndarray
    hyperbolic_everywhere: bool
    gaps: List[float] = field(default_factory=list)   # rho1 values without a real branch


def default_grid(n_points: int = GRID_POINTS) -> np.ndarray:
    return np.linspace(GRID_LO, GRID_HI, n_points)


# --- eigenvalues and classification -------------------------------------------------

def eigenvalues_2x2(J) -> Tuple[complex, complex]:
    """Closed-form eigenvalues, ordered by real part."""
    a, b = J[0][0], J[0][1]
    c, d = J[1][0], J[1][1]
    half_tr = 0.5 * (a + d)
    # (a-d)^2/4 + bc avoids cancellation in half_tr^2 - det
    disc = 0.25 * (a - d) ** 2 + b * c
    root = cmath.sqrt(disc)
    lo, hi = half_tr - root, half_tr + root
    return (lo, hi) if lo.real <= hi.real else (hi, lo)


def classify(eigenvalues, tol_h: float = TOL_H) -> Stability:
    re = [complex(e).real for e in eigenvalues]
    if any(abs(r) <= tol_h for r in re):
        return Stability.NON_HYPERBOLIC
    if all(r < 0 for r in re):
        return Stability.ATTRACTING
    if all(r > 0 for r in re):
        return Stability.REPELLING
    return Stability.SADDLE


def hyperbolicity_condition(k1: float, delta1: float) -> bool:
    """Intercoupling manifold at Omega = 0 is normally hyperbolic iff k1 < 2*delta1."""
    if not delta1 > 0:
        raise ValueError("delta1 must be positive")
    return k1 < 2.0 * delta1


def connectivity_check(mu: float, omega_diff: float) -> bool:
    """Intracoupling manifold has no gaps iff |mu| >= |Omega|/sqrt(3)."""
    return abs(mu) >= abs(omega_diff) / math.sqrt(3.0)


# --- intercoupling (mu adaptive) ---------------------------------------------------

def _fast_targets(rho1: float, delta1: float, k1: float, omega: float):
    cos_part = rho1 * (2.0 * delta1 / (1.0 - rho1 * rho1) - k1)
    sin_part = -2.0 * omega * rho1 / (3.0 * rho1 * rho1 + 1.0)
    return cos_part, sin_part


def _angle(cos_part: float, sin_part: float, coupling: float) -> float:
    if coupling == 0.0:
        return 0.0
    s = math.copysign(1.0, coupling)
    return math.atan2(s * sin_part, s * cos_part)


def _check_open(rho1: float) -> None:
    if not 0.0 < rho1 < 1.0:
        raise ValueError("rho1 must lie in the open interval (0, 1)")


def inter_jacobian(rho1: float, params: SystemParams) -> np.ndarray:
    """Fast Jacobian in (rho1, psi) on the intercoupling manifold.

    Identical on both branches: it depends on rho1 only.
    """
    _check_open(rho1)
    d1, k1, om = params.pop1.width, params.coupling.k1, params.omega_diff
    if rho1 <= RHO_FLOOR and om != 0.0:
        raise ValueError("Jacobian entry Omega/rho1 is singular at rho1 → 0 when Omega ≠ 0")
    u = rho1 * rho1
    return np.array([
        [-d1 * (1 + u) / (1 - u) + 0.5 * k1 * (1 - u),
         om * rho1 * (1 - u) / (1 + 3 * u)],
        [om / rho1 * (3 * u - 1) / (3 * u + 1),
         -0.5 * (1 + 3 * u) / (1 - u) * (2 * d1 - k1 * (1 - u))],
    ])


def inter_manifold(rho1: float, params: SystemParams, branch: Branch = Branch.PLUS,
                   tol_h: float = TOL_H) -> ManifoldSample:
    _check_open(rho1)
    branch = Branch(branch)
    cp, sp = _fast_targets(rho1, params.pop1.width, params.coupling.k1, params.omega_diff)
    mu = branch.sign * math.hypot(cp, sp)
    psi = _angle(cp, sp, mu)
    eig = eigenvalues_2x2(inter_jacobian(rho1, params))
    return ManifoldSample(rho1, branch, mu, psi, eig, classify(eig, tol_h))


# --- intracoupling (k1 adaptive) ---------------------------------------------------

def intra_discriminant(rho1: float, mu: float, omega: float) -> float:
    return (mu / rho1) ** 2 - (2.0 * omega / (3.0 * rho1 * rho1 + 1.0)) ** 2


def _intra_h(rho1: float, params: SystemParams) -> float:
    disc = intra_discriminant(rho1, params.coupling.mu, params.omega_diff)
    if disc < 0:
        raise NoRealBranch(rho1, disc)
    return math.sqrt(disc)


def intra_jacobian(rho1: float, params: SystemParams, branch: Branch = Branch.MINUS) -> np.ndarray:
    _check_open(rho1)
    sign = Branch(branch).sign
    d1, om = params.pop1.width, params.omega_diff
    h = _intra_h(rho1, params)
    u = rho1 * rho1
    return np.array([
        [-2 * d1 * u / (1 - u) + sign * 0.5 * (1 - u) * h,
         om * rho1 * (1 - u) / (3 * u + 1)],
        [om / rho1 * (3 * u - 1) / (3 * u + 1),
         sign * 0.5 * (3 * u + 1) * h],
    ])


def intra_manifold(rho1: float, params: SystemParams, branch: Branch = Branch.MINUS,
                   tol_h: float = TOL_H) -> ManifoldSample:
    """k1 on the intracoupling manifold; raises NoRealBranch in a gap."""
    _check_open(rho1)
    branch = Branch(branch)
    d1, mu, om = params.pop1.width, params.coupling.mu, params.omega_diff
    h = _intra_h(rho1, params)
    k1 = 2.0 * d1 / (1.0 - rho1 * rho1) + branch.sign * h
    # mu*cos(psi) = rho1*(2*D1/(1-rho1^2) - k1) = -sign*rho1*h
    cp = -branch.sign * rho1 * h
    sp = -2.0 * om * rho1 / (3.0 * rho1 * rho1 + 1.0)
    psi = _angle(cp, sp, mu)
    eig = eigenvalues_2x2(intra_jacobian(rho1, params, branch))
    return ManifoldSample(rho1, branch, k1, psi, eig, classify(eig, tol_h))


def manifold_sample(kind: ManifoldKind, rho1: float, params: SystemParams, branch: Branch,
                    tol_h: float = TOL_H) -> ManifoldSample:
    if ManifoldKind(kind) is ManifoldKind.INTER:
        return inter_manifold(rho1, params, branch, tol_h)
    return intra_manifold(rho1, params, branch, tol_h)


def _jacobian(kind: ManifoldKind, rho1: float, params: SystemParams, branch: Branch):
    if kind is ManifoldKind.INTER:
        return inter_jacobian(rho1, params)
    return intra_jacobian(rho1, params, branch)


# --- folds -------------------------------------------------------------------------

def _in_open_unit(roots_u, note: str) -> List[float]:
    out = []
    for u in roots_u:
        if abs(u) < 1e-12:
            warnings.warn(f"{note}: fold at the boundary rho1 = 0 is not reported",
                          BoundaryDegeneracyWarning, stacklevel=3)
        elif 0.0 < u < 1.0:
            out.append(math.sqrt(u))
    return out


def _inter_folds_closed(params: SystemParams) -> List[float]:
    d1, k1 = params.pop1.width, params.coupling.k1
    roots = []
    # lambda1 = 0  <=>  (k1/2) u^2 - (k1 + d1) u + (k1/2 - d1) = 0
    if k1 != 0.0:
        a, b, c = 0.5 * k1, -(k1 + d1), 0.5 * k1 - d1
        disc = b * b - 4 * a * c
        if disc >= 0:
            sq = math.sqrt(disc)
            # stable quadratic roots
            q = -0.5 * (b + math.copysign(sq, b))
            roots += [q / a] + ([c / q] if q != 0 else [])
        # lambda2 = 0  <=>  u = 1 - 2*d1/k1
        roots.append(1.0 - 2.0 * d1 / k1)
    return _in_open_unit(roots, "intercoupling manifold")


def _intra_folds_closed(params: SystemParams) -> List[float]:
    # Omega = 0: only lambda1 on the plus branch can vanish,
    # 4*D1*r^3 = |mu|*(1 - r^2)^2  <=>  -|mu| r^4 + 4 D1 r^3 + 2|mu| r^2 - |mu| = 0
    d1, m = params.pop1.width, abs(params.coupling.mu)
    if m == 0.0:
        return []
    roots = np.roots([-m, 4 * d1, 2 * m, 0.0, -m])
    real = [r.real for r in roots if abs(r.imag) < 1e-10 and 0.0 < r.real < 1.0]
    return real


def _extreme_real_parts(kind, rho1, params, branch):
    try:
        lo, hi = eigenvalues_2x2(_jacobian(kind, rho1, params, branch))
    except NoRealBranch:
        return math.nan, math.nan
    return lo.real, hi.real


def _numeric_folds(kind: ManifoldKind, params: SystemParams, branch: Branch,
                   grid: np.ndarray) -> List[float]:
    vals = np.array([_extreme_real_parts(kind, r, params, branch) for r in grid])
    folds = []
    for col in range(2):
        f = vals[:, col]
        for i in range(len(grid) - 1):
            a, b = f[i], f[i + 1]
            if not (np.isfinite(a) and np.isfinite(b)):
                continue
            if a == 0.0:
                folds.append(float(grid[i]))
            elif a * b < 0:
                g = lambda r: _extreme_real_parts(kind, r, params, branch)[col]
                folds.append(brentq(g, grid[i], grid[i + 1], xtol=1e-14))
        if f[-1] == 0.0:
            folds.append(float(grid[-1]))
    return folds


def fold_points(params: SystemParams, system: ManifoldKind, branch: Optional[Branch] = None,
                grid: Optional[np.ndarray] = None) -> np.ndarray:
    """rho1 values in (0, 1) where a fast eigenvalue's real part crosses zero.

    Omega = 0 uses the closed-form loci; otherwise a grid scan brackets sign
    changes of the extreme real parts and refines them with Brent's method.
    For the intracoupling manifold, ``branch=None`` merges both branches.
    """
    kind = ManifoldKind(system)
    grid = default_grid() if grid is None else grid
    if params.omega_diff == 0.0:
        if kind is ManifoldKind.INTER:
            pts = _inter_folds_closed(params)
        elif branch is None or Branch(branch) is Branch.PLUS:
            pts = _intra_folds_closed(params)
        else:
            pts = []
    else:
        branches = [Branch.PLUS] if kind is ManifoldKind.INTER else (
            [Branch.PLUS, Branch.MINUS] if branch is None else [Branch(branch)])
        pts = [p for b in branches for p in _numeric_folds(kind, params, b, grid)]
    pts = sorted(set(round(p, 13) for p in pts))
    return np.array(pts, dtype=float)


def stability_report(params: SystemParams, system: ManifoldKind, branch: Branch = Branch.PLUS,
                     grid: Optional[np.ndarray] = None, tol_h: float = TOL_H) -> StabilityReport:
    kind = ManifoldKind(system)
    branch = Branch(branch)
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    samples, gaps = [], []
    for r in grid:
        try:
            samples.append(manifold_sample(kind, float(r), params, branch, tol_h))
        except NoRealBranch:
            gaps.append(float(r))
    folds = fold_points(params, kind, branch, grid)
    lo, hi = grid[0], grid[-1]
    folds_in = folds[(folds >= lo) & (folds <= hi)]
    hyperbolic = (len(folds_in) == 0 and not gaps
                  and all(s.stability is not Stability.NON_HYPERBOLIC for s in samples))
    return StabilityReport(kind, samples, folds, hyperbolic, gaps)


# --- equilibria of the slow flow on the manifold ------------------------------------

@dataclass(frozen=True)
class ChimeraEquilibrium:
    rho1: float
    coupling: float
    psi: float
    branch: Branch
    eigenvalues: Tuple[complex, complex]
    fast_stability: Stability
    crossing_slope: float        # d/drho1 [nullcline - manifold]
    slow_eigenvalue: float       # linearised reduced slow flow in the coupling variable
    slow_stable: bool


def _branch_value(kind, rho1, params, branch) -> float:
    try:
        return manifold_sample(kind, rho1, params, branch).coupling_value
    except NoRealBranch:
        return math.nan


def chimera_equilibrium(params: SystemParams, law: AdaptiveLawSpec, system: ManifoldKind,
                        branch: Branch = Branch.PLUS, grid: Optional[np.ndarray] = None
                        ) -> Optional[List[ChimeraEquilibrium]]:
    """Intersections of the law's nullcline with one manifold branch.

    Returns every bracketed root on the grid, or None when the difference
    never changes sign. Only laws of the form ``eps*(N(rho1) - coupling)``
    (linear feedback) have a nullcline.
    """
    kind = ManifoldKind(system)
    branch = Branch(branch)
    nc = nullcline(law)
    if nc.func is None:
        raise ValueError("law has no autonomous nullcline; equilibria are undefined")
    grid = np.linspace(GRID_LO, GRID_HI, GRID_POINTS) if grid is None else grid

    def gap(r):
        return nc(r) - _branch_value(kind, r, params, branch)

    vals = np.array([gap(float(r)) for r in grid])
    roots = []
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if not (np.isfinite(a) and np.isfinite(b)):
            continue
        if a == 0.0:
            roots.append(float(grid[i]))
        elif a * b < 0:
            roots.append(brentq(gap, grid[i], grid[i + 1], xtol=1e-15, rtol=1e-14))
    if np.isfinite(vals[-1]) and vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    if not roots:
        return None

    out = []
    for r in roots:
        s = manifold_sample(kind, r, params, branch)
        step = 1e-6 * min(r, 1 - r)
        m_slope = (_branch_value(kind, r + step, params, branch)
                   - _branch_value(kind, r - step, params, branch)) / (2 * step)
        n_slope = (nc(r + step) - nc(r - step)) / (2 * step)
        slow = law.epsilon * (n_slope - m_slope) / m_slope if m_slope != 0 else math.nan
        out.append(ChimeraEquilibrium(r, s.coupling_value, s.psi, branch, s.eigenvalues,
                                      s.stability, n_slope - m_slope, slow,
                                      bool(slow < 0)))
    return out


def sync_coefficient(k2: float, mu: float, rho1: float, psi: float) -> float:
    """First-order coefficient a in rho2 = 1 - a*Delta2 + O(Delta2^2)."""
    denom = k2 + mu * rho1 * math.cos(psi)
    if denom == 0.0:
        raise ZeroDivisionError("k2 + mu*rho1*cos(psi) vanishes; coefficient undefined")
    if abs(k2) < abs(mu):
        warnings.warn("|k2| >= |mu| fails; positivity of the coefficient is not guaranteed",
                      RuntimeWarning, stacklevel=2)
    return 1.0 / denom
