"""Diagnostics on simulated trajectories: weighted norms, decay fits, bounds, shift defects."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import optimize

from .errors import InsufficientDataError
from .integrator import Trajectory
from .model import NetworkModel

__all__ = [
    "DecayReport",
    "BoundednessReport",
    "weighted_norm",
    "trajectory_distance",
    "fit_exponential_rate",
    "boundedness_check",
    "almost_period_defect",
    "defect_settling_time",
    "transient_length",
    "solve_equilibrium",
]


def weighted_norm(x, xi) -> np.ndarray | float:
    """``max_i |x_i| / xi_i``; works row-wise on a 2-D array of states."""
    xi = np.asarray(xi, dtype=float)
    if np.any(xi <= 0):
        raise ValueError("weights must be strictly positive")
    x = np.asarray(x, dtype=float)
    out = np.max(np.abs(x) / xi, axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def trajectory_distance(a: Trajectory, b: Trajectory, xi) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise ``||a(t) - b(t)||`` in the weighted max-norm on the shared grid."""
    if a.times.shape != b.times.shape or not np.allclose(a.times, b.times, rtol=0, atol=1e-12):
        raise ValueError("trajectories are recorded on different grids")
    return a.times.copy(), weighted_norm(a.states - b.states, xi)


@dataclass
class DecayReport:
    """Log-linear fit ``log value ~ intercept - rate * t`` over ``window``."""

    rate: float
    intercept: float
    r_squared: float
    window: tuple
    series_floor: float
    n_used: int
    n_excluded: int

    def to_dict(self) -> dict:
        return {"rate": self.rate, "intercept": self.intercept, "r_squared": self.r_squared,
                "window": list(self.window), "series_floor": self.series_floor,
                "n_used": self.n_used, "n_excluded": self.n_excluded}


def fit_exponential_rate(times, values, window, floor: float = 1e-10) -> DecayReport:
    """Least-squares fit of ``log(values)`` against ``times`` inside ``window``.

    Points at or below ``floor`` are dropped (and counted).  The intercept is
    the fitted log-value at ``t = 0``.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if np.any(y < 0):
        raise ValueError("series must be nonnegative")
    t0, t1 = window
    if t0 < t[0] - 1e-12 or t1 > t[-1] + 1e-12:
        raise ValueError(f"window {window} outside series range [{t[0]}, {t[-1]}]")
    inside = (t >= t0 - 1e-12) & (t <= t1 + 1e-12)
    usable = inside & (y > floor)
    n_used = int(usable.sum())
    if n_used < 5:
        raise InsufficientDataError(f"only {n_used} points above floor {floor} in {window}")
    tt, ly = t[usable], np.log(y[usable])
    slope, intercept = np.polyfit(tt, ly, 1)
    resid = ly - (slope * tt + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    ss_res = float(np.sum(resid ** 2))
    r2 = 1.0 if ss_tot <= 1e-300 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return DecayReport(float(-slope) + 0.0, float(intercept), r2, (float(t0), float(t1)),
                       float(y[usable].min()), n_used, int(inside.sum()) - n_used)


def _with_midpoints(traj: Trajectory, t_lo: float, t_hi: float) -> np.ndarray:
    t = traj.times
    grid = t[(t >= t_lo - 1e-12) & (t <= t_hi + 1e-12)]
    mids = 0.5 * (grid[1:] + grid[:-1])
    return np.sort(np.concatenate([grid, mids]))


@dataclass
class BoundednessReport:
    passed: bool
    worst_margin: float
    bound: float
    initial_max: float
    times: np.ndarray
    running_max: np.ndarray

    def to_dict(self) -> dict:
        return {"passed": self.passed, "worst_margin": self.worst_margin, "bound": self.bound,
                "initial_max": self.initial_max, "final_running_max": float(self.running_max[-1])}


def boundedness_check(traj: Trajectory, xi, i_hat: float, eta: float, tol: float = 0.0,
                      history=None) -> BoundednessReport:
    """Check the running max of ``||u||`` against ``max(M(0), 2 * i_hat / eta) + tol``.

    ``M(0)`` includes the sampled history when one is given.  Grid midpoints
    are evaluated through the dense output.
    """
    if not eta > 0:
        raise ValueError("eta must be positive")
    t = _with_midpoints(traj, traj.times[0], traj.times[-1])
    norms = weighted_norm(traj(t), xi)
    m0 = float(norms[0])
    if history is not None:
        m0 = max(m0, history.sup_weighted(xi))
    running = np.maximum.accumulate(np.maximum(norms, m0))
    bound = max(m0, 2.0 * i_hat / eta)
    margins = bound + tol - running
    return BoundednessReport(bool(margins.min() >= 0), float(margins.min()), float(bound), m0,
                             t, running)


def almost_period_defect(traj: Trajectory, omega: float, window, xi) -> float:
    """Sup over ``t`` in ``window`` (grid plus midpoints) of ``||u(t + omega) - u(t)||``."""
    t0, t1 = window
    if t0 < traj.times[0] - 1e-12 or t1 + omega > traj.t_end + 1e-9:
        raise ValueError(f"window {window} shifted by {omega} leaves the recorded range")
    t = _with_midpoints(traj, t0, t1)
    return float(np.max(weighted_norm(traj(t + omega) - traj(t), xi)))


def defect_settling_time(traj: Trajectory, omega: float, epsilon: float, xi,
                         start: float = 0.0) -> Optional[float]:
    """Earliest grid time after which the shift defect stays below ``epsilon``.

    ``None`` when the defect is still above ``epsilon`` at the end of the usable range.
    """
    t = traj.times[(traj.times >= start) & (traj.times + omega <= traj.t_end + 1e-9)]
    if t.size == 0:
        return None
    d = weighted_norm(traj(t + omega) - traj(t), xi)
    bad = np.flatnonzero(d >= epsilon)
    if bad.size == 0:
        return float(t[0])
    if bad[-1] == t.size - 1:
        return None
    return float(t[bad[-1] + 1])


def transient_length(beta: float, tau_max: float) -> float:
    """Burn-in before a trajectory stands in for the almost-periodic attractor."""
    return max(10.0 / beta if beta > 0 else math.inf, 5.0 * tau_max)


def solve_equilibrium(model: NetworkModel, guess=None) -> tuple[np.ndarray, float]:
    """Root of the algebraic system of an autonomous model; returns ``(u*, residual)``.

    Delays drop out at an equilibrium, so each kernel acts through its total mass.
    """
    if not model.is_autonomous:
        raise ValueError("equilibrium only defined for constant-coefficient models")
    n = model.n
    d = np.array([s.offset for s in model.d])
    A = np.array([[s.offset for s in row] for row in model.a])
    M = np.array([[k.total_mass() for k in row] for row in model.kernels])
    I = np.array([s.offset for s in model.inputs])

    def F(u):
        gu = np.array([model.g[j](u[j]) for j in range(n)])
        fu = np.array([model.f[j](u[j]) for j in range(n)])
        return -d * u + A @ gu + M @ fu + I

    x0 = np.zeros(n) if guess is None else np.asarray(guess, dtype=float)
    sol = optimize.root(F, x0, tol=1e-14)
    return sol.x, float(np.max(np.abs(F(sol.x))))
