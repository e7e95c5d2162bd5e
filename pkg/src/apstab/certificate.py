"""Exponential-stability certificates ``(xi, beta, eta)``.

For a rate ``beta`` the uniform criterion asks for ``xi > 0`` with, in every
row ``i``,

    -(d_i - beta) xi_i + sum_j |a*_ij| G_j xi_j
                       + sum_j F_j xi_j exp(beta tau*_ij) kappa_ij(beta) < 0,

where ``kappa_ij(beta)`` is the exponentially weighted kernel moment.
Dividing row ``i`` by ``d_i - beta`` turns this into ``B(beta) xi < xi`` for a
nonnegative comparison matrix ``B``; such a ``xi`` exists iff the Perron root
of ``B`` is below one, and then ``xi = (I - B)^{-1} 1`` is a witness.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, InfeasibleError, SpectralConvergenceError
from .model import BoundsSummary, NetworkModel, derive_bounds, kernel_moment_at

log = logging.getLogger(__name__)

__all__ = [
    "ComparisonMatrix",
    "StabilityCertificate",
    "BoundednessCertificate",
    "PointwiseReport",
    "BruteForceResult",
    "criterion_lhs",
    "build_comparison_matrix",
    "spectral_radius",
    "certify_at_beta",
    "maximize_beta",
    "certify_lemma1",
    "check_pointwise_criterion",
    "brute_force_feasibility",
]

REDUCIBLE_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class ComparisonMatrix:
    beta: float
    entries: np.ndarray


@dataclass(frozen=True)
class StabilityCertificate:
    """Witness for the uniform criterion.

    ``xi`` is max-normalized, ``eta`` the smallest row slack at ``(xi, beta)``.
    """

    xi: tuple
    beta: float
    eta: float
    method: str = "spectral"
    rho: Optional[float] = None
    pointwise_checked: bool = False
    pointwise_min_slack: Optional[float] = None

    @property
    def xi_array(self) -> np.ndarray:
        return np.asarray(self.xi, dtype=float)

    def to_dict(self) -> dict:
        return {"feasible": True, "xi": list(self.xi), "beta": self.beta, "eta": self.eta,
                "method": self.method, "rho": self.rho,
                "pointwise_checked": self.pointwise_checked,
                "pointwise_min_slack": self.pointwise_min_slack}


def _check_domain(bounds: BoundsSummary, beta: float):
    if beta < 0:
        raise DomainError(f"beta must be nonnegative, got {beta}")
    if beta >= bounds.d_inf.min():
        raise DomainError(f"beta={beta} >= min self-inhibition {bounds.d_inf.min()}")
    if beta >= bounds.min_decay:
        raise DomainError(f"beta={beta} >= min kernel decay {bounds.min_decay}")


def _coupling(bounds: BoundsSummary, beta: float) -> np.ndarray:
    """``|a*_ij| G_j + F_j exp(beta tau*_ij) kappa_ij(beta)``."""
    return (bounds.a_sup * bounds.G[None, :]
            + bounds.F[None, :] * np.exp(beta * bounds.tau_sup) * bounds.kappa(beta))


def criterion_lhs(bounds: BoundsSummary, xi, beta: float) -> np.ndarray:
    """Left-hand side of the uniform criterion, one entry per row (negative = satisfied)."""
    xi = np.asarray(xi, dtype=float)
    return -(bounds.d_inf - beta) * xi + _coupling(bounds, beta) @ xi


def build_comparison_matrix(bounds: BoundsSummary, beta: float) -> ComparisonMatrix:
    _check_domain(bounds, beta)
    entries = _coupling(bounds, beta) / (bounds.d_inf - beta)[:, None]
    return ComparisonMatrix(float(beta), entries)


# ---------------------------------------------------------------------------
# Perron root
# ---------------------------------------------------------------------------

def _charpoly_root(m: np.ndarray) -> float:
    """Largest real root of the characteristic polynomial, n <= 3."""
    n = m.shape[0]
    tr = np.trace(m)
    if n == 1:
        return float(m[0, 0])
    if n == 2:
        coeffs = [1.0, -tr, np.linalg.det(m)]
    else:
        minors = (m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
                  + m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]
                  + m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        coeffs = [1.0, -tr, minors, -np.linalg.det(m)]
    roots = np.roots(coeffs)
    scale = max(1.0, float(np.abs(roots).max()))
    real = roots[np.abs(roots.imag) <= 1e-8 * scale].real
    return float(real.max())


def spectral_radius(m, tol: float = 1e-10, max_iter: int = 20000) -> float:
    """Perron root of a nonnegative square matrix.

    Shifted power iteration from the all-ones vector; stops when the
    Collatz-Wielandt bracket ``min_i (Ax)_i/x_i <= rho <= max_i (Ax)_i/x_i``
    is relatively narrower than ``tol``.  Matrices with zero entries get
    ``1e-12`` added everywhere so the iteration cannot stall on reducible
    structure.

    Raises
    ------
    SpectralConvergenceError
        The bracket did not close within ``max_iter`` and ``n > 3`` (for
        ``n <= 3`` the characteristic polynomial is used instead).
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("spectral_radius needs a square matrix")
    if np.any(m < 0):
        raise ValueError("spectral_radius needs a nonnegative matrix")
    n = m.shape[0]
    if n == 1:
        return float(m[0, 0])
    a = m + REDUCIBLE_EPS if np.any(m == 0) else m
    x = np.ones(n)
    y = a @ x
    shift = 0.5 * (y.min() + y.max())
    for _ in range(max_iter):
        y = a @ x
        ratios = y / x
        lo, hi = ratios.min(), ratios.max()
        if hi - lo <= tol * hi:
            return float(0.5 * (lo + hi))
        x = y + shift * x
        x /= x.max()
    if n <= 3:
        log.debug("power iteration did not converge; using characteristic polynomial")
        return _charpoly_root(m)
    raise SpectralConvergenceError(
        f"Perron bracket [{lo:.3g}, {hi:.3g}] still open after {max_iter} iterations")


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

def certify_at_beta(bounds: BoundsSummary, beta: float) -> Optional[StabilityCertificate]:
    """Certificate at rate ``beta``, or ``None`` when the criterion is infeasible there."""
    cm = build_comparison_matrix(bounds, beta)
    n = bounds.n
    try:
        rho = spectral_radius(cm.entries)
    except SpectralConvergenceError:
        # fall through to the M-matrix test: (I - B) xi = 1 with xi > 0 iff rho < 1
        rho = None
    if rho is not None and rho >= 1.0:
        return None
    try:
        xi = np.linalg.solve(np.eye(n) - cm.entries, np.ones(n))
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(xi)) or np.any(xi <= 0):
        return None
    xi = xi / xi.max()
    eta = float(-criterion_lhs(bounds, xi, beta).max())
    if not eta > 0:
        return None
    return StabilityCertificate(tuple(float(v) for v in xi), float(beta), eta, "spectral",
                                None if rho is None else float(rho))


def beta_cap(bounds: BoundsSummary) -> float:
    """Supremum of admissible rates: ``min(min_i d_i, min kernel decay)``."""
    return float(min(bounds.d_inf.min(), bounds.min_decay))


def maximize_beta(bounds: BoundsSummary, tol: float = 1e-6, max_iter: int = 200
                  ) -> StabilityCertificate:
    """Bisect for the largest certifiable rate.

    Raises :class:`InfeasibleError` when no certificate exists even at ``beta = 0``.
    """
    best = certify_at_beta(bounds, 0.0)
    if best is None:
        raise InfeasibleError("criterion infeasible at beta=0")
    cap = beta_cap(bounds)
    hi = cap * (1.0 - 64 * np.finfo(float).eps)
    top = certify_at_beta(bounds, hi)
    if top is not None:
        log.debug("criterion holds up to the cap beta=%.6g", hi)
        return top
    lo = 0.0
    for it in range(max_iter):
        if hi - lo <= tol:
            log.debug("bisection converged after %d probes: beta in [%.9g, %.9g]", it, lo, hi)
            break
        mid = 0.5 * (lo + hi)
        cert = certify_at_beta(bounds, mid)
        if cert is None:
            hi = mid
        else:
            lo, best = mid, cert
    return best


@dataclass(frozen=True)
class BoundednessCertificate:
    """Slack at rate zero and the resulting ultimate bound ``2 * i_hat / eta``."""

    eta: float
    i_hat: float
    bound: Optional[float]

    @property
    def holds(self) -> bool:
        return self.bound is not None


def certify_lemma1(bounds: BoundsSummary, xi) -> BoundednessCertificate:
    xi = np.asarray(xi, dtype=float)
    if np.any(xi <= 0):
        raise ValueError("xi must be strictly positive")
    coupling = bounds.a_sup * bounds.G[None, :] + bounds.F[None, :] * bounds.kappa(0.0)
    eta = float(np.min(bounds.d_inf * xi - coupling @ xi))
    bound = 2.0 * bounds.i_hat / eta if eta > 0 else None
    return BoundednessCertificate(eta, bounds.i_hat, bound)


@dataclass
class PointwiseReport:
    min_slack: float
    t_at_min: float
    row_at_min: int
    slacks: np.ndarray
    certificate: StabilityCertificate


def check_pointwise_criterion(model: NetworkModel, cert: StabilityCertificate, grid
                              ) -> PointwiseReport:
    """Sampled audit of the time-dependent criterion along ``grid``.

    Uses the instantaneous ``d_i(t)``, ``|a_ij(t)|`` and kernel weights with the
    uniform delay bound ``tau*``.  This samples; it proves nothing between
    grid points.  The returned certificate is marked as audited.
    """
    t = np.atleast_1d(np.asarray(grid, dtype=float))
    n = model.n
    xi = cert.xi_array
    beta = cert.beta
    G = np.array([s.lipschitz_bound for s in model.g])
    F = np.array([s.lipschitz_bound for s in model.f])
    lhs = np.empty((t.size, n))
    for i in range(n):
        row = -(model.d[i](t) - beta) * xi[i]
        for j in range(n):
            tau_star = max(model.tau[i][j].upper_bound(), 0.0)
            row = row + np.abs(model.a[i][j](t)) * G[j] * xi[j]
            row = row + F[j] * xi[j] * math.exp(beta * tau_star) * kernel_moment_at(
                model.kernels[i][j], beta, t)
        lhs[:, i] = row
    slacks = -lhs
    k, i = np.unravel_index(int(np.argmin(slacks)), slacks.shape)
    min_slack = float(slacks[k, i])
    audited = dataclasses.replace(cert, pointwise_checked=True, pointwise_min_slack=min_slack)
    return PointwiseReport(min_slack, float(t[k]), int(i), slacks, audited)


def certify_model(model: NetworkModel, tol: float = 1e-6, grid=None):
    """Bounds, maximal-rate certificate and pointwise audit in one call."""
    bounds = derive_bounds(model)
    cert = maximize_beta(bounds, tol=tol)
    if grid is None:
        grid = np.linspace(0.0, 200.0, 4001)
    report = check_pointwise_criterion(model, cert, grid)
    return bounds, report.certificate, report


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------

@dataclass
class BruteForceResult:
    feasible: bool
    xi: np.ndarray
    best_ratio: float


def brute_force_feasibility(bounds: BoundsSummary, beta: float, resolution: int = 20,
                            levels: int = 120, samples: int = 400, seed: int = 0
                            ) -> BruteForceResult:
    """Search for ``xi`` in the positive unit box satisfying every row strictly.

    A uniform grid with ``resolution`` points per axis seeds a shrinking
    random search in log-coordinates.  The objective is the worst row of the
    criterion normalized by ``(d_i - beta) xi_i``; it is convex in ``log xi``,
    so the search cannot get trapped.  Only meant for ``n <= 4``.
    """
    n = bounds.n
    if n > 4:
        raise ValueError("brute-force search is limited to n <= 4")
    scale = bounds.d_inf - beta
    coupling = _coupling(bounds, beta)

    def objective(xs):
        # row-wise criterion for a batch of candidates, xs: (m, n)
        lhs = -scale * xs + xs @ coupling.T
        return np.max(lhs / (scale * xs), axis=1)

    axis = np.arange(1, resolution + 1) / resolution
    mesh = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)
    vals = objective(mesh)
    k = int(np.argmin(vals))
    best_x, best = mesh[k].copy(), float(vals[k])
    rng = np.random.default_rng(seed)
    y = np.log(best_x)
    width = 1.0
    for _ in range(levels):
        if best < 0:
            break
        cand = y + width * rng.uniform(-1.0, 1.0, size=(samples, n))
        cand -= cand.max(axis=1, keepdims=True)  # keep inside the unit box
        vals = objective(np.exp(cand))
        k = int(np.argmin(vals))
        if vals[k] < best:
            best, y = float(vals[k]), cand[k]
        width *= 0.85
    xi = np.exp(y - y.max())
    return BruteForceResult(bool(best < 0), xi, best + 1.0)
