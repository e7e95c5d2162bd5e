"""Independent reference computations used by the test-suite.

Nothing here imports the certificate or integrator internals: every oracle is
derived from first principles (closed forms, exact rationals, scipy quadrature)
so that agreement with the library is evidence rather than tautology.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy import integrate


def charpoly_spectral_radius(m) -> float:
    """Largest root modulus of the characteristic polynomial (Faddeev-LeVerrier)."""
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    coeffs = [1.0]
    mk = np.zeros_like(m)
    eye = np.eye(n)
    for k in range(1, n + 1):
        mk = m @ mk + coeffs[-1] * eye
        coeffs.append(-np.trace(m @ mk) / k)
    return float(np.max(np.abs(np.roots(coeffs))))


def criterion_rows(d, a_sup, G, F, tau_sup, kappa, xi, beta) -> np.ndarray:
    """Row-wise left side of the uniform stability inequality, written out longhand."""
    n = len(d)
    out = np.empty(n)
    for i in range(n):
        acc = -(d[i] - beta) * xi[i]
        for j in range(n):
            acc += a_sup[i][j] * G[j] * xi[j]
            acc += F[j] * xi[j] * math.exp(beta * tau_sup[i][j]) * kappa[i][j]
        out[i] = acc
    return out


def bisect(fn, lo: float, hi: float, tol: float = 1e-13) -> float:
    """Sign-change root of a scalar function on ``[lo, hi]``."""
    flo = fn(lo)
    if flo == 0:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def scalar_distributed_rate() -> float:
    """Best rate of the scalar model d=2, a=0.5, kernel 0.5 * 2 e^{-2s}."""
    return bisect(lambda b: -(2.0 - b) + 0.5 + 1.0 / (2.0 - b), 0.0, 1.999)


def envelope_moment_quad(atoms, densities, beta: float) -> float:
    """``int_0^inf e^{beta s} |dK(s)|`` by adaptive quadrature plus a checked tail.

    ``atoms``: (lag, |weight|_sup) pairs; ``densities``: (|coef|_sup, p, q, lambda).
    """
    total = math.fsum(w * math.exp(beta * lag) for lag, w in atoms)
    for c, p, q, lam in densities:
        rate = lam - beta

        def g(s):
            return c * abs(p) * s ** q * math.exp(-rate * s)

        cut = (60.0 + 3.0 * q) / rate
        # split at the mode so quad resolves the bump
        mode = q / rate
        body = 0.0
        edges = [0.0] + [e for e in (mode, 4 * mode + 1 / rate) if 0 < e < cut] + [cut]
        for lo, hi in zip(edges[:-1], edges[1:]):
            body += integrate.quad(g, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        tail = integrate.quad(g, cut, np.inf, epsabs=1e-16)[0]
        assert tail < 1e-12
        total += body + tail
    return total


def delay_pieces(horizon: int):
    """Exact solution of ``u' = -u(t-1)`` with history 1, by the method of steps.

    Returns rational coefficients of the piece on ``[k-1, k]`` in the local
    variable ``x = t - (k-1)``; piece 0 is the history.
    """
    pieces = [[Fraction(1)]]
    for k in range(1, horizon + 1):
        prev = pieces[-1]
        start = sum(prev) if k > 1 else Fraction(1)
        pieces.append([start] + [-c / (i + 1) for i, c in enumerate(prev)])
    return pieces


def delay_exact(times, pieces) -> np.ndarray:
    out = []
    for t in np.asarray(times, dtype=float):
        if t <= 0:
            out.append(1.0)
            continue
        k = max(1, int(math.ceil(t - 1e-12)))
        x = Fraction(t).limit_denominator(10 ** 9) - (k - 1)
        out.append(float(sum(c * x ** i for i, c in enumerate(pieces[k]))))
    return np.array(out)


def damped_fixed_point(d, a, masses, inputs, g, f, damping: float = 0.5,
                       tol: float = 1e-15, max_iter: int = 100000) -> np.ndarray:
    """Equilibrium ``u = (A g(u) + M f(u) + I) / d`` by damped Picard iteration."""
    d, a, masses, inputs = (np.asarray(x, dtype=float) for x in (d, a, masses, inputs))
    u = np.zeros_like(d)
    for _ in range(max_iter):
        target = (a @ g(u) + masses @ f(u) + inputs) / d
        nxt = (1 - damping) * u + damping * target
        if np.max(np.abs(nxt - u)) < tol:
            return nxt
        u = nxt
    raise RuntimeError("fixed-point iteration did not converge")
