"""Coefficient signals, delay kernels, activations and the network model.

Every time-varying coefficient of the network is a finite trigonometric sum
(``QuasiPeriodicSignal``).  Such sums are almost periodic by construction, so
the almost-periodicity hypotheses on the coefficients hold automatically, and
their suprema admit the cheap rigorous envelope ``offset +/- sum|amp|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import AssumptionError, KernelDivergenceError, ModelError

__all__ = [
    "QuasiPeriodicSignal",
    "Atom",
    "Density",
    "DelayKernel",
    "ActivationSpec",
    "NetworkModel",
    "BoundsSummary",
    "ScanConfig",
    "ActivationReport",
    "AssumptionItem",
    "AssumptionReport",
    "as_signal",
    "eval_signal",
    "signal_bounds",
    "signal_defect",
    "find_almost_period",
    "validate_activation",
    "kernel_moment",
    "derive_bounds",
    "from_discrete_delays",
    "from_distributed_delays",
    "validate_assumptions",
]


# ---------------------------------------------------------------------------
# signals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuasiPeriodicSignal:
    """``offset + sum_k amp_k * sin(freq_k * t + phase_k)``.

    ``terms`` is a tuple of ``(amplitude, angular_frequency, phase)`` triples;
    every angular frequency must be strictly positive.
    """

    offset: float = 0.0
    terms: tuple = ()

    def __post_init__(self):
        terms = tuple((float(a), float(w), float(p)) for a, w, p in self.terms)
        for _, w, _ in terms:
            if not (w > 0.0 and math.isfinite(w)):
                raise ModelError(f"angular frequency must be positive, got {w}")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def constant(cls, value: float) -> "QuasiPeriodicSignal":
        return cls(float(value), ())

    @property
    def is_constant(self) -> bool:
        return all(a == 0.0 for a, _, _ in self.terms)

    @property
    def is_zero(self) -> bool:
        return self.offset == 0.0 and self.is_constant

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, self.offset)
        for a, w, p in self.terms:
            out = out + a * np.sin(w * t + p)
        return out if out.ndim else float(out)

    def lower_bound(self) -> float:
        return self.offset - math.fsum(abs(a) for a, _, _ in self.terms)

    def upper_bound(self) -> float:
        return self.offset + math.fsum(abs(a) for a, _, _ in self.terms)

    def sup_abs(self) -> float:
        """Rigorous bound on ``sup_t |value(t)|``."""
        return max(abs(self.lower_bound()), abs(self.upper_bound()))


def as_signal(value) -> QuasiPeriodicSignal:
    """Coerce a number, a signal, or a ``{offset, terms}`` mapping to a signal."""
    if isinstance(value, QuasiPeriodicSignal):
        return value
    if isinstance(value, dict):
        terms = []
        for term in value.get("terms", ()):
            if isinstance(term, dict):
                terms.append((term["amp"], term["freq"], term.get("phase", 0.0)))
            else:
                terms.append(tuple(term))
        return QuasiPeriodicSignal(value.get("offset", 0.0), tuple(terms))
    if isinstance(value, (int, float, np.floating, np.integer)):
        return QuasiPeriodicSignal.constant(float(value))
    raise ModelError(f"cannot interpret {value!r} as a signal")


def eval_signal(sig: QuasiPeriodicSignal, t):
    return sig(t)


def signal_bounds(sig: QuasiPeriodicSignal) -> tuple[float, float]:
    return sig.lower_bound(), sig.upper_bound()


# ---------------------------------------------------------------------------
# almost-period scan
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScanConfig:
    """Resolution of the epsilon-almost-period scan.

    ``audit_window`` is the stretch of ``t`` over which the shift defect is
    sampled, ``audit_points`` the number of samples in it, ``resolution`` the
    spacing of candidate shifts.
    """

    audit_window: tuple = (0.0, 1000.0)
    audit_points: int = 4000
    resolution: float = 1e-2
    chunk: int = 256


def _flatten_terms(sigs):
    amps, freqs, phases, owner = [], [], [], []
    for k, s in enumerate(sigs):
        for a, w, p in s.terms:
            if a != 0.0:
                amps.append(a)
                freqs.append(w)
                phases.append(p)
                owner.append(k)
    return (np.array(amps), np.array(freqs), np.array(phases),
            np.array(owner, dtype=int))


def signal_defect(sigs: Sequence[QuasiPeriodicSignal], omegas, t_audit) -> np.ndarray:
    """``max_sig max_t |sig(t + omega) - sig(t)|`` for each omega.

    Offsets cancel, so only the oscillating terms are evaluated.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    t_audit = np.asarray(t_audit, dtype=float)
    amps, freqs, phases, owner = _flatten_terms(sigs)
    out = np.zeros(omegas.shape)
    if amps.size == 0:
        return out
    # sin(w(t+om)+p) - sin(wt+p) = 2 cos(wt + p + w om/2) sin(w om/2)
    for k in np.unique(owner):
        sel = owner == k
        a, w, p = amps[sel], freqs[sel], phases[sel]
        half = 0.5 * omegas[:, None] * w[None, :]                    # (m, K)
        coef = 2.0 * a[None, :] * np.sin(half)                        # (m, K)
        arg = (w[None, None, :] * t_audit[None, :, None]
               + p[None, None, :] + half[:, None, :])                 # (m, T, K)
        diff = np.einsum("mtk,mk->mt", np.cos(arg), coef)
        out = np.maximum(out, np.abs(diff).max(axis=1))
    return out


def find_almost_period(sigs: Sequence[QuasiPeriodicSignal], epsilon: float,
                       search_interval: tuple, config: Optional[ScanConfig] = None
                       ) -> np.ndarray:
    """Grid shifts in ``search_interval`` that are epsilon-almost-periods of all ``sigs``.

    A candidate ``omega`` qualifies when the sampled sup over the audit window
    of ``|sig(t + omega) - sig(t)|`` is below ``epsilon`` for every signal.
    An empty array means no qualifying shift at this resolution.
    """
    cfg = config or ScanConfig()
    lo, hi = map(float, search_interval)
    if not hi > lo:
        raise ValueError("search interval must have positive length")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    # open interval: the trivial shift at lo = 0 is never reported
    count = int(math.floor((hi - lo) / cfg.resolution)) + 1
    omegas = lo + cfg.resolution * np.arange(1, count + 1)
    omegas = omegas[omegas < hi]
    t_audit = np.linspace(cfg.audit_window[0], cfg.audit_window[1], cfg.audit_points)
    coarse = t_audit[:: max(1, cfg.audit_points // 64)]

    keep = []
    for start in range(0, omegas.size, cfg.chunk):
        block = omegas[start:start + cfg.chunk]
        # a defect on a subset of the audit points already disqualifies
        block = block[signal_defect(sigs, block, coarse) < epsilon]
        if block.size:
            block = block[signal_defect(sigs, block, t_audit) < epsilon]
        keep.append(block)
    return np.concatenate(keep) if keep else np.empty(0)


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    """Point mass ``weight(t)`` at lag ``lag``."""

    lag: float
    weight: QuasiPeriodicSignal

    def __post_init__(self):
        if not self.lag >= 0.0:
            raise ModelError(f"atom lag must be nonnegative, got {self.lag}")
        object.__setattr__(self, "weight", as_signal(self.weight))


@dataclass(frozen=True)
class Density:
    """``coefficient(t) * scale * s**degree * exp(-decay * s) ds``."""

    coefficient: QuasiPeriodicSignal
    degree: int = 0
    scale: float = 1.0
    decay: float = 1.0

    def __post_init__(self):
        if not self.decay > 0.0:
            raise ModelError(f"density decay must be positive, got {self.decay}")
        if int(self.degree) != self.degree or self.degree < 0:
            raise ModelError(f"polynomial degree must be a nonnegative integer, got {self.degree}")
        object.__setattr__(self, "degree", int(self.degree))
        object.__setattr__(self, "coefficient", as_signal(self.coefficient))

    def envelope_moment(self, beta: float) -> float:
        # int_0^inf e^{beta s} |p| s^q e^{-lambda s} ds = |p| q! / (lambda - beta)^{q+1}
        rate = self.decay - beta
        return abs(self.scale) * math.factorial(self.degree) / rate ** (self.degree + 1)


@dataclass(frozen=True)
class DelayKernel:
    atoms: tuple = ()
    densities: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "densities", tuple(self.densities))

    @classmethod
    def zero(cls) -> "DelayKernel":
        return cls()

    @property
    def is_zero(self) -> bool:
        return not self.atoms and not self.densities

    @property
    def min_decay(self) -> float:
        return min((d.decay for d in self.densities), default=math.inf)

    @property
    def max_lag(self) -> float:
        return max((a.lag for a in self.atoms), default=0.0)

    def signals(self):
        return [a.weight for a in self.atoms] + [d.coefficient for d in self.densities]

    def total_mass(self, t: float = 0.0) -> float:
        """Signed mass ``int dK(t, s)`` at time ``t``."""
        mass = sum(a.weight(t) for a in self.atoms)
        mass += sum(d.coefficient(t) * d.scale * math.factorial(d.degree) / d.decay ** (d.degree + 1)
                    for d in self.densities)
        return float(mass)


def kernel_moment(kernel: DelayKernel, beta: float) -> float:
    """Closed form of ``int_0^inf e^{beta s} |dK(s)|`` for the time-independent envelope."""
    if kernel.densities and beta >= kernel.min_decay:
        raise KernelDivergenceError(
            f"moment diverges: beta={beta} >= smallest decay {kernel.min_decay}")
    parts = [a.weight.sup_abs() * math.exp(beta * a.lag) for a in kernel.atoms]
    parts += [d.coefficient.sup_abs() * d.envelope_moment(beta) for d in kernel.densities]
    return math.fsum(parts)


def kernel_moment_at(kernel: DelayKernel, beta: float, t) -> np.ndarray:
    """Time-``t`` version of :func:`kernel_moment` using ``|weight(t)|``."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    for a in kernel.atoms:
        out = out + np.abs(a.weight(t)) * math.exp(beta * a.lag)
    for d in kernel.densities:
        out = out + np.abs(d.coefficient(t)) * d.envelope_moment(beta)
    return out


# ---------------------------------------------------------------------------
# activations
# ---------------------------------------------------------------------------

ACTIVATION_KINDS = ("tanh", "pwl", "linear", "table")


@dataclass(frozen=True)
class ActivationSpec:
    """An activation together with its claimed Lipschitz constant.

    ``kind`` is one of ``tanh`` (``tanh(slope x)``), ``pwl`` (saturating
    ``clip(slope x, -1, 1)``), ``linear`` (``slope x``) or ``table``
    (piecewise-linear through ``table_x``/``table_y``, constant outside).
    ``offset`` is added to every kind.
    """

    kind: str = "tanh"
    lipschitz_bound: float = 1.0
    requires_monotone: bool = True
    slope: float = 1.0
    offset: float = 0.0
    table_x: tuple = ()
    table_y: tuple = ()

    def __post_init__(self):
        if self.kind not in ACTIVATION_KINDS:
            raise ModelError(f"unknown activation kind {self.kind!r}")
        if not self.lipschitz_bound > 0:
            raise ModelError("lipschitz_bound must be positive")
        if self.kind == "table":
            xs = tuple(float(x) for x in self.table_x)
            ys = tuple(float(y) for y in self.table_y)
            if len(xs) < 2 or len(xs) != len(ys) or any(np.diff(xs) <= 0):
                raise ModelError("table activation needs >= 2 strictly increasing abscissae")
            object.__setattr__(self, "table_x", xs)
            object.__setattr__(self, "table_y", ys)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "tanh":
            y = np.tanh(self.slope * x)
        elif self.kind == "pwl":
            y = np.clip(self.slope * x, -1.0, 1.0)
        elif self.kind == "linear":
            y = self.slope * x
        else:
            y = np.interp(x, self.table_x, self.table_y)
        y = y + self.offset
        return y if y.ndim else float(y)

    @property
    def at_zero(self) -> float:
        return float(self(0.0))

    @property
    def sup_abs(self) -> float:
        """Sup of ``|act(x)|`` over the real line (``inf`` when unbounded)."""
        if self.kind in ("tanh", "pwl"):
            return 1.0 + abs(self.offset) if self.slope != 0 else abs(self.offset)
        if self.kind == "table":
            return max(abs(y) for y in self.table_y)
        return abs(self.offset) if self.slope == 0 else math.inf


@dataclass
class ActivationReport:
    passed: bool
    lipschitz_ok: bool
    monotone_ok: bool
    max_quotient: float
    worst_pair: tuple
    monotone_violation: Optional[tuple] = None


def validate_activation(spec: ActivationSpec, grid=None, monotone: Optional[bool] = None,
                        rtol: float = 1e-9) -> ActivationReport:
    """Sampled check of the Lipschitz bound (and monotonicity) of an activation.

    ``grid`` is either an array of abscissae or a ``(half_width, points)``
    pair describing a symmetric uniform grid.  Consecutive difference quotients
    suffice: any chord slope is a convex combination of them.
    """
    if grid is None:
        grid = (10.0, 4001)
    if isinstance(grid, tuple) and len(grid) == 2 and not isinstance(grid[1], float):
        half, points = grid
        xs = np.linspace(-half, half, int(points))
    else:
        xs = np.sort(np.asarray(grid, dtype=float).ravel())
    if xs.size < 2:
        raise ValueError("validation grid needs at least two points")
    if monotone is None:
        monotone = spec.requires_monotone

    ys = np.asarray(spec(xs))
    dy = np.diff(ys)
    q = np.abs(dy) / np.diff(xs)
    k = int(np.argmax(q))
    lip_ok = bool(q[k] <= spec.lipschitz_bound * (1 + rtol))
    mono_ok = True
    violation = None
    if monotone:
        bad = np.flatnonzero(dy < -rtol * np.maximum(1.0, np.abs(ys[:-1])))
        if bad.size:
            mono_ok = False
            violation = (float(xs[bad[0]]), float(xs[bad[0] + 1]))
    return ActivationReport(lip_ok and mono_ok, lip_ok, mono_ok, float(q[k]),
                            (float(xs[k]), float(xs[k + 1])), violation)


# ---------------------------------------------------------------------------
# network model
# ---------------------------------------------------------------------------

def _square(rows, n, what, coerce):
    rows = list(rows)
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ModelError(f"{what} must be {n}x{n}")
    return tuple(tuple(coerce(v) for v in r) for r in rows)


def _vector(vals, n, what, coerce):
    vals = list(vals)
    if len(vals) != n:
        raise ModelError(f"{what} must have length {n}, got {len(vals)}")
    return tuple(coerce(v) for v in vals)


def _broadcast_specs(specs, n, what):
    if isinstance(specs, ActivationSpec):
        return (specs,) * n
    return _vector(specs, n, what, lambda s: s)


@dataclass(frozen=True)
class NetworkModel:
    """Delayed network ``du_i/dt = -d_i u_i + sum a_ij g_j(u_j) + sum int f_j(u_j(t - tau_ij - s)) dK_ij + I_i``.

    ``history`` is a :class:`~apstab.history.HistoryFunction`; ``None`` means
    the zero history.
    """

    n: int
    d: tuple
    a: tuple
    kernels: tuple
    tau: tuple
    inputs: tuple
    g: tuple
    f: tuple
    history: object = None
    name: str = "model"

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise ModelError("n must be positive")
        object.__setattr__(self, "d", _vector(self.d, n, "d", as_signal))
        object.__setattr__(self, "inputs", _vector(self.inputs, n, "inputs", as_signal))
        object.__setattr__(self, "a", _square(self.a, n, "a", as_signal))
        object.__setattr__(self, "tau", _square(self.tau, n, "tau", as_signal))
        object.__setattr__(self, "kernels", _square(self.kernels, n, "kernels", _as_kernel))
        object.__setattr__(self, "g", _broadcast_specs(self.g, n, "g"))
        object.__setattr__(self, "f", _broadcast_specs(self.f, n, "f"))
        if self.history is not None and getattr(self.history, "n", n) != n:
            raise ModelError(f"history dimension {self.history.n} != {n}")

    def coefficient_signals(self) -> list:
        """Every time-varying coefficient: d, a, I, tau and kernel weights."""
        sigs = list(self.d) + list(self.inputs)
        for i in range(self.n):
            for j in range(self.n):
                sigs.append(self.a[i][j])
                sigs.append(self.tau[i][j])
                sigs.extend(self.kernels[i][j].signals())
        return sigs

    @property
    def is_autonomous(self) -> bool:
        return all(s.is_constant for s in self.coefficient_signals())

    def max_delay(self) -> float:
        """``max tau* + max atom lag`` over all pairs (densities excluded)."""
        return max(max(self.tau[i][j].upper_bound(), 0.0) + self.kernels[i][j].max_lag
                   for i in range(self.n) for j in range(self.n))


def _as_kernel(k):
    if isinstance(k, DelayKernel):
        return k
    if k is None or k == 0:
        return DelayKernel.zero()
    raise ModelError(f"cannot interpret {k!r} as a delay kernel")


def _grid(x, n, what):
    """Accept a scalar (broadcast), a length-n vector, or an n x n nested list."""
    if isinstance(x, (int, float, QuasiPeriodicSignal, dict)):
        return [[x] * n for _ in range(n)]
    return x


def from_discrete_delays(d, a, b, tau, inputs, g, f, history=None, name="model") -> NetworkModel:
    """Network with a single lag-0 atom of weight ``b_ij(t)`` per pair (pure discrete delays).

    Pairs with ``b_ij`` identically zero get the zero kernel.
    """
    d = list(d)
    n = len(d)
    b = _square(_grid(b, n, "b"), n, "b", as_signal)
    kernels = [[DelayKernel() if b[i][j].is_zero else DelayKernel(atoms=(Atom(0.0, b[i][j]),))
                for j in range(n)] for i in range(n)]
    return NetworkModel(n, d, _grid(a, n, "a"), kernels, _grid(tau, n, "tau"), inputs,
                        g, f, history, name)


def from_distributed_delays(d, a, b, k_params, tau, inputs, g, f, history=None,
                            name="model") -> NetworkModel:
    """Network with ``dK_ij(t, s) = b_ij(t) k_ij(s) ds``.

    ``k_params[i][j]`` is ``(scale, degree, decay)`` describing
    ``k_ij(s) = scale * s**degree * exp(-decay s)``; a single triple is
    broadcast to every pair.
    """
    d = list(d)
    n = len(d)
    b = _square(_grid(b, n, "b"), n, "b", as_signal)
    if len(k_params) == 3 and all(isinstance(v, (int, float)) for v in k_params):
        k_params = [[tuple(k_params)] * n for _ in range(n)]
    k_params = _square(k_params, n, "k_params", tuple)
    kernels = []
    for i in range(n):
        row = []
        for j in range(n):
            scale, degree, decay = k_params[i][j]
            if not decay > 0:
                raise ModelError(f"k_params[{i}][{j}]: decay must be positive, got {decay}")
            if b[i][j].is_zero:
                row.append(DelayKernel())
            else:
                row.append(DelayKernel(densities=(Density(b[i][j], degree, scale, decay),)))
        kernels.append(row)
    return NetworkModel(n, d, _grid(a, n, "a"), kernels, _grid(tau, n, "tau"), inputs,
                        g, f, history, name)


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BoundsSummary:
    """Uniform scalar bounds consumed by the certificate search.

    ``d_inf`` lower bounds of self-inhibition, ``a_sup`` and ``tau_sup`` sups of
    instantaneous weights and delays, ``G``/``F`` Lipschitz constants,
    ``kernels`` for evaluating exponential moments, ``i_hat`` the aggregate
    input/offset constant of the boundedness estimate.
    """

    d_inf: np.ndarray
    a_sup: np.ndarray
    tau_sup: np.ndarray
    G: np.ndarray
    F: np.ndarray
    kernels: tuple
    i_hat: float = 0.0
    i_sup: Optional[np.ndarray] = None
    g0: Optional[np.ndarray] = None
    f0: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return int(self.d_inf.size)

    @property
    def b_sup(self) -> np.ndarray:
        return self.kappa(0.0)

    @property
    def min_decay(self) -> float:
        return min(k.min_decay for row in self.kernels for k in row)

    def kappa(self, beta: float) -> np.ndarray:
        n = self.n
        return np.array([[kernel_moment(self.kernels[i][j], beta) for j in range(n)]
                         for i in range(n)])

    @classmethod
    def from_arrays(cls, d_inf, a_sup, G, F, kernels, tau_sup=None) -> "BoundsSummary":
        d_inf = np.asarray(d_inf, dtype=float).ravel()
        n = d_inf.size
        a_sup = np.abs(np.asarray(a_sup, dtype=float).reshape(n, n))
        tau_sup = np.zeros((n, n)) if tau_sup is None else np.asarray(tau_sup, float).reshape(n, n)
        kernels = _square(kernels, n, "kernels", _as_kernel)
        return cls(d_inf, a_sup, tau_sup, np.asarray(G, float).reshape(n),
                   np.asarray(F, float).reshape(n), kernels)


def derive_bounds(model: NetworkModel) -> BoundsSummary:
    """Fill every uniform bound from the signal envelopes and activation data."""
    n = model.n
    d_inf = np.array([s.lower_bound() for s in model.d])
    if np.any(d_inf <= 0):
        i = int(np.argmin(d_inf))
        raise AssumptionError(
            f"self-inhibition d_{i + 1}(t) has lower bound {d_inf[i]:.6g} <= 0")
    tau_inf = np.array([[s.lower_bound() for s in row] for row in model.tau])
    if np.any(tau_inf < 0):
        i, j = np.unravel_index(int(np.argmin(tau_inf)), tau_inf.shape)
        raise AssumptionError(
            f"delay tau_{i + 1}{j + 1}(t) has lower bound {tau_inf[i, j]:.6g} < 0")
    a_sup = np.array([[s.sup_abs() for s in row] for row in model.a])
    tau_sup = np.array([[s.upper_bound() for s in row] for row in model.tau])
    G = np.array([spec.lipschitz_bound for spec in model.g])
    F = np.array([spec.lipschitz_bound for spec in model.f])
    g0 = np.array([abs(spec.at_zero) for spec in model.g])
    f0 = np.array([abs(spec.at_zero) for spec in model.f])
    i_sup = np.array([s.sup_abs() for s in model.inputs])
    b_sup = np.array([[kernel_moment(k, 0.0) for k in row] for row in model.kernels])
    i_hat = max(math.fsum([i_sup[i]] + [a_sup[i, j] * g0[j] + b_sup[i, j] * f0[j]
                                        for j in range(n)]) for i in range(n))
    return BoundsSummary(d_inf, a_sup, tau_sup, G, F, model.kernels, float(i_hat),
                         i_sup, g0, f0)


# ---------------------------------------------------------------------------
# assumption audit
# ---------------------------------------------------------------------------

@dataclass
class AssumptionItem:
    item: int
    name: str
    passed: bool
    detail: str = ""


@dataclass
class AssumptionReport:
    items: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(it.passed for it in self.items)

    def failures(self) -> list:
        return [it for it in self.items if not it.passed]

    def to_dict(self) -> dict:
        return {"passed": self.passed,
                "items": [vars(it).copy() for it in self.items]}


def validate_assumptions(model: NetworkModel, grid=None) -> AssumptionReport:
    """Audit the five standing hypotheses on ``model``; failures are reported, not raised."""
    report = AssumptionReport()

    msgs = []
    for j, spec in enumerate(model.g):
        r = validate_activation(spec, grid, monotone=True)
        if not r.passed:
            msgs.append(f"g_{j + 1}: max quotient {r.max_quotient:.6g} > G={spec.lipschitz_bound}"
                        if not r.lipschitz_ok else f"g_{j + 1}: not non-decreasing")
    for j, spec in enumerate(model.f):
        r = validate_activation(spec, grid, monotone=False)
        if not r.passed:
            msgs.append(f"f_{j + 1}: max quotient {r.max_quotient:.6g} > F={spec.lipschitz_bound}")
    report.items.append(AssumptionItem(1, "activation classes", not msgs, "; ".join(msgs)))

    msgs = []
    for i, s in enumerate(model.d):
        if s.lower_bound() <= 0:
            msgs.append(f"d_{i + 1} lower bound {s.lower_bound():.6g} <= 0")
    for i in range(model.n):
        for j in range(model.n):
            lb = model.tau[i][j].lower_bound()
            if lb < 0:
                msgs.append(f"tau_{i + 1}{j + 1} lower bound {lb:.6g} < 0")
    report.items.append(AssumptionItem(2, "positive self-inhibition, nonnegative delays",
                                       not msgs, "; ".join(msgs)))

    report.items.append(AssumptionItem(
        3, "kernel continuity", True,
        "holds by construction: kernel weights are trigonometric sums"))
    report.items.append(AssumptionItem(
        4, "common almost periods", True,
        "holds by construction: all coefficients are finite trigonometric sums"))

    msgs = []
    decay = min(k.min_decay for row in model.kernels for k in row)
    probe = min(1e-3, 0.5 * decay)
    for i in range(model.n):
        for j in range(model.n):
            try:
                m = kernel_moment(model.kernels[i][j], probe)
            except KernelDivergenceError as exc:
                msgs.append(f"K_{i + 1}{j + 1}: {exc}")
                continue
            if not math.isfinite(m):
                msgs.append(f"K_{i + 1}{j + 1}: moment not finite")
    report.items.append(AssumptionItem(5, "exponential kernel moment", not msgs,
                                       "; ".join(msgs) or f"finite at beta={probe:.3g}"))
    return report
