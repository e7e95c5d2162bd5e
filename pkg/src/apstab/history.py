"""Initial history on ``(-inf, 0]``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ModelError
from .model import as_signal

HISTORY_KINDS = ("constant", "signal", "table")


@dataclass(frozen=True, eq=False)
class HistoryFunction:
    """Initial function, represented on ``[-window, 0]`` and held constant before.

    kind ``constant``: ``value`` is an n-vector.
    kind ``signal``: ``signals`` holds one quasi-periodic signal per component.
    kind ``table``: ``times`` (increasing, last entry 0) and ``values``
    (len(times) x n), linearly interpolated.
    """

    kind: str
    n: int
    value: tuple = ()
    signals: tuple = ()
    times: tuple = ()
    values: tuple = ()
    window: float = 10.0

    def __post_init__(self):
        if self.kind not in HISTORY_KINDS:
            raise ModelError(f"unknown history kind {self.kind!r}")
        if not self.window > 0:
            raise ModelError("history window must be positive")
        if self.kind == "constant":
            v = tuple(float(x) for x in np.ravel(self.value))
            if len(v) != self.n:
                raise ModelError(f"constant history needs {self.n} values, got {len(v)}")
            object.__setattr__(self, "value", v)
        elif self.kind == "signal":
            sigs = tuple(as_signal(s) for s in self.signals)
            if len(sigs) != self.n:
                raise ModelError(f"signal history needs {self.n} signals, got {len(sigs)}")
            object.__setattr__(self, "signals", sigs)
        else:
            ts = np.asarray(self.times, dtype=float)
            vs = np.asarray(self.values, dtype=float).reshape(ts.size, self.n)
            if ts.size < 2 or np.any(np.diff(ts) <= 0) or ts[-1] != 0.0:
                raise ModelError("table history needs increasing times ending at 0")
            object.__setattr__(self, "times", tuple(ts))
            object.__setattr__(self, "values", tuple(map(tuple, vs)))

    @classmethod
    def constant(cls, value, window: float = 10.0) -> "HistoryFunction":
        v = np.atleast_1d(np.asarray(value, dtype=float))
        return cls("constant", v.size, value=tuple(v), window=window)

    @classmethod
    def zeros(cls, n: int) -> "HistoryFunction":
        return cls.constant(np.zeros(n))

    def with_window(self, window: float) -> "HistoryFunction":
        return HistoryFunction(self.kind, self.n, self.value, self.signals, self.times,
                               self.values, window)

    def component(self, j: int, t) -> np.ndarray:
        """Component ``j`` at times ``t`` (all ``<= 0``)."""
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            return np.full(t.shape, self.value[j])
        t = np.maximum(t, -self.window)
        if self.kind == "signal":
            return np.asarray(self.signals[j](t), dtype=float)
        vs = np.asarray(self.values)
        return np.interp(t, self.times, vs[:, j])

    def __call__(self, t) -> np.ndarray:
        """History value; shape ``(n,)`` for scalar ``t``, ``(m, n)`` for arrays."""
        t = np.asarray(t, dtype=float)
        out = np.stack([self.component(j, t) for j in range(self.n)], axis=-1)
        return out

    def sup_weighted(self, xi, samples: int = 2001) -> float:
        """Sampled ``sup_{s<=0} max_i |phi_i(s)| / xi_i``."""
        xi = np.asarray(xi, dtype=float)
        if self.kind == "constant":
            return float(np.max(np.abs(np.asarray(self.value)) / xi))
        ts = np.linspace(-self.window, 0.0, samples)
        return float(np.max(np.abs(self(ts)) / xi))

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "window": self.window}
        if self.kind == "constant":
            out["value"] = list(self.value)
        elif self.kind == "signal":
            out["signals"] = [signal_to_dict(s) for s in self.signals]
        else:
            out["times"] = list(self.times)
            out["values"] = [list(r) for r in self.values]
        return out


def signal_to_dict(sig) -> dict:
    return {"offset": sig.offset,
            "terms": [{"amp": a, "freq": w, "phase": p} for a, w, p in sig.terms]}
