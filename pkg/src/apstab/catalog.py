"""Canonical models: the scalar benchmarks and the three regimes of the demo."""

from __future__ import annotations

import math

from .history import HistoryFunction
from .model import ActivationSpec, QuasiPeriodicSignal, from_discrete_delays, \
    from_distributed_delays

TANH = ActivationSpec("tanh", 1.0, True)
LINEAR = ActivationSpec("linear", 1.0, True)
SQRT2 = math.sqrt(2.0)


def sig(offset=0.0, *terms) -> QuasiPeriodicSignal:
    return QuasiPeriodicSignal(offset, tuple(terms))


def scalar_atom(inputs: float = 1.0, history: float = 0.0):
    """``u' = -2u + 0.5 tanh(u) + 0.5 tanh(u) + I``: lag-0 atom, no delay; best rate 1."""
    return from_discrete_delays([2.0], [[0.5]], [[0.5]], [[0.0]], [inputs], TANH, TANH,
                                HistoryFunction.constant([history]), name="scalar_atom")


def scalar_distributed(inputs: float = 1.0, history: float = 0.0):
    """Scalar model with kernel ``0.5 * 2 exp(-2 s) ds``; best rate ``0.7192...``."""
    return from_distributed_delays([2.0], [[0.5]], [[0.5]], [[(2.0, 0, 2.0)]], [[0.0]],
                                   [inputs], TANH, TANH, HistoryFunction.constant([history]),
                                   name="scalar_distributed")


def constant_network(history=(0.0, 0.0)):
    """Constant coefficients and constant discrete delays: converges to an equilibrium."""
    return from_discrete_delays(
        d=[4.0, 5.0],
        a=[[0.5, -0.4], [0.3, 0.6]],
        b=[[0.4, 0.2], [-0.3, 0.5]],
        tau=[[0.5, 1.0], [0.8, 0.3]],
        inputs=[1.0, -0.5],
        g=TANH, f=TANH,
        history=HistoryFunction.constant(history),
        name="constant_network",
    )


def periodic_network(history=(0.0, 0.0)):
    """All coefficients and delays ``2 pi``-periodic: converges to a periodic orbit."""
    s, c = (1.0, 1.0, 0.0), (1.0, 1.0, math.pi / 2)

    def scaled(term, k):
        return (term[0] * k, term[1], term[2])

    return from_discrete_delays(
        d=[sig(3.0, scaled(s, 0.5)), sig(3.2, scaled(c, 0.4))],
        a=[[sig(0.0, scaled(s, 0.4)), 0.5], [-0.3, sig(0.3, scaled(s, 0.2))]],
        b=[[sig(0.5, scaled(s, 0.2)), 0.3], [0.4, sig(0.0, scaled(c, 0.2))]],
        tau=[[sig(1.0, scaled(s, 0.5)), 0.5], [0.7, sig(1.0, scaled(c, 0.3))]],
        inputs=[sig(0.0, s), sig(0.0, scaled(c, 0.5))],
        g=TANH, f=TANH,
        history=HistoryFunction.constant(history),
        name="periodic_network",
    )


def quasi_periodic_network(history=(0.0, 0.0)):
    """Distributed delays, inputs with frequencies 1 and sqrt(2): almost-periodic attractor."""
    return from_distributed_delays(
        d=[3.0, 3.5],
        a=[[0.5, -0.3], [0.4, 0.2]],
        b=[[0.6, 0.3], [-0.4, 0.5]],
        k_params=[[(2.0, 0, 2.0), (1.0, 1, 1.0)], [(3.0, 0, 3.0), (2.0, 0, 2.0)]],
        tau=[[0.2, 0.0], [0.5, 0.1]],
        inputs=[sig(0.0, (1.0, 1.0, 0.0), (1.0, SQRT2, 0.0)),
                sig(0.5, (0.5, 1.0, 0.3), (0.5, SQRT2, 1.1))],
        g=TANH, f=TANH,
        history=HistoryFunction.constant(history),
        name="quasi_periodic_network",
    )


def unstable_scalar():
    """Linear self-excitation far beyond the self-inhibition; diverges like ``exp(2.9 t)``."""
    gain = ActivationSpec("linear", 3.0, True, slope=3.0)
    return from_discrete_delays([0.1], [[1.0]], [[0.0]], [[0.0]], [0.0], gain, TANH,
                                HistoryFunction.constant([1.0]), name="unstable_scalar")


# name -> (factory, step, horizon)
DEMO_MODELS = {
    "constant_network": (constant_network, 0.01, 20.0),
    "periodic_network": (periodic_network, 0.01, 60.0),
    "quasi_periodic_network": (quasi_periodic_network, 0.02, 260.0),
}
