"""Converge to the equilibrium of a network with constant coefficients.

Two histories far apart end at the same point, which matches the root of the
algebraic steady-state equations.
"""

import numpy as np

from apstab import (HistoryFunction, SimConfig, derive_bounds, integrate, maximize_beta,
                    trajectory_distance)
from apstab.analysis import solve_equilibrium
from apstab.catalog import constant_network


def main():
    model = constant_network()
    cert = maximize_beta(derive_bounds(model))
    root, resid = solve_equilibrium(model)
    cfg = SimConfig(step=0.01, horizon=20.0)
    runs = [integrate(model, cfg, history=HistoryFunction.constant(h))
            for h in ([3.0, -3.0], [-2.0, 1.5])]
    t, dist = trajectory_distance(runs[0], runs[1], cert.xi_array)
    print(f"beta={cert.beta:.4f}  equilibrium={root}  residual={resid:.1e}")
    for k in range(0, t.size, 250):
        print(f"  t={t[k]:5.1f}  pair distance {dist[k]:.3e}")
    print(f"final error vs equilibrium {np.max(np.abs(runs[0].states[-1] - root)):.2e}")


if __name__ == "__main__":
    main()
