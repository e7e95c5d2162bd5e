"""Scan for epsilon-almost-periods of a quasi-periodic input and test them on the solution.

The coefficients mix incommensurate frequencies, so there is no exact period. Every
shift that nearly repeats the coefficients should nearly repeat the late solution.
"""

import math

from apstab import (SimConfig, almost_period_defect, derive_bounds, find_almost_period,
                    integrate, maximize_beta)
from apstab.analysis import transient_length
from apstab.catalog import quasi_periodic_network


def main(epsilon=0.1, omega_range=(1.0, 200.0)):
    model = quasi_periodic_network()
    cert = maximize_beta(derive_bounds(model))
    burn = transient_length(cert.beta, model.max_delay())
    omegas = find_almost_period(model.coefficient_signals(), epsilon, omega_range)
    horizon = math.ceil(burn + omega_range[1] + 10.0)
    traj = integrate(model, SimConfig(step=0.02, horizon=horizon))
    print(f"beta={cert.beta:.4f}  transient={burn:.2f}  {omegas.size} shifts found")
    for w in omegas:
        d = almost_period_defect(traj, w, (burn, traj.t_end - w), cert.xi_array)
        print(f"  omega={w:8.2f}  solution defect {d:.4f}")


if __name__ == "__main__":
    main()
