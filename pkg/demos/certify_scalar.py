"""Certify the two scalar models and compare against their closed-form rates.

The atom model has best rate 1. The distributed model's best rate solves
-(2 - beta) + 0.5 + 1 / (2 - beta) = 0.
"""

import math

from apstab import derive_bounds, maximize_beta
from apstab.catalog import scalar_atom, scalar_distributed


def main():
    # with x = 2 - beta the distributed equation is x^2 - 0.5 x - 1 = 0
    closed = {"scalar_atom": 1.0,
              "scalar_distributed": 2 - (0.5 + math.sqrt(0.25 + 4)) / 2}
    for factory in (scalar_atom, scalar_distributed):
        model = factory()
        cert = maximize_beta(derive_bounds(model), tol=1e-9)
        print(f"{model.name:20s} beta={cert.beta:.9f} closed-form={closed[model.name]:.9f} "
              f"eta={cert.eta:.2e} xi={cert.xi}")


if __name__ == "__main__":
    main()
