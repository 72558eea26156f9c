"""Steering residual and control energy along the regularization path.

Pointwise actuator at 0.3, omega = [0.2, 0.8], alpha = 0.7, T = 1, target
xi_1 - 0.5 xi_3, for several truncations.
"""

from __future__ import annotations

import argparse

from frachum import (
    ActuatorSpec,
    Region,
    SpectralField,
    assemble_gramian,
    assemble_lambda,
    build_basis,
    mode_gains,
    region_mass,
    solve_hum,
)


def sweep(n_modes, epsilons, alpha=0.7, T=1.0):
    basis = build_basis(n_modes)
    act = ActuatorSpec.pointwise(0.3)
    mass = region_mass(Region(0.2, 0.8), basis)
    gram = assemble_gramian(alpha, T, basis)
    gains = mode_gains(act, basis)
    c = [0.0] * n_modes
    c[0], c[2] = 1.0, -0.5
    target, zero = SpectralField(c), SpectralField.zeros(n_modes)
    for eps in epsilons:
        sol = solve_hum(assemble_lambda(gram, gains, mass, eps), target, zero, alpha, T,
                        basis, act)
        yield eps, sol.relative_residual, sol.energy


def main():
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--modes", type=int, nargs="+", default=[8, 16, 24])
    p.add_argument("--exponents", type=int, nargs="+", default=list(range(4, 15)))
    args = p.parse_args()
    print(f"{'N':>4} {'epsilon':>9} {'rel. residual':>14} {'J(u*)':>12}")
    for n in args.modes:
        for eps, rel, energy in sweep(n, [10.0**-k for k in args.exponents]):
            print(f"{n:4d} {eps:9.0e} {rel:14.3e} {energy:12.4e}")


if __name__ == "__main__":
    main()
