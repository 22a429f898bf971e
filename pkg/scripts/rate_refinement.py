#!/usr/bin/env python3
"""Refinement study: the axial rate a_1 of the unit interval versus pi.

For the unit interval the first Dirichlet eigenvalue is
2 delta^-2 (1 - cos(pi delta)), and the axial rate
a_1 = delta^-1 arccosh(1 + delta^2 lambda_1 / 2) climbs monotonically to pi
with the error shrinking ~4x per mesh halving.
"""

import argparse
import math

from gridharm import Mesh, a_of_lambda, build_box_domain, dirichlet_spectrum


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--denominators", type=int, nargs="+", default=[8, 16, 32, 64, 128, 256]
    )
    args = parser.parse_args()

    print(f"{'1/delta':>8} {'lambda_1':>14} {'a_1':>14} {'pi - a_1':>12} {'improvement':>12}")
    prev_err = None
    for denominator in args.denominators:
        mesh = Mesh(denominator, 1)
        lam1 = float(dirichlet_spectrum(build_box_domain(mesh, (1,))).eigenvalues[0])
        a1 = a_of_lambda(lam1, mesh).a
        err = math.pi - a1
        ratio = f"{prev_err / err:12.3f}" if prev_err is not None else " " * 12
        print(f"{denominator:>8} {lam1:>14.8f} {a1:>14.10f} {err:>12.3e} {ratio}")
        prev_err = err


if __name__ == "__main__":
    main()
