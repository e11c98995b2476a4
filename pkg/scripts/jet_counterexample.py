"""Search for boundary jets that satisfy the free-boundary conditions order by order
(U x U_u = 0 through v^2, |U|^2 = 1 through v^3) while a2 is not real.

For each prescribed Im a2 the script solves for (a1, Re a2) by least squares and
reports which closed-form relations fail and the torsion of the boundary at P.
"""
import argparse

import numpy as np
from scipy.optimize import least_squares

from wlab import series_verify as sv


def conditions(x, R, im_a2, a3):
    d = sv.BoundaryJetData(R, x[0] + 1j * x[1], x[2] + 1j * im_a2, a3)
    U, Uu = sv.boundary_series(sv.expand_weierstrass_series(d), d)
    c = lambda a, b: np.convolve(a, b)[:3]
    cross = [c(U[1], Uu[2]) - c(U[2], Uu[1]), c(U[2], Uu[0]) - c(U[0], Uu[2]), c(U[0], Uu[1]) - c(U[1], Uu[0])]
    sphere = sum(np.convolve(U[k], U[k])[:4] for k in range(3))
    sphere[0] -= 1
    return np.concatenate(cross + [sphere])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--R", type=float, default=2.0)
    ap.add_argument("--a3", type=float, default=0.1)
    args = ap.parse_args()
    x0 = [1.5, 0.0, 0.5]
    for im_a2 in (0.0, 0.05, 0.1, 0.2, 0.4):
        # continuation: start from the previous solution
        sol = least_squares(conditions, x0, args=(args.R, im_a2, args.a3),
                            xtol=1e-15, ftol=1e-15, gtol=1e-15)
        x0 = sol.x
        d = sv.BoundaryJetData(args.R, sol.x[0] + 1j * sol.x[1], sol.x[2] + 1j * im_a2, args.a3)
        v = sv.derive_constraints(d)
        broken = [k for k, r in v.residuals.items() if r > 1e-8]
        print(f"Im a2 = {im_a2:4.2f}: a1 = {d.a1.real:.12f}{d.a1.imag:+.1e}i  Re a2 = {d.a2.real:.12f}"
              f"  condition residual {np.max(np.abs(sol.fun)):.1e}  tau(P) = {sv.torsion_at_P(v):+.6e}")
        print(f"    relations violated: {', '.join(broken) or 'none'}")


if __name__ == "__main__":
    main()
