"""Sample both boundary circles of the critical catenoid and print their statistics."""
import argparse

import numpy as np

from wlab import boundary, catalog


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--chart", action="store_true", help="use the Weierstrass chart instead")
    args = ap.parse_args()
    s = catalog.catenoid_chart() if args.chart else catalog.critical_catenoid()
    t0, c = catalog.critical_catenoid_constants()
    print(f"t0 = {t0:.16f}  c = {c:.16f}  expected radius = {c * np.cosh(t0):.16f}")
    for k, locus in enumerate(s.boundary_curves):
        smp = boundary.sample_curve(s, locus.u, locus.v_range, args.count, endpoint=False)
        fit = boundary.fit_circle(smp.points)
        print(f"boundary {k}: max|sphere| {np.max(np.abs(smp.sphere_residuals)):.2e}"
              f"  max angle {np.max(smp.orth_residuals):.2e}"
              f"  max|tau| {np.nanmax(np.abs(smp.torsions)):.2e}"
              f"  radius {fit.radius:.16f}  center z {fit.center[2]:+.16f}")


if __name__ == "__main__":
    main()
