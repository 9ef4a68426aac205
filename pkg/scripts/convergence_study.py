"""Energy-error convergence of the projected RK4 integrator on the e(3)* system and the radial double-well in R^4."""
import argparse

import numpy as np

from focusfocus import dynamics, poisson

CASES = {
    "e3-form41": (poisson.e3_form41(1.0, 0.0), [0.0, 8.0, 4.0, 1.0, 0.0, 0.0], 100.0),
    "remark-r4": (poisson.remark_system(), [1.5, -1.0, 1.2, 0.3], 10.0),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dts", type=float, nargs="+", default=[4e-3, 2e-3, 1e-3, 5e-4])
    args = ap.parse_args()
    for name, (sys, x0, t_end) in CASES.items():
        slope, errs = dynamics.convergence_slope(sys, np.array(x0), t_end, args.dts)
        print(f"{name}: slope {slope:.3f}")
        for dt, e in zip(args.dts, errs):
            print(f"  dt = {dt:.1e}  max |H - H0| = {e:.3e}")


if __name__ == "__main__":
    main()
