"""Write the (h, f) bifurcation table of the e(3)* system for a few orbit parameters m."""
import argparse
import csv

from focusfocus import fiber, poisson


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=float, nargs="+", default=[0.0, 0.5])
    ap.add_argument("--resolution", type=int, default=21)
    ap.add_argument("--restarts", type=int, default=500)
    ap.add_argument("--out", default="bifurcation.csv")
    args = ap.parse_args()

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["m", "h", "f", "exists", "complexity"])
        for m in args.m:
            cells = fiber.moment_image(poisson.e3_form41(1.0, m), (-0.5, 2.5), (-1.5, 1.5), args.resolution,
                                       restarts_per_cell=args.restarts)
            for c in cells:
                w.writerow([m, c.h, c.f, c.exists, c.complexity])
            hot = [(round(c.h, 3), round(c.f, 3), c.complexity) for c in cells if c.complexity]
            print(f"m = {m}: {sum(c.exists == 'true' for c in cells)}/{len(cells)} cells nonempty, rank-0 cells {hot}")


if __name__ == "__main__":
    main()
