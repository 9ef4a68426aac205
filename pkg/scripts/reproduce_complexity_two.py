"""Sample the complexity-2 fibers of the e(3)* and lambda-family orbits over several seeds."""
import argparse
import json
import time

import numpy as np

from focusfocus import fiber, poisson
from focusfocus.singularity import MomentValue


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--n-points", type=int, default=5000)
    ap.add_argument("--lam", type=float, default=0.1)
    ap.add_argument("--out", default="complexity_two.json")
    args = ap.parse_args()

    systems = {"e3": (poisson.e3_form41(1.0, 0.0), 0.0), f"lambda={args.lam}": (poisson.lambda_form41(args.lam), args.lam)}
    rows = []
    for name, (sys, lam) in systems.items():
        for seed in range(args.seeds):
            t0 = time.perf_counter()
            fs = fiber.sample_fiber(sys, MomentValue(1.0, 0.0), n_points=args.n_points, seed=seed)
            dist = float(np.max(fiber.oracle_distance(fs.points, 1.0, lam)))
            rows.append({"system": name, "seed": seed, "complexity": fs.complexity,
                         "n_components": fs.n_components, "labels": [p.label for p in fs.rank0_on_fiber],
                         "link_radius": fs.link_radius, "oracle_distance": dist})
            print(f"{name:12s} seed {seed:2d}: complexity {fs.complexity}, components {fs.n_components}, "
                  f"oracle {dist:.1e}, {time.perf_counter() - t0:.1f} s")
    with open(args.out, "w") as fh:
        json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
