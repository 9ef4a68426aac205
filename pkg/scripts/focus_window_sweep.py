"""Label the poles P+- of the e(3)* orbit as m grows, and bisect for the end of the focus-focus window."""
import argparse
import csv

import numpy as np

from focusfocus import poisson, singularity
from focusfocus.singularity import FOCUS_FOCUS


def pole_labels(m, q=1.0):
    sys = poisson.e3_form41(q, m)
    out = []
    for s in (1, -1):
        x = np.array([0.0, 0.0, s * m, 0.0, 0.0, s * q])
        p = singularity.classify(sys, x)
        out.append((p.label, p.moment(sys)))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m-max", type=float, default=3.2)
    ap.add_argument("--steps", type=int, default=33)
    ap.add_argument("--out", default="focus_window.csv")
    args = ap.parse_args()

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["m", "sign", "label", "h", "f"])
        for m in np.linspace(0.0, args.m_max, args.steps):
            for s, (lab, mv) in zip((1, -1), pole_labels(m)):
                w.writerow([f"{m:.4f}", s, lab, mv.h, mv.f])

    lo, hi = 2.0, args.m_max
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if pole_labels(mid)[0][0] == FOCUS_FOCUS else (lo, mid)
    print(f"focus-focus window ends at m = {0.5 * (lo + hi):.8f} (2 sqrt 2 = {2 * np.sqrt(2):.8f})")


if __name__ == "__main__":
    main()
