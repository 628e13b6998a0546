#!/usr/bin/env python3
"""Green kernel pushed to the boundary: (rho')^-s G / P^s settles to 4^s."""

import numpy as np

from chyp.geometry import random_siegel_point
from chyp.series import green_boundary_limit


def main() -> None:
    rng = np.random.default_rng(3)
    pts = [random_siegel_point(rng, 1) for _ in range(4)]
    for s in (2.0, 3.0, 4.5):
        rep = green_boundary_limit(pts, 0.3, s, rhos=(1e-2, 1e-3, 1e-4, 1e-5))
        est = complex(rep.details["constant_estimate"]).real
        print(f"s = {s}: constant {est:.8g}, 4^s = {4 ** s:.8g}, "
              f"spread {rep.details['z_spread']:.1e}, last step {rep.details['cauchy_gap']:.1e}")
        for row in rep.details["ratios"][:2]:
            print("   ", "  ".join(f"{complex(v).real:.6g}" for v in row))


if __name__ == "__main__":
    main()
