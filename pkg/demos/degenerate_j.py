#!/usr/bin/env python3
"""j_m on the slice z = 0 next to the classical q-expansion, for growing boxes."""

import numpy as np

from chyp.geometry import SiegelPoint
from chyp.lattice import Truncation
from chyp.modular import classical_j, j_invariant


def main() -> None:
    taus = [1j, 2j, 0.25 + 1.1j, 0.5 + 0.9j]
    print(f"{'tau':>14} {'N':>5} {'j_m (m=1)':>26} {'classical':>26} {'rel gap':>9}")
    for tau in taus:
        ref = classical_j(tau)
        for N in (50, 200, 500):
            val = j_invariant(SiegelPoint(np.zeros(1), tau), 1, Truncation(N=N))
            print(f"{tau!s:>14} {N:5d} {val:26.6f} {ref:26.6f} {abs(val - ref) / abs(ref):9.1e}")
    # the index only enters through e^m(S(z)), which is 1 on this slice
    Z = SiegelPoint(np.zeros(2), 0.1 + 1.3j)
    tr = Truncation(N=200)
    print("m = 1, 3/2, 7 at z = 0:", [j_invariant(Z, m, tr) for m in (1, "3/2", 7)])


if __name__ == "__main__":
    main()
