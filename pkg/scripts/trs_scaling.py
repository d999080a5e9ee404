"""Compare tRS Hamiltonians built from section data with e_k(a).

Prints H_k / e_k(a) next to hbar_W^{k(k-1)/2}, the observed ratio.
"""

import numpy as np

from bethegeom.numerics import elementary_symmetric
from bethegeom.wronskian import solve_flag_sections, trs_from_sections, trs_hamiltonian


def draw(rng, lo=0.5, hi=2.0):
    return rng.uniform(lo, hi) * np.exp(2j * np.pi * rng.uniform())


def main(seed=5):
    rng = np.random.default_rng(seed)
    for N in (2, 3, 4):
        a = [draw(rng) for _ in range(N)]
        xi = [draw(rng) for _ in range(N)]
        data = solve_flag_sections(N - 1, a, xi, draw(rng, 0.3, 0.7), seed=N)
        trs = trs_from_sections(data)
        print(f"N={N} hbar_W={complex(data.hbar):.4f}")
        for k in range(1, N + 1):
            ratio = trs_hamiltonian(trs, k) / elementary_symmetric(a, k)
            pred = data.hbar ** (k * (k - 1) // 2)
            print(f"  k={k}  H_k/e_k = {complex(ratio):.10f}   hbar_W^(k(k-1)/2) = {complex(pred):.10f}")


if __name__ == "__main__":
    main()
