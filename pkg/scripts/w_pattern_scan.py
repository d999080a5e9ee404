"""Check which W_k factorisation pattern divides the quantum Wronskians of random sections."""

import numpy as np

from bethegeom.errors import InexactDivision
from bethegeom.wronskian import W_PATTERNS, extract_vk, solve_flag_sections


def draw(rng, lo=0.5, hi=2.0):
    return rng.uniform(lo, hi) * np.exp(2j * np.pi * rng.uniform())


def main(trials=10, seed=3):
    rng = np.random.default_rng(seed)
    for N in (2, 3, 4):
        counts = {p: 0 for p in W_PATTERNS}
        for t in range(trials):
            a = [draw(rng) for _ in range(N)]
            xi = [draw(rng) for _ in range(N)]
            data = solve_flag_sections(N - 1, a, xi, draw(rng, 0.3, 0.7), seed=t)
            for pattern in W_PATTERNS:
                try:
                    for k in range(1, N + 1):
                        extract_vk(data, k, pattern)
                    counts[pattern] += 1
                except InexactDivision:
                    pass
        print(f"N={N}: " + ", ".join(f"{p} {c}/{trials}" for p, c in counts.items()))


if __name__ == "__main__":
    main()
