"""Generic parameter draws away from the excluded loci."""

from __future__ import annotations

from typing import List

import numpy as np

from .spinchain import ChainSpec


def annulus(rng: np.random.Generator, lo: float, hi: float, size: int) -> np.ndarray:
    return rng.uniform(lo, hi, size) * np.exp(2j * np.pi * rng.uniform(size=size))


def evaluation_parameters(rng: np.random.Generator, n: int) -> List[complex]:
    """``n`` points with 0.5 < |a| < 2 at evenly spread angles plus jitter."""
    base = 2 * np.pi * (np.arange(n) + rng.uniform(size=n) * 0.8) / n
    mods = rng.uniform(0.5, 2.0, n)
    return list(mods * np.exp(1j * (base + 2 * np.pi * rng.uniform())))


def random_chain(rng: np.random.Generator, n: int) -> ChainSpec:
    a = evaluation_parameters(rng, n)
    hbar = annulus(rng, 0.3, 0.7, 1)[0]
    zeta = annulus(rng, 0.5, 0.9, 1)[0]
    return ChainSpec(tuple(a), hbar, zeta)
