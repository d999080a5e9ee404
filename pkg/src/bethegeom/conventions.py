"""Parameter dictionaries that tie the spin-chain and saddle-point pictures together.

The spin chain is written with deformation ``hbar`` and twist ``zeta``; the
saddle-point (vertex-function) side uses ``hbar' = 1/hbar`` and the Kahler
parameter ``z = (-1)^n zeta^2``.  See CONVENTIONS.md for how the sign was
fixed.
"""

from __future__ import annotations

from typing import Tuple

from .numerics import cpow  # noqa: F401  (re-exported: single branch choice)


def kahler_from_twist(hbar, zeta, n: int) -> Tuple[complex, complex]:
    """``(hbar, zeta) -> (1/hbar, (-1)^n zeta^2)``."""
    return 1 / hbar, (-1) ** n * zeta * zeta


def twist_squared_from_kahler(z, n: int):
    """Inverse of the twist part: ``zeta^2 = (-1)^n z``."""
    return (-1) ** n * z
