"""Vertex functions of T*Gr(k,n) as truncated z-series and their q -> 1 eigenvalues.

The vertex side is written with the saddle-point deformation
``hbar_s = 1 / spec.hbar``; with that choice its q -> 1 limit is governed by
the SADDLE Bethe equations of :mod:`bethegeom.bethe` at the same ``z``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

from . import errors as err
from .bethe import SeriesRootSet
import mpmath

from .numerics import (
    DEFAULT_EPS_NODES,
    EXTENDED_DPS,
    EXTENDED_EPS_NODES,
    TruncatedSeries,
    bracket_function,
    cpow,
    elementary_symmetric,
    richardson_extrapolate,
    series_invert,
)
from .spinchain import ChainSpec


@dataclass(frozen=True)
class FixedPoint:
    p: Tuple[int, ...]
    x: Tuple[complex, ...]

    @classmethod
    def of(cls, spec: ChainSpec, p: Sequence[int]) -> "FixedPoint":
        p = tuple(sorted(p))
        for i in p:
            if not 1 <= i <= spec.n:
                raise err.IndexOutOfRange(f"site {i} outside 1..{spec.n}")
        return cls(p, tuple(spec.a[i - 1] for i in p))


@dataclass(frozen=True)
class SchurInsertion:
    """Symmetric function inserted into the vertex.

    ``kind`` is one of ``one``, ``elementary`` (param ``l``), ``power_sum``
    (param ``m``), ``monomial`` (param ``partition``) or ``custom`` (param
    ``fn``, which must be symmetric).
    """

    kind: str = "one"
    l: int = 0
    m: int = 1
    partition: Tuple[int, ...] = ()
    fn: Optional[Callable] = field(default=None, compare=False)

    def __call__(self, xs: Sequence):
        xs = list(xs)
        if self.kind == "one":
            return 1
        if self.kind == "elementary":
            return elementary_symmetric(xs, self.l) if self.l <= len(xs) else 0
        if self.kind == "power_sum":
            return sum((x**self.m for x in xs[1:]), xs[0] ** self.m) if xs else 0
        if self.kind == "monomial":
            lam = tuple(self.partition) + (0,) * (len(xs) - len(self.partition))
            if len(lam) > len(xs):
                return 0
            out = 0
            for perm in set(itertools.permutations(lam)):
                term = 1
                for x, e in zip(xs, perm):
                    term = term * x**e
                out = out + term
            return out
        if self.kind == "custom":
            return self.fn(xs)
        raise ValueError(f"unknown insertion kind {self.kind!r}")


ONE = SchurInsertion("one")


def elementary(l: int) -> SchurInsertion:
    return SchurInsertion("elementary", l=l)


@dataclass(frozen=True)
class VertexSeries:
    series: TruncatedSeries
    point: FixedPoint
    insertion: SchurInsertion
    q: complex
    hbar: complex


def classical_restriction(point: FixedPoint, tau: SchurInsertion):
    return tau(point.x)


def vertex_series(spec: ChainSpec, point: FixedPoint, tau: SchurInsertion, q, D: int = 6) -> VertexSeries:
    """q-hypergeometric vertex, summed over d in Z_{>=0}^k with |d| <= D."""
    a = spec.a
    n, k = spec.n, len(point.x)
    h = 1 / spec.hbar
    xs = point.x
    if isinstance(q, (mpmath.mpf, mpmath.mpc)):
        # Form every ratio in extended precision: the q -> 1 cancellations
        # amplify any rounding inconsistency between x_i/x_j and x_i/a_j.
        a = tuple(mpmath.mpc(v) for v in a)
        xs = tuple(mpmath.mpc(v) for v in xs)
        h = 1 / mpmath.mpc(spec.hbar)
    coeffs = [0j] * (D + 1)
    qn = cpow(q, n / 2)
    for d in itertools.product(range(D + 1), repeat=k):
        deg = sum(d)
        if deg > D:
            continue
        term = qn**deg
        for i in range(k):
            for j in range(k):
                term = term / bracket_function(xs[i] / xs[j], d[i] - d[j], q, h)
            for aj in a:
                term = term * bracket_function(xs[i] / aj, d[i], q, h)
        term = term * tau([xs[i] * q ** (-d[i]) for i in range(k)])
        coeffs[deg] += term
    return VertexSeries(TruncatedSeries(tuple(coeffs)), point, tau, q, h)


def eigenvalue_limit(spec: ChainSpec, point: FixedPoint, tau: SchurInsertion, D: int = 6,
                     nodes: Optional[Sequence[float]] = None, tol: float = 1e-3,
                     return_spread: bool = False, precision: str = "std"):
    """q -> 1 limit of V^(tau)/V^(1), coefficient by coefficient, with q = 1 - eps.

    ``precision="extended"`` evaluates the vertex in 34-digit arithmetic and
    defaults to the longer node ladder.  Raises ExtrapolationDiverged when a
    coefficient's spread exceeds 10 tol.
    """
    if precision not in ("std", "extended"):
        raise ValueError(f"unknown precision {precision!r}")
    ext = precision == "extended"
    if tau == ONE:
        # Ratio of identical series.
        series = TruncatedSeries((1.0 + 0j,) + (0j,) * D)
        return (series, [0.0] * (D + 1)) if return_spread else series
    if nodes is None:
        nodes = EXTENDED_EPS_NODES if ext else DEFAULT_EPS_NODES
    with mpmath.workdps(EXTENDED_DPS if ext else mpmath.mp.dps):
        ratios = []
        for eps in nodes:
            q = mpmath.mpf(1) - mpmath.mpf(eps) if ext else 1 - eps
            num = vertex_series(spec, point, tau, q, D).series
            den = vertex_series(spec, point, ONE, q, D).series
            ratios.append(num * series_invert(den))
        fits = [richardson_extrapolate([(e, r.coeffs[m]) for e, r in zip(nodes, ratios)])
                for m in range(D + 1)]
    out, spreads = [], []
    for m, (val, spread) in enumerate(fits):
        if spread > 10 * tol * max(1.0, abs(val)):
            raise err.ExtrapolationDiverged(f"coefficient {m}: spread {spread:.3e}")
        out.append(complex(val))
        spreads.append(spread)
    series = TruncatedSeries(tuple(out))
    return (series, spreads) if return_spread else series


def bethe_symmetric_series(point: FixedPoint, tau: SchurInsertion, roots: SeriesRootSet) -> TruncatedSeries:
    """tau evaluated on the z-series roots of the matching fixed point."""
    if tuple(roots.origin_subset) != tuple(point.p):
        raise err.TruncationMismatch("roots do not start at this fixed point")
    if not roots.roots:
        val = tau([])
        return TruncatedSeries((val,))
    orders = {r.order for r in roots.roots}
    if len(orders) != 1:
        raise err.TruncationMismatch(f"root series have orders {sorted(orders)}")
    D = orders.pop()
    val = tau(list(roots.roots))
    if not isinstance(val, TruncatedSeries):
        val = TruncatedSeries.constant(val, D)
    return val
