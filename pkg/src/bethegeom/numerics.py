"""Scalar, polynomial, truncated-series and q-special-function arithmetic.

Every routine here is generic over the scalar type: plain Python/numpy
complex numbers give binary64 results, while ``mpmath.mpc`` inputs keep the
computation in extended precision.  Values are immutable and all operations
are pure.
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import mpmath
import numpy as np

from .errors import (
    DegenerateFactor,
    IndexOutOfRange,
    InsufficientSamples,
    TruncationMismatch,
    ZeroConstantTerm,
)

# Relative threshold below which a Pochhammer factor counts as vanishing.
DEGENERATE_TOL = 1e-14

PRECISION_MODES = ("std", "extended")
EXTENDED_DPS = 34


def set_precision(mode: str) -> None:
    """Select the working precision of mpmath-backed computations."""
    if mode not in PRECISION_MODES:
        raise ValueError(f"unknown precision mode {mode!r}")
    mpmath.mp.dps = EXTENDED_DPS if mode == "extended" else 15


def _is_mp(x) -> bool:
    return isinstance(x, (mpmath.mpc, mpmath.mpf))


def cpow(base, exponent):
    """Principal-branch power ``exp(exponent * Log(base))``.

    This is the single branch choice used everywhere for fractional powers of
    the deformation parameters.
    """
    if _is_mp(base) or _is_mp(exponent):
        return mpmath.exp(exponent * mpmath.log(base))
    return cmath.exp(exponent * cmath.log(complex(base)))


def _abs(x) -> float:
    return float(abs(x))


def qpoch_finite(x, q, d: int):
    """Finite q-Pochhammer symbol ``(x; q)_d``, extended to negative ``d``.

    For ``d < 0`` the reflection ``prod_{i=1}^{|d|} (1 - x q^{-i})^{-1}`` is
    used, which keeps ``(x;q)_{d+1} = (x;q)_d (1 - q^d x)`` valid for all d.
    """
    d = int(d)
    one = mpmath.mpc(1) if _is_mp(x) or _is_mp(q) else 1.0 + 0j
    if d >= 0:
        out = one
        qi = one
        for _ in range(d):
            out = out * (1 - qi * x)
            qi = qi * q
        return out
    den = one
    for i in range(1, -d + 1):
        f = 1 - x * q ** (-i)
        if _abs(f) <= DEGENERATE_TOL * max(1.0, _abs(x * q ** (-i))):
            raise DegenerateFactor(f"(1 - x q^-{i}) vanishes")
        den = den * f
    return one / den


def bracket_function(x, d: int, q, hbar):
    """The ratio ``{x}_d = (hbar/x; q)_d / (q/x; q)_d * (-q^{1/2} hbar^{-1/2})^d``."""
    num = qpoch_finite(hbar / x, q, d)
    # Guard factor by factor: near q = 1 the full product is legitimately tiny.
    y = q / x
    for i in range(max(d, 0)):
        t = q**i * y
        if _abs(1 - t) <= DEGENERATE_TOL * max(1.0, _abs(t)):
            raise DegenerateFactor(f"bracket denominator factor 1 - q^{i} q/x vanishes")
    den = qpoch_finite(y, q, d)
    return num / den * (-cpow(q, 0.5) * cpow(hbar, -0.5)) ** d


def elementary_symmetric(values: Sequence, l: int):
    """``e_l`` of ``values`` via the recursive product expansion."""
    vals = list(values)
    if l < 0 or l > len(vals):
        raise IndexOutOfRange(f"l={l} outside 0..{len(vals)}")
    e = [1] + [0] * len(vals)
    for v in vals:
        for j in range(len(vals), 0, -1):
            e[j] = e[j] + v * e[j - 1]
    return e[l]


def elementary_symmetric_all(values: Sequence) -> list:
    """All of ``e_0 .. e_len`` at once."""
    vals = list(values)
    return [elementary_symmetric(vals, l) for l in range(len(vals) + 1)]


# ---------------------------------------------------------------- polynomials


def _trim(coeffs: Sequence, tol: float = 0.0) -> Tuple:
    c = list(coeffs)
    while c and _abs(c[-1]) <= tol:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class Polynomial:
    """Univariate polynomial, coefficients lowest degree first.

    The zero polynomial has an empty coefficient tuple.
    """

    coeffs: Tuple = ()
    var: str = "u"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def from_roots(cls, roots: Iterable, lead=1.0, var: str = "u") -> "Polynomial":
        c = [lead]
        for r in roots:
            c = [0] + c
            for j in range(len(c) - 1):
                c[j] = c[j] - r * c[j + 1]
        return cls(tuple(c), var)

    @classmethod
    def constant(cls, c, var: str = "u") -> "Polynomial":
        return cls((c,), var)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else 0

    def __call__(self, u):
        out = 0
        for c in reversed(self.coeffs):
            out = out * u + c
        return out

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return Polynomial((other,), self.var)

    def __add__(self, other):
        o = self._coerce(other)
        m = max(len(self.coeffs), len(o.coeffs))
        a = list(self.coeffs) + [0] * (m - len(self.coeffs))
        b = list(o.coeffs) + [0] * (m - len(o.coeffs))
        return Polynomial(tuple(x + y for x, y in zip(a, b)), self.var)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(tuple(-c for c in self.coeffs), self.var)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        if not self.coeffs or not o.coeffs:
            return Polynomial((), self.var)
        out = [0] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(o.coeffs):
                out[i + j] = out[i + j] + x * y
        return Polynomial(tuple(out), self.var)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative polynomial power")
        out = Polynomial((1,), self.var)
        for _ in range(k):
            out = out * self
        return out

    def divmod(self, other: "Polynomial") -> Tuple["Polynomial", "Polynomial"]:
        """Long division; returns (quotient, remainder)."""
        if not other.coeffs:
            raise ZeroDivisionError("division by the zero polynomial")
        r = list(self.coeffs)
        dq = len(r) - len(other.coeffs)
        if dq < 0:
            return Polynomial((), self.var), self
        q = [0] * (dq + 1)
        for i in range(dq, -1, -1):
            c = r[i + other.degree] / other.lead
            q[i] = c
            for j, oc in enumerate(other.coeffs):
                r[i + j] = r[i + j] - c * oc
        return Polynomial(tuple(q), self.var), Polynomial(tuple(r[: other.degree]), self.var)

    def monic(self) -> "Polynomial":
        return Polynomial(tuple(c / self.lead for c in self.coeffs), self.var)

    def roots(self) -> np.ndarray:
        if self.degree < 1:
            return np.zeros(0, complex)
        return np.roots(np.array([complex(c) for c in reversed(self.coeffs)]))

    def max_abs_coeff(self) -> float:
        return max((_abs(c) for c in self.coeffs), default=0.0)


def poly_dilate(p: Polynomial, lam) -> Polynomial:
    """``p(u) -> p(lam u)``: coefficient ``c_j`` becomes ``c_j lam^j``."""
    out = []
    f = 1
    for c in p.coeffs:
        out.append(c * f)
        f = f * lam
    return Polynomial(tuple(out), p.var)


# ------------------------------------------------------- truncated power series


@dataclass(frozen=True)
class TruncatedSeries:
    """Power series ``c_0 + c_1 z + ... + c_D z^D + O(z^{D+1})``."""

    coeffs: Tuple

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise ValueError("a truncated series needs at least c_0")
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, c, order: int) -> "TruncatedSeries":
        return cls((c,) + (0,) * order)

    @classmethod
    def variable(cls, order: int) -> "TruncatedSeries":
        """The series ``z`` itself."""
        c = [0] * (order + 1)
        if order >= 1:
            c[1] = 1
        return cls(tuple(c))

    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries.constant(other, self.order)

    def __add__(self, other):
        o = self._coerce(other)
        m = min(self.order, o.order)
        return TruncatedSeries(tuple(self.coeffs[i] + o.coeffs[i] for i in range(m + 1)))

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        m = min(self.order, o.order)
        out = []
        for i in range(m + 1):
            s = 0
            for j in range(i + 1):
                s = s + self.coeffs[j] * o.coeffs[i - j]
            out.append(s)
        return TruncatedSeries(tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        return self * series_invert(o)

    def __pow__(self, k: int):
        if k < 0:
            return series_invert(self) ** (-k)
        out = TruncatedSeries.constant(1, self.order)
        for _ in range(k):
            out = out * self
        return out

    def __rtruediv__(self, other):
        return self._coerce(other) * series_invert(self)

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise TruncationMismatch(f"cannot extend order {self.order} to {order}")
        return TruncatedSeries(self.coeffs[: order + 1])

    def __call__(self, z):
        out = 0
        for c in reversed(self.coeffs):
            out = out * z + c
        return out


def series_invert(s: TruncatedSeries) -> TruncatedSeries:
    """Multiplicative inverse to the same order; needs ``c_0 != 0``."""
    c0 = s.coeffs[0]
    if _abs(c0) == 0.0:
        raise ZeroConstantTerm("series inversion needs a nonzero constant term")
    out = [1 / c0]
    for m in range(1, s.order + 1):
        acc = 0
        for j in range(1, m + 1):
            acc = acc + s.coeffs[j] * out[m - j]
        out.append(-acc / c0)
    return TruncatedSeries(tuple(out))


# ----------------------------------------------------------------- extrapolation

# q = 1 - eps with eps = 2^-j, j = 4..10.
DEFAULT_EPS_NODES = tuple(2.0 ** (-j) for j in range(4, 11))
# Longer ladder for extended precision; binary64 cancellation forbids it.
EXTENDED_EPS_NODES = tuple(2.0 ** (-j) for j in range(4, 15))


def _neville_at_zero(xs: Sequence[float], ys: Sequence) -> list:
    """Neville tableau evaluated at 0; returns the diagonal of orders."""
    p = list(ys)
    diag = [p[0]]
    for m in range(1, len(xs)):
        for i in range(len(xs) - m):
            p[i] = (-xs[i + m] * p[i] + xs[i] * p[i + 1]) / (xs[i] - xs[i + m])
        diag.append(p[0])
    return diag


def richardson_extrapolate(samples: Sequence[Tuple[float, object]]) -> Tuple[object, float]:
    """Polynomial extrapolation of ``f(eps)`` to ``eps = 0``.

    Uses every node.  Returns ``(estimate, spread)`` where ``spread`` is the
    gap between the top-order estimate and the estimate that drops the
    node with the largest eps.
    """
    if len(samples) < 2:
        raise InsufficientSamples("need at least two samples")
    xs = [float(e) for e, _ in samples]
    if any(e <= 0 for e in xs) or len(set(xs)) != len(xs):
        raise InsufficientSamples("nodes must be distinct and positive")
    order = sorted(range(len(xs)), key=lambda i: -xs[i])
    xs = [xs[i] for i in order]
    ys = [samples[i][1] for i in order]
    full = _neville_at_zero(xs, ys)[-1]
    if len(xs) == 2:
        spread = _abs(full - ys[-1])
    else:
        spread = _abs(full - _neville_at_zero(xs[1:], ys[1:])[-1])
    return full, spread


def max_abs(values: Iterable) -> float:
    return max((_abs(v) for v in values), default=0.0)


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def subsets(n: int, k: int) -> List[Tuple[int, ...]]:
    """k-subsets of 1..n in lexicographic order."""
    return [tuple(c) for c in itertools.combinations(range(1, n + 1), k)]
