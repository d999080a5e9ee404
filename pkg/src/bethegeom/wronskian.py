"""Quantum Wronskians of sections, extraction of Q-polynomials, and tRS Hamiltonians."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import errors as err
from .numerics import Polynomial, elementary_symmetric, poly_dilate

W_PATTERNS = ("recursive", "offset", "linear")


@dataclass(frozen=True)
class WronskianData:
    """Sections s_1..s_{r+1}, diagonal twist xi and the Drinfeld polynomials Lam_1..Lam_r."""

    s: Tuple[Polynomial, ...]
    xi: Tuple[complex, ...]
    hbar: complex
    Lam: Tuple[Polynomial, ...]
    c: Optional[Tuple[complex, ...]] = None
    p: Optional[Tuple[complex, ...]] = None

    def __post_init__(self):
        if len(self.s) != len(self.xi):
            raise err.InvariantViolation("need one twist entry per section")
        for i, j in itertools.combinations(range(len(self.xi)), 2):
            if abs(self.xi[i] - self.xi[j]) <= 1e-8 * max(abs(self.xi[i]), abs(self.xi[j])):
                raise err.InvariantViolation(f"xi[{i}], xi[{j}] coincide")
        if len(self.Lam) != len(self.s) - 1:
            raise err.InvariantViolation("need r Drinfeld polynomials for r+1 sections")

    @property
    def r(self) -> int:
        return len(self.s) - 1


def _det_poly(M: List[List[Polynomial]]) -> Polynomial:
    k = len(M)
    out = Polynomial(())
    for perm in itertools.permutations(range(k)):
        sign = 1
        for i, j in itertools.combinations(range(k), 2):
            if perm[i] > perm[j]:
                sign = -sign
        term = Polynomial((sign,))
        for row, col in enumerate(perm):
            term = term * M[row][col]
        out = out + term
    return out


def quantum_wronskian(data: WronskianData, k: int) -> Polynomial:
    """``e_1 ^ ... ^ e_{r+1-k} ^ Z^{k-1} s(u) ^ ... ^ s(hbar^{k-1} u)`` as a polynomial.

    Only the last k rows survive the identity columns, so this is the k x k
    determinant with entries xi_j^{k-1-m} s_j(hbar^m u).
    """
    N = data.r + 1
    if not 0 <= k <= N:
        raise err.IndexOutOfRange(f"k={k} outside 0..{N}")
    if k == 0:
        return Polynomial((1.0,))
    rows = range(N - k, N)
    M = [[data.xi[j] ** (k - 1 - m) * poly_dilate(data.s[j], data.hbar**m) for m in range(k)] for j in rows]
    return _det_poly(M)


def w_factor(data: WronskianData, k: int, pattern: str = "recursive") -> Polynomial:
    """The polynomial W_k whose zeros D_k must contain.

    ``recursive``: prod_{i=1}^{k-1} P_i(hbar^{k-1-i} u), the form implied by the
    Desnanot-Jacobi recursion.  ``offset``: P_1(u) P_2(hbar^2 u) P_3(hbar^3 u) ...
    ``linear``: prod_{i=1}^{k} P_i(hbar^{i-1} u).  P_i = Lam_r ... Lam_{r-i+1}
    (factors with index < 1 are 1).
    """
    if pattern not in W_PATTERNS:
        raise ValueError(f"unknown pattern {pattern!r}")
    r = data.r

    def P(i):
        out = Polynomial((1.0,))
        for j in range(r - i + 1, r + 1):
            if j >= 1:
                out = out * data.Lam[j - 1]
        return out

    h = data.hbar
    out = Polynomial((1.0,))
    if pattern == "recursive":
        for i in range(1, k):
            out = out * poly_dilate(P(i), h ** (k - 1 - i))
    elif pattern == "linear":
        for i in range(1, k + 1):
            out = out * poly_dilate(P(i), h ** (i - 1))
    else:
        for i in range(1, k + 1):
            e = 0 if i == 1 else max(2, i)
            out = out * poly_dilate(P(i), h**e)
    return out


def extract_vk(data: WronskianData, k: int, pattern: str = "recursive", tol: float = 1e-9) -> Tuple[complex, Polynomial]:
    """``D_k = alpha_k W_k V_k`` with V_k monic; InexactDivision if W_k does not divide."""
    D = quantum_wronskian(data, k)
    if not D.coeffs:
        raise err.InexactDivision(f"D_{k} vanishes identically")
    W = w_factor(data, k, pattern)
    quo, rem = D.divmod(W)
    if rem.max_abs_coeff() > tol * max(1.0, D.max_abs_coeff()):
        raise err.InexactDivision(f"W_{k} ({pattern}) does not divide D_{k}: remainder {rem.max_abs_coeff():.3e}")
    alpha = quo.lead
    return alpha, quo.monic()


# ------------------------------------------------------- degree-1 sections


def _sections(c: Sequence[complex], p: Sequence[complex]) -> Tuple[Polynomial, ...]:
    return tuple(Polynomial((-ci * pi, ci)) for ci, pi in zip(c, p))


def _top_wronskian(xi, hbar, c, p, lam) -> Polynomial:
    N = len(xi)
    Lam = tuple([lam] + [Polynomial((1.0,))] * (N - 2)) if N >= 2 else ()
    d = WronskianData(_sections(c, p), tuple(xi), hbar, Lam)
    return quantum_wronskian(d, N)


def _split_constant(C: complex, N: int) -> Tuple[complex, ...]:
    """c_1 = |C| > 0 and the phase on c_N; only the product of the c_i matters."""
    if N == 1:
        return (C,)
    mag = abs(C)
    return (mag,) + (1.0,) * (N - 2) + (C / mag,)


def solve_flag_sections(r: int, a: Sequence[complex], xi: Sequence[complex], hbar, seed: int = 0,
                        restarts: int = 20, tol: float = 1e-10) -> WronskianData:
    """Degree-1 sections s_i = c_i (u - p_i) with D_{r+1}(s) = prod (u - a_i).

    Unknowns are the p_i and the product C of the c_i; D_{r+1} is linear in
    each of them separately, so the Jacobian is exact from two evaluations.
    """
    N = r + 1
    if len(a) != N or len(xi) != N:
        raise err.InvariantViolation(f"need {N} values of a and xi")
    target = Polynomial.from_roots(a)
    Lam = tuple([target] + [Polynomial((1.0,))] * (N - 2)) if N >= 2 else ()

    def F(x):
        p, C = x[:N], x[N]
        D = _top_wronskian(xi, hbar, (C,) + (1.0,) * (N - 1), p, target)
        diff = D - target
        out = np.zeros(N + 1, complex)
        out[: len(diff.coeffs)] = diff.coeffs
        return out

    def J(x):
        cols = []
        for j in range(N + 1):
            x0, x1 = x.copy(), x.copy()
            x0[j], x1[j] = 0, 1
            cols.append(F(x1) - F(x0))
        return np.array(cols).T

    rng = np.random.default_rng(seed)
    scale = float(np.mean(np.abs(a)))
    for _ in range(restarts):
        x = np.concatenate([scale * (rng.normal(size=N) + 1j * rng.normal(size=N)), [1.0 + 0j]])
        for _ in range(100):
            fx = F(x)
            try:
                dx = np.linalg.solve(J(x), -fx)
            except np.linalg.LinAlgError:
                break
            x = x + dx
            if np.max(np.abs(dx)) <= 1e-15 * max(1.0, np.max(np.abs(x))):
                break
        res = float(np.max(np.abs(F(x))))
        if np.all(np.isfinite(x)) and res < tol:
            c = _split_constant(x[N], N)
            p = tuple(complex(v) for v in x[:N])
            return WronskianData(_sections(c, p), tuple(xi), hbar, Lam, c, p)
    raise err.NewtonDiverged(f"no section solution after {restarts} restarts")


def section_residual(data: WronskianData, a: Sequence[complex]) -> float:
    diff = quantum_wronskian(data, data.r + 1) - Polynomial.from_roots(a)
    return diff.max_abs_coeff()


# ------------------------------------------------------------------ tRS


@dataclass(frozen=True)
class TRSData:
    xi: Tuple[complex, ...]
    p: Tuple[complex, ...]
    hbar: complex

    def __post_init__(self):
        if len(self.xi) != len(self.p):
            raise err.InvariantViolation("xi and p lengths differ")


def trs_hamiltonian(data: TRSData, k: int) -> complex:
    """``H_k = sum_{|J|=k} prod_{i in J, j not in J} (xi_i - hbar xi_j)/(xi_i - xi_j) prod_{m in J} p_m``."""
    n = len(data.xi)
    if not 1 <= k <= n:
        raise err.IndexOutOfRange(f"k={k} outside 1..{n}")
    xi, h = data.xi, data.hbar
    for i, j in itertools.combinations(range(n), 2):
        if abs(xi[i] - xi[j]) <= 1e-14 * max(abs(xi[i]), abs(xi[j])):
            raise err.CoincidentCoordinates(f"xi[{i}] = xi[{j}]")
    out = 0j
    for J in itertools.combinations(range(n), k):
        term = 1.0 + 0j
        for i in J:
            term *= data.p[i]
            for j in range(n):
                if j not in J:
                    term *= (xi[i] - h * xi[j]) / (xi[i] - xi[j])
        out += term
    return out


def lagrangian_residual(data: TRSData, a: Sequence[complex]) -> List[complex]:
    """``H_k - e_k(a)`` for k = 1..n."""
    if len(a) != len(data.xi):
        raise err.InvariantViolation("a and xi lengths differ")
    return [trs_hamiltonian(data, k) - elementary_symmetric(a, k) for k in range(1, len(a) + 1)]


def trs_from_sections(data: WronskianData) -> TRSData:
    """tRS point from degree-1 sections: coordinates xi, momenta p, coupling 1/hbar."""
    if data.p is None:
        raise ValueError("sections are not of degree one")
    return TRSData(tuple(data.xi), tuple(data.p), 1 / data.hbar)
