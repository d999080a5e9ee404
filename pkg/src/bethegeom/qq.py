"""QQ-systems, Z-twisted Miura connections and Baecklund transformations for SL(r+1).

Connections are evaluated pointwise as (r+1)x(r+1) matrices in the defining
representation with ``e_i = E_{i,i+1}``, ``f_i = E_{i+1,i}`` and
``alpha_i^vee = E_{ii} - E_{i+1,i+1}``.  Products over simple roots follow the
configured Coxeter ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from . import errors as err
from .numerics import Polynomial, poly_dilate

GUARD_TOL = 1e-8


@dataclass(frozen=True)
class CartanData:
    rank: int
    cartan_matrix: Tuple[Tuple[int, ...], ...]
    ordering: Tuple[int, ...]

    def __post_init__(self):
        C = np.array(self.cartan_matrix)
        r = self.rank
        if C.shape != (r, r):
            raise err.InvariantViolation("cartan_matrix has the wrong shape")
        if np.any(np.diag(C) != 2) or np.any(C != C.T):
            raise err.InvariantViolation("need a_ii = 2 and a symmetric (simply-laced) matrix")
        if np.any(C[~np.eye(r, dtype=bool)] > 0):
            raise err.InvariantViolation("off-diagonal Cartan entries must be <= 0")
        if sorted(self.ordering) != list(range(1, r + 1)):
            raise err.InvariantViolation("ordering must be a permutation of 1..r")

    @classmethod
    def type_a(cls, r: int, ordering: Optional[Sequence[int]] = None) -> "CartanData":
        C = [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(r)] for i in range(r)]
        return cls(r, tuple(tuple(row) for row in C), tuple(ordering or range(1, r + 1)))

    def a(self, i: int, j: int) -> int:
        """Cartan entry a_ij with 1-based labels."""
        return self.cartan_matrix[i - 1][j - 1]

    def later(self, i: int) -> List[int]:
        pos = self.ordering.index(i)
        return list(self.ordering[pos + 1:])

    def earlier(self, i: int) -> List[int]:
        pos = self.ordering.index(i)
        return list(self.ordering[:pos])


def xi_factors(zeta: Sequence, cartan: CartanData) -> Tuple[List[complex], List[complex]]:
    """``(xi, xi_tilde)`` with xi_tilde_i = zeta_i prod_{j>i} zeta_j^{a_ji}, xi_i = zeta_i^-1 prod_{j<i} zeta_j^{-a_ji}."""
    if any(z == 0 for z in zeta):
        raise err.ZeroTwist("twist parameters must be nonzero")
    xi, xit = [], []
    for i in range(1, cartan.rank + 1):
        t = zeta[i - 1]
        for j in cartan.later(i):
            t = t * zeta[j - 1] ** cartan.a(j, i)
        x = 1 / zeta[i - 1]
        for j in cartan.earlier(i):
            x = x * zeta[j - 1] ** (-cartan.a(j, i))
        xit.append(t)
        xi.append(x)
    return xi, xit


def _ratio_close_to_power(x, y, h, m_max: int) -> bool:
    for m in range(-m_max, m_max + 1):
        if abs(x - y * h**m) <= GUARD_TOL * max(abs(x), abs(y)):
            return True
    return False


@dataclass(frozen=True)
class QQInstance:
    cartan: CartanData
    Lam: Tuple[Polynomial, ...]
    zeta: Tuple[complex, ...]
    Qplus: Tuple[Polynomial, ...]
    Qminus: Optional[Tuple[Polynomial, ...]] = None

    def __post_init__(self):
        r = self.cartan.rank
        for name in ("Lam", "zeta", "Qplus"):
            if len(getattr(self, name)) != r:
                raise err.InvariantViolation(f"{name}: expected {r} entries")
        for i, q in enumerate(self.Qplus):
            if abs(q.lead - 1) > 1e-12:
                raise err.InvariantViolation(f"Qplus[{i}] must be monic")
        if self.Qminus is not None and len(self.Qminus) != r:
            raise err.InvariantViolation(f"Qminus: expected {r} entries")

    @property
    def xi(self) -> List[complex]:
        return xi_factors(self.zeta, self.cartan)[0]

    @property
    def xi_tilde(self) -> List[complex]:
        return xi_factors(self.zeta, self.cartan)[1]

    def check_nondegenerate(self, hbar) -> None:
        """Raise InvariantViolation on common Q+/Q- roots or hbar-resonant neighbor roots."""
        r = self.cartan.rank
        roots_p = [q.roots() for q in self.Qplus]
        if self.Qminus is not None:
            for i in range(r):
                for x in roots_p[i]:
                    if self.Qminus[i].degree >= 1 and np.min(np.abs(self.Qminus[i].roots() - x)) <= GUARD_TOL * max(1, abs(x)):
                        raise err.InvariantViolation(f"Q+^{i+1} and Q-^{i+1} share a root")
        for i in range(1, r + 1):
            for j in range(i + 1, r + 1):
                if self.cartan.a(i, j) == 0:
                    continue
                for x in roots_p[i - 1]:
                    for y in roots_p[j - 1]:
                        if _ratio_close_to_power(x, y, hbar, r + 1):
                            raise err.InvariantViolation(f"nodes {i},{j}: roots not hbar-distinct")


def _qq_rhs(inst: QQInstance, i: int, hbar) -> Polynomial:
    out = inst.Lam[i - 1]
    for j in inst.cartan.later(i):
        out = out * poly_dilate(inst.Qplus[j - 1], hbar) ** (-inst.cartan.a(j, i))
    for j in inst.cartan.earlier(i):
        out = out * inst.Qplus[j - 1] ** (-inst.cartan.a(j, i))
    return out


def qq_residual(inst: QQInstance, hbar) -> List[Polynomial]:
    """``xi~_i Q-^i(u) Q+^i(hbar u) - xi_i Q-^i(hbar u) Q+^i(u) - RHS_i`` for each node."""
    if inst.Qminus is None:
        raise ValueError("instance has no Q- polynomials")
    xi, xit = xi_factors(inst.zeta, inst.cartan)
    out = []
    for i in range(1, inst.cartan.rank + 1):
        qp, qm = inst.Qplus[i - 1], inst.Qminus[i - 1]
        lhs = xit[i - 1] * qm * poly_dilate(qp, hbar) - xi[i - 1] * poly_dilate(qm, hbar) * qp
        out.append(lhs - _qq_rhs(inst, i, hbar))
    return out


def _solve_node(qp: Polynomial, rhs: Polynomial, xi, xit, hbar, deg: int) -> Tuple[Optional[Polynomial], float, float]:
    rows = max(rhs.degree, deg + qp.degree) + 1
    M = np.zeros((rows, deg + 1), complex)
    qph = poly_dilate(qp, hbar)
    for m in range(deg + 1):
        mono = Polynomial((0,) * m + (1,))
        col = xit * mono * qph - xi * hbar**m * mono * qp
        for t, c in enumerate(col.coeffs):
            M[t, m] = c
    b = np.zeros(rows, complex)
    b[: len(rhs.coeffs)] = rhs.coeffs
    sv = np.linalg.svd(M, compute_uv=False)
    cond = sv[0] / sv[-1] if sv[-1] > 0 else np.inf
    if not np.isfinite(cond):
        return None, np.inf, cond
    x, *_ = np.linalg.lstsq(M, b, rcond=None)
    res = float(np.max(np.abs(M @ x - b)))
    return Polynomial(tuple(x)), res, cond


def solve_qminus(inst: QQInstance, hbar, tol: float = 1e-10, max_cond: float = 1e10) -> QQInstance:
    """Solve the QQ-system for Q-, node by node, as a linear coefficient problem.

    The degree tried first is ``deg RHS - deg Q+``, then one lower and one
    higher.
    """
    xi, xit = xi_factors(inst.zeta, inst.cartan)
    out = []
    for i in range(1, inst.cartan.rank + 1):
        qp = inst.Qplus[i - 1]
        rhs = _qq_rhs(inst, i, hbar)
        base = rhs.degree - qp.degree
        best = None
        worst_cond = 0.0
        for deg in (base, base - 1, base + 1):
            if deg < 0:
                continue
            sol, res, cond = _solve_node(qp, rhs, xi[i - 1], xit[i - 1], hbar, deg)
            worst_cond = max(worst_cond, cond)
            if sol is not None and cond <= max_cond and res <= tol * max(1.0, rhs.max_abs_coeff()):
                best = sol
                break
        if best is None:
            if worst_cond > max_cond:
                raise err.IllConditioned(f"node {i}: linear system condition {worst_cond:.3e}")
            raise err.NoPolynomialSolution(f"node {i}: no polynomial Q- at degrees near {base}")
        out.append(best)
    return replace(inst, Qminus=tuple(out))


def qq_to_bethe_residual(inst: QQInstance, hbar) -> List[complex]:
    """SL(2) only: ``Lam(w)/Lam(w/hbar) + zeta^2 Q+(hbar w)/Q+(w/hbar)`` at each root w of Q+."""
    if inst.cartan.rank != 1:
        raise ValueError("Bethe form implemented for rank 1")
    qp, lam, zeta = inst.Qplus[0], inst.Lam[0], inst.zeta[0]
    roots = qp.roots()
    for i in range(len(roots)):
        for j in range(i):
            if abs(roots[i] - roots[j]) <= GUARD_TOL * max(1, abs(roots[i])):
                raise err.RootAtPole("Q+ has a repeated root")
    out = []
    for w in roots:
        den = lam(w / hbar) * qp(w / hbar)
        if abs(den) <= 1e-300:
            raise err.RootAtPole(f"denominator vanishes at root {w}")
        out.append(complex(lam(w) / lam(w / hbar) + zeta**2 * qp(hbar * w) / qp(w / hbar)))
    return out


# ------------------------------------------------------------- connections


def _e(i: int, N: int) -> np.ndarray:
    m = np.zeros((N, N), complex)
    m[i - 1, i] = 1
    return m


def _f(i: int, N: int) -> np.ndarray:
    m = np.zeros((N, N), complex)
    m[i, i - 1] = 1
    return m


def _coweight_power(x, i: int, N: int) -> np.ndarray:
    d = np.ones(N, complex)
    d[i - 1] = x
    d[i] = 1 / x
    return np.diag(d)


@dataclass(frozen=True)
class MiuraConnection:
    size: int
    A: Callable[[complex], np.ndarray] = field(compare=False)
    g: Tuple[Callable[[complex], complex], ...] = field(compare=False)
    source: QQInstance
    hbar: complex


def _miura_matrix(inst: QQInstance, hbar, u) -> np.ndarray:
    N = inst.cartan.rank + 1
    A = np.eye(N, dtype=complex)
    for j in inst.cartan.ordering:
        q = inst.Qplus[j - 1]
        qu, qhu = q(u), q(hbar * u)
        if abs(qu) == 0 or abs(qhu) == 0:
            raise err.PoleAtEvaluation(f"Q+^{j} vanishes at the evaluation point")
        zj = inst.zeta[j - 1]
        gj = zj * qhu / qu
        # e_j is nilpotent of order 2, so the exponential truncates.
        A = A @ _coweight_power(gj, j, N) @ (np.eye(N) + inst.Lam[j - 1](u) * qu / (zj * qhu) * _e(j, N))
    return A


def miura_connection(inst: QQInstance, hbar) -> MiuraConnection:
    """``A(u) = prod_j g_j(u)^{alpha_j^vee} exp(Lam_j Q+^j(u) / (zeta_j Q+^j(hbar u)) e_j)``."""
    if inst.cartan.rank > 4:
        raise ValueError("desk-scale limit: rank <= 4")
    gs = tuple(
        (lambda u, q=inst.Qplus[j], z=inst.zeta[j]: z * q(hbar * u) / q(u))
        for j in range(inst.cartan.rank)
    )
    return MiuraConnection(inst.cartan.rank + 1, lambda u: _miura_matrix(inst, hbar, u), gs, inst, hbar)


def sample_points(seed: int, count: int = 20, scale: float = 1.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return scale * rng.uniform(0.5, 2.0, count) * np.exp(2j * np.pi * rng.uniform(size=count))


def z_twist_verify(A: Callable, Z: np.ndarray, v: Callable, hbar, points: Sequence[complex]) -> float:
    """``max_u |A(u) - v(hbar u) Z v(u)^-1| / |A(u)|`` over ``points``."""
    worst = 0.0
    for u in points:
        vu = v(u)
        if abs(np.linalg.det(vu)) <= 1e-14 * max(1.0, np.linalg.norm(vu)) ** vu.shape[0]:
            raise err.SingularGauge(f"gauge is singular at u={u}")
        Au = A(u)
        worst = max(worst, float(np.linalg.norm(Au - v(hbar * u) @ Z @ np.linalg.inv(vu)) / np.linalg.norm(Au)))
    return worst


def plucker_block(conn: MiuraConnection, i: int, u) -> np.ndarray:
    """The 2x2 block of the i-th fundamental representation on span(nu, f_i nu).

    Computed from minors of A(u): rows/columns {1..i} and {1..i-1, i+1}.
    """
    A = conn.A(u)
    I0 = list(range(i))
    I1 = list(range(i - 1)) + [i]
    idx = (I0, I1)
    out = np.zeros((2, 2), complex)
    for r in range(2):
        for c in range(2):
            out[r, c] = np.linalg.det(A[np.ix_(idx[r], idx[c])])
    return out


def plucker_block_formula(conn: MiuraConnection, i: int, u) -> np.ndarray:
    """The same block from the Cartan factors: [[g_i, Lam_i prod_{j>i} g_j^{-a_ji}], [0, g_i^-1 prod_{j!=i} g_j^{-a_ji}]]."""
    inst = conn.source
    cart = inst.cartan
    g = [gj(u) for gj in conn.g]
    up = inst.Lam[i - 1](u)
    for j in cart.later(i):
        up *= g[j - 1] ** (-cart.a(j, i))
    low = 1 / g[i - 1]
    for j in range(1, cart.rank + 1):
        if j != i:
            low *= g[j - 1] ** (-cart.a(j, i))
    return np.array([[g[i - 1], up], [0, low]])


def block_gauge(inst: QQInstance, i: int) -> Tuple[np.ndarray, Callable]:
    """``(Z_i, v_i)`` with v_i(u) = diag(P_i, P_i^-1 prod P_j^{-a_ji}) [[1, -Q-/Q+], [0, 1]], P = Q+."""
    if inst.Qminus is None:
        raise ValueError("block gauge needs Q-")
    cart = inst.cartan
    zhat = 1 / inst.zeta[i - 1]
    for j in range(1, cart.rank + 1):
        if j != i:
            zhat *= inst.zeta[j - 1] ** (-cart.a(j, i))
    Z = np.diag([inst.zeta[i - 1], zhat])

    def v(u):
        qp = inst.Qplus[i - 1](u)
        qm = inst.Qminus[i - 1](u)
        nbr = 1.0 + 0j
        for j in range(1, cart.rank + 1):
            if j != i:
                nbr *= inst.Qplus[j - 1](u) ** (-cart.a(j, i))
        return np.array([[qp, -qm], [0, nbr / qp]])

    return Z, v


def sl2_gauge(inst: QQInstance) -> Tuple[np.ndarray, Callable]:
    """Rank-1 gauge taking the connection to diag(zeta, zeta^-1)."""
    if inst.cartan.rank != 1:
        raise ValueError("rank-1 gauge")
    return block_gauge(inst, 1)


# ------------------------------------------------------------- Baecklund


def reflected_twist(zeta: Sequence, cartan: CartanData, i: int) -> Tuple[complex, ...]:
    """Twist parameters of s_i(Z) for Z = prod zeta_j^{alpha_j^vee}."""
    out = list(zeta)
    new = 1 / zeta[i - 1]
    for j in range(1, cartan.rank + 1):
        if j != i:
            new *= zeta[j - 1] ** (-cartan.a(j, i))
    out[i - 1] = new
    return tuple(out)


def _mu(inst: QQInstance, i: int, u) -> complex:
    cart = inst.cartan
    num = 1.0 + 0j
    for j in range(1, cart.rank + 1):
        if j != i:
            num *= inst.Qplus[j - 1](u) ** (-cart.a(j, i))
    den = inst.Qplus[i - 1](u) * inst.Qminus[i - 1](u)
    if abs(den) == 0:
        raise err.PoleAtEvaluation("mu_i has a pole at the evaluation point")
    return num / den


def backlund(conn: MiuraConnection, i: int) -> MiuraConnection:
    """Gauge by ``exp(mu_i(hbar u) f_i) A(u) exp(-mu_i(u) f_i)``."""
    inst = conn.source
    if inst.Qminus is None:
        raise ValueError("Baecklund transformation needs Q-")
    N, h = conn.size, conn.hbar
    fi = _f(i, N)

    def A(u):
        return (np.eye(N) + _mu(inst, i, h * u) * fi) @ conn.A(u) @ (np.eye(N) - _mu(inst, i, u) * fi)

    def diag_factor(j):
        # diag(A) = (g_1, g_2/g_1, ..., 1/g_r), so g_j is the product of the first j entries.
        def g(u):
            return A(u).diagonal()[:j].prod()
        return g

    return MiuraConnection(N, A, tuple(diag_factor(j) for j in range(1, N)), inst, h)


def swapped_instance(inst: QQInstance, i: int) -> QQInstance:
    """Data with Q+^i replaced by Q-^i (made monic) and Z by s_i(Z).

    The connection formula depends on Q+ only through ratios Q(hbar u)/Q(u) and
    Q(u)/Q(hbar u), so rescaling Q-^i does not change it.
    """
    qp = list(inst.Qplus)
    qm = list(inst.Qminus)
    qp[i - 1], qm[i - 1] = inst.Qminus[i - 1].monic(), inst.Qplus[i - 1]
    return QQInstance(inst.cartan, inst.Lam, reflected_twist(inst.zeta, inst.cartan, i), tuple(qp), tuple(qm))


def backlund_residual(conn: MiuraConnection, i: int, points: Sequence[complex]) -> float:
    """Gauge side vs swapped-data side, max relative norm over ``points``."""
    gauged = backlund(conn, i)
    other = miura_connection(swapped_instance(conn.source, i), conn.hbar)
    worst = 0.0
    for u in points:
        a, b = gauged.A(u), other.A(u)
        worst = max(worst, float(np.linalg.norm(a - b) / np.linalg.norm(a)))
    return worst
