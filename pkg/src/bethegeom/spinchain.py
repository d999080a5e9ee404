"""XXZ spin-chain operators as dense matrices on the 2^n space.

Basis conventions (also in CONVENTIONS.md):

* site basis ``(nu_0, nu_1)`` with ``H = diag(1, -1)``; ``nu_1`` is the
  occupied ("spin up", e_1) state;
* a spin-basis state is an integer ``s`` whose bit ``n-1-i`` is the
  occupation of site ``i`` (0-based), so site 1 is the most significant bit
  and the full-space order is ``s = 0 .. 2^n - 1``;
* weight-k blocks list their basis subsets in lexicographic order;
* ``Omega_+`` is ``s = 0`` (no occupied sites), B(u) raises occupation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import errors as err
from .conventions import kahler_from_twist
from .numerics import cpow, elementary_symmetric, kron_all

MAX_SITES = 12
DISTINCT_TOL = 1e-8
ROOT_OF_UNITY_TOL = 1e-8

E2 = np.array([[0, 1], [0, 0]], dtype=complex)
F2 = np.array([[0, 0], [1, 0]], dtype=complex)
H2 = np.diag([1.0, -1.0]).astype(complex)


@dataclass(frozen=True)
class ChainSpec:
    """An XXZ chain: evaluation parameters ``a``, deformation ``hbar``, twist ``zeta``."""

    a: Tuple[complex, ...]
    hbar: complex
    zeta: complex

    def __post_init__(self):
        a = tuple(complex(x) for x in self.a)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "hbar", complex(self.hbar))
        object.__setattr__(self, "zeta", complex(self.zeta))
        n = len(a)
        if n < 1 or n > MAX_SITES:
            raise err.InvariantViolation(f"a: need 1 <= n <= {MAX_SITES}, got {n}")
        for i, x in enumerate(a):
            if abs(x) == 0:
                raise err.InvariantViolation(f"a[{i}]: evaluation parameter is zero")
        for i, j in itertools.combinations(range(n), 2):
            if abs(a[i] - a[j]) <= DISTINCT_TOL * max(abs(a[i]), abs(a[j])):
                raise err.InvariantViolation(f"a[{i}], a[{j}]: not pairwise distinct")
        if abs(self.hbar) == 0:
            raise err.InvariantViolation("hbar: must be nonzero")
        for m in range(1, 2 * n + 1):
            if abs(self.hbar**m - 1) <= ROOT_OF_UNITY_TOL:
                raise err.InvariantViolation(f"hbar: root-of-unity guard violated (hbar^{m} = 1)")
        if abs(self.zeta) == 0:
            raise err.InvariantViolation("zeta: must be nonzero")
        if abs(self.zeta**2 - 1) <= ROOT_OF_UNITY_TOL:
            raise err.InvariantViolation("zeta: zeta^2 = 1 is excluded")

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def z(self) -> complex:
        """Kahler parameter matching ``zeta``."""
        return kahler_from_twist(self.hbar, self.zeta, self.n)[1]

    def with_twist(self, zeta) -> "ChainSpec":
        return ChainSpec(self.a, self.hbar, zeta)


# ------------------------------------------------------------------ basis


def occupation(s: int, n: int) -> Tuple[int, ...]:
    return tuple((s >> (n - 1 - i)) & 1 for i in range(n))


def state_of_subset(p: Sequence[int], n: int) -> int:
    """Spin-basis index of the state whose occupied sites are ``p`` (1-based)."""
    s = 0
    for i in p:
        if not 1 <= i <= n:
            raise err.IndexOutOfRange(f"site {i} outside 1..{n}")
        s |= 1 << (n - i)
    return s


def subset_of_state(s: int, n: int) -> Tuple[int, ...]:
    return tuple(i + 1 for i, b in enumerate(occupation(s, n)) if b)


def block_states(n: int, k: int) -> List[int]:
    """Spin-basis indices of the weight-k block, in lexicographic subset order."""
    return [state_of_subset(p, n) for p in itertools.combinations(range(1, n + 1), k)]


def weights(n: int) -> np.ndarray:
    """Eigenvalue ``n - 2k`` of the total H on each spin-basis state."""
    return np.array([n - 2 * sum(occupation(s, n)) for s in range(2**n)])


@dataclass(frozen=True)
class Operator:
    """Dense operator on the full space (``weight_block=None``) or a weight block."""

    matrix: np.ndarray
    n: int
    weight_block: Optional[int] = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def basis(self) -> List[Tuple[int, ...]]:
        if self.weight_block is None:
            return [subset_of_state(s, self.n) for s in range(2**self.n)]
        return list(itertools.combinations(range(1, self.n + 1), self.weight_block))

    def block(self, k: int) -> "Operator":
        if self.weight_block is not None:
            raise ValueError("already a weight block")
        idx = block_states(self.n, k)
        return Operator(self.matrix[np.ix_(idx, idx)], self.n, k)

    def _check(self, other: "Operator"):
        if self.n != other.n or self.weight_block != other.weight_block:
            raise ValueError("operators live on different blocks")

    def __matmul__(self, other):
        if isinstance(other, Operator):
            self._check(other)
            return Operator(self.matrix @ other.matrix, self.n, self.weight_block)
        return self.matrix @ other

    def __add__(self, other: "Operator"):
        self._check(other)
        return Operator(self.matrix + other.matrix, self.n, self.weight_block)

    def __sub__(self, other: "Operator"):
        self._check(other)
        return Operator(self.matrix - other.matrix, self.n, self.weight_block)

    def __mul__(self, c):
        return Operator(c * self.matrix, self.n, self.weight_block)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))


def off_block_norm(op: Operator) -> float:
    """Largest entry connecting different weight sectors."""
    w = weights(op.n)
    mask = w[:, None] != w[None, :]
    return float(np.max(np.abs(op.matrix[mask]), initial=0.0))


# ---------------------------------------------------------- site modules


@dataclass(frozen=True)
class SiteRep:
    m: int
    E: np.ndarray
    F: np.ndarray
    H: np.ndarray


def qint(k: int, hbar) -> complex:
    den = cpow(hbar, 0.5) - cpow(hbar, -0.5)
    if abs(den) < 1e-12:
        return complex(k)
    return (cpow(hbar, k / 2) - cpow(hbar, -k / 2)) / den


def evaluation_module(m: int, hbar) -> SiteRep:
    """Highest-weight module of dimension m+1 with basis v_0..v_m."""
    if m < 1:
        raise err.InvalidWeight(f"m must be >= 1, got {m}")
    E = np.zeros((m + 1, m + 1), complex)
    F = np.zeros((m + 1, m + 1), complex)
    for k in range(1, m + 1):
        F[k, k - 1] = 1
        E[k - 1, k] = qint(k, hbar) * qint(m - k + 1, hbar)
    H = np.diag([float(m - 2 * k) for k in range(m + 1)]).astype(complex)
    return SiteRep(m, E, F, H)


def _hpow_diag(H: np.ndarray, hbar, p: float) -> np.ndarray:
    return np.diag([cpow(hbar, p * h.real) for h in np.diag(H)])


def l_operator(site: SiteRep, x, hbar) -> List[List[np.ndarray]]:
    """2x2 auxiliary block of site matrices.

    Both diagonal entries carry ``x^{-1}``; with ``x`` in the lower-right
    entry the resulting transfer matrices fail to commute.
    """
    if x == 0:
        raise err.ZeroSpectralParameter("x = 0")
    c = cpow(hbar, 0.5) - cpow(hbar, -0.5)
    hq = _hpow_diag(site.H, hbar, 0.25)
    hqi = _hpow_diag(site.H, hbar, -0.25)
    s = cpow(hbar, -0.5) / x
    return [
        [hq - s * hqi, c * site.F @ hqi],
        [c / x * site.E @ hq, hqi - s * hq],
    ]


@dataclass(frozen=True)
class Monodromy:
    A: Operator
    B: Operator
    C: Operator
    D: Operator


def _raw_monodromy(spec: ChainSpec, u, zeta) -> List[List[np.ndarray]]:
    site = evaluation_module(1, spec.hbar)
    M = [[np.eye(1, dtype=complex), np.zeros((1, 1), complex)],
         [np.zeros((1, 1), complex), np.eye(1, dtype=complex)]]
    for ai in spec.a:
        L = l_operator(site, u / ai, spec.hbar)
        M = [[sum(np.kron(M[r][t], L[t][c]) for t in range(2)) for c in range(2)] for r in range(2)]
    return [[M[0][0] * zeta, M[0][1] / zeta], [M[1][0] * zeta, M[1][1] / zeta]]


def monodromy(spec: ChainSpec, u) -> Monodromy:
    """``L_1(u/a_1) ... L_n(u/a_n) diag(zeta, 1/zeta)``."""
    if u == 0:
        raise err.SpectralParameterAtPole("u = 0")
    for ai in spec.a:
        if abs(u - ai) <= 1e-14 * abs(ai):
            raise err.SpectralParameterAtPole(f"u coincides with a = {ai}")
    M = _raw_monodromy(spec, u, spec.zeta)
    n = spec.n
    return Monodromy(*(Operator(M[r][c], n) for r, c in ((0, 0), (0, 1), (1, 0), (1, 1))))


def transfer(spec: ChainSpec, u) -> Operator:
    M = monodromy(spec, u)
    return M.A + M.D


def alpha(spec: ChainSpec, u) -> complex:
    return spec.zeta * cpow(spec.hbar, spec.n / 4) * np.prod([1 - a / (u * spec.hbar) for a in spec.a])


def delta(spec: ChainSpec, u) -> complex:
    return cpow(spec.hbar, -spec.n / 4) / spec.zeta * np.prod([1 - a / u for a in spec.a])


def transfer_eigenvalue(spec: ChainSpec, roots: Sequence, u) -> complex:
    h2 = cpow(spec.hbar, 0.5)
    for v in roots:
        if abs(u - v) <= 1e-14 * max(1.0, abs(v)):
            raise err.EvaluationAtRoot(f"u coincides with root {v}")
    pa = np.prod([(v * h2 - u / h2) / (v - u) for v in roots])
    pd = np.prod([(v / h2 - u * h2) / (v - u) for v in roots])
    return alpha(spec, u) * pa + delta(spec, u) * pd


def bethe_vector(spec: ChainSpec, roots: Sequence) -> np.ndarray:
    """``B(v_1) ... B(v_k) Omega_+`` restricted to the weight-k block."""
    roots = [complex(v) for v in roots]
    for v in roots:
        if abs(v) == 0:
            raise err.RootAtPole("root at u = 0")
    for v, w in itertools.combinations(roots, 2):
        if abs(v - w) <= DISTINCT_TOL * max(abs(v), abs(w)):
            raise err.CoincidentRoots(f"roots {v} and {w} coincide")
    n = spec.n
    psi = np.zeros(2**n, complex)
    psi[0] = 1
    for v in reversed(roots):
        psi = _raw_monodromy(spec, v, spec.zeta)[0][1] @ psi
    return psi[block_states(n, len(roots))]


def embed_block(vec: np.ndarray, n: int, k: int) -> np.ndarray:
    full = np.zeros(2**n, complex)
    full[block_states(n, k)] = vec
    return full


# --------------------------------------------------------------- R-matrix


def r_matrix(a_ratio, hbar) -> np.ndarray:
    """Trigonometric R-matrix on V(a_1) (x) V(a_2) as a function of a_1/a_2.

    Built from the L-operator with the first factor as auxiliary space and
    normalized to act as identity on e_1 (x) e_1.
    """
    x = complex(a_ratio)
    if x == 0:
        raise err.ResonantRatio("ratio is zero")
    for s in (1, -1):
        if abs(x - cpow(hbar, s)) <= 1e-12 * abs(x):
            raise err.ResonantRatio(f"ratio equals hbar^{s}")
    L = l_operator(evaluation_module(1, hbar), x, hbar)
    R = np.zeros((4, 4), complex)
    for r in range(2):
        for c in range(2):
            R[2 * r:2 * r + 2, 2 * c:2 * c + 2] = L[r][c]
    return R / R[3, 3]


def embed_two_site(R: np.ndarray, i: int, j: int, n: int) -> np.ndarray:
    """Place a 4x4 operator on sites i, j (0-based; i is its first factor)."""
    N = 2**n
    out = np.zeros((N, N), complex)
    for s in range(N):
        bi = (s >> (n - 1 - i)) & 1
        bj = (s >> (n - 1 - j)) & 1
        base = s & ~(1 << (n - 1 - i)) & ~(1 << (n - 1 - j))
        col = 2 * bi + bj
        for row in range(4):
            ri, rj = divmod(row, 2)
            t = base | (ri << (n - 1 - i)) | (rj << (n - 1 - j))
            out[t, s] += R[row, col]
    return out


def qkz_operator(spec: ChainSpec, q, i: int) -> Operator:
    """``R_{i,i-1}(q a_i/a_{i-1}) ... R_{i,1}(q a_i/a_1) Z_(i) R_{i,n}(a_i/a_n) ... R_{i,i+1}``."""
    n = spec.n
    if not 1 <= i <= n:
        raise err.IndexOutOfRange(f"i={i} outside 1..{n}")
    a = spec.a
    ii = i - 1
    out = np.eye(2**n, dtype=complex)
    for j in range(ii - 1, -1, -1):
        out = out @ embed_two_site(r_matrix(q * a[ii] / a[j], spec.hbar), ii, j, n)
    Z = np.diag([spec.zeta, 1 / spec.zeta])
    out = out @ kron_all([Z if j == ii else np.eye(2) for j in range(n)])
    for j in range(n - 1, ii, -1):
        out = out @ embed_two_site(r_matrix(a[ii] / a[j], spec.hbar), ii, j, n)
    return Operator(out, n)


# ----------------------------------------------------- Baxter Q-operators


def fixed_point_basis(spec: ChainSpec) -> np.ndarray:
    """Columns are the joint eigenvectors of the untwisted D(u), one per subset.

    Column ``s`` belongs to the subset of spin state ``s`` and is scaled so its
    ``s``-entry is 1 (the matrix is triangular in a suitable order).
    """
    n = spec.n
    h = spec.hbar
    u = 1.9 * np.exp(0.77j) * np.exp(np.mean(np.log(np.array(spec.a))))
    D = _raw_monodromy(spec, u, 1.0)[1][1]
    S = np.zeros((2**n, 2**n), complex)
    for s in range(2**n):
        occ = occupation(s, n)
        lam = cpow(h, -n / 4) * np.prod(
            [(cpow(h, 0.5) - cpow(h, -0.5) * a / u) if o else (1 - a / u) for a, o in zip(spec.a, occ)]
        )
        _, _, vh = np.linalg.svd(D - lam * np.eye(2**n))
        v = vh[-1].conj()
        S[:, s] = v / v[s]
    return S


def classical_exterior_power(spec: ChainSpec, l: int, S: Optional[np.ndarray] = None) -> np.ndarray:
    """Operator diagonal in the fixed-point basis with entries ``e_l(a_p)``."""
    n = spec.n
    if S is None:
        S = fixed_point_basis(spec)
    d = []
    for s in range(2**n):
        xs = [spec.a[i - 1] for i in subset_of_state(s, n)]
        d.append(elementary_symmetric(xs, l) if l <= len(xs) else 0)
    return S @ np.diag(d) @ np.linalg.inv(S)


def _coproduct_sum(locals_: Sequence[np.ndarray], left: np.ndarray) -> np.ndarray:
    """``sum_i left^{(x) i} (x) local_i (x) 1 (x) ...``."""
    n = len(locals_)
    I = np.eye(2)
    return sum(kron_all([left] * i + [locals_[i]] + [I] * (n - i - 1)) for i in range(n))


def _chevalley(spec: ChainSpec) -> Tuple[np.ndarray, np.ndarray]:
    """``E_{-1}`` and ``F_0`` on the chain."""
    h = spec.hbar
    K = np.diag([cpow(h, 0.5), cpow(h, -0.5)])
    Em1 = _coproduct_sum([a * E2 for a in spec.a], np.linalg.inv(K))
    F0 = _coproduct_sum([F2] * spec.n, K) @ kron_all([K] * spec.n)
    return Em1, F0


def _qfactorial(m: int, h) -> complex:
    out = 1.0 + 0j
    for j in range(1, m + 1):
        out *= (1 - h**j) / (1 - h)
    return out


def _correction_coeff(spec: ChainSpec, z, m: int) -> np.ndarray:
    """Diagonal of ``a_m(z)`` on the spin basis (saddle-side hbar)."""
    n = spec.n
    hg = 1 / spec.hbar
    K = np.array([cpow(hg, w / 2) for w in weights(n)])
    den = np.ones_like(K) * _qfactorial(m, hg)
    for i in range(1, m + 1):
        f = 1 - (-1) ** n / z * hg**i * K
        if np.min(np.abs(f)) < 1e-12:
            raise err.SingularDenominator(f"1 - (-1)^n z^-1 hbar^{i} K vanishes")
        den = den * f
    return (hg - 1) ** m * hg ** (m * (m + 1) / 2) * K**m / den


class ExteriorTower:
    """All ``Lambda-hat^l(z)``, l = 0..n, sharing one fixed-point basis."""

    def __init__(self, spec: ChainSpec, z):
        if z == 0:
            self.z = 0
        else:
            self.z = complex(z)
        self.spec = spec
        self.S = fixed_point_basis(spec)
        self.Si = np.linalg.inv(self.S)
        self.Em1, self.F0 = _chevalley(spec)
        n = spec.n
        cls = []
        for l in range(n + 1):
            d = []
            for s in range(2**n):
                xs = [spec.a[i - 1] for i in subset_of_state(s, n)]
                d.append(elementary_symmetric(xs, l) if l <= len(xs) else 0)
            cls.append(self.S @ np.diag(d) @ self.Si)
        self.classical = cls
        self.ops = [self._build(l) for l in range(n + 1)]

    def _build(self, l: int) -> np.ndarray:
        out = self.classical[l].copy()
        if self.z == 0:
            return out
        Fm = np.eye(2**self.spec.n, dtype=complex)
        Em = np.eye(2**self.spec.n, dtype=complex)
        for m in range(1, l + 1):
            Fm = Fm @ self.F0
            Em = Em @ self.Em1
            am = _correction_coeff(self.spec, self.z, m)
            out = out + am[:, None] * (Fm @ self.classical[l - m] @ Em)
        return out


def quantum_exterior_power(spec: ChainSpec, z, l: int) -> Operator:
    if not 0 <= l <= spec.n:
        raise err.IndexOutOfRange(f"l={l} outside 0..{spec.n}")
    return Operator(ExteriorTower(spec, z).ops[l], spec.n)


def flip_intertwiner(spec: ChainSpec) -> np.ndarray:
    """``J`` with ``T(u; zeta) = J T(u; 1/zeta) J^{-1}``."""
    sx = np.array([[0, 1], [1, 0]], complex)
    return kron_all([sx] * spec.n) @ kron_all([np.diag([1, a]) for a in spec.a])


class BaxterPair:
    """Generating functions ``Q_+(x)`` and ``Q_-(x)`` for one chain and Kahler parameter."""

    def __init__(self, spec: ChainSpec, z=None):
        self.spec = spec
        self.z = spec.z if z is None else complex(z)
        self.plus = ExteriorTower(spec, self.z).ops
        J = flip_intertwiner(spec)
        Ji = np.linalg.inv(J)
        # zeta -> 1/zeta sends z -> 1/z.
        self.minus = [J @ X @ Ji for X in ExteriorTower(spec, 1 / self.z).ops]

    def __call__(self, x, sign: int = 1) -> np.ndarray:
        tower = self.plus if sign > 0 else self.minus
        return sum((-x) ** l * tower[l] for l in range(len(tower)))


def q_operator(spec: ChainSpec, z, x, sign: int = 1) -> Operator:
    """Baxter operator; on Bethe vectors ``Q_+(x)`` has eigenvalue ``prod(1 - x v_i)``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return Operator(BaxterPair(spec, z)(x, sign), spec.n)


@dataclass(frozen=True)
class IdentityResiduals:
    tq_plus: float
    tq_minus: float
    wronskian: float


def operator_identity_residuals(spec: ChainSpec, z, x, pair: Optional[BaxterPair] = None) -> IdentityResiduals:
    """Operator-norm residuals of the two TQ relations and the quantum Wronskian."""
    h = spec.hbar
    zeta = spec.zeta
    pair = BaxterPair(spec, z) if pair is None else pair
    w = weights(spec.n)

    def hw(p):
        return np.diag([cpow(h, p * wi) for wi in w])

    def g(y):
        return np.prod([1 - a * y for a in spec.a])

    T1 = transfer(spec, 1 / x).matrix
    res = []
    for sgn in (1, -1):
        r = (T1 @ pair(x, sgn)
             - g(x / h) * zeta**sgn * hw(sgn * 0.25) @ pair(h * x, sgn)
             - g(x) * zeta ** (-sgn) * hw(-sgn * 0.25) @ pair(x / h, sgn))
        res.append(float(np.linalg.norm(r, 2)))
    hs = cpow(h, 0.5)
    W = (zeta * hw(0.25) @ pair(hs * x, 1) @ pair(x / hs, -1)
         - hw(-0.25) / zeta @ pair(x / hs, 1) @ pair(hs * x, -1))
    rhs = (zeta * hw(0.25) - hw(-0.25) / zeta) * np.prod([1 - a * x / hs for a in spec.a])
    return IdentityResiduals(res[0], res[1], float(np.linalg.norm(W - rhs, 2)))
