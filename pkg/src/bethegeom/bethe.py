"""Bethe equations: residuals, homotopy continuation from z = 0, and z-series roots.

Two presentations of the same system are supported:

* ``ABA``: spin-chain form in (hbar, zeta);
* ``SADDLE``: saddle-point form in (hbar_s, z) with hbar_s = 1/hbar and
  z = (-1)^n zeta^2.

Both share root sets.  Tracking always runs on the denominator-cleared
SADDLE polynomials along z(t) = t z_target, which start at the fixed-point
solutions s = a_p at t = 0.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import errors as err
from .conventions import kahler_from_twist
from .numerics import TruncatedSeries, cpow
from .spinchain import ChainSpec

DUPLICATE_RETRIES = 3

ABA = "ABA"
SADDLE = "SADDLE"


@dataclass(frozen=True)
class HomotopyConfig:
    initial_step: float = 0.02
    min_step: float = 1e-10
    max_step: float = 0.1
    newton_tol: float = 1e-12
    newton_max_iter: int = 50
    corrector_iter: int = 6
    collision_tol: float = 1e-6
    divergence_bound: float = 1e8
    detour_retries: int = 1
    certify_tol: float = 1e-9
    seed: int = 0


@dataclass(frozen=True)
class BetheInstance:
    """Bethe system for ``k`` roots on a chain.

    For SADDLE instances ``z`` may override the Kahler parameter derived from
    ``spec.zeta`` (needed for z = 0, which no twist reaches).
    """

    spec: ChainSpec
    k: int
    convention: str = ABA
    z_override: Optional[complex] = None

    def __post_init__(self):
        if not 0 <= self.k <= self.spec.n:
            raise err.InvariantViolation(f"k={self.k} outside 0..{self.spec.n}")
        if self.convention not in (ABA, SADDLE):
            raise ValueError(f"unknown convention {self.convention!r}")
        if self.z_override is not None and self.convention != SADDLE:
            raise ValueError("z override only applies to SADDLE instances")

    @classmethod
    def saddle(cls, a: Sequence, hbar_s, z, k: int) -> "BetheInstance":
        """SADDLE instance from saddle-side parameters directly."""
        n = len(a)
        zeta = cmath.sqrt((-1) ** n * z) if z != 0 else 0.5
        spec = ChainSpec(tuple(a), 1 / hbar_s, zeta)
        return cls(spec, k, SADDLE, complex(z))

    @property
    def hbar_s(self) -> complex:
        return 1 / self.spec.hbar

    @property
    def z(self) -> complex:
        if self.z_override is not None:
            return self.z_override
        return self.spec.z

    def as_saddle(self) -> "BetheInstance":
        if self.convention == SADDLE:
            return self
        return BetheInstance(self.spec, self.k, SADDLE)


@dataclass(frozen=True)
class RootSet:
    roots: Tuple[complex, ...]
    residual: float
    origin_subset: Tuple[int, ...]


@dataclass(frozen=True)
class SeriesRootSet:
    roots: Tuple[TruncatedSeries, ...]
    origin_subset: Tuple[int, ...]


def convention_transform(params: Tuple[complex, complex, int]) -> Tuple[complex, complex]:
    """``(hbar, zeta, n) -> (1/hbar, (-1)^n zeta^2)``."""
    hbar, zeta, n = params
    return kahler_from_twist(hbar, zeta, n)


# ------------------------------------------------------------ residuals


def _check_poles(inst: BetheInstance, roots: Sequence[complex]):
    # ABA poles: v = a_j and v = w hbar.  SADDLE poles: s = a_j hbar_s and s = w / hbar_s.
    if inst.convention == ABA:
        shift_a, shift_w = 1.0, inst.spec.hbar
    else:
        shift_a, shift_w = inst.hbar_s, 1 / inst.hbar_s
    for v in roots:
        for a in inst.spec.a:
            if abs(v - a * shift_a) <= 1e-14 * abs(a):
                raise err.PoleCollision(f"root {v} hits the pole of a = {a}")
    for v, w in itertools.permutations(roots, 2):
        if abs(v - w * shift_w) <= 1e-14 * abs(v):
            raise err.PoleCollision(f"roots {v}, {w} sit on a pole of the two-root factor")


def _sides(inst: BetheInstance, roots: Sequence[complex]) -> Tuple[list, list]:
    roots = [complex(v) for v in roots]
    a = inst.spec.a
    n = inst.spec.n
    lhs, rhs = [], []
    if inst.convention == ABA:
        h2 = cpow(inst.spec.hbar, 0.5)
        zeta = inst.spec.zeta
        for i, v in enumerate(roots):
            lhs.append(np.prod([(h2 * v - aj / h2) / (v - aj) for aj in a]))
            rhs.append(zeta**-2 * np.prod(
                [(v * h2 - w / h2) / (v / h2 - w * h2) for j, w in enumerate(roots) if j != i]))
    else:
        h = inst.hbar_s
        for i, s in enumerate(roots):
            lhs.append(np.prod([(s - w * h) / (s * h - w) for j, w in enumerate(roots) if j != i])
                       * np.prod([(s - aj) / (aj * h - s) for aj in a]))
            rhs.append(inst.z * cpow(h, -n / 2))
    return lhs, rhs


def bethe_residual(inst: BetheInstance, roots: Sequence) -> List[complex]:
    """Per-root ``LHS_i - RHS_i`` in the instance's convention."""
    _check_poles(inst, roots)
    lhs, rhs = _sides(inst, roots)
    return [complex(l - r) for l, r in zip(lhs, rhs)]


def relative_residual(inst: BetheInstance, roots: Sequence) -> float:
    """``max_i |LHS_i / RHS_i - 1|`` (absolute form when RHS vanishes)."""
    if len(roots) == 0:
        return 0.0
    _check_poles(inst, roots)
    lhs, rhs = _sides(inst, roots)
    out = 0.0
    for l, r in zip(lhs, rhs):
        out = max(out, abs(l / r - 1) if r != 0 else abs(l))
    return float(out)


# ------------------------------------------------- cleared saddle system


def _linprod(factors: List[Tuple[complex, Dict[int, complex]]]):
    """Value and gradient of a product of affine factors ``c + sum_j g_j s_j``."""
    vals = [f[0] for f in factors]
    total = np.prod(vals) if vals else 1.0
    grad: Dict[int, complex] = {}
    for m, (_, g) in enumerate(factors):
        rest = np.prod([vals[t] for t in range(len(vals)) if t != m]) if len(vals) > 1 else 1.0
        for j, gj in g.items():
            grad[j] = grad.get(j, 0) + gj * rest
    return total, grad


class _ClearedSystem:
    """``A_i(s) - z c B_i(s)`` with ``c = hbar_s^{-n/2}``."""

    def __init__(self, a: Sequence[complex], hbar_s: complex, k: int):
        self.a = [complex(x) for x in a]
        self.h = complex(hbar_s)
        self.k = k
        self.c = cpow(self.h, -len(self.a) / 2)

    def parts(self, s: np.ndarray):
        k, h = self.k, self.h
        A = np.zeros(k, complex)
        B = np.zeros(k, complex)
        JA = np.zeros((k, k), complex)
        JB = np.zeros((k, k), complex)
        for i in range(k):
            fa = [(s[i] - s[j] * h, {i: 1, j: -h}) for j in range(k) if j != i]
            fa += [(s[i] - aj, {i: 1}) for aj in self.a]
            fb = [(s[i] * h - s[j], {i: h, j: -1}) for j in range(k) if j != i]
            fb += [(aj * h - s[i], {i: -1}) for aj in self.a]
            A[i], ga = _linprod(fa)
            B[i], gb = _linprod(fb)
            for j, g in ga.items():
                JA[i, j] += g
            for j, g in gb.items():
                JB[i, j] += g
        return A, B, JA, JB

    def eval(self, s: np.ndarray, z: complex):
        A, B, JA, JB = self.parts(s)
        return A - z * self.c * B, JA - z * self.c * JB, -self.c * B


def _newton(sys_: _ClearedSystem, s: np.ndarray, z: complex, tol: float, max_iter: int):
    for it in range(max_iter):
        F, J, _ = sys_.eval(s, z)
        try:
            ds = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return s, False, it
        s = s + ds
        if np.max(np.abs(ds)) <= tol * max(1.0, np.max(np.abs(s))):
            return s, True, it + 1
    return s, False, max_iter


def _min_gap(s: np.ndarray) -> float:
    out = math.inf
    for i, j in itertools.combinations(range(len(s)), 2):
        out = min(out, abs(s[i] - s[j]) / max(abs(s[i]), abs(s[j])))
    return out


def _spacing(s: np.ndarray, a: Sequence[complex]) -> float:
    """Smallest gap among the roots and among the a-values (branch separation scale)."""
    out = math.inf
    for pts in (list(s), list(a)):
        for x, y in itertools.combinations(pts, 2):
            out = min(out, abs(x - y))
    return out


def _track(sys_: _ClearedSystem, start: np.ndarray, path, dpath, cfg: HomotopyConfig) -> np.ndarray:
    s = start.astype(complex)
    t = 0.0
    dt = cfg.initial_step
    while t < 1.0:
        dt = min(dt, 1.0 - t)
        z0, dz = path(t), dpath(t)
        F, J, Fz = sys_.eval(s, z0)
        try:
            v = np.linalg.solve(J, -Fz * dz)
        except np.linalg.LinAlgError:
            raise err.PathDivergence(f"singular Jacobian at t={t:.6g}")
        pred = s + dt * v
        s_new, ok, its = _newton(sys_, pred, path(t + dt), cfg.newton_tol, cfg.corrector_iter)
        if ok and np.max(np.abs(s_new - pred)) <= 0.1 * _spacing(s, sys_.a):
            s = s_new
            t = t + dt
            if _min_gap(s) < cfg.collision_tol:
                raise err.PathCollision(f"roots collide at t={t:.6g}")
            if np.max(np.abs(s)) > cfg.divergence_bound:
                raise err.PathDivergence(f"roots escape to infinity at t={t:.6g}")
            if its <= 3:
                dt = min(2 * dt, cfg.max_step)
        else:
            dt /= 2
            if dt < cfg.min_step:
                raise err.PathDivergence(f"step size underflow at t={t:.6g}")
    s, ok, _ = _newton(sys_, s, path(1.0), cfg.newton_tol, cfg.newton_max_iter)
    return s


def solve_from_subset(inst: BetheInstance, p: Sequence[int], config: HomotopyConfig = HomotopyConfig(),
                      detour_only: bool = False, salt: int = 0) -> RootSet:
    """Track the branch that starts at the a-values of ``p`` when z = 0.

    ``detour_only`` skips the straight ray (used to re-run a path whose
    endpoint duplicated another one); ``salt`` varies the detour arcs.
    """
    p = tuple(p)
    if len(p) != inst.k:
        raise err.InvariantViolation(f"|p| = {len(p)} but k = {inst.k}")
    sad = inst.as_saddle()
    start = np.array([sad.spec.a[i - 1] for i in p], complex)
    zt = sad.z
    if inst.k == 0 or zt == 0:
        return RootSet(tuple(start), 0.0, p)
    sys_ = _ClearedSystem(sad.spec.a, sad.hbar_s, inst.k)
    rng = np.random.default_rng([config.seed, salt, *p])
    attempts = [(lambda t: t * zt, lambda t: zt)]
    for _ in range(config.detour_retries):
        theta = rng.uniform(0.5, 2.5) * rng.choice([-1, 1])

        def path(t, th=theta):
            return zt * t * cmath.exp(1j * th * (1 - t))

        def dpath(t, th=theta):
            return zt * cmath.exp(1j * th * (1 - t)) * (1 - 1j * th * t)

        attempts.append((path, dpath))
    if detour_only:
        attempts = attempts[1:]
    last: Exception = err.PathDivergence("no attempt made")
    for path, dpath in attempts:
        try:
            s = _track(sys_, start, path, dpath, config)
        except (err.PathCollision, err.PathDivergence) as e:
            last = e
            continue
        if _min_gap(s) < config.collision_tol:
            last = err.PathCollision("endpoint roots coincide")
            continue
        return RootSet(tuple(complex(x) for x in s), relative_residual(inst, s), p)
    raise last


def root_set_distance(r1: Sequence[complex], r2: Sequence[complex]) -> float:
    """Relative distance between root multisets (optimal matching)."""
    if len(r1) == 0:
        return 0.0
    a = np.array(r1)
    b = np.array(r2)
    cost = np.abs(a[:, None] - b[None, :]) / np.maximum(np.abs(a[:, None]), np.abs(b[None, :]))
    ri, ci = linear_sum_assignment(cost)
    return float(np.max(cost[ri, ci]))


@dataclass(frozen=True)
class SolveReport:
    solutions: Tuple[RootSet, ...]
    failures: Dict[Tuple[int, ...], str]
    expected: int
    min_pair_distance: float
    max_residual: float

    @property
    def distinct(self) -> int:
        return len(self.solutions)

    @property
    def complete(self) -> bool:
        return self.distinct == self.expected


def solve_all(inst: BetheInstance, config: HomotopyConfig = HomotopyConfig(), distinct_tol: float = 1e-6) -> SolveReport:
    """Run every subset path; report distinct solutions and completeness."""
    n, k = inst.spec.n, inst.k
    found: List[RootSet] = []
    failures: Dict[Tuple[int, ...], str] = {}
    for p in itertools.combinations(range(1, n + 1), k):
        rs, why = None, ""
        # A duplicate endpoint means the straight ray jumped branches; rerun on detours.
        for salt in range(DUPLICATE_RETRIES + 1):
            try:
                cand = solve_from_subset(inst, p, config, detour_only=salt > 0, salt=salt)
            except err.BetheGeomError as e:
                why = f"{type(e).__name__}: {e}"
                continue
            if cand.residual > config.certify_tol:
                why = f"uncertified residual {cand.residual:.3e}"
                continue
            if any(root_set_distance(cand.roots, o.roots) <= distinct_tol for o in found):
                why = "duplicate endpoint"
                continue
            rs = cand
            break
        if rs is None:
            failures[p] = why
        else:
            found.append(rs)
    dists = [root_set_distance(x.roots, y.roots) for x, y in itertools.combinations(found, 2)]
    return SolveReport(
        tuple(found),
        failures,
        math.comb(n, k),
        min(dists) if dists else math.inf,
        max((r.residual for r in found), default=0.0),
    )


# ------------------------------------------------------- series solutions


def _series_system(inst: BetheInstance, s: Sequence[TruncatedSeries], zser: TruncatedSeries):
    h = inst.hbar_s
    a = inst.spec.a
    k = inst.k
    c = cpow(h, -inst.spec.n / 2)
    out = []
    for i in range(k):
        A = TruncatedSeries.constant(1.0, zser.order)
        B = TruncatedSeries.constant(1.0, zser.order)
        for j in range(k):
            if j != i:
                A = A * (s[i] - s[j] * h)
                B = B * (s[i] * h - s[j])
        for aj in a:
            A = A * (s[i] - aj)
            B = B * (aj * h - s[i])
        out.append(A - zser * c * B)
    return out


def perturbative_roots(inst: BetheInstance, p: Sequence[int], D: int) -> SeriesRootSet:
    """Roots as series in z about the fixed point ``p``, through order ``D``."""
    p = tuple(p)
    sad = inst.as_saddle()
    x = np.array([sad.spec.a[i - 1] for i in p], complex)
    if inst.k == 0:
        return SeriesRootSet((), p)
    _, _, JA, _ = _ClearedSystem(sad.spec.a, sad.hbar_s, inst.k).parts(x)
    if np.linalg.cond(JA) > 1e8:
        raise err.SingularJacobian("z = 0 Jacobian is ill-conditioned")
    Ji = np.linalg.inv(JA)
    zser = TruncatedSeries.variable(D)
    s = [TruncatedSeries.constant(xi, D) for xi in x]
    # Fixed Jacobian: each sweep fixes one more order.
    for _ in range(D):
        F = _series_system(sad, s, zser)
        s = [s[i] - sum((Ji[i, j] * F[j] for j in range(inst.k)), TruncatedSeries.constant(0, D))
             for i in range(inst.k)]
    # Constant terms stay exactly the a-values.
    s = [TruncatedSeries((complex(x[i]),) + tuple(si.coeffs[1:])) for i, si in enumerate(s)]
    return SeriesRootSet(tuple(s), p)


def _abs_series(x: TruncatedSeries) -> TruncatedSeries:
    return TruncatedSeries(tuple(abs(c) for c in x.coeffs))


def _series_majorant(inst: BetheInstance, s: Sequence[TruncatedSeries], D: int) -> List[TruncatedSeries]:
    """Same products as the cleared system with every coefficient and sign made positive."""
    h = abs(inst.hbar_s)
    c = abs(cpow(inst.hbar_s, -inst.spec.n / 2))
    s = [_abs_series(x) for x in s]
    zser = TruncatedSeries.variable(D)
    out = []
    for i in range(inst.k):
        A = TruncatedSeries.constant(1.0, D)
        B = TruncatedSeries.constant(1.0, D)
        for j in range(inst.k):
            if j != i:
                A = A * (s[i] + s[j] * h)
                B = B * (s[i] * h + s[j])
        for aj in inst.spec.a:
            A = A * (s[i] + abs(aj))
            B = B * (s[i] + abs(aj) * h)
        out.append(A + zser * c * B)
    return out


def series_residual(inst: BetheInstance, sr: SeriesRootSet, relative: bool = False) -> float:
    """Largest coefficient of the cleared system evaluated on the series roots.

    ``relative`` divides each coefficient by the matching coefficient of a
    positive majorant, which removes the geometric growth of high orders.
    """
    if inst.k == 0:
        return 0.0
    D = sr.roots[0].order
    sad = inst.as_saddle()
    F = _series_system(sad, sr.roots, TruncatedSeries.variable(D))
    if not relative:
        return max(abs(c) for f in F for c in f.coeffs)
    M = _series_majorant(sad, sr.roots, D)
    return max(abs(c) / m for f, g in zip(F, M) for c, m in zip(f.coeffs, g.coeffs) if m > 0)
