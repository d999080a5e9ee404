"""Verification suites shared by the command line and the experiment scripts.

Each suite takes a chain, its settings and a seeded generator, and returns
a list of :class:`Check` records.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from . import errors as err
from .bethe import SADDLE, BetheInstance, HomotopyConfig, perturbative_roots, relative_residual, solve_all
from .numerics import Polynomial, cpow, elementary_symmetric
from .qq import (
    CartanData,
    QQInstance,
    backlund_residual,
    block_gauge,
    miura_connection,
    plucker_block,
    qq_residual,
    qq_to_bethe_residual,
    sample_points,
    sl2_gauge,
    solve_qminus,
    z_twist_verify,
)
from .spinchain import (
    BaxterPair,
    ChainSpec,
    bethe_vector,
    block_states,
    embed_block,
    embed_two_site,
    off_block_norm,
    operator_identity_residuals,
    qkz_operator,
    r_matrix,
    transfer,
    transfer_eigenvalue,
)
from .vertex import FixedPoint, bethe_symmetric_series, elementary, eigenvalue_limit
from .wronskian import extract_vk, lagrangian_residual, section_residual, solve_flag_sections, trs_from_sections, trs_hamiltonian


@dataclass
class Check:
    name: str
    inputs: Dict[str, Any]
    residual: float
    tolerance: float
    seconds: float = 0.0
    note: str = ""

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual)) and self.residual < self.tolerance


@dataclass
class SuiteSettings:
    k: Optional[int] = None
    D: int = 6
    nodes: Optional[List[float]] = None
    precision: str = "std"
    solver: HomotopyConfig = field(default_factory=HomotopyConfig)


def _timed(fn: Callable[[], Check]) -> Check:
    t0 = time.perf_counter()
    c = fn()
    c.seconds = time.perf_counter() - t0
    return c


def _rc(rng: np.random.Generator) -> complex:
    return complex(rng.uniform(0.5, 2.0) * np.exp(2j * np.pi * rng.uniform()))


def _ks(spec: ChainSpec, s: SuiteSettings, kmax: int) -> List[int]:
    if s.k is not None:
        return [s.k]
    return list(range(0, min(spec.n, kmax) + 1))


def _rel_comm(A: np.ndarray, B: np.ndarray) -> float:
    return float(np.linalg.norm(A @ B - B @ A) / (np.linalg.norm(A) * np.linalg.norm(B)))


# ------------------------------------------------------------------ suites


def spectrum_suite(spec: ChainSpec, s: SuiteSettings, rng: np.random.Generator) -> List[Check]:
    out = []

    def commut():
        worst = 0.0
        for _ in range(20):
            worst = max(worst, _rel_comm(transfer(spec, _rc(rng)).matrix, transfer(spec, _rc(rng)).matrix))
        return Check("transfer_commutativity", {"pairs": 20}, worst, 1e-10)

    def weight():
        return Check("transfer_weight_conservation", {}, off_block_norm(transfer(spec, _rc(rng))), 1e-13)

    def ybe():
        worst = 0.0
        h = spec.hbar
        for _ in range(20):
            x, y, w = _rc(rng), _rc(rng), _rc(rng)
            R12 = embed_two_site(r_matrix(x / y, h), 0, 1, 3)
            R13 = embed_two_site(r_matrix(x / w, h), 0, 2, 3)
            R23 = embed_two_site(r_matrix(y / w, h), 1, 2, 3)
            worst = max(worst, float(np.linalg.norm(R12 @ R13 @ R23 - R23 @ R13 @ R12)))
        return Check("yang_baxter", {"triples": 20}, worst, 1e-12)

    def qkz():
        if spec.n > 4:
            return Check("qkz_commutativity", {"skipped": "n > 4"}, 0.0, 1e-9, note="skipped")
        Hs = [qkz_operator(spec, 1.0, i).matrix for i in range(1, spec.n + 1)]
        worst = max((float(np.linalg.norm(A @ B - B @ A)) for A, B in itertools.combinations(Hs, 2)), default=0.0)
        return Check("qkz_commutativity", {}, worst, 1e-9)

    for fn in (commut, weight, ybe, qkz):
        out.append(_timed(fn))
    return out


def _solve_k(spec: ChainSpec, k: int, s: SuiteSettings):
    return solve_all(BetheInstance(spec, k), s.solver)


def bethe_suite(spec: ChainSpec, s: SuiteSettings, rng: np.random.Generator) -> List[Check]:
    out = []
    for k in _ks(spec, s, 3):
        t0 = time.perf_counter()
        rep = _solve_k(spec, k, s)
        dt = time.perf_counter() - t0
        out.append(Check("bethe_completeness", {"k": k, "found": rep.distinct, "expected": rep.expected,
                          "solutions": [[str(complex(v)) for v in rs.roots] for rs in rep.solutions]},
                         float(abs(rep.expected - rep.distinct)), 0.5, dt,
                         note="; ".join(f"{p}: {m}" for p, m in rep.failures.items() if m != "duplicate endpoint")))
        out.append(Check("bethe_residual", {"k": k}, rep.max_residual, 1e-9))

        def eig(rep=rep, k=k):
            worst = 0.0
            for rs in rep.solutions:
                psi = embed_block(bethe_vector(spec, rs.roots), spec.n, k)
                for _ in range(5):
                    u = _rc(rng)
                    r = transfer(spec, u).matrix @ psi - transfer_eigenvalue(spec, rs.roots, u) * psi
                    worst = max(worst, float(np.linalg.norm(r) / np.linalg.norm(psi)))
            return Check("bethe_eigen_residual", {"k": k}, worst, 1e-8)

        def rank(rep=rep, k=k):
            if not rep.solutions:
                return Check("bethe_vector_rank", {"k": k}, math.inf, 1.0)
            M = np.array([bethe_vector(spec, rs.roots) for rs in rep.solutions])
            M = M / np.linalg.norm(M, axis=1)[:, None]
            sv = np.linalg.svd(M, compute_uv=False)
            full = len(sv) == rep.expected
            # Residual is 1/sigma_min, which must stay below 1e6.
            return Check("bethe_vector_rank", {"k": k, "sigma_min": float(sv[-1])},
                         (1 / sv[-1]) if full and sv[-1] > 0 else math.inf, 1e6)

        def dictionary(rep=rep, k=k):
            sad = BetheInstance(spec, k, SADDLE)
            worst = max((relative_residual(sad, rs.roots) for rs in rep.solutions), default=0.0)
            return Check("aba_saddle_dictionary", {"k": k}, worst, 1e-10)

        for fn in (eig, rank, dictionary):
            out.append(_timed(fn))
        if spec.n == 2 and k == 1:
            out.append(_timed(lambda rep=rep: _quadratic_oracle(spec, rep)))
    return out


def quadratic_roots(spec: ChainSpec) -> np.ndarray:
    """Roots of (h^1/2 v - h^-1/2 a1)(h^1/2 v - h^-1/2 a2) - zeta^-2 (v - a1)(v - a2) for n = 2, k = 1."""
    a1, a2 = spec.a
    h2 = cpow(spec.hbar, 0.5)
    z2 = spec.zeta**-2
    c2 = h2 * h2 - z2
    c1 = -(a1 + a2) + z2 * (a1 + a2)
    c0 = a1 * a2 / (h2 * h2) - z2 * a1 * a2
    return np.roots([c2, c1, c0])


def _quadratic_oracle(spec: ChainSpec, rep) -> Check:
    q = quadratic_roots(spec)
    worst = 0.0
    for rs in rep.solutions:
        worst = max(worst, float(np.min(np.abs(q - rs.roots[0])) / abs(rs.roots[0])))
    return Check("bethe_quadratic_oracle", {"roots": [str(complex(x)) for x in q]}, worst, 1e-10)


def qoperator_suite(spec: ChainSpec, s: SuiteSettings, rng: np.random.Generator) -> List[Check]:
    out = []
    if spec.n > 5:
        return [Check("q_operator", {"skipped": "n > 5"}, 0.0, 1.0, note="skipped")]
    pair = BaxterPair(spec)

    def commute():
        worst = 0.0
        for _ in range(3):
            T = transfer(spec, _rc(rng)).matrix
            for L in pair.plus:
                worst = max(worst, _rel_comm(L, T))
        return Check("exterior_power_commutes_with_transfer", {}, worst, 1e-9)

    def eigen():
        worst = 0.0
        for k in _ks(spec, s, 3):
            rep = _solve_k(spec, k, s)
            for rs in rep.solutions:
                psi = embed_block(bethe_vector(spec, rs.roots), spec.n, k)
                x = _rc(rng)
                r = pair(x) @ psi - np.prod([1 - x * v for v in rs.roots]) * psi
                worst = max(worst, float(np.linalg.norm(r) / np.linalg.norm(psi)))
        return Check("q_operator_eigenvalues", {}, worst, 1e-7)

    def identities():
        worst = {"tq_plus": 0.0, "tq_minus": 0.0, "wronskian": 0.0}
        for _ in range(3):
            r = operator_identity_residuals(spec, spec.z, _rc(rng), pair)
            for key in worst:
                worst[key] = max(worst[key], getattr(r, key))
        return [Check(f"operator_identity_{key}", {}, val, 1e-8) for key, val in worst.items()]

    out.append(_timed(commute))
    out.append(_timed(eigen))
    if spec.n <= 4:
        out.extend(identities())
    return out


def vertex_suite(spec: ChainSpec, s: SuiteSettings, rng: np.random.Generator) -> List[Check]:
    out = []
    order = min(s.D, 3)
    for k in _ks(spec, s, 2):
        if k == 0:
            continue
        for p in itertools.combinations(range(1, spec.n + 1), k):
            pt = FixedPoint.of(spec, p)
            sr = perturbative_roots(BetheInstance(spec, k, SADDLE), p, order)
            for l in range(1, k + 1):
                def run(pt=pt, sr=sr, l=l, p=p, k=k):
                    try:
                        ev = eigenvalue_limit(spec, pt, elementary(l), order, nodes=s.nodes, precision=s.precision)
                    except err.ExtrapolationDiverged as e:
                        return Check("vertex_vs_bethe", {"k": k, "p": list(p), "l": l}, math.inf, 1e-3, note=str(e))
                    bs = bethe_symmetric_series(pt, elementary(l), sr)
                    diff = max(abs(x - y) for x, y in zip(ev.coeffs, bs.coeffs))
                    return Check("vertex_vs_bethe", {"k": k, "p": list(p), "l": l}, float(diff), 1e-3)
                out.append(_timed(run))
    return out


def sl2_qq_instance(spec: ChainSpec, roots) -> tuple:
    """QQ data for a Bethe solution: hbar_Q = 1/hbar, zeta_Q = zeta hbar^{-h/4}, Lam = prod (u - a_i)."""
    n, k = spec.n, len(roots)
    hq = 1 / spec.hbar
    zq = spec.zeta * cpow(spec.hbar, -(n - 2 * k) / 4)
    inst = QQInstance(CartanData.type_a(1), (Polynomial.from_roots(spec.a),), (zq,), (Polynomial.from_roots(roots),))
    return inst, hq


def qq_suite(spec: ChainSpec, s: SuiteSettings, rng: np.random.Generator) -> List[Check]:
    out = []
    for k in _ks(spec, s, 3):
        if k == 0:
            continue
        rep = _solve_k(spec, k, s)
        qq_worst, bethe_worst, twist_worst, back_worst = 0.0, 0.0, 0.0, 0.0
        t0 = time.perf_counter()
        for rs in rep.solutions:
            inst, hq = sl2_qq_instance(spec, rs.roots)
            inst = solve_qminus(inst, hq)
            qq_worst = max(qq_worst, max(p.max_abs_coeff() for p in qq_residual(inst, hq)))
            bethe_worst = max(bethe_worst, max(abs(x) for x in qq_to_bethe_residual(inst, hq)))
            conn = miura_connection(inst, hq)
            pts = sample_points(int(rng.integers(2**31)))
            Z, v = sl2_gauge(inst)
            twist_worst = max(twist_worst, z_twist_verify(conn.A, Z, v, hq, pts))
            back_worst = max(back_worst, backlund_residual(conn, 1, pts))
        dt = time.perf_counter() - t0
        out.append(Check("qq_residual", {"k": k}, qq_worst, 1e-10, dt))
        out.append(Check("qq_to_bethe", {"k": k}, bethe_worst, 1e-9))
        out.append(Check("z_twist_sl2", {"k": k}, twist_worst, 1e-9))
        out.append(Check("backlund_sl2", {"k": k}, back_worst, 1e-9))
    return out


def flag_qq_instance(a, xi, hbar, seed: int = 0):
    """Rank-2 QQ data built from degree-1 sections: Q^1 = V_2, Q^2 = V_1, Lam = (prod(u - a), 1)."""
    xi = np.array(xi, complex)
    xi = xi / np.prod(xi) ** (1 / 3)
    data = solve_flag_sections(2, a, tuple(xi), hbar, seed=seed)
    V1 = extract_vk(data, 1)[1]
    V2 = extract_vk(data, 2)[1]
    zeta = (xi[0], xi[0] * xi[1])
    inst = QQInstance(CartanData.type_a(2), (Polynomial.from_roots(a), Polynomial((1.0,))), zeta, (V2, V1))
    return solve_qminus(inst, hbar), data


def oper_suite(spec: ChainSpec, s: SuiteSettings, rng: np.random.Generator) -> List[Check]:
    out: List[Check] = []
    a = list(spec.a[:3]) if spec.n >= 3 else [_rc(rng) for _ in range(3)]
    xi = [_rc(rng) for _ in range(3)]
    h = 1 / spec.hbar

    def run():
        inst, _ = flag_qq_instance(a, xi, h, seed=int(rng.integers(2**31)))
        conn = miura_connection(inst, h)
        pts = sample_points(int(rng.integers(2**31)))
        checks = [Check("qq_residual_rank2", {}, max(p.max_abs_coeff() for p in qq_residual(inst, h)), 1e-10)]
        for i in (1, 2):
            Z, v = block_gauge(inst, i)
            checks.append(Check("miura_plucker_block", {"i": i},
                                z_twist_verify(lambda u, i=i: plucker_block(conn, i, u), Z, v, h, pts), 1e-9))
            checks.append(Check("backlund_rank2", {"i": i}, backlund_residual(conn, i, pts), 1e-9))
        checks.append(Check("miura_determinant", {}, max(abs(np.linalg.det(conn.A(u)) - 1) for u in pts), 1e-10))
        return checks

    out.extend(run())
    return out


def trs_suite(spec: ChainSpec, s: SuiteSettings, rng: np.random.Generator) -> List[Check]:
    if spec.n > 3:
        return [Check("trs", {"skipped": "n > 3"}, 0.0, 1.0, note="skipped")]
    n = spec.n
    xi = tuple(_rc(rng) for _ in range(n))
    data = solve_flag_sections(n - 1, spec.a, xi, spec.hbar, seed=int(rng.integers(2**31)))
    out = [Check("flag_sections", {"n": n}, section_residual(data, spec.a), 1e-10)]
    trs = trs_from_sections(data)
    res = lagrangian_residual(trs, spec.a)
    for k in range(1, n + 1):
        H, e = trs_hamiltonian(trs, k), complex(elementary_symmetric(spec.a, k))
        out.append(Check("trs_lagrangian", {"k": k, "H_k": str(H), "e_k": str(e), "H_k/e_k": str(H / e)},
                         float(abs(res[k - 1])), 1e-8))
    return out


SUITES = {
    "spectrum": [spectrum_suite],
    "bethe": [bethe_suite],
    "qoperator": [qoperator_suite],
    "vertex": [vertex_suite],
    "qq": [qq_suite],
    "oper": [oper_suite],
    "trs": [trs_suite],
}

VERIFY_ALL_ORDER = ("spectrum", "bethe", "qoperator", "vertex", "qq", "oper", "trs")
