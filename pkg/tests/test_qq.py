import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bethegeom import errors as err
from bethegeom.bethe import BetheInstance, solve_all
from bethegeom.numerics import Polynomial
from bethegeom.qq import (
    CartanData,
    QQInstance,
    backlund,
    backlund_residual,
    block_gauge,
    miura_connection,
    plucker_block,
    plucker_block_formula,
    qq_residual,
    qq_to_bethe_residual,
    reflected_twist,
    sample_points,
    sl2_gauge,
    solve_qminus,
    swapped_instance,
    xi_factors,
    z_twist_verify,
)
from bethegeom.suites import flag_qq_instance, sl2_qq_instance

from conftest import draw_chain, draw_complex
from test_spinchain import QUAD_CHAIN, QUAD_ROOTS

ONE = Polynomial((1.0,))
A1 = CartanData.type_a(1)
A2 = CartanData.type_a(2)


def test_xi_factors_examples():
    z = 0.6 + 0.3j
    xi, xit = xi_factors([z], A1)
    assert np.allclose([xit[0], xi[0]], [z, 1 / z])
    z1, z2 = 0.6 + 0.3j, -0.2 + 0.9j
    xi, xit = xi_factors([z1, z2], A2)
    assert np.allclose(xit, [z1 / z2, z2])
    assert np.allclose(xi, [1 / z1, z1 / z2])
    assert np.allclose(xi_factors([1, 1, 1], CartanData.type_a(3)), 1)


def test_zero_twist():
    with pytest.raises(err.ZeroTwist):
        xi_factors([0], A1)


def test_rank_one_residual_form(rng):
    z, h = 0.7 + 0.2j, 0.5 * np.exp(0.4j)
    qp = Polynomial.from_roots([draw_complex(rng)])
    qm = Polynomial.from_roots([draw_complex(rng), draw_complex(rng)])
    lam = Polynomial.from_roots([draw_complex(rng) for _ in range(3)])
    inst = QQInstance(A1, (lam,), (z,), (qp,), (qm,))
    for u in sample_points(1, 5):
        direct = z * qp(h * u) * qm(u) - qm(h * u) * qp(u) / z - lam(u)
        assert abs(qq_residual(inst, h)[0](u) - direct) < 1e-12 * max(1.0, abs(direct))


def test_constant_solution():
    z = 0.7 + 0.2j
    inst = QQInstance(A1, (ONE,), (z,), (ONE,), (Polynomial((1 / (z - 1 / z),)),))
    assert qq_residual(inst, 0.5)[0].max_abs_coeff() < 1e-15
    solved = solve_qminus(QQInstance(A1, (ONE,), (z,), (ONE,)), 0.5)
    assert abs(solved.Qminus[0].coeffs[0] - 1 / (z - 1 / z)) < 1e-14


def test_residual_bilinear_rescaling(rng):
    z, h = 0.7 + 0.2j, 0.5 * np.exp(0.4j)
    inst = solve_qminus(QQInstance(A1, (Polynomial.from_roots([1.1, -0.5j]),), (z,), (ONE,)), h)
    c = 2.5 - 1j
    scaled = QQInstance(A1, (inst.Lam[0] * c,), (z,), inst.Qplus, (inst.Qminus[0] * c,))
    assert qq_residual(scaled, h)[0].max_abs_coeff() < 1e-13


@pytest.mark.parametrize("v", QUAD_ROOTS)
def test_qminus_from_quadratic_root(v):
    inst, hq = sl2_qq_instance(QUAD_CHAIN, [v])
    solved = solve_qminus(inst, hq)
    assert qq_residual(solved, hq)[0].max_abs_coeff() < 1e-10
    assert max(abs(x) for x in qq_to_bethe_residual(solved, hq)) < 1e-10


def test_qminus_degenerate_twist():
    with pytest.raises(err.BetheGeomError):
        solve_qminus(QQInstance(A1, (ONE,), (1.0,), (ONE,)), 0.5)


def test_qq_to_bethe_empty():
    inst = solve_qminus(QQInstance(A1, (Polynomial.from_roots([1.0, 2.0]),), (0.6,), (ONE,)), 0.5)
    assert qq_to_bethe_residual(inst, 0.5) == []


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=10)
def test_qq_to_bethe_negative_control(seed):
    rng = np.random.default_rng(seed)
    lam = Polynomial.from_roots([draw_complex(rng) for _ in range(3)])
    inst = QQInstance(A1, (lam,), (draw_complex(rng, 0.5, 0.9),), (Polynomial.from_roots([draw_complex(rng)]),))
    assert max(abs(x) for x in qq_to_bethe_residual(inst, draw_complex(rng, 0.3, 0.7))) > 1e-3


@given(st.integers(0, 2**32 - 1), st.integers(2, 4))
@settings(max_examples=8)
def test_bethe_solutions_give_qq_solutions(seed, n):
    rng = np.random.default_rng(seed)
    spec = draw_chain(rng, n)
    k = int(rng.integers(1, n))
    for rs in solve_all(BetheInstance(spec, k)).solutions:
        inst, hq = sl2_qq_instance(spec, rs.roots)
        solved = solve_qminus(inst, hq)
        assert max(p.max_abs_coeff() for p in qq_residual(solved, hq)) < 1e-10
        assert max(abs(x) for x in qq_to_bethe_residual(solved, hq)) < 1e-9


# ------------------------------------------------------------ connections


def _sl2_solved():
    inst, hq = sl2_qq_instance(QUAD_CHAIN, [QUAD_ROOTS[0]])
    return solve_qminus(inst, hq), hq


def test_rank_one_connection_entries():
    inst, h = _sl2_solved()
    conn = miura_connection(inst, h)
    qp, lam, z = inst.Qplus[0], inst.Lam[0], inst.zeta[0]
    for u in sample_points(3, 5):
        expected = np.array([[z * qp(h * u) / qp(u), lam(u)], [0, qp(u) / (z * qp(h * u))]])
        assert np.allclose(conn.A(u), expected, atol=1e-13)


def test_constant_connection():
    z1, z2 = 0.6 + 0.1j, 0.8 - 0.3j
    inst = QQInstance(A2, (ONE, ONE), (z1, z2), (ONE, ONE))
    conn = miura_connection(inst, 0.5)
    assert np.allclose(conn.A(0.3), conn.A(1.7 - 2j))


def test_connection_diagonal_part():
    inst, _ = flag_qq_instance([1.1, -0.5 + 0.7j, 0.2 - 1.3j], [0.7, 1.2j, -0.9 + 0.1j], 0.5 * np.exp(0.3j))
    h = 0.5 * np.exp(0.3j)
    conn = miura_connection(inst, h)
    for u in sample_points(4, 5):
        g = [conn.g[j](u) for j in range(2)]
        assert np.allclose(np.diag(conn.A(u)), [g[0], g[1] / g[0], 1 / g[1]], atol=1e-12)


def test_z_twist_trivial():
    Z = np.diag([0.6, 1 / 0.6])
    assert z_twist_verify(lambda u: Z, Z, lambda u: np.eye(2), 0.5, [0.3, 1.1]) == 0


def test_z_twist_rank_one():
    inst, h = _sl2_solved()
    Z, v = sl2_gauge(inst)
    assert z_twist_verify(miura_connection(inst, h).A, Z, v, h, sample_points(5)) < 1e-10


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_plucker_blocks_rank_two(seed):
    rng = np.random.default_rng(seed)
    h = draw_complex(rng, 0.3, 0.7)
    inst, _ = flag_qq_instance([draw_complex(rng) for _ in range(3)], [draw_complex(rng) for _ in range(3)], h,
                               seed=seed)
    conn = miura_connection(inst, h)
    pts = sample_points(seed)
    for i in (1, 2):
        Z, v = block_gauge(inst, i)
        assert z_twist_verify(lambda u, i=i: plucker_block(conn, i, u), Z, v, h, pts) < 1e-9
        for u in pts[:3]:
            assert np.allclose(plucker_block(conn, i, u), plucker_block_formula(conn, i, u), atol=1e-10)


def test_backlund_rank_one():
    inst, h = _sl2_solved()
    assert backlund_residual(miura_connection(inst, h), 1, sample_points(6)) < 1e-9


@pytest.mark.parametrize("i", [1, 2])
def test_backlund_rank_two(i):
    h = 0.45 * np.exp(0.8j)
    inst, _ = flag_qq_instance([1.1, -0.5 + 0.7j, 0.2 - 1.3j], [0.7, 1.2j, -0.9 + 0.1j], h)
    conn = miura_connection(inst, h)
    assert backlund_residual(conn, i, sample_points(7)) < 1e-9
    # The transformed connection carries the reflected twist.
    ref = swapped_instance(inst, i)
    assert ref.zeta == reflected_twist(inst.zeta, inst.cartan, i)
    gauged = backlund(conn, i)
    for u in sample_points(8, 3):
        expected = [ref.zeta[j] * ref.Qplus[j](h * u) / ref.Qplus[j](u) for j in range(2)]
        assert np.allclose([gauged.g[j](u) for j in range(2)], expected, atol=1e-9)


def test_backlund_needs_qminus():
    inst = QQInstance(A1, (ONE,), (0.6,), (ONE,))
    with pytest.raises(ValueError):
        backlund(miura_connection(inst, 0.5), 1).A(0.3)


def test_cartan_guards():
    with pytest.raises(err.InvariantViolation):
        QQInstance(A2, (ONE,), (0.5, 0.6), (ONE, ONE))
    with pytest.raises(err.InvariantViolation):
        QQInstance(A1, (ONE,), (0.5,), (Polynomial((1.0, 2.0)),))
