import cmath
import math

import mpmath as mp
import numpy as np
import pytest

from virtsrc.geometry import build_mesh, circle, flower
from virtsrc.linalg import SingularSystemError
from virtsrc.osrc import (
    OsrcOperator,
    PeriodicFem,
    apply_osrc,
    apply_preconditioner,
    build_periodic_fem,
    pade,
    pade_base_coefficients,
    rotate_pade,
)

K = 4 * math.pi


def _circle_mesh(n):
    return build_mesh(circle(1.0), K, 12, 0.5 / 12, n=n)


def _modal_symbol(op, orders):
    t = op.fem.n
    nodes_t = np.arange(t) * 2 * math.pi / t
    modes = np.exp(1j * np.outer(nodes_t, orders))
    return np.einsum("ij,ij->j", modes.conj(), op.apply(modes)) / t


def test_first_order_coefficients():
    p = pade_base_coefficients(1)
    assert p.a0 == pytest.approx(3.0)
    np.testing.assert_allclose(p.a, [-8.0])
    np.testing.assert_allclose(p.b, [-4.0])


@pytest.mark.parametrize("m", [1, 2, 4, 8, 16])
def test_value_match_at_zero(m):
    assert pade_base_coefficients(m)(0.0) == pytest.approx(1.0, abs=1e-12)


def test_order_of_contact():
    for m in (1, 2, 3, 4):
        p = pade_base_coefficients(m)
        err = [abs(p(z).real - float(mp.sqrt(1 + z))) for z in (0.2, 0.1)]
        assert err[0] / err[1] >= 2 ** (2 * m) / 2


def test_four_term_accuracy_on_interval():
    # the [4/4] approximant's true maximum error on [-0.5, 1] is about 3.64e-7 (attained at z = 1)
    z = np.linspace(-0.5, 1.0, 3001)
    err = np.abs(pade_base_coefficients(4)(z) - np.sqrt(1 + z))
    assert err.max() < 4e-7
    assert err.max() == pytest.approx(3.644e-7, rel=1e-3)


def test_rotation_identities():
    base = pade_base_coefficients(4)
    assert rotate_pade(base, 0.0) is base
    for theta in (math.pi / 2, 0.3, 1.2):
        rot = rotate_pade(base, theta)
        assert rot.a0 == pytest.approx(base.a0 * cmath.exp(0.5j * theta), abs=1e-14)
        np.testing.assert_allclose(rot.a, base.a * np.exp(1.5j * theta), rtol=1e-14)
        np.testing.assert_allclose(rot.b, (1 + base.b) * np.exp(1j * theta) - 1, rtol=1e-14)
    with pytest.raises(ValueError):
        rotate_pade(rotate_pade(base, 0.5), 0.5)


def test_first_order_rotation_by_right_angle():
    rot = rotate_pade(pade_base_coefficients(1), math.pi / 2)
    assert rot.a0 == pytest.approx(3 * cmath.exp(1j * math.pi / 4))
    assert rot.a[0] == pytest.approx(-8 * cmath.exp(3j * math.pi / 4))
    assert rot.b[0] == pytest.approx(-1 - 3j)


def test_rotated_branch_is_bounded_on_negative_axis():
    p = pade(4, math.pi / 2)
    assert np.min(np.abs(p.b.imag)) > 0
    vals = p(np.linspace(-10, 0, 20001))
    assert np.all(np.isfinite(vals)) and np.abs(vals).max() < 10
    assert np.abs(np.diff(vals)).max() < 1e-2


def test_order_bounds():
    with pytest.raises(ValueError):
        pade_base_coefficients(0)
    with pytest.raises(ValueError):
        pade_base_coefficients(17)


def test_uniform_circle_fem_matrices():
    n = 16
    fem = build_periodic_fem(_circle_mesh(n))
    ell = 2 * math.pi / n
    np.testing.assert_allclose(fem.lengths, ell, rtol=1e-13)
    row_m, row_k = fem.mass[3], fem.stiffness[3]
    np.testing.assert_allclose(row_m[2:5], ell / 6 * np.array([1, 4, 1]), rtol=1e-12)
    np.testing.assert_allclose(row_k[2:5], np.array([-1, 2, -1]) / ell, rtol=1e-12)
    assert fem.mass[0, -1] == pytest.approx(ell / 6)


def test_fem_structure_on_flower():
    mesh = build_mesh(flower(), K, 12, 0.5 / 12)
    fem = build_periodic_fem(mesh)
    ones = np.ones(mesh.n)
    np.testing.assert_allclose(fem.stiffness_matvec(ones), 0, atol=1e-10)
    assert ones @ fem.mass_matvec(ones) == pytest.approx(flower().length(), rel=1e-10)
    np.testing.assert_allclose(fem.mass.sum(axis=1), 0.5 * (fem.lengths + np.roll(fem.lengths, 1)), rtol=1e-13)
    assert np.all(np.linalg.eigvalsh(fem.mass) > 0)
    eig_k = np.linalg.eigvalsh(fem.stiffness)
    assert abs(eig_k[0]) < 1e-10 and eig_k[1] > 1e-6
    v = np.random.default_rng(1).normal(size=(mesh.n, 2))
    np.testing.assert_allclose(fem.mass_matvec(v), fem.mass @ v, atol=1e-13)


def test_degenerate_element():
    with pytest.raises(ValueError):
        build_periodic_fem(build_mesh(circle(1.0), K, 12, 0.0, n=2))


def test_constant_mode():
    mesh = _circle_mesh(128)
    fem = build_periodic_fem(mesh)
    p = pade()
    v = np.full(mesh.n, 0.7 - 0.2j)
    out = apply_osrc(fem, p, K, v)
    np.testing.assert_allclose(out, 1j * K * p(0.0) * v, atol=1e-10)
    h = 0.5 / 12
    pre = apply_preconditioner(fem, p, K, h, v)
    np.testing.assert_allclose(pre, (1 - 1j * K * h * p(0.0)) * v, atol=1e-10)
    # the rotated approximant matches sqrt(1+z) at 0 only to Padé accuracy
    assert abs(p(0.0) - 1) < 1e-3


def test_symbol_on_circle_and_refinement():
    # orders away from the branch point n ~ k; the full range |n| <= 40 is an acceptance check
    orders = np.array([0, 3, 8, 20, 40])
    errs = []
    for n in (256, 512, 1024):
        op = OsrcOperator(build_periodic_fem(_circle_mesh(n)), pade(), K)
        exact = 1j * K * pade()(-(orders**2) / K**2)
        errs.append(np.abs(_modal_symbol(op, orders) / exact - 1))
    assert errs[1].max() < 0.02
    ratio = errs[1][1:] / errs[2][1:]
    assert np.all(ratio > 3.5)


def test_symbol_close_to_true_square_root_for_propagating_modes():
    op = OsrcOperator(build_periodic_fem(_circle_mesh(1024)), pade(), K)
    orders = np.array([0, 4, 8])
    true = 1j * K * np.sqrt(1 - orders**2 / K**2 + 0j)
    assert np.max(np.abs(_modal_symbol(op, orders) / true - 1)) < 0.01


def test_linearity_and_identity_preconditioner(rng):
    mesh = build_mesh(flower(), K, 12, 0.5 / 12)
    fem = build_periodic_fem(mesh)
    op = OsrcOperator(fem, pade(), K)
    u = rng.normal(size=mesh.n) + 1j * rng.normal(size=mesh.n)
    v = rng.normal(size=mesh.n) + 1j * rng.normal(size=mesh.n)
    a, b = 0.3 - 2j, 1.7
    lhs = op.apply(a * u + b * v)
    rhs = a * op.apply(u) + b * op.apply(v)
    assert np.linalg.norm(lhs - rhs) <= 1e-12 * np.linalg.norm(lhs)
    np.testing.assert_allclose(op.precondition(u, 0.0), u)
    both = op.apply(np.c_[u, v])
    np.testing.assert_allclose(both[:, 1], op.apply(v), rtol=1e-13)
    with pytest.raises(ValueError):
        op.apply(np.ones(mesh.n + 1))


def test_damping_and_pure_backend():
    mesh = _circle_mesh(64)
    fem = build_periodic_fem(mesh)
    v = np.exp(3j * mesh.t)
    fast = OsrcOperator(fem, pade(), K, damping=0.4).apply(v)
    slow = OsrcOperator(fem, pade(), K, damping=0.4, pure=True).apply(v)
    np.testing.assert_allclose(fast, slow, rtol=1e-13)
    assert not np.allclose(fast, OsrcOperator(fem, pade(), K).apply(v))


def test_real_pole_is_singular():
    # unrotated poles lie on the negative axis; a mode hitting one exactly makes a resolvent singular
    fem = PeriodicFem(np.full(8, 2 * math.pi / 8))
    base = pade_base_coefficients(1)
    ell = 2 * math.pi / 8
    z1 = -(6 / ell**2) * (1 - math.cos(2 * math.pi / 8)) / (2 + math.cos(2 * math.pi / 8))
    k = math.sqrt(z1 / base.b[0])
    with pytest.raises(SingularSystemError):
        OsrcOperator(fem, base, k)
