import math

import mpmath as mp
import numpy as np
import pytest

from virtsrc.geometry import circle, flower
from virtsrc.reference import (
    MANUFACTURED_SOURCES,
    ManufacturedField,
    circle_dtn_symbols,
    circle_exact_dtn_eigenvalue,
    circle_virtual_source_eigenvalue,
    jacobi_anger,
    manufactured_field,
    mie_soft_circle,
)
from virtsrc.specfun import hankel1, hankel1_derivative

K = 4 * math.pi


def _fd_helmholtz_residual(fun, k, x, d):
    ex, ey = np.array([d, 0.0]), np.array([0.0, d])
    lap = (fun(x + ex) + fun(x - ex) + fun(x + ey) + fun(x - ey) - 4 * fun(x)) / d**2
    return abs(lap + k**2 * fun(x)), abs(fun(x))


def test_manufactured_symmetry():
    for x in ([2.0, 0.7], [-1.3, 1.9], [0.2, -2.5]):
        x = np.array(x)
        f = manufactured_field(K, x)
        assert manufactured_field(K, x * [1, -1]) == pytest.approx(f, rel=1e-13)
        assert manufactured_field(K, x * [-1, 1]) == pytest.approx(f, rel=1e-13)


def test_manufactured_value_against_oracle():
    x = np.array([2.0, 0.0])
    ref = sum(0.25j * complex(mp.hankel1(0, float(np.linalg.norm(x - y)))) for y in MANUFACTURED_SOURCES)
    assert manufactured_field(1.0, x) == pytest.approx(ref, rel=1e-13)


def test_manufactured_is_a_helmholtz_solution(rng):
    field = ManufacturedField(K)
    field.check_inside(flower())
    d = 1e-4 * 0.5
    pts = [np.array([2.0, 0.0])]
    for _ in range(20):
        r, a = rng.uniform(1.6, 3.0), rng.uniform(0, 2 * math.pi)
        pts.append(np.array([r * math.cos(a), r * math.sin(a)]))
    for x in pts:
        res, mag = _fd_helmholtz_residual(field, K, x, d)
        assert res <= 1e-3 * K**2 * mag


def test_manufactured_errors():
    with pytest.raises(ValueError):
        manufactured_field(K, MANUFACTURED_SOURCES[0])
    with pytest.raises(ValueError):
        ManufacturedField(K).check_inside(circle(0.5))


def test_mie_boundary_condition():
    th = np.linspace(0, 2 * math.pi, 720, endpoint=False)
    pts = np.c_[np.cos(th), np.sin(th)]
    res = mie_soft_circle(K, 1.0, pts, full=True)
    assert np.abs(res.total).max() < 1e-10
    assert res.nmax == math.ceil(K) + 40
    assert res.tail < 1e-12


def test_mie_far_field_decay():
    a, _ = mie_soft_circle(1.0, 1.0, np.array([200.0, 0.0]))
    b, _ = mie_soft_circle(1.0, 1.0, np.array([400.0, 0.0]))
    assert abs(b) / abs(a) == pytest.approx(2**-0.5, rel=0.05)


def test_mie_solves_helmholtz():
    x = np.array([1.4, -0.9])
    res, mag = _fd_helmholtz_residual(lambda p: mie_soft_circle(K, 1.0, p)[0], K, x, 1e-4 * 0.5)
    assert res <= 1e-3 * K**2 * mag


def test_mie_guards():
    with pytest.raises(ValueError):
        mie_soft_circle(K, 1.0, np.array([0.5, 0.0]))
    with pytest.raises(ValueError):
        mie_soft_circle(200.0, 1.0, np.array([2.0, 0.0]))
    with pytest.raises(ArithmeticError):
        mie_soft_circle(K, 1.0, np.array([2.0, 0.0]), nmax=5)


def test_jacobi_anger():
    x = np.array([10 * math.cos(0.7), 10 * math.sin(0.7)])
    assert abs(jacobi_anger(1.0, x) - np.exp(1j * x[0])) < 1e-10


def test_virtual_source_eigenvalue():
    assert circle_virtual_source_eigenvalue(K, 1.0, 1e-9, 0) == pytest.approx(1.0, abs=1e-7)
    ref = complex(mp.hankel1(7, K) / mp.hankel1(7, K * 0.9))
    assert circle_virtual_source_eigenvalue(K, 1.0, 0.1, -7) == pytest.approx(ref, rel=1e-12)
    mags = np.abs(circle_virtual_source_eigenvalue(K, 1.0, 0.1, np.arange(13, 80)))
    assert np.all(np.diff(mags) < 0)
    with pytest.raises(ValueError):
        circle_virtual_source_eigenvalue(K, 1.0, 1.0, 3)


def test_virtual_source_eigenvalue_geometric_decay():
    # lambda_n (1 - h/a)^-|n| -> 1 as |n| grows, with an exp((x1^2 - x2^2)/4n) correction
    orders = np.array([60, 200, 1000])
    ratio = np.abs(circle_virtual_source_eigenvalue(K, 1.0, 0.1, orders)) / 0.9**orders
    correction = np.exp((K**2 - (0.9 * K) ** 2) / (4 * orders))
    np.testing.assert_allclose(ratio, correction, rtol=0.01)
    assert abs(ratio[-1] - 1) < 0.01


@pytest.mark.xfail(strict=True, reason="at |n| = 60 the O(x^2/n) correction is still 13.7%")
def test_virtual_source_eigenvalue_geometric_decay_at_60():
    assert abs(circle_virtual_source_eigenvalue(K, 1.0, 0.1, 60)) / 0.9**60 == pytest.approx(1.0, rel=0.1)


def test_exact_dtn_eigenvalue():
    assert circle_exact_dtn_eigenvalue(K, 1.0, 0) == pytest.approx(-K * hankel1(1, K) / hankel1(0, K), rel=1e-13)
    for n in (1, 5, 12, 30):
        ref = K * hankel1_derivative(n, K) / hankel1(n, K)
        assert circle_exact_dtn_eigenvalue(K, 1.0, n) == pytest.approx(ref, rel=1e-12)
    for n in range(0, 12):
        assert circle_exact_dtn_eigenvalue(K, 1.0, n).imag > 0
    gamma = circle_exact_dtn_eigenvalue(K, 1.0, 400)
    assert gamma.real == pytest.approx(-400, rel=0.01) and gamma.real < 0
    table = circle_dtn_symbols(K, 1.0, 50)
    np.testing.assert_allclose(circle_exact_dtn_eigenvalue(K, 1.0, [-3, 3]), table[[3, 3]])


def test_modal_formulas_are_consistent():
    # the virtual-source eigenvalue is the ratio of the modal radiating solution at a and a - h
    k, a, h, n = 3.0, 1.5, 0.2, 4
    assert circle_virtual_source_eigenvalue(k, a, h, n) == pytest.approx(hankel1(n, k * a) / hankel1(n, k * (a - h)), rel=1e-13)
