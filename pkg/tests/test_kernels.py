import math

import numpy as np
import pytest

from virtsrc.kernels import kernel_double, kernel_matrices, phi_2d

K = 4 * math.pi


def test_phi_value_and_symmetry():
    x, z = np.array([0.3, -0.2]), np.array([1.3, -0.2])
    assert phi_2d(1.0, x, z) == pytest.approx(-0.02206424105 + 0.19129942164j, abs=1e-10)
    assert phi_2d(K, x, z) == phi_2d(K, z, x)


def test_phi_solves_helmholtz():
    z = np.zeros(2)
    x = np.array([0.4, 0.3])
    d = 1e-4
    lap = sum(phi_2d(K, x + s * e, z) for e in (np.array([d, 0]), np.array([0, d])) for s in (1, -1))
    lap = (lap - 4 * phi_2d(K, x, z)) / d**2
    assert abs(lap + K**2 * phi_2d(K, x, z)) <= 1e-4 * K**2 * abs(phi_2d(K, x, z))


def test_double_layer_is_source_normal_derivative():
    x = np.array([0.1, 0.2])
    z = x + 0.5 * np.array([math.cos(1.0), math.sin(1.0)])
    for angle in (0.0, 0.6, 2.0):
        nu = np.array([math.cos(angle), math.sin(angle)])
        d = 1e-6
        fd = (phi_2d(K, x, z + d * nu) - phi_2d(K, x, z - d * nu)) / (2 * d)
        assert abs(kernel_double(K, x, z, nu) - fd) <= 1e-6 * max(1.0, abs(fd))


def test_double_layer_reference_value_and_orthogonality():
    x, z = np.array([1.0, 0.0]), np.zeros(2)
    # nu along x - z: (ik/4) H_1(k) at k = 1, i.e. (i/4)(J_1(1) + i Y_1(1))
    assert kernel_double(1.0, x, z, np.array([1.0, 0.0])) == pytest.approx(0.19530320533 + 0.11001264644j, abs=1e-10)
    assert kernel_double(1.0, x, z, np.array([0.0, 1.0])) == 0


def test_coincident_points_raise():
    with pytest.raises(ValueError):
        phi_2d(K, np.zeros(2), np.zeros(2))
    with pytest.raises(ValueError):
        kernel_matrices(K, np.zeros((1, 2)), np.zeros((1, 2)), np.array([[1.0, 0.0]]))


@pytest.mark.parametrize("pure", [False, True])
def test_matrices_match_pointwise_kernels(pure, rng):
    tg = rng.normal(size=(7, 2)) + 3
    src = rng.normal(size=(5, 2))
    ang = rng.uniform(0, 2 * math.pi, 5)
    nrm = np.c_[np.cos(ang), np.sin(ang)]
    ks, kd = kernel_matrices(K, tg, src, nrm, pure=pure)
    for i in range(7):
        for j in range(5):
            assert ks[i, j] == pytest.approx(phi_2d(K, tg[i], src[j]), rel=1e-13)
            assert kd[i, j] == pytest.approx(kernel_double(K, tg[i], src[j], nrm[j]), rel=1e-12, abs=1e-15)
