import os
import subprocess
import sys

import numpy as np
import pytest

from virtsrc import _backend, _purepy

compiled = pytest.mark.skipif(not _backend.HAVE_COMPILED, reason="compiled core not built")


@compiled
def test_hankel_parity():
    x = np.concatenate([np.geomspace(1e-8, 1.0, 50), np.linspace(1.0, 60.0, 400), [24.99, 25.0, 25.01, 1e3]])
    c0, c1 = _backend.core.hankel01(x)
    p0, p1 = _purepy.hankel01(x)
    np.testing.assert_allclose(c0, p0, rtol=1e-13)
    np.testing.assert_allclose(c1, p1, rtol=1e-13)


@compiled
def test_kernel_parity(rng):
    t = rng.normal(size=(40, 2))
    s = rng.normal(size=(30, 2)) * 0.5
    ang = rng.uniform(0, 2 * np.pi, 30)
    nrm = np.ascontiguousarray(np.c_[np.cos(ang), np.sin(ang)])
    for a, b in zip(_backend.core.kernel_matrices(t, s, nrm, 7.0), _purepy.kernel_matrices(t, s, nrm, 7.0)):
        np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-15)
    with pytest.raises(ValueError):
        _backend.core.kernel_matrices(s.copy(), s, nrm, 7.0)


@compiled
def test_thomas_parity(rng):
    n = 25
    diag = 4 + rng.normal(size=n) + 1j * rng.normal(size=n)
    lower = rng.normal(size=n - 1) + 0j
    upper = rng.normal(size=n - 1) + 0j
    rhs = rng.normal(size=(n, 3)) + 1j * rng.normal(size=(n, 3))
    fc = _backend.core.thomas_factor(lower, diag, upper, 1e-14)
    fp = _purepy.thomas_factor(lower, diag, upper, 1e-14)
    for a, b in zip(fc, fp):
        np.testing.assert_allclose(a, b, rtol=1e-14)
    xc = _backend.core.thomas_solve(lower, *fc, rhs)
    dense = np.diag(diag) + np.diag(lower, -1) + np.diag(upper, 1)
    np.testing.assert_allclose(dense @ xc, rhs, atol=1e-12)
    for j in range(3):
        np.testing.assert_allclose(_purepy.thomas_solve(lower, *fp, rhs[:, j]), xc[:, j], rtol=1e-13)
    with pytest.raises(ZeroDivisionError):
        _backend.core.thomas_factor(lower, np.zeros(n, complex), upper, 1e-14)


def test_get_ops():
    assert _backend.get_ops(pure=True) is _purepy
    if _backend.HAVE_COMPILED:
        assert _backend.get_ops() is _backend.core


def test_environment_forces_fallback():
    env = dict(os.environ, VIRTSRC_PURE_PYTHON="1")
    code = "from virtsrc import _backend; print(_backend.HAVE_COMPILED, _backend.get_ops().__name__)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["False", "virtsrc._purepy"]
