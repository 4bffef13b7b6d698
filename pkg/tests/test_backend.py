"""Backend selection: the JIT and pure-numpy kernels are interchangeable."""

import os
import subprocess
import sys

import numpy as np
import pytest

from bicap import _kern_numpy, backend
from bicap.backend import backend_name, grad_energy3d, lap3d, thread_count

try:
    from bicap import _kern_numba
except ImportError:  # pragma: no cover - numba is installed in CI
    _kern_numba = None


def _rand(n, seed=0):
    return np.random.default_rng(seed).standard_normal((n, n, n))


@pytest.mark.skipif(_kern_numba is None, reason="numba not importable")
def test_backends_agree_on_laplacian():
    u = _rand(24)
    out_a = np.zeros_like(u)
    out_b = np.zeros_like(u)
    _kern_numpy.lap3d(u, 4.0, out_a)
    _kern_numba.lap3d(u, 4.0, out_b)
    assert np.array_equal(out_a, out_b)  # identical arithmetic per node


@pytest.mark.skipif(_kern_numba is None, reason="numba not importable")
def test_backends_agree_on_gradient_energy():
    u = _rand(24, seed=1)
    a = _kern_numpy.grad_energy3d(u, 0.125)
    b = _kern_numba.grad_energy3d(u, 0.125)
    # summation order differs between the vectorized and loop versions
    assert b == pytest.approx(a, rel=1e-12)


def test_laplacian_leaves_the_shell_untouched():
    u = _rand(12, seed=2)
    out = np.full_like(u, 7.0)
    lap3d(u, 1.0, out)
    assert np.all(out[0, :, :] == 7.0) and np.all(out[-1, :, :] == 7.0)
    assert np.all(out[:, 0, :] == 7.0) and np.all(out[:, :, -1] == 7.0)
    # interior matches the numpy reference
    ref = np.zeros_like(u)
    _kern_numpy.lap3d(u, 1.0, ref)
    assert np.allclose(out[1:-1, 1:-1, 1:-1], ref[1:-1, 1:-1, 1:-1], rtol=1e-13, atol=0)


def test_gradient_energy_of_linear_field():
    n, h = 16, 0.25
    x = np.arange(n) * h
    u = np.broadcast_to(x[:, None, None], (n, n, n)).copy()
    # (n-1)^3 faces with slope 1 in x only: sum dx^2 * h = (n-1)^3 h^3
    assert grad_energy3d(u, h) == pytest.approx((n - 1) ** 3 * h**3, rel=1e-12)


def test_env_flag_selects_the_backend():
    code = "import bicap.backend as b; print(b.backend_name())"
    for req in ("numpy",) + (("numba",) if _kern_numba is not None else ()):
        env = dict(os.environ, BICAP_BACKEND=req)
        out = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
        )
        assert out.stdout.strip() == req
    env = dict(os.environ, BICAP_BACKEND="garbage")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.returncode != 0
    assert "BICAP_BACKEND" in out.stderr


def test_active_backend_is_reported():
    assert backend_name() in ("numba", "numpy")
    assert backend.lap3d is lap3d


def test_thread_count_respects_env(monkeypatch):
    monkeypatch.setenv("BICAP_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("BICAP_THREADS", "0")
    with pytest.raises(ValueError, match="BICAP_THREADS"):
        thread_count()
    monkeypatch.delenv("BICAP_THREADS")
    assert thread_count() >= 1
