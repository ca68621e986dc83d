import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nldw import kernels

FOUND = kernels.backends()
needs_ext = pytest.mark.skipif("cython" not in FOUND, reason="compiled extension not built")


def _cube(seed, n=12):
    return np.random.default_rng(seed).standard_normal((n, n, n))


def test_python_backend_always_available():
    assert "python" in FOUND
    assert kernels.BACKEND in FOUND


@needs_ext
def test_compiled_backend_is_default():
    if os.environ.get("NLDW_PURE_PYTHON", "").strip() in ("", "0"):
        assert kernels.BACKEND == "cython"


@pytest.mark.parametrize("flag,expected", [("1", "python"), ("0", None)])
def test_pure_python_switch(flag, expected):
    env = dict(os.environ, NLDW_PURE_PYTHON=flag)
    out = subprocess.run(
        [sys.executable, "-c", "from nldw import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    ).stdout.strip()
    if expected is None:
        expected = "cython" if "cython" in FOUND else "python"
    assert out == expected


@needs_ext
@given(st.integers(0, 2**31), st.sampled_from([8, 10, 16]), st.floats(0.05, 2.0))
def test_backends_agree(seed, n, h):
    py, cy = FOUND["python"], FOUND["cython"]
    u = _cube(seed, n)
    w = np.abs(_cube(seed + 1, n))
    assert cy.face_sumsq(u, h) == pytest.approx(py.face_sumsq(u, h), rel=1e-13)
    sa, da = py.face_gradient(u, h)
    sb, db = cy.face_gradient(u, h)
    assert sb == pytest.approx(sa, rel=1e-13)
    assert np.max(np.abs(da - db)) <= 1e-12 * np.max(np.abs(da))
    for a, b in zip(py.local_sums(u, w), cy.local_sums(u, w)):
        assert b == pytest.approx(a, rel=1e-12, abs=1e-12)
    for mu in (-0.5, 0.0, 0.7):
        ps, pc = py.shift_clip_sum(u, mu)
        cs, cc = cy.shift_clip_sum(u, mu)
        assert pc == cc and cs == pytest.approx(ps, rel=1e-13)
    target = 0.2 * float(np.sum(np.abs(u)))
    assert cy.find_shift(u, target) == pytest.approx(py.find_shift(u, target), abs=1e-11)


@pytest.mark.parametrize("name", list(FOUND))
def test_face_kernels_on_constants_and_ramps(name):
    m = FOUND[name]
    n, h = 10, 0.3
    assert m.face_sumsq(np.full((n, n, n), 2.5), h) == 0.0
    x = (np.arange(n) * h)[:, None, None] * np.ones((1, n, n))
    # a unit-slope ramp along one axis: every face difference is 1
    assert m.face_sumsq(x, h) == pytest.approx((n - 1) * n * n, rel=1e-12)


@pytest.mark.parametrize("name", list(FOUND))
def test_face_gradient_is_adjoint(name):
    m = FOUND[name]
    a, b = _cube(1), _cube(2)
    h = 0.4
    _, dtd_b = m.face_gradient(b, h)
    pol = 0.25 * (m.face_sumsq(a + b, h) - m.face_sumsq(a - b, h))
    assert float(np.sum(a * dtd_b)) == pytest.approx(pol, rel=1e-10)


@pytest.mark.parametrize("name", list(FOUND))
def test_find_shift_hits_target(name):
    m = FOUND[name]
    u = _cube(5)
    for target in (1e-6, 3.0, 500.0, 5000.0):
        mu = m.find_shift(u, target)
        s, _ = m.shift_clip_sum(u, mu)
        assert s == pytest.approx(target, rel=1e-12)
    with pytest.raises(ValueError):
        m.find_shift(u, 0.0)


@pytest.mark.parametrize("name", list(FOUND))
def test_kernels_reject_or_accept_shapes(name):
    m = FOUND[name]
    assert m.local_sums(np.zeros((8, 8, 8)), np.ones((8, 8, 8))) == (0.0,) * 6


def test_fft_workers_env(monkeypatch):
    monkeypatch.delenv("NLDW_THREADS", raising=False)
    assert kernels.fft_workers() == 1
    monkeypatch.setenv("NLDW_THREADS", "3")
    assert kernels.fft_workers() == 3
    monkeypatch.setenv("NLDW_THREADS", "zero")
    with pytest.raises(ValueError):
        kernels.fft_workers()
