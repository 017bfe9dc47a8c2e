"""Both kernel backends must agree bit-for-bit."""

import importlib.util
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from kinhci import kernels

needs_numba = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not installed")

masks = arrays(bool, st.tuples(st.integers(1, 40), st.integers(1, 40)))


@needs_numba
@settings(max_examples=100, deadline=None)
@given(masks)
def test_smooth_backends_agree(bits):
    assert np.array_equal(kernels.smooth3x3_numba(bits), kernels.smooth3x3_numpy(bits))


@needs_numba
@settings(max_examples=100, deadline=None)
@given(masks)
def test_scan_backends_agree(bits):
    assert np.array_equal(kernels.boundary_scan_numba(bits), kernels.boundary_scan_numpy(bits))


def test_loop_kernels_run_uncompiled():
    rng = np.random.default_rng(0)
    bits = rng.random((9, 11)) < 0.5
    assert np.array_equal(kernels._smooth3x3_loops(bits), kernels.smooth3x3_numpy(bits))
    assert np.array_equal(kernels._boundary_scan_loops(bits), kernels.boundary_scan_numpy(bits))


@needs_numba
@pytest.mark.parametrize("seed", range(20))
def test_fill_backends_agree(seed):
    rng = np.random.default_rng(seed)
    tris = rng.uniform(-10, 70, size=(30, 3, 2))
    tris[::7] = np.round(tris[::7])  # include vertices on pixel edges
    colors = rng.integers(0, 256, size=(30, 3)).astype(np.uint8)
    a = np.zeros((60, 64, 3), np.uint8)
    b = np.zeros((60, 64, 3), np.uint8)
    kernels.fill_triangles_numba(a, tris, colors)
    kernels.fill_triangles_numpy(b, tris, colors)
    assert np.array_equal(a, b)


def test_shared_edge_covered_once():
    # two triangles splitting a square along its diagonal, pixel centres on the diagonal
    tris = np.array([[[0, 0], [8, 0], [8, 8]], [[0, 0], [8, 8], [0, 8]]], float)
    for fill in (kernels.fill_triangles_numpy, kernels.fill_triangles):
        counts = np.zeros((8, 8), int)
        for t in tris:
            buf = np.zeros((8, 8, 3), np.uint8)
            fill(buf, t[None], np.array([[1, 1, 1]], np.uint8))
            counts += buf[..., 0]
        assert (counts == 1).all()


@pytest.mark.parametrize("backend", ["numpy", "numba"])
def test_env_flag_selects_backend(backend):
    env = dict(os.environ, KINHCI_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", "import kinhci.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True).stdout.strip()
    installed = importlib.util.find_spec("numba") is not None
    expected = backend if (backend == "numpy" or installed) else "numpy"
    assert out == expected


def test_bad_backend_rejected():
    env = dict(os.environ, KINHCI_BACKEND="cuda")
    proc = subprocess.run([sys.executable, "-c", "import kinhci.kernels"], env=env,
                          capture_output=True, text=True)
    assert proc.returncode != 0 and "KINHCI_BACKEND" in proc.stderr
