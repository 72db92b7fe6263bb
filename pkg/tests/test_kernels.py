import os
import subprocess
import sys
from itertools import combinations

import numpy as np
import pytest
from numpy.testing import assert_allclose

from sl2orbit import kernels
from sl2orbit.core import random_tuple

BACKENDS = kernels.available_backends()


def _mats(n, seed):
    return np.ascontiguousarray(random_tuple(n, seed).matrices)


def _chain(mats, idx):
    out = np.eye(2, dtype=complex)
    for i in idx:
        out = out @ mats[i]
    return out


@pytest.mark.parametrize("name", BACKENDS)
def test_chain_product(name):
    be = kernels.get_backend(name)
    mats = _mats(4, 1)
    for idx in ([], [0], [3, 1, 1, 0, 2], [2] * 7):
        got = be.chain_product(mats, np.array(idx, dtype=np.int_))
        assert_allclose(got, _chain(mats, idx), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("name", BACKENDS)
def test_chain_traces(name):
    be = kernels.get_backend(name)
    mats = _mats(3, 2)
    segs = [[0], [1, 2], [], [2, 2, 0, 1]]
    idx = np.array([i for s in segs for i in s], dtype=np.int_)
    offsets = np.cumsum([0] + [len(s) for s in segs]).astype(np.int_)
    want = [np.trace(_chain(mats, s)) for s in segs]
    assert_allclose(be.chain_traces(mats, idx, offsets), want, rtol=1e-12)


@pytest.mark.parametrize("name", BACKENDS)
@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_lex_traces(name, n):
    be = kernels.get_backend(name)
    mats = _mats(n, n)
    want = [np.trace(m) for m in mats]
    want += [np.trace(mats[j] @ mats[k]) for j, k in combinations(range(n), 2)]
    want += [np.trace(mats[j] @ mats[k] @ mats[l]) for j, k, l in combinations(range(n), 3)]
    got = be.lex_traces(mats)
    assert len(got) == (n**3 + 5 * n) // 6
    assert_allclose(got, want, rtol=1e-12)


@pytest.mark.parametrize("name", BACKENDS)
def test_conjugate_all(name):
    be = kernels.get_backend(name)
    mats = _mats(3, 3)
    g = _mats(1, 4)[0]
    gi = np.linalg.inv(g)
    assert_allclose(be.conjugate_all(g, gi, mats), [g @ m @ gi for m in mats], rtol=1e-12, atol=1e-12)


def test_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("compiled extension not built")
    cy, py = kernels.get_backend("cython"), kernels.get_backend("python")
    mats = _mats(6, 7)
    assert_allclose(cy.lex_traces(mats), py.lex_traces(mats), rtol=1e-13)


def test_read_only_input_accepted():
    mats = _mats(3, 8)
    mats.setflags(write=False)
    assert kernels.lex_traces(mats).shape == (7,)


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


def test_env_forces_python_fallback():
    env = dict(os.environ, SL2ORBIT_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from sl2orbit import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
