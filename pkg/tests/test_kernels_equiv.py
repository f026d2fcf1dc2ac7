"""Compiled and pure-numpy kernels must agree bit for bit."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from qwlearn import _kernels_py
from qwlearn.errors import OutOfBoundsError
from qwlearn.walk import COMPILED_KERNELS, CoinSpec, make_coin

compiled = pytest.importorskip("qwlearn._kernels")


def random_state(rng, half_width):
    extent = 2 * half_width + 1
    amps = np.zeros((2, extent), complex)
    spin = rng.normal(size=2) + 1j * rng.normal(size=2)
    spin /= np.sqrt((np.abs(spin) ** 2).sum())
    amps[0, half_width], amps[1, half_width] = spin
    return amps


@pytest.mark.parametrize("seed", range(5))
def test_standard_kernels_bit_identical(seed):
    rng = np.random.default_rng(seed)
    half = int(rng.integers(2, 40))
    steps = int(rng.integers(1, half + 1))
    amps = random_state(rng, half)
    coin = make_coin(CoinSpec(*rng.uniform(-3, 3, size=3)))
    a1, a2 = amps.copy(), amps.copy()
    r1 = np.empty((steps, amps.shape[1]))
    r2 = np.empty_like(r1)
    compiled.evolve_standard(a1, coin, steps, r1)
    _kernels_py.evolve_standard(a2, coin, steps, r2)
    assert np.array_equal(a1, a2)
    assert np.array_equal(r1, r2)


@pytest.mark.parametrize("seed", range(5))
def test_split_kernels_bit_identical(seed):
    rng = np.random.default_rng(100 + seed)
    half = int(rng.integers(2, 40))
    steps = int(rng.integers(1, half + 1))
    amps = random_state(rng, half)
    c1 = make_coin(CoinSpec(*rng.uniform(-3, 3, size=3)))
    c2 = make_coin(CoinSpec(*rng.uniform(-3, 3, size=3)))
    a1, a2 = amps.copy(), amps.copy()
    r1 = np.empty((steps, amps.shape[1]))
    r2 = np.empty_like(r1)
    compiled.evolve_split(a1, c1, c2, steps, r1)
    _kernels_py.evolve_split(a2, c1, c2, steps, r2)
    assert np.array_equal(a1, a2)
    assert np.array_equal(r1, r2)


def test_long_walk_bit_identical():
    amps = np.zeros((2, 1001), complex)
    amps[0, 500] = amps[1, 500] = 1 / math.sqrt(2)
    coin = make_coin(CoinSpec(math.pi / 4))
    a1, a2 = amps.copy(), amps.copy()
    compiled.evolve_standard(a1, coin, 500)
    _kernels_py.evolve_standard(a2, coin, 500)
    assert np.array_equal(a1, a2)


def test_both_kernels_raise_on_boundary():
    amps = np.zeros((2, 3), complex)
    amps[0, 1] = 1.0
    coin = make_coin(CoinSpec(0.4))
    for mod in (compiled, _kernels_py):
        with pytest.raises(OutOfBoundsError):
            mod.evolve_standard(amps.copy(), coin, 2)


def test_import_prefers_compiled_kernels():
    assert COMPILED_KERNELS


def test_env_var_selects_pure_python_fallback():
    code = "import qwlearn.walk as w; print(w.COMPILED_KERNELS)"
    env = dict(os.environ, QWLEARN_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == "False"
