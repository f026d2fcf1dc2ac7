"""Least-squares and ridge solver contracts."""

import numpy as np
import pytest

from qwlearn.errors import InvalidParameterError, ShapeError
from qwlearn.numerics import lstsq_min_norm, ridge_solve


def test_lstsq_identity_system():
    b = np.array([[1.0], [2.0], [3.0]])
    assert np.allclose(lstsq_min_norm(np.eye(3), b), b, atol=1e-14)


def test_lstsq_min_norm_splits_symmetric_underdetermined():
    x = lstsq_min_norm(np.array([[1.0, 1.0]]), np.array([[2.0]]))
    assert np.allclose(x, [[1.0], [1.0]], atol=1e-12)


def test_lstsq_recovers_planted_solution():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(6, 4))
    x0 = rng.normal(size=(4, 2))
    x = lstsq_min_norm(a, a @ x0)
    assert np.abs(x - x0).max() < 1e-10


def test_lstsq_residual_optimality():
    rng = np.random.default_rng(3)
    for _ in range(5):
        a = rng.normal(size=(8, 5))
        b = rng.normal(size=(8, 2))
        x = lstsq_min_norm(a, b)
        base = np.linalg.norm(a @ x - b)
        for _ in range(100):
            delta = rng.normal(size=x.shape)
            perturbed = np.linalg.norm(a @ (x + 1e-4 * delta) - b)
            assert perturbed >= base - 1e-12


def test_lstsq_min_norm_against_parametric_brute_force():
    # consistent 2x3 system: solutions form a line x = x_p + t*null
    a = np.array([[1.0, 2.0, -1.0], [0.5, -1.0, 2.0]])
    b = a @ np.array([[1.0], [2.0], [3.0]])
    x = lstsq_min_norm(a, b)
    assert np.linalg.norm(a @ x - b) < 1e-10
    null = np.linalg.svd(a)[2][-1].reshape(-1, 1)
    ts = np.linspace(-5, 5, 20001)
    norms = np.linalg.norm(x + ts[None, None, :] * null[:, :, None], axis=(0, 1))
    assert np.linalg.norm(x) <= norms.min() + 1e-9


def test_lstsq_underdetermined_interpolates():
    rng = np.random.default_rng(4)
    a = rng.normal(size=(3, 10))
    b = rng.normal(size=(3, 1))
    x = lstsq_min_norm(a, b)
    assert np.abs(a @ x - b).max() < 1e-10


def test_lstsq_rcond_drops_tiny_directions():
    a = np.diag([1.0, 1e-15])
    b = np.array([[1.0], [1.0]])
    x = lstsq_min_norm(a, b, rcond=1e-12)
    assert np.allclose(x, [[1.0], [0.0]], atol=1e-12)


def test_lstsq_zero_matrix_returns_zero():
    x = lstsq_min_norm(np.zeros((2, 3)), np.ones((2, 1)))
    assert np.array_equal(x, np.zeros((3, 1)))


def test_lstsq_input_validation():
    with pytest.raises(InvalidParameterError):
        lstsq_min_norm(np.array([[np.nan]]), np.array([[1.0]]))
    with pytest.raises(ShapeError):
        lstsq_min_norm(np.eye(2), np.ones((3, 1)))
    with pytest.raises(InvalidParameterError):
        lstsq_min_norm(np.eye(2), np.ones((2, 1)), rcond=-1.0)


def test_svd_reconstruction_contract():
    rng = np.random.default_rng(9)
    for shape in ((6, 4), (4, 6), (5, 5), (3, 40)):
        a = rng.normal(size=shape)
        u, s, vt = np.linalg.svd(a, full_matrices=False)
        err = np.linalg.norm(a - (u * s) @ vt)
        assert err <= 1e-10 * np.linalg.norm(a)


def test_ridge_scalar_hand_value():
    x = ridge_solve(np.array([[1.0]]), np.array([[1.0]]), alpha=1.0)
    assert x[0, 0] == pytest.approx(0.5, abs=1e-14)


def test_ridge_identity_closed_form():
    b = np.array([[1.0], [2.0], [3.0]])
    for alpha in (0.1, 1.0, 7.5):
        x = ridge_solve(np.eye(3), b, alpha)
        assert np.allclose(x, b / (1 + alpha), atol=1e-12)


def test_ridge_small_alpha_approaches_lstsq():
    rng = np.random.default_rng(6)
    a = rng.normal(size=(8, 4))
    b = rng.normal(size=(8, 2))
    x_ls = lstsq_min_norm(a, b)
    x_r = ridge_solve(a, b, 1e-12)
    assert np.abs(x_r - x_ls).max() < 1e-6


def test_ridge_moves_monotonically_toward_lstsq():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(10, 3))
    b = rng.normal(size=(10, 1))
    x_ls = lstsq_min_norm(a, b)
    gaps = [
        np.linalg.norm(ridge_solve(a, b, alpha) - x_ls)
        for alpha in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
    ]
    assert all(g2 < g1 for g1, g2 in zip(gaps, gaps[1:]))


def test_ridge_validation():
    a = np.eye(2)
    b = np.ones((2, 1))
    for alpha in (0.0, -1.0, float("nan")):
        with pytest.raises(InvalidParameterError):
            ridge_solve(a, b, alpha)
    with pytest.raises(ShapeError):
        ridge_solve(a, np.ones((3, 1)), 0.1)
