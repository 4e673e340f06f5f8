import numpy as np
import pytest

from zkcyl.chebyshev import (
    cheb_coefficients,
    cheb_kernel,
    clenshaw_curtis_weights,
    coefficient_matrix,
    tail_magnitude,
)
from zkcyl.errors import ConfigurationError


def test_points_smallest_kernel():
    k = cheb_kernel(2)
    np.testing.assert_allclose(k.points, [1.0, 0.0, -1.0], atol=1e-16)


def test_points_strictly_decreasing():
    k = cheb_kernel(17)
    assert k.points[0] == 1.0 and k.points[-1] == -1.0
    assert np.all(np.diff(k.points) < 0)


def test_degree_below_two_rejected():
    with pytest.raises(ConfigurationError):
        cheb_kernel(1)


def test_row_sums_vanish():
    k = cheb_kernel(24)
    assert np.abs(k.D.sum(axis=1)).max() < 1e-12


def test_cubic_derivative():
    k = cheb_kernel(8)
    f = k.points**3
    np.testing.assert_allclose(k.D @ f, 3 * k.points**2, atol=1e-12)


def test_corner_entry_value():
    k = cheb_kernel(20)
    assert k.D[0, 0] == pytest.approx((2 * 400 + 1) / 6, abs=1e-10)
    assert k.D[-1, -1] == pytest.approx(-(2 * 400 + 1) / 6, abs=1e-10)


def test_derivative_matches_finite_difference_oracle():
    # centered differences on a smooth function, evaluated at interior nodes
    k = cheb_kernel(20)
    f = lambda x: np.sin(2.0 * x) + x**2
    h = 1e-6
    oracle = (f(k.points + h) - f(k.points - h)) / (2 * h)
    got = k.D @ f(k.points)
    assert np.abs(got - oracle).max() < 1e-4


@pytest.mark.parametrize("N_c", [4, 8, 16, 31])
def test_monomial_exactness(N_c):
    k = cheb_kernel(N_c)
    for m in range(N_c + 1):
        f = k.points**m
        df = m * k.points ** (m - 1) if m > 0 else np.zeros_like(k.points)
        assert np.abs(k.D @ f - df).max() < 1e-10 * N_c**2


def test_second_derivative_is_square():
    k = cheb_kernel(12)
    np.testing.assert_allclose(k.D2, k.D @ k.D, atol=0)
    f = k.points**4
    np.testing.assert_allclose(k.D2 @ f, 12 * k.points**2, atol=1e-9)


def test_coefficients_of_t3():
    k = cheb_kernel(8)
    t3 = np.cos(3 * np.arccos(np.clip(k.points, -1, 1)))
    a = cheb_coefficients(t3)
    expect = np.zeros(9)
    expect[3] = 1.0
    np.testing.assert_allclose(a, expect, atol=1e-12)


def test_coefficients_of_constant():
    a = cheb_coefficients(np.ones(11))
    assert a[0] == pytest.approx(1.0, abs=1e-14)
    assert np.abs(a[1:]).max() < 1e-14


def test_exponential_coefficient_decay():
    k = cheb_kernel(24)
    a = cheb_coefficients(np.exp(k.points))
    assert np.abs(a[20:]).max() < 1e-14


def test_coefficients_against_least_squares_oracle():
    # overdetermined fit of exp(l) on a fine grid in the same basis
    k = cheb_kernel(16)
    a = cheb_coefficients(np.exp(k.points))
    fine = np.linspace(-1, 1, 600)
    V = np.cos(np.arange(17)[None, :] * np.arccos(fine)[:, None])
    ls, *_ = np.linalg.lstsq(V, np.exp(fine), rcond=None)
    np.testing.assert_allclose(a, ls, atol=1e-9)


def test_fct_and_dense_paths_agree():
    rng = np.random.default_rng(3)
    for n in (2, 7, 16, 33):
        f = rng.standard_normal(n + 1)
        a1 = cheb_coefficients(f, method="fct")
        a2 = cheb_coefficients(f, method="dense")
        np.testing.assert_allclose(a1, a2, atol=1e-12)


def test_reconstruction_at_nodes():
    rng = np.random.default_rng(11)
    k = cheb_kernel(14)
    f = rng.standard_normal(15)
    a = cheb_coefficients(f)
    V = np.cos(np.arange(15)[None, :] * np.arccos(np.clip(k.points, -1, 1))[:, None])
    np.testing.assert_allclose(V @ a, f, atol=1e-12)


def test_tail_of_resolved_polynomial():
    k = cheb_kernel(16)
    a = cheb_coefficients(2 * k.points**3 - k.points)
    assert tail_magnitude(a, 0.25) < 1e-14


def test_tail_flat_coefficients():
    assert tail_magnitude(np.ones(10), 0.5) == 1.0


def test_tail_monotone_in_fraction():
    rng = np.random.default_rng(5)
    a = rng.standard_normal(40)
    fracs = np.linspace(0.05, 1.0, 17)
    tails = [tail_magnitude(a, f) for f in fracs]
    assert all(t2 >= t1 for t1, t2 in zip(tails, tails[1:]))


def test_tail_rejects_empty_and_bad_fraction():
    with pytest.raises(ValueError):
        tail_magnitude(np.array([]), 0.5)
    with pytest.raises(ValueError):
        tail_magnitude(np.ones(3), 0.0)


def test_clenshaw_curtis_polynomial_exactness():
    for n in (4, 9, 16):
        w = clenshaw_curtis_weights(n)
        k = cheb_kernel(n)
        assert np.all(w > 0)
        for m in range(n + 1):
            exact = (1 - (-1) ** (m + 1)) / (m + 1)
            assert w @ k.points**m == pytest.approx(exact, abs=1e-13)


def test_coefficient_matrix_shape_and_involution():
    # values -> coefficients -> values round trip via the Chebyshev Vandermonde
    n = 10
    M = coefficient_matrix(n)
    pts = np.cos(np.pi * np.arange(n + 1) / n)
    V = np.cos(np.arange(n + 1)[None, :] * np.arccos(np.clip(pts, -1, 1))[:, None])
    np.testing.assert_allclose(V @ M, np.eye(n + 1), atol=1e-12)
