import numpy as np
import pytest
from scipy.integrate import quad

from zkcyl.errors import ConfigurationError
from zkcyl.radial import (
    assemble_transverse,
    build_layout,
    inner_operator,
    outer_operator,
)


@pytest.fixture(scope="module")
def paper_layout():
    return build_layout(1.0, 20.0, 20, 100)


def test_node_counts_and_interface(paper_layout):
    lay = paper_layout
    assert lay.size == 122
    assert lay.physical_rho.shape == (122,)
    assert lay.physical_rho[lay.idx_inner_interface] == pytest.approx(1.0, abs=1e-15)
    assert lay.physical_rho[lay.idx_outer_interface] == pytest.approx(1.0, abs=1e-15)
    assert lay.physical_rho[lay.idx_axis] == 0.0
    assert lay.physical_rho[lay.idx_outer_boundary] == pytest.approx(20.0)


def test_map_endpoints(paper_layout):
    lay = paper_layout
    assert lay.s_inner[0] == pytest.approx(1.0)
    assert lay.s_inner[-1] == pytest.approx(0.0, abs=1e-16)
    assert lay.rho_outer[0] == pytest.approx(1.0)
    assert lay.rho_outer[-1] == pytest.approx(20.0)


def test_bad_orderings_rejected():
    with pytest.raises(ConfigurationError):
        build_layout(2.0, 1.0, 8, 8)
    with pytest.raises(ConfigurationError):
        build_layout(0.0, 5.0, 8, 8)
    with pytest.raises(ConfigurationError):
        build_layout(1.0, 5.0, 2, 8)


def test_quadrature_weights_nonnegative(paper_layout):
    assert np.all(paper_layout.quad_weights >= 0)


def test_quadrature_linear_weight_integral(paper_layout):
    # integral of rho over [0, 20]
    got = paper_layout.quad_weights @ np.ones(paper_layout.size)
    assert got == pytest.approx(200.0, rel=1e-10)


def test_quadrature_odd_monomials(paper_layout):
    lay = paper_layout
    mmax = (min(lay.N_I, lay.N_II) - 2) // 2
    for m in range(mmax + 1):
        got = lay.quad_weights @ lay.physical_rho ** (2 * m)
        exact = lay.rho1 ** (2 * m + 2) / (2 * m + 2)
        assert got == pytest.approx(exact, rel=1e-10), f"m={m}"


def test_quadrature_gaussian_against_adaptive_oracle(paper_layout):
    lay = paper_layout
    f = np.exp(-lay.physical_rho**2)
    got = lay.quad_weights @ f
    oracle, err = quad(lambda r: np.exp(-(r**2)) * r, 0.0, 20.0, epsabs=1e-14)
    assert abs(oracle - 0.5) < 1e-12
    assert got == pytest.approx(oracle, abs=1e-9)


def test_inner_operator_on_s(paper_layout):
    lay = paper_layout
    A = inner_operator(lay)
    got = A @ lay.s_inner
    np.testing.assert_allclose(got, 4.0 * np.ones(lay.N_I + 1), atol=1e-10)


def test_inner_operator_on_s_squared(paper_layout):
    lay = paper_layout
    A = inner_operator(lay)
    got = A @ lay.s_inner**2
    np.testing.assert_allclose(got, 16.0 * lay.s_inner, atol=1e-9)


def test_inner_operator_matches_radial_laplacian_of_gaussian(paper_layout):
    lay = paper_layout
    A = inner_operator(lay)
    f = np.exp(-lay.s_inner)  # exp(-rho^2) in s
    want = (4.0 * lay.s_inner - 4.0) * np.exp(-lay.s_inner)
    np.testing.assert_allclose(A @ f, want, atol=1e-8)


def test_outer_operator_annihilates_log(paper_layout):
    lay = paper_layout
    B = outer_operator(lay)
    got = B @ np.log(lay.rho_outer)
    np.testing.assert_allclose(got, 0.0, atol=1e-8)


def test_outer_operator_on_rho_squared(paper_layout):
    lay = paper_layout
    B = outer_operator(lay)
    np.testing.assert_allclose(B @ lay.rho_outer**2, 4.0, atol=1e-9)


def test_outer_operator_on_decaying_exponential(paper_layout):
    lay = paper_layout
    B = outer_operator(lay)
    f = np.exp(-lay.rho_outer)
    want = np.exp(-lay.rho_outer) * (1.0 - 1.0 / lay.rho_outer)
    np.testing.assert_allclose(B @ f, want, atol=1e-8)


def test_tau_row_count(paper_layout):
    op = assemble_transverse(paper_layout)
    assert len(op.tau_rows) == 3
    assert op.tau_rows == (0, 21, 121)


def _global_gaussian(lay):
    """exp(-rho^2) - exp(-rho1^2), C^1 across the interface, zero at rho1."""
    shift = np.exp(-lay.rho1**2)
    return np.exp(-lay.physical_rho**2) - shift


def _global_gaussian_laplacian(lay):
    return (4.0 * lay.physical_rho**2 - 4.0) * np.exp(-lay.physical_rho**2)


def test_assembled_operator_on_smooth_function(paper_layout):
    lay = paper_layout
    op = assemble_transverse(lay)
    u = _global_gaussian(lay)
    got = op.matrix @ u
    want = _global_gaussian_laplacian(lay)
    mask = op.interior_mask()
    np.testing.assert_allclose(got[mask], want[mask], atol=1e-8)
    assert np.abs(got[~mask]).max() < 1e-11


def test_manufactured_solution_solve(paper_layout):
    lay = paper_layout
    op = assemble_transverse(lay)
    u_star = _global_gaussian(lay)
    # right-hand side of (Lap - 1) u = f, with zero rows at the constraints
    f = _global_gaussian_laplacian(lay) - u_star
    mask = op.interior_mask()
    A = op.matrix - np.diag(mask.astype(float))
    rhs = np.where(mask, f, 0.0)
    u = np.linalg.solve(A, rhs)
    np.testing.assert_allclose(u, u_star, atol=1e-8)
    assert np.abs(op.constraints @ u).max() < 1e-11


def test_c1_gluing_for_arbitrary_rhs(paper_layout):
    lay = paper_layout
    op = assemble_transverse(lay)
    rng = np.random.default_rng(0)
    mask = op.interior_mask()
    A = op.matrix - np.diag(mask.astype(float))
    for _ in range(3):
        rhs = np.where(mask, rng.standard_normal(lay.size), 0.0)
        u = np.linalg.solve(A, rhs)
        scale = np.abs(u).max()
        value_gap = u[lay.idx_inner_interface] - u[lay.idx_outer_interface]
        deriv_gap = op.constraints[1] @ u
        assert abs(value_gap) < 1e-10 * scale
        assert abs(deriv_gap) < 1e-10 * scale


def test_manufactured_convergence():
    errors = []
    for n in (8, 12, 16, 20):
        lay = build_layout(1.0, 8.0, n, n)
        op = assemble_transverse(lay)
        u_star = _global_gaussian(lay)
        f = _global_gaussian_laplacian(lay) - u_star
        mask = op.interior_mask()
        A = op.matrix - np.diag(mask.astype(float))
        u = np.linalg.solve(A, np.where(mask, f, 0.0))
        errors.append(np.abs(u - u_star).max())
    # at least geometric decay across the refinement ladder
    for coarse, fine in zip(errors, errors[1:]):
        assert fine < 0.5 * coarse or fine < 1e-12


def test_axis_regularity(paper_layout):
    lay = paper_layout
    A = inner_operator(lay)
    for m in range(5):
        out = A @ lay.s_inner**m
        assert np.all(np.isfinite(out))
