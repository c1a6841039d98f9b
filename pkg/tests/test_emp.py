import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lecam_equiv.basis import FourierBasis, PiecewiseConstantBasis, SplineBasis
from lecam_equiv.design import Design, equidistant_grid, uniform_random_design
from lecam_equiv.emp import (
    EmpiricalGeometry,
    alias_coefficients,
    empirical_inner,
    fourier_l2_distance_sq,
    hermitian_function,
    hs_distance_identity,
    interpolate_fourier,
    interpolate_piecewise_constant,
    l2_project_fourier,
    piecewise_constant_l2_error_sq,
    psd_sqrt,
)
from lecam_equiv.errors import PreconditionError
from lecam_equiv.funclass import FourierFunction
from strategies import fourier_functions


def test_empirical_inner_ones():
    assert empirical_inner(np.ones(4), np.ones(4)) == 1.0


def test_fourier_empirical_inner_aliasing():
    x = equidistant_grid(5).points[:, 0]
    phi = lambda l: np.exp(2j * np.pi * l * x)
    assert empirical_inner(phi(2), phi(-3)) == pytest.approx(1.0, abs=1e-14)
    assert abs(empirical_inner(phi(1), phi(0))) < 1e-14


@pytest.mark.parametrize("m,d", [(31, 1), (7, 2), (5, 3)])
def test_fourier_grid_isometric(m, d):
    geom = EmpiricalGeometry(FourierBasis.grid(m, d), equidistant_grid(m, d))
    assert np.abs(geom.G - np.eye(geom.size)).max() <= 1e-12
    assert geom.isomorphism_constants() == pytest.approx((1.0, 1.0), abs=1e-12)


@pytest.mark.parametrize("n", [12, 16])
def test_piecewise_constant_grid_identity(n):
    geom = EmpiricalGeometry(PiecewiseConstantBasis(n), equidistant_grid(n))
    # exact when sqrt(n) is representable, within an ulp otherwise
    if n == 16:
        assert np.array_equal(geom.G, np.eye(n))
    assert np.abs(geom.G - np.eye(n)).max() <= 2.3e-16


def test_single_point_constant_basis():
    geom = EmpiricalGeometry(FourierBasis.leading(1, 1), Design(np.array([[0.3]]), kind="loaded"))
    assert geom.isomorphism_constants() == (1.0, 1.0)


def test_random_design_gram_hermitian_unit_diagonal():
    geom = EmpiricalGeometry(FourierBasis.leading(1, 20), uniform_random_design(64, 1, 3))
    assert np.array_equal(geom.G, geom.G.conj().T)
    np.testing.assert_allclose(np.diag(geom.G).real, 1.0, atol=1e-15)


def test_random_design_isomorphic_constants():
    geom = EmpiricalGeometry(FourierBasis.leading(1, 16), uniform_random_design(512, 1, 11))
    A, B = geom.isomorphism_constants()
    assert 0.5 <= A <= 1 <= B <= 2


def test_interpolate_basis_element():
    m = 31
    basis = FourierBasis.grid(m)
    geom = EmpiricalGeometry(basis, equidistant_grid(m))
    c = geom.interpolate(basis.matrix(geom.design.points)[:, 2])
    expected = np.zeros(m)
    expected[2] = 1
    np.testing.assert_allclose(c, expected, atol=1e-13)
    assert np.array_equal(geom.interpolate(np.zeros(m)), np.zeros(m))


def test_aliasing_example():
    c = interpolate_fourier(FourierFunction.mode((7,)), 5)
    basis = FourierBasis.grid(5)
    expected = np.zeros(5, dtype=complex)
    expected[basis.index_of((2,))] = 1
    np.testing.assert_allclose(c, expected, atol=1e-10)


def test_projection_vs_interpolation():
    f = FourierFunction(1, [[2], [7]], [1.0, 1.0])
    basis = FourierBasis.grid(5)
    p = l2_project_fourier(f, 5)
    assert p[basis.index_of((2,))] == 1 and np.count_nonzero(p) == 1
    c = interpolate_fourier(f, 5)
    assert c[basis.index_of((2,))] == pytest.approx(2.0, abs=1e-12)
    assert np.count_nonzero(l2_project_fourier(FourierFunction.mode((3,)), 5)) == 0


@settings(max_examples=30, deadline=None)
@given(fourier_functions(d=1, max_freq=40), st.sampled_from([5, 7, 31]))
def test_interpolation_is_alias_sum(f, m):
    basis = FourierBasis.grid(m)
    c = interpolate_fourier(f, m)
    expected = np.zeros(m, dtype=complex)
    for l, v in alias_coefficients(f, m).items():
        expected[basis.index_of(l)] += v
    np.testing.assert_allclose(c, expected, atol=1e-8)


@settings(max_examples=30, deadline=None)
@given(fourier_functions(d=1, max_freq=60))
def test_pythagoras(f):
    m = 31
    basis = FourierBasis.grid(m)
    I = interpolate_fourier(f, m)
    P = l2_project_fourier(f, m)
    lhs = fourier_l2_distance_sq(f, I, basis)
    rhs = fourier_l2_distance_sq(f, P, basis) + float(np.sum(np.abs(P - I) ** 2))
    assert abs(lhs - rhs) <= 1e-8


def test_holder_bias_identity_function():
    n = 10
    design = equidistant_grid(n)
    c = interpolate_piecewise_constant(lambda x: x, design)
    assert piecewise_constant_l2_error_sq(lambda x: x, c, n) == pytest.approx(1 / 300, abs=1e-12)


@pytest.mark.parametrize("m,d", [(8, 1), (16, 1), (32, 1), (8, 2)])
def test_spline_inverse_gram_below_identity(m, d):
    geom = EmpiricalGeometry(SplineBasis(m, d), equidistant_grid(m, d))
    assert np.linalg.eigvalsh(geom.G).min() >= 1 - 1e-10


def test_spline_interpolation_reproduces_values():
    m = 9
    geom = EmpiricalGeometry(SplineBasis(m), equidistant_grid(m))
    y = np.sin(2 * np.pi * geom.design.points[:, 0])
    c = geom.interpolate(y)
    np.testing.assert_allclose(geom.E_raw @ c, y, atol=1e-13)
    np.testing.assert_allclose(geom.from_orthonormal(geom.to_orthonormal(c)), c, atol=1e-13)


def test_empirical_norm_matches_values():
    geom = EmpiricalGeometry(SplineBasis(6), uniform_random_design(40, 1, 2))
    c = np.random.default_rng(0).standard_normal(6)
    vals = geom.E_raw @ c
    assert geom.empirical_norm_sq(c) == pytest.approx(np.mean(vals**2), rel=1e-12)


def test_hs_distance_examples():
    assert hs_distance_identity(np.eye(3)) == 0.0
    assert hs_distance_identity(np.diag([2.0, 1.0]), inverted=True) == pytest.approx(0.5)
    a, n = 1e-3, 7
    assert hs_distance_identity((1 + a) * np.eye(n), inverted=True) == pytest.approx(np.sqrt(n) * a / (1 + a), rel=1e-10)


def test_hermitian_function_rejects_negative():
    with pytest.raises(PreconditionError):
        psd_sqrt(np.diag([1.0, -1e-6]))
    r = psd_sqrt(np.diag([4.0, -1e-14]))
    np.testing.assert_allclose(r, np.diag([2.0, 0.0]))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32))
def test_psd_sqrt_squares_back(p, seed):
    X = np.random.default_rng(seed).standard_normal((p, p + 2))
    M = X @ X.T
    S = psd_sqrt(M)
    np.testing.assert_allclose(S @ S, M, atol=1e-9 * max(1.0, np.abs(M).max()))
    np.testing.assert_allclose(hermitian_function(M, lambda w: w), M, atol=1e-10 * max(1.0, np.abs(M).max()))


def test_gram_csv(tmp_path):
    geom = EmpiricalGeometry(FourierBasis.leading(1, 3), uniform_random_design(10, 1, 1))
    geom.write_gram_csv(tmp_path / "g.csv")
    rows = (tmp_path / "g.csv").read_text().splitlines()
    assert len(rows) == 4 and rows[0].startswith("re1,im1")
    assert float(rows[1].split(",")[0]) == 1.0


def test_dimension_mismatch():
    with pytest.raises(PreconditionError):
        EmpiricalGeometry(FourierBasis.leading(2, 3), uniform_random_design(10, 1, 1))
