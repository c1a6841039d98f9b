import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lecam_equiv.basis import (
    FourierBasis,
    PiecewiseConstantBasis,
    ScalingBasis,
    SplineBasis,
    enumerate_frequencies,
    get_filter,
    interpolation_constant_A,
    moment_identity_residual,
    scaling_values_at_integers,
    spline_l2_gram,
)
from lecam_equiv.design import equidistant_grid
from lecam_equiv.emp import EmpiricalGeometry
from lecam_equiv.errors import DegenerateFilterError, PreconditionError


def test_enumeration_d1():
    assert enumerate_frequencies(1, 5) == [(0,), (-1,), (1,), (-2,), (2,)]
    assert enumerate_frequencies(1, 1) == [(0,)]


def test_enumeration_d2():
    assert enumerate_frequencies(2, 5) == [(0, 0), (0, -1), (0, 1), (-1, 0), (1, 0)]


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(1, 200))
def test_enumeration_sorted_and_distinct(d, count):
    fs = enumerate_frequencies(d, count)
    assert len(fs) == count == len(set(fs))
    norms = [sum(v * v for v in l) for l in fs]
    assert norms == sorted(norms)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 2), st.integers(2, 120))
def test_enumeration_prefix_stable(d, count):
    assert enumerate_frequencies(d, count)[: count - 1] == enumerate_frequencies(d, count - 1)


def test_fourier_evaluation():
    b = FourierBasis.leading(1, 3)
    assert b.evaluate(3, 0.25) == pytest.approx(1j, abs=1e-15)
    for j in range(1, 4):
        assert b.evaluate(j, 0.0) == 1.0


def test_fourier_grid_needs_odd_m():
    with pytest.raises(PreconditionError):
        FourierBasis.grid(4, 1)
    assert FourierBasis.grid(5, 2).size == 25


def test_spline_peak():
    b = SplineBasis(4, 1)
    assert b.evaluate(1, 0.25) == 1.0
    E = b.matrix(equidistant_grid(4).points)
    assert np.array_equal(E, np.eye(4))


def test_spline_partition_of_unity():
    b = SplineBasis(6, 2)
    x = np.random.default_rng(1).random((40, 2))
    np.testing.assert_allclose(b.matrix(x).sum(axis=1), 1.0, atol=1e-14)


def test_spline_gram_entries():
    G = spline_l2_gram(4, 1)
    assert G[0, 0] == pytest.approx(1 / 6)
    assert G[0, 1] == pytest.approx(1 / 24)
    assert G[0, 3] == pytest.approx(1 / 24)  # periodic neighbour
    assert G[0, 2] == 0.0


@pytest.mark.parametrize("m,d", [(3, 1), (8, 1), (5, 2), (4, 3)])
def test_spline_gram_row_sums(m, d):
    np.testing.assert_allclose(spline_l2_gram(m, d).sum(axis=1), 1.0 / m**d, rtol=1e-14)


def test_spline_gram_matches_quadrature():
    # hats are piecewise linear, so Gauss-Legendre with 2 nodes per cell is exact
    m = 7
    b = SplineBasis(m, 1)
    nodes, w = np.polynomial.legendre.leggauss(2)
    x = (np.arange(m)[:, None] + (nodes[None, :] + 1) / 2).ravel() / m
    ww = np.tile(w / 2, m) / m
    E = b.matrix(x)
    np.testing.assert_allclose(E.T @ (E * ww[:, None]), spline_l2_gram(m), atol=1e-15)


def test_spline_fourier_coefficients_quadrature():
    m = 5
    b = SplineBasis(m, 1)
    x = (np.arange(4096) + 0.5) / 4096
    ls = np.array([-3, 0, 1, 7])
    F = b.fourier_coefficients(ls[:, None])
    # <phi_l, b> = int e^{2 pi i l x} b(x) dx for real b
    direct = np.exp(2j * np.pi * np.outer(ls, x)) @ b.matrix(x) / x.size
    np.testing.assert_allclose(F, direct, atol=1e-6)


def test_piecewise_constant_isometric():
    n = 9
    b = PiecewiseConstantBasis(n)
    E = b.matrix(equidistant_grid(n).points)
    np.testing.assert_allclose(E.T @ E / n, np.eye(n), atol=1e-15)


def test_haar_integer_values():
    assert scaling_values_at_integers("haar") == {0: 1.0}


def test_db2_integer_values():
    v = scaling_values_at_integers("db2")
    assert v[1] == pytest.approx((1 + math.sqrt(3)) / 2, abs=1e-12)
    assert v[2] == pytest.approx((1 - math.sqrt(3)) / 2, abs=1e-12)
    assert abs(v.get(0, 0.0)) < 1e-12


@pytest.mark.parametrize("name", ["haar", "db2", "db3"])
def test_integer_values_sum_to_one(name):
    assert sum(scaling_values_at_integers(name).values()) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("name", ["haar", "db2", "db3"])
def test_filters_orthonormal(name):
    h = get_filter(name)
    for k in range(1, h.size // 2 + 1):
        assert abs(np.dot(h[2 * k :], h[: h.size - 2 * k])) < 1e-12
    assert np.dot(h, h) == pytest.approx(1.0, abs=1e-12)


def test_bad_filter():
    with pytest.raises(DegenerateFilterError):
        get_filter([1.0, 1.0])


def test_interpolation_constant():
    assert interpolation_constant_A("haar", 1).value == 1.0
    assert interpolation_constant_A("haar", 3).value == 1.0
    c = interpolation_constant_A("db2", 1)
    v = scaling_values_at_integers("db2")
    # diagonal dominance at k0 = 1 certifies a positive constant
    assert abs(v[1]) > sum(abs(x) for k, x in v.items() if k != 1)
    assert 0 < c.lower <= c.value <= c.upper
    # |phi(1) e^{iu} + phi(2) e^{2iu}| is smallest at u = 0 where it equals 1
    assert c.value == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("name,qmax", [("haar", 0), ("db2", 1), ("db3", 2)])
def test_moment_identity(name, qmax):
    x = np.array([0.0, 0.25, 0.625, 0.9375])
    for q in range(qmax + 1):
        assert np.abs(moment_identity_residual(name, q, x)).max() < 1e-9


@pytest.mark.parametrize("name,level", [("haar", 2), ("db2", 3), ("db3", 3)])
def test_scaling_toeplitz_gram(name, level):
    b = ScalingBasis(name, level, 1)
    geom = EmpiricalGeometry(b, equidistant_grid(b.m))
    np.testing.assert_allclose(geom.G, b.toeplitz_gram(), atol=1e-10)


def test_scaling_basis_orthonormal_on_fine_grid():
    b = ScalingBasis("db2", 3, 1)
    x = np.arange(1, 2**12 + 1) / 2**12
    E = b.matrix(x)
    np.testing.assert_allclose(E.T @ E / x.size, np.eye(b.size), atol=1e-4)


def test_scaling_rejects_non_dyadic():
    with pytest.raises(PreconditionError):
        ScalingBasis("db2", 3).matrix(np.array([1 / 3]))
