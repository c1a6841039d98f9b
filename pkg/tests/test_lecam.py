import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import norm

from lecam_equiv.basis import FourierBasis, PiecewiseConstantBasis, SplineBasis
from lecam_equiv.design import equidistant_grid, perturbed_design
from lecam_equiv.emp import fourier_l2_distance_sq, interpolate_fourier
from lecam_equiv.errors import PreconditionError
from lecam_equiv.funclass import FourierFunction, HoelderBall, SobolevBall, sobolev_seminorm_sq
from lecam_equiv.lecam import (
    EXACT_PHI,
    RATE,
    fit_rate_slope,
    fourier_sobolev_sup,
    generic_sobolev_sup,
    hellinger_gaussian_cov,
    holder_design_bound,
    lattice_sum_linf,
    lattice_sum_shells,
    lattice_tail_linf,
    multidim_bound,
    optimal_n0,
    random_design_bound,
    sup_interpolation_bias,
    tv_gaussian_shift,
)


def test_tv_examples():
    assert tv_gaussian_shift(0.0, 10, 1.0) == 0.0
    assert tv_gaussian_shift(1.0, 4, 1.0) == pytest.approx(2 * norm.cdf(1) - 1, abs=1e-12)
    assert tv_gaussian_shift(1.0, 4, 1.0) == pytest.approx(0.682689, abs=1e-6)
    vals = [tv_gaussian_shift(b, 4, 1.0) for b in (0.5, 1, 2, 4, 8, 16)]
    assert all(a < b for a, b in zip(vals, vals[1:])) and vals[-1] == pytest.approx(1.0)
    assert tv_gaussian_shift(math.inf, 4, 1.0) == 1.0


def test_tv_small_argument_precision():
    b = 1e-12
    assert tv_gaussian_shift(b, 1, 1.0) == pytest.approx(b / math.sqrt(2 * math.pi), rel=1e-10)


def test_hellinger_identity():
    assert hellinger_gaussian_cov(np.eye(4)) == (0.0, 0.0)


def test_hellinger_one_dimensional():
    exact, bound = hellinger_gaussian_cov(np.array([[2.0]]))
    assert exact == pytest.approx(2 - 2 * math.sqrt(2 * math.sqrt(2) / 3), rel=1e-14)
    assert exact == pytest.approx(0.058033, abs=1e-6)
    assert bound == 2.0


def test_hellinger_alpha_cancels():
    S = np.array([[1.3, 0.2], [0.2, 0.8]])
    assert hellinger_gaussian_cov(S, 1.0)[0] == pytest.approx(hellinger_gaussian_cov(S, 7.5)[0], rel=1e-14)


def test_hellinger_matches_integral():
    # one-dimensional squared Hellinger distance by quadrature
    from scipy.integrate import quad

    v = 0.37
    f = lambda x: (math.sqrt(norm.pdf(x, scale=math.sqrt(v))) - math.sqrt(norm.pdf(x))) ** 2
    assert hellinger_gaussian_cov(np.array([[v]]))[0] == pytest.approx(quad(f, -30, 30)[0], rel=1e-8)


def test_hellinger_rejects_indefinite():
    with pytest.raises(PreconditionError):
        hellinger_gaussian_cov(np.diag([1.0, -0.1]))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 16), st.integers(0, 2**32), st.floats(0.01, 3.0))
def test_hellinger_bound_property(p, seed, scale):
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((p, p)))
    # eigenvalues on both sides of 1
    S = (Q * np.exp(scale * rng.standard_normal(p))) @ Q.T
    exact, bound = hellinger_gaussian_cov(S)
    assert 0 <= exact <= min(2.0, bound) + 1e-12


def test_lattice_sum_d1():
    assert lattice_sum_linf(1.0, 1) == pytest.approx(math.pi**2 / 3, rel=1e-14)


@pytest.mark.parametrize("s,d", [(1.0, 1), (1.5, 2), (2.0, 2), (2.0, 3), (1.6, 3)])
def test_lattice_sum_shell_crosscheck(s, d):
    total, tail = lattice_sum_shells(s, d, rel_tol=1e-8)
    exact = lattice_sum_linf(s, d)
    assert abs(total - exact) <= tail + 1e-9 * exact


@pytest.mark.parametrize("s,d,K", [(1.0, 1, 5), (1.5, 2, 4), (2.0, 3, 3)])
def test_lattice_tail_direct(s, d, K):
    inner = sum(
        max(abs(v) for v in k) ** (-2 * s)
        for k in itertools.product(range(-K, K + 1), repeat=d)
        if any(k)
    )
    assert lattice_sum_linf(s, d) - inner == pytest.approx(lattice_tail_linf(s, d, K), rel=1e-9)


def test_lattice_sum_divergent():
    assert lattice_sum_linf(1.0, 2) == math.inf


def test_fourier_sup_components_m5():
    sup = fourier_sobolev_sup(5, 1, 1.0, 1.0)
    assert sup.components["classical_bias"] == pytest.approx(1 / 9)
    assert sup.components["aliasing_bound"] == pytest.approx((4 + math.pi**2 / 3) / 25)
    assert sup.form == EXACT_PHI
    assert sup.sup_sq <= sup.sup_sq_upper
    assert sup.sup_sq >= sup.components["classical_bias"]


def test_fourier_sup_zero_radius():
    assert fourier_sobolev_sup(7, 2, 2.0, 0.0).sup_sq == 0.0


def test_fourier_sup_rough_class():
    sup = fourier_sobolev_sup(7, 2, 1.0, 1.0)
    assert sup.sup_sq == math.inf and sup.warnings


def _dense_class_value(r, m, s, K):
    ks = [k for k in itertools.product(range(-K, K + 1), repeat=len(r)) if any(k)]
    d = np.array([max(abs(a + m * b) for a, b in zip(r, k)) ** (-2 * s) for k in ks])
    M = np.diag(d) + np.sqrt(np.outer(d, d))
    w, V = np.linalg.eigh(M)
    return w[-1], V[:, -1], ks


@pytest.mark.parametrize("m,d,s,K", [(5, 1, 1.0, 300), (7, 1, 2.0, 300), (5, 2, 1.5, 12)])
def test_fourier_sup_dense_oracle(m, d, s, K):
    # dense eigenvalues per residue class against the secular-equation solver
    sup = fourier_sobolev_sup(m, d, s, 1.0, K=K)
    h = (m - 1) // 2
    best = max(_dense_class_value(r, m, s, K)[0] for r in itertools.product(range(h + 1), repeat=d))
    assert sup.sup_sq == pytest.approx(best, rel=1e-10)
    assert best <= fourier_sobolev_sup(m, d, s, 1.0).sup_sq_upper


def test_fourier_sup_attained_by_explicit_function():
    m, s, R = 5, 1.0, 1.0
    sup = fourier_sobolev_sup(m, 1, s, R)
    r = sup.components["worst_class"]
    lam, u, ks = _dense_class_value(tuple(r), m, s, 60)
    d = np.array([max(abs(r[0] + m * k[0]), 1) ** (-2 * s) for k in ks])
    coeffs = R * np.sqrt(d) * u
    f = FourierFunction(1, [[r[0] + m * k[0]] for k in ks], coeffs)
    assert sobolev_seminorm_sq(f, s) == pytest.approx(R**2, rel=1e-10)
    err = fourier_l2_distance_sq(f, interpolate_fourier(f, m), FourierBasis.grid(m))
    assert err == pytest.approx(lam * R**2, rel=1e-8)
    assert err <= sup.sup_sq_upper


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([3, 5, 7, 9]), st.floats(0.6, 2.5), st.integers(0, 2**32))
def test_random_ball_elements_below_sup(m, s, seed):
    rng = np.random.default_rng(seed)
    ls = rng.choice(np.arange(-40, 41), size=8, replace=False)
    c = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    f = FourierFunction(1, ls[:, None], c)
    semi = sobolev_seminorm_sq(f, s)
    if semi == 0:
        return
    f = f.scaled(1 / math.sqrt(semi))
    err = fourier_l2_distance_sq(f, interpolate_fourier(f, m), FourierBasis.grid(m))
    assert err <= fourier_sobolev_sup(m, 1, s, 1.0).sup_sq_upper * (1 + 1e-9)


def test_fourier_sup_rate_d1():
    ms = [31, 63, 127, 255]
    vals = [fourier_sobolev_sup(m, 1, 1.0, 1.0).sup_sq for m in ms]
    slope, _, _ = fit_rate_slope(zip(ms, vals))
    assert slope == pytest.approx(-2.0, abs=0.05)


def test_generic_sup_brackets_fourier_value():
    m, s = 7, 1.5
    exact = fourier_sobolev_sup(m, 1, s, 1.0)
    g = generic_sobolev_sup(FourierBasis.grid(m), equidistant_grid(m), s, 1.0, K=40)
    assert g.form == RATE
    assert g.sup_sq <= exact.sup_sq_upper * (1 + 1e-9)
    assert g.sup_sq_upper >= exact.sup_sq * (1 - 1e-9)


def test_dispatch_fourier_is_exact():
    sup = sup_interpolation_bias(FourierBasis.grid(7), SobolevBall(1, 1.5, 1.0))
    assert sup.form == EXACT_PHI


def test_generic_sup_spline():
    sup = sup_interpolation_bias(SplineBasis(9), SobolevBall(1, 1.0, 1.0))
    assert sup.form == RATE and 0 < sup.sup_sq <= sup.sup_sq_upper < math.inf


def test_generic_sup_piecewise_constant_holder():
    sup = sup_interpolation_bias(PiecewiseConstantBasis(10), HoelderBall(1.0, 1.0))
    assert sup.sup_sq == pytest.approx(1 / 300)


def test_holder_design_bound_equidistant():
    rep = holder_design_bound(equidistant_grid(50), HoelderBall(1.0, 1.0), 1.0)
    assert rep.components["perturbation_sum"] == 0.0
    assert rep.components["bias_sup"] == pytest.approx(2 / 50**2)
    assert holder_design_bound(equidistant_grid(50), HoelderBall(1.0, 0.0), 1.0).value == 0.0


def test_holder_design_bound_perturbation():
    n, a, c = 40, 0.5, 0.3
    dev = np.zeros(n)
    dev[5] = -c * n ** (-1 / (2 * a))
    rep = holder_design_bound(perturbed_design(n, dev), HoelderBall(a, 1.0), 1.0)
    assert rep.components["perturbation_sum"] <= c ** (2 * a) + 1e-15
    assert rep.components["chain_intermediate"] <= rep.components["bias_sup"]


def test_multidim_bound_example():
    rep = multidim_bound(1.0, 1, 1.0, 1.0, 31)
    assert 0 < rep.value < 1 and rep.form == EXACT_PHI
    assert {"classical_bias", "aliasing_bound", "bias_sup"} <= set(rep.components)
    assert multidim_bound(1.0, 1, 0.0, 1.0, 31).value == 0.0


def test_multidim_bound_rough_warns():
    with pytest.warns(UserWarning):
        rep = multidim_bound(0.5, 1, 1.0, 1.0, 31)
    assert rep.warnings and rep.value == 1.0


def test_multidim_bound_even_grid():
    with pytest.raises(PreconditionError):
        multidim_bound(1.0, 1, 1.0, 1.0, 32)


def test_optimal_n0():
    assert optimal_n0(10**6, 1.0, 1) == 100


def test_random_design_bound_examples():
    n = 400
    rep = random_design_bound(1.0, 1, 1.0, 1.0, n, n0=n)
    assert rep.value >= math.sqrt(n) and rep.components["hs_term"] == pytest.approx(math.sqrt(n))
    rep0 = random_design_bound(1.0, 1, 0.0, 1.0, n, n0=9)
    assert rep0.value == pytest.approx(9 / 20)
    with pytest.raises(PreconditionError):
        random_design_bound(1.0, 1, 1.0, 1.0, n, n0=n + 1)


def test_fit_slope_examples():
    pairs = [(n, 3.0 * n ** -0.5) for n in (10, 100, 1000)]
    assert fit_rate_slope(pairs)[0] == pytest.approx(-0.5, abs=1e-12)
    assert fit_rate_slope([(n, 2.0) for n in (3, 30, 300)])[0] == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        fit_rate_slope([(10, 1.0), (20, 0.5)])
