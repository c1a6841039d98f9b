import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lecam_equiv.funclass import (
    FourierFunction,
    HoelderBall,
    SobolevBall,
    holder_worst_bias_bound,
    sample_from_sobolev_ball,
    sobolev_seminorm_sq,
)
from strategies import fourier_functions


def test_seminorm_constant_is_zero():
    assert sobolev_seminorm_sq(FourierFunction.mode((0,), 3.0), 1.0) == 0.0


def test_seminorm_single_mode():
    assert sobolev_seminorm_sq(FourierFunction.mode((2,)), 1.0) == 4.0


def test_seminorm_uses_sup_norm():
    f = FourierFunction.mode((1, 3), 0.5)
    assert sobolev_seminorm_sq(f, 2.0) == pytest.approx(20.25, rel=1e-15)


def test_sampler_hits_boundary():
    ball = SobolevBall(1, 1.0, 1.0)
    f = sample_from_sobolev_ball(ball, 1, 3)
    assert sobolev_seminorm_sq(f, 1.0) == pytest.approx(1.0, rel=1e-12)
    assert ball.contains(f)


def test_sampler_cutoff_zero_is_constant():
    f = sample_from_sobolev_ball(SobolevBall(2, 1.5, 2.0), 0, 11)
    assert f.max_frequency() == 0
    assert sobolev_seminorm_sq(f, 1.5) == 0.0


def test_sampler_deterministic():
    ball = SobolevBall(1, 2.0, 3.0)
    a = sample_from_sobolev_ball(ball, 64, 9)
    b = sample_from_sobolev_ball(ball, 64, 9)
    assert np.array_equal(a.coeffs, b.coeffs) and np.array_equal(a.freqs, b.freqs)


def test_sampler_real_valued():
    f = sample_from_sobolev_ball(SobolevBall(2, 1.5, 1.0), 3, 1)
    x = np.random.default_rng(0).random((50, 2))
    assert np.abs(f(x).imag).max() < 1e-13


def test_holder_bias_examples():
    assert holder_worst_bias_bound(HoelderBall(1.0, 1.0), 10) == pytest.approx(1 / 300, rel=1e-15)
    assert holder_worst_bias_bound(HoelderBall(0.5, 2.0), 1) == pytest.approx(2.0)
    assert holder_worst_bias_bound(HoelderBall(1.0, 0.0), 7) == 0.0


def test_invalid_balls():
    with pytest.raises(ValueError):
        SobolevBall(1, 0.0, 1.0)
    with pytest.raises(ValueError):
        HoelderBall(1.5, 1.0)


def test_conjugate_symmetry_enforced():
    with pytest.raises(ValueError):
        FourierFunction(1, [[1], [-1]], [1.0, 2.0], real=True)


def test_evaluation_matches_definition():
    f = FourierFunction(1, [[1], [-3]], [1.0, 0.5j])
    x = 0.3
    expected = np.exp(2j * np.pi * x) + 0.5j * np.exp(-6j * np.pi * x)
    assert f(np.array([x]))[0] == pytest.approx(expected, abs=1e-14)


@settings(max_examples=50, deadline=None)
@given(fourier_functions(d=2, max_freq=6))
def test_json_round_trip(f):
    g = FourierFunction.from_json(f.to_json())
    assert g.as_dict() == f.as_dict()


@settings(max_examples=40, deadline=None)
@given(
    st.integers(1, 3),
    st.floats(0.3, 3.0),
    st.floats(0.0, 5.0),
    st.integers(0, 5),
    st.integers(0, 2**32),
    st.booleans(),
)
def test_sampler_stays_in_ball(d, s, R, cutoff, seed, boundary):
    ball = SobolevBall(d, s, R)
    f = sample_from_sobolev_ball(ball, cutoff, seed, boundary)
    assert ball.contains(f)
    assert f.max_frequency() <= cutoff


@settings(max_examples=50, deadline=None)
@given(fourier_functions(d=1, max_freq=10))
def test_parseval_on_fine_grid(f):
    # a grid finer than twice the bandwidth integrates |f|^2 exactly
    m = 64
    x = np.arange(m) / m
    assert np.mean(np.abs(f(x)) ** 2) == pytest.approx(f.l2_norm_sq(), rel=1e-10, abs=1e-12)
