import numpy as np
import pytest

from lecam_equiv.basis import FourierBasis
from lecam_equiv.design import uniform_random_design
from lecam_equiv.emp import EmpiricalGeometry
from lecam_equiv.errors import RankDeficiencyError
from lecam_equiv.hiprec import factor_errors, gram_schmidt_hp, inverse, to_float, to_mp
from lecam_equiv.transform import empirical_gram_schmidt


def test_matches_double_precision_when_well_conditioned():
    geom = EmpiricalGeometry(FourierBasis.leading(1, 6), uniform_random_design(40, 1, 1))
    A = geom.E / np.sqrt(geom.n)
    hp = gram_schmidt_hp(A, bits=128)
    dp = empirical_gram_schmidt(geom)
    np.testing.assert_allclose(to_float(hp.T), dp.T, atol=1e-12)
    np.testing.assert_allclose(hp.r, dp.r, rtol=1e-12)


def test_factor_errors_tiny():
    geom = EmpiricalGeometry(FourierBasis.leading(1, 10), uniform_random_design(10, 1, 3))
    A = geom.E / np.sqrt(geom.n)
    err = factor_errors(A, gram_schmidt_hp(A))
    assert err["tt_vs_ginv"] < 1e-30 and err["orthonormality"] < 1e-30
    assert err["lower_max"] == 0.0


def test_inverse():
    M = np.array([[2.0, 1.0], [1.0, 3.0]])
    np.testing.assert_allclose(to_float(inverse(to_mp(M))), np.linalg.inv(M), atol=1e-15)


def test_rank_deficiency():
    A = np.ones((5, 2), dtype=complex)
    with pytest.raises(RankDeficiencyError):
        gram_schmidt_hp(A)
