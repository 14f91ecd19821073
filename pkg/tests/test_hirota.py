from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kptau.errors import ZeroTau
from kptau.families import calogero_moser_family, cauchy_family, generic_jordan_family, rational_family, soliton_family
from kptau.hirota import (
    hg_factorization,
    kp_bilinear_residual_fd,
    kp_convergence,
    plucker_relation_residual,
    xi_matrix,
    xi_rank2_check,
)
from kptau.linalg import EXACT, FLOAT, JordanSpec

nonzero = st.fractions(min_value=-9, max_value=9, max_denominator=7).filter(lambda x: abs(x) > Fraction(1, 4))


def _float_families():
    return {
        "soliton": soliton_family([0.6, 0.2, -0.3, -0.6], [[1, 1, 0, 0], [0, 0, 1, 1]]).system(),
        "cauchy": cauchy_family([0.5, -0.4, 0.1], [1.5, -1.2], [[1, 2, 0], [0, 1, 1]]),
        "calogero-moser": calogero_moser_family([0.5, -0.3], [1.0, 2.0]).system(),
        "generic-jordan": generic_jordan_family(JordanSpec(((0.3, 2), (-0.2, 1))), JordanSpec(((1.5, 1), (-1.0, 1))),
                                                [[1, 2, 3], [0, 1, 1]]),
    }


@given(st.lists(nonzero, min_size=4, max_size=4, unique=True))
def test_plucker_exact_zero_rational(zs):
    sys_ = rational_family(2, 2, [[1, 2, 0, 3], [0, 1, -1, 2]])
    xi = xi_matrix(sys_, zs, [])
    assert plucker_relation_residual(xi) == 0
    assert xi_rank2_check(sys_, zs, []) == 0


def test_xi_antisymmetric_and_validated():
    sys_ = rational_family(1, 1, [[3, 5]])
    xi = xi_matrix(sys_, [2, 3, -1, 5], [])
    assert (xi.entries == -xi.entries.T).all()
    with pytest.raises(ValueError):
        xi_matrix(sys_, [2, 2, 3, 4], [])
    with pytest.raises(ValueError):
        xi_matrix(sys_, [2, 3, 4], [])


@pytest.mark.parametrize("name", ["soliton", "cauchy", "calogero-moser", "generic-jordan"])
def test_plucker_float_families(name):
    sys_ = _float_families()[name]
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(100):
        t = list(rng.uniform(-0.5, 0.5, 3))
        zs = list(rng.uniform(2.0, 4.0, 4) * rng.choice([-1, 1], 4))
        worst = max(worst, plucker_relation_residual(xi_matrix(sys_, zs, t)))
    assert worst <= 1e-9


@pytest.mark.parametrize("name", ["soliton", "cauchy", "calogero-moser", "generic-jordan"])
def test_hg_factorization_float(name):
    sys_ = _float_families()[name]
    rng = np.random.default_rng(1)
    for _ in range(10):
        t = list(rng.uniform(-0.5, 0.5, 3))
        zs = list(rng.uniform(2.0, 4.0, 4) * rng.choice([-1, 1], 4))
        assert xi_rank2_check(sys_, zs, t) <= 1e-9


def test_hg_rational_n1_closed_form():
    # tau = 3 + 5 t1, M = C^T (A C^T)^{-1} F: H(z) = tau - 5/z, G(z) = z
    sys_ = rational_family(1, 1, [[3, 5]])
    H, G = hg_factorization(sys_, Fraction(2), [Fraction(1)])
    assert H == 8 - Fraction(5, 2) and G == 2


def test_hg_zero_tau():
    sys_ = rational_family(1, 1, [[3, 5]], FLOAT)
    with pytest.raises(ZeroTau):
        hg_factorization(sys_, 2.0, [-0.6])


def test_kp_residual_exact_rational_converges():
    sys_ = rational_family(2, 2, [[1, 0, 1, 0], [0, 1, 0, 1]])
    t0 = [Fraction(1, 10)] * 3
    conv = kp_convergence(sys_, t0, Fraction(1, 1000))
    assert conv.coarse <= 1e-5
    assert 3.5 <= conv.ratio <= 4.5


def test_kp_residual_soliton_converges():
    sys_ = _float_families()["soliton"]
    conv = kp_convergence(sys_, [0.1, -0.05, 0.02], 1e-3)
    assert conv.coarse <= 1e-5
    assert 3.5 <= conv.ratio <= 4.5


def test_kp_residual_linear_tau_is_exact():
    # tau = 3 + 5 t1 has no O(h^2) error: the stencil is exact
    sys_ = rational_family(1, 1, [[3, 5]])
    assert kp_bilinear_residual_fd(sys_, [Fraction(1, 2)], Fraction(1, 100)) == 0

