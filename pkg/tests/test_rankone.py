from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from kptau import linalg as la
from kptau.errors import EigenvalueCollision, ShapeError
from kptau.families import random_jordan_pair
from kptau.linalg import EXACT, FLOAT, JordanSpec
from kptau.rankone import (
    RankOneSystem,
    build_A,
    build_A0,
    build_A_residue,
    build_A_shift,
    build_K,
    build_k,
    canonical_vectors,
    lemma_identities,
    proposition_residuals,
    verify_rank_one,
)

w, z = sympy.symbols("w z")


def _q(x):
    return sympy.Rational(x.numerator, x.denominator)


def _frac(x):
    return Fraction(str(sympy.nsimplify(x)))


def _sympy_A0(Bspec, Dspec):
    """[w^(nu-1)] (beta_j - delta_i + w)^(-mu)."""
    out = []
    for i, mu in Dspec.multi_index:
        row = []
        for j, nu in Bspec.multi_index:
            diff = _q(Bspec.eigenvalues[j - 1]) - _q(Dspec.eigenvalues[i - 1])
            row.append(_frac(sympy.series((diff + w) ** (-mu), w, 0, nu).coeff(w, nu - 1)))
        out.append(row)
    return out


def _sympy_A(Bspec, Dspec):
    """[w^(nu-1)] r_D(beta_j + w) / (beta_j - delta_i + w)^mu."""
    r = sympy.Mul(*[(z - _q(d)) ** s for d, s in Dspec.blocks])
    out = []
    for i, mu in Dspec.multi_index:
        row = []
        for j, nu in Bspec.multi_index:
            b, d = _q(Bspec.eigenvalues[j - 1]), _q(Dspec.eigenvalues[i - 1])
            expr = r.subs(z, b + w) / (b - d + w) ** mu
            row.append(_frac(sympy.series(expr, w, 0, nu).removeO().coeff(w, nu - 1)))
        out.append(row)
    return out


def _sympy_K(Dspec):
    """K[a, (i, mu)] = Res_{z = delta_i} z^(n-a) (z - delta_i)^(mu-1) / r_D(z)."""
    n = Dspec.dim
    r = sympy.Mul(*[(z - _q(d)) ** s for d, s in Dspec.blocks])
    out = []
    for a in range(1, n + 1):
        row = []
        for i, mu in Dspec.multi_index:
            d = _q(Dspec.eigenvalues[i - 1])
            row.append(_frac(sympy.residue(z ** (n - a) * (z - d) ** (mu - 1) / r, z, d)))
        out.append(row)
    return out


BSPEC = JordanSpec(((Fraction(1, 2), 2), (Fraction(-3, 2), 1)))
DSPEC = JordanSpec(((Fraction(1, 4), 2), (2, 1)))


def test_A0_matches_sympy_series():
    assert build_A0(BSPEC, DSPEC, EXACT).tolist() == _sympy_A0(BSPEC, DSPEC)


def test_A0_frozen_entries():
    A0 = build_A0(JordanSpec(((1, 2),)), JordanSpec.diagonal([-1]), EXACT)
    # 1/(1+1) and -1/(1+1)^2
    assert A0.tolist() == [[Fraction(1, 2), Fraction(-1, 4)]]


def test_A_matches_sympy_residue_and_factorization():
    want = _sympy_A(BSPEC, DSPEC)
    assert build_A(BSPEC, DSPEC, EXACT).tolist() == want
    assert build_A_residue(BSPEC, DSPEC, EXACT).tolist() == want


def test_K_matches_sympy_residue():
    assert build_K(DSPEC, backend=EXACT).tolist() == _sympy_K(DSPEC)
    spec = JordanSpec(((0, 1), (1, 2), (-2, 1)))
    assert build_K(spec, backend=EXACT).tolist() == _sympy_K(spec)


def test_K_for_nilpotent_is_identity():
    # Res_0 z^(n-a) z^(mu-1) / z^n is nonzero only for mu = a
    K = build_K(JordanSpec.nilpotent(3), backend=EXACT)
    assert K.tolist() == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_k_vector_residue():
    r = sympy.Mul(*[(z - _q(d)) ** s for d, s in DSPEC.blocks])
    want = [_frac(sympy.residue(z**3 * (z - _q(DSPEC.eigenvalues[i - 1])) ** (mu - 1) / r, z, _q(DSPEC.eigenvalues[i - 1])))
            for i, mu in DSPEC.multi_index]
    assert list(build_k(DSPEC, EXACT)) == want


def test_A_shift_entries():
    A = build_A_shift(JordanSpec(((2, 2), (3, 1))), 2, EXACT)
    # row a=1: [b, 1, b'] ; row a=2: [1, 0, 1]
    assert A.tolist() == [[2, 1, 3], [1, 0, 1]]
    with pytest.raises(ShapeError):
        build_A_shift(JordanSpec.nilpotent(2), 0, EXACT)


def test_A0_rejects_shared_spectrum():
    with pytest.raises(EigenvalueCollision):
        build_A0(JordanSpec.diagonal([1, 2]), JordanSpec.diagonal([2]), EXACT)


def test_propositions_exact_on_fixed_data():
    res = proposition_residuals(BSPEC, DSPEC, EXACT)
    assert all(v == 0 for v in res.values())
    lem = lemma_identities(BSPEC, DSPEC, EXACT)
    assert all(v == 0 for v in lem.values())


@given(st.integers(1, 3), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_rank_one_sweep_exact(n, N, seed):
    rng = np.random.default_rng(seed)
    Bspec, Dspec = random_jordan_pair(rng, n, N)
    assert all(v == 0 for v in proposition_residuals(Bspec, Dspec, EXACT).values())
    assert all(v == 0 for v in lemma_identities(Bspec, Dspec, EXACT).values())


@given(st.integers(1, 4), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_rank_one_sweep_float(n, N, seed):
    rng = np.random.default_rng(seed)
    Bspec, Dspec = random_jordan_pair(rng, n, N, scale=0.9)
    Bspec = JordanSpec(tuple((float(e), s) for e, s in Bspec.blocks))
    Dspec = JordanSpec(tuple((float(e), s) for e, s in Dspec.blocks))
    assert max(proposition_residuals(Bspec, Dspec, FLOAT).values()) <= 1e-10


def test_canonical_vectors():
    fD, gB, k = canonical_vectors(BSPEC, DSPEC, EXACT)
    assert list(fD) == [1, 0, 1]
    assert list(gB) == [1, 0, 1]
    assert k.shape == (3,)


def _system(A):
    B, D = BSPEC, DSPEC
    fD, gB, _ = canonical_vectors(B, D, EXACT)
    g = la.char_poly_of_matrix(D, B, EXACT).T @ gB
    C = la.matrix([[1, 0, 2], [0, 1, 1], [1, 1, 0]], EXACT)
    return RankOneSystem(A, B, C, D, la.eye(3, EXACT), fD, g, EXACT)


def test_verify_rank_one_passes_and_detects_corruption():
    A = build_A(BSPEC, DSPEC, EXACT)
    rep = verify_rank_one(_system(A))
    assert rep.passed and rep.sylvester == 0 and rep.exact
    bad = A.copy()
    bad[0, 0] += Fraction(1, 1000)
    rep = verify_rank_one(_system(bad))
    assert not rep.passed and rep.sylvester > 0


def test_annihilator_rank_on_wide_system():
    Bspec = JordanSpec.diagonal([Fraction(1, 2), Fraction(-1, 3), Fraction(1, 5), Fraction(2)])
    Dspec = JordanSpec.nilpotent(2)
    A = build_A_shift(Bspec, 2, EXACT)
    g = la.vector([b**2 for b in Bspec.eigenvalues], EXACT)
    sys_ = RankOneSystem(A, Bspec, la.matrix([[1, 0, 1, 0], [0, 1, 0, 1]], EXACT), Dspec, la.eye(2, EXACT),
                         Dspec.leading_indicator(EXACT), g, EXACT)
    rep = verify_rank_one(sys_)
    assert rep.annihilator_rank == 1 and rep.passed


def test_system_shape_validation():
    A = build_A(BSPEC, DSPEC, EXACT)
    with pytest.raises(ShapeError):
        RankOneSystem(A[:, :2], BSPEC, la.eye(3, EXACT), DSPEC, la.eye(3, EXACT), la.vector([1, 0, 1], EXACT),
                      la.vector([1, 0, 1], EXACT), EXACT)


def test_A_float_accurate_when_A0_is_large():
    # A0 entries reach about 2e7 here while A(B,D) stays of order 1
    Bf = JordanSpec(((0.0625, 5), (0.75, 2), (0.875, 1)))
    Df = JordanSpec(((0.25, 4),))
    Bx = JordanSpec(tuple((Fraction(e), s) for e, s in Bf.blocks))
    Dx = JordanSpec(tuple((Fraction(e), s) for e, s in Df.blocks))
    want = np.array(build_A(Bx, Dx, EXACT), dtype=float)
    assert np.abs(build_A(Bf, Df, FLOAT) - want).max() <= 1e-15 * np.abs(want).max()
    assert np.abs(build_A0(Bf, Df, FLOAT)).max() > 1e7
    assert max(proposition_residuals(Bf, Df, FLOAT).values()) <= 1e-15
    assert max(lemma_identities(Bf, Df, FLOAT).values()) <= 1e-15
