"""One test per acceptance criterion, each recording a PASS/FAIL line at its tolerance."""

import itertools
from fractions import Fraction

import numpy as np

from kptau import linalg as la
from kptau.cli import main
from kptau.families import (
    calogero_moser_family,
    cauchy_family,
    generic_jordan_family,
    kar_identity_check,
    random_eigenvalues,
    random_jordan_pair,
    random_matrix,
    random_sizes,
    rational_family,
    soliton_family,
    soliton_tau_det,
    soliton_tau_direct,
)
from kptau.hirota import kp_convergence, plucker_relation_residual, xi_matrix, xi_rank2_check
from kptau.linalg import EXACT, FLOAT, JordanSpec
from kptau.rankone import lemma_identities, proposition_residuals, verify_rank_one
from kptau.schur import expansion_sum, min_poly_annihilation, schur_expansion
from kptau.tau import (
    geometric_M,
    geometric_relation,
    gk_gauge_relation,
    max_pairwise_rel,
    tau_at_origin_matrix,
    tau_general,
    tau_W_BCD,
)


def _float_spec(spec):
    return JordanSpec(tuple((float(e), s) for e, s in spec.blocks))


def _float_pairs(seed, count, n_max=4, N_max=8, scale=0.9):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n, N = int(rng.integers(1, n_max + 1)), int(rng.integers(1, N_max + 1))
        Bspec, Dspec = random_jordan_pair(rng, n, N, scale=scale)
        yield _float_spec(Bspec), _float_spec(Dspec)


def _generic_float(seed):
    rng = np.random.default_rng(seed)
    n, N = int(rng.integers(1, 4)), int(rng.integers(3, 7))
    n = min(n, N)
    Bspec, Dspec = random_jordan_pair(rng, n, N, scale=0.6)
    return generic_jordan_family(_float_spec(Bspec), _float_spec(Dspec), random_matrix(rng, n, N))


def _float_families():
    out = {
        "soliton": soliton_family([0.6, 0.2, -0.3, -0.6], [[1, 1, 0, 0], [0, 0, 1, 1]]).system(),
        "cauchy": cauchy_family([0.5, -0.4, 0.1], [1.5, -1.2], [[1, 2, 0], [0, 1, 1]]),
        "calogero-moser": calogero_moser_family([0.5, -0.3], [1.0, 2.0]).system(),
    }
    for seed in range(3):
        out[f"generic-{seed}"] = _generic_float(seed)
    return out


def _exact_pairs(seed, count, nilpotent_D=False):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n, N = int(rng.integers(1, 5)), int(rng.integers(1, 9))
        if not nilpotent_D:
            yield random_jordan_pair(rng, n, N)
            continue
        sizes = random_sizes(rng, N)
        eigs = random_eigenvalues(rng, len(sizes), exclude=[Fraction(0)])
        yield JordanSpec(tuple(zip(eigs, sizes))), JordanSpec.nilpotent(n)


def test_criterion_01_rank_one_identities(criterion):
    exact_ok = sum(all(v == 0 for v in proposition_residuals(B, D, EXACT).values())
                   for B, D in _exact_pairs(101, 50, nilpotent_D=True))
    worst = max(max(proposition_residuals(B, D, FLOAT).values()) for B, D in _float_pairs(102, 50))
    passed = exact_ok == 50 and worst <= 1e-10
    criterion(1, "rank-one identities", passed, f"exact nilpotent D {exact_ok}/50, float worst {worst:.2e} <= 1e-10")
    assert passed


def test_criterion_02_lemma_consistency(criterion):
    exact_ok = sum(all(v == 0 for v in lemma_identities(B, D, EXACT).values()) for B, D in _exact_pairs(102, 50))
    factor = product = 0.0
    for B, D in _float_pairs(102, 50):
        lem = lemma_identities(B, D, FLOAT)
        factor = max(factor, lem["A(B,D) = A0 r_D(B)"])
        product = max(product, lem["A(B) = K(D) A(B,D)"])
    rng = np.random.default_rng(103)
    kar = 0.0
    for _ in range(20):
        n, N = int(rng.integers(1, 5)), int(rng.integers(1, 9))
        eigs = list(rng.choice(np.linspace(-1, 1, 41), size=n + N, replace=False))
        kar = max(kar, kar_identity_check(eigs[:N], eigs[N:], FLOAT))
    passed = exact_ok == 50 and max(factor, product, kar) <= 1e-12
    criterion(2, "lemma consistency", passed, f"exact {exact_ok}/50, float A0 r_D(B) {factor:.2e}, "
                                             f"K A(B,D) {product:.2e}, diagonal identity {kar:.2e} <= 1e-12")
    assert passed


def test_criterion_03_three_forms(criterion):
    rng = np.random.default_rng(104)
    worst = 0.0
    for B, D in _float_pairs(105, 20, scale=0.8):
        C = random_matrix(rng, D.dim, B.dim) if D.dim <= B.dim else None
        if C is None:
            continue
        for _ in range(5):
            worst = max(worst, max_pairwise_rel(tau_W_BCD(B, C, D, list(rng.uniform(-0.5, 0.5, 3)))))
    passed = worst <= 1e-10
    criterion(3, "three-form agreement", passed, f"worst pairwise {worst:.2e} <= 1e-10 at 5 t per configuration")
    assert passed


def test_criterion_04_D_independence(criterion):
    rng = np.random.default_rng(106)
    worst = 0.0
    for _ in range(10):
        n, N = int(rng.integers(1, 4)), int(rng.integers(3, 7))
        n = min(n, N)
        Bspec, D1 = random_jordan_pair(rng, n, N, scale=0.6)
        D2 = JordanSpec.diagonal([Fraction(3 + i, 2) for i in range(n)])
        Bspec, D1, D2 = _float_spec(Bspec), _float_spec(D1), _float_spec(D2)
        C = random_matrix(rng, n, N)
        ts = [list(rng.uniform(-0.5, 0.5, 3)) for _ in range(5)]
        ratios = [tau_W_BCD(Bspec, C, D1, t)[0] / tau_W_BCD(Bspec, C, D2, t)[0] for t in ts]
        worst = max(worst, max_pairwise_rel(ratios))
    passed = worst <= 1e-9
    criterion(4, "D-independence", passed, f"worst ratio spread {worst:.2e} <= 1e-9 over 5 t")
    assert passed


def test_criterion_05_soliton_exponential_sum(criterion):
    rng = np.random.default_rng(107)
    worst = 0.0
    for N in range(1, 7):
        betas = list(rng.uniform(-0.9, 0.9, N))
        for n in range(1, N + 1):
            fam = soliton_family(betas, rng.normal(size=(n, N)))
            t = list(rng.uniform(-0.5, 0.5, 3))
            worst = max(worst, max_pairwise_rel([soliton_tau_det(fam, t), soliton_tau_direct(fam, t)]))
    passed = worst <= 1e-11
    criterion(5, "soliton exponential sum", passed, f"worst {worst:.2e} <= 1e-11 for all n <= N <= 6")
    assert passed


def test_criterion_06_schur_expansion(criterion):
    rng = np.random.default_rng(108)
    exact_ok = True
    for n, k in ((1, 1), (2, 2), (2, 3), (3, 2)):
        sys_ = rational_family(n, k, random_matrix(rng, n, n + k, EXACT))
        d0 = la.det(tau_at_origin_matrix(sys_))
        if d0 == 0:
            continue
        terms = schur_expansion(sys_, n * k)
        for _ in range(3):
            t = [Fraction(int(rng.integers(-9, 10)), 7) for _ in range(n + k)]
            exact_ok = exact_ok and expansion_sum(terms, t, EXACT) * d0 == tau_general(sys_, t)
    worst = 0.0
    for betas, C in (([0.5, -0.3], [[1, 1]]), ([0.6, 0.2, -0.3, -0.6], [[1, 1, 0, 0], [0, 0, 1, 1]]),
                     ([0.55, 0.1, -0.45], [[1, 2, 0.5], [0, 1, 1]])):
        sys_ = soliton_family(betas, C).system()
        terms = schur_expansion(sys_, 12)
        d0 = la.det(tau_at_origin_matrix(sys_))
        for _ in range(5):
            t = list(rng.uniform(-0.1, 0.1, 3))
            worst = max(worst, max_pairwise_rel([expansion_sum(terms, t) * d0, tau_general(sys_, t)]))
    passed = exact_ok and worst <= 1e-8
    criterion(6, "Schur expansion", passed, f"rational exact {exact_ok}, soliton worst {worst:.2e} <= 1e-8 at weight 12")
    assert passed


def test_criterion_07_plucker_relation(criterion):
    sys_ = rational_family(2, 2, [[1, 2, 0, 3], [0, 1, -1, 2]])
    rng = np.random.default_rng(109)
    exact_ok = True
    for _ in range(10):
        zs = [Fraction(int(v), int(rng.integers(1, 4))) for v in rng.choice(np.arange(2, 40), 4, replace=False)]
        if len(set(zs)) < 4:
            continue
        exact_ok = exact_ok and plucker_relation_residual(xi_matrix(sys_, zs, [])) == 0
    worst = hg = 0.0
    for fam in _float_families().values():
        for s in range(100):
            t = list(rng.uniform(-0.4, 0.4, 3))
            zs = list(rng.uniform(2.0, 4.0, 4) * np.exp(2j * np.pi * rng.uniform(size=4)))
            worst = max(worst, plucker_relation_residual(xi_matrix(fam, zs, t)))
            if s < 10:
                hg = max(hg, xi_rank2_check(fam, zs, t))
    passed = exact_ok and worst <= 1e-9 and hg <= 1e-9
    criterion(7, "Plücker relation", passed, f"rational exact {exact_ok}, float worst {worst:.2e}, H,G worst {hg:.2e}")
    assert passed


def test_criterion_08_geometric_form(criterion):
    rng = np.random.default_rng(110)
    geo = gauge = 0.0
    for fam in _float_families().values():
        for _ in range(3):
            t = list(rng.uniform(-0.3, 0.3, 3))
            geo = max(geo, geometric_relation(fam, t))
            gauge = max(gauge, gk_gauge_relation(fam, t))
    exact = rational_family(2, 2, [[1, 0, 1, 0], [0, 1, 0, 1]])
    t = [Fraction(1, 2), Fraction(-1, 3), Fraction(1, 5)]
    exact_ok = geometric_relation(exact, t) == 0 and gk_gauge_relation(exact, t) == 0
    passed = exact_ok and geo <= 1e-10 and gauge <= 1e-10
    criterion(8, "geometric form", passed, f"geometric {geo:.2e}, gauge {gauge:.2e} <= 1e-10, rational exact {exact_ok}")
    assert passed


def test_criterion_09_min_poly_annihilation(criterion):
    worst = 0.0
    exact_ok = True
    for fam in _float_families().values():
        vals = min_poly_annihilation(fam.f, fam.g, fam.Bspec, fam.Dspec, geometric_M(fam), 2 * fam.N)
        scale = max(1.0, la.max_abs(fam.A))
        worst = max(worst, max(abs(complex(v)) for v in vals) / scale)
    for sys_ in (rational_family(2, 2, [[1, 0, 1, 0], [0, 1, 0, 1]]), rational_family(1, 3, [[1, 2, 0, 1]])):
        vals = min_poly_annihilation(sys_.f, sys_.g, sys_.Bspec, sys_.Dspec, geometric_M(sys_), 2 * sys_.N, EXACT)
        exact_ok = exact_ok and all(v == 0 for v in vals)
    passed = exact_ok and worst <= 1e-12
    criterion(9, "minimal-polynomial annihilation", passed, f"exact {exact_ok}, float worst {worst:.2e} <= 1e-12")
    assert passed


def test_criterion_10_kp_finite_difference(criterion):
    cases = [
        ("rational", rational_family(2, 2, [[1, 0, 1, 0], [0, 1, 0, 1]]), [Fraction(1, 10)] * 3, Fraction(1, 1000)),
        ("soliton", soliton_family([0.6, 0.2, -0.3, -0.6], [[1, 1, 0, 0], [0, 0, 1, 1]]).system(), [0.1, -0.05, 0.02],
         1e-3),
    ]
    parts, passed = [], True
    for name, sys_, t0, h in cases:
        conv = kp_convergence(sys_, t0, h)
        ok = float(conv.coarse) <= 1e-5 and 3.5 <= conv.ratio <= 4.5
        passed = passed and ok
        parts.append(f"{name} {float(conv.coarse):.2e} ratio {conv.ratio:.3f}")
    criterion(10, "KP finite-difference residual", passed, ", ".join(parts))
    assert passed


def test_criterion_11_negative_control(criterion, configs, capsys):
    sys_ = rational_family(2, 2, [[1, 0, 1, 0], [0, 1, 0, 1]])
    A = sys_.A.copy()
    A[0, 0] += Fraction(1, 1000)
    caught = not verify_rank_one(sys_.replace(A=A)).passed
    codes = [main(["verify", str(configs / name), "--samples", "5", "--corrupt"])
             for name in ("rational.json", "soliton.json")]
    capsys.readouterr()
    passed = caught and all(c != 0 for c in codes)
    criterion(11, "negative control", passed, f"rank-one check fails {caught}, verify exit codes {codes}")
    assert passed
