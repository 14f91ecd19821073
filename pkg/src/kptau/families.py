"""Factories for the standard families of finite-determinant tau functions.

Every factory returns a fully populated :class:`RankOneSystem` (or a family
object that produces one), so downstream code needs no family-specific logic.

* rational: ``B = Lambda_N``, polynomial tau functions.
* soliton: diagonal B, Vandermonde A, exponential sums.
* cauchy: diagonal B and D with the Cauchy matrix as A.
* calogero-moser: ``B`` made of 2 x 2 Jordan blocks, rational in ``t_1``.
* generic-jordan: arbitrary Jordan data with ``A = A(B, D)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import linalg as la
from .errors import DegenerateVandermonde, RankError, ShapeError
from .linalg import EXACT, FLOAT, JordanSpec
from .rankone import RankOneSystem, build_A, build_A0, build_A_shift, build_K, canonical_vectors
from .schur import partitions_in_box, plucker_columns
from .tau import near_singular, tau_gk


def reversal(n: int, backend: str) -> np.ndarray:
    """The n x n anti-diagonal permutation J."""
    out = la.zeros((n, n), backend)
    for i in range(n):
        out[i, n - 1 - i] = la.one(backend)
    return out


def _full_row_rank(C: np.ndarray) -> None:
    if la.rank(C) != C.shape[0]:
        raise RankError("C must have full row rank")


# ---------------------------------------------------------------------------
# rational


def rational_family(n: int, k: int, C, backend: str = EXACT) -> RankOneSystem:
    """Polynomial tau functions with ``B = Lambda_{n+k}``.

    D is the upper shift ``Lambda_n`` and ``A = [J | 0]`` with J the reversal,
    so that ``A B - D^T A = e_1 e_{n+1}^T``.  With ``F = J`` the generalized
    tau equals ``det([Id_n | 0] E_B(t) C^T)`` and is ``det(C[:, :n])`` at t = 0.
    """
    if n < 1 or k < 0:
        raise ShapeError("need n >= 1 and k >= 0")
    N = n + k
    C = la.matrix(C, backend)
    if C.shape != (n, N):
        raise ShapeError(f"C has shape {C.shape}, expected {(n, N)}")
    _full_row_rank(C)
    Bspec, Dspec = JordanSpec.nilpotent(N), JordanSpec.nilpotent(n)
    A = build_A_shift(Bspec, n, backend)
    f = Dspec.leading_indicator(backend)
    g = la.zeros((N,), backend)
    if k > 0:
        g[n] = la.one(backend)
    return RankOneSystem(A, Bspec, C, Dspec, reversal(n, backend), f, g, backend)


# ---------------------------------------------------------------------------
# solitons


@dataclass(frozen=True, eq=False)
class SolitonFamily:
    """Multisoliton data: distinct ``betas`` and an n x N coefficient matrix C."""

    betas: tuple
    C: np.ndarray
    backend: str = FLOAT

    def __post_init__(self):
        object.__setattr__(self, "betas", tuple(self.betas))
        C = la.matrix(self.C, self.backend)
        if C.shape[1] != len(self.betas) or C.shape[0] > len(self.betas) or C.shape[0] < 1:
            raise ShapeError(f"C has shape {C.shape}; need n x N with 1 <= n <= N = {len(self.betas)}")
        object.__setattr__(self, "C", C)
        self.Bspec  # validates distinctness

    @property
    def n(self) -> int:
        return self.C.shape[0]

    @property
    def N(self) -> int:
        return len(self.betas)

    @property
    def k(self) -> int:
        return self.N - self.n

    @property
    def Bspec(self) -> JordanSpec:
        return JordanSpec.diagonal(self.betas)

    @property
    def A(self) -> np.ndarray:
        """Truncated Vandermonde ``V[a, j] = beta_j**(n-a)``."""
        return build_A_shift(self.Bspec, self.n, self.backend)

    def system(self) -> RankOneSystem:
        Dspec = JordanSpec.nilpotent(self.n)
        g = la.vector([b**self.n for b in self.Bspec.scalar_eigenvalues(self.backend)], self.backend)
        return RankOneSystem(self.A, self.Bspec, self.C, Dspec, la.eye(self.n, self.backend),
                             Dspec.leading_indicator(self.backend), g, self.backend)


def soliton_family(betas: Sequence[Any], C, backend: str = FLOAT) -> SolitonFamily:
    return SolitonFamily(tuple(betas), C, backend)


def soliton_tau_direct(fam: SolitonFamily, t):
    """Exponential sum ``sum_lambda pi_lambda(C) V_lambda e^{T_lambda}``.

    ``V_lambda`` is the Vandermonde minor on the same columns
    ``l_j = lambda_j - j + n + 1`` as ``pi_lambda(C)``, and
    ``T_lambda = sum_j xi(beta_{l_j}, t)``.
    """
    be = fam.backend
    t = la.as_flow(t, be)
    V = fam.A
    betas = fam.Bspec.scalar_eigenvalues(be)
    xis = [la.xi(b, t, be) for b in betas]
    total = la.zero(be)
    for lam in partitions_in_box(fam.n, fam.k):
        cols = plucker_columns(lam, fam.n, fam.k)
        weight = la.det(fam.C[:, cols]) * la.det(V[:, cols])
        if weight != 0:
            total = total + weight * la.exp_scalar(sum((xis[c] for c in cols), la.zero(be)), be)
    return total


def soliton_tau_det(fam: SolitonFamily, t):
    return tau_gk(fam.A, fam.Bspec, fam.C, t, fam.backend)


@dataclass
class RegularityReport:
    decreasing: bool
    violators: list

    @property
    def regular(self) -> bool:
        return self.decreasing and not self.violators

    def __bool__(self) -> bool:
        return self.regular


def is_regular_soliton(fam: SolitonFamily) -> RegularityReport:
    """Strictly decreasing real betas and nonnegative maximal minors of C.

    Minors are taken on increasing column sets; each violator is reported as
    the partition labelling that column set.
    """
    betas = [complex(la.to_scalar(b, FLOAT)) for b in fam.betas]
    real = all(b.imag == 0 for b in betas)
    decreasing = real and all(betas[i].real > betas[i + 1].real for i in range(len(betas) - 1))
    violators = []
    for lam in partitions_in_box(fam.n, fam.k):
        cols = sorted(plucker_columns(lam, fam.n, fam.k))
        m = complex(la.det(fam.C[:, cols]))
        if m.imag != 0 or m.real < 0:
            violators.append(lam)
    return RegularityReport(decreasing, violators)


# ---------------------------------------------------------------------------
# Cauchy


def cauchy_family(betas: Sequence[Any], deltas: Sequence[Any], C, backend: str = FLOAT) -> RankOneSystem:
    """``A = [1/(beta_j - delta_i)]``, ``D = diag(delta)``, ``f = g = (1, ..., 1)``."""
    Bspec, Dspec = JordanSpec.diagonal(betas), JordanSpec.diagonal(deltas)
    A = build_A0(Bspec, Dspec, backend)
    ones_n = la.vector([1] * Dspec.dim, backend)
    ones_N = la.vector([1] * Bspec.dim, backend)
    C = la.matrix(C, backend)
    return RankOneSystem(A, Bspec, C, Dspec, la.eye(Dspec.dim, backend), ones_n, ones_N, backend)


def kar_identity_check(betas: Sequence[Any], deltas: Sequence[Any], backend: str = FLOAT):
    """Residual of ``V(beta) = K(delta) A0(beta, delta) r(B(beta))``."""
    Bspec, Dspec = JordanSpec.diagonal(betas), JordanSpec.diagonal(deltas)
    n = Dspec.dim
    lhs = build_A_shift(Bspec, n, backend)
    rhs = build_K(Dspec, n, backend) @ build_A0(Bspec, Dspec, backend) @ la.char_poly_of_matrix(Dspec, Bspec, backend)
    return la.rel_residual(lhs, rhs)


def cauchy_annihilator(betas: Sequence[Any], deltas: Sequence[Any], extra: Sequence[Any], backend: str = FLOAT) -> np.ndarray:
    """Rows ``r(beta_j) / ((beta_j - delta_k) p'(beta_j))`` for the extra constants ``delta_k``.

    Here ``r(z) = prod over all n + len(extra) deltas`` and ``p(z) = prod (z - beta_j)``.
    """
    bs = [la.to_scalar(b, backend) for b in betas]
    all_d = [la.to_scalar(d, backend) for d in list(deltas) + list(extra)]
    JordanSpec.diagonal(bs + all_d)
    if len(all_d) != len(bs):
        raise ShapeError("need exactly N - n extra constants")
    out = la.zeros((len(extra), len(bs)), backend)
    for j, b in enumerate(bs):
        r = la.one(backend)
        for d in all_d:
            r = r * (b - d)
        dp = la.one(backend)
        for jj, bb in enumerate(bs):
            if jj != j:
                dp = dp * (b - bb)
        for row, d in enumerate(all_d[len(deltas):]):
            out[row, j] = r / ((b - d) * dp)
    return out


def cauchy_reparametrization(betas, deltas, C, t, backend: str = FLOAT):
    """Return ``(tau_V, kappa * tau_Cauchy)`` where the Cauchy side uses ``C r(B)^T``."""
    Bspec, Dspec = JordanSpec.diagonal(betas), JordanSpec.diagonal(deltas)
    n = Dspec.dim
    C = la.matrix(C, backend)
    kap = la.det(build_K(Dspec, n, backend))
    rB = la.char_poly_of_matrix(Dspec, Bspec, backend)
    lhs = tau_gk(build_A_shift(Bspec, n, backend), Bspec, C, t, backend)
    rhs = kap * tau_gk(build_A0(Bspec, Dspec, backend), Bspec, C @ rB.T, t, backend)
    return lhs, rhs


# ---------------------------------------------------------------------------
# Calogero-Moser


def _cm_permutation(n: int) -> list[int]:
    """Column order taking ``[V | V']`` to the Jordan order ``(1,1),(1,2),(2,1),...``."""
    return [c for i in range(n) for c in (i, n + i)]


@dataclass(frozen=True, eq=False)
class CalogeroMoserFamily:
    """``B_Z = [[Z, Id], [0, Z]]``, ``A = [V | V']``, ``C = [Id | Xi]`` with Z, Xi diagonal."""

    betas: tuple
    xis: tuple
    backend: str = FLOAT

    def __post_init__(self):
        object.__setattr__(self, "betas", tuple(self.betas))
        object.__setattr__(self, "xis", tuple(self.xis))
        if len(self.betas) != len(self.xis) or not self.betas:
            raise ShapeError("Z and Xi must be nonempty and of equal size")
        JordanSpec.diagonal(self.betas)
        V = self.V
        if near_singular(V, la.det(V)):
            raise DegenerateVandermonde("V(beta) is singular")

    @property
    def n(self) -> int:
        return len(self.betas)

    @property
    def Bspec(self) -> JordanSpec:
        return JordanSpec(tuple((b, 2) for b in self.betas))

    @property
    def V(self) -> np.ndarray:
        return build_A_shift(JordanSpec.diagonal(self.betas), self.n, self.backend)

    @property
    def Vprime(self) -> np.ndarray:
        """``V'[a, j] = (n-a) beta_j**(n-a-1)``."""
        n, be = self.n, self.backend
        out = la.zeros((n, n), be)
        for a in range(1, n + 1):
            for j, b in enumerate(self.betas):
                if n - a > 0:
                    out[a - 1, j] = (n - a) * la.to_scalar(b, be) ** (n - a - 1)
        return out

    @property
    def Z(self) -> np.ndarray:
        return la.jordan_matrix(JordanSpec.diagonal(self.betas), self.backend)

    @property
    def Xi(self) -> np.ndarray:
        out = la.zeros((self.n, self.n), self.backend)
        for i, x in enumerate(self.xis):
            out[i, i] = la.to_scalar(x, self.backend)
        return out

    @property
    def B_Z(self) -> np.ndarray:
        n, be = self.n, self.backend
        out = la.zeros((2 * n, 2 * n), be)
        out[:n, :n] = self.Z
        out[n:, n:] = self.Z
        out[:n, n:] = la.eye(n, be)
        return out

    @property
    def A_raw(self) -> np.ndarray:
        return np.concatenate([self.V, self.Vprime], axis=1)

    @property
    def C_raw(self) -> np.ndarray:
        return np.concatenate([la.eye(self.n, self.backend), self.Xi], axis=1)

    @property
    def A(self) -> np.ndarray:
        return self.A_raw[:, _cm_permutation(self.n)]

    @property
    def C(self) -> np.ndarray:
        return self.C_raw[:, _cm_permutation(self.n)]

    def system(self) -> RankOneSystem:
        be, n = self.backend, self.n
        Bspec, Dspec = self.Bspec, JordanSpec.nilpotent(n)
        B = la.jordan_matrix(Bspec, be)
        g = Bspec.leading_indicator(be)
        for _ in range(n):
            g = g @ B
        return RankOneSystem(self.A, Bspec, self.C, Dspec, la.eye(n, be), Dspec.leading_indicator(be), g, be)


def calogero_moser_family(betas: Sequence[Any], xis: Sequence[Any], backend: str = FLOAT) -> CalogeroMoserFamily:
    return CalogeroMoserFamily(tuple(betas), tuple(xis), backend)


def cm_tau_closed_form(fam: CalogeroMoserFamily, t):
    """``det(exp(sum t_i Z**i)) det V det(X_0 + sum_i i t_i Z**(i-1) Xi)``, ``X_0 = Id + V^{-1} V' Xi``."""
    be, n = fam.backend, fam.n
    t = la.as_flow(t, be)
    V, Z, Xi = fam.V, fam.Z, fam.Xi
    X = la.eye(n, be) + la.solve(V, fam.Vprime) @ Xi
    Zp = la.eye(n, be)
    for i, ti in enumerate(t, start=1):
        X = X + i * ti * Zp @ Xi
        Zp = Zp @ Z
    expo = la.exp_scalar(sum((la.xi(b, t, be) for b in fam.betas), la.zero(be)), be)
    return expo * la.det(V) * la.det(X)


def cm_tau_identity(fam: CalogeroMoserFamily, t):
    """Relative residual between ``det(A E_B(t) C^T)`` and the closed form."""
    lhs = tau_gk(fam.A, fam.Bspec, fam.C, t, fam.backend)
    rhs = cm_tau_closed_form(fam, t)
    if fam.backend == EXACT and lhs == rhs:
        return Fraction(0)
    return abs(complex(lhs - rhs)) / max(abs(complex(lhs)), abs(complex(rhs)), 1e-300)


# ---------------------------------------------------------------------------
# generic Jordan data


def generic_jordan_family(Bspec: JordanSpec, Dspec: JordanSpec, C, F=None, backend: str = FLOAT) -> RankOneSystem:
    """``A = A(B, D)``, ``f = f_D``, ``g = r_D(B)^T g_B``; F defaults to the identity."""
    A = build_A(Bspec, Dspec, backend)
    fD, gB, _ = canonical_vectors(Bspec, Dspec, backend)
    g = la.char_poly_of_matrix(Dspec, Bspec, backend).T @ gB
    C = la.matrix(C, backend)
    _full_row_rank(C)
    if F is None:
        if C.shape[0] != Dspec.dim:
            raise ShapeError("F must be given when C does not have n rows")
        F = la.eye(Dspec.dim, backend)
    F = la.matrix(F, backend)
    _full_row_rank(F.T if F.shape[0] > F.shape[1] else F)
    return RankOneSystem(A, Bspec, C, Dspec, F, fD, g, backend)


# ---------------------------------------------------------------------------
# random admissible data


def random_sizes(rng: np.random.Generator, dim: int) -> list[int]:
    """Random composition of ``dim`` into positive block sizes."""
    sizes = []
    left = dim
    while left:
        s = int(rng.integers(1, left + 1))
        sizes.append(s)
        left -= s
    return sizes


def random_eigenvalues(rng: np.random.Generator, count: int, exclude=(), scale: float = 1.0, denominator: int = 16) -> list:
    """Distinct rationals ``p / denominator`` in ``[-scale, scale]`` avoiding ``exclude``."""
    top = int(scale * denominator)
    pool = [Fraction(p, denominator) for p in range(-top, top + 1)]
    pool = [x for x in pool if x not in set(exclude)]
    if len(pool) < count:
        raise ValueError("not enough distinct eigenvalues at this scale")
    idx = rng.choice(len(pool), size=count, replace=False)
    return [pool[i] for i in idx]


def random_jordan_pair(rng: np.random.Generator, n: int, N: int, scale: float = 1.0) -> tuple[JordanSpec, JordanSpec]:
    """Random (Bspec, Dspec) with disjoint rational spectra."""
    bs = random_sizes(rng, N)
    ds = random_sizes(rng, n)
    eigs = random_eigenvalues(rng, len(bs) + len(ds), scale=scale)
    Bspec = JordanSpec(tuple(zip(eigs[: len(bs)], bs)))
    Dspec = JordanSpec(tuple(zip(eigs[len(bs):], ds)))
    return Bspec, Dspec


def random_matrix(rng: np.random.Generator, rows: int, cols: int, backend: str = FLOAT, denominator: int = 4) -> np.ndarray:
    """Random small-rational matrix of full row rank (resampled until it is)."""
    while True:
        vals = rng.integers(-4 * denominator, 4 * denominator + 1, size=(rows, cols))
        m = la.matrix([[Fraction(int(v), denominator) for v in row] for row in vals], backend)
        if la.rank(la.as_backend(m, EXACT)) == min(rows, cols):
            return m


def random_totally_nonnegative(rng: np.random.Generator, n: int, N: int) -> np.ndarray:
    """An n x N matrix with all maximal minors (increasing columns) positive.

    Rows are ``x_a**j`` sampled at increasing points ``x`` against a positive
    weight, i.e. a generalized Vandermonde times a positive diagonal.
    """
    x = np.sort(rng.uniform(0.2, 1.0, size=n))
    y = np.sort(rng.uniform(0.2, 1.0, size=N))
    return np.exp(np.outer(x, y) * 3.0)
