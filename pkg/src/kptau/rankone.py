"""Rank-one systems ``A B - D^T A = f g^T`` and the canonical matrices built from Jordan data.

All contour integrals are replaced by closed-form residues: binomial
coefficients, Taylor coefficients of characteristic polynomials and local
Laurent expansions.  Rows of n x N matrices are labelled by the multi-index of
D and columns by the multi-index of B, both in :attr:`JordanSpec.multi_index`
order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import linalg as la
from .errors import RankError, ShapeError
from .linalg import EXACT, FLOAT, JordanSpec


@dataclass(frozen=True, eq=False)
class RankOneSystem:
    """The data ``(A, B, C, D, F, f, g)`` of a generalized finite-determinant tau function.

    Shapes: A is n x N, C is l x N, F is l x n, f has length n, g length N.
    The rank-one equation itself is checked by :func:`verify_rank_one`, not
    enforced here, so deliberately corrupted systems remain representable.
    """

    A: np.ndarray
    Bspec: JordanSpec
    C: np.ndarray
    Dspec: JordanSpec
    F: np.ndarray
    f: np.ndarray
    g: np.ndarray
    backend: str = FLOAT

    def __post_init__(self):
        be = self.backend
        conv = {
            "A": la.matrix(self.A, be),
            "C": la.matrix(self.C, be),
            "F": la.matrix(self.F, be),
            "f": la.as_backend(np.asarray(self.f, dtype=object).reshape(-1), be),
            "g": la.as_backend(np.asarray(self.g, dtype=object).reshape(-1), be),
        }
        for key, val in conv.items():
            object.__setattr__(self, key, val)
        n, N = self.Dspec.dim, self.Bspec.dim
        l = self.C.shape[0]
        expected = {"A": (n, N), "C": (l, N), "F": (l, n), "f": (n,), "g": (N,)}
        for key, shape in expected.items():
            if getattr(self, key).shape != shape:
                raise ShapeError(f"{key} has shape {getattr(self, key).shape}, expected {shape}")

    @property
    def n(self) -> int:
        return self.Dspec.dim

    @property
    def N(self) -> int:
        return self.Bspec.dim

    @property
    def l(self) -> int:
        return self.C.shape[0]

    @property
    def B(self) -> np.ndarray:
        return la.jordan_matrix(self.Bspec, self.backend)

    @property
    def D(self) -> np.ndarray:
        return la.jordan_matrix(self.Dspec, self.backend)

    def with_backend(self, backend: str) -> "RankOneSystem":
        return RankOneSystem(self.A, self.Bspec, self.C, self.Dspec, self.F, self.f, self.g, backend)

    def replace(self, **changes) -> "RankOneSystem":
        fields = dict(A=self.A, Bspec=self.Bspec, C=self.C, Dspec=self.Dspec, F=self.F,
                      f=self.f, g=self.g, backend=self.backend)
        fields.update(changes)
        return RankOneSystem(**fields)


# ---------------------------------------------------------------------------
# series helpers


def _inv_power_series(c, m: int, length: int, backend: str) -> list:
    """Taylor coefficients in w of ``(c + w)**(-m)``."""
    return [math.comb(m + k - 1, k) * (-1) ** k / c ** (m + k) for k in range(length)]


def _series_mul(p: list, q: list, length: int, backend: str) -> list:
    out = [la.zero(backend)] * length
    for i, a in enumerate(p[:length]):
        for j, b in enumerate(q[: length - i]):
            out[i + j] = out[i + j] + a * b
    return out


def _power_series(x, p: int, length: int, backend: str) -> list:
    """Taylor coefficients in w of ``(x + w)**p`` for integer ``p >= 0``."""
    return [math.comb(p, k) * x ** (p - k) if k <= p else la.zero(backend) for k in range(length)]


# ---------------------------------------------------------------------------
# canonical matrices


def build_A0(Bspec: JordanSpec, Dspec: JordanSpec, backend: str = FLOAT) -> np.ndarray:
    """``A0[(i,mu),(j,nu)] = C(mu+nu-2, nu-1) (-1)**(nu+1) / (beta_j - delta_i)**(mu+nu-1)``."""
    la.check_disjoint(Bspec, Dspec)
    betas = Bspec.scalar_eigenvalues(backend)
    deltas = Dspec.scalar_eigenvalues(backend)
    out = la.zeros((Dspec.dim, Bspec.dim), backend)
    for r, (i, mu) in enumerate(Dspec.multi_index):
        for c, (j, nu) in enumerate(Bspec.multi_index):
            diff = betas[j - 1] - deltas[i - 1]
            out[r, c] = math.comb(mu + nu - 2, nu - 1) * (-1) ** (nu + 1) / diff ** (mu + nu - 1)
    return out


def build_A(Bspec: JordanSpec, Dspec: JordanSpec, backend: str = FLOAT) -> np.ndarray:
    """``A(B, D) = A0(B, D) r_D(B)``.

    Evaluated as the ``w**(nu-1)`` coefficient of the polynomial
    ``(beta_j - delta_i + w)**(n_i - mu) prod_{l != i} (beta_j - delta_l + w)**n_l``,
    which avoids the cancellation in the product when A0 has large entries.
    """
    la.check_disjoint(Bspec, Dspec)
    betas = Bspec.scalar_eigenvalues(backend)
    deltas = Dspec.scalar_eigenvalues(backend)
    out = la.zeros((Dspec.dim, Bspec.dim), backend)
    for j, size in enumerate(Bspec.sizes):
        for row, (i, mu) in enumerate(Dspec.multi_index):
            poly = [la.one(backend)] + [la.zero(backend)] * (size - 1)
            for l, n_l in enumerate(Dspec.sizes):
                power = n_l - mu if l == i - 1 else n_l
                poly = _series_mul(poly, _power_series(betas[j] - deltas[l], power, size, backend), size, backend)
            out[row, Bspec.offsets[j]:Bspec.offsets[j] + size] = poly
    return out


def build_A_residue(Bspec: JordanSpec, Dspec: JordanSpec, backend: str = FLOAT) -> np.ndarray:
    """``A(B, D)`` straight from its residue: the ``w**(nu-1)`` coefficient of
    ``r_D(beta_j + w) / (beta_j - delta_i + w)**mu``.

    Independent of the ``A0 r_D(B)`` factorization; used to cross-check it.
    """
    la.check_disjoint(Bspec, Dspec)
    r = la.char_poly_coeffs(Dspec, backend)
    betas = Bspec.scalar_eigenvalues(backend)
    deltas = Dspec.scalar_eigenvalues(backend)
    out = la.zeros((Dspec.dim, Bspec.dim), backend)
    for (j, size) in enumerate(Bspec.sizes, start=1):
        rt = la.poly_taylor(r, betas[j - 1], size, backend)
        for row, (i, mu) in enumerate(Dspec.multi_index):
            inv = _inv_power_series(betas[j - 1] - deltas[i - 1], mu, size, backend)
            prod = _series_mul(rt, inv, size, backend)
            for col, (jj, nu) in enumerate(Bspec.multi_index):
                if jj == j:
                    out[row, col] = prod[nu - 1]
    return out


def build_A_shift(Bspec: JordanSpec, n: int, backend: str = FLOAT) -> np.ndarray:
    """``A(B) = A(B, Lambda_n)`` with entries ``C(n-a, nu-1) beta_j**(n-nu-a+1)``."""
    if n < 1:
        raise ShapeError("n must be positive")
    betas = Bspec.scalar_eigenvalues(backend)
    out = la.zeros((n, Bspec.dim), backend)
    for a in range(1, n + 1):
        for c, (j, nu) in enumerate(Bspec.multi_index):
            coef = math.comb(n - a, nu - 1)
            if coef:
                out[a - 1, c] = coef * betas[j - 1] ** (n - nu - a + 1)
    return out


def _local_coeffs(Dspec: JordanSpec, power: int, backend: str, i: int) -> list:
    """Taylor coefficients at ``delta_i`` of ``z**power / prod_{l != i} (z - delta_l)**n_l``."""
    deltas = Dspec.scalar_eigenvalues(backend)
    size = Dspec.sizes[i]
    series = _power_series(deltas[i], power, size, backend)
    for l, n_l in enumerate(Dspec.sizes):
        if l != i:
            series = _series_mul(series, _inv_power_series(deltas[i] - deltas[l], n_l, size, backend), size, backend)
    return series


def build_K(Dspec: JordanSpec, n: int | None = None, backend: str = FLOAT) -> np.ndarray:
    """``K(D)``: ``K[a,(i,mu)]`` is the residue at ``delta_i`` of ``z**(n-a) (z-delta_i)**(mu-1) / r_D(z)``."""
    n = Dspec.dim if n is None else n
    if n != Dspec.dim:
        raise ShapeError(f"K(D) needs n = dim D = {Dspec.dim}, got {n}")
    out = la.zeros((n, n), backend)
    for a in range(1, n + 1):
        for i, size in enumerate(Dspec.sizes):
            loc = _local_coeffs(Dspec, n - a, backend, i)
            for mu in range(1, size + 1):
                out[a - 1, Dspec.offsets[i] + mu - 1] = loc[size - mu]
    return out


def build_k(Dspec: JordanSpec, backend: str = FLOAT) -> np.ndarray:
    """``k(D)``: residues of ``z**n (z-delta_i)**(mu-1) / r_D(z)``."""
    n = Dspec.dim
    out = la.zeros((n,), backend)
    for i, size in enumerate(Dspec.sizes):
        loc = _local_coeffs(Dspec, n, backend, i)
        for mu in range(1, size + 1):
            out[Dspec.offsets[i] + mu - 1] = loc[size - mu]
    return out


def canonical_vectors(Bspec: JordanSpec, Dspec: JordanSpec, backend: str = FLOAT):
    """Return ``(f_D, g_B, k(D))``; f_D and g_B flag the first slot of each block."""
    return Dspec.leading_indicator(backend), Bspec.leading_indicator(backend), build_k(Dspec, backend)


# ---------------------------------------------------------------------------
# verification


def _passes(res, tol: float) -> bool:
    return res == 0 or float(res) <= tol


@dataclass
class RankOneReport:
    """Residuals of the rank-one checks for one system.

    ``sylvester`` is the relative residual of ``A B - D^T A - f g^T``.
    ``annihilator_rank`` is the rank of ``A B (A_perp)^T`` and
    ``annihilator_sigma2`` its second singular value relative to the largest
    entry (None on the exact backend).
    ``propositions`` holds the three canonical-matrix identities for the
    system's Jordan data, or is empty when B and D share an eigenvalue.
    """

    sylvester: Any
    annihilator_rank: int | None
    annihilator_sigma2: float | None
    propositions: dict = field(default_factory=dict)
    tol: float = la.DEFAULT_RTOL
    exact: bool = False

    @property
    def passed(self) -> bool:
        ok = _passes(self.sylvester, self.tol)
        if self.annihilator_rank is not None:
            ok = ok and self.annihilator_rank <= 1
        return ok and all(_passes(v, self.tol) for v in self.propositions.values())

    def rows(self) -> list[tuple[str, Any]]:
        out = [("rank-1 residual", self.sylvester), ("rank of A B A_perp^T", self.annihilator_rank)]
        if self.annihilator_sigma2 is not None:
            out.append(("second singular value", self.annihilator_sigma2))
        out.extend(self.propositions.items())
        return out


def proposition_residuals(Bspec: JordanSpec, Dspec: JordanSpec, backend: str = FLOAT) -> dict:
    """Residuals of the three canonical rank-one identities for (B, D)."""
    n = Dspec.dim
    B = la.jordan_matrix(Bspec, backend)
    D = la.jordan_matrix(Dspec, backend)
    fD, gB, _ = canonical_vectors(Bspec, Dspec, backend)
    Lam = la.jordan_matrix(JordanSpec.nilpotent(n), backend)
    f_lam = JordanSpec.nilpotent(n).leading_indicator(backend)
    AB = build_A_shift(Bspec, n, backend)
    Bn = la.eye(Bspec.dim, backend)
    for _ in range(n):
        Bn = Bn @ B
    out = {"A(B) B - Lambda^T A(B)": sylvester_residual(AB, B, Lam, f_lam, gB @ Bn)}
    A0 = build_A0(Bspec, Dspec, backend)
    out["A0 B - D^T A0"] = sylvester_residual(A0, B, D, fD, gB)
    rDB = la.char_poly_of_matrix(Dspec, Bspec, backend)
    out["A(B,D) B - D^T A(B,D)"] = sylvester_residual(build_A(Bspec, Dspec, backend), B, D, fD, gB @ rDB)
    return out


def sylvester_residual(A, B, D, f, g):
    """``A B - D^T A - f g^T`` relative to the size of its terms."""
    scale = la.product_scale((A, B), (D.T, A), (f, g))
    return la.rel_residual(A @ B - D.T @ A, np.outer(f, g), scale)


def verify_rank_one(sys: RankOneSystem, tol: float = la.DEFAULT_RTOL) -> RankOneReport:
    """Check ``A B - D^T A = f g^T`` and ``rank(A B A_perp^T) <= 1``; never raises on failure."""
    be = sys.backend
    B, D = sys.B, sys.D
    res = sylvester_residual(sys.A, B, D, sys.f, sys.g)
    rank = sigma2 = None
    if sys.n < sys.N:
        try:
            perp = la.row_annihilator(sys.A)
        except RankError:
            rank = sys.n
        else:
            prod = sys.A @ B @ perp.T
            if be == EXACT:
                rank = la.rank(prod)
            else:
                s = la.singular_values(prod)
                scale = max(la.max_abs(sys.A), 1e-300) * max(la.max_abs(B), 1e-300)
                sigma2 = float(s[1] / scale) if s.size > 1 else 0.0
                rank = int(s.size > 0 and s[0] > tol * scale) + int(sigma2 > tol)
    props: dict = {}
    try:
        la.check_disjoint(sys.Bspec, sys.Dspec)
    except Exception:
        pass
    else:
        props = proposition_residuals(sys.Bspec, sys.Dspec, be)
    return RankOneReport(res, rank, sigma2, props, tol, be == EXACT)


def lemma_identities(Bspec: JordanSpec, Dspec: JordanSpec, backend: str = FLOAT) -> dict:
    """Residuals of ``A = A0 r_D(B)``, ``A(B) = K A(B,D)``,
    ``Lambda^T K = K D^T - f_Lambda k^T`` and ``K f_D = f_Lambda``, each relative
    to the size of the products involved."""
    n = Dspec.dim
    A = build_A(Bspec, Dspec, backend)
    A0 = build_A0(Bspec, Dspec, backend)
    rDB = la.char_poly_of_matrix(Dspec, Bspec, backend)
    K = build_K(Dspec, n, backend)
    fD, _, k = canonical_vectors(Bspec, Dspec, backend)
    Lam = la.jordan_matrix(JordanSpec.nilpotent(n), backend)
    f_lam = JordanSpec.nilpotent(n).leading_indicator(backend)
    D = la.jordan_matrix(Dspec, backend)
    return {
        "A(B,D) = A0 r_D(B)": la.rel_residual(A, A0 @ rDB, la.product_scale((A0, rDB))),
        "A(B) = K(D) A(B,D)": la.rel_residual(build_A_shift(Bspec, n, backend), K @ A, la.product_scale((K, A))),
        "Lambda^T K = K D^T - f k^T": la.rel_residual(Lam.T @ K, K @ D.T - np.outer(f_lam, k),
                                                      la.product_scale((Lam.T, K), (K, D.T), (f_lam, k))),
        "K f_D = f_Lambda": la.rel_residual(K @ fD, f_lam, la.product_scale((K, fD[:, None]))),
    }
