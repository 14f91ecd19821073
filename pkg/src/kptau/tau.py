"""Evaluation of finite-determinant KP tau functions and related quantities.

Conventions: ``E_B(t) = exp(sum t_i B**i)``, ``E_{D^T}(t) = exp(sum t_i (D^T)**i)``.
The generalized form is ``det(F E_{D^T}(-t) A E_B(t) C^T)``.  Miwa shifts
``t -> t - [1/z]`` act through the exact factors ``Id - B/z`` and
``(Id - D^T/z)^{-1}``, which are taken as the definition of the shift even
outside the convergence region unless analytic semantics are requested.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from . import linalg as la
from .errors import (
    DegenerateK,
    RankError,
    ShapeError,
    ShiftDomainError,
    SingularAtOrigin,
    ZeroTau,
)
from .linalg import EXACT, FLOAT, JordanSpec
from .rankone import RankOneSystem, build_A, build_A0, build_A_shift, build_K

SINGULAR_RTOL = 1e-13


def near_singular(m: np.ndarray, d) -> bool:
    """True when ``d = det(m)`` is zero exactly (exact backend) or relative to Hadamard's bound."""
    if la.backend_of(np.asarray(m)) == EXACT and not isinstance(d, float):
        return d == 0
    bound = 1.0
    for row in np.asarray(m):
        bound *= math.sqrt(sum(abs(complex(x)) ** 2 for x in row))
    return abs(complex(d)) <= SINGULAR_RTOL * bound


def product_singular(L: np.ndarray, R: np.ndarray, d) -> bool:
    """Like :func:`near_singular` for ``d = det(L R)``, scaled by the factors.

    Cauchy-Binet gives ``|det(L R)| <= prod ||rows of L|| prod ||columns of R||``,
    which sees cancellation that the product matrix alone hides.
    """
    if la.backend_of(np.asarray(L)) == EXACT and not isinstance(d, float):
        return d == 0
    bound = 1.0
    for row in np.asarray(L):
        bound *= math.sqrt(sum(abs(complex(x)) ** 2 for x in row))
    for col in np.asarray(R).T:
        bound *= math.sqrt(sum(abs(complex(x)) ** 2 for x in col))
    return abs(complex(d)) <= SINGULAR_RTOL * bound


def _neg(t: Sequence[Any]) -> list:
    return [-x for x in t]


def _e_dt(Dspec: JordanSpec, t, backend: str) -> np.ndarray:
    return la.flow_exponential(Dspec, t, backend).T


def tau_gk(A, Bspec: JordanSpec, C, t, backend: str | None = None):
    """``det(A exp(sum t_i B**i) C^T)``."""
    A = np.asarray(A)
    backend = backend or la.backend_of(A)
    A = la.matrix(A, backend)
    C = la.matrix(np.asarray(C), backend)
    if A.shape[1] != Bspec.dim or C.shape != A.shape:
        raise ShapeError(f"A {A.shape} and C {C.shape} must both be n x {Bspec.dim}")
    t = la.as_flow(t, backend)
    return la.det(A @ la.flow_exponential(Bspec, t, backend) @ C.T)


def tau_at_origin_matrix(sys: RankOneSystem) -> np.ndarray:
    return sys.F @ sys.A @ sys.C.T


def tau_general(sys: RankOneSystem, t, require_nonsingular: bool = False):
    """``det(F E_{D^T}(-t) A E_B(t) C^T)``.

    With ``require_nonsingular`` the big-cell condition ``det(F A C^T) != 0``
    is checked first and SingularAtOrigin raised when it fails.
    """
    be = sys.backend
    t = la.as_flow(t, be)
    if require_nonsingular:
        m0 = tau_at_origin_matrix(sys)
        if product_singular(sys.F @ sys.A, sys.C.T, la.det(m0)):
            raise SingularAtOrigin("det(F A C^T) vanishes")
    m = sys.F @ _e_dt(sys.Dspec, _neg(t), be) @ sys.A @ la.flow_exponential(sys.Bspec, t, be) @ sys.C.T
    return la.det(m)


def tau_W_BCD(Bspec: JordanSpec, C, Dspec: JordanSpec, t, backend: str = FLOAT):
    """The three equal expressions
    ``det(A(B,D) E C^T)``, ``det(A0(B,D) E r_D(B) C^T)`` and ``det(A(B) E C^T) / det K(D)``."""
    C = la.matrix(np.asarray(C), backend)
    n = Dspec.dim
    if C.shape != (n, Bspec.dim):
        raise ShapeError(f"C has shape {C.shape}, expected {(n, Bspec.dim)}")
    t = la.as_flow(t, backend)
    K = build_K(Dspec, n, backend)
    kappa = la.det(K)
    if near_singular(K, kappa):
        raise DegenerateK("det K(D) vanishes")
    E = la.flow_exponential(Bspec, t, backend)
    rDB = la.char_poly_of_matrix(Dspec, Bspec, backend)
    first = la.det(build_A(Bspec, Dspec, backend) @ E @ C.T)
    second = la.det(build_A0(Bspec, Dspec, backend) @ E @ rDB @ C.T)
    third = la.det(build_A_shift(Bspec, n, backend) @ E @ C.T) / kappa
    return first, second, third


def kappa(Dspec: JordanSpec, backend: str = FLOAT):
    """``kappa(D) = det K(D)``."""
    return la.det(build_K(Dspec, Dspec.dim, backend))


def max_pairwise_rel(values: Sequence[Any]):
    """Largest ``|a - b| / max(|a|, |b|)`` over pairs; exact zero when all agree exactly."""
    vals = list(values)
    exact = all(isinstance(v, (int, Fraction, la.GaussianFraction)) for v in vals)
    if exact and all(v == vals[0] for v in vals):
        return Fraction(0)
    worst = 0.0
    for i in range(len(vals)):
        for j in range(i):
            a, b = complex(vals[i]), complex(vals[j])
            scale = max(abs(a), abs(b), 1e-300)
            worst = max(worst, abs(a - b) / scale)
    return worst


# ---------------------------------------------------------------------------
# Miwa shifts and the wave function


def _check_shift(sys: RankOneSystem, z, analytic: bool) -> None:
    if z == 0:
        raise ShiftDomainError("Miwa point z = 0")
    for eig in sys.Dspec.eigenvalues:
        if la.to_scalar(eig, FLOAT) == complex(z):
            raise ShiftDomainError(f"Miwa point {z!r} is an eigenvalue of D")
    if analytic:
        radius = max(sys.Bspec.spectral_radius, sys.Dspec.spectral_radius)
        if not abs(complex(z)) > radius:
            raise ShiftDomainError(f"|z| = {abs(complex(z))} is not beyond spectral radius {radius}")


def miwa_shift_tau(sys: RankOneSystem, t, shifts: Sequence[Any] = (), analytic: bool = False):
    """``tau(t - sum_a [1/z_a])`` via the resolvent factors.

    ``analytic=True`` enforces ``|z| >`` the spectral radii of B and D.
    """
    be = sys.backend
    t = la.as_flow(t, be)
    zs = [la.to_scalar(z, be) for z in shifts]
    for z in zs:
        _check_shift(sys, z, analytic)
    n, N = sys.n, sys.N
    B, Dt = sys.B, sys.D.T
    left = sys.F @ _e_dt(sys.Dspec, _neg(t), be)
    right = la.flow_exponential(sys.Bspec, t, be) @ sys.C.T
    for z in zs:
        left = left @ la.inv(la.eye(n, be) - Dt / z)
        right = (la.eye(N, be) - B / z) @ right
    return la.det(left @ sys.A @ right)


def baker_akhiezer(sys: RankOneSystem, z, t):
    """``psi(z, t) = exp(xi(z, t)) tau(t - [1/z]) / tau(t)``; ZeroTau when tau(t) = 0."""
    be = sys.backend
    tau0 = tau_general(sys, t)
    if _tau_is_zero(sys, t, tau0):
        raise ZeroTau("tau vanishes at the requested time")
    return la.exp_scalar(la.xi(z, t, be), be) * miwa_shift_tau(sys, t, [z]) / tau0


def _tau_is_zero(sys: RankOneSystem, t, value) -> bool:
    be = sys.backend
    tt = la.as_flow(t, be)
    L = sys.F @ _e_dt(sys.Dspec, _neg(tt), be) @ sys.A
    return product_singular(L, la.flow_exponential(sys.Bspec, tt, be) @ sys.C.T, value)


# ---------------------------------------------------------------------------
# geometric form


def solve_rank_one_A(f, g, Bspec: JordanSpec, Dspec: JordanSpec, backend: str = FLOAT) -> np.ndarray:
    """The unique A with ``A B - D^T A = f g^T`` (spectra of B and D disjoint).

    Solved as the Kronecker system ``(B^T (x) Id_n - Id_N (x) D^T) vec A = vec(f g^T)``.
    """
    la.check_disjoint(Bspec, Dspec)
    n, N = Dspec.dim, Bspec.dim
    f = la.as_backend(np.asarray(f, dtype=object).reshape(-1), backend)
    g = la.as_backend(np.asarray(g, dtype=object).reshape(-1), backend)
    if f.shape != (n,) or g.shape != (N,):
        raise ShapeError("f must have length dim D and g length dim B")
    B = la.jordan_matrix(Bspec, backend)
    Dt = la.jordan_matrix(Dspec, backend).T
    L = np.kron(B.T, la.eye(n, backend)) - np.kron(la.eye(N, backend), Dt)
    rhs = np.outer(f, g).reshape(-1, order="F")
    vec = la.solve(L, rhs)
    return la.as_backend(np.asarray(vec).reshape((n, N), order="F"), backend)


def decoupling_bracket(A, Bspec: JordanSpec, Dspec: JordanSpec, t, backend: str = FLOAT) -> np.ndarray:
    """``A E_B(t) - E_{D^T}(t) A``."""
    t = la.as_flow(t, backend)
    return A @ la.flow_exponential(Bspec, t, backend) - _e_dt(Dspec, t, backend) @ A


def decoupling_contour(f, g, Bspec: JordanSpec, Dspec: JordanSpec, t, radius: float, nodes: int = 512) -> np.ndarray:
    """Trapezoid-rule value of ``(1/2 pi i) oint (z - D^T)^{-1} f g^T (z - B)^{-1} e^{xi(z,t)} dz`` on ``|z| = radius``."""
    f = la.as_backend(np.asarray(f, dtype=object).reshape(-1), FLOAT)
    g = la.as_backend(np.asarray(g, dtype=object).reshape(-1), FLOAT)
    B = la.jordan_matrix(Bspec, FLOAT)
    Dt = la.jordan_matrix(Dspec, FLOAT).T
    n, N = Dt.shape[0], B.shape[0]
    t = la.as_flow(t, FLOAT)
    acc = np.zeros((n, N), dtype=complex)
    for k in range(nodes):
        z = radius * np.exp(2j * np.pi * k / nodes)
        left = np.linalg.solve(z * np.eye(n) - Dt, f)
        right = np.linalg.solve((z * np.eye(N) - B).T, g)
        acc += z * np.exp(la.xi(z, t)) * np.outer(left, right)
    return acc / nodes


@dataclass(frozen=True)
class GeometricTau:
    """``det(Id_n + X M)`` and its N x N twin ``det(Id_N + M X)``."""

    n_form: Any
    N_form: Any

    @property
    def value(self):
        return self.n_form

    @property
    def residual(self):
        return max_pairwise_rel([self.n_form, self.N_form])


def tau_geometric(f, g, Bspec: JordanSpec, Dspec: JordanSpec, M, t, backend: str = FLOAT, A=None) -> GeometricTau:
    """``det(Id_n + E_{D^T}(-t) (A E_B(t) - E_{D^T}(t) A) M)`` with A solving the rank-one equation.

    A is solved for when omitted (disjoint spectra); pass it explicitly when B
    and D share eigenvalues.
    """
    n, N = Dspec.dim, Bspec.dim
    M = la.matrix(np.asarray(M), backend)
    if M.shape != (N, n):
        raise ShapeError(f"M has shape {M.shape}, expected {(N, n)}")
    t = la.as_flow(t, backend)
    if A is None:
        A = solve_rank_one_A(f, g, Bspec, Dspec, backend)
    X = _e_dt(Dspec, _neg(t), backend) @ decoupling_bracket(A, Bspec, Dspec, t, backend)
    return GeometricTau(la.det(la.eye(n, backend) + X @ M), la.det(la.eye(N, backend) + M @ X))


def geometric_M(sys: RankOneSystem) -> np.ndarray:
    """``M = C^T (F A C^T)^{-1} F``; SingularAtOrigin outside the big cell."""
    m0 = tau_at_origin_matrix(sys)
    if product_singular(sys.F @ sys.A, sys.C.T, la.det(m0)):
        raise SingularAtOrigin("det(F A C^T) vanishes")
    try:
        return sys.C.T @ la.solve(m0, sys.F)
    except RankError as exc:
        raise SingularAtOrigin("det(F A C^T) vanishes") from exc


def geometric_relation(sys: RankOneSystem, t):
    """Relative residual of ``det(F A C^T) tau_geometric(t) = tau_general(t)``."""
    M = geometric_M(sys)
    geo = tau_geometric(sys.f, sys.g, sys.Bspec, sys.Dspec, M, t, sys.backend, sys.A)
    lhs = la.det(tau_at_origin_matrix(sys)) * geo.n_form
    return max_pairwise_rel([lhs, tau_general(sys, t)])


def gauge_factor(Dspec: JordanSpec, t, backend: str = FLOAT):
    """``exp(sum_i t_i tr(D**i))`` with ``tr(D**i) = sum_blocks n_b delta_b**i``."""
    t = la.as_flow(t, backend)
    acc = la.zero(backend)
    for eig, size in Dspec.blocks:
        d = la.to_scalar(eig, backend)
        for i, ti in enumerate(t, start=1):
            acc = acc + ti * size * d**i
    return la.exp_scalar(acc, backend)


def gk_gauge_relation(sys: RankOneSystem, t):
    """``|tau_gk - gauge * det(A C^T) * tau_geometric| / |tau_gk|`` (needs ``l = n``)."""
    if sys.l != sys.n:
        raise ShapeError("the gauge relation needs C with n rows")
    be = sys.backend
    M = geometric_M(sys)
    lhs = tau_gk(sys.A, sys.Bspec, sys.C, t, be)
    geo = tau_geometric(sys.f, sys.g, sys.Bspec, sys.Dspec, M, t, be, sys.A).n_form
    rhs = gauge_factor(sys.Dspec, t, be) * la.det(sys.A @ sys.C.T) * geo
    if be == EXACT and lhs == rhs:
        return Fraction(0)
    return abs(complex(lhs - rhs)) / max(abs(complex(lhs)), 1e-300)


@dataclass(frozen=True)
class TauModel:
    """A rank-one system bundled with the backend used to evaluate it."""

    sys: RankOneSystem
    backend: str = FLOAT

    def __post_init__(self):
        if self.sys.backend != self.backend:
            object.__setattr__(self, "sys", self.sys.with_backend(self.backend))

    def tau(self, t):
        return tau_general(self.sys, t)

    def shifted(self, t, shifts, analytic: bool = False):
        return miwa_shift_tau(self.sys, t, shifts, analytic)

    def psi(self, z, t):
        return baker_akhiezer(self.sys, z, t)

    def with_backend(self, backend: str) -> "TauModel":
        return TauModel(self.sys, backend)
