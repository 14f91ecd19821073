"""Four-point bilinear identities and a finite-difference KP residual.

``xi_ij = (z_i - z_j) tau(t - [1/z_i] - [1/z_j])`` is an antisymmetric 4 x 4
array satisfying the single Plücker relation.  It factors as ``G_i H_j - G_j H_i``
with

    H(z) = tau(t) (1 + g^T M(t) (D^T - z)^{-1} f)
    G(z) = z + g^T B M(t) (D^T - z)^{-1} f
    M(t) = C(t)^T (F(t) A C(t)^T)^{-1} F(t),  F(t) = F E_{D^T}(-t),  C(t)^T = E_B(t) C^T.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import mpmath
import numpy as np

from . import linalg as la
from .errors import ZeroTau
from .linalg import EXACT, FLOAT, MP
from .rankone import RankOneSystem
from .tau import miwa_shift_tau, product_singular, tau_general


@dataclass(frozen=True, eq=False)
class XiMatrix:
    z: tuple
    t: tuple
    entries: np.ndarray

    def __getitem__(self, ij):
        return self.entries[ij]


def xi_matrix(sys: RankOneSystem, zs: Sequence[Any], t, analytic: bool = False) -> XiMatrix:
    """Entries ``(z_i - z_j) tau(t - [1/z_i] - [1/z_j])`` (0-based indices)."""
    be = sys.backend
    zs = [la.to_scalar(z, be) for z in zs]
    if len(zs) != 4:
        raise ValueError("xi_matrix needs four points")
    if any(zs[i] == zs[j] for i in range(4) for j in range(i)):
        raise ValueError("points must be pairwise distinct")
    t = la.as_flow(t, be)
    out = la.zeros((4, 4), be)
    for i in range(4):
        for j in range(i + 1, 4):
            v = (zs[i] - zs[j]) * miwa_shift_tau(sys, t, [zs[i], zs[j]], analytic)
            out[i, j] = v
            out[j, i] = -v
    return XiMatrix(tuple(zs), tuple(t), out)


def plucker_relation_residual(xi: XiMatrix):
    """``|xi12 xi34 - xi13 xi24 + xi14 xi23|`` over the largest of the three products."""
    x = xi.entries
    terms = [x[0, 1] * x[2, 3], -x[0, 2] * x[1, 3], x[0, 3] * x[1, 2]]
    total = terms[0] + terms[1] + terms[2]
    if la.backend_of(x) == EXACT and total == 0:
        return Fraction(0)
    scale = max(max(abs(complex(v)) for v in terms), 1e-300)
    return abs(complex(total)) / scale


def _moving_frame(sys: RankOneSystem, t):
    be = sys.backend
    t = la.as_flow(t, be)
    Ft = sys.F @ la.flow_exponential(sys.Dspec, [-x for x in t], be).T
    Ct = la.flow_exponential(sys.Bspec, t, be) @ sys.C.T
    m = Ft @ sys.A @ Ct
    tau = la.det(m)
    if product_singular(Ft @ sys.A, Ct, tau):
        raise ZeroTau("tau vanishes, M(t) is undefined")
    return tau, Ct @ la.solve(m, Ft)


def hg_factorization(sys: RankOneSystem, z, t):
    """Return ``(H(z), G(z))`` at time t."""
    be = sys.backend
    tau, M = _moving_frame(sys, t)
    z = la.to_scalar(z, be)
    w = la.solve(sys.D.T - z * la.eye(sys.n, be), sys.f)
    Mw = M @ w
    return tau * (la.one(be) + sys.g @ Mw), z + sys.g @ (sys.B @ Mw)


def xi_rank2_check(sys: RankOneSystem, zs: Sequence[Any], t):
    """Normalized ``max |xi_ij - (G_i H_j - G_j H_i)|``."""
    xi = xi_matrix(sys, zs, t)
    hg = [hg_factorization(sys, z, t) for z in xi.z]
    worst = 0.0
    exact = sys.backend == EXACT
    scale = max(la.max_abs(xi.entries), 1e-300)
    for i in range(4):
        for j in range(4):
            wedge = hg[i][1] * hg[j][0] - hg[j][1] * hg[i][0]
            diff = xi[i, j] - wedge
            if exact and diff == 0:
                continue
            exact = False
            worst = max(worst, abs(complex(diff)) / scale)
    return Fraction(0) if exact else worst


# ---------------------------------------------------------------------------
# finite differences


def _fd_backend(sys: RankOneSystem) -> RankOneSystem:
    return sys if sys.backend in (EXACT, MP) else sys.with_backend(MP)


def kp_bilinear_residual_fd(sys: RankOneSystem, t0, h) -> Any:
    """``|(D1^4 + 3 D2^2 - 4 D1 D3) tau.tau| / tau^2`` by central differences at ``t0``.

    Second-order accurate in h.  Float models are evaluated in extended
    precision so the O(h^2) truncation error is not hidden by round-off;
    exact models stay exact (h should then be rational).
    """
    with mpmath.workdps(la.MP_DPS):
        model = _fd_backend(sys)
        be = model.backend
        h = la.to_scalar(h, be)
        base = la.as_flow(t0, be, max(3, len(t0)))
        cache: dict = {}

        def tau(dx, dy, dt):
            key = (dx, dy, dt)
            if key not in cache:
                t = list(base)
                t[0] += dx * h
                t[1] += dy * h
                t[2] += dt * h
                cache[key] = tau_general(model, t)
            return cache[key]

        f0 = tau(0, 0, 0)
        if f0 == 0:
            raise ZeroTau("tau vanishes at t0")
        x = {k: tau(k, 0, 0) for k in (-2, -1, 1, 2)}
        tx = (x[1] - x[-1]) / (2 * h)
        txx = (x[1] - 2 * f0 + x[-1]) / h**2
        txxx = (x[2] - 2 * x[1] + 2 * x[-1] - x[-2]) / (2 * h**3)
        txxxx = (x[2] - 4 * x[1] + 6 * f0 - 4 * x[-1] + x[-2]) / h**4
        yp, ym = tau(0, 1, 0), tau(0, -1, 0)
        ty = (yp - ym) / (2 * h)
        tyy = (yp - 2 * f0 + ym) / h**2
        tt = (tau(0, 0, 1) - tau(0, 0, -1)) / (2 * h)
        txt = (tau(1, 0, 1) - tau(1, 0, -1) - tau(-1, 0, 1) + tau(-1, 0, -1)) / (4 * h**2)
        bil = 2 * (f0 * txxxx - 4 * tx * txxx + 3 * txx**2 + 3 * (f0 * tyy - ty**2) - 4 * (f0 * txt - tx * tt))
        value = bil / f0**2
        return abs(value) if be == EXACT else float(abs(value))


@dataclass(frozen=True)
class Convergence:
    h: Any
    coarse: Any
    fine: Any

    @property
    def ratio(self) -> float:
        if self.fine == 0:
            return float("inf") if self.coarse != 0 else float("nan")
        return float(self.coarse) / float(self.fine)


def kp_convergence(sys: RankOneSystem, t0, h) -> Convergence:
    """Residuals at h and h/2; an O(h^2) scheme gives a ratio near 4."""
    half = h / 2 if isinstance(h, Fraction) else h / 2.0
    return Convergence(h, kp_bilinear_residual_fd(sys, t0, h), kp_bilinear_residual_fd(sys, t0, half))
