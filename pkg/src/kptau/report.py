"""The verification battery behind ``kptau verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import linalg as la
from .errors import KPTauError, SingularAtOrigin, ZeroTau
from .hirota import kp_convergence, plucker_relation_residual, xi_matrix, xi_rank2_check
from .linalg import EXACT, FLOAT, JordanSpec
from .rankone import RankOneSystem, lemma_identities, verify_rank_one
from .schur import min_poly_annihilation
from .tau import geometric_M, geometric_relation, gk_gauge_relation, max_pairwise_rel, tau_W_BCD

KP_H = 1e-3
KP_TOL = 1e-5
KP_RATIO = (3.5, 4.5)


@dataclass
class Check:
    name: str
    value: Any
    passed: bool
    note: str = ""

    def display(self) -> str:
        v = self.value
        if v is None:
            return "-"
        if isinstance(v, (Fraction, int)) and not isinstance(v, bool):
            return "EXACT ZERO" if v == 0 else f"{float(v):.3e}"
        if isinstance(v, str):
            return v
        return f"{float(v):.3e}"

    def to_json(self) -> dict:
        v = self.value
        if isinstance(v, Fraction):
            v = 0 if v == 0 else float(v)
        elif isinstance(v, (float, np.floating)):
            v = float(v)
        return {"name": self.name, "value": v, "passed": self.passed, "note": self.note}


@dataclass
class Battery:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, value, passed, note=""):
        self.checks.append(Check(name, value, bool(passed), note))

    def table(self) -> str:
        width = max((len(c.name) for c in self.checks), default=10)
        lines = []
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            tail = f"  ({c.note})" if c.note else ""
            lines.append(f"{c.name.ljust(width)}  {c.display():>12}  {status}{tail}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_json() for c in self.checks]}


def _ok(value, tol) -> bool:
    return value == 0 or float(value) <= tol


def auxiliary_D(Bspec: JordanSpec, n: int, backend: str, sign: int = 1) -> JordanSpec:
    """Diagonal D of size n whose integer eigenvalues avoid the spectrum of B."""
    start = math.floor(Bspec.spectral_radius) + 1
    return JordanSpec.diagonal([la.to_scalar(sign * (start + i), backend) for i in range(n)])


def _disjoint(Bspec: JordanSpec, Dspec: JordanSpec) -> bool:
    try:
        la.check_disjoint(Bspec, Dspec)
    except KPTauError:
        return False
    return True


def flowable(sys: RankOneSystem) -> RankOneSystem:
    """The system itself, or a float copy when exact flows are unavailable."""
    if sys.backend == EXACT and not (sys.Bspec.is_nilpotent and sys.Dspec.is_nilpotent):
        return sys.with_backend(FLOAT)
    return sys


def lemma_pair(sys: RankOneSystem) -> tuple[JordanSpec, JordanSpec, str]:
    """(B, D) for the canonical-matrix identities, substituting a D disjoint from B when needed."""
    if sys.Dspec.dim == sys.l and _disjoint(sys.Bspec, sys.Dspec):
        return sys.Bspec, sys.Dspec, ""
    return sys.Bspec, auxiliary_D(sys.Bspec, sys.l, sys.backend), "auxiliary diagonal D"


def _random_t(rng, sys: RankOneSystem, K: int = 3):
    rho = 1.0 + max(sys.Bspec.spectral_radius, sys.Dspec.spectral_radius)
    if sys.backend == EXACT:
        return [Fraction(int(rng.integers(-30, 31)), 100) for _ in range(K)]
    return list(rng.uniform(-0.3, 0.3, K) / rho)


def _random_z(rng, sys: RankOneSystem, count: int = 4):
    rho = 1.0 + max(sys.Bspec.spectral_radius, sys.Dspec.spectral_radius)
    if sys.backend == EXACT:
        out: list = []
        while len(out) < count:
            z = Fraction(int(rng.integers(2, 60)), int(rng.integers(1, 4))) * (1 if rng.random() < 0.5 else -1)
            if z not in out:
                out.append(z)
        return out
    r = rng.uniform(1.5, 3.0, count) * rho
    phi = rng.uniform(0, 2 * np.pi, count)
    return list(r * np.exp(1j * phi))


def run_battery(sys: RankOneSystem, samples: int = 20, seed: int = 0, tol: float = la.DEFAULT_RTOL) -> Battery:
    rng = np.random.default_rng(seed)
    out = Battery()
    be = sys.backend

    rep = verify_rank_one(sys, tol)
    out.add("rank-1 residual", rep.sylvester, _ok(rep.sylvester, tol))
    if rep.annihilator_rank is not None:
        out.add("rank of A B A_perp^T", f"{rep.annihilator_rank}", rep.annihilator_rank <= 1)
    for name, v in rep.propositions.items():
        out.add(name, v, _ok(v, tol))

    Bspec, Dspec, note = lemma_pair(sys)
    for name, v in lemma_identities(Bspec, Dspec, be).items():
        out.add(name, v, _ok(v, tol), note)

    num = flowable(sys)
    nbe = num.backend
    Bn = JordanSpec(tuple((la.to_scalar(e, nbe), s) for e, s in Bspec.blocks))
    Dn = JordanSpec(tuple((la.to_scalar(e, nbe), s) for e, s in Dspec.blocks))
    ts = [_random_t(rng, num) for _ in range(5)]
    forms = max((max_pairwise_rel(tau_W_BCD(Bn, num.C, Dn, t, nbe)) for t in ts), key=float)
    out.add("three-form agreement", forms, _ok(forms, tol), note)

    D2 = auxiliary_D(Bspec, sys.l, nbe, sign=-1)
    ratios = [tau_W_BCD(Bn, num.C, Dn, t, nbe)[0] / tau_W_BCD(Bn, num.C, D2, t, nbe)[0] for t in ts]
    spread = max_pairwise_rel(ratios)
    out.add("D-independence", spread, _ok(spread, tol))

    worst_p = Fraction(0) if nbe == EXACT else 0.0
    worst_hg = Fraction(0) if nbe == EXACT else 0.0
    used = 0
    for _ in range(samples):
        t = _random_t(rng, num)
        zs = _random_z(rng, num)
        try:
            xi = xi_matrix(num, zs, t)
            hg = xi_rank2_check(num, zs, t)
        except (ZeroTau, KPTauError):
            continue
        used += 1
        worst_p = max(worst_p, plucker_relation_residual(xi), key=float)
        worst_hg = max(worst_hg, hg, key=float)
    out.add("Plücker relation", worst_p, used > 0 and _ok(worst_p, tol), f"{used} samples")
    out.add("H,G factorization", worst_hg, used > 0 and _ok(worst_hg, tol), f"{used} samples")

    try:
        M = geometric_M(num)
    except SingularAtOrigin:
        out.add("geometric form", "skipped", True, "outside big cell")
    else:
        geo = max((geometric_relation(num, t) for t in ts[:3]), key=float)
        out.add("geometric form", geo, _ok(geo, tol))
        if num.l == num.n:
            gauge = max((gk_gauge_relation(num, t) for t in ts[:3]), key=float)
            out.add("gauge relation", gauge, _ok(gauge, tol))
        ann = min_poly_annihilation(num.f, num.g, num.Bspec, num.Dspec, M, 2 * num.N, nbe)
        scale = max(la.max_abs(M), 1.0)
        worst = Fraction(0) if all(a == 0 for a in ann) else max(abs(complex(a)) for a in ann) / scale
        out.add("min-poly annihilation", worst, _ok(worst, tol))

    t0 = _random_t(rng, num)
    h = Fraction(1, 1000) if nbe == EXACT else KP_H
    try:
        conv = kp_convergence(num, t0, h)
    except ZeroTau:
        out.add("KP bilinear (h=1e-3)", "skipped", True, "tau vanishes at t0")
    else:
        ratio = conv.ratio
        good = conv.coarse == 0 or float(conv.coarse) <= KP_TOL or KP_RATIO[0] <= ratio <= KP_RATIO[1]
        note = "O(h^2) check skipped" if conv.coarse == 0 else f"ratio {ratio:.3f}"
        out.add("KP bilinear (h=1e-3)", conv.coarse, good, note)
    return out
