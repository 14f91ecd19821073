"""Partitions, Schur polynomials in KP times, Plücker coordinates and Schur expansions of tau.

Schur convention: ``exp(sum t_i z**i) = sum_k h_k(t) z**k`` and
``S_lambda = det(h_{lambda_i - i + j})`` (Jacobi-Trudi).

Expansion coefficients come in two flavours.  ``raw`` is the determinant
``det(g^T (-B)**b_j M (D^T)**a_i f)`` in Frobenius coordinates ``(a|b)``
(arms|legs).  ``coefficient`` is ``det(g^T B**a_j M (-D^T)**b_i f)``, which is
the one that multiplies ``S_lambda(t)`` in the expansion of
``tau / det(F A C^T)``.  The raw form expands tau in ``(-1)**r S_lambda(-t)``
instead, so ``coefficient(lambda') = (-1)**(|lambda| - r) raw(lambda)`` with
lambda' the conjugate.  Terms whose sign factor is -1 carry ``sign_flag=True``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Iterator, Sequence

import numpy as np

from . import linalg as la
from .errors import BoxError, ShapeError
from .linalg import FLOAT, JordanSpec
from .rankone import RankOneSystem
from .tau import geometric_M, tau_at_origin_matrix


@dataclass(frozen=True, order=False)
class Partition:
    """Weakly decreasing positive parts."""

    parts: tuple = ()

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts):
            raise ValueError(f"partition parts must be positive: {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError(f"partition parts must be weakly decreasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def conjugate(self) -> "Partition":
        if not self.parts:
            return self
        return Partition(tuple(sum(1 for p in self.parts if p > j) for j in range(self.parts[0])))

    def padded(self, n: int) -> tuple:
        if len(self.parts) > n:
            raise BoxError(f"{self} has more than {n} parts")
        return self.parts + (0,) * (n - len(self.parts))

    def fits(self, n: int, k: int) -> bool:
        return len(self.parts) <= n and (not self.parts or self.parts[0] <= k)

    def __str__(self) -> str:
        return "∅" if not self.parts else "(" + ",".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class FrobeniusIndex:
    """Frobenius coordinates ``(a|b)``: arms and legs of the diagonal hooks."""

    arms: tuple = ()
    legs: tuple = ()

    def __post_init__(self):
        arms, legs = tuple(map(int, self.arms)), tuple(map(int, self.legs))
        if len(arms) != len(legs):
            raise ValueError("arms and legs must have equal length")
        for seq in (arms, legs):
            if any(x < 0 for x in seq) or any(seq[i] <= seq[i + 1] for i in range(len(seq) - 1)):
                raise ValueError(f"Frobenius coordinates must be strictly decreasing and >= 0: {seq}")
        object.__setattr__(self, "arms", arms)
        object.__setattr__(self, "legs", legs)

    @property
    def rank(self) -> int:
        return len(self.arms)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.arms)) + "|" + ",".join(map(str, self.legs)) + ")"


def frobenius(lam: Partition) -> FrobeniusIndex:
    conj = lam.conjugate().parts
    r = sum(1 for i, p in enumerate(lam.parts) if p > i)
    return FrobeniusIndex(tuple(lam.parts[i] - i - 1 for i in range(r)), tuple(conj[i] - i - 1 for i in range(r)))


def from_frobenius(fr: FrobeniusIndex) -> Partition:
    r = fr.rank
    parts = [fr.arms[i] + i + 1 for i in range(r)]
    tail = max((fr.legs[j] + j + 1 for j in range(r)), default=0)
    for i in range(r + 1, tail + 1):
        parts.append(sum(1 for j in range(r) if fr.legs[j] + j + 1 >= i))
    return Partition(tuple(parts))


def _partitions_of(w: int, max_part: int, max_len: int) -> Iterator[tuple]:
    if w == 0:
        yield ()
        return
    if max_len == 0:
        return
    for p in range(min(w, max_part), 0, -1):
        for rest in _partitions_of(w - p, p, max_len - 1):
            yield (p,) + rest


def partitions_up_to(max_weight: int, n: int | None = None, k: int | None = None) -> list[Partition]:
    """Partitions of weight <= max_weight, optionally inside the n x k box.

    Order: by weight, then reverse lexicographic within a weight, e.g.
    ``∅, (1), (2), (1,1), (2,1), (2,2)``.
    """
    out = []
    for w in range(max_weight + 1):
        for parts in _partitions_of(w, w if k is None else k, w if n is None else n):
            out.append(Partition(parts))
    return out


def partitions_in_box(n: int, k: int) -> list[Partition]:
    return partitions_up_to(n * k, n, k)


def complete_homogeneous(t: Sequence[Any], kmax: int, backend: str = FLOAT) -> list:
    """``h_0..h_kmax`` from ``exp(sum t_i z**i)``."""
    return la.exp_series(la.as_flow(t, backend), kmax + 1, backend)


def schur_eval(lam: Partition, t: Sequence[Any], backend: str = FLOAT, h: list | None = None):
    """Jacobi-Trudi ``det(h_{lambda_i - i + j})``."""
    l = len(lam)
    if l == 0:
        return la.one(backend)
    need = lam.parts[0] + l
    if h is None or len(h) <= need:
        h = complete_homogeneous(t, need, backend)
    m = la.zeros((l, l), backend)
    for i in range(l):
        for j in range(l):
            idx = lam.parts[i] - i + j
            if idx >= 0:
                m[i, j] = h[idx]
    return la.det(m)


# ---------------------------------------------------------------------------
# Plücker coordinates


def plucker_columns(lam: Partition, n: int, k: int) -> list[int]:
    """0-based columns ``lambda_i - i + n`` (1-based ``lambda_i - i + n + 1``), decreasing."""
    if not lam.fits(n, k):
        raise BoxError(f"{lam} does not fit in the {n} x {k} box")
    return [p - i + n for i, p in enumerate(lam.padded(n), start=1)]


def plucker_rational(C, lam: Partition, n: int, k: int):
    """``det(C_lambda)`` with column i of C_lambda equal to column ``lambda_i - i + n + 1`` of C."""
    C = np.asarray(C)
    if C.shape != (n, n + k):
        raise ShapeError(f"C has shape {C.shape}, expected {(n, n + k)}")
    return la.det(C[:, plucker_columns(lam, n, k)])


def minor(C, cols: Sequence[int]):
    """Maximal minor on the given 0-based columns, in the given order."""
    return la.det(np.asarray(C)[:, list(cols)])


def three_term_plucker(C):
    """``pi12 pi34 - pi13 pi24 + pi14 pi23`` for a 2 x 4 matrix (increasing column pairs)."""
    C = np.asarray(C)
    if C.shape != (2, 4):
        raise ShapeError("the three-term relation needs a 2 x 4 matrix")
    p = {c: minor(C, c) for c in itertools.combinations(range(4), 2)}
    return p[0, 1] * p[2, 3] - p[0, 2] * p[1, 3] + p[0, 3] * p[1, 2]


# ---------------------------------------------------------------------------
# geometric coordinates


def _vec(x, backend):
    return la.as_backend(np.asarray(x, dtype=object).reshape(-1), backend)


def affine_table(f, g, Bspec: JordanSpec, Dspec: JordanSpec, M, imax: int, jmax: int, backend: str = FLOAT) -> np.ndarray:
    """Array ``T[i, j] = g^T B**j M (D^T)**i f`` for ``i <= imax``, ``j <= jmax``."""
    f, g = _vec(f, backend), _vec(g, backend)
    M = la.matrix(np.asarray(M), backend)
    B = la.jordan_matrix(Bspec, backend)
    Dt = la.jordan_matrix(Dspec, backend).T
    rows = [g]
    for _ in range(jmax):
        rows.append(rows[-1] @ B)
    cols = [f]
    for _ in range(imax):
        cols.append(Dt @ cols[-1])
    left = [r @ M for r in rows]
    out = la.zeros((imax + 1, jmax + 1), backend)
    for i, c in enumerate(cols):
        for j, r in enumerate(left):
            out[i, j] = r @ c
    return out


def affine_coord(f, g, Bspec: JordanSpec, Dspec: JordanSpec, M, i: int, j: int, backend: str = FLOAT):
    """``g^T B**j M (D^T)**i f``."""
    if i < 0 or j < 0:
        raise ValueError("affine coordinate indices must be nonnegative")
    return affine_table(f, g, Bspec, Dspec, M, i, j, backend)[i, j]


def _raw_det(table: np.ndarray, fr: FrobeniusIndex, backend: str):
    r = fr.rank
    m = la.zeros((r, r), backend)
    for i in range(r):
        for j in range(r):
            m[i, j] = (-1) ** fr.legs[j] * table[fr.arms[i], fr.legs[j]]
    return la.det(m)


def _corrected_det(table: np.ndarray, fr: FrobeniusIndex, backend: str):
    r = fr.rank
    m = la.zeros((r, r), backend)
    for i in range(r):
        for j in range(r):
            m[i, j] = (-1) ** fr.legs[i] * table[fr.legs[i], fr.arms[j]]
    return la.det(m)


def plucker_frobenius(f, g, Bspec: JordanSpec, Dspec: JordanSpec, M, fr: FrobeniusIndex, backend: str = FLOAT):
    """``det(g^T (-B)**b_j M (D^T)**a_i f)`` over the r x r Frobenius index pairs."""
    top = max(fr.arms + fr.legs, default=0)
    return _raw_det(affine_table(f, g, Bspec, Dspec, M, top, top, backend), fr, backend)


def hook_matrix(f, g, Bspec: JordanSpec, Dspec: JordanSpec, M, fr: FrobeniusIndex, backend: str = FLOAT) -> np.ndarray:
    """Matrix of hook values ``plucker_frobenius((a_i|b_j))``; its determinant is the Giambelli form."""
    r = fr.rank
    out = la.zeros((r, r), backend)
    for i in range(r):
        for j in range(r):
            out[i, j] = plucker_frobenius(f, g, Bspec, Dspec, M, FrobeniusIndex((fr.arms[i],), (fr.legs[j],)), backend)
    return out


def schur_coefficient(f, g, Bspec: JordanSpec, Dspec: JordanSpec, M, lam: Partition, backend: str = FLOAT):
    """Coefficient of ``S_lambda(t)`` in the expansion of the geometric tau."""
    fr = frobenius(lam)
    top = max(fr.arms + fr.legs, default=0)
    return _corrected_det(affine_table(f, g, Bspec, Dspec, M, top, top, backend), fr, backend)


@dataclass(frozen=True)
class SchurTerm:
    """One row of the expansion.

    ``coefficient`` multiplies ``S_lambda(t)``.  ``raw`` is the literal
    determinant ``det(g^T (-B)**b_j M (D^T)**a_i f)`` for ``lambda = (a|b)``;
    it satisfies ``coefficient(lambda') = raw_sign * raw(lambda)`` with
    lambda' the conjugate partition.
    """

    partition: Partition
    frobenius: FrobeniusIndex
    raw: Any
    coefficient: Any
    unnormalized: Any

    @property
    def raw_sign(self) -> int:
        """``(-1)**(|lambda| - r)``."""
        return (-1) ** ((self.partition.weight - self.frobenius.rank) % 2)

    @property
    def sign_flag(self) -> bool:
        """True when the literal determinant enters with a global minus sign."""
        return self.raw_sign < 0 and self.coefficient != 0


def schur_expansion(sys: RankOneSystem, max_weight: int) -> list[SchurTerm]:
    """Terms of ``tau(t) / det(F A C^T) = sum coefficient_lambda S_lambda(t)`` for ``|lambda| <= max_weight``.

    Raises SingularAtOrigin outside the big cell.  ``unnormalized`` multiplies
    the coefficient back by ``det(F A C^T)``.
    """
    if max_weight < 0:
        raise ValueError("max_weight must be nonnegative")
    be = sys.backend
    M = geometric_M(sys)
    d0 = la.det(tau_at_origin_matrix(sys))
    table = affine_table(sys.f, sys.g, sys.Bspec, sys.Dspec, M, max_weight, max_weight, be)
    out = []
    for lam in partitions_up_to(max_weight):
        fr = frobenius(lam)
        coef = _corrected_det(table, fr, be)
        out.append(SchurTerm(lam, fr, _raw_det(table, fr, be), coef, coef * d0))
    return out


def expansion_sum(terms: Sequence[SchurTerm], t, backend: str = FLOAT, raw: bool = False):
    """``sum coefficient * S_lambda(t)`` (or ``sum raw * (-1)**r S_lambda(-t)`` when ``raw``)."""
    t = la.as_flow(t, backend)
    top = max((term.partition.weight + len(term.partition) for term in terms), default=0)
    if raw:
        h = complete_homogeneous([-x for x in t], top, backend)
        return sum(((-1) ** term.frobenius.rank * la.to_scalar(term.raw, backend) * schur_eval(term.partition, t, backend, h)
                    for term in terms), la.zero(backend))
    h = complete_homogeneous(t, top, backend)
    return sum((la.to_scalar(term.coefficient, backend) * schur_eval(term.partition, t, backend, h) for term in terms),
               la.zero(backend))


def rational_plucker_sum(C, n: int, k: int, t, backend: str = FLOAT):
    """``sum_{lambda in box} pi_lambda(C) S_lambda(t)``."""
    C = la.matrix(np.asarray(C), backend)
    t = la.as_flow(t, backend)
    h = complete_homogeneous(t, n + k, backend)
    return sum((plucker_rational(C, lam, n, k) * schur_eval(lam, t, backend, h) for lam in partitions_in_box(n, k)),
               la.zero(backend))


def min_poly_annihilation(f, g, Bspec: JordanSpec, Dspec: JordanSpec, M, jmax: int, backend: str = FLOAT) -> list:
    """``sum_i mu_i A_{i,j}`` for ``0 <= j <= jmax``, where ``mu_D(z) = sum_i mu_i z**i``.

    This is ``g^T B**j M mu_D(D^T) f`` evaluated through the affine table, i.e.
    the linear recurrence the minimal polynomial imposes on the geometric
    sequence of affine coordinates.  Every value should vanish.
    """
    mu = la.min_poly_coeffs(Dspec, backend)
    table = affine_table(f, g, Bspec, Dspec, M, len(mu) - 1, jmax, backend)
    return [sum((mu[i] * table[i, j] for i in range(len(mu))), la.zero(backend)) for j in range(jmax + 1)]
