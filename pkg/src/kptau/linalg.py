"""Dense small-matrix arithmetic and closed-form functions of Jordan matrices.

Matrices are plain numpy arrays.  Three scalar backends share the code:

* ``"exact"``  -- ``dtype=object`` arrays of :class:`fractions.Fraction`
  (or :class:`GaussianFraction` for complex rationals).
* ``"float"``  -- ``complex128`` arrays.
* ``"mp"``     -- ``dtype=object`` arrays of :class:`mpmath.mpc`, used where
  float64 round-off would swamp a quantity being measured (finite differences).

Functions of a Jordan matrix are never computed by series or eigen-solvers:
each block ``beta*Id + Lambda`` maps to an upper-triangular Toeplitz block whose
k-th superdiagonal is the k-th Taylor coefficient of the function at ``beta``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

import mpmath
import numpy as np
import scipy.linalg

from .errors import BackendUnsupported, EigenvalueCollision, RankError, ShapeError

EXACT = "exact"
FLOAT = "float"
MP = "mp"
BACKENDS = (EXACT, FLOAT, MP)

DEFAULT_RTOL = 1e-9
MP_DPS = 50


class GaussianFraction:
    """Exact complex rational ``re + i*im``.

    Construction collapses to a plain :class:`Fraction` when the imaginary
    part is zero, so real data never pays for the complex type.
    """

    __slots__ = ("re", "im")

    def __new__(cls, re=0, im=0):
        re, im = Fraction(re), Fraction(im)
        if im == 0:
            return re
        self = object.__new__(cls)
        self.re = re
        self.im = im
        return self

    @staticmethod
    def _parts(x):
        if isinstance(x, GaussianFraction):
            return x.re, x.im
        if isinstance(x, (int, Fraction)):
            return Fraction(x), Fraction(0)
        return None

    def __add__(self, other):
        o = self._parts(other)
        if o is None:
            return NotImplemented
        return GaussianFraction(self.re + o[0], self.im + o[1])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._parts(other)
        if o is None:
            return NotImplemented
        return GaussianFraction(self.re - o[0], self.im - o[1])

    def __rsub__(self, other):
        o = self._parts(other)
        if o is None:
            return NotImplemented
        return GaussianFraction(o[0] - self.re, o[1] - self.im)

    def __mul__(self, other):
        o = self._parts(other)
        if o is None:
            return NotImplemented
        a, b = self.re, self.im
        c, d = o
        return GaussianFraction(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._parts(other)
        if o is None:
            return NotImplemented
        c, d = o
        den = c * c + d * d
        if den == 0:
            raise ZeroDivisionError("GaussianFraction division by zero")
        a, b = self.re, self.im
        return GaussianFraction((a * c + b * d) / den, (b * c - a * d) / den)

    def __rtruediv__(self, other):
        o = self._parts(other)
        if o is None:
            return NotImplemented
        return GaussianFraction(*o) / self if o[1] else _gf_div_real(o[0], self)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return Fraction(1) / self ** (-k)
        out = Fraction(1)
        base = self
        while k:
            if k & 1:
                out = base * out
            base = base * base
            k >>= 1
        return out

    def __neg__(self):
        return GaussianFraction(-self.re, -self.im)

    def __pos__(self):
        return self

    def __eq__(self, other):
        o = self._parts(other)
        if o is None:
            if isinstance(other, complex):
                return complex(self) == other
            return NotImplemented
        return self.re == o[0] and self.im == o[1]

    def __hash__(self):
        return hash((self.re, self.im))

    def __abs__(self):
        return math.hypot(self.re, self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def conjugate(self):
        return GaussianFraction(self.re, -self.im)

    def __repr__(self):
        return f"GaussianFraction({self.re}, {self.im})"

    def __str__(self):
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


def _gf_div_real(a: Fraction, z: GaussianFraction):
    den = z.re * z.re + z.im * z.im
    return GaussianFraction(a * z.re / den, -a * z.im / den)


# ---------------------------------------------------------------------------
# scalars


def _check_backend(backend: str) -> None:
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")


def _to_fraction(x) -> Fraction:
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError("non-finite scalar")
        return Fraction(repr(float(x)))
    return Fraction(x)


def to_scalar(x: Any, backend: str = FLOAT):
    """Convert a number, ``"p/q"`` string or ``(re, im)`` pair to a backend scalar."""
    _check_backend(backend)
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ValueError(f"complex scalar must be a [re, im] pair, got {x!r}")
        re, im = (to_scalar(v, EXACT) if backend == EXACT else to_scalar(v, backend) for v in x)
        if backend == EXACT:
            return GaussianFraction(re, im)
        return re + 1j * im if backend == FLOAT else re + mpmath.mpc(0, 1) * im
    if backend == EXACT:
        if isinstance(x, (Fraction, GaussianFraction)):
            return x
        if isinstance(x, bool):
            raise ValueError("boolean is not a scalar")
        if isinstance(x, (int, float, str)):
            return _to_fraction(x)
        if isinstance(x, complex):
            return GaussianFraction(_to_fraction(x.real), _to_fraction(x.imag))
        if isinstance(x, np.generic):
            return to_scalar(x.item(), EXACT)
        raise BackendUnsupported(f"cannot represent {type(x).__name__} exactly")
    if backend == FLOAT:
        if isinstance(x, str):
            x = Fraction(x)
        if isinstance(x, (mpmath.mpf, mpmath.mpc)):
            return complex(x)
        z = complex(x)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise ValueError("non-finite scalar")
        return z
    # mp
    if isinstance(x, str):
        x = Fraction(x)
    if isinstance(x, Fraction):
        return mpmath.mpc(mpmath.mpf(x.numerator) / x.denominator)
    if isinstance(x, GaussianFraction):
        return mpmath.mpc(to_scalar(x.re, MP).real, to_scalar(x.im, MP).real)
    if isinstance(x, np.generic):
        x = x.item()
    return mpmath.mpc(x)


def one(backend: str):
    return to_scalar(1, backend)


def zero(backend: str):
    return to_scalar(0, backend)


def exp_scalar(x, backend: str):
    """``e**x``; on the exact backend only ``x == 0`` is representable."""
    if backend == EXACT:
        if x == 0:
            return Fraction(1)
        raise BackendUnsupported("exact backend cannot represent exp of a nonzero value")
    if backend == MP:
        return mpmath.exp(x)
    return cmath.exp(x)


def backend_of(arr: np.ndarray) -> str:
    if arr.dtype != object:
        return FLOAT
    for x in arr.flat:
        return MP if isinstance(x, (mpmath.mpf, mpmath.mpc)) else EXACT
    return EXACT


def zeros(shape, backend: str) -> np.ndarray:
    _check_backend(backend)
    if backend == FLOAT:
        return np.zeros(shape, dtype=complex)
    out = np.empty(shape, dtype=object)
    out.fill(zero(backend))
    return out


def eye(n: int, backend: str) -> np.ndarray:
    out = zeros((n, n), backend)
    for i in range(n):
        out[i, i] = one(backend)
    return out


def matrix(rows: Iterable[Iterable[Any]], backend: str = FLOAT) -> np.ndarray:
    """Build a 2-D backend array from nested sequences (or convert an array)."""
    if isinstance(rows, np.ndarray):
        if rows.ndim != 2:
            raise ShapeError(f"expected a 2-D array, got {rows.ndim}-D")
        return as_backend(rows, backend)
    data = [list(r) for r in rows]
    if not data:
        return zeros((0, 0), backend)
    width = len(data[0])
    if any(len(r) != width for r in data):
        raise ShapeError("ragged matrix rows")
    out = zeros((len(data), width), backend)
    for i, r in enumerate(data):
        for j, x in enumerate(r):
            out[i, j] = to_scalar(x, backend)
    return out


def vector(values: Iterable[Any], backend: str = FLOAT) -> np.ndarray:
    vals = list(values)
    out = zeros((len(vals),), backend)
    for i, x in enumerate(vals):
        out[i] = to_scalar(x, backend)
    return out


def as_backend(arr: np.ndarray, backend: str) -> np.ndarray:
    arr = np.asarray(arr)
    out = zeros(arr.shape, backend)
    for idx, x in np.ndenumerate(arr):
        out[idx] = to_scalar(x, backend)
    return out


def as_flow(t: Sequence[Any] | None, backend: str, K: int | None = None) -> list:
    """Normalise a finitely supported flow vector ``(t_1, ..., t_K)``.

    ``K`` pads with zeros; entries beyond ``K`` must vanish.
    """
    vals = [to_scalar(x, backend) for x in (t or [])]
    if K is not None:
        if any(v != 0 for v in vals[K:]):
            raise ShapeError(f"flow vector has nonzero entries beyond K={K}")
        vals = vals[:K] + [zero(backend)] * max(0, K - len(vals))
    return vals


def max_abs(x) -> float:
    arr = np.asarray(x)
    if arr.size == 0:
        return 0.0
    if arr.dtype != object:
        return float(np.max(np.abs(arr)))
    return max(abs(complex(v)) for v in arr.flat)


def rel_residual(lhs, rhs, scale=None):
    """Scale-aware max-entry residual ``max|lhs-rhs| / max(|lhs|, |rhs|, 1e-300)``.

    ``scale`` overrides the denominator, e.g. with :func:`product_scale` for
    matrix equations whose sides are differences of much larger terms.  On the
    exact backend an exact match returns ``Fraction(0)`` so callers can
    distinguish "exactly zero" from "small".
    """
    lhs = np.asarray(lhs)
    rhs = np.asarray(rhs)
    if lhs.shape != rhs.shape:
        raise ShapeError(f"residual of mismatched shapes {lhs.shape} vs {rhs.shape}")
    diff = lhs - rhs
    if diff.dtype == object and backend_of(diff) == EXACT:
        if all(v == 0 for v in diff.flat):
            return Fraction(0)
    if scale is None:
        scale = max(max_abs(lhs), max_abs(rhs))
    return max_abs(diff) / max(float(scale), 1e-300)


def product_scale(*products: Sequence[Any]) -> float:
    """Largest entry of ``sum_p |X_1| |X_2| ...`` over the given factor lists.

    This is the size of the terms in an equation such as ``A B - D^T A = f g^T``,
    so residuals divided by it measure rounding relative to the work done
    rather than to a result that may itself be a large cancellation.  Vectors
    pair up as outer products.
    """
    total = None
    for factors in products:
        mats = [np.abs(np.asarray(as_backend(np.asarray(x), FLOAT), dtype=complex)) for x in factors]
        if all(m.ndim == 1 for m in mats) and len(mats) == 2:
            term = np.outer(mats[0], mats[1])
        else:
            term = mats[0]
            for m in mats[1:]:
                term = term @ m
        total = term if total is None else total + term
    return float(total.max()) if total is not None and total.size else 0.0


def is_exact_zero(x) -> bool:
    return isinstance(x, (Fraction, int)) and x == 0


# ---------------------------------------------------------------------------
# Jordan specifications


@dataclass(frozen=True)
class JordanSpec:
    """Upper-triangular Jordan form given by ordered ``(eigenvalue, size)`` blocks."""

    blocks: tuple

    def __post_init__(self):
        blocks = tuple((b[0], int(b[1])) for b in self.blocks)
        for eig, size in blocks:
            if size < 1:
                raise ShapeError(f"Jordan block size must be positive, got {size}")
        eigs = [b[0] for b in blocks]
        for i in range(len(eigs)):
            for j in range(i):
                if eigs[i] == eigs[j]:
                    raise EigenvalueCollision(f"repeated eigenvalue {eigs[i]!r} in Jordan spec")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def diagonal(cls, values: Iterable[Any]) -> "JordanSpec":
        return cls(tuple((v, 1) for v in values))

    @classmethod
    def nilpotent(cls, n: int) -> "JordanSpec":
        return cls(((0, n),))

    @property
    def dim(self) -> int:
        return sum(s for _, s in self.blocks)

    @property
    def eigenvalues(self) -> tuple:
        return tuple(e for e, _ in self.blocks)

    @property
    def sizes(self) -> tuple:
        return tuple(s for _, s in self.blocks)

    @property
    def offsets(self) -> tuple:
        out, pos = [], 0
        for s in self.sizes:
            out.append(pos)
            pos += s
        return tuple(out)

    @property
    def multi_index(self) -> list[tuple[int, int]]:
        """Flattened ``(block j, inner nu)`` labels, 1-based, in storage order."""
        return [(j + 1, nu + 1) for j, s in enumerate(self.sizes) for nu in range(s)]

    @property
    def is_nilpotent(self) -> bool:
        return all(e == 0 for e in self.eigenvalues)

    @property
    def spectral_radius(self) -> float:
        return max((abs(complex(to_scalar(e, FLOAT))) for e in self.eigenvalues), default=0.0)

    def scalar_eigenvalues(self, backend: str) -> list:
        return [to_scalar(e, backend) for e in self.eigenvalues]

    def leading_indicator(self, backend: str) -> np.ndarray:
        """Vector with 1 at the first slot of every block (``f_D`` / ``g_B``)."""
        out = zeros((self.dim,), backend)
        for off in self.offsets:
            out[off] = one(backend)
        return out


def check_disjoint(spec_b: JordanSpec, spec_d: JordanSpec) -> None:
    for b in spec_b.eigenvalues:
        for d in spec_d.eigenvalues:
            if b == d:
                raise EigenvalueCollision(f"eigenvalue {b!r} shared by B and D")


def block_toeplitz(
    spec: JordanSpec, backend: str, coeffs: Callable[[Any, int], Sequence[Any]]
) -> np.ndarray:
    """Assemble ``phi(J)`` from ``coeffs(beta, size)`` = Taylor coefficients of phi at beta."""
    n = spec.dim
    out = zeros((n, n), backend)
    for (eig, size), off in zip(spec.blocks, spec.offsets):
        c = coeffs(to_scalar(eig, backend), size)
        for mu in range(size):
            for nu in range(mu, size):
                out[off + mu, off + nu] = c[nu - mu]
    return out


def jordan_matrix(spec: JordanSpec, backend: str = FLOAT) -> np.ndarray:
    def coeffs(beta, size):
        return [beta, one(backend)] + [zero(backend)] * (size - 2)

    return block_toeplitz(spec, backend, coeffs)


def exp_series(d: Sequence[Any], m: int, backend: str) -> list:
    """Coefficients ``c_0..c_{m-1}`` of ``exp(sum_{j>=1} d_j w^j)``, ``d = (d_1, d_2, ...)``.

    Uses ``k c_k = sum_j j d_j c_{k-j}``; this is also the complete
    homogeneous ``h_k`` recurrence when ``d`` holds KP times.
    """
    c = [one(backend)]
    for k in range(1, m):
        acc = zero(backend)
        for j in range(1, min(k, len(d)) + 1):
            acc = acc + j * d[j - 1] * c[k - j]
        c.append(acc / k)
    return c[:m] if m > 0 else []


def xi_taylor(beta, t: Sequence[Any], m: int, backend: str) -> list:
    """Taylor coefficients ``d_0..d_{m-1}`` of ``xi(beta + w) = sum_i t_i (beta+w)^i``."""
    out = []
    for j in range(m):
        acc = zero(backend)
        for i in range(max(j, 1), len(t) + 1):
            acc = acc + t[i - 1] * math.comb(i, j) * beta ** (i - j)
        out.append(acc)
    return out


def xi(z, t: Sequence[Any], backend: str = FLOAT):
    """``xi(z, t) = sum_i t_i z**i``."""
    t = as_flow(t, backend)
    z = to_scalar(z, backend)
    acc = zero(backend)
    for i, ti in enumerate(t, start=1):
        acc = acc + ti * z**i
    return acc


def flow_exponential(spec: JordanSpec, t: Sequence[Any], backend: str = FLOAT) -> np.ndarray:
    """``exp(sum_i t_i J**i)`` in closed form, block by block.

    The exact backend succeeds whenever every ``xi(beta, t)`` vanishes, in
    particular for nilpotent specs; otherwise it raises BackendUnsupported.
    """
    t = as_flow(t, backend)

    def coeffs(beta, size):
        d = xi_taylor(beta, t, size, backend)
        scale = exp_scalar(d[0], backend)
        return [scale * c for c in exp_series(d[1:], size, backend)]

    return block_toeplitz(spec, backend, coeffs)


# ---------------------------------------------------------------------------
# polynomials (coefficient lists, lowest degree first)


def poly_mul(p: Sequence[Any], q: Sequence[Any]) -> list:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return out


def poly_from_roots(roots_with_mult: Iterable[tuple[Any, int]], backend: str) -> list:
    p = [one(backend)]
    for root, mult in roots_with_mult:
        r = to_scalar(root, backend)
        for _ in range(mult):
            p = poly_mul(p, [-r, one(backend)])
    return p


def char_poly_coeffs(spec: JordanSpec, backend: str = FLOAT) -> list:
    return poly_from_roots(spec.blocks, backend)


def min_poly_coeffs(spec: JordanSpec, backend: str = FLOAT) -> list:
    largest: dict = {}
    order = []
    for eig, size in spec.blocks:
        key = eig
        if key not in largest:
            order.append(key)
            largest[key] = size
        else:
            largest[key] = max(largest[key], size)
    return poly_from_roots(((e, largest[e]) for e in order), backend)


def poly_eval(p: Sequence[Any], z):
    acc = 0
    for c in reversed(p):
        acc = acc * z + c
    return acc


def poly_taylor(p: Sequence[Any], x, m: int, backend: str) -> list:
    """First ``m`` Taylor coefficients ``p^(k)(x)/k!`` via repeated synthetic division."""
    a = list(p)
    out = []
    for _ in range(m):
        if not a:
            out.append(zero(backend))
            continue
        q = [0] * (len(a) - 1)
        r = a[-1]
        for i in range(len(a) - 2, -1, -1):
            q[i] = r
            r = a[i] + r * x
        out.append(r)
        a = q
    return [to_scalar(0, backend) + v for v in out]


def char_poly_at(spec: JordanSpec, z, backend: str = FLOAT):
    return poly_eval(char_poly_coeffs(spec, backend), to_scalar(z, backend))


def min_poly_at(spec: JordanSpec, z, backend: str = FLOAT):
    return poly_eval(min_poly_coeffs(spec, backend), to_scalar(z, backend))


def poly_of_jordan(p: Sequence[Any], spec: JordanSpec, backend: str = FLOAT) -> np.ndarray:
    return block_toeplitz(spec, backend, lambda beta, size: poly_taylor(p, beta, size, backend))


def char_poly_of_matrix(spec_d: JordanSpec, spec_b: JordanSpec, backend: str = FLOAT) -> np.ndarray:
    """``r_D(B)``: the characteristic polynomial of D evaluated at the Jordan matrix B."""
    return poly_of_jordan(char_poly_coeffs(spec_d, backend), spec_b, backend)


# ---------------------------------------------------------------------------
# elimination


def _require_square(m: np.ndarray) -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    return m.shape[0]


def det(m: np.ndarray):
    """Determinant.

    Exact backend: Bareiss fraction-free elimination with first-nonzero pivots.
    Float backend: LU with partial pivoting (LAPACK); the usual growth-factor
    caveat applies.  ``mp``: partial-pivot Gaussian elimination.
    """
    m = np.asarray(m)
    n = _require_square(m)
    backend = backend_of(m)
    if n == 0:
        return one(backend)
    if backend == FLOAT:
        return complex(np.linalg.det(m))
    rows = [list(r) for r in m]
    if backend == EXACT:
        return _bareiss(rows)
    return _gauss_det(rows)


def _bareiss(a: list[list]) -> Any:
    n = len(a)
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        piv = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * piv - a[i][k] * a[k][j]) / prev
        prev = piv
    return sign * a[n - 1][n - 1]


def _gauss_det(a: list[list]) -> Any:
    n = len(a)
    acc = mpmath.mpc(1)
    for k in range(n):
        p = max(range(k, n), key=lambda i: abs(a[i][k]))
        if a[p][k] == 0:
            return mpmath.mpc(0)
        if p != k:
            a[k], a[p] = a[p], a[k]
            acc = -acc
        piv = a[k][k]
        acc *= piv
        for i in range(k + 1, n):
            fct = a[i][k] / piv
            if fct != 0:
                for j in range(k + 1, n):
                    a[i][j] = a[i][j] - fct * a[k][j]
    return acc


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``a x = b`` for square nonsingular ``a``; raises RankError when singular."""
    a = np.asarray(a)
    b = np.asarray(b)
    n = _require_square(a)
    if b.shape[0] != n:
        raise ShapeError(f"right-hand side has {b.shape[0]} rows, expected {n}")
    backend = backend_of(a)
    if backend == FLOAT:
        try:
            return np.linalg.solve(a, b)
        except np.linalg.LinAlgError as exc:
            raise RankError("singular matrix") from exc
    vec = b.ndim == 1
    rhs = b.reshape(n, -1)
    aug = [list(a[i]) + list(rhs[i]) for i in range(n)]
    width = len(aug[0]) if aug else 0
    for k in range(n):
        if backend == EXACT:
            p = next((i for i in range(k, n) if aug[i][k] != 0), None)
        else:
            p = max(range(k, n), key=lambda i: abs(aug[i][k]))
            if aug[p][k] == 0:
                p = None
        if p is None:
            raise RankError("singular matrix")
        aug[k], aug[p] = aug[p], aug[k]
        piv = aug[k][k]
        aug[k] = [v / piv for v in aug[k]]
        for i in range(n):
            if i != k and aug[i][k] != 0:
                fct = aug[i][k]
                aug[i] = [aug[i][j] - fct * aug[k][j] for j in range(width)]
    out = np.empty((n, rhs.shape[1]), dtype=object)
    for i in range(n):
        out[i, :] = aug[i][n:]
    return out[:, 0] if vec else out


def inv(a: np.ndarray) -> np.ndarray:
    n = _require_square(np.asarray(a))
    return solve(a, eye(n, backend_of(np.asarray(a))))


def rref(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Exact reduced row-echelon form and pivot columns (exact backend only)."""
    rows = [list(r) for r in np.asarray(a)]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        rows[r] = [v / piv for v in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                fct = rows[i][c]
                rows[i] = [rows[i][j] - fct * rows[r][j] for j in range(ncols)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    out = zeros((nrows, ncols), EXACT)
    for i in range(nrows):
        for j in range(ncols):
            out[i, j] = rows[i][j]
    return out, pivots


def singular_values(m: np.ndarray) -> np.ndarray:
    arr = as_backend(np.asarray(m), FLOAT) if np.asarray(m).dtype == object else np.asarray(m)
    if arr.size == 0:
        return np.zeros(0)
    return scipy.linalg.svdvals(arr)


def rank(m: np.ndarray, rtol: float = DEFAULT_RTOL) -> int:
    """Exact rank on the exact backend, else singular values above ``rtol * s_max``."""
    m = np.asarray(m)
    if m.size == 0:
        return 0
    if backend_of(m) == EXACT:
        return len(rref(m)[1])
    s = singular_values(m)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def row_annihilator(a: np.ndarray) -> np.ndarray:
    """A full-rank ``(N-n) x N`` matrix R with ``a @ R.T == 0`` (``a`` of full row rank n < N)."""
    a = np.asarray(a)
    if a.ndim != 2:
        raise ShapeError("row_annihilator expects a matrix")
    n, N = a.shape
    if n >= N:
        raise ShapeError(f"need n < N, got {n} x {N}")
    backend = backend_of(a)
    if rank(a) != n:
        raise RankError("row_annihilator needs a matrix of full row rank")
    if backend != EXACT:
        basis = scipy.linalg.null_space(as_backend(a, FLOAT) if a.dtype == object else a)
        return as_backend(basis.T, backend) if backend != FLOAT else basis.T
    red, pivots = rref(a)
    free = [c for c in range(N) if c not in pivots]
    out = zeros((len(free), N), EXACT)
    for r, fc in enumerate(free):
        out[r, fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            out[r, pc] = -red[i, fc]
    return out
