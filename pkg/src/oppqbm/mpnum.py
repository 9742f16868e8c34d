"""Arbitrary-precision scalars and dense symmetric-positive-definite linear algebra.

Scalars are ``gmpy2.mpfr`` values (exported here as :data:`BigReal`), governed
by a single process-wide working precision measured in decimal digits.  One
precision per run is the intended usage: set it once with
:func:`set_precision` (or temporarily with :func:`precision`), and every
subsequent arithmetic result is correctly rounded to that precision.
Elementary operations (comparison, ``abs``, ``sqrt``, ``exp``, ``log``) are
exact to one unit in the last retained digit, as guaranteed by the underlying
MPFR library.

On top of the scalars, this module provides the symmetric/lower-triangular
matrix containers and the factor/solve/extremal-eigenvalue operations that
the rest of the package builds on.  The O(n³) loops live in
:mod:`oppqbm.kernels`.
"""
from __future__ import annotations

import random
from contextlib import contextmanager

import gmpy2
from gmpy2 import mpfr

from . import kernels

#: The arbitrary-precision real scalar type; call it to construct values at
#: the active working precision.  Prefer decimal strings or integers as
#: inputs — binary floats carry their own representation error.
BigReal = mpfr

MIN_DIGITS = 30
_GUARD_BITS = 16
_BITS_PER_DIGIT = 3.3219280948873626

_digits = 60


class NotPositiveDefinite(ArithmeticError):
    """A Cholesky pivot was ≤ 0: the matrix is not numerically positive
    definite at the working precision (raise precision or lower the order)."""

    def __init__(self, row: int, pivot):
        super().__init__(f"nonpositive pivot {pivot} at row {row}")
        self.row = row
        self.pivot = pivot


class DimensionMismatch(ValueError):
    """Operand dimensions are incompatible."""


class NoConvergence(ArithmeticError):
    """An iterative scheme exhausted its iteration budget."""

    def __init__(self, iterations: int, message: str = ""):
        super().__init__(message or f"no convergence after {iterations} iterations")
        self.iterations = iterations


def _bits(digits: int) -> int:
    return int(digits * _BITS_PER_DIGIT) + _GUARD_BITS


def set_precision(digits: int) -> None:
    """Set the global working precision in decimal digits (≥ 30)."""
    if digits < MIN_DIGITS:
        raise ValueError(f"working precision must be ≥ {MIN_DIGITS} digits, got {digits}")
    global _digits
    _digits = int(digits)
    gmpy2.get_context().precision = _bits(_digits)


def get_precision() -> int:
    """Return the current working precision in decimal digits."""
    return _digits


@contextmanager
def precision(digits: int):
    """Temporarily switch the working precision."""
    previous = _digits
    set_precision(digits)
    try:
        yield
    finally:
        set_precision(previous)


@contextmanager
def extra_precision(factor: float = 2.0):
    """Temporarily multiply the working precision (cancellation guard)."""
    previous = _digits
    set_precision(max(MIN_DIGITS, int(previous * factor)))
    try:
        yield
    finally:
        set_precision(previous)


def decimal_str(x, sig: int | None = None) -> str:
    """Deterministic scientific-notation decimal string of ``x`` with ``sig``
    significant digits (default: the full working precision)."""
    if sig is None:
        sig = _digits
    if sig < 1:
        raise ValueError("sig must be ≥ 1")
    x = mpfr(x)
    if gmpy2.is_nan(x):
        return "nan"
    if gmpy2.is_infinite(x):
        return "-inf" if x < 0 else "inf"
    if x == 0:
        mantissa = "0" if sig == 1 else "0." + "0" * (sig - 1)
        return mantissa + "e+00"
    digits, exponent, _ = x.digits(10, max(sig, 2))
    sign = ""
    if digits.startswith("-"):
        sign, digits = "-", digits[1:]
    if sig == 1:
        rounded = (int(digits) + 5) // 10
        if rounded == 10:
            rounded, exponent = 1, exponent + 1
        return f"{sign}{rounded}e{exponent - 1:+03d}"
    mantissa = digits[0] + "." + digits[1:]
    return f"{sign}{mantissa}e{exponent - 1:+03d}"


set_precision(_digits)


class SymMatrix:
    """Symmetric matrix of BigReal entries; only the lower triangle is stored,
    so ``get(i, j) == get(j, i)`` holds exactly by construction."""

    __slots__ = ("dim", "_rows")

    def __init__(self, dim: int):
        if dim < 1:
            raise DimensionMismatch(f"dimension must be ≥ 1, got {dim}")
        self.dim = dim
        zero = mpfr(0)
        self._rows = [[zero] * (i + 1) for i in range(dim)]

    @classmethod
    def from_lower_rows(cls, rows) -> "SymMatrix":
        """Wrap rows of the lower triangle (row i holds entries 0..i)."""
        m = cls(len(rows))
        for i, row in enumerate(rows):
            if len(row) != i + 1:
                raise DimensionMismatch(f"lower-triangle row {i} must have {i + 1} entries")
            m._rows[i] = [mpfr(v) for v in row]
        return m

    @classmethod
    def from_function(cls, dim: int, f) -> "SymMatrix":
        """Build from an entry function ``f(i, j)`` evaluated on i ≥ j."""
        m = cls(dim)
        m._rows = [[mpfr(f(i, j)) for j in range(i + 1)] for i in range(dim)]
        return m

    def get(self, i: int, j: int):
        return self._rows[i][j] if j <= i else self._rows[j][i]

    def set(self, i: int, j: int, value) -> None:
        if j <= i:
            self._rows[i][j] = mpfr(value)
        else:
            self._rows[j][i] = mpfr(value)

    def lower_rows(self):
        """The stored lower-triangle rows (shared, treat as read-only)."""
        return self._rows

    def inf_norm(self):
        best = mpfr(0)
        for i in range(self.dim):
            s = mpfr(0)
            for j in range(self.dim):
                s += abs(self.get(i, j))
            if s > best:
                best = s
        return best


class LowerTriangular:
    """Lower-triangular matrix with strictly positive diagonal (the invariant
    a successful factorization guarantees)."""

    __slots__ = ("dim", "_rows")

    def __init__(self, rows):
        self.dim = len(rows)
        for i, row in enumerate(rows):
            if len(row) != i + 1:
                raise DimensionMismatch(f"triangular row {i} must have {i + 1} entries")
        self._rows = rows

    def get(self, i: int, j: int):
        return self._rows[i][j] if j <= i else mpfr(0)

    def diagonal(self):
        return [self._rows[i][i] for i in range(self.dim)]

    def lower_rows(self):
        """The stored rows (shared, treat as read-only)."""
        return self._rows


def cholesky(w: SymMatrix) -> LowerTriangular:
    """Factor W = C·Cᵀ; raises :class:`NotPositiveDefinite` on a bad pivot."""
    try:
        rows = kernels.cholesky(w.lower_rows(), gmpy2.sqrt)
    except ValueError as exc:
        row, pivot = exc.args
        raise NotPositiveDefinite(row, pivot) from None
    return LowerTriangular(rows)


def solve_lower(c: LowerTriangular, b) -> list:
    """Solve C·x = b by forward substitution."""
    if len(b) != c.dim:
        raise DimensionMismatch(f"vector of length {len(b)} vs dimension {c.dim}")
    return kernels.solve_lower(c.lower_rows(), [mpfr(v) for v in b])


def spd_solve(a: SymMatrix, b) -> list:
    """Solve A·x = b for symmetric positive definite A (via Cholesky)."""
    if len(b) != a.dim:
        raise DimensionMismatch(f"vector of length {len(b)} vs dimension {a.dim}")
    c = cholesky(a)
    y = kernels.solve_lower(c.lower_rows(), [mpfr(v) for v in b])
    return kernels.solve_upper_transposed(c.lower_rows(), y)


def _count_eigenvalues_below(p: SymMatrix, sigma):
    """Number of eigenvalues of P strictly below ``sigma``, by the inertia of
    P − σI from an unpivoted LDLᵀ sweep.  Returns None on pivot breakdown
    (caller perturbs σ and retries)."""
    n = p.dim
    l_rows = [[None] * i for i in range(n)]
    d = [None] * n
    negative = 0
    for j in range(n):
        s = p.get(j, j) - sigma
        for k in range(j):
            s -= l_rows[j][k] * l_rows[j][k] * d[k]
        if s == 0:
            return None
        d[j] = s
        if s < 0:
            negative += 1
        for i in range(j + 1, n):
            t = p.get(i, j)
            for k in range(j):
                t -= l_rows[i][k] * l_rows[j][k] * d[k]
            l_rows[i][j] = t / s
    return negative


def eigenvalues_below(p: SymMatrix, sigma, attempts: int = 50):
    """Number of eigenvalues of P strictly below ``sigma`` (LDLᵀ inertia).

    A zero pivot means σ sits numerically on an eigenvalue; σ is nudged
    upward by ‖P‖∞·10^(2−digits) up to ``attempts`` times.  Returns None if
    every attempt broke down."""
    sigma = mpfr(sigma)
    nudge = max(p.inf_norm(), mpfr(1)) * mpfr(10) ** (-get_precision() + 2)
    for _ in range(attempts):
        c = _count_eigenvalues_below(p, sigma)
        if c is not None:
            return c
        sigma += nudge
    return None


def _lu_solve(rows, b):
    """Solve a small dense system by LU with partial pivoting (in place on
    copies); returns None if the matrix is numerically singular."""
    n = len(rows)
    a = [list(r) for r in rows]
    x = list(b)
    perm = list(range(n))
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col]))
        if a[piv][col] == 0:
            return None
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            x[col], x[piv] = x[piv], x[col]
            perm[col], perm[piv] = perm[piv], perm[col]
        inv_piv = 1 / a[col][col]
        for r in range(col + 1, n):
            factor = a[r][col] * inv_piv
            if factor != 0:
                ar = a[r]
                ac = a[col]
                for c in range(col + 1, n):
                    ar[c] -= factor * ac[c]
                x[r] -= factor * x[col]
            a[r][col] = 0
    for i in range(n - 1, -1, -1):
        s = x[i]
        ai = a[i]
        for j in range(i + 1, n):
            s -= ai[j] * x[j]
        x[i] = s / ai[i]
    return x


def _norm2(v):
    return gmpy2.sqrt(sum(x * x for x in v))


def smallest_eigenvalue(p: SymMatrix, max_iterations: int = 12):
    """Smallest eigenvalue of a symmetric positive definite matrix.

    Returns ``(lam, v)`` with ‖v‖₂ = 1 and residual
    ‖P·v − lam·v‖∞ ≤ 10^(6−digits)·‖P‖∞.  The eigenvalue is located by
    bisection on eigenvalue counts from LDLᵀ inertia (certified bracket),
    then polished together with the eigenvector by shifted inverse
    iteration and the Rayleigh quotient.

    Raises :class:`NoConvergence` if the residual target is not met within
    the iteration budget.
    """
    n = p.dim
    digits = get_precision()
    one = mpfr(1)
    if n == 1:
        return p.get(0, 0), [one]

    norm = p.inf_norm()
    if norm == 0:
        return mpfr(0), [one] + [mpfr(0)] * (n - 1)
    # Gershgorin bracket for the whole spectrum.
    lo = None
    hi = None
    for i in range(n):
        radius = mpfr(0)
        for j in range(n):
            if j != i:
                radius += abs(p.get(i, j))
        center = p.get(i, i)
        lo = center - radius if lo is None else min(lo, center - radius)
        hi = center + radius if hi is None else max(hi, center + radius)

    def count_below(sigma):
        nudge = norm * mpfr(10) ** (-digits + 2)
        for _ in range(50):
            c = _count_eigenvalues_below(p, sigma)
            if c is not None:
                return c
            sigma += nudge
        raise NoConvergence(50, "inertia pivot breakdown persisted under perturbation")

    # Shrink [lo, hi] around the smallest eigenvalue.  The final width is
    # two digits tighter than the residual target, so even a cluster of
    # eigenvalues inside the bracket cannot push the residual of a mixed
    # eigenvector above the certificate bound.
    width_target = norm * mpfr(10) ** (4 - digits)
    while hi - lo > width_target:
        mid = (lo + hi) / 2
        if count_below(mid) == 0:
            lo = mid
        else:
            hi = mid

    sigma = (lo + hi) / 2
    rng = random.Random(0x5EED)
    v = [mpfr(rng.uniform(-1, 1)) for _ in range(n)]
    nv = _norm2(v)
    v = [x / nv for x in v]
    full_rows = [[p.get(i, j) - (sigma if i == j else 0) for j in range(n)] for i in range(n)]
    residual_bound = norm * mpfr(10) ** (6 - digits)
    lam = sigma
    residual = None
    for iteration in range(1, max_iterations + 1):
        w = _lu_solve(full_rows, v)
        if w is None:
            # σ numerically hit an eigenvalue: the current v is already good
            # or a nudge will separate the shift from it.
            sigma += norm * mpfr(10) ** (-digits + 2)
            full_rows = [
                [p.get(i, j) - (sigma if i == j else 0) for j in range(n)] for i in range(n)
            ]
            continue
        nw = _norm2(w)
        v = [x / nw for x in w]
        pv = [sum(p.get(i, j) * v[j] for j in range(n)) for i in range(n)]
        lam = sum(v[i] * pv[i] for i in range(n))
        residual = max(abs(pv[i] - lam * v[i]) for i in range(n))
        if residual <= residual_bound:
            return lam, v
    raise NoConvergence(max_iterations, f"eigen residual {residual} above {residual_bound}")
