"""Independent high-accuracy oracles for the test suite.

Everything here is computed with mpmath (quadrature, special functions,
root refinement) or exact rational arithmetic (fractions.Fraction) — never
with the package's own arithmetic stack — so agreement between the two is
evidence of correctness rather than a tautology.
"""
from fractions import Fraction

import mpmath
from gmpy2 import mpfr

from oppqbm import mpnum


def to_mpmath(x):
    """Convert an mpfr to an mpmath.mpf at the caller's mpmath precision,
    through a full-precision decimal string."""
    return mpmath.mpf(mpnum.decimal_str(mpfr(x)))


def from_mpmath(x, dps: int):
    """Convert an mpmath.mpf to an mpfr through a ``dps``-digit decimal
    string (at the caller's mpfr precision)."""
    return mpfr(mpmath.nstr(x, dps))


def rel_err(value, reference) -> mpfr:
    """|value − reference| / |reference| as an mpfr (reference must be ≠ 0)."""
    value = mpfr(value)
    reference = mpfr(reference)
    return abs(value - reference) / abs(reference)


def matches_printed(value, printed: str) -> bool:
    """True when ``value`` rounds to the decimal string ``printed``: it lies
    within half a unit in the last printed place."""
    mantissa = printed.strip().lstrip("+-")
    if "." in mantissa:
        decimals = len(mantissa.split(".")[1])
    else:
        decimals = 0
    half_ulp = mpfr(5) * mpfr(10) ** (-decimals - 1)
    return abs(mpfr(value) - mpfr(printed)) <= half_ulp


def agreeing_digits(value, reference) -> float:
    """Number of matching significant decimal digits (∞-safe, float)."""
    r = rel_err(value, reference)
    if r == 0:
        return float("inf")
    import math

    return -math.log10(float(r))


# ---------------------------------------------------------------------------
# Quadrature / special-function oracles (mpmath)


def harmonic_weight_oracle(p: int, dps: int):
    """Moment ∫₀^∞ ξ^{p−1/2} e^{−ξ/2} dξ = 2^{p+1/2}·Γ(p+1/2) via the
    mpmath gamma function."""
    with mpmath.workdps(dps):
        return mpmath.mpf(2) ** (p + mpmath.mpf(1) / 2) * mpmath.gamma(p + mpmath.mpf(1) / 2)


def harmonic_weight_quadrature(p: int, dps: int):
    """The same moment by numerical integration, after the substitution
    ξ = t² that removes the endpoint singularity:
    ∫₀^∞ ξ^{p−1/2} e^{−ξ/2} dξ = 2·∫₀^∞ t^{2p} e^{−t²/2} dt."""
    with mpmath.workdps(dps):
        return 2 * mpmath.quad(
            lambda t: t ** (2 * p) * mpmath.exp(-t * t / 2), [0, mpmath.inf]
        )


def planar_weight_oracle(alpha, beta, m: int, n: int, dps: int):
    """Moment ∬ ξ^m η^n exp(−βξη − α(ξ+η)) dξ dη, reduced analytically over η
    (∫η^n e^{−(βξ+α)η} dη = n!/(βξ+α)^{n+1}) and integrated numerically in ξ."""
    with mpmath.workdps(dps):
        a = to_mpmath(alpha)
        b = to_mpmath(beta)
        integral = mpmath.quad(
            lambda xi: xi**m * mpmath.exp(-a * xi) / (b * xi + a) ** (n + 1),
            [0, mpmath.inf],
        )
        return mpmath.factorial(n) * integral


def gamma_ratio_oracle(g, m: int, n: int, dps: int):
    """The dimensionless grid function ∫₀^∞ ξ^m e^{−ξ} (1+gξ)^{−(n+1)} dξ
    (the planar weight moment with α = 1, β = g, divided by n!)."""
    with mpmath.workdps(dps):
        gg = to_mpmath(g)
        return mpmath.quad(
            lambda xi: xi**m * mpmath.exp(-xi) / (1 + gg * xi) ** (n + 1),
            [0, mpmath.inf],
        )


def gamma_seed_oracle(g, dps: int):
    """(1/g)·e^{1/g}·E₁(1/g) via the mpmath exponential integral."""
    with mpmath.workdps(dps):
        x = 1 / to_mpmath(g)
        return x * mpmath.exp(x) * mpmath.e1(x)


# ---------------------------------------------------------------------------
# Exact characteristic polynomial (Fraction) and root bisection (mpmath)


def charpoly_fractions(rows):
    """Coefficients of det(xI − A) for a square matrix of Fractions, by the
    Faddeev–LeVerrier recursion in exact rational arithmetic.  Returned
    ascending: p(x) = Σ_k coeffs[k]·x^k with coeffs[n] = 1."""
    n = len(rows)
    a = [[Fraction(v) for v in row] for row in rows]
    m = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    cs = [Fraction(1)]
    for k in range(1, n + 1):
        m = [[sum(a[i][t] * m[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        ck = -sum(m[i][i] for i in range(n)) / k
        cs.append(ck)
        for i in range(n):
            m[i][i] += ck
    return list(reversed(cs))


def smallest_root_bisect(coeffs, dps: int, upper, steps: int = 1000):
    """Smallest positive root of an exact-coefficient polynomial, located by
    a sign walk from 0 up to ``upper`` followed by bisection at ``dps``
    decimal places.  ``coeffs`` ascending (Fractions or ints)."""
    with mpmath.workdps(dps):
        cs = [mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator)
              if isinstance(c, Fraction) else mpmath.mpf(c)
              for c in coeffs]

        def p(x):
            acc = cs[-1]
            for c in reversed(cs[:-1]):
                acc = acc * x + c
            return acc

        top = mpmath.mpf(str(upper))
        step = top / steps
        lo = mpmath.mpf(0)
        sign_lo = mpmath.sign(p(lo))
        hi = None
        for k in range(1, steps + 1):
            x = step * k
            if mpmath.sign(p(x)) != sign_lo:
                hi = x
                lo = step * (k - 1)
                break
        if hi is None:
            raise AssertionError("no sign change found below the upper bound")
        for _ in range(mpmath.mp.prec + 10):
            mid = (lo + hi) / 2
            if mpmath.sign(p(mid)) == sign_lo:
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2
