"""Reference-function weights and their exact power moments.

Two weights are provided:

* the half-line weight ξ^(−1/2)·e^(−ξ/2) used by the even-parity harmonic
  oscillator, whose power moments follow the half-integer gamma recursion,
  and
* the planar magnetic-field weight exp(−βξη − α(ξ+η)) with α = √(ε₀/2),
  β = B/2, whose moments reduce to the two-index family
  Γ(m, n+1, g) = (α^{m+n+2}/n!)·w(m, n), g = B/ε₀, generated recursively
  from the seed Γ(0, 1, g) = (1/g)·e^{1/g}·E₁(1/g).

The seed row recursion is an alternating sum that cancels catastrophically
for small g, so the whole Γ grid is generated at twice the working precision
and rounded on exit.
"""
from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import const_euler, const_pi, exp, log, mpfr, sqrt

from . import mpnum
from .mer import QzmSystem


class PrecisionExhausted(ArithmeticError):
    """An expansion failed to converge, or cancellation consumed the
    working precision; raise the precision and retry."""


@dataclass(frozen=True)
class WeightMoments1D:
    """Power moments w(p) of a half-line weight, p = 0..p_max."""

    values: tuple
    description: str

    def w(self, p: int):
        return self.values[p]

    @property
    def p_max(self) -> int:
        return len(self.values) - 1


def harmonic_weight_moments(p_max: int, precision: int = None) -> WeightMoments1D:
    """Moments w(p) = ∫₀^∞ ξ^{p−1/2} e^{−ξ/2} dξ = 2^{p+1/2}·Γfunc(p+1/2),
    generated by the exact half-integer recursion w(p) = (2p−1)·w(p−1) from
    w(0) = √(2π)."""
    if p_max < 0:
        raise ValueError("p_max must be ≥ 0")
    with mpnum.precision(precision or mpnum.get_precision()):
        values = [sqrt(2 * const_pi())]
        for p in range(1, p_max + 1):
            values.append(values[-1] * (2 * p - 1))
    return WeightMoments1D(
        values=tuple(values),
        description="half-line weight ξ^(−1/2)·exp(−ξ/2)",
    )


def _e1_series(x, digits: int):
    """E₁(x) = −γ − ln x − Σ_{k≥1} (−x)^k/(k·k!), reliable for small x."""
    budget = 64 + 8 * digits
    total = -const_euler() - log(x)
    term = mpfr(1)
    cutoff = mpfr(10) ** (-digits - 10)
    for k in range(1, budget):
        term *= -x / k
        piece = term / k
        total -= piece
        if abs(piece) < cutoff * (abs(total) + 1):
            return total
    raise PrecisionExhausted(
        f"exponential-integral series did not converge within {budget} terms"
    )


def _scaled_e1_fraction(x, digits: int):
    """x·e^x·E₁(x) by the modified Lentz evaluation of the continued fraction
    e^x·E₁(x) = 1/(x+1 − 1²/(x+3 − 2²/(x+5 − ···))), reliable for large x."""
    budget = 64 + 8 * digits
    tiny = mpfr(10) ** (-2 * digits - 60)
    cutoff = mpfr(10) ** (-digits - 10)
    b = x + 1
    f = b if b != 0 else tiny
    c = f
    d = mpfr(0)
    for j in range(1, budget):
        a = mpfr(-(j * j))
        b = b + 2
        d = b + a * d
        if d == 0:
            d = tiny
        c = b + a / c
        if c == 0:
            c = tiny
        d = 1 / d
        delta = c * d
        f *= delta
        if abs(delta - 1) < cutoff:
            return x / f
    raise PrecisionExhausted(
        f"exponential-integral continued fraction did not converge within {budget} terms"
    )


def gamma_seed(g, precision: int = None) -> mpfr:
    """Γ(0, 1, g) = (1/g)·e^{1/g}·E₁(1/g) ∈ (0, 1), at full working precision.

    The argument x = 1/g is routed to the power series for x ≤ 4 and to the
    modified Lentz continued fraction otherwise; the continued-fraction
    branch evaluates the product x·e^x·E₁(x) directly, so no intermediate
    overflows for tiny g."""
    digits = precision or mpnum.get_precision()
    with mpnum.precision(digits):
        g = mpfr(g)
        if not g > 0:
            raise ValueError("g must be > 0")
        x = 1 / g
        if x <= 4:
            value = x * exp(x) * _e1_series(x, digits)
        else:
            value = _scaled_e1_fraction(x, digits)
    if not (0 < value < 1):
        raise PrecisionExhausted(f"seed {value} escaped its bracket (0, 1)")
    return value


def gamma_grid(g, M: int, N: int, seed) -> list:
    """Rows grid[m][n] = Γ(m, n+1, g) for 0 ≤ m ≤ M, 0 ≤ n ≤ N.

    Row m = 0 is the alternating sum
    Γ(0, n+1, g) = Σ_{j=1..n} (−1)^{j+1} g^{−j} (n−j)!/n! + (−1)^n g^{−n} Γ(0,1,g)/n!
    and the remaining rows follow the three-term recursion
    Γ(m+1, n+1, g) = g^{−1}δ_{m0} + (m/g)·Γ(m−1, n+1, g) + (m−n−g^{−1})·Γ(m, n+1, g).
    The whole build runs at twice the working precision to absorb the
    alternating-sum cancellation, then rounds."""
    if M < 0 or N < 0:
        raise ValueError("grid bounds must be ≥ 0")
    with mpnum.extra_precision(2.0):
        g = mpfr(g)
        seed = mpfr(seed)
        inv_g = 1 / g
        row0 = [seed]
        # Incremental form of the alternating sum: the partial sums obey
        # Γ(0, n+1, g) = (1 − Γ(0, n, g))/(g·n), term for term.
        for n in range(1, N + 1):
            value = (1 - row0[-1]) / (g * n)
            if not (0 < value < 1):
                raise PrecisionExhausted(
                    f"cancellation destroyed Γ(0,{n + 1}) = {value}; "
                    "raise the working precision"
                )
            row0.append(value)
        rows = [row0]
        for m in range(M):
            prev = rows[m - 1] if m >= 1 else None
            cur = rows[m]
            nxt = []
            for n in range(N + 1):
                value = (m - n - inv_g) * cur[n]
                if m == 0:
                    value += inv_g
                else:
                    value += (m * inv_g) * prev[n]
                nxt.append(value)
            rows.append(nxt)
    return [[mpfr(v) for v in row] for row in rows]


@dataclass(frozen=True)
class QzmWeightMoments:
    """Moment family w(m, n) = n!·Γ(m, n+1, g)/α^{m+n+2} of the planar
    magnetic-field weight, on the rectangle m ≤ M, n ≤ N."""

    alpha: mpfr
    beta: mpfr
    g: mpfr
    gamma: tuple  # gamma[m][n] = Γ(m, n+1, g)
    values: tuple  # values[m][n] = w(m, n)

    def gamma_value(self, m: int, n: int):
        return self.gamma[m][n]

    def w(self, m: int, n: int):
        return self.values[m][n]

    @property
    def M(self) -> int:
        return len(self.values) - 1

    @property
    def N(self) -> int:
        return len(self.values[0]) - 1


def qzm_weight_moments(system: QzmSystem, m_s: int) -> QzmWeightMoments:
    """Weight moments on the rectangle m, n ≤ 2(2·m_s+1), the index range a
    basis through order I_{m_s} consumes (pairwise monomial sums reach
    m_i+m_j+n_i+n_j ≤ 2(2·m_s+1))."""
    if m_s < 0:
        raise ValueError("m_s must be ≥ 0")
    top = 2 * (2 * m_s + 1)
    alpha = sqrt(system.eps0 / 2)
    beta = system.B / 2
    g = system.B / system.eps0
    seed = gamma_seed(g)
    grid = gamma_grid(g, top, top, seed)
    # factorial and power tables keep the derived grid free of recomputation
    fact = [mpfr(1)]
    for n in range(1, top + 1):
        fact.append(fact[-1] * n)
    alpha_pow = [alpha ** 2]
    for _ in range(2 * top):
        alpha_pow.append(alpha_pow[-1] * alpha)
    values = tuple(
        tuple(fact[n] * grid[m][n] / alpha_pow[m + n] for n in range(top + 1))
        for m in range(top + 1)
    )
    return QzmWeightMoments(
        alpha=alpha,
        beta=beta,
        g=g,
        gamma=tuple(tuple(row) for row in grid),
        values=values,
    )
