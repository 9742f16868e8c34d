"""Moment-recurrence systems and their energy-dependent transfer tables.

A bound state whose Schrödinger equation admits a linear finite-difference
relation among its power moments is characterized here by either

* a :class:`Recurrence1D` — a one-dimensional step rule
  μ(p+1) = Σ_k a_k(p, E)·μ(p−k) whose coefficients are polynomials in the
  energy E, or
* a :class:`QzmSystem` — the planar hydrogenic problem in a uniform magnetic
  field (field strength B, charge Z), whose moments M(m, n) obey a five-point
  lattice relation in the binding-energy variable ε.

Both generate a :class:`TransferTable`: the linear map M(index, ℓ) expressing
every moment in terms of the m_s+1 independent "missing" moments, plus an
optional closed-form energy-derivative companion.  Missing-moment rows are
seeded with the Kronecker condition M(ℓ₁, ℓ₂) = δ, so each column ℓ tracks
the moment set generated by the ℓ-th unit missing-moment vector.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from gmpy2 import mpfr

from . import mpnum


class RecurrenceBreakdown(ArithmeticError):
    """A division coefficient in the lattice sweep vanished."""

    def __init__(self, m: int, n: int):
        super().__init__(f"zero pivot coefficient at lattice point ({m}, {n})")
        self.m = m
        self.n = n


class StencilResidualError(ArithmeticError):
    """The generated 2-D table failed its post-hoc residual certification."""

    def __init__(self, residual, bound):
        super().__init__(
            f"stencil residual {residual} exceeds certification bound {bound}; "
            "raise the working precision"
        )
        self.residual = residual
        self.bound = bound


def _poly_eval(coeffs, x):
    """Evaluate a polynomial given ascending coefficients."""
    acc = mpfr(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        acc = acc * x + mpfr(c)
    return acc


def _poly_derivative(coeffs):
    """Ascending coefficients of the derivative polynomial."""
    if len(coeffs) == 1:
        return (0,)
    return tuple(j * c for j, c in enumerate(coeffs) if j >= 1)


@dataclass(frozen=True)
class Recurrence1D:
    """One-dimensional moment step rule μ(p+1) = Σ_k a_k(p, E)·μ(p−k).

    ``terms`` maps each lag k to a coefficient table ``c`` where ``c[i][j]``
    multiplies p^i·E^j, i.e. a_k(p, E) = Σ_ij c[i][j]·p^i·E^j.  Entries are
    exact integers or decimal strings, so the step rule is representable
    without rounding at any working precision.  The rule applies for every
    p ≥ missing_order; a lag reaching below index 0 must carry a vanishing
    coefficient there.
    """

    missing_order: int
    terms: tuple  # terms[k] = ((c00, c01, ...), (c10, ...), ...)
    description: str = ""

    def __post_init__(self):
        if self.missing_order < 0:
            raise ValueError("missing_order must be ≥ 0")
        if not self.terms:
            raise ValueError("at least one lag term is required")

    @property
    def depth(self) -> int:
        """Largest lag k appearing in the step rule."""
        return len(self.terms) - 1

    def coefficient_poly(self, k: int, p: int) -> tuple:
        """Ascending E-polynomial coefficients of a_k(p, E) at integer p."""
        table = self.terms[k]
        width = max(len(row) for row in table)
        out = [mpfr(0)] * width
        pw = 1
        for row in table:
            for j, c in enumerate(row):
                if c:
                    out[j] += mpfr(c) * pw
            pw *= p
        return tuple(out)

    @staticmethod
    def harmonic() -> "Recurrence1D":
        """Even-parity harmonic oscillator: μ(p+1) = E·μ(p) + 2p(2p−1)·μ(p−1),
        a single missing moment μ(0)."""
        return Recurrence1D(
            missing_order=0,
            terms=(
                ((0, 1),),  # lag 0: E
                ((0,), (-2,), (4,)),  # lag 1: 4p² − 2p
            ),
            description="harmonic oscillator, even parity",
        )


@dataclass(frozen=True)
class QzmSystem:
    """Hydrogenic atom in a uniform magnetic field (zero angular momentum,
    even parity): field strength B, nuclear charge Z, and the frozen
    binding-energy parameter eps0 entering the reference weight."""

    B: mpfr
    Z: mpfr = None
    eps0: mpfr = None

    def __post_init__(self):
        object.__setattr__(self, "B", mpfr(self.B))
        object.__setattr__(self, "Z", mpfr(1 if self.Z is None else self.Z))
        object.__setattr__(self, "eps0", mpfr(1 if self.eps0 is None else self.eps0))
        if not self.B > 0:
            raise ValueError("B must be > 0")
        if not self.Z > 0:
            raise ValueError("Z must be > 0")
        if not self.eps0 > 0:
            raise ValueError("eps0 must be > 0")


def antidiagonal_order(m_s: int) -> list:
    """Monomial pairs (m, n) with m+n ≤ 2·m_s+1, ordered by antidiagonal
    d = m+n ascending and by descending m within each antidiagonal.  The
    length is (m_s+1)(2·m_s+3)."""
    if m_s < 0:
        raise ValueError("m_s must be ≥ 0")
    out = []
    for d in range(2 * m_s + 2):
        for m in range(d, -1, -1):
            out.append((m, d - m))
    return out


@dataclass
class TransferTable:
    """Energy-dependent linear map from missing moments to all moments.

    For ``kind == "1d"`` the entries are indexed by the moment order p;
    for ``kind == "2d"`` by lattice pairs (m, n) with m+n ≤ 2·order+1,
    of which only m ≥ n is stored (reflection symmetry holds exactly).
    ``d_entries`` is the ∂/∂(energy) companion of identical shape, filled
    by :func:`build_derivative`.  ``residual`` records the certified
    worst-case relative stencil defect of a 2-D build.
    """

    kind: str
    order: int
    energy: mpfr
    entries: object
    d_entries: object = None
    residual: object = None
    _source: object = field(default=None, repr=False)

    def value(self, index, ell: int):
        """M(index, ℓ): ``index`` is p (1-D) or an (m, n) pair (2-D)."""
        return self._pick(self.entries, index, ell)

    def d_value(self, index, ell: int):
        """∂M(index, ℓ)/∂energy; requires a derivative-filled table."""
        if self.d_entries is None:
            raise ValueError("table has no derivative entries; use build_derivative")
        return self._pick(self.d_entries, index, ell)

    def _pick(self, store, index, ell: int):
        if self.kind == "1d":
            return store[index][ell]
        m, n = index
        if m < n:
            m, n = n, m
        return store[(m, n)][ell]

    @property
    def has_derivative(self) -> bool:
        return self.d_entries is not None

    def indices(self):
        """All covered indices, in natural order."""
        if self.kind == "1d":
            return range(len(self.entries))
        return antidiagonal_order(self.order)


def build_1d(
    rec: Recurrence1D, energy, p_max: int, *, derivative: bool = False
) -> TransferTable:
    """Generate M(p, ℓ) for 0 ≤ p ≤ p_max from the step rule, seeded with the
    Kronecker block on the missing-moment rows p ≤ missing_order."""
    m_s = rec.missing_order
    if p_max < m_s:
        raise ValueError(f"p_max must be ≥ missing order {m_s}")
    energy = mpfr(energy)
    k_len = m_s + 1
    zero = mpfr(0)
    one = mpfr(1)
    rows = [[one if p == ell else zero for ell in range(k_len)] for p in range(m_s + 1)]
    d_rows = [[zero] * k_len for _ in range(m_s + 1)] if derivative else None

    for p in range(m_s, p_max):
        coeffs = []
        for k in range(rec.depth + 1):
            if p - k < 0:
                poly = rec.coefficient_poly(k, p)
                if any(c != 0 for c in poly):
                    raise ValueError(
                        f"step rule reaches index {p - k} with nonzero coefficient"
                    )
                continue
            poly = rec.coefficient_poly(k, p)
            a = _poly_eval(poly, energy)
            da = _poly_eval(_poly_derivative(poly), energy) if derivative else None
            coeffs.append((k, a, da))
        new = [zero] * k_len
        for k, a, _ in coeffs:
            src = rows[p - k]
            for ell in range(k_len):
                new[ell] += a * src[ell]
        rows.append(new)
        if derivative:
            d_new = [zero] * k_len
            for k, a, da in coeffs:
                src = rows[p - k]
                d_src = d_rows[p - k]
                for ell in range(k_len):
                    d_new[ell] += da * src[ell] + a * d_src[ell]
            d_rows.append(d_new)

    return TransferTable(
        kind="1d",
        order=m_s,
        energy=energy,
        entries=rows,
        d_entries=d_rows,
        residual=None,
        _source=("1d", rec, p_max),
    )


def build_qzm(
    system: QzmSystem, eps, m_s: int, *, derivative: bool = False
) -> TransferTable:
    """Generate M(m, n, ℓ) on the lattice triangle m+n ≤ 2·m_s+1.

    The diagonal points (ℓ, ℓ), ℓ ≤ m_s carry the Kronecker seeds.  The
    five-point lattice relation centered at (m, n) with m ≥ n determines the
    single unknown on the next antidiagonal; at a diagonal center the two
    next-antidiagonal unknowns coincide by reflection symmetry.  After the
    sweep every interior point is re-checked against the relation and the
    worst relative defect must stay below 10^(8−digits), otherwise
    :class:`StencilResidualError` is raised.
    """
    if m_s < 0:
        raise ValueError("m_s must be ≥ 0")
    eps = mpfr(eps)
    if not eps > 0:
        raise ValueError("eps must be > 0")
    B = system.B
    Z = system.Z
    k_len = m_s + 1
    zero = mpfr(0)
    one = mpfr(1)
    half = mpfr(1) / 2

    entries = {}
    d_entries = {} if derivative else None
    for ell in range(k_len):
        entries[(ell, ell)] = [one if lp == ell else zero for lp in range(k_len)]
        if derivative:
            d_entries[(ell, ell)] = [zero] * k_len

    def get(store, m, n):
        if m < n:
            m, n = n, m
        return store[(m, n)]

    for d in range(2 * m_s + 1):
        for m in range((d + 1) // 2, d + 1):
            n = d - m
            cm = half * (B * m + eps)
            cn = half * (B * n + eps)
            divisor = cm + cn if m == n else cn
            if not divisor > 0:
                raise RecurrenceBreakdown(m, n)
            center = get(entries, m, n)
            west = get(entries, m - 1, n) if m >= 1 else None
            south = get(entries, m, n - 1) if n >= 1 else None
            north = get(entries, m, n + 1) if m != n else None
            new = [zero] * k_len
            for ell in range(k_len):
                acc = Z * center[ell]
                if west is not None:
                    acc += (m * m) * west[ell]
                if south is not None:
                    acc += (n * n) * south[ell]
                if north is not None:
                    acc -= cm * north[ell]
                new[ell] = acc / divisor
            entries[(m + 1, n)] = new
            if derivative:
                d_center = get(d_entries, m, n)
                d_west = get(d_entries, m - 1, n) if m >= 1 else None
                d_south = get(d_entries, m, n - 1) if n >= 1 else None
                d_north = get(d_entries, m, n + 1) if m != n else None
                north_val = get(entries, m, n + 1)
                east_val = entries[(m + 1, n)]
                d_new = [zero] * k_len
                for ell in range(k_len):
                    acc = Z * d_center[ell]
                    if d_west is not None:
                        acc += (m * m) * d_west[ell]
                    if d_south is not None:
                        acc += (n * n) * d_south[ell]
                    if d_north is not None:
                        acc -= cm * d_north[ell]
                    # ∂ of the two ε-dependent coefficients contributes
                    # −½·M(m, n+1) − ½·M(m+1, n); with reflection the two
                    # moments coincide on the diagonal.
                    acc -= half * north_val[ell]
                    acc -= half * east_val[ell]
                    d_new[ell] = acc / divisor
                d_entries[(m + 1, n)] = d_new

    table = TransferTable(
        kind="2d",
        order=m_s,
        energy=eps,
        entries=entries,
        d_entries=d_entries,
        residual=None,
        _source=("2d", system, m_s),
    )
    table.residual = _certify_stencil(system, eps, m_s, table)
    return table


def _certify_stencil(system: QzmSystem, eps, m_s: int, table: TransferTable):
    """Re-evaluate the lattice relation at every interior point; return the
    worst relative defect or raise :class:`StencilResidualError`."""
    B = system.B
    Z = system.Z
    half = mpfr(1) / 2
    worst = mpfr(0)
    for d in range(2 * m_s + 1):
        for m in range(d + 1):
            n = d - m
            cm = half * (B * m + eps)
            cn = half * (B * n + eps)
            for ell in range(m_s + 1):
                term_c = Z * table.value((m, n), ell)
                term_n = cm * table.value((m, n + 1), ell)
                term_e = cn * table.value((m + 1, n), ell)
                r = term_c - term_n - term_e
                mag = abs(term_c) + abs(term_n) + abs(term_e)
                if m >= 1:
                    t = (m * m) * table.value((m - 1, n), ell)
                    r += t
                    mag += abs(t)
                if n >= 1:
                    t = (n * n) * table.value((m, n - 1), ell)
                    r += t
                    mag += abs(t)
                r = abs(r)
                if r > worst * mag:
                    if mag > 0:
                        rel = r / mag
                        if rel > worst:
                            worst = rel
                    elif r > 0:
                        worst = mpfr("inf")
    bound = mpfr(10) ** (8 - mpnum.get_precision())
    if not worst <= bound:
        raise StencilResidualError(worst, bound)
    return worst


def build_derivative(table: TransferTable) -> TransferTable:
    """Return a copy of ``table`` with the closed-form energy-derivative
    entries filled (missing-moment rows differentiate to zero)."""
    if table._source is None:
        raise ValueError("table carries no provenance; rebuild it with the module builders")
    kind = table._source[0]
    if kind == "1d":
        _, rec, p_max = table._source
        return build_1d(rec, table.energy, p_max, derivative=True)
    _, system, m_s = table._source
    return build_qzm(system, table.energy, m_s, derivative=True)
