"""Orthonormal-polynomial projection of power moments, with energy bounding.

The central objects are *energy functions* built from three ingredients: a
moment recurrence (:mod:`.mer`), the power moments of a reference weight
(:mod:`.refweight`), and an orthonormal polynomial basis generated from those
moments by Cholesky factorization.  Projecting the recurrence-generated
moments onto the basis yields coefficient vectors Λ^{(i)}(E); the partial sum
of their squared norms is a positive quadratic form in the missing moments
that diverges with order everywhere except at physical eigenenergies.

Two normalizations give computable energy functions:

* 1-D: minimize over unit missing-moment vectors — the smallest eigenvalue
  λ_I(E) of 𝒫_I(E) = Σ_i Λ^{(i)}Λ^{(i)ᵀ} (:class:`Lambda1D`);
* multi-D: minimize at fixed first moment μ₀ = 1 — the Schur-complement
  value L(ε) = C − ⟨B|A⁻¹|B⟩ of the same matrix (:class:`LambdaMulti`).

Local minima of these functions converge to eigenvalues from below as the
order grows; any crude upper bound B_U on the limiting minimum converts each
order's function into a rigorous two-sided energy bracket, extracted here by
derivative-sign bisection and level crossings.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

from gmpy2 import mpfr

from . import kernels, mpnum
from .mer import (
    QzmSystem,
    Recurrence1D,
    TransferTable,
    antidiagonal_order,
    build_1d,
    build_qzm,
)
from .refweight import QzmWeightMoments, WeightMoments1D, qzm_weight_moments

log = logging.getLogger(__name__)

#: Relative domain margin above the frozen weight energy ε₀: the moment
#: recurrence only matches the weight's asymptotics for ε strictly above ε₀.
QZM_DOMAIN_MARGIN = mpfr("1e-6")


class CoverageMismatch(ValueError):
    """The basis requires a moment outside the transfer table's covered set."""

    def __init__(self, required, available):
        super().__init__(
            f"basis requires moment index {required} but the transfer table covers "
            f"only {available}"
        )
        self.required = required
        self.available = available


class NoSignChange(ValueError):
    """The derivative does not bracket a minimum on the given interval."""

    def __init__(self, bracket, d_left, d_right):
        super().__init__(
            f"derivative has signs ({'-' if d_left < 0 else '+'}, "
            f"{'-' if d_right < 0 else '+'}) on {bracket}; re-bracket with a scan"
        )
        self.bracket = bracket


class NotConverged(ArithmeticError):
    """The minimum-value sequence has not settled; supply a manual bound."""

    def __init__(self, sequence, theta):
        super().__init__(
            "successive relative difference "
            f"{(sequence[-1] - sequence[-2]) / abs(sequence[-1])} still exceeds {theta}; "
            "extend the order sequence or supply an upper bound manually"
        )
        self.sequence = list(sequence)


class NoUpperCrossing(ArithmeticError):
    """The energy function never exceeded the upper bound on one side."""

    def __init__(self, side: str):
        super().__init__(
            f"no crossing above the bound on the {side} side within the window; "
            "widen the window or lower the bound"
        )
        self.side = side


class PositivityLost(ArithmeticError):
    """A value that is positive in exact arithmetic came out non-positive;
    the working precision is exhausted for this order."""


class NormalizationMode(enum.Enum):
    """Missing-moment normalization fixing the scale of the quadratic form."""

    #: Minimize over Σ_ℓ μ_ℓ² = 1 — eigenvalue path, one-dimensional systems.
    UnitMissingMomentVector = "unit-missing-moment-vector"
    #: Minimize at μ₀ = 1 — constrained path, multi-dimensional systems.
    FirstMomentOne = "first-moment-one"


# ---------------------------------------------------------------------------
# Basis


@dataclass(frozen=True)
class OrthonormalBasis:
    """Coefficients Xi(i, j) of polynomials P_i = Σ_{j≤i} Xi(i,j)·(monomial j),
    orthonormal against the weight-moment matrix.  Monomial j is x^j when
    ``ordering`` is None, else the pair ``ordering[j]``."""

    xi: mpnum.LowerTriangular
    ordering: tuple = None

    @property
    def size(self) -> int:
        return self.xi.dim

    def coefficient(self, i: int, j: int):
        return self.xi.get(i, j)

    def rows(self) -> list:
        return self.xi.lower_rows()

    def gram_residual(self, weights) -> mpfr:
        """Worst deviation of ΞᵀWΞ from the identity (orthonormality audit)."""
        w = _moment_matrix(weights, self.ordering, self.size - 1)
        rows = self.rows()
        worst = mpfr(0)
        for i in range(self.size):
            wxi = [
                sum(w.get(k, j) * rows[i][j] for j in range(i + 1))
                for k in range(self.size)
            ]
            for j in range(i + 1):
                g = sum(rows[j][k] * wxi[k] for k in range(j + 1))
                defect = abs(g - 1) if i == j else abs(g)
                if defect > worst:
                    worst = defect
        return worst


def _moment_matrix(weights, ordering, i_max: int) -> mpnum.SymMatrix:
    if ordering is None:
        if not isinstance(weights, WeightMoments1D):
            raise TypeError("1-D basis requires WeightMoments1D")
        if weights.p_max < 2 * i_max:
            raise ValueError(
                f"weight moments reach p={weights.p_max}, basis needs p={2 * i_max}"
            )
        return mpnum.SymMatrix.from_function(i_max + 1, lambda i, j: weights.w(i + j))
    if not isinstance(weights, QzmWeightMoments):
        raise TypeError("ordered 2-D basis requires QzmWeightMoments")
    pairs = list(ordering)
    if i_max + 1 > len(pairs):
        raise ValueError(f"ordering supplies {len(pairs)} monomials, basis needs {i_max + 1}")
    need = max(p[0] + p[1] for p in pairs[: i_max + 1]) * 2
    if weights.M < need or weights.N < need:
        raise ValueError(
            f"weight-moment grid reaches ({weights.M},{weights.N}), basis needs {need}"
        )

    def entry(i, j):
        mi, ni = pairs[i]
        mj, nj = pairs[j]
        return weights.w(mi + mj, ni + nj)

    return mpnum.SymMatrix.from_function(i_max + 1, entry)


def build_basis(weights, ordering, i_max: int) -> OrthonormalBasis:
    """Orthonormal basis through degree/order ``i_max``: Cholesky-factor the
    weight-moment matrix W = CCᵀ and invert, Ξ = C⁻¹, so each polynomial's
    coefficients occupy one lower-triangular row."""
    if i_max < 0:
        raise ValueError("i_max must be ≥ 0")
    w = _moment_matrix(weights, ordering, i_max)
    c = mpnum.cholesky(w)
    xi_rows = kernels.invert_lower(c.lower_rows())
    return OrthonormalBasis(
        xi=mpnum.LowerTriangular(xi_rows),
        ordering=tuple(ordering) if ordering is not None else None,
    )


# ---------------------------------------------------------------------------
# Λ tables


@dataclass(frozen=True)
class LambdaTable:
    """Projection coefficients Λ(i, ℓ) = Σ_j Xi(i,j)·M(index_j, ℓ) and the
    energy-derivative companion dΛ (None when the transfer table carried no
    derivative entries)."""

    rows: tuple  # rows[i][ell]
    d_rows: tuple = None

    @property
    def size(self) -> int:
        return len(self.rows)

    @property
    def width(self) -> int:
        return len(self.rows[0])

    def value(self, i: int, ell: int):
        return self.rows[i][ell]

    def d_value(self, i: int, ell: int):
        if self.d_rows is None:
            raise ValueError("table built without derivative entries")
        return self.d_rows[i][ell]


def lambda_table(basis: OrthonormalBasis, transfer: TransferTable) -> LambdaTable:
    """Project the transfer table onto the basis: Λ = Ξ·M row by row."""
    if basis.ordering is None:
        if transfer.kind != "1d":
            raise CoverageMismatch("1-D moment orders", f"a {transfer.kind} table")
        available = len(transfer.entries) - 1
        if basis.size - 1 > available:
            raise CoverageMismatch(basis.size - 1, f"p ≤ {available}")
        indices = list(range(basis.size))
    else:
        if transfer.kind != "2d":
            raise CoverageMismatch("ordered 2-D monomials", f"a {transfer.kind} table")
        top = 2 * transfer.order + 1
        indices = list(basis.ordering[: basis.size])
        for pair in indices:
            if pair[0] + pair[1] > top:
                raise CoverageMismatch(pair, f"m+n ≤ {top}")
    width = (transfer.order + 1) if transfer.kind != "1d" else len(transfer.entries[0])
    m_rows = [[transfer.value(idx, ell) for ell in range(width)] for idx in indices]
    lam = kernels.lower_times_rect(basis.rows(), m_rows, width)
    d_lam = None
    if transfer.has_derivative:
        dm_rows = [[transfer.d_value(idx, ell) for ell in range(width)] for idx in indices]
        d_lam = kernels.lower_times_rect(basis.rows(), dm_rows, width)
    return LambdaTable(
        rows=tuple(tuple(r) for r in lam),
        d_rows=tuple(tuple(r) for r in d_lam) if d_lam is not None else None,
    )


# ---------------------------------------------------------------------------
# Quadratic forms and energy evaluations


@dataclass(frozen=True)
class QuadraticFormBundle:
    """Blocks of D(E) = Σ_i Λ^{(i)}Λ^{(i)ᵀ} partitioned by the first moment:
    scalar C = D₀₀, vector B = D_{k0}, matrix A = D_{k≥1,k′≥1}, plus the
    energy-derivative companions."""

    c: mpfr
    b: tuple
    a: mpnum.SymMatrix
    dc: mpfr = None
    db: tuple = None
    da: mpnum.SymMatrix = None

    @property
    def free_dim(self) -> int:
        return len(self.b)

    def full_rows(self) -> list:
        """Reassemble the full (m_s+1)×(m_s+1) matrix D."""
        n = self.free_dim + 1
        rows = [[None] * n for _ in range(n)]
        rows[0][0] = self.c
        for k in range(1, n):
            rows[k][0] = rows[0][k] = self.b[k - 1]
            for j in range(1, k + 1):
                rows[k][j] = rows[j][k] = self.a.get(k - 1, j - 1)
        return rows

    def probe(self, u) -> mpfr:
        """⟨μ|D|μ⟩ for μ = (1, u₁, …, u_{m_s}) — always ≥ the constrained
        minimum, which makes random probes a certificate of global optimality."""
        if len(u) != self.free_dim:
            raise mpnum.DimensionMismatch(f"probe needs {self.free_dim} components")
        total = self.c
        for k, uk in enumerate(u):
            total += 2 * self.b[k] * uk
            for j, uj in enumerate(u):
                total += uk * self.a.get(k, j) * uj
        return total


@dataclass(frozen=True)
class EnergyEvaluation:
    """One evaluation of an energy function: the positive value S(E), its
    closed-form derivative, and the minimizing direction (unit eigenvector in
    1-D, constrained minimizer u_opt in multi-D)."""

    energy: mpfr
    value: mpfr
    derivative: mpfr
    vector: tuple = None
    u_opt: tuple = None
    bundle: QuadraticFormBundle = None
    residual: mpfr = None
    degenerate: bool = False


def _assemble(lam: LambdaTable, with_derivative: bool):
    width = lam.width
    full = kernels.gram([list(r) for r in lam.rows], width)
    d_full = None
    if with_derivative:
        d_full = kernels.gram_sym(
            [list(r) for r in lam.rows], [list(r) for r in lam.d_rows], width
        )
    return full, d_full


def _sym_from_full(full_rows) -> mpnum.SymMatrix:
    lower = [row[: i + 1] for i, row in enumerate(full_rows)]
    return mpnum.SymMatrix.from_lower_rows(lower)


class Lambda1D:
    """λ_I(E): smallest eigenvalue of 𝒫_I(E), the one-dimensional energy
    function under the unit missing-moment-vector normalization."""

    def __init__(
        self,
        rec: Recurrence1D,
        weights: WeightMoments1D,
        order: int,
        normalization: NormalizationMode = NormalizationMode.UnitMissingMomentVector,
    ):
        if normalization is not NormalizationMode.UnitMissingMomentVector:
            raise ValueError(
                "the one-dimensional eigenvalue path minimizes over unit "
                "missing-moment vectors only"
            )
        if order < rec.missing_order:
            raise ValueError(
                f"order must be ≥ missing order {rec.missing_order} for a "
                "positive-definite partial sum"
            )
        self.rec = rec
        self.weights = weights
        self.order = order
        self.domain_floor = None
        self.basis = build_basis(weights, None, order)

    def projection_row(self, energy, i: int) -> tuple:
        """Λ(i, ·)(E) — the projection coefficients of one basis polynomial;
        their zeros in E are the order-i quantization diagnostic."""
        transfer = build_1d(self.rec, energy, self.order)
        lam = lambda_table(self.basis, transfer)
        return lam.rows[i]

    def evaluate(self, energy, need_derivative: bool = True) -> EnergyEvaluation:
        energy = mpfr(energy)
        transfer = build_1d(self.rec, energy, self.order, derivative=need_derivative)
        lam = lambda_table(self.basis, transfer)
        full, d_full = _assemble(lam, need_derivative)
        p = _sym_from_full(full)
        value, vector = mpnum.smallest_eigenvalue(p)
        if not value > 0:
            raise PositivityLost(
                f"λ_{self.order}({energy}) = {value} ≤ 0; raise the working precision"
            )
        derivative = None
        degenerate = False
        if need_derivative:
            dp = _sym_from_full(d_full)
            if p.dim > 1 and self._near_degenerate(p, value):
                degenerate = True
                log.warning(
                    "near-degenerate smallest eigenvalues at E=%s (order %d); "
                    "falling back to finite differences",
                    energy,
                    self.order,
                )
                derivative = self._fd_derivative(energy)
            else:
                num = mpfr(0)
                den = mpfr(0)
                for i, vi in enumerate(vector):
                    den += vi * vi
                    for j, vj in enumerate(vector):
                        num += vi * dp.get(i, j) * vj
                derivative = num / den
        return EnergyEvaluation(
            energy=energy,
            value=value,
            derivative=derivative,
            vector=tuple(vector),
            degenerate=degenerate,
        )

    def _near_degenerate(self, p: mpnum.SymMatrix, lam) -> bool:
        digits = mpnum.get_precision()
        threshold = max(p.inf_norm(), mpfr(1)) * mpfr(10) ** (-(digits // 2))
        count = mpnum.eigenvalues_below(p, lam + threshold)
        return count is None or count >= 2

    def _fd_derivative(self, energy) -> mpfr:
        digits = mpnum.get_precision()
        h = mpfr(10) ** (-(digits // 3))
        hi = self.evaluate(energy + h, need_derivative=False).value
        lo = self.evaluate(energy - h, need_derivative=False).value
        return (hi - lo) / (2 * h)


class LambdaMulti:
    """L(ε): the constrained minimum of ⟨μ|D(ε)|μ⟩ over μ₀ = 1, the
    multi-dimensional energy function of the planar magnetic-field problem."""

    def __init__(
        self,
        system: QzmSystem,
        m_s: int,
        weights: QzmWeightMoments = None,
        normalization: NormalizationMode = NormalizationMode.FirstMomentOne,
    ):
        if normalization is not NormalizationMode.FirstMomentOne:
            raise ValueError(
                "the multi-dimensional path minimizes at fixed first moment "
                "μ₀ = 1; the unit-vector normalization has no closed-form "
                "minimum here"
            )
        if m_s < 0:
            raise ValueError("m_s must be ≥ 0")
        self.system = system
        self.m_s = m_s
        self.order = m_s
        self.weights = weights if weights is not None else qzm_weight_moments(system, m_s)
        self.domain_floor = system.eps0 * (1 + QZM_DOMAIN_MARGIN)
        ordering = antidiagonal_order(m_s)
        i_max = (m_s + 1) * (2 * m_s + 3) - 1
        self.basis = build_basis(self.weights, ordering, i_max)

    def evaluate(self, energy, need_derivative: bool = True) -> EnergyEvaluation:
        eps = mpfr(energy)
        if not eps > self.system.eps0:
            raise ValueError(
                f"ε = {eps} must exceed the frozen weight energy ε₀ = {self.system.eps0}"
            )
        transfer = build_qzm(self.system, eps, self.m_s, derivative=need_derivative)
        lam = lambda_table(self.basis, transfer)
        full, d_full = _assemble(lam, need_derivative)
        bundle = self._bundle(full, d_full)
        if bundle.free_dim == 0:
            value = bundle.c
            u_opt = ()
            derivative = bundle.dc if need_derivative else None
        else:
            x = mpnum.spd_solve(bundle.a, list(bundle.b))
            u_opt = tuple(-xk for xk in x)
            value = bundle.c + sum(bk * uk for bk, uk in zip(bundle.b, u_opt))
            derivative = None
            if need_derivative:
                # Envelope theorem: at the minimizer the u-gradient vanishes,
                # so dL/dε is the partial derivative at fixed u_opt.
                derivative = bundle.dc
                for k, uk in enumerate(u_opt):
                    derivative += 2 * bundle.db[k] * uk
                    for j, uj in enumerate(u_opt):
                        derivative += uk * bundle.da.get(k, j) * uj
        if not value > 0:
            raise PositivityLost(
                f"L(ε={eps}) = {value} ≤ 0 at m_s={self.m_s}; raise the working precision"
            )
        return EnergyEvaluation(
            energy=eps,
            value=value,
            derivative=derivative,
            u_opt=u_opt,
            bundle=bundle,
            residual=transfer.residual,
        )

    def _bundle(self, full, d_full) -> QuadraticFormBundle:
        n = len(full)
        # With no free missing moments (m_s = 0) the form is the scalar C
        # alone and carries no A block.
        a = None
        if n > 1:
            a = mpnum.SymMatrix.from_lower_rows(
                [[full[k][j] for j in range(1, k + 1)] for k in range(1, n)]
            )
        bundle = dict(
            c=full[0][0],
            b=tuple(full[k][0] for k in range(1, n)),
            a=a,
        )
        if d_full is not None:
            bundle.update(
                dc=d_full[0][0],
                db=tuple(d_full[k][0] for k in range(1, n)),
                da=mpnum.SymMatrix.from_lower_rows(
                    [[d_full[k][j] for j in range(1, k + 1)] for k in range(1, n)]
                )
                if n > 1
                else None,
            )
        return QuadraticFormBundle(**bundle)


def lambda_I(rec: Recurrence1D, weights: WeightMoments1D, order: int, energy):
    """One-shot λ_I(E) → (value, eigenvector, derivative)."""
    ev = Lambda1D(rec, weights, order).evaluate(energy)
    return ev.value, ev.vector, ev.derivative


def L_multi(system: QzmSystem, m_s: int, eps):
    """One-shot L(ε) → (value, u_opt, derivative)."""
    ev = LambdaMulti(system, m_s).evaluate(eps)
    return ev.value, ev.u_opt, ev.derivative


# ---------------------------------------------------------------------------
# Search: minima, upper-bound estimate, bound extraction, scans


@dataclass(frozen=True)
class Minimum:
    """A bisection-localized local minimum of an energy function."""

    energy: mpfr
    value: mpfr
    width: mpfr
    evaluation: EnergyEvaluation


def find_minimum(fn, bracket, tol) -> Minimum:
    """Bisect on the sign of the closed-form derivative until the bracket is
    narrower than ``tol``; a derivative that is exactly zero at any probe is
    treated as converged (plateau rule — shared minima produce exact zeros)."""
    e1, e2 = (mpfr(bracket[0]), mpfr(bracket[1]))
    if not e1 < e2:
        raise ValueError("bracket must satisfy e1 < e2")
    tol = mpfr(tol)
    if not tol > 0:
        raise ValueError("tol must be > 0")
    left = fn.evaluate(e1)
    if left.derivative == 0:
        return Minimum(e1, left.value, mpfr(0), left)
    right = fn.evaluate(e2)
    if right.derivative == 0:
        return Minimum(e2, right.value, mpfr(0), right)
    if not (left.derivative < 0 and right.derivative > 0):
        raise NoSignChange((e1, e2), left.derivative, right.derivative)
    while e2 - e1 >= tol:
        mid = (e1 + e2) / 2
        if not e1 < mid < e2:  # precision floor: the bracket cannot shrink further
            break
        ev = fn.evaluate(mid)
        if ev.derivative == 0:
            return Minimum(mid, ev.value, e2 - e1, ev)
        if ev.derivative < 0:
            e1 = mid
        else:
            e2 = mid
    mid = (e1 + e2) / 2
    ev = fn.evaluate(mid)
    return Minimum(mid, ev.value, e2 - e1, ev)


@dataclass(frozen=True)
class UpperBoundPolicy:
    """Convergence test and safety margin for the empirical upper bound."""

    theta: mpfr = mpfr("1e-8")
    kappa: int = 10
    floor_digits: int = 15


def estimate_BU(sequence, policy: UpperBoundPolicy = None) -> mpfr:
    """Empirical upper bound on the limit of an increasing minimum-value
    sequence: once the last relative step falls below θ, pad the last value by
    κ·max(last step, 10^{−floor_digits}·|last value|)."""
    policy = policy or UpperBoundPolicy()
    seq = [mpfr(s) for s in sequence]
    if len(seq) < 3:
        raise ValueError("need at least 3 sequence entries")
    for a, b in zip(seq, seq[1:]):
        if b < a:
            raise ValueError("sequence must be non-decreasing")
    last_step = seq[-1] - seq[-2]
    if not last_step / abs(seq[-1]) < policy.theta:
        raise NotConverged(seq, policy.theta)
    pad = policy.kappa * max(last_step, mpfr(10) ** (-policy.floor_digits) * abs(seq[-1]))
    return seq[-1] + pad


def extract_bounds(fn, e_min, b_u, *, window, tol):
    """Locate the two crossings of S(E) = B_U flanking a minimum.

    Marches geometrically outward from ``e_min`` (initial step 16·tol,
    doubling, capped at a 1/64 fraction of the window) until the function
    exceeds ``b_u``, then bisects each crossing to width ``tol``.  Returns
    (E_L, E_U) with E_L < e_min < E_U."""
    e_min = mpfr(e_min)
    b_u = mpfr(b_u)
    tol = mpfr(tol)
    lo, hi = (mpfr(window[0]), mpfr(window[1]))
    if not lo <= e_min <= hi:
        raise ValueError("e_min must lie inside the window")
    center = fn.evaluate(e_min, need_derivative=False)
    if not center.value < b_u:
        raise ValueError(
            f"function value {center.value} at the minimum already exceeds the bound {b_u}"
        )
    cap = (hi - lo) / 64
    floor = getattr(fn, "domain_floor", None)
    if floor is not None and floor > lo:
        lo = floor

    def crossing(direction: str):
        sign = -1 if direction == "left" else 1
        limit = lo if direction == "left" else hi
        increment = 16 * tol
        offset = increment
        inner = e_min
        while True:
            probe = e_min + sign * offset
            clipped = False
            if (direction == "left" and probe <= limit) or (
                direction == "right" and probe >= limit
            ):
                probe = limit
                clipped = True
            value = fn.evaluate(probe, need_derivative=False).value
            if value > b_u:
                outer = probe
                break
            inner = probe
            if clipped:
                raise NoUpperCrossing(direction)
            increment = min(increment * 2, cap) if cap > 0 else increment * 2
            offset += increment
        while abs(outer - inner) >= tol:
            mid = (outer + inner) / 2
            if not min(inner, outer) < mid < max(inner, outer):
                break
            if fn.evaluate(mid, need_derivative=False).value > b_u:
                outer = mid
            else:
                inner = mid
        return (outer + inner) / 2

    e_l = crossing("left")
    e_u = crossing("right")
    return e_l, e_u


def scan(fn, grid) -> list:
    """Sample S(E) on a strictly increasing grid inside the function's
    domain; returns (E, value) pairs."""
    pts = [mpfr(e) for e in grid]
    if not pts:
        raise ValueError("grid must be non-empty")
    for a, b in zip(pts, pts[1:]):
        if not a < b:
            raise ValueError("grid must be strictly increasing")
    floor = getattr(fn, "domain_floor", None)
    if floor is not None and pts[0] < floor:
        raise ValueError(
            f"grid point {pts[0]} lies below the domain floor {floor} "
            "(the moment recurrence requires ε above the frozen weight energy ε₀)"
        )
    return [(e, fn.evaluate(e, need_derivative=False).value) for e in pts]


# ---------------------------------------------------------------------------
# Reports


@dataclass
class OrderRecord:
    """Per-order outcome: the localized minimum, its bisection width, the
    extracted interval when available, and diagnostics."""

    order: int
    well: int
    e_min: mpfr
    s_min: mpfr
    width: mpfr
    e_l: mpfr = None
    e_u: mpfr = None
    b_u: mpfr = None
    residual: mpfr = None
    wall_time: float = None
    monotone: bool = None


@dataclass
class BoundReport:
    """All per-order records of a run plus the upper bound in effect."""

    records: list = field(default_factory=list)
    b_u: mpfr = None

    def sequence(self, well: int = 0) -> list:
        return [r.s_min for r in self.records if r.well == well]

    def flag_monotonicity(self) -> list:
        """Set each record's strict-increase flag against the previous order
        of the same well; returns the records that violate it."""
        violations = []
        previous = {}
        for rec in self.records:
            prev = previous.get(rec.well)
            if prev is None:
                rec.monotone = None
            else:
                rec.monotone = rec.s_min > prev.s_min
                if not rec.monotone:
                    violations.append(rec)
            previous[rec.well] = rec
        return violations

    def validate_intervals(self) -> None:
        for rec in self.records:
            if rec.e_l is not None and rec.e_u is not None and rec.e_l < rec.e_u:
                if not (rec.e_l <= rec.e_min <= rec.e_u):
                    raise ValueError(
                        f"order {rec.order}: interval [{rec.e_l}, {rec.e_u}] "
                        f"does not contain its own minimum {rec.e_min}"
                    )
