"""Acceptance gate: eight shipped criteria, one printed verdict line each.

Each test prints ``CRITERION n (<label>): PASS|FAIL`` before asserting, so a
full run always shows the verdict of every criterion.  Reference values are
high-accuracy published results for the two model families; ``matches_printed``
demands agreement within half a unit of the last printed decimal place.
"""

from __future__ import annotations

import random
import time

import pytest
from gmpy2 import mpfr

from oppqbm import mer, mpnum, oppq, refweight

from _oracles import agreeing_digits, from_mpmath, gamma_ratio_oracle, matches_printed, rel_err


# I -> (E_min, S_min at the minimum, E_L, E_U) for the first excited state of
# the harmonic oscillator on the half-line weight, with B_U = 3.6.
HARMONIC_TABLE = {
    6: ("4.53222", "3.20587", "4.07088", "5.00593"),
    7: ("4.73661", "3.37132", "4.48590", "5.00591"),
    8: ("4.86462", "3.47875", "4.73214", "5.00585"),
    9: ("4.93802", "3.54002", "4.87312", "5.00572"),
    10: ("4.97454", "3.56996", "4.94437", "5.00541"),
    11: ("4.99037", "3.58276", "4.97612", "5.00479"),
    12: ("4.99656", "3.58773", "4.98933", "5.00384"),
    13: ("4.99882", "3.58954", "4.99489", "5.00276"),
    14: ("4.99961", "3.59017", "4.99741", "5.00181"),
    20: ("4.9999996", "3.5904802", "4.99993", "5.00007"),
}

# m_s -> (ε_min, ℬ) for the planar B=2, Z=1, ε₀=1 ground state.
PLANAR_B2_TABLE = {
    10: ("1.02221390772094855", "1.1922435334360495594"),
    12: ("1.02221390766605681", "1.1922435334615863759"),
    14: ("1.02221390766515350", "1.1922435334620060902"),
}


def verdict(number: int, label: str, failures: list) -> None:
    status = "FAIL" if failures else "PASS"
    print(f"\nCRITERION {number} ({label}): {status}")
    for line in failures:
        print(f"    {line}")
    assert not failures, f"criterion {number} ({label}): {len(failures)} check(s) failed"


def locate_well(fn, lo, hi, tol, points: int = 16) -> oppq.Minimum:
    """Bracket the single derivative sign change on a coarse grid, then refine."""
    lo, hi = mpfr(lo), mpfr(hi)
    floor = getattr(fn, "domain_floor", None)
    if floor is not None and floor > lo:
        lo = floor
    grid = [lo + (hi - lo) * k / (points - 1) for k in range(points)]
    samples = [fn.evaluate(e) for e in grid]
    for k in range(points - 1):
        if samples[k].derivative < 0 and samples[k + 1].derivative > 0:
            return oppq.find_minimum(fn, (grid[k], grid[k + 1]), tol)
    raise oppq.NoSignChange((lo, hi))


def harmonic_function(order: int) -> oppq.Lambda1D:
    rec = mer.Recurrence1D.harmonic()
    return oppq.Lambda1D(rec, refweight.harmonic_weight_moments(2 * order), order)


# ---------------------------------------------------------------------------
# Criterion 1


def test_criterion_1_harmonic_reference_table():
    mpnum.set_precision(60)
    started = time.perf_counter()
    tol = mpfr(10) ** -12
    b_u = mpfr("3.6")
    window = (mpfr("3.2"), mpfr("6.8"))
    failures = []
    for order, (e_min_p, s_min_p, e_l_p, e_u_p) in HARMONIC_TABLE.items():
        fn = harmonic_function(order)
        minimum = locate_well(fn, window[0], window[1], tol)
        e_l, e_u = oppq.extract_bounds(fn, minimum.energy, b_u, window=window, tol=tol)
        for got, printed, column in (
            (minimum.energy, e_min_p, "E_min"),
            (minimum.value, s_min_p, "S_min"),
            (e_l, e_l_p, "E_L"),
            (e_u, e_u_p, "E_U"),
        ):
            if not matches_printed(got, printed):
                failures.append(
                    f"order {order} {column}: computed {mpnum.decimal_str(got, 12)} "
                    f"does not round to {printed}"
                )
    elapsed = time.perf_counter() - started
    if elapsed >= 60:
        failures.append(f"took {elapsed:.1f}s, expected under one minute")
    verdict(1, "harmonic oscillator reference table, ten orders, four columns", failures)


# ---------------------------------------------------------------------------
# Criterion 2


def test_criterion_2_harmonic_ground_state_shared_minimum():
    mpnum.set_precision(60)
    failures = []
    values = []
    for order in range(3, 13):
        weights = refweight.harmonic_weight_moments(2 * order)
        value, _, _ = oppq.lambda_I(mer.Recurrence1D.harmonic(), weights, order, mpfr(1))
        values.append(value)
        if not matches_printed(value, "0.398942"):
            failures.append(
                f"order {order}: λ(1) = {mpnum.decimal_str(value, 10)} "
                "does not round to 0.398942"
            )
        fn = harmonic_function(order)
        minimum = oppq.find_minimum(fn, ("0.9", "1.1"), mpfr(10) ** -12)
        if abs(minimum.energy - 1) > mpfr(10) ** -10:
            failures.append(
                f"order {order}: minimum at {mpnum.decimal_str(minimum.energy, 15)}, "
                "expected 1 ± 1e-10"
            )
    if max(values) - min(values) > mpfr(10) ** -50:
        failures.append("λ(1) is not identical across orders 3..12")
    verdict(2, "ground-state value 0.398942 shared by orders 3..12, minimum at E=1", failures)


# ---------------------------------------------------------------------------
# Criterion 3


def test_criterion_3_projection_polynomial_roots():
    mpnum.set_precision(60)
    fn = harmonic_function(6)

    def c6(energy):
        return fn.projection_row(energy, 6)[0]

    failures = []
    for root in (1, 5, 9, 13, 17, 21):
        lo, hi = mpfr(root) - mpfr("0.5"), mpfr(root) + mpfr("0.5")
        f_lo, f_hi = c6(lo), c6(hi)
        if f_lo == 0 or f_hi == 0 or (f_lo < 0) == (f_hi < 0):
            failures.append(f"no sign change of the order-6 coefficient around {root}")
            continue
        while hi - lo > mpfr(10) ** -21:
            mid = (lo + hi) / 2
            f_mid = c6(mid)
            if f_mid == 0:
                lo = hi = mid
            elif (f_mid < 0) == (f_lo < 0):
                lo, f_lo = mid, f_mid
            else:
                hi = mid
        found = (lo + hi) / 2
        if abs(found - root) > mpfr(10) ** -20:
            failures.append(
                f"zero near {root} located at {mpnum.decimal_str(found, 25)}, "
                "off by more than 1e-20"
            )
    verdict(3, "order-6 projection coefficient vanishes at 1, 5, 9, 13, 17, 21", failures)


# ---------------------------------------------------------------------------
# Criteria 4 and 5 share the planar B=2 minima at 120 digits.


@pytest.fixture(scope="module")
def planar_b2():
    mpnum.set_precision(120)
    result = {}
    for m_s in sorted(PLANAR_B2_TABLE):
        fn = oppq.LambdaMulti(mer.QzmSystem(B=2), m_s)
        result[m_s] = (fn, locate_well(fn, "1.002", "1.2", mpfr(10) ** -20, points=8))
    return result


def test_criterion_4_planar_b2_ground_state_block(planar_b2):
    mpnum.set_precision(120)
    failures = []
    for m_s, (printed_e, printed_b) in PLANAR_B2_TABLE.items():
        _, minimum = planar_b2[m_s]
        if not matches_printed(minimum.energy, printed_e):
            failures.append(
                f"m_s={m_s}: ε_min {mpnum.decimal_str(minimum.energy, 22)} "
                f"does not round to {printed_e}"
            )
        if not matches_printed(minimum.value, printed_b):
            failures.append(
                f"m_s={m_s}: value {mpnum.decimal_str(minimum.value, 24)} "
                f"does not round to {printed_b}"
            )
    verdict(4, "planar B=2 ground state at truncation orders 10, 12, 14", failures)


def test_criterion_5_planar_b2_bound_interval(planar_b2):
    mpnum.set_precision(120)
    fn, minimum = planar_b2[14]
    e_l, e_u = oppq.extract_bounds(
        fn,
        minimum.energy,
        mpfr("1.192243533462017"),
        window=(mpfr("1.002"), mpfr("1.2")),
        tol=mpfr(10) ** -20,
    )
    failures = []
    target = mpfr("1.022213907665129")
    if not e_l < target < e_u:
        failures.append(
            f"interval [{mpnum.decimal_str(e_l, 20)}, {mpnum.decimal_str(e_u, 20)}] "
            f"does not contain {target}"
        )
    width = e_u - e_l
    if not width < mpfr(10) ** -12:
        failures.append(f"width {mpnum.decimal_str(width, 4)} is not below 1e-12")
    verdict(5, "planar B=2 two-sided interval at order 14", failures)


# ---------------------------------------------------------------------------
# Criterion 6


def test_criterion_6_planar_weak_field_ground_state():
    mpnum.set_precision(120)
    fn = oppq.LambdaMulti(mer.QzmSystem(B="0.02", eps0="0.5"), 10)
    minimum = locate_well(fn, "0.502", "0.56", mpfr(10) ** -20, points=8)
    reference = "0.509900044089401317"
    digits = agreeing_digits(minimum.energy, mpfr(reference))
    failures = []
    if not digits >= 12:
        failures.append(
            f"ε_min = {mpnum.decimal_str(minimum.energy, 25)} agrees with "
            f"{reference} to {digits:.1f} significant digits, need ≥ 12"
        )
    verdict(6, "planar B=0.02 ground state at truncation order 10, ≥ 12 digits", failures)


# ---------------------------------------------------------------------------
# Criterion 7


def test_criterion_7_structural_property_suite():
    failures = []
    for precision in (60, 120):
        mpnum.set_precision(precision)
        tag = f"[{precision} digits]"
        rng = random.Random(97 + precision)
        slack_exp = mpfr(10) ** (20 - precision)

        harmonic_pair = (harmonic_function(5), harmonic_function(6))
        planar_system = mer.QzmSystem(B=2)
        planar_pair = (
            oppq.LambdaMulti(planar_system, 1),
            oppq.LambdaMulti(planar_system, 2),
        )

        # (a) raising the truncation order never lowers the energy function
        for low, high, lo, hi, name in (
            (*harmonic_pair, 0.3, 8.0, "harmonic"),
            (*planar_pair, 1.01, 1.19, "planar"),
        ):
            for _ in range(50):
                energy = mpfr(rng.uniform(lo, hi))
                v_low = low.evaluate(energy, need_derivative=False).value
                v_high = high.evaluate(energy, need_derivative=False).value
                if v_high < v_low - abs(v_low) * slack_exp:
                    failures.append(
                        f"{tag} (a) {name}: order increase lowered the value at "
                        f"E={mpnum.decimal_str(energy, 10)}"
                    )

        # (b) the minimum values rise strictly with the order
        tol = mpfr(10) ** -10
        harmonic_minima = [
            locate_well(harmonic_function(order), "3.2", "6.8", tol).value
            for order in (5, 6, 7)
        ]
        planar_minima = [
            locate_well(oppq.LambdaMulti(planar_system, 0), "1.01", "1.3", tol, points=8).value,
            locate_well(planar_pair[0], "1.002", "1.2", tol, points=8).value,
            locate_well(planar_pair[1], "1.002", "1.2", tol, points=8).value,
        ]
        for name, seq in (("harmonic", harmonic_minima), ("planar", planar_minima)):
            if not all(a < b for a, b in zip(seq, seq[1:])):
                failures.append(f"{tag} (b) {name}: minimum values are not strictly increasing")

        # (c) the constrained minimum is global: random unit-first-moment probes
        for fn, energy in ((planar_pair[0], "1.1"), (planar_pair[1], "1.05")):
            ev = fn.evaluate(energy)
            slack = abs(ev.value) * slack_exp
            for _ in range(50):
                u = [mpfr(rng.uniform(-3, 3)) for _ in range(ev.bundle.free_dim)]
                if ev.bundle.probe(u) < ev.value - slack:
                    failures.append(f"{tag} (c) probe fell below the minimum at E={energy}")
                    break

        # (d) closed-form derivatives against central finite differences
        h = mpfr(10) ** -(precision // 3)
        fd_tol = mpfr(10) ** -(precision // 4)
        for fn, energies, name in (
            (harmonic_pair[1], [mpfr("0.7") + mpfr("0.35") * k for k in range(20)], "harmonic"),
            (planar_pair[1], [mpfr("1.012") + mpfr("0.009") * k for k in range(20)], "planar"),
        ):
            for energy in energies:
                closed = fn.evaluate(energy).derivative
                fd = (
                    fn.evaluate(energy + h, need_derivative=False).value
                    - fn.evaluate(energy - h, need_derivative=False).value
                ) / (2 * h)
                if rel_err(closed, fd) >= fd_tol:
                    failures.append(
                        f"{tag} (d) {name}: derivative mismatch at "
                        f"E={mpnum.decimal_str(energy, 8)}"
                    )

        # (e) the certified lattice-relation residual stays below the bound
        residual_bound = mpfr(10) ** (8 - precision)
        for m_s in range(1, 7):
            table = mer.build_qzm(planar_system, mpfr("1.05"), m_s)
            if not table.residual <= residual_bound:
                failures.append(f"{tag} (e) residual above bound at m_s={m_s}")

        # (f) the incomplete-gamma ratio grid against an independent quadrature
        for g_text in ("2", "0.04"):
            g = mpfr(g_text)
            grid = refweight.gamma_grid(g, 4, 4, refweight.gamma_seed(g))
            for m in range(5):
                for n in range(5):
                    reference = from_mpmath(gamma_ratio_oracle(g_text, m, n, 40), 35)
                    if agreeing_digits(grid[m][n], reference) < 15:
                        failures.append(
                            f"{tag} (f) grid({m},{n}) at g={g_text} below 15 digits"
                        )

        # (g) the basis is orthonormal to working precision
        gram_bound = mpfr(10) ** (6 - precision)
        harmonic_weights = refweight.harmonic_weight_moments(16)
        harmonic_basis = oppq.build_basis(harmonic_weights, None, 8)
        if not harmonic_basis.gram_residual(harmonic_weights) < gram_bound:
            failures.append(f"{tag} (g) harmonic basis residual above bound")
        planar_fn = planar_pair[1]
        if not planar_fn.basis.gram_residual(planar_fn.weights) < gram_bound:
            failures.append(f"{tag} (g) planar basis residual above bound")

    verdict(7, "structural property suite at 60 and 120 digits", failures)


# ---------------------------------------------------------------------------
# Criterion 8


def test_criterion_8_extreme_field_pipeline():
    mpnum.set_precision(120)
    system = mer.QzmSystem(B="200", eps0="4.0")
    failures = []
    values = []
    for m_s in (2, 4, 6):
        try:
            fn = oppq.LambdaMulti(system, m_s)
            minimum = locate_well(fn, "4.004", "5.5", mpfr(10) ** -10, points=8)
        except (mpnum.NotPositiveDefinite, ArithmeticError) as exc:
            failures.append(f"m_s={m_s}: pipeline failed with {type(exc).__name__}: {exc}")
            continue
        if not minimum.value > 0:
            failures.append(f"m_s={m_s}: minimum value is not positive")
        values.append(minimum.value)
    if len(values) == 3 and not (values[0] < values[1] < values[2]):
        failures.append("minimum values do not increase with the order")
    verdict(8, "extreme-field B=200 pipeline up to order 6", failures)
