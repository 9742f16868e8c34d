"""Benchmark the compiled linear-algebra kernels against the pure-Python twin.

Times the four hot loops (Cholesky factorization, triangular inversion,
triangular × rectangular product, Gram accumulation) on the moment matrices
the library actually builds, and checks that both backends return
bit-identical results on every workload.

Run from the repository root::

    python benchmarks/bench_kernels.py [--digits 120] [--orders 2 4 6]
"""
import argparse
import time

from gmpy2 import mpfr, sqrt

from oppqbm import mpnum
from oppqbm import _kernels_py as pure
from oppqbm.mer import QzmSystem, antidiagonal_order, build_qzm
from oppqbm.oppq import _moment_matrix
from oppqbm.refweight import qzm_weight_moments

try:
    from oppqbm import _kernels as compiled
except ImportError:
    compiled = None


def _workload(m_s: int):
    """Moment matrix, its Cholesky factor, and a transfer-table rectangle for
    one missing-moment order of the benchmark system (B=2, Z=1, ε₀=1)."""
    system = QzmSystem(B=mpfr(2))
    ordering = antidiagonal_order(m_s)
    i_max = (m_s + 1) * (2 * m_s + 3) - 1
    w_rows = _moment_matrix(qzm_weight_moments(system, m_s), ordering, i_max).lower_rows()
    c_rows = pure.cholesky(w_rows, sqrt)
    xi_rows = pure.invert_lower(c_rows)
    table = build_qzm(system, mpfr("1.05"), m_s)
    rect = [[table.value(pair, ell) for ell in range(m_s + 1)] for pair in ordering]
    return w_rows, c_rows, xi_rows, rect, m_s + 1


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def _identical(a, b) -> bool:
    if isinstance(a, list):
        return len(a) == len(b) and all(_identical(x, y) for x, y in zip(a, b))
    return a == b and type(a) is type(b)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--digits", type=int, default=120, help="working precision")
    parser.add_argument("--orders", type=int, nargs="+", default=[2, 4, 6],
                        help="missing-moment orders to benchmark")
    parser.add_argument("--repeats", type=int, default=3, help="timing repeats (best-of)")
    args = parser.parse_args()

    if compiled is None:
        print("compiled backend unavailable — nothing to compare")
        return 1

    mpnum.set_precision(args.digits)
    print(f"precision: {args.digits} digits; best of {args.repeats} runs; times in ms")
    header = f"{'order':>5} {'dim':>5} {'kernel':<18} {'python':>10} {'compiled':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))

    for m_s in args.orders:
        w_rows, c_rows, xi_rows, rect, ncols = _workload(m_s)
        dim = len(w_rows)
        cases = [
            ("cholesky", lambda k: k.cholesky(w_rows, sqrt)),
            ("invert_lower", lambda k: k.invert_lower(c_rows)),
            ("lower_times_rect", lambda k: k.lower_times_rect(xi_rows, rect, ncols)),
            ("gram", lambda k: k.gram(rect, ncols)),
        ]
        for name, call in cases:
            if not _identical(call(pure), call(compiled)):
                print(f"MISMATCH in {name} at order {m_s}")
                return 1
            t_py = _time(lambda: call(pure), args.repeats)
            t_c = _time(lambda: call(compiled), args.repeats)
            print(f"{m_s:>5} {dim:>5} {name:<18} {t_py * 1e3:>10.2f} {t_c * 1e3:>10.2f} "
                  f"{t_py / t_c:>8.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
