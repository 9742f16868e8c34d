"""Backend selection for the dense linear-algebra hot loops.

Imports the compiled extension when it is available and falls back to the
pure-Python twin otherwise.  Set the environment variable
``OPPQBM_PURE_PYTHON=1`` before import to force the fallback (used by the
backend-parity tests and the benchmark).

Both backends expose the same functions with identical semantics; see
``_kernels_py`` for the contracts and matrix conventions.
"""
import os

if os.environ.get("OPPQBM_PURE_PYTHON"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

BACKEND = _impl.BACKEND

cholesky = _impl.cholesky
invert_lower = _impl.invert_lower
lower_times_rect = _impl.lower_times_rect
gram = _impl.gram
gram_sym = _impl.gram_sym
solve_lower = _impl.solve_lower
solve_upper_transposed = _impl.solve_upper_transposed
