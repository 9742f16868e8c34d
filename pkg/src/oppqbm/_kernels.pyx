# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled implementations of the dense linear-algebra hot loops.

Same contract as ``_kernels_py`` (see that module for conventions): the
scalars stay arbitrary Python objects (gmpy2.mpfr in production), the
speedup comes from C-level loop bookkeeping and list indexing.  The two
backends perform identical arithmetic in identical order, so their
results agree bit for bit.
"""

BACKEND = "compiled"


def cholesky(list w_rows, sqrt):
    """Factor W = C·Cᵀ given the lower triangle of W; return C's rows.

    Raises ValueError(row_index, pivot) on the first nonpositive pivot.
    """
    cdef Py_ssize_t n = len(w_rows)
    cdef Py_ssize_t i, j, k
    cdef list out = [], row, wi, rj
    for i in range(n):
        wi = <list>w_rows[i]
        row = []
        for j in range(i):
            s = wi[j]
            rj = <list>out[j]
            for k in range(j):
                s = s - row[k] * rj[k]
            row.append(s / rj[j])
        s = wi[i]
        for k in range(i):
            rk = row[k]
            s = s - rk * rk
        if not s > 0:
            raise ValueError(i, s)
        row.append(sqrt(s))
        out.append(row)
    return out


def invert_lower(list c_rows):
    """Invert a lower-triangular matrix; the inverse is lower-triangular."""
    cdef Py_ssize_t n = len(c_rows)
    cdef Py_ssize_t i, j, k
    cdef list inv = [], row, ci
    for i in range(n):
        ci = <list>c_rows[i]
        cii = ci[i]
        row = []
        for j in range(i):
            s = ci[j] * (<list>inv[j])[j]
            for k in range(j + 1, i):
                s = s + ci[k] * (<list>inv[k])[j]
            row.append(-s / cii)
        row.append(1 / cii)
        inv.append(row)
    return inv


def lower_times_rect(list l_rows, list r_rows, Py_ssize_t ncols):
    """Product L·R of a lower-triangular L with a rectangular R (n×ncols)."""
    cdef Py_ssize_t n = len(l_rows)
    cdef Py_ssize_t i, j, c
    cdef list out = [], row, li, rj, r0
    for i in range(n):
        li = <list>l_rows[i]
        li0 = li[0]
        r0 = <list>r_rows[0]
        row = [li0 * r0[c] for c in range(ncols)]
        for j in range(1, i + 1):
            lij = li[j]
            rj = <list>r_rows[j]
            for c in range(ncols):
                row[c] = row[c] + lij * rj[c]
        out.append(row)
    return out


def gram(list rows, Py_ssize_t ncols):
    """Gram matrix RᵀR (full ncols×ncols rows) of a rectangular R."""
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t idx, a, b
    cdef list r0 = <list>rows[0]
    cdef list g = [[r0[a] * r0[b] for b in range(ncols)] for a in range(ncols)]
    cdef list r, ga
    for idx in range(1, nrows):
        r = <list>rows[idx]
        for a in range(ncols):
            ra = r[a]
            ga = <list>g[a]
            for b in range(a + 1):
                ga[b] = ga[b] + ra * r[b]
    for a in range(ncols):
        ga = <list>g[a]
        for b in range(a + 1, ncols):
            ga[b] = (<list>g[b])[a]
    return g


def gram_sym(list rows, list d_rows, Py_ssize_t ncols):
    """Symmetrized cross Gram matrix DᵀR + RᵀD (full rows)."""
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t idx, a, b
    cdef list r0 = <list>rows[0]
    cdef list d0 = <list>d_rows[0]
    cdef list g = [
        [d0[a] * r0[b] + r0[a] * d0[b] for b in range(ncols)] for a in range(ncols)
    ]
    cdef list r, d, ga
    for idx in range(1, nrows):
        r = <list>rows[idx]
        d = <list>d_rows[idx]
        for a in range(ncols):
            ra = r[a]
            da = d[a]
            ga = <list>g[a]
            for b in range(a + 1):
                ga[b] = ga[b] + da * r[b] + ra * d[b]
    for a in range(ncols):
        ga = <list>g[a]
        for b in range(a + 1, ncols):
            ga[b] = (<list>g[b])[a]
    return g


def solve_lower(list c_rows, list b):
    """Forward substitution: solve C·x = b for lower-triangular C."""
    cdef Py_ssize_t n = len(c_rows)
    cdef Py_ssize_t i, j
    cdef list x = [], ci
    for i in range(n):
        ci = <list>c_rows[i]
        s = b[i]
        for j in range(i):
            s = s - ci[j] * x[j]
        x.append(s / ci[i])
    return x


def solve_upper_transposed(list c_rows, list y):
    """Back substitution: solve Cᵀ·x = y for lower-triangular C."""
    cdef Py_ssize_t n = len(c_rows)
    cdef Py_ssize_t i, j
    cdef list x = list(y)
    for i in range(n - 1, -1, -1):
        s = x[i]
        for j in range(i + 1, n):
            s = s - (<list>c_rows[j])[i] * x[j]
        x[i] = s / (<list>c_rows[i])[i]
    return x
