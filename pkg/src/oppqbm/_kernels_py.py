"""Pure-Python implementations of the dense linear-algebra hot loops.

Every function here operates on plain lists of lists of scalar objects and
uses only ``+ - * /`` (plus a caller-supplied ``sqrt`` for the Cholesky
factorization), so the kernels work unchanged for ``gmpy2.mpfr``,
``fractions.Fraction``, or any other field-like scalar.  A compiled twin
with the identical contract lives in ``_kernels.pyx``; ``kernels`` picks
one of the two at import time.

Matrix conventions:
  * symmetric and lower-triangular matrices are lists of rows where row
    ``i`` has length ``i + 1`` (the lower triangle including the diagonal);
  * rectangular matrices are lists of full rows.

None of the functions mutates its arguments.
"""

BACKEND = "python"


def cholesky(w_rows, sqrt):
    """Factor W = C·Cᵀ given the lower triangle of W; return C's rows.

    Raises ValueError(row_index, pivot) on the first nonpositive pivot.
    """
    out = []
    for i, wi in enumerate(w_rows):
        row = []
        for j in range(i):
            s = wi[j]
            rj = out[j]
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


def invert_lower(c_rows):
    """Invert a lower-triangular matrix; the inverse is lower-triangular."""
    inv = []
    for i, ci in enumerate(c_rows):
        cii = ci[i]
        row = []
        for j in range(i):
            s = ci[j] * inv[j][j]
            for k in range(j + 1, i):
                s = s + ci[k] * inv[k][j]
            row.append(-s / cii)
        row.append(1 / cii)
        inv.append(row)
    return inv


def lower_times_rect(l_rows, r_rows, ncols):
    """Product L·R of a lower-triangular L with a rectangular R (n×ncols)."""
    out = []
    for i, li in enumerate(l_rows):
        li0 = li[0]
        r0 = r_rows[0]
        row = [li0 * r0[c] for c in range(ncols)]
        for j in range(1, i + 1):
            lij = li[j]
            rj = r_rows[j]
            for c in range(ncols):
                row[c] = row[c] + lij * rj[c]
        out.append(row)
    return out


def gram(rows, ncols):
    """Gram matrix RᵀR (full ncols×ncols rows) of a rectangular R."""
    r0 = rows[0]
    g = [[r0[a] * r0[b] for b in range(ncols)] for a in range(ncols)]
    for idx in range(1, len(rows)):
        r = rows[idx]
        for a in range(ncols):
            ra = r[a]
            ga = g[a]
            for b in range(a + 1):
                ga[b] = ga[b] + ra * r[b]
    for a in range(ncols):
        ga = g[a]
        for b in range(a + 1, ncols):
            ga[b] = g[b][a]
    return g


def gram_sym(rows, d_rows, ncols):
    """Symmetrized cross Gram matrix DᵀR + RᵀD (full rows)."""
    r0 = rows[0]
    d0 = d_rows[0]
    g = [[d0[a] * r0[b] + r0[a] * d0[b] for b in range(ncols)] for a in range(ncols)]
    for idx in range(1, len(rows)):
        r = rows[idx]
        d = d_rows[idx]
        for a in range(ncols):
            ra = r[a]
            da = d[a]
            ga = g[a]
            for b in range(a + 1):
                ga[b] = ga[b] + da * r[b] + ra * d[b]
    for a in range(ncols):
        ga = g[a]
        for b in range(a + 1, ncols):
            ga[b] = g[b][a]
    return g


def solve_lower(c_rows, b):
    """Forward substitution: solve C·x = b for lower-triangular C."""
    x = []
    for i, ci in enumerate(c_rows):
        s = b[i]
        for j in range(i):
            s = s - ci[j] * x[j]
        x.append(s / ci[i])
    return x


def solve_upper_transposed(c_rows, y):
    """Back substitution: solve Cᵀ·x = y for lower-triangular C."""
    n = len(c_rows)
    x = list(y)
    for i in range(n - 1, -1, -1):
        s = x[i]
        for j in range(i + 1, n):
            s = s - c_rows[j][i] * x[j]
        x[i] = s / c_rows[i][i]
    return x
