"""Pure-Python compute kernels.

Fallback backend used when the compiled extension is unavailable.  Same
contracts as ``fatpoints._fastcore``: dense linear algebra mod p on uint64
numpy arrays, and staircase elimination / back-substitution for matrices of
truncated power series in t (coefficient axis last, fixed length).

All routines are deterministic: given equal inputs they produce bit-for-bit
equal outputs on both backends.
"""

import numpy as np

BACKEND_NAME = "python"


def _to_rows(a):
    return [[int(x) for x in row] for row in a]


def rref_inplace(a, p):
    """Reduced row echelon form of ``a`` mod p, in place.

    Returns (rank, pivot_columns).
    """
    rows = _to_rows(a)
    nr = len(rows)
    nc = a.shape[1]
    pivots = []
    r = 0
    for c in range(nc):
        if r >= nr:
            break
        pr = None
        for i in range(r, nr):
            if rows[i][c] % p:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [(x * inv) % p for x in rows[r]]
        for i in range(nr):
            if i != r and rows[i][c]:
                f = rows[i][c]
                ri, rr = rows[i], rows[r]
                rows[i] = [(ri[j] - f * rr[j]) % p for j in range(nc)]
        pivots.append(c)
        r += 1
    for i in range(nr):
        for j in range(nc):
            a[i, j] = rows[i][j] % p
    return r, pivots


def mat_rank(a, p):
    b = np.array(a, dtype=np.uint64, copy=True)
    r, _ = rref_inplace(b, p)
    return r


def right_kernel(a, p):
    """Reduced-echelon-normalized basis of the right kernel, one row per vector."""
    b = np.array(a, dtype=np.uint64, copy=True)
    r, pivots = rref_inplace(b, p)
    nc = a.shape[1]
    free = [c for c in range(nc) if c not in set(pivots)]
    k = np.zeros((len(free), nc), dtype=np.uint64)
    for vi, f in enumerate(free):
        k[vi, f] = 1
        for ri, c in enumerate(pivots):
            k[vi, c] = (-int(b[ri, f])) % p
    return k


# -- truncated power series helpers ----------------------------------------
#
# A series is a Python list of ``nu`` coefficients, low order first.  The top
# coefficients above the caller-tracked valid precision may be garbage after
# valuation-consuming steps; callers never read them.


def _ser_val(s, upto):
    for i in range(min(upto, len(s))):
        if s[i]:
            return i
    return len(s)


def _ser_mul(f, g, nu, p):
    out = [0] * nu
    for i, fi in enumerate(f):
        if fi:
            top = nu - i
            for j, gj in enumerate(g[:top]):
                if gj:
                    out[i + j] = (out[i + j] + fi * gj) % p
    return out


def _ser_inv_unit(u, nu, p):
    inv0 = pow(u[0], -1, p)
    v = [0] * nu
    v[0] = inv0
    for k in range(1, nu):
        acc = 0
        for i in range(1, k + 1):
            if i < len(u) and u[i] and v[k - i]:
                acc += u[i] * v[k - i]
        v[k] = (-inv0 * acc) % p
    return v


def _ser_shift_down(s, a, nu):
    out = s[a:] + [0] * a
    return out[:nu]


def series_echelon_inplace(s, p):
    """Staircase form of a series matrix over F_p[[t]], in place.

    Pivots are chosen with minimal t-valuation (ties broken row-then-column),
    the pivot row is normalized so the pivot entry is exactly t^val, and the
    pivot column is cleared in all non-pivot rows.  Entries whose valuation
    falls at or above the remaining valid precision are treated as zero.

    Returns (pivots, valid_prec) where pivots is a list of (row, col, val)
    in elimination order.
    """
    nr, nc, nu = s.shape
    m = [[[int(c) for c in s[i, j]] for j in range(nc)] for i in range(nr)]
    used = [False] * nr
    in_pivots = [False] * nc
    pivots = []
    valid = nu
    while True:
        best = None
        for i in range(nr):
            if used[i]:
                continue
            for j in range(nc):
                if in_pivots[j]:
                    continue
                v = _ser_val(m[i][j], valid)
                if v < valid and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            break
        a, pr, pc = best
        uinv = _ser_inv_unit(_ser_shift_down(m[pr][pc], a, nu), nu, p)
        for j in range(nc):
            if any(m[pr][j]):
                m[pr][j] = _ser_mul(m[pr][j], uinv, nu, p)
        piv = [0] * nu
        if a < nu:
            piv[a] = 1
        m[pr][pc] = piv
        for i in range(nr):
            if used[i] or i == pr:
                continue
            e = m[i][pc]
            if _ser_val(e, valid) >= valid:
                m[i][pc] = [0] * nu
                continue
            f = _ser_shift_down(e, a, nu)
            for aa in range(nu - a, nu):
                f[aa] = 0
            for j in range(nc):
                if in_pivots[j]:
                    continue
                prod = _ser_mul(f, m[pr][j], nu, p)
                m[i][j] = [(m[i][j][k] - prod[k]) % p for k in range(nu)]
            m[i][pc] = [0] * nu
        used[pr] = True
        in_pivots[pc] = True
        pivots.append((pr, pc, a))
        valid -= a
        if valid <= 0:
            break
    for i in range(nr):
        for j in range(nc):
            for k in range(nu):
                s[i, j, k] = m[i][j][k]
    return pivots, valid


def series_backsolve(s, pivots, p):
    """Kernel vectors of a staircase series matrix, scaled to be integral.

    One vector per free column f: the solution with coordinate f equal to
    t^T (T = sum of pivot valuations) and the other free coordinates 0,
    back-substituted through the staircase, then stripped of its common
    t-power.  Returns (kern, T, strips, free_cols).
    """
    nr, nc, nu = s.shape
    pivot_cols = [pc for (_, pc, _) in pivots]
    in_piv = set(pivot_cols)
    free_cols = [c for c in range(nc) if c not in in_piv]
    T = sum(a for (_, _, a) in pivots)
    if T >= nu:
        from .errors import PrecisionExhausted

        raise PrecisionExhausted("total pivot valuation exceeds series precision")
    kern = np.zeros((len(free_cols), nc, nu), dtype=np.uint64)
    strips = []
    rows = [[[int(c) for c in s[i, j]] for j in range(nc)] for i in range(nr)]
    for vi, f in enumerate(free_cols):
        y = {f: [0] * nu}
        y[f][T] = 1
        for k in range(len(pivots) - 1, -1, -1):
            rk, ck, ak = pivots[k]
            num = [0] * nu
            for j, yj in y.items():
                e = rows[rk][j]
                if any(e):
                    prod = _ser_mul(e, yj, nu, p)
                    num = [(num[i] + prod[i]) % p for i in range(nu)]
            if ak and _ser_val(num, nu) < ak:
                from .errors import PrecisionExhausted

                raise PrecisionExhausted("non-integral back-substitution step")
            val = _ser_shift_down(num, ak, nu)
            y[ck] = [(-c) % p for c in val]
        strip = min(_ser_val(yy, nu) for yy in y.values())
        if strip >= nu:
            strip = 0
        strips.append(strip)
        for j, yj in y.items():
            sh = _ser_shift_down(yj, strip, nu)
            for k in range(nu):
                kern[vi, j, k] = sh[k]
    return kern, T, strips, free_cols


def series_combine(vecs, coeffs, p):
    """Rows of ``coeffs`` (m x k, mod p) applied to k series vectors (k, C, nu)."""
    k, nc, nu = vecs.shape
    m = coeffs.shape[0]
    out = np.zeros((m, nc, nu), dtype=np.uint64)
    v = [[[int(c) for c in vecs[i, j]] for j in range(nc)] for i in range(k)]
    for r in range(m):
        row = [int(x) for x in coeffs[r]]
        for j in range(nc):
            acc = [0] * nu
            for i in range(k):
                ci = row[i]
                if ci:
                    vij = v[i][j]
                    for t in range(nu):
                        if vij[t]:
                            acc[t] = (acc[t] + ci * vij[t]) % p
            for t in range(nu):
                out[r, j, t] = acc[t]
    return out
