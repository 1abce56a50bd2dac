# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled compute kernels.

Hot loops of the package: dense linear algebra mod p (p < 2^62) and
staircase elimination over truncated power series in t.  Contracts and
outputs match ``fatpoints._pycore`` bit for bit; matrix entries must
already be reduced mod p.
"""

import numpy as np

from .errors import PrecisionExhausted

ctypedef unsigned long long u64

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"
    ctypedef long long i128 "__int128"

cdef u64 MERS = ((<u64>1) << 61) - 1


cdef inline u64 mulmod(u64 a, u64 b, u64 p) nogil:
    cdef u128 z = (<u128>a) * b
    cdef u64 r
    if p == MERS:
        r = (<u64>(z & MERS)) + (<u64>(z >> 61))
        r = (r & MERS) + (r >> 61)
        if r >= MERS:
            r -= MERS
        return r
    return <u64>(z % p)


cdef inline u64 submod(u64 a, u64 b, u64 p) nogil:
    if a >= b:
        return a - b
    return a + (p - b)


cdef inline u64 addmod(u64 a, u64 b, u64 p) nogil:
    cdef u64 r = a + b
    if r >= p:
        r -= p
    return r


cdef u64 invmod(u64 a, u64 p) nogil:
    cdef i128 t = 0, newt = 1, r = <i128>p, newr = <i128>a, q, tmp
    while newr != 0:
        q = r / newr
        tmp = t - q * newt
        t = newt
        newt = tmp
        tmp = r - q * newr
        r = newr
        newr = tmp
    if t < 0:
        t += <i128>p
    return <u64>t


BACKEND_NAME = "compiled"


def rref_inplace(u64[:, ::1] a, p_in):
    """Reduced row echelon form of ``a`` mod p, in place.

    Returns (rank, pivot_columns).
    """
    cdef u64 p = p_in
    cdef Py_ssize_t nr = a.shape[0], nc = a.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, pr
    cdef u64 inv, f, tmp
    pivots = []
    for c in range(nc):
        if r >= nr:
            break
        pr = -1
        for i in range(r, nr):
            if a[i, c] != 0:
                pr = i
                break
        if pr < 0:
            continue
        if pr != r:
            for j in range(nc):
                tmp = a[r, j]
                a[r, j] = a[pr, j]
                a[pr, j] = tmp
        inv = invmod(a[r, c], p)
        with nogil:
            for j in range(nc):
                a[r, j] = mulmod(a[r, j], inv, p)
            for i in range(nr):
                if i != r and a[i, c] != 0:
                    f = a[i, c]
                    for j in range(nc):
                        a[i, j] = submod(a[i, j], mulmod(f, a[r, j], p), p)
        pivots.append(c)
        r += 1
    return r, pivots


def mat_rank(a, p):
    b = np.array(a, dtype=np.uint64, copy=True, order="C")
    r, _ = rref_inplace(b, p)
    return r


def right_kernel(a, p):
    """Reduced-echelon-normalized basis of the right kernel, one row per vector."""
    b = np.array(a, dtype=np.uint64, copy=True, order="C")
    r, pivots = rref_inplace(b, p)
    nc = b.shape[1]
    pivset = set(pivots)
    free = [c for c in range(nc) if c not in pivset]
    k = np.zeros((len(free), nc), dtype=np.uint64)
    cdef u64[:, ::1] kv = k
    cdef u64[:, ::1] bv = b
    cdef u64 pp = p
    cdef Py_ssize_t vi, ri
    for vi, f in enumerate(free):
        kv[vi, f] = 1
        for ri, c in enumerate(pivots):
            kv[vi, c] = (pp - bv[ri, f]) % pp
    return k


# -- truncated power series kernels -----------------------------------------


cdef inline Py_ssize_t ser_val(u64* s, Py_ssize_t upto) nogil:
    cdef Py_ssize_t i
    for i in range(upto):
        if s[i] != 0:
            return i
    return upto


cdef inline Py_ssize_t ser_len(u64* s, Py_ssize_t nu) nogil:
    cdef Py_ssize_t i
    for i in range(nu - 1, -1, -1):
        if s[i] != 0:
            return i + 1
    return 0


cdef void ser_mul(u64* f, u64* g, u64* out, Py_ssize_t nu, u64 p) nogil:
    cdef Py_ssize_t i, j, top
    cdef Py_ssize_t fl = ser_len(f, nu), gl = ser_len(g, nu)
    cdef u64 fi
    for i in range(nu):
        out[i] = 0
    for i in range(fl):
        fi = f[i]
        if fi != 0:
            top = nu - i
            if gl < top:
                top = gl
            for j in range(top):
                if g[j] != 0:
                    out[i + j] = addmod(out[i + j], mulmod(fi, g[j], p), p)


cdef void ser_inv_unit(u64* u, u64* v, Py_ssize_t nu, u64 p) nogil:
    cdef u64 inv0 = invmod(u[0], p)
    cdef Py_ssize_t k, i
    cdef u64 acc
    for k in range(nu):
        v[k] = 0
    v[0] = inv0
    for k in range(1, nu):
        acc = 0
        for i in range(1, k + 1):
            if u[i] != 0 and v[k - i] != 0:
                acc = addmod(acc, mulmod(u[i], v[k - i], p), p)
        v[k] = mulmod(p - acc if acc else 0, inv0, p)


def series_echelon_inplace(u64[:, :, ::1] s, p_in):
    """Staircase form over F_p[[t]], in place; see the python backend docstring.

    Returns (pivots, valid_prec).
    """
    cdef u64 p = p_in
    cdef Py_ssize_t nr = s.shape[0], nc = s.shape[1], nu = s.shape[2]
    cdef Py_ssize_t i, j, k, a, pr, pc, best_v, v, valid
    vals_np = np.empty((nr, nc), dtype=np.int64)
    cdef long long[:, ::1] vals = vals_np
    used_np = np.zeros(nr, dtype=np.int64)
    cdef long long[::1] used = used_np
    inpiv_np = np.zeros(nc, dtype=np.int64)
    cdef long long[::1] in_piv = inpiv_np
    scratch_np = np.empty(3 * nu, dtype=np.uint64)
    cdef u64[::1] scratch = scratch_np
    cdef u64* uinv = &scratch[0]
    cdef u64* fbuf = &scratch[nu]
    cdef u64* prod = &scratch[2 * nu]
    pivots = []
    valid = nu
    with nogil:
        for i in range(nr):
            for j in range(nc):
                vals[i, j] = ser_val(&s[i, j, 0], nu)
    while True:
        best_v = valid
        pr = -1
        pc = -1
        for i in range(nr):
            if used[i]:
                continue
            for j in range(nc):
                if in_piv[j]:
                    continue
                v = vals[i, j]
                if v < best_v:
                    best_v = v
                    pr = i
                    pc = j
        if pr < 0:
            break
        a = best_v
        with nogil:
            # normalize pivot row so the pivot entry becomes exactly t^a
            for k in range(a, nu):
                fbuf[k - a] = s[pr, pc, k]
            for k in range(nu - a, nu):
                fbuf[k] = 0
            ser_inv_unit(fbuf, uinv, nu, p)
            for j in range(nc):
                if vals[pr, j] < nu:
                    ser_mul(&s[pr, j, 0], uinv, prod, nu, p)
                    for k in range(nu):
                        s[pr, j, k] = prod[k]
                    vals[pr, j] = ser_val(&s[pr, j, 0], nu)
            for k in range(nu):
                s[pr, pc, k] = 0
            if a < nu:
                s[pr, pc, a] = 1
            vals[pr, pc] = a
            # clear the pivot column in the remaining rows
            for i in range(nr):
                if used[i] or i == pr:
                    continue
                if vals[i, pc] >= valid:
                    for k in range(nu):
                        s[i, pc, k] = 0
                    vals[i, pc] = nu
                    continue
                for k in range(a, nu):
                    fbuf[k - a] = s[i, pc, k]
                for k in range(nu - a, nu):
                    fbuf[k] = 0
                for j in range(nc):
                    if in_piv[j] or vals[pr, j] >= nu:
                        continue
                    ser_mul(fbuf, &s[pr, j, 0], prod, nu, p)
                    for k in range(nu):
                        s[i, j, k] = submod(s[i, j, k], prod[k], p)
                    vals[i, j] = ser_val(&s[i, j, 0], nu)
                for k in range(nu):
                    s[i, pc, k] = 0
                vals[i, pc] = nu
        used[pr] = 1
        in_piv[pc] = 1
        pivots.append((pr, pc, a))
        valid -= a
        if valid <= 0:
            break
    return pivots, valid


def series_backsolve(u64[:, :, ::1] s, pivots, p_in):
    """Integral kernel vectors of a staircase series matrix.

    Returns (kern, T, strips, free_cols); see the python backend docstring.
    """
    cdef u64 p = p_in
    cdef Py_ssize_t nr = s.shape[0], nc = s.shape[1], nu = s.shape[2]
    cdef Py_ssize_t i, j, k, kk, vi, rk, ck, ak, strip, nsupp, T = 0
    piv_rows_np = np.array([pr for (pr, _, _) in pivots], dtype=np.int64).reshape(-1)
    piv_cols_np = np.array([pc for (_, pc, _) in pivots], dtype=np.int64).reshape(-1)
    piv_vals_np = np.array([av for (_, _, av) in pivots], dtype=np.int64).reshape(-1)
    cdef long long[::1] piv_rows = piv_rows_np
    cdef long long[::1] piv_cols = piv_cols_np
    cdef long long[::1] piv_vals = piv_vals_np
    cdef Py_ssize_t r = len(pivots)
    in_piv = set(int(c) for c in piv_cols_np)
    free_cols = [c for c in range(nc) if c not in in_piv]
    for i in range(r):
        T += piv_vals[i]
    if T >= nu:
        raise PrecisionExhausted("total pivot valuation exceeds series precision")
    kern = np.zeros((len(free_cols), nc, nu), dtype=np.uint64)
    cdef u64[:, :, ::1] kv = kern
    ybuf_np = np.zeros((nc, nu), dtype=np.uint64)
    cdef u64[:, ::1] y = ybuf_np
    supp_np = np.zeros(r + 1, dtype=np.int64)
    cdef long long[::1] supp = supp_np
    num_np = np.zeros(2 * nu, dtype=np.uint64)
    cdef u64[::1] numbuf = num_np
    cdef u64* num = &numbuf[0]
    cdef u64* prod = &numbuf[nu]
    strips = []
    cdef Py_ssize_t f, val, minval
    cdef bint bad
    for vi in range(len(free_cols)):
        f = free_cols[vi]
        with nogil:
            for j in range(nc):
                for k in range(nu):
                    y[j, k] = 0
            y[f, T] = 1
        supp[0] = f
        nsupp = 1
        bad = False
        with nogil:
            for kk in range(r - 1, -1, -1):
                rk = piv_rows[kk]
                ck = piv_cols[kk]
                ak = piv_vals[kk]
                for k in range(nu):
                    num[k] = 0
                for i in range(nsupp):
                    j = supp[i]
                    if ser_val(&s[rk, j, 0], nu) < nu:
                        ser_mul(&s[rk, j, 0], &y[j, 0], prod, nu, p)
                        for k in range(nu):
                            num[k] = addmod(num[k], prod[k], p)
                if ak > 0 and ser_val(num, nu) < ak:
                    bad = True
                    break
                for k in range(ak, nu):
                    y[ck, k - ak] = num[k] if num[k] == 0 else (p - num[k])
                for k in range(nu - ak, nu):
                    y[ck, k] = 0
                supp[nsupp] = ck
                nsupp += 1
        if bad:
            raise PrecisionExhausted("non-integral back-substitution step")
        minval = nu
        for i in range(nsupp):
            j = supp[i]
            val = ser_val(&y[j, 0], nu)
            if val < minval:
                minval = val
        strip = minval if minval < nu else 0
        strips.append(strip)
        with nogil:
            for i in range(nsupp):
                j = supp[i]
                for k in range(strip, nu):
                    kv[vi, j, k - strip] = y[j, k]
    return kern, T, strips, free_cols


def series_combine(u64[:, :, ::1] vecs, u64[:, ::1] coeffs, p_in):
    """Rows of ``coeffs`` (m x k, mod p) applied to k series vectors (k, C, nu)."""
    cdef u64 p = p_in
    cdef Py_ssize_t kdim = vecs.shape[0], nc = vecs.shape[1], nu = vecs.shape[2]
    cdef Py_ssize_t m = coeffs.shape[0]
    out = np.zeros((m, nc, nu), dtype=np.uint64)
    cdef u64[:, :, ::1] ov = out
    cdef Py_ssize_t r, i, j, t
    cdef u64 ci
    with nogil:
        for r in range(m):
            for i in range(kdim):
                ci = coeffs[r, i]
                if ci == 0:
                    continue
                for j in range(nc):
                    for t in range(nu):
                        if vecs[i, j, t] != 0:
                            ov[r, j, t] = addmod(ov[r, j, t], mulmod(ci, vecs[i, j, t], p), p)
    return out
