# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled counting kernels; ``_pykernels`` holds the numpy equivalents."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef long long i64


def sphere_convolve(const unsigned char[::1] mask,
                    const i64[:, ::1] offsets, i64 p, i64 d):
    """counts[x] = #{s in offsets : x - s in E}, scattered from each y in E."""
    cdef i64 size = mask.shape[0]
    cdef i64 m = offsets.shape[0]
    counts_arr = np.zeros(size, dtype=np.int64)
    cdef i64[::1] counts = counts_arr
    cdef i64 y, rem, j, s, idx, w, c
    cdef i64 ycoord[8]
    for y in range(size):
        if not mask[y]:
            continue
        rem = y
        for j in range(d):
            ycoord[j] = rem % p
            rem = rem // p
        for s in range(m):
            idx = 0
            w = 1
            for j in range(d):
                c = ycoord[j] + offsets[s, j]
                if c >= p:
                    c -= p
                idx += c * w
                w *= p
            counts[idx] += 1
    return counts_arr


cdef inline i64 _rank_mod_p(i64* mat, i64 rows, i64 cols, i64 p,
                            const i64[::1] invtab) nogil:
    """Row rank of a rows x cols matrix with entries in [0, p); destroys mat."""
    cdef i64 rank = 0
    cdef i64 col, r, piv, j, f, tmp, iv
    for col in range(cols):
        if rank == rows:
            break
        piv = -1
        for r in range(rank, rows):
            if mat[r * cols + col] != 0:
                piv = r
                break
        if piv < 0:
            continue
        if piv != rank:
            for j in range(cols):
                tmp = mat[piv * cols + j]
                mat[piv * cols + j] = mat[rank * cols + j]
                mat[rank * cols + j] = tmp
        iv = invtab[mat[rank * cols + col]]
        for r in range(rank + 1, rows):
            f = mat[r * cols + col]
            if f == 0:
                continue
            f = (f * iv) % p
            for j in range(col, cols):
                mat[r * cols + j] = (mat[r * cols + j] - f * mat[rank * cols + j]) % p
                if mat[r * cols + j] < 0:
                    mat[r * cols + j] += p
        rank += 1
    return rank


cdef inline i64 _classify(const i64[:, ::1] coords, i64* tup, i64 k, i64 d,
                          i64 p, const i64[::1] invtab, i64* work) nogil:
    """Distance code of the tuple, or -1 if its vertices do not span k dims."""
    cdef i64 i, j, r, diff, acc, code, weight
    if k > d:
        return -1
    for i in range(k):
        for r in range(d):
            diff = coords[tup[i + 1], r] - coords[tup[0], r]
            if diff < 0:
                diff += p
            work[i * d + r] = diff
    if _rank_mod_p(work, k, d, p, invtab) < k:
        return -1
    code = 0
    weight = 1
    for i in range(k + 1):
        for j in range(i + 1, k + 1):
            acc = 0
            for r in range(d):
                diff = coords[tup[i], r] - coords[tup[j], r]
                acc += diff * diff
            code += (acc % p) * weight
            weight *= p
    return code


def classify_tuples(const i64[:, ::1] coords, const i64[:, ::1] tuples,
                    i64 p, const i64[::1] invtab):
    """Distance codes for explicit index tuples; -1 marks degenerate ones."""
    cdef i64 n = tuples.shape[0]
    cdef i64 k = tuples.shape[1] - 1
    cdef i64 d = coords.shape[1]
    codes_arr = np.empty(n, dtype=np.int64)
    cdef i64[::1] codes = codes_arr
    cdef i64* work = <i64*> malloc(max(k * d, 1) * sizeof(i64))
    cdef i64* tup = <i64*> malloc((k + 1) * sizeof(i64))
    cdef i64 t, i
    try:
        for t in range(n):
            for i in range(k + 1):
                tup[i] = tuples[t, i]
            codes[t] = _classify(coords, tup, k, d, p, invtab, work)
    finally:
        free(work)
        free(tup)
    return codes_arr


def census_scan(const i64[:, ::1] coords, i64 p, i64 k,
                const i64[::1] invtab):
    """Mark every distance code realized by a spanning (k+1)-tuple of points.

    Walks all n**(k+1) ordered tuples with an odometer.  Returns the
    ``uint8`` seen-array over the p**C code space and the degenerate count.
    """
    cdef i64 n = coords.shape[0]
    cdef i64 d = coords.shape[1]
    cdef i64 npairs = (k + 1) * k // 2
    cdef i64 space = 1
    cdef i64 i
    for i in range(npairs):
        space *= p
    seen_arr = np.zeros(space, dtype=np.uint8)
    cdef unsigned char[::1] seen = seen_arr
    cdef i64 degenerate = 0
    cdef i64 code, pos
    if n == 0:
        return seen_arr, 0
    cdef i64* work = <i64*> malloc(max(k * d, 1) * sizeof(i64))
    cdef i64* tup = <i64*> malloc((k + 1) * sizeof(i64))
    try:
        for i in range(k + 1):
            tup[i] = 0
        with nogil:
            while True:
                code = _classify(coords, tup, k, d, p, invtab, work)
                if code < 0:
                    degenerate += 1
                else:
                    seen[code] = 1
                pos = k
                while pos >= 0:
                    tup[pos] += 1
                    if tup[pos] < n:
                        break
                    tup[pos] = 0
                    pos -= 1
                if pos < 0:
                    break
    finally:
        free(work)
        free(tup)
    return seen_arr, degenerate
