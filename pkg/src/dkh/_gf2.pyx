# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled GF(2) elimination on packed uint64 rows.

Same interface and results as ``_gf2_py``: rows come in and go out as
Python int bitsets, the work happens on a dense word array.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t

cnp.import_array()

BACKEND = "compiled"


cdef object _pack(list rows, Py_ssize_t nwords):
    cdef Py_ssize_t n = len(rows)
    nbytes = nwords * 8
    buf = b"".join([(<object>r).to_bytes(nbytes, "little") for r in rows])
    arr = np.frombuffer(buf, dtype="<u8").reshape(n, nwords).copy()
    return arr


cdef Py_ssize_t _eliminate(uint64_t[:, ::1] m, Py_ssize_t limit, list pivots):
    """Gauss-Jordan in place, lowest column first; returns the rank."""
    cdef Py_ssize_t n = m.shape[0]
    cdef Py_ssize_t nw = m.shape[1]
    cdef Py_ssize_t rk = 0, col, r, w, w2, piv
    cdef uint64_t bit, tmp
    for col in range(limit):
        if rk == n:
            break
        w = col >> 6
        bit = (<uint64_t>1) << (col & 63)
        piv = -1
        for r in range(rk, n):
            if m[r, w] & bit:
                piv = r
                break
        if piv < 0:
            continue
        if piv != rk:
            for w2 in range(nw):
                tmp = m[piv, w2]
                m[piv, w2] = m[rk, w2]
                m[rk, w2] = tmp
        for r in range(n):
            if r != rk and (m[r, w] & bit):
                for w2 in range(w, nw):
                    m[r, w2] ^= m[rk, w2]
        pivots.append(col)
        rk += 1
    return rk


def rref(rows, ncols, limit=None):
    rows = list(rows)
    if limit is None:
        limit = ncols
    if not rows:
        return [], [], []
    top = max(ncols, max(r.bit_length() for r in rows))
    cdef Py_ssize_t nwords = max(1, (top + 63) // 64)
    arr = _pack(rows, nwords)
    pivots = []
    cdef Py_ssize_t rk = _eliminate(arr, limit, pivots)
    out = [int.from_bytes(arr[i].tobytes(), "little") for i in range(arr.shape[0])]
    residual = [x for x in out[rk:] if x]
    return pivots, out[:rk], residual


def rank(rows, ncols):
    rows = list(rows)
    if not rows:
        return 0
    top = max(ncols, max(r.bit_length() for r in rows))
    cdef Py_ssize_t nwords = max(1, (top + 63) // 64)
    arr = _pack(rows, nwords)
    return _eliminate(arr, top, [])
