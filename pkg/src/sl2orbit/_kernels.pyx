# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled 2x2 complex kernels. Same API as ``_pykernels``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef double complex cplx


cdef inline void _mul(const cplx* p, const cplx* q, cplx* out) noexcept nogil:
    cdef cplx a = p[0] * q[0] + p[1] * q[2]
    cdef cplx b = p[0] * q[1] + p[1] * q[3]
    cdef cplx c = p[2] * q[0] + p[3] * q[2]
    cdef cplx d = p[2] * q[1] + p[3] * q[3]
    out[0] = a
    out[1] = b
    out[2] = c
    out[3] = d


def chain_product(const cplx[:, :, ::1] mats, const long[::1] idx):
    cdef cplx acc[4]
    cdef Py_ssize_t p
    acc[0] = 1
    acc[1] = 0
    acc[2] = 0
    acc[3] = 1
    with nogil:
        for p in range(idx.shape[0]):
            _mul(acc, &mats[idx[p], 0, 0], acc)
    return np.array([[acc[0], acc[1]], [acc[2], acc[3]]], dtype=complex)


def chain_traces(const cplx[:, :, ::1] mats, const long[::1] idx, const long[::1] offsets):
    cdef Py_ssize_t nw = offsets.shape[0] - 1
    out = np.empty(nw, dtype=complex)
    cdef cplx[::1] o = out
    cdef cplx acc[4]
    cdef Py_ssize_t w, p
    with nogil:
        for w in range(nw):
            acc[0] = 1
            acc[1] = 0
            acc[2] = 0
            acc[3] = 1
            for p in range(offsets[w], offsets[w + 1]):
                _mul(acc, &mats[idx[p], 0, 0], acc)
            o[w] = acc[0] + acc[3]
    return out


def lex_traces(const cplx[:, :, ::1] mats):
    cdef Py_ssize_t n = mats.shape[0]
    cdef Py_ssize_t size = n + n * (n - 1) // 2 + n * (n - 1) * (n - 2) // 6
    out = np.empty(size, dtype=complex)
    cdef cplx[::1] o = out
    cdef cplx p[4]
    cdef const cplx* q
    cdef Py_ssize_t j, k, l, pos = 0
    with nogil:
        for j in range(n):
            o[pos] = mats[j, 0, 0] + mats[j, 1, 1]
            pos += 1
        for j in range(n):
            for k in range(j + 1, n):
                o[pos] = (mats[j, 0, 0] * mats[k, 0, 0] + mats[j, 0, 1] * mats[k, 1, 0]
                          + mats[j, 1, 0] * mats[k, 0, 1] + mats[j, 1, 1] * mats[k, 1, 1])
                pos += 1
        for j in range(n):
            for k in range(j + 1, n):
                _mul(&mats[j, 0, 0], &mats[k, 0, 0], p)
                for l in range(k + 1, n):
                    q = &mats[l, 0, 0]
                    o[pos] = p[0] * q[0] + p[1] * q[2] + p[2] * q[1] + p[3] * q[3]
                    pos += 1
    return out


def conjugate_all(const cplx[:, ::1] g, const cplx[:, ::1] ginv, const cplx[:, :, ::1] mats):
    cdef Py_ssize_t m = mats.shape[0]
    out = np.empty((m, 2, 2), dtype=complex)
    cdef cplx[:, :, ::1] o = out
    cdef cplx t[4]
    cdef Py_ssize_t i
    with nogil:
        for i in range(m):
            _mul(&g[0, 0], &mats[i, 0, 0], t)
            _mul(t, &ginv[0, 0], &o[i, 0, 0])
    return out
