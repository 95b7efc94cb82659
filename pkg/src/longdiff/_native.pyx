# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled attention kernels.

Contracts match longdiff._kernels.pyref.  All reductions run in ascending
index order; loops release the GIL so shift matrices can be evaluated on
worker threads.
"""
from libc.math cimport cos, exp, sin

import numpy as np


def rotary_logits(double[:, ::1] q, double[:, ::1] k, double[:, ::1] pos,
                  double[::1] freqs, double scale):
    cdef Py_ssize_t nq = q.shape[0], nk = k.shape[0], d = q.shape[1]
    cdef Py_ssize_t h = freqs.shape[0]
    out_arr = np.empty((nq, nk), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, t, u
    cdef double p, ang, c, s, acc
    with nogil:
        for i in range(nq):
            for j in range(nk):
                p = pos[i, j]
                acc = 0.0
                for t in range(h):
                    ang = p * freqs[t]
                    c = cos(ang)
                    s = sin(ang)
                    acc += (q[i, 2 * t] * c - q[i, 2 * t + 1] * s) * k[j, 2 * t]
                    acc += (q[i, 2 * t] * s + q[i, 2 * t + 1] * c) * k[j, 2 * t + 1]
                for u in range(2 * h, d):
                    acc += q[i, u] * k[j, u]
                out[i, j] = acc * scale
    return out_arr


def bias_logits(double[:, ::1] q, double[:, ::1] k, double[:, ::1] bias,
                double scale):
    cdef Py_ssize_t nq = q.shape[0], nk = k.shape[0], d = q.shape[1]
    out_arr = np.empty((nq, nk), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, t
    cdef double acc
    with nogil:
        for i in range(nq):
            for j in range(nk):
                acc = 0.0
                for t in range(d):
                    acc += q[i, t] * k[j, t]
                out[i, j] = acc * scale + bias[i, j]
    return out_arr


def masked_softmax(double[:, ::1] logits, unsigned char[:, ::1] allowed):
    cdef Py_ssize_t n = logits.shape[0], m = logits.shape[1]
    out_arr = np.zeros((n, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double mx, z, e
    with nogil:
        for i in range(n):
            mx = -1e308
            for j in range(m):
                if allowed[i, j] and logits[i, j] > mx:
                    mx = logits[i, j]
            z = 0.0
            for j in range(m):
                if allowed[i, j]:
                    e = exp(logits[i, j] - mx)
                    out[i, j] = e
                    z += e
            for j in range(m):
                if allowed[i, j]:
                    out[i, j] /= z
    return out_arr


def matmul(double[:, ::1] a, double[:, ::1] b):
    cdef Py_ssize_t n = a.shape[0], kk = a.shape[1], m = b.shape[1]
    out_arr = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, t
    cdef double acc
    with nogil:
        for i in range(n):
            for j in range(m):
                acc = 0.0
                for t in range(kk):
                    acc += a[i, t] * b[t, j]
                out[i, j] = acc
    return out_arr
