# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch path sampler over the CSR trellis layout.

Same contract as _sampling_py.sample_paths: consumes a pre-drawn uniform
matrix so both backends emit identical samples for a given seed.
"""

import numpy as np
cimport numpy as cnp


cdef inline Py_ssize_t _upper_bound(const double[::1] arr, Py_ssize_t lo,
                                    Py_ssize_t hi, double key) nogil:
    cdef Py_ssize_t mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if arr[mid] <= key:
            lo = mid + 1
        else:
            hi = mid
    return lo


def sample_paths(const double[::1] entry_cum,
                 const long long[::1] entry_node,
                 const long long[:, ::1] entry_prefix,
                 const long long[::1] indptr,
                 const double[::1] arc_cum,
                 const long long[::1] arc_token,
                 const long long[::1] arc_next,
                 const double[:, ::1] uniforms,
                 long long[:, ::1] out):
    cdef Py_ssize_t n_samples = uniforms.shape[0]
    cdef Py_ssize_t steps = uniforms.shape[1] - 1
    cdef Py_ssize_t k = entry_prefix.shape[1]
    cdef Py_ssize_t s, t, j, e, idx
    cdef long long cur
    with nogil:
        for s in range(n_samples):
            e = _upper_bound(entry_cum, 0, entry_cum.shape[0], uniforms[s, 0])
            for j in range(k):
                out[s, j] = entry_prefix[e, j]
            cur = entry_node[e]
            for t in range(steps):
                idx = _upper_bound(arc_cum, indptr[cur], indptr[cur + 1],
                                   cur + uniforms[s, t + 1])
                out[s, k + t] = arc_token[idx]
                cur = arc_next[idx]
    return np.asarray(out)
