# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulator kernels; same contracts as ``_pykernels``."""

import numpy as np

from libc.stdint cimport uint64_t, int8_t
from libc.math cimport sqrt

ctypedef double complex cplx

KIND_FLIP = 0
KIND_SWAP = 1


def permute(uint64_t[::1] indices, const int8_t[::1] kinds, const uint64_t[::1] cmasks,
            const uint64_t[::1] abits, const uint64_t[::1] bbits):
    cdef Py_ssize_t i, g, n = indices.shape[0], ng = kinds.shape[0]
    cdef uint64_t v, cm, a, b
    with nogil:
        for i in range(n):
            v = indices[i]
            for g in range(ng):
                cm = cmasks[g]
                if (v & cm) != cm:
                    continue
                a = abits[g]
                if kinds[g] == 0:
                    v ^= a
                else:
                    b = bbits[g]
                    if ((v & a) != 0) != ((v & b) != 0):
                        v ^= a | b
            indices[i] = v


def hadamard(const uint64_t[::1] indices, const cplx[::1] amps, int qubit, double prune):
    # indices sorted ascending.  The bit-clear and bit-set entries are each
    # sorted by pair key, so pairing and the final ordering are linear merges.
    cdef Py_ssize_t n = indices.shape[0]
    cdef uint64_t bit = (<uint64_t>1) << qubit
    cdef uint64_t notbit = ~bit
    cdef double s = sqrt(0.5)

    lo_np = np.empty(n, dtype=np.intp)
    hi_np = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] lo = lo_np
    cdef Py_ssize_t[::1] hi = hi_np
    cdef Py_ssize_t nlo = 0, nhi = 0, i, j, m = 0

    keys_np = np.empty(n, dtype=np.uint64)
    c0_np = np.empty(n, dtype=np.complex128)
    c1_np = np.empty(n, dtype=np.complex128)
    cdef uint64_t[::1] keys = keys_np
    cdef cplx[::1] c0 = c0_np
    cdef cplx[::1] c1 = c1_np
    cdef uint64_t ka, kb
    cdef cplx a0, a1

    out_idx_np = np.empty(2 * n, dtype=np.uint64)
    out_amp_np = np.empty(2 * n, dtype=np.complex128)
    cdef uint64_t[::1] out_idx = out_idx_np
    cdef cplx[::1] out_amp = out_amp_np
    cdef Py_ssize_t k = 0

    with nogil:
        for i in range(n):
            if indices[i] & bit:
                hi[nhi] = i
                nhi += 1
            else:
                lo[nlo] = i
                nlo += 1

        i = 0
        j = 0
        while i < nlo or j < nhi:
            if j >= nhi:
                ka = indices[lo[i]]
                a0 = amps[lo[i]]
                a1 = 0
                i += 1
            elif i >= nlo:
                ka = indices[hi[j]] & notbit
                a0 = 0
                a1 = amps[hi[j]]
                j += 1
            else:
                ka = indices[lo[i]]
                kb = indices[hi[j]] & notbit
                if ka < kb:
                    a0 = amps[lo[i]]
                    a1 = 0
                    i += 1
                elif kb < ka:
                    ka = kb
                    a0 = 0
                    a1 = amps[hi[j]]
                    j += 1
                else:
                    a0 = amps[lo[i]]
                    a1 = amps[hi[j]]
                    i += 1
                    j += 1
            keys[m] = ka
            c0[m] = (a0 + a1) * s
            c1[m] = (a0 - a1) * s
            m += 1

        # merge (key, c0) and (key | bit, c1), both ascending
        i = 0
        j = 0
        while i < m or j < m:
            if j >= m or (i < m and keys[i] < (keys[j] | bit)):
                if abs(c0[i]) >= prune:
                    out_idx[k] = keys[i]
                    out_amp[k] = c0[i]
                    k += 1
                i += 1
            else:
                if abs(c1[j]) >= prune:
                    out_idx[k] = keys[j] | bit
                    out_amp[k] = c1[j]
                    k += 1
                j += 1

    return out_idx_np[:k].copy(), out_amp_np[:k].copy()
