# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: Gray-code state enumeration and Metropolis sweeps.

Contracts match ``_pykernels`` exactly (including float semantics), so the
two backends are interchangeable and bit-for-bit comparable.
"""

from libc.math cimport exp

import numpy as np

cimport numpy as cnp

cnp.import_array()


def gray_histogram(
    int n,
    cnp.int64_t[::1] lin_flat,
    cnp.int64_t[::1] indptr,
    cnp.int32_t[::1] indices,
    cnp.int64_t[::1] weights,
    cnp.int64_t start_flat,
    cnp.uint64_t[::1] counts,
):
    """Count all 2^n states into a flat multi-observable histogram."""
    cdef cnp.int64_t t, top = (<cnp.int64_t>1) << n
    cdef cnp.int64_t flat = start_flat
    cdef cnp.int64_t acc, p, lo, hi
    cdef int v
    cdef cnp.ndarray spins_arr = np.ones(n, dtype=np.int64)
    cdef cnp.int64_t[::1] spins = spins_arr

    counts[flat] += 1
    for t in range(1, top):
        v = 0
        while not (t >> v) & 1:
            v += 1
        acc = lin_flat[v]
        lo = indptr[v]
        hi = indptr[v + 1]
        for p in range(lo, hi):
            acc += weights[p] * spins[indices[p]]
        flat -= spins[v] * acc
        spins[v] = -spins[v]
        counts[flat] += 1


def metropolis_chain(
    cnp.int64_t[::1] indptr,
    cnp.int32_t[::1] indices,
    cnp.int8_t[::1] spins,
    cnp.uint64_t[::1] state,
    double coupling,
    double field,
    double beta,
    cnp.uint32_t[::1] proposals,
    double[::1] uniforms,
    cnp.uint64_t[::1] out,
):
    """Run single-spin-flip Metropolis sweeps, recording one state per sweep.

    Proposals are spin assignments in [0, 2n) -- see the pure-Python twin
    for the aperiodicity rationale.
    """
    cdef int n = spins.shape[0]
    cdef cnp.int64_t sweeps = proposals.shape[0] // n
    cdef bint record = out.shape[0] > 0
    cdef cnp.uint64_t sigma = state[0]
    cdef cnp.int64_t sweep, pos = 0
    cdef cnp.int64_t p, ns
    cdef cnp.uint32_t prop
    cdef int k, v, target
    cdef double u, delta

    for sweep in range(sweeps):
        for k in range(n):
            prop = proposals[pos]
            u = uniforms[pos]
            pos += 1
            v = <int>(prop >> 1)
            target = 1 - 2 * <int>(prop & 1)
            if spins[v] == target:
                continue
            ns = 0
            for p in range(indptr[v], indptr[v + 1]):
                ns += spins[indices[p]]
            delta = -2.0 * (<double>spins[v]) * (coupling * (<double>ns) + field)
            if delta <= 0.0 or u < exp(-beta * delta):
                spins[v] = <cnp.int8_t>target
                sigma = sigma ^ ((<cnp.uint64_t>1) << v)
        if record:
            out[sweep] = sigma
    state[0] = sigma
