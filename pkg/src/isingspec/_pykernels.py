"""Pure-Python twins of the compiled kernels in ``_accel``.

Same contracts, same bit-for-bit results; selected automatically when the
extension is not built.  Orders of magnitude slower on large inputs, so the
biggest enumeration budgets effectively require the compiled backend.
"""

from __future__ import annotations

from math import exp


def gray_histogram(n, lin_flat, indptr, indices, weights, start_flat, counts):
    """Count all 2^n states into a flat multi-observable histogram.

    Walks states in reflected-Gray order (sigma_t = t XOR t>>1), maintaining
    the flat histogram index incrementally: flipping vertex v shifts it by
    -s_v * (lin_flat[v] + sum_u W[v,u] * s_u).  The caller packs per-
    observable strides into lin_flat and the CSR weights.
    """
    rows = [
        list(zip(indices[indptr[v] : indptr[v + 1]], weights[indptr[v] : indptr[v + 1]]))
        for v in range(n)
    ]
    lin = [int(x) for x in lin_flat]
    spins = [1] * n
    flat = int(start_flat)
    counts[flat] += 1
    for t in range(1, 1 << n):
        v = (t & -t).bit_length() - 1
        acc = lin[v]
        for u, w in rows[v]:
            acc += w * spins[u]
        flat -= spins[v] * acc
        spins[v] = -spins[v]
        counts[flat] += 1


def metropolis_chain(
    indptr, indices, spins, state, coupling, field, beta, proposals, uniforms, out
):
    """Run single-spin-flip Metropolis sweeps, recording one state per sweep.

    Each proposal is a spin assignment: ``proposals`` holds S*n pre-drawn
    values in [0, 2n) encoding (vertex, target spin), so half the proposals
    are holds; that keeps the chain aperiodic even at beta=0, where a
    forced-flip walk would preserve flip parity between records.  Flips are
    accepted with min(1, exp(-beta*deltaH)) using ``uniforms``.  ``out``
    receives the state bitmask after each sweep; pass a length-0 array to
    burn without recording.  ``spins`` (+-1 values) and ``state``
    (one-element bitmask array) are updated in place.
    """
    n = len(spins)
    rows = [list(indices[indptr[v] : indptr[v + 1]]) for v in range(n)]
    s = [int(x) for x in spins]
    sigma = int(state[0])
    record = len(out) > 0
    coupling = float(coupling)
    field = float(field)
    beta = float(beta)
    sweeps = len(proposals) // n
    pos = 0
    for sweep in range(sweeps):
        for _ in range(n):
            p = int(proposals[pos])
            u = uniforms[pos]
            pos += 1
            v = p >> 1
            target = 1 - 2 * (p & 1)
            if s[v] == target:
                continue
            ns = 0
            for w in rows[v]:
                ns += s[w]
            delta = -2.0 * float(s[v]) * (coupling * float(ns) + field)
            if delta <= 0.0 or u < exp(-beta * delta):
                s[v] = target
                sigma ^= 1 << v
        if record:
            out[sweep] = sigma
    for v in range(n):
        spins[v] = s[v]
    state[0] = sigma
